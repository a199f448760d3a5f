#pragma once

// Shared helpers for the unit and acceptance tests. Nothing here calls the
// library's parser or codec internals to compute an expected value.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "opsteg/error.hpp"
#include "opsteg/steg_registry.hpp"

namespace opsteg::testing {

/// Fixture text with every carrier operator at least once, random numeric
/// spellings (integers, decimals, negatives, `.5`, `5.`, zeros), TJ arrays
/// with digits inside strings, string/comment noise, and optional form,
/// glyph-procedure and flate sections.
std::string random_fixture_text(std::mt19937_64& rng, std::size_t lines);

/// Config text giving every operator a random n in [1, max_n]; optionally
/// enables `i` and `M` with p=1.
std::string random_config_text(std::mt19937_64& rng, unsigned max_n, bool enable_disabled);

std::string random_bytes(std::mt19937_64& rng, std::size_t n);

/// Raw-byte structural audit of a serialized PDF: every in-use xref entry
/// points at `N G obj`, startxref points at `xref`, and every stream's
/// /Length (direct or indirect) equals the bytes before `endstream`.
struct StructureReport {
    bool ok = true;
    std::string problem;
    std::size_t objects = 0;
    std::size_t streams = 0;
    std::vector<std::uint64_t> stream_lengths;  // in object order
    std::string startxref_digits;
};
StructureReport audit_structure(std::string_view pdf);

/// Exact check that |new - old| <= p/100 * |old| for decimal tokens.
bool within_budget(std::string_view old_token, std::string_view new_token, Percent p);

/// Code of the opsteg::Error thrown by `f`, or nullopt when nothing is thrown.
template <class F>
std::optional<ErrorCode> error_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return std::nullopt;
}

/// Hand-assembled PDF without an xref table: object k+1 has body
/// `bodies[k]`, trailer is `<< /Root 1 0 R {trailer_extra} >>`.
std::string raw_pdf(const std::vector<std::string>& bodies, std::string_view trailer_extra = "");

/// Decimal digit count of `v`.
std::size_t digit_count(std::uint64_t v);

}  // namespace opsteg::testing
