#pragma once

// Minimal single-revision PDF generator driven by a small text format, plus
// a tokenizer-based census of the eligible operand slots it will contain.
//
// Fixture text format (one directive or content line per line):
//
//     # comment
//     pages 3             clone the page content onto 3 pages (default 1)
//     flate               compress content streams with /FlateDecode
//     page                start an explicit page section
//     form                start a Form XObject section
//     charproc            start a Type3 glyph procedure section
//     repeat 10 288 720 Td
//     BT /F1 12 Tf ET     any other line is copied into the current section
//
// Lines that frame a pasted object listing (`8 0 obj`, `<< ... >>`,
// `stream`, `endstream`, `endobj`) are ignored, so a verbatim object
// listing works as a fixture.

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "opsteg/steg_registry.hpp"

namespace opsteg {

enum class FixtureSectionKind { Page, Form, CharProc };

struct FixtureSection {
    FixtureSectionKind kind = FixtureSectionKind::Page;
    std::string content;
};

struct FixtureSpec {
    std::vector<FixtureSection> sections;  // pages first, then forms, then glyph procedures
    bool flate = false;

    std::size_t page_count() const noexcept;
};

/// Throws ParseError (including for `pages 0`).
FixtureSpec parse_fixture_spec(std::string_view text);

/// Serialized PDF bytes for the spec.
std::string build_fixture(const FixtureSpec& spec);

struct SlotCensus {
    std::map<std::string, std::size_t> eligible_slots;
    std::size_t total() const noexcept;
};

/// Eligible-slot count per operator, computed by plain tokenization of the
/// section text rather than by the regex scanner.
SlotCensus census(const FixtureSpec& spec, const StegConfig& cfg = {});

}  // namespace opsteg
