#pragma once

// Per-operator embedding policy: which operand positions may carry bits, how
// far (in percent) each may drift, and how many bits each carries.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "opsteg/types.hpp"

namespace opsteg {

/// Decimal percentage held exactly as numerator / 10^scale.
class Percent {
public:
    constexpr Percent() = default;
    constexpr Percent(std::uint64_t numerator, unsigned scale) : numerator_(numerator), scale_(scale) {}

    /// Parses "0.05", "15", "2." ... Throws ParseError on anything else.
    static Percent parse(std::string_view text);

    std::uint64_t numerator() const noexcept { return numerator_; }
    std::uint64_t denominator() const noexcept;
    double value() const noexcept;
    std::string str() const;

    bool operator==(const Percent& other) const noexcept;
    std::strong_ordering operator<=>(const Percent& other) const noexcept;

private:
    std::uint64_t numerator_ = 0;
    unsigned scale_ = 0;
};

enum class Reliability { Good, Low };
enum class UsableRule { Indices, All, AllNumeric };

struct RegistryEntry {
    std::string op_name;
    std::size_t min_operands = 0;
    std::size_t max_operands = 0;
    UsableRule usable = UsableRule::Indices;
    std::map<std::size_t, Percent> p_per_index;
    std::optional<Percent> p_all;  // used by the All / AllNumeric rules
    unsigned default_n = 1;
    Reliability reliability = Reliability::Good;
    bool enabled = true;

    /// Budget for operand `index`, or nullopt when that position never carries bits.
    std::optional<Percent> budget(std::size_t index) const;
    bool has_usable_index() const noexcept { return !p_per_index.empty() || p_all.has_value(); }
};

/// The built-in table: one entry per carrier operator.
std::vector<RegistryEntry> default_registry();

struct OperatorOverride {
    std::string op_name;
    std::optional<unsigned> n;
    std::optional<Percent> p_all;
    std::map<std::size_t, Percent> p_index;
    std::optional<bool> enabled;

    bool operator==(const OperatorOverride&) const = default;
};

struct StegConfig {
    static constexpr unsigned kHeaderBits = 32;
    static constexpr unsigned kMaxBitsPerOperand = 32;

    std::vector<OperatorOverride> entries;
    bool include_low_reliability = true;
    std::string version_tag;

    bool operator==(const StegConfig&) const = default;
};

/// Parses the line-oriented config format:
///
///     # comment
///     include_low_reliability=false
///     version_tag=team-a
///     op Tf n=2 p=0.25
///     op cm p4=0.02 p5=0.02
///     op i enabled=true p=1
///
/// Throws ParseError for malformed lines or unknown keys, ConfigMismatch
/// for operators outside the registry.
StegConfig load_config(std::string_view text);

/// Registry with a config's overrides applied. Immutable once built.
class Registry {
public:
    Registry();
    explicit Registry(const StegConfig& cfg);

    const RegistryEntry* lookup(std::string_view op) const noexcept;
    const std::vector<RegistryEntry>& entries() const noexcept { return entries_; }
    bool include_low_reliability() const noexcept { return include_low_; }

    /// Budget for a slot if it participates, nullopt otherwise.
    std::optional<Percent> slot_budget(const OperatorSite& site, const OperandSlot& slot) const;
    unsigned bits_per_operand(std::string_view op) const;

    void mark(std::span<OperatorSite> sites) const;

private:
    std::vector<RegistryEntry> entries_;
    bool include_low_ = true;
};

/// Sets `eligible` on every operand slot. Throws ConfigMismatch when the
/// config names an operator outside the registry.
std::vector<OperatorSite> mark_eligibility(std::vector<OperatorSite> sites, const StegConfig& cfg);

/// True when the digit string denotes zero ("0", "000", ...).
bool digits_are_zero(std::string_view digits) noexcept;

}  // namespace opsteg
