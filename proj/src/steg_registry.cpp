#include "opsteg/steg_registry.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "opsteg/error.hpp"
#include "opsteg/operator_table.hpp"

namespace opsteg {

namespace {

constexpr unsigned kMaxPercentDigits = 18;

std::uint64_t pow10(unsigned e) {
    std::uint64_t v = 1;
    while (e-- > 0) v *= 10;
    return v;
}

unsigned __int128 scaled(const Percent& p, std::uint64_t other_den) {
    return static_cast<unsigned __int128>(p.numerator()) * other_den;
}

Percent pct(std::string_view text) { return Percent::parse(text); }

RegistryEntry entry(std::string_view name, std::initializer_list<std::pair<std::size_t, Percent>> budgets,
                    Reliability reliability = Reliability::Good) {
    const auto* arity = find_operator(name);
    RegistryEntry e;
    e.op_name = std::string(name);
    e.min_operands = arity->min_operands;
    e.max_operands = arity->max_operands;
    e.reliability = reliability;
    for (const auto& [index, p] : budgets) e.p_per_index[index] = p;
    return e;
}

/// Same budget on every index in [0, count).
RegistryEntry uniform(std::string_view name, std::size_t count, Percent p,
                      Reliability reliability = Reliability::Good) {
    RegistryEntry e = entry(name, {}, reliability);
    for (std::size_t i = 0; i < count; ++i) e.p_per_index[i] = p;
    return e;
}

RegistryEntry all_operands(std::string_view name, Percent p, UsableRule rule) {
    RegistryEntry e = entry(name, {});
    e.usable = rule;
    e.p_all = p;
    return e;
}

RegistryEntry disabled(std::string_view name) {
    RegistryEntry e = entry(name, {});
    e.enabled = false;
    return e;
}

bool parse_bool(std::string_view v, std::size_t line) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": expected a boolean, got '" +
                                           std::string(v) + "'");
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

void apply_override(RegistryEntry& e, const OperatorOverride& o) {
    if (o.n) e.default_n = *o.n;
    if (o.p_all) {
        if (e.usable != UsableRule::Indices) {
            e.p_all = *o.p_all;
        } else if (e.p_per_index.empty()) {
            e.usable = UsableRule::All;
            e.p_all = *o.p_all;
        } else {
            for (auto& [index, p] : e.p_per_index) p = *o.p_all;
        }
    }
    for (const auto& [index, p] : o.p_index) e.p_per_index[index] = p;
    if (o.enabled) e.enabled = *o.enabled;
    if (e.enabled && !e.has_usable_index()) {
        throw Error(ErrorCode::ConfigMismatch,
                    "operator '" + e.op_name + "' is enabled but has no percentage budget; add p=<percent>");
    }
}

}  // namespace

Percent Percent::parse(std::string_view text) {
    std::uint64_t num = 0;
    unsigned scale = 0;
    unsigned digits = 0;
    bool point = false;
    for (char c : text) {
        if (c == '.' && !point) {
            point = true;
        } else if (c >= '0' && c <= '9') {
            if (++digits > kMaxPercentDigits) {
                throw Error(ErrorCode::ParseError, "percentage '" + std::string(text) + "' has too many digits");
            }
            num = num * 10 + static_cast<std::uint64_t>(c - '0');
            if (point) ++scale;
        } else {
            throw Error(ErrorCode::ParseError, "'" + std::string(text) + "' is not a percentage");
        }
    }
    if (digits == 0) throw Error(ErrorCode::ParseError, "'" + std::string(text) + "' is not a percentage");
    return Percent(num, scale);
}

std::uint64_t Percent::denominator() const noexcept { return pow10(scale_); }

double Percent::value() const noexcept {
    return static_cast<double>(numerator_) / static_cast<double>(denominator());
}

std::string Percent::str() const {
    std::string digits = std::to_string(numerator_);
    if (scale_ == 0) return digits;
    if (digits.size() <= scale_) digits.insert(0, scale_ - digits.size() + 1, '0');
    digits.insert(digits.size() - scale_, 1, '.');
    while (digits.back() == '0') digits.pop_back();
    if (digits.back() == '.') digits.pop_back();
    return digits;
}

bool Percent::operator==(const Percent& other) const noexcept {
    return scaled(*this, other.denominator()) == scaled(other, denominator());
}

std::strong_ordering Percent::operator<=>(const Percent& other) const noexcept {
    return scaled(*this, other.denominator()) <=> scaled(other, denominator());
}

std::optional<Percent> RegistryEntry::budget(std::size_t index) const {
    if (const auto it = p_per_index.find(index); it != p_per_index.end()) return it->second;
    if (usable != UsableRule::Indices && p_all) return p_all;
    return std::nullopt;
}

std::vector<RegistryEntry> default_registry() {
    const auto one = pct("1");
    const auto five = pct("5");
    const auto two = pct("2");
    std::vector<RegistryEntry> r;
    r.reserve(32);
    // Path construction.
    r.push_back(uniform("c", 6, one));
    r.push_back(uniform("v", 4, one));
    r.push_back(uniform("y", 4, one));
    r.push_back(uniform("l", 2, pct("0.05")));
    r.push_back(uniform("m", 2, pct("0.05")));
    r.push_back(uniform("re", 4, pct("0.2")));
    // Graphics state. i and M have no established cutoff and ship disabled.
    r.push_back(entry("cm", {{0, pct("0.1")}, {1, pct("0.1")}, {2, pct("0.1")}, {3, pct("0.1")},
                             {4, pct("0.05")}, {5, pct("0.05")}}));
    r.push_back(disabled("i"));
    r.push_back(disabled("M"));
    r.push_back(uniform("w", 1, one));
    // Color.
    r.push_back(uniform("G", 1, five));
    r.push_back(uniform("g", 1, five));
    r.push_back(uniform("K", 4, five));
    r.push_back(uniform("k", 4, five));
    r.push_back(uniform("RG", 3, five));
    r.push_back(uniform("rg", 3, five));
    for (const auto* name : {"sc", "SC", "scn", "SCN"}) r.push_back(all_operands(name, five, UsableRule::All));
    // Text state and positioning.
    r.push_back(uniform("Tc", 1, one, Reliability::Low));
    r.push_back(uniform("Td", 2, two));
    r.push_back(uniform("TD", 2, two));
    r.push_back(uniform("Tf", 1, pct("0.5")));
    r.push_back(uniform("TL", 1, two));
    r.push_back(entry("Tm", {{0, five}, {1, five}, {2, five}, {3, five}, {4, two}, {5, two}}));
    r.push_back(uniform("Ts", 1, five));
    r.push_back(uniform("Tw", 1, one, Reliability::Low));
    r.push_back(uniform("Tz", 1, pct("0.5")));
    r.push_back(all_operands("TJ", pct("15"), UsableRule::AllNumeric));
    // Type3 glyph metrics; the vertical advance w_y must stay 0.
    r.push_back(entry("d0", {{0, one}}));
    r.push_back(entry("d1", {{0, one}, {2, one}, {3, one}, {4, one}, {5, one}}));
    return r;
}

bool digits_are_zero(std::string_view digits) noexcept {
    return std::all_of(digits.begin(), digits.end(), [](char c) { return c == '0'; });
}

StegConfig load_config(std::string_view text) {
    StegConfig cfg;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto where = "line " + std::to_string(line_no) + ": ";
        if (line.starts_with("op ") || line.starts_with("op\t")) {
            std::istringstream words{std::string(line.substr(3))};
            OperatorOverride o;
            if (!(words >> o.op_name)) throw Error(ErrorCode::ParseError, where + "missing operator name");
            if (find_operator(o.op_name) == nullptr) {
                throw Error(ErrorCode::ConfigMismatch, where + "unknown operator '" + o.op_name + "'");
            }
            std::string word;
            while (words >> word) {
                const auto eq = word.find('=');
                if (eq == std::string::npos) throw Error(ErrorCode::ParseError, where + "expected key=value, got '" + word + "'");
                const std::string key = word.substr(0, eq);
                const std::string value = word.substr(eq + 1);
                if (key == "n") {
                    unsigned n = 0;
                    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
                    if (ec != std::errc{} || ptr != value.data() + value.size() || n == 0 ||
                        n > StegConfig::kMaxBitsPerOperand) {
                        throw Error(ErrorCode::ParseError, where + "n must be an integer in [1, 32]");
                    }
                    o.n = n;
                } else if (key == "enabled") {
                    o.enabled = parse_bool(value, line_no);
                } else if (key.size() >= 1 && key[0] == 'p') {
                    const Percent p = Percent::parse(value);
                    if (p.numerator() == 0) throw Error(ErrorCode::ParseError, where + "percentage must be positive");
                    if (key == "p") {
                        o.p_all = p;
                    } else {
                        std::size_t index = 0;
                        auto [ptr, ec] = std::from_chars(key.data() + 1, key.data() + key.size(), index);
                        if (ec != std::errc{} || ptr != key.data() + key.size()) {
                            throw Error(ErrorCode::ParseError, where + "unknown key '" + key + "'");
                        }
                        const auto* arity = find_operator(o.op_name);
                        if (index >= arity->max_operands) {
                            throw Error(ErrorCode::ConfigMismatch, where + "operator '" + o.op_name +
                                                                       "' has no operand " + std::to_string(index));
                        }
                        o.p_index[index] = p;
                    }
                } else {
                    throw Error(ErrorCode::ParseError, where + "unknown key '" + key + "'");
                }
            }
            cfg.entries.push_back(std::move(o));
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw Error(ErrorCode::ParseError, where + "unrecognized line");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key == "include_low_reliability") {
            cfg.include_low_reliability = parse_bool(value, line_no);
        } else if (key == "version_tag") {
            cfg.version_tag = std::string(value);
        } else if (key == "header_bits") {
            if (value != "32") throw Error(ErrorCode::ConfigMismatch, where + "header_bits is fixed at 32");
        } else {
            throw Error(ErrorCode::ParseError, where + "unknown key '" + std::string(key) + "'");
        }
    }
    // Validates enabled/budget combinations up front.
    Registry{cfg};
    return cfg;
}

Registry::Registry() : entries_(default_registry()) {}

Registry::Registry(const StegConfig& cfg) : entries_(default_registry()), include_low_(cfg.include_low_reliability) {
    for (const auto& o : cfg.entries) {
        auto it = std::find_if(entries_.begin(), entries_.end(),
                               [&](const RegistryEntry& e) { return e.op_name == o.op_name; });
        if (it == entries_.end()) {
            throw Error(ErrorCode::ConfigMismatch, "unknown operator '" + o.op_name + "'");
        }
        apply_override(*it, o);
    }
}

const RegistryEntry* Registry::lookup(std::string_view op) const noexcept {
    for (const auto& e : entries_) {
        if (e.op_name == op) return &e;
    }
    return nullptr;
}

std::optional<Percent> Registry::slot_budget(const OperatorSite& site, const OperandSlot& slot) const {
    const auto* e = lookup(site.op_name);
    if (e == nullptr || !e->enabled) return std::nullopt;
    if (!include_low_ && e->reliability == Reliability::Low) return std::nullopt;
    if (digits_are_zero(slot.digits)) return std::nullopt;
    return e->budget(slot.operand_index);
}

unsigned Registry::bits_per_operand(std::string_view op) const {
    const auto* e = lookup(op);
    return e == nullptr ? 0 : e->default_n;
}

void Registry::mark(std::span<OperatorSite> sites) const {
    for (auto& site : sites) {
        for (auto& slot : site.operands) slot.eligible = slot_budget(site, slot).has_value();
    }
}

std::vector<OperatorSite> mark_eligibility(std::vector<OperatorSite> sites, const StegConfig& cfg) {
    Registry(cfg).mark(sites);
    return sites;
}

}  // namespace opsteg
