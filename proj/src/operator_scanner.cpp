#include "opsteg/operator_scanner.hpp"

#include <boost/regex.hpp>

#include <algorithm>
#include <cctype>

#include "opsteg/error.hpp"
#include "opsteg/operator_table.hpp"
#include "opsteg/pdf_syntax.hpp"

namespace opsteg {

namespace {

constexpr char kFiller = '\x01';

// Boundary before the first operand: stream start, whitespace, filler or a delimiter.
constexpr std::string_view kBoundary = R"((?<![^\s\x01()<>\[\]{}/%]))";

std::string operator_alternation() {
    std::vector<std::string_view> names;
    for (const auto& op : operator_table()) {
        if (op.name != "TJ") names.push_back(op.name);
    }
    // Longest first so that e.g. `scn` is tried before `sc`.
    std::stable_sort(names.begin(), names.end(),
                     [](std::string_view a, std::string_view b) { return a.size() > b.size(); });
    std::string alt;
    for (auto n : names) {
        if (!alt.empty()) alt.push_back('|');
        alt += n;
    }
    return alt;
}

std::size_t max_fixed_arity() {
    std::size_t m = 0;
    for (const auto& op : operator_table()) {
        if (op.max_operands != kUnboundedOperands) m = std::max(m, op.max_operands);
    }
    return m;
}

/// All general masks folded into one pattern; the operand count is checked
/// against the operator's bounds after matching.
const boost::regex& combined_operator_regex() {
    static const boost::regex re(std::string(kBoundary) + R"(((?:[\d\.\-]+\s+){1,)" +
                                 std::to_string(max_fixed_arity()) + "})(" + operator_alternation() +
                                 R"()(?=[\[\s]))");
    return re;
}

const boost::regex& tj_site_regex() {
    static const boost::regex re(R"(\[[^\[\]\n]+?\]\s*?TJ(?![^\s\x01()<>\[\]{}/%]))");
    return re;
}

const boost::regex& operand_regex() {
    static const boost::regex re{std::string(masks::kOperand)};
    return re;
}

/// Boost reads `\<` and `\>` outside brackets as word boundaries, while the
/// mask means literal angle brackets; drop those escapes.
std::string to_boost_syntax(std::string_view pattern) {
    std::string out;
    bool in_class = false;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        const char c = pattern[i];
        if (c == '\\' && i + 1 < pattern.size()) {
            const char next = pattern[++i];
            if (in_class || (next != '<' && next != '>')) out.push_back('\\');
            out.push_back(next);
            continue;
        }
        if (c == '[') in_class = true;
        if (c == ']') in_class = false;
        out.push_back(c);
    }
    return out;
}

const boost::regex& tj_operand_regex() {
    static const boost::regex re{to_boost_syntax(masks::kTjOperand)};
    return re;
}

/// End of the inline image that begins with the `BI` token at `pos`
/// (one past `EI`), or the buffer end when unterminated.
std::size_t inline_image_end(std::string_view buf, std::size_t pos) {
    std::size_t p = pos + 2;
    while (p < buf.size()) {
        p = syntax::skip_whitespace_and_comments(buf, p);
        if (syntax::keyword_at(buf, p, "ID")) break;
        if (p >= buf.size()) return buf.size();
        const char c = buf[p];
        if (c == '(') {
            const auto e = syntax::literal_string_end(buf, p);
            p = e == std::string_view::npos ? buf.size() : e;
        } else if (c == '<' || c == '>' || c == '[' || c == ']' || c == '/') {
            ++p;
            if (c == '/') p = syntax::regular_token_end(buf, p);
        } else {
            p = std::max(syntax::regular_token_end(buf, p), p + 1);
        }
    }
    p += 3;
    while (p + 2 <= buf.size()) {
        const auto k = buf.find("EI", p);
        if (k == std::string_view::npos) break;
        const bool left = k > 0 && syntax::is_whitespace(buf[k - 1]);
        const bool right = k + 2 >= buf.size() || !syntax::is_regular(buf[k + 2]);
        if (left && right) return k + 2;
        p = k + 1;
    }
    return buf.size();
}

enum class MaskMode { Operators, TextArrays };

std::string mask(std::string_view buf, MaskMode mode) {
    std::string out(buf);
    const bool ops = mode == MaskMode::Operators;
    auto fill = [&out](std::size_t b, std::size_t e) {
        std::fill(out.begin() + static_cast<std::ptrdiff_t>(b), out.begin() + static_cast<std::ptrdiff_t>(e), kFiller);
    };
    std::size_t i = 0;
    while (i < buf.size()) {
        const char c = buf[i];
        if (c == '(') {
            const auto e = syntax::literal_string_end(buf, i);
            const auto end = e == std::string_view::npos ? buf.size() : e;
            if (ops) {
                fill(i, end);
            } else if (end > i + 1) {
                fill(i + 1, e == std::string_view::npos ? end : end - 1);
            }
            i = end;
        } else if (c == '<') {
            if (i + 1 < buf.size() && buf[i + 1] == '<') {
                i += 2;
                continue;
            }
            const auto e = syntax::hex_string_end(buf, i);
            const auto end = e == std::string_view::npos ? buf.size() : e;
            if (ops) {
                fill(i, end);
            } else if (end > i + 1) {
                fill(i + 1, e == std::string_view::npos ? end : end - 1);
            }
            i = end;
        } else if (c == '%') {
            auto e = i;
            while (e < buf.size() && buf[e] != '\n' && buf[e] != '\r') ++e;
            fill(i, e);
            i = e;
        } else if (c == '/') {
            const auto e = syntax::regular_token_end(buf, i + 1);
            if (ops) fill(i, e);
            i = e;
        } else if (syntax::is_regular(c)) {
            const auto e = syntax::regular_token_end(buf, i);
            if (e - i == 2 && buf[i] == 'B' && buf[i + 1] == 'I') {
                const auto end = inline_image_end(buf, i);
                fill(i, end);
                i = end;
            } else {
                i = e;
            }
        } else {
            ++i;
        }
    }
    return out;
}

/// [begin, end) ranges of string literals and hex strings inside `text`.
std::vector<ByteSpan> string_regions(std::string_view text) {
    std::vector<ByteSpan> regions;
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '(') {
            const auto e = syntax::literal_string_end(text, i);
            const auto end = e == std::string_view::npos ? text.size() : e;
            regions.push_back({i, end});
            i = end;
        } else if (text[i] == '<' && (i + 1 >= text.size() || text[i + 1] != '<')) {
            const auto e = syntax::hex_string_end(text, i);
            const auto end = e == std::string_view::npos ? text.size() : e;
            regions.push_back({i, end});
            i = end;
        } else {
            ++i;
        }
    }
    return regions;
}

std::string numeric_error(std::string_view token) {
    return "'" + std::string(token) + "' is not a numeric token";
}

}  // namespace

namespace masks {

std::string operator_mask(std::string_view op) {
    const auto* arity = find_operator(op);
    if (arity == nullptr || arity->max_operands == kUnboundedOperands) {
        throw Error(ErrorCode::InvalidArgument, "no general mask for operator '" + std::string(op) + "'");
    }
    std::string out(kOperatorTemplate);
    const auto q = out.find("{a,b}");
    out.replace(q, 5, "{" + std::to_string(arity->min_operands) + "," + std::to_string(arity->max_operands) + "}");
    const auto o = out.find("op[");
    out.replace(o, 2, op);
    return out;
}

}  // namespace masks

std::string mask_for_operators(std::string_view decoded) { return mask(decoded, MaskMode::Operators); }

std::string mask_for_text_arrays(std::string_view decoded) { return mask(decoded, MaskMode::TextArrays); }

std::optional<OperandSlot> parse_numeric_token(std::string_view token) {
    OperandSlot slot;
    slot.text = std::string(token);
    std::size_t i = 0;
    if (i < token.size() && token[i] == '-') {
        slot.sign = -1;
        ++i;
    }
    bool seen_point = false;
    for (; i < token.size(); ++i) {
        const char c = token[i];
        if (syntax::is_digit(c)) {
            slot.digits.push_back(c);
            if (seen_point) ++slot.frac_count;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            return std::nullopt;
        }
    }
    if (slot.digits.empty()) return std::nullopt;
    return slot;
}

std::vector<OperandSlot> extract_operands(std::string_view site_text, std::string_view op_name) {
    std::vector<OperandSlot> slots;
    const bool tj = op_name == "TJ";

    std::string_view region = site_text;
    if (!tj) {
        // Operands end before the operator token; d0/d1 carry digits in their names.
        std::size_t end = site_text.size();
        while (end > 0 && (syntax::is_whitespace(site_text[end - 1]) || site_text[end - 1] == '[')) --end;
        if (site_text.substr(0, end).ends_with(op_name)) end -= op_name.size();
        region = site_text.substr(0, end);
    }

    const auto strings = tj ? string_regions(site_text) : std::vector<ByteSpan>{};
    const auto& re = tj ? tj_operand_regex() : operand_regex();
    boost::cregex_iterator it(region.data(), region.data() + region.size(), re);
    for (const boost::cregex_iterator end; it != end; ++it) {
        const auto& m = *it;
        const auto begin = static_cast<std::size_t>(m.position());
        const auto len = static_cast<std::size_t>(m.length());
        const bool inside_string = std::any_of(strings.begin(), strings.end(), [&](const ByteSpan& s) {
            return begin >= s.begin && begin < s.end;
        });
        if (inside_string) continue;
        const auto token = region.substr(begin, len);
        auto slot = parse_numeric_token(token);
        if (!slot) throw Error(ErrorCode::ParseError, numeric_error(token));
        slot->span = {begin, begin + len};
        slot->operand_index = slots.size();
        slots.push_back(std::move(*slot));
    }
    if (slots.empty() && !tj) {
        throw Error(ErrorCode::NoOperands, "operator '" + std::string(op_name) + "' matched without operands");
    }
    return slots;
}

StreamScan scan_stream(std::string_view decoded, ObjectId owner) {
    StreamScan result;
    if (decoded.empty()) return result;

    auto add_site = [&](std::size_t begin, std::size_t end, std::string op) {
        try {
            auto operands = extract_operands(decoded.substr(begin, end - begin), op);
            for (auto& slot : operands) {
                slot.span.begin += begin;
                slot.span.end += begin;
            }
            OperatorSite site;
            site.op_name = std::move(op);
            site.stream_owner = owner;
            site.match_span = {begin, end};
            site.operands = std::move(operands);
            result.sites.push_back(std::move(site));
        } catch (const Error& e) {
            result.diagnostics.push_back({{begin, end}, std::string("site discarded: ") + e.what()});
        }
    };

    const std::string general = mask_for_operators(decoded);
    {
        boost::regex_iterator<std::string::const_iterator> it(general.begin(), general.end(),
                                                              combined_operator_regex());
        for (const decltype(it) end; it != end; ++it) {
            const auto& m = *it;
            const std::string op = m.str(2);
            const auto* arity = find_operator(op);
            // Group 1 holds the whitespace-terminated operand run.
            std::vector<std::size_t> token_starts;
            const auto run_begin = static_cast<std::size_t>(m.position(1));
            const auto run_end = run_begin + static_cast<std::size_t>(m.length(1));
            for (std::size_t p = run_begin; p < run_end;) {
                token_starts.push_back(p);
                while (p < run_end && !std::isspace(static_cast<unsigned char>(general[p]))) ++p;
                while (p < run_end && std::isspace(static_cast<unsigned char>(general[p]))) ++p;
            }
            if (token_starts.size() < arity->min_operands) continue;
            std::size_t first = 0;
            if (token_starts.size() > arity->max_operands) first = token_starts.size() - arity->max_operands;
            const auto op_end = static_cast<std::size_t>(m.position(2) + m.length(2));
            add_site(token_starts[first], op_end, op);
        }
    }

    const std::string text_arrays = mask_for_text_arrays(decoded);
    {
        boost::regex_iterator<std::string::const_iterator> it(text_arrays.begin(), text_arrays.end(),
                                                              tj_site_regex());
        for (const decltype(it) end; it != end; ++it) {
            const auto begin = static_cast<std::size_t>(it->position());
            add_site(begin, begin + static_cast<std::size_t>(it->length()), "TJ");
        }
    }

    std::sort(result.sites.begin(), result.sites.end(), [](const OperatorSite& a, const OperatorSite& b) {
        return a.match_span.begin < b.match_span.begin;
    });
    // A site overlapping its predecessor is dropped so splices never collide.
    std::vector<OperatorSite> kept;
    kept.reserve(result.sites.size());
    for (auto& site : result.sites) {
        if (!kept.empty() && site.match_span.begin < kept.back().match_span.end) {
            result.diagnostics.push_back({site.match_span, "site discarded: overlaps previous " + kept.back().op_name});
            continue;
        }
        site.source_order = kept.size();
        kept.push_back(std::move(site));
    }
    result.sites = std::move(kept);
    return result;
}

std::string splice_operand(std::string_view decoded, const OperandSlot& slot, std::string_view new_text) {
    if (slot.span.begin > slot.span.end || slot.span.end > decoded.size()) {
        throw Error(ErrorCode::SpanOutOfRange, "span [" + std::to_string(slot.span.begin) + ", " +
                                                   std::to_string(slot.span.end) + ") exceeds stream of " +
                                                   std::to_string(decoded.size()) + " bytes");
    }
    std::string out;
    out.reserve(decoded.size() + new_text.size());
    out.append(decoded.substr(0, slot.span.begin));
    out.append(new_text);
    out.append(decoded.substr(slot.span.end));
    return out;
}

}  // namespace opsteg
