#include "support.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <sstream>

#include "opsteg/operator_table.hpp"

namespace opsteg::testing {

namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

std::string random_number(std::mt19937_64& rng) {
    const auto form = pick(rng, 0, 19);
    if (form == 0) return "0";
    if (form == 1) return "0.00";
    std::string s;
    if (pick(rng, 0, 3) == 0) s.push_back('-');
    const auto whole = pick(rng, 0, form < 6 ? 9 : 2000);
    const auto frac_len = pick(rng, 0, 4);
    if (form == 2 && frac_len > 0) {
        // `.5` style, no integer digits
    } else {
        s += std::to_string(whole);
    }
    if (frac_len > 0) {
        s.push_back('.');
        for (std::size_t k = 0; k < frac_len; ++k) s.push_back(static_cast<char>('0' + pick(rng, 0, 9)));
    } else if (form == 3) {
        s.push_back('.');  // `5.` style
    }
    if (s == "-" || s.empty()) s += "7";
    return s;
}

std::string random_tj(std::mt19937_64& rng) {
    static const char* strings[] = {"(A1)", "(B3)", "(x 12 y)", "<4142>", "(H)", "(e)", "(\\(9\\))", "(C)"};
    std::string s = "[";
    const auto n = pick(rng, 1, 8);
    for (std::size_t k = 0; k < n; ++k) {
        s += strings[pick(rng, 0, std::size(strings) - 1)];
        if (pick(rng, 0, 2) != 0) s += random_number(rng);
        if (pick(rng, 0, 3) == 0) s += ' ';
    }
    s += "] TJ";
    return s;
}

std::string operator_line(std::mt19937_64& rng, const OperatorArity& op) {
    if (op.name == "TJ") return random_tj(rng);
    if (op.name == "Tf") return "/F1 " + random_number(rng) + " Tf";
    const auto count = op.min_operands == op.max_operands ? op.min_operands : pick(rng, op.min_operands, op.max_operands);
    std::string s;
    for (std::size_t k = 0; k < count; ++k) s += random_number(rng) + " ";
    s += op.name;
    return s;
}

std::string noise_line(std::mt19937_64& rng) {
    static const char* noise[] = {"BT", "ET", "q", "Q", "S", "f", "(1 2 l) Tj", "% 3 4 m comment",
                                  "/GS12 gs", "(ABC) Tj", "<31 32> Tj", "n"};
    return noise[pick(rng, 0, std::size(noise) - 1)];
}

bool is_type3_only(std::string_view name) { return name == "d0" || name == "d1"; }

std::string section_body(std::mt19937_64& rng, std::size_t lines, bool type3) {
    const auto table = operator_table();
    std::string out;
    for (std::size_t k = 0; k < lines; ++k) {
        if (pick(rng, 0, 5) == 0) {
            out += noise_line(rng);
        } else {
            const OperatorArity* op = nullptr;
            do {
                op = &table[pick(rng, 0, table.size() - 1)];
            } while (is_type3_only(op->name) && !type3);
            out += operator_line(rng, *op);
        }
        out += '\n';
    }
    return out;
}

std::optional<std::uint64_t> number_at(std::string_view s, std::size_t pos) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + s.size(), v);
    if (ec != std::errc{} || ptr == s.data() + pos) return std::nullopt;
    return v;
}

cpp_rational token_value(std::string_view tok) {
    bool neg = false;
    if (!tok.empty() && tok[0] == '-') {
        neg = true;
        tok.remove_prefix(1);
    }
    cpp_int digits = 0;
    cpp_int scale = 1;
    bool after_point = false;
    for (char c : tok) {
        if (c == '.') {
            after_point = true;
            continue;
        }
        digits = digits * 10 + (c - '0');
        if (after_point) scale *= 10;
    }
    cpp_rational v(digits, scale);
    return neg ? cpp_rational(-v) : v;
}

}  // namespace

std::string random_fixture_text(std::mt19937_64& rng, std::size_t lines) {
    const auto table = operator_table();
    std::ostringstream out;
    out << "# generated\n";
    out << "pages " << pick(rng, 1, 3) << "\n";
    if (pick(rng, 0, 1) == 0) out << "flate\n";

    // Every operator once, non-Type3 ones on the page, d0/d1 in glyph procedures.
    std::string page;
    for (const auto& op : table) {
        if (!is_type3_only(op.name)) page += operator_line(rng, op) + "\n";
    }
    const auto form_lines = lines / 5;
    const auto proc_lines = lines / 10;
    const auto page_lines = lines - std::min(lines, form_lines + proc_lines);
    page += section_body(rng, page_lines, false);
    out << page;
    if (pick(rng, 0, 3) != 0) out << "form\n" << section_body(rng, form_lines, false);
    out << "charproc\n" << "1000 0 d0\n" << section_body(rng, proc_lines / 2, true);
    out << "charproc\n"
        << "1000 0 -100 -100 800 800 d1\n"
        << section_body(rng, proc_lines - proc_lines / 2, true);
    return out.str();
}

std::string random_config_text(std::mt19937_64& rng, unsigned max_n, bool enable_disabled) {
    std::ostringstream out;
    out << "# random bit widths\n";
    for (const auto& op : operator_table()) {
        out << "op " << op.name << " n=" << pick(rng, 1, max_n);
        if (enable_disabled && (op.name == "i" || op.name == "M")) out << " p=1 enabled=true";
        out << "\n";
    }
    return out.str();
}

std::string random_bytes(std::mt19937_64& rng, std::size_t n) {
    std::string s(n, '\0');
    for (auto& c : s) c = static_cast<char>(pick(rng, 0, 255));
    return s;
}

std::string raw_pdf(const std::vector<std::string>& bodies, std::string_view trailer_extra) {
    std::string out = "%PDF-1.7\n";
    for (std::size_t k = 0; k < bodies.size(); ++k) {
        out += std::to_string(k + 1) + " 0 obj\n" + bodies[k] + "\nendobj\n";
    }
    out += "trailer\n<< /Root 1 0 R ";
    out += trailer_extra;
    out += " >>\n%%EOF\n";
    return out;
}

std::size_t digit_count(std::uint64_t v) { return std::to_string(v).size(); }

bool within_budget(std::string_view old_token, std::string_view new_token, Percent p) {
    const cpp_rational before = token_value(old_token);
    const cpp_rational after = token_value(new_token);
    const cpp_rational budget(cpp_int(p.numerator()), cpp_int(p.denominator()) * 100);
    return abs(after - before) <= budget * abs(before);
}

StructureReport audit_structure(std::string_view pdf) {
    StructureReport r;
    auto fail = [&](std::string why) {
        r.ok = false;
        r.problem = std::move(why);
        return r;
    };
    if (!pdf.starts_with("%PDF-")) return fail("missing header");
    const auto sx = pdf.rfind("startxref");
    if (sx == std::string_view::npos) return fail("no startxref");
    auto p = sx + 9;
    while (p < pdf.size() && std::isspace(static_cast<unsigned char>(pdf[p]))) ++p;
    const auto digits_begin = p;
    while (p < pdf.size() && std::isdigit(static_cast<unsigned char>(pdf[p]))) ++p;
    r.startxref_digits = std::string(pdf.substr(digits_begin, p - digits_begin));
    const auto xref_at = number_at(pdf, digits_begin);
    if (!xref_at || *xref_at >= pdf.size() || pdf.substr(*xref_at, 4) != "xref") {
        return fail("startxref does not point at xref");
    }
    if (pdf.substr(pdf.size() - 6) != "%%EOF\n" && !pdf.ends_with("%%EOF")) return fail("no %%EOF");

    // Single subsection written as `xref\n0 N\n` followed by 20-byte entries.
    std::size_t q = *xref_at + 5;
    const auto first = number_at(pdf, q);
    q = pdf.find(' ', q) + 1;
    const auto count = number_at(pdf, q);
    if (!first || !count || *first != 0) return fail("unexpected xref subsection header");
    q = pdf.find('\n', q) + 1;

    std::map<std::uint64_t, std::uint64_t> offsets;
    for (std::uint64_t k = 0; k < *count; ++k, q += 20) {
        if (q + 20 > pdf.size()) return fail("xref table truncated");
        const auto entry = pdf.substr(q, 20);
        if (entry[17] != 'n') continue;
        const auto off = number_at(entry, 0);
        const auto gen = number_at(entry, 11);
        const std::string head = std::to_string(k) + " " + std::to_string(*gen) + " obj";
        if (*off >= pdf.size() || pdf.substr(*off, head.size()) != head) {
            return fail("xref entry for object " + std::to_string(k) + " does not point at its header");
        }
        if (*off > 0 && !std::isspace(static_cast<unsigned char>(pdf[*off - 1]))) {
            return fail("object " + std::to_string(k) + " header not at a token start");
        }
        offsets[k] = *off + head.size();
        ++r.objects;
    }

    auto integer_object = [&](std::uint64_t num) -> std::optional<std::uint64_t> {
        const auto it = offsets.find(num);
        if (it == offsets.end()) return std::nullopt;
        auto s = it->second;
        while (std::isspace(static_cast<unsigned char>(pdf[s]))) ++s;
        return number_at(pdf, s);
    };

    for (const auto& [num, body] : offsets) {
        const auto endobj = pdf.find("endobj", body);
        const auto stream_kw = pdf.find("stream", body);
        if (stream_kw == std::string_view::npos || stream_kw > endobj) continue;
        ++r.streams;
        const auto dict = pdf.substr(body, stream_kw - body);
        const auto lk = dict.find("/Length");
        if (lk == std::string_view::npos) return fail("stream without /Length");
        auto v = lk + 7;
        while (std::isspace(static_cast<unsigned char>(dict[v]))) ++v;
        const auto first_num = number_at(dict, v);
        if (!first_num) return fail("non-numeric /Length");
        std::uint64_t length = *first_num;
        // `N 0 R` form
        auto after = dict.find_first_not_of("0123456789", v);
        auto rest = dict.substr(after);
        const auto trimmed = rest.substr(std::min(rest.size(), rest.find_first_not_of(" \t\r\n")));
        if (trimmed.size() >= 3 && std::isdigit(static_cast<unsigned char>(trimmed[0]))) {
            const auto r_pos = trimmed.find_first_not_of("0123456789");
            if (trimmed.substr(r_pos).starts_with(" R")) {
                const auto target = integer_object(*first_num);
                if (!target) return fail("dangling indirect /Length");
                length = *target;
            }
        }
        auto data = stream_kw + 6;
        if (pdf.substr(data, 2) == "\r\n") {
            data += 2;
        } else if (pdf[data] == '\n') {
            data += 1;
        } else {
            return fail("stream keyword not followed by EOL");
        }
        auto tail = data + length;
        if (tail > pdf.size()) return fail("stream length overruns file");
        if (pdf.substr(tail, 2) == "\r\n") {
            tail += 2;
        } else if (pdf[tail] == '\n' || pdf[tail] == '\r') {
            tail += 1;
        }
        if (pdf.substr(tail, 9) != "endstream") {
            return fail("object " + std::to_string(num) + ": /Length " + std::to_string(length) +
                        " does not end at endstream");
        }
        r.stream_lengths.push_back(length);
    }
    return r;
}

}  // namespace opsteg::testing
