#include "opsteg/fixture.hpp"

#include <fmt/format.h>

#include <cctype>
#include <charconv>
#include <optional>

#include "opsteg/error.hpp"
#include "opsteg/operator_table.hpp"
#include "opsteg/pdf_file.hpp"

namespace opsteg {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool is_listing_frame(std::string_view line) {
    if (line == "stream" || line == "endstream" || line == "endobj") return true;
    if (line.starts_with("<<")) return true;
    // `N G obj`
    std::size_t i = 0;
    auto digits = [&] {
        const auto start = i;
        while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
        return i > start;
    };
    auto spaces = [&] {
        const auto start = i;
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        return i > start;
    };
    return digits() && spaces() && digits() && spaces() && line.substr(i) == "obj";
}

std::size_t parse_count(std::string_view word, std::size_t line_no) {
    std::size_t n = 0;
    auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), n);
    if (ec != std::errc{} || ptr != word.data() + word.size()) {
        throw Error(ErrorCode::ParseError,
                    "line " + std::to_string(line_no) + ": expected a count, got '" + std::string(word) + "'");
    }
    return n;
}

std::string stream_object(std::size_t number, std::string_view extra_dict, std::string_view content, bool flate) {
    const std::string data = flate ? encode_stream(content, {"FlateDecode"}) : std::string(content);
    return fmt::format("{} 0 obj\n<< /Length {}{}{} >>\nstream\n{}\nendstream\nendobj\n", number, data.size(),
                       flate ? " /Filter /FlateDecode" : "", extra_dict, data);
}

bool is_number(std::string_view tok) {
    bool digit = false;
    bool point = false;
    for (std::size_t i = 0; i < tok.size(); ++i) {
        const char c = tok[i];
        if (c >= '0' && c <= '9') {
            digit = true;
        } else if (c == '.' && !point) {
            point = true;
        } else if (c == '-' && i == 0) {
        } else {
            return false;
        }
    }
    return digit;
}

bool is_zero_number(std::string_view tok) {
    for (char c : tok) {
        if (c >= '1' && c <= '9') return false;
    }
    return true;
}

/// Tokenizes content well enough for generated fixtures: numbers, names,
/// strings and arrays, with operators closing each operand run.
void count_section(std::string_view text, const Registry& registry, SlotCensus& census) {
    std::vector<std::string_view> run;        // trailing numeric tokens since the last non-number
    std::vector<std::string_view> last_array;  // numeric elements of the most recent array
    bool array_pending = false;
    std::size_t i = 0;

    auto skip_string = [&](std::size_t pos) {
        int depth = 0;
        for (; pos < text.size(); ++pos) {
            if (text[pos] == '\\') {
                ++pos;
            } else if (text[pos] == '(') {
                ++depth;
            } else if (text[pos] == ')' && --depth == 0) {
                return pos + 1;
            }
        }
        return text.size();
    };
    auto token_end = [&](std::size_t pos) {
        while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) &&
               std::string_view("()<>[]{}/%").find(text[pos]) == std::string_view::npos) {
            ++pos;
        }
        return pos;
    };
    auto count = [&](std::string_view op, const std::vector<std::string_view>& operands) {
        const auto* entry = registry.lookup(op);
        if (entry == nullptr || !entry->enabled) return;
        if (!registry.include_low_reliability() && entry->reliability == Reliability::Low) return;
        for (std::size_t k = 0; k < operands.size(); ++k) {
            if (!is_zero_number(operands[k]) && entry->budget(k)) ++census.eligible_slots[std::string(op)];
        }
    };

    while (i < text.size()) {
        const char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '%') {
            while (i < text.size() && text[i] != '\n') ++i;
        } else if (c == '(') {
            i = skip_string(i);
            run.clear();
        } else if (c == '<') {
            const auto close = text.find('>', i);
            i = close == std::string_view::npos ? text.size() : close + 1;
            run.clear();
        } else if (c == '[') {
            last_array.clear();
            ++i;
            while (i < text.size() && text[i] != ']') {
                if (text[i] == '(') {
                    i = skip_string(i);
                } else if (text[i] == '<') {
                    const auto close = text.find('>', i);
                    i = close == std::string_view::npos ? text.size() : close + 1;
                } else if (std::isspace(static_cast<unsigned char>(text[i]))) {
                    ++i;
                } else {
                    const auto e = std::max(token_end(i), i + 1);
                    const auto tok = text.substr(i, e - i);
                    if (is_number(tok)) last_array.push_back(tok);
                    i = e;
                }
            }
            ++i;
            array_pending = true;
            run.clear();
        } else if (c == '/') {
            i = token_end(i + 1);
            run.clear();
            array_pending = false;
        } else {
            const auto e = std::max(token_end(i), i + 1);
            const auto tok = text.substr(i, e - i);
            i = e;
            if (is_number(tok)) {
                run.push_back(tok);
                array_pending = false;
                continue;
            }
            if (tok == "TJ") {
                if (array_pending) count(tok, last_array);
            } else if (const auto* arity = find_operator(tok); arity != nullptr && run.size() >= arity->min_operands) {
                const auto keep = std::min(run.size(), arity->max_operands);
                count(tok, std::vector<std::string_view>(run.end() - static_cast<std::ptrdiff_t>(keep), run.end()));
            }
            run.clear();
            array_pending = false;
        }
    }
}

}  // namespace

std::size_t FixtureSpec::page_count() const noexcept {
    std::size_t n = 0;
    for (const auto& s : sections) n += s.kind == FixtureSectionKind::Page ? 1 : 0;
    return n;
}

FixtureSpec parse_fixture_spec(std::string_view text) {
    FixtureSpec spec;
    std::optional<std::size_t> pages;
    std::string implicit_page;
    bool explicit_pages = false;
    std::string* current = &implicit_page;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const auto raw = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        const auto line = trim(raw);
        if (line.empty() || line.starts_with('#') || is_listing_frame(line)) continue;

        if (line.starts_with("pages ") || line == "pages") {
            const auto n = parse_count(trim(line.substr(5)), line_no);
            if (n == 0) throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": need at least one page");
            pages = n;
        } else if (line == "flate") {
            spec.flate = true;
        } else if (line == "page" || line == "form" || line == "charproc") {
            const auto kind = line == "page"   ? FixtureSectionKind::Page
                              : line == "form" ? FixtureSectionKind::Form
                                               : FixtureSectionKind::CharProc;
            explicit_pages = explicit_pages || kind == FixtureSectionKind::Page;
            spec.sections.push_back({kind, {}});
            current = &spec.sections.back().content;
        } else if (line.starts_with("repeat ")) {
            const auto rest = trim(line.substr(7));
            const auto sp = rest.find_first_of(" \t");
            if (sp == std::string_view::npos) {
                throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": repeat needs a count and a line");
            }
            const auto n = parse_count(rest.substr(0, sp), line_no);
            const auto body = trim(rest.substr(sp));
            for (std::size_t k = 0; k < n; ++k) {
                current->append(body);
                current->push_back('\n');
            }
        } else {
            current->append(line);
            current->push_back('\n');
        }
        // `current` may dangle after push_back into sections; refresh it.
        if (!spec.sections.empty() && current != &implicit_page) current = &spec.sections.back().content;
    }

    const bool has_implicit = !implicit_page.empty() || !explicit_pages;
    if (explicit_pages && pages && *pages != spec.page_count() + (implicit_page.empty() ? 0 : 1)) {
        throw Error(ErrorCode::ParseError, "`pages` disagrees with the number of page sections");
    }
    std::vector<FixtureSection> ordered;
    if (has_implicit) {
        const std::size_t copies = explicit_pages ? 1 : pages.value_or(1);
        for (std::size_t k = 0; k < copies; ++k) ordered.push_back({FixtureSectionKind::Page, implicit_page});
    }
    for (auto kind : {FixtureSectionKind::Page, FixtureSectionKind::Form, FixtureSectionKind::CharProc}) {
        for (const auto& s : spec.sections) {
            if (s.kind == kind) ordered.push_back(s);
        }
    }
    spec.sections = std::move(ordered);
    if (spec.page_count() == 0) throw Error(ErrorCode::ParseError, "fixture has no pages");
    return spec;
}

std::string build_fixture(const FixtureSpec& spec) {
    std::vector<const FixtureSection*> pages;
    std::vector<const FixtureSection*> forms;
    std::vector<const FixtureSection*> procs;
    for (const auto& s : spec.sections) {
        switch (s.kind) {
            case FixtureSectionKind::Page: pages.push_back(&s); break;
            case FixtureSectionKind::Form: forms.push_back(&s); break;
            case FixtureSectionKind::CharProc: procs.push_back(&s); break;
        }
    }
    if (pages.empty()) throw Error(ErrorCode::InvalidArgument, "fixture has no pages");

    // Object numbering: 1 catalog, 2 page tree, 3 Helvetica, 4 Type3 font,
    // then page/content pairs, forms and glyph procedures.
    const std::size_t first_page = 5;
    const std::size_t first_form = first_page + 2 * pages.size();
    const std::size_t first_proc = first_form + forms.size();

    std::string out = "%PDF-1.7\n%\xE2\xE3\xCF\xD3\n";
    out += "1 0 obj\n<< /Type /Catalog /Pages 2 0 R >>\nendobj\n";
    std::string kids;
    for (std::size_t k = 0; k < pages.size(); ++k) kids += fmt::format("{}{} 0 R", k ? " " : "", first_page + 2 * k);
    out += fmt::format("2 0 obj\n<< /Type /Pages /Kids [{}] /Count {} >>\nendobj\n", kids, pages.size());
    out += "3 0 obj\n<< /Type /Font /Subtype /Type1 /BaseFont /Helvetica >>\nendobj\n";

    std::string procs_dict;
    std::string differences;
    std::string widths;
    for (std::size_t k = 0; k < procs.size(); ++k) {
        procs_dict += fmt::format(" /g{} {} 0 R", k, first_proc + k);
        differences += fmt::format(" /g{}", k);
        widths += k ? " 1000" : "1000";
    }
    if (procs.empty()) {
        out += "4 0 obj\nnull\nendobj\n";
    } else {
        out += fmt::format(
            "4 0 obj\n<< /Type /Font /Subtype /Type3 /FontBBox [0 0 1000 1000] /FontMatrix [0.001 0 0 0.001 0 0] "
            "/CharProcs <<{} >> /Encoding << /Type /Encoding /Differences [0{}] >> /FirstChar 0 /LastChar {} "
            "/Widths [{}] /Resources << >> >>\nendobj\n",
            procs_dict, differences, procs.size() - 1, widths);
    }

    std::string xobjects;
    for (std::size_t k = 0; k < forms.size(); ++k) xobjects += fmt::format(" /Fm{} {} 0 R", k, first_form + k);
    for (std::size_t k = 0; k < pages.size(); ++k) {
        const auto page_no = first_page + 2 * k;
        std::string resources = "/Font << /F1 3 0 R";
        if (!procs.empty()) resources += " /T3 4 0 R";
        resources += " >>";
        if (k == 0 && !forms.empty()) resources += " /XObject <<" + xobjects + " >>";
        out += fmt::format(
            "{} 0 obj\n<< /Type /Page /Parent 2 0 R /MediaBox [0 0 612 792] /Resources << {} >> /Contents {} 0 R >>\n"
            "endobj\n",
            page_no, resources, page_no + 1);
        std::string content = pages[k]->content;
        if (k == 0) {
            for (std::size_t f = 0; f < forms.size(); ++f) content += fmt::format("/Fm{} Do\n", f);
        }
        out += stream_object(page_no + 1, "", content, spec.flate);
    }
    for (std::size_t k = 0; k < forms.size(); ++k) {
        out += stream_object(first_form + k, " /Type /XObject /Subtype /Form /BBox [0 0 612 792]", forms[k]->content,
                             spec.flate);
    }
    for (std::size_t k = 0; k < procs.size(); ++k) {
        out += stream_object(first_proc + k, "", procs[k]->content, spec.flate);
    }
    out += "trailer\n<< /Root 1 0 R >>\n%%EOF\n";
    return serialize_document(parse_document(out));
}

std::size_t SlotCensus::total() const noexcept {
    std::size_t n = 0;
    for (const auto& [op, count] : eligible_slots) n += count;
    return n;
}

SlotCensus census(const FixtureSpec& spec, const StegConfig& cfg) {
    const Registry registry(cfg);
    SlotCensus result;
    for (const auto& s : spec.sections) count_section(s.content, registry, result);
    return result;
}

}  // namespace opsteg
