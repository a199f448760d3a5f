#include "opsteg/pdf_value.hpp"

#include <charconv>
#include <cstdio>

#include "opsteg/error.hpp"
#include "opsteg/pdf_syntax.hpp"

namespace opsteg {

namespace {

constexpr int kMaxDepth = 256;

int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

std::string decode_literal(std::string_view body) {
    std::string out;
    out.reserve(body.size());
    for (std::size_t i = 0; i < body.size(); ++i) {
        char c = body[i];
        if (c != '\\') {
            out.push_back(c);
            continue;
        }
        if (++i >= body.size()) break;
        c = body[i];
        switch (c) {
            case 'n': out.push_back('\n'); break;
            case 'r': out.push_back('\r'); break;
            case 't': out.push_back('\t'); break;
            case 'b': out.push_back('\b'); break;
            case 'f': out.push_back('\f'); break;
            case '\r':
                if (i + 1 < body.size() && body[i + 1] == '\n') ++i;
                break;
            case '\n': break;
            default:
                if (c >= '0' && c <= '7') {
                    int v = 0;
                    int count = 0;
                    while (count < 3 && i < body.size() && body[i] >= '0' && body[i] <= '7') {
                        v = v * 8 + (body[i] - '0');
                        ++i;
                        ++count;
                    }
                    --i;
                    out.push_back(static_cast<char>(v & 0xFF));
                } else {
                    out.push_back(c);
                }
        }
    }
    return out;
}

std::string decode_hex(std::string_view body) {
    std::string out;
    int hi = -1;
    for (char c : body) {
        const int d = hex_digit(c);
        if (d < 0) continue;
        if (hi < 0) {
            hi = d;
        } else {
            out.push_back(static_cast<char>(hi * 16 + d));
            hi = -1;
        }
    }
    if (hi >= 0) out.push_back(static_cast<char>(hi * 16));
    return out;
}

bool parse_int(std::string_view tok, std::int64_t& out) {
    if (tok.empty()) return false;
    std::size_t start = (tok[0] == '+' || tok[0] == '-') ? 1 : 0;
    if (start == tok.size()) return false;
    for (std::size_t i = start; i < tok.size(); ++i) {
        if (!syntax::is_digit(tok[i])) return false;
    }
    const char* first = tok.data() + (tok[0] == '+' ? 1 : 0);
    auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), out);
    return ec == std::errc{} && ptr == tok.data() + tok.size();
}

bool parse_real(std::string_view tok, double& out) {
    bool seen_digit = false;
    bool seen_point = false;
    for (std::size_t i = 0; i < tok.size(); ++i) {
        const char c = tok[i];
        if (syntax::is_digit(c)) {
            seen_digit = true;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else if ((c == '-' || c == '+') && i == 0) {
        } else {
            return false;
        }
    }
    if (!seen_digit) return false;
    std::string copy(tok);
    out = std::strtod(copy.c_str(), nullptr);
    return true;
}

class Parser {
public:
    explicit Parser(std::string_view buf) : buf_(buf) {}

    ParsedValue parse(std::size_t pos, int depth) {
        if (depth > kMaxDepth) fail(pos, "nesting too deep");
        pos = syntax::skip_whitespace_and_comments(buf_, pos);
        if (pos >= buf_.size()) fail(pos, "unexpected end of data");
        const char c = buf_[pos];
        if (c == '/') {
            const auto end = syntax::regular_token_end(buf_, pos + 1);
            return {PdfName{std::string(buf_.substr(pos + 1, end - pos - 1))}, end};
        }
        if (c == '(') {
            const auto end = syntax::literal_string_end(buf_, pos);
            if (end == std::string_view::npos) fail(pos, "unterminated string");
            return {PdfString{decode_literal(buf_.substr(pos + 1, end - pos - 2)), false}, end};
        }
        if (c == '<') {
            if (pos + 1 < buf_.size() && buf_[pos + 1] == '<') return parse_dict(pos + 2, depth);
            const auto end = syntax::hex_string_end(buf_, pos);
            if (end == std::string_view::npos) fail(pos, "unterminated hex string");
            return {PdfString{decode_hex(buf_.substr(pos + 1, end - pos - 2)), true}, end};
        }
        if (c == '[') return parse_array(pos + 1, depth);
        if (!syntax::is_regular(c)) fail(pos, std::string("unexpected character '") + c + "'");

        const auto end = syntax::regular_token_end(buf_, pos);
        const auto tok = buf_.substr(pos, end - pos);
        if (tok == "true") return {true, end};
        if (tok == "false") return {false, end};
        if (tok == "null") return {PdfValue{}, end};
        std::int64_t iv = 0;
        if (parse_int(tok, iv)) {
            if (auto ref = try_reference(iv, end)) return *std::move(ref);
            return {iv, end};
        }
        double dv = 0.0;
        if (parse_real(tok, dv)) return {PdfReal{dv, std::string(tok)}, end};
        fail(pos, "unexpected keyword '" + std::string(tok) + "'");
    }

private:
    [[noreturn]] void fail(std::size_t pos, const std::string& what) const {
        throw Error(ErrorCode::ParseError, what + " at offset " + std::to_string(pos));
    }

    std::optional<ParsedValue> try_reference(std::int64_t number, std::size_t pos) const {
        if (number < 0) return std::nullopt;
        auto p = syntax::skip_whitespace_and_comments(buf_, pos);
        auto e = syntax::regular_token_end(buf_, p);
        std::int64_t gen = 0;
        if (e == p || !parse_int(buf_.substr(p, e - p), gen) || gen < 0 || gen > 65535) return std::nullopt;
        if (buf_[p] == '+' || buf_[p] == '-') return std::nullopt;
        p = syntax::skip_whitespace_and_comments(buf_, e);
        if (!syntax::keyword_at(buf_, p, "R")) return std::nullopt;
        ObjectId id{static_cast<std::uint32_t>(number), static_cast<std::uint16_t>(gen)};
        return ParsedValue{PdfRef{id}, p + 1};
    }

    ParsedValue parse_array(std::size_t pos, int depth) {
        PdfArray items;
        while (true) {
            pos = syntax::skip_whitespace_and_comments(buf_, pos);
            if (pos >= buf_.size()) fail(pos, "unterminated array");
            if (buf_[pos] == ']') return {std::move(items), pos + 1};
            auto item = parse(pos, depth + 1);
            items.push_back(std::move(item.value));
            pos = item.end;
        }
    }

    ParsedValue parse_dict(std::size_t pos, int depth) {
        PdfDict entries;
        while (true) {
            pos = syntax::skip_whitespace_and_comments(buf_, pos);
            if (pos + 1 < buf_.size() && buf_[pos] == '>' && buf_[pos + 1] == '>') {
                return {std::move(entries), pos + 2};
            }
            if (pos >= buf_.size()) fail(pos, "unterminated dictionary");
            if (buf_[pos] != '/') fail(pos, "dictionary key is not a name");
            const auto key_end = syntax::regular_token_end(buf_, pos + 1);
            std::string key(buf_.substr(pos + 1, key_end - pos - 1));
            auto item = parse(key_end, depth + 1);
            entries.push_back({std::move(key), std::move(item.value)});
            pos = item.end;
        }
    }

    std::string_view buf_;
};

void write_into(std::string& out, const PdfValue& value);

void write_string(std::string& out, const PdfString& s) {
    if (s.hex) {
        static constexpr char kHex[] = "0123456789ABCDEF";
        out.push_back('<');
        for (unsigned char c : s.bytes) {
            out.push_back(kHex[c >> 4]);
            out.push_back(kHex[c & 0xF]);
        }
        out.push_back('>');
        return;
    }
    out.push_back('(');
    for (char c : s.bytes) {
        if (c == '(' || c == ')' || c == '\\') out.push_back('\\');
        if (c == '\r') {
            out += "\\r";
            continue;
        }
        out.push_back(c);
    }
    out.push_back(')');
}

void write_into(std::string& out, const PdfValue& value) {
    std::visit(
        [&out](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
                out += "null";
            } else if constexpr (std::is_same_v<T, bool>) {
                out += v ? "true" : "false";
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                out += std::to_string(v);
            } else if constexpr (std::is_same_v<T, PdfReal>) {
                out += v.text;
            } else if constexpr (std::is_same_v<T, PdfName>) {
                out.push_back('/');
                out += v.value;
            } else if constexpr (std::is_same_v<T, PdfString>) {
                write_string(out, v);
            } else if constexpr (std::is_same_v<T, PdfArray>) {
                out.push_back('[');
                for (std::size_t i = 0; i < v.size(); ++i) {
                    if (i != 0) out.push_back(' ');
                    write_into(out, v[i]);
                }
                out.push_back(']');
            } else if constexpr (std::is_same_v<T, PdfDict>) {
                out += "<<";
                for (const auto& entry : v) {
                    out += " /";
                    out += entry.key;
                    out.push_back(' ');
                    write_into(out, entry.value);
                }
                out += " >>";
            } else if constexpr (std::is_same_v<T, PdfRef>) {
                out += std::to_string(v.id.number) + ' ' + std::to_string(v.id.generation) + " R";
            }
        },
        value.storage());
}

}  // namespace

bool PdfValue::operator==(const PdfValue& other) const { return storage_ == other.storage_; }

const PdfValue* dict_find(const PdfDict& dict, std::string_view key) noexcept {
    for (const auto& entry : dict) {
        if (entry.key == key) return &entry.value;
    }
    return nullptr;
}

void dict_set(PdfDict& dict, std::string_view key, PdfValue value) {
    for (auto& entry : dict) {
        if (entry.key == key) {
            entry.value = std::move(value);
            return;
        }
    }
    dict.push_back({std::string(key), std::move(value)});
}

void dict_erase(PdfDict& dict, std::string_view key) {
    std::erase_if(dict, [key](const PdfDictEntry& e) { return e.key == key; });
}

ParsedValue parse_value(std::string_view buf, std::size_t pos) { return Parser(buf).parse(pos, 0); }

std::optional<ByteSpan> find_dict_value_span(std::string_view buf, std::size_t pos,
                                             std::string_view key) {
    pos = syntax::skip_whitespace_and_comments(buf, pos);
    if (buf.substr(pos, 2) != "<<") return std::nullopt;
    pos += 2;
    Parser parser(buf);
    while (true) {
        pos = syntax::skip_whitespace_and_comments(buf, pos);
        if (pos >= buf.size() || buf.substr(pos, 2) == ">>" || buf[pos] != '/') return std::nullopt;
        const auto key_end = syntax::regular_token_end(buf, pos + 1);
        const bool hit = buf.substr(pos + 1, key_end - pos - 1) == key;
        const auto value_start = syntax::skip_whitespace_and_comments(buf, key_end);
        const auto item = parser.parse(value_start, 1);
        if (hit) return ByteSpan{value_start, item.end};
        pos = item.end;
    }
}

std::string write_value(const PdfValue& value) {
    std::string out;
    write_into(out, value);
    return out;
}

}  // namespace opsteg
