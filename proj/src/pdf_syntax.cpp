#include "opsteg/pdf_syntax.hpp"

namespace opsteg::syntax {

std::size_t comment_end(std::string_view buf, std::size_t pos) noexcept {
    while (pos < buf.size() && buf[pos] != '\n' && buf[pos] != '\r') {
        ++pos;
    }
    if (pos < buf.size() && buf[pos] == '\r') {
        ++pos;
    }
    if (pos < buf.size() && buf[pos] == '\n') {
        ++pos;
    }
    return pos;
}

std::size_t skip_whitespace_and_comments(std::string_view buf, std::size_t pos) noexcept {
    while (pos < buf.size()) {
        if (is_whitespace(buf[pos])) {
            ++pos;
        } else if (buf[pos] == '%') {
            pos = comment_end(buf, pos);
        } else {
            break;
        }
    }
    return pos;
}

std::size_t literal_string_end(std::string_view buf, std::size_t open) noexcept {
    int depth = 0;
    for (std::size_t i = open; i < buf.size(); ++i) {
        const char c = buf[i];
        if (c == '\\') {
            ++i;
        } else if (c == '(') {
            ++depth;
        } else if (c == ')') {
            if (--depth == 0) {
                return i + 1;
            }
        }
    }
    return std::string_view::npos;
}

std::size_t hex_string_end(std::string_view buf, std::size_t open) noexcept {
    const auto close = buf.find('>', open + 1);
    return close == std::string_view::npos ? close : close + 1;
}

std::size_t regular_token_end(std::string_view buf, std::size_t pos) noexcept {
    while (pos < buf.size() && is_regular(buf[pos])) {
        ++pos;
    }
    return pos;
}

bool keyword_at(std::string_view buf, std::size_t pos, std::string_view word) noexcept {
    if (buf.substr(pos, word.size()) != word) {
        return false;
    }
    const std::size_t after = pos + word.size();
    return after >= buf.size() || !is_regular(buf[after]);
}

}  // namespace opsteg::syntax
