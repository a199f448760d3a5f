#pragma once

// Character classes and low-level scanning helpers shared by the file parser
// and the content-stream scanner.

#include <cstddef>
#include <string_view>

namespace opsteg::syntax {

constexpr bool is_whitespace(char c) noexcept {
    return c == ' ' || c == '\n' || c == '\r' || c == '\t' || c == '\f' || c == '\0';
}

constexpr bool is_delimiter(char c) noexcept {
    switch (c) {
        case '(': case ')': case '<': case '>': case '[': case ']':
        case '{': case '}': case '/': case '%':
            return true;
        default:
            return false;
    }
}

constexpr bool is_regular(char c) noexcept { return !is_whitespace(c) && !is_delimiter(c); }

constexpr bool is_digit(char c) noexcept { return c >= '0' && c <= '9'; }

/// Index of the first byte at or after `pos` that is neither whitespace nor
/// part of a `%` comment.
std::size_t skip_whitespace_and_comments(std::string_view buf, std::size_t pos) noexcept;

/// Index just past the end-of-line that terminates the comment starting at `pos`.
std::size_t comment_end(std::string_view buf, std::size_t pos) noexcept;

/// `open` indexes a '('; returns the index one past the balancing ')', honouring
/// backslash escapes and nested parentheses. Returns npos when unterminated.
std::size_t literal_string_end(std::string_view buf, std::size_t open) noexcept;

/// `open` indexes a single '<'; returns the index one past the closing '>',
/// or npos when unterminated.
std::size_t hex_string_end(std::string_view buf, std::size_t open) noexcept;

/// Index one past the regular-character run starting at `pos`.
std::size_t regular_token_end(std::string_view buf, std::size_t pos) noexcept;

/// True when the keyword `word` starts at `pos` and is followed by a
/// non-regular character (or the end of the buffer).
bool keyword_at(std::string_view buf, std::size_t pos, std::string_view word) noexcept;

}  // namespace opsteg::syntax
