#pragma once

// Locates carrier operators and their numeric operands in a decoded content
// stream with the regex masks below.
//
// Departures from the literal masks, all of which only ever reject matches:
//  - the first operand must start at a token boundary (stream start,
//    whitespace or a delimiter), so digits inside names or other tokens
//    never begin a match;
//  - string literals, hex strings, names, comments and inline-image data are
//    blanked out before the general mask runs;
//  - the TJ array body may not contain another '[' or ']' outside strings, and
//    `TJ` must end its token.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "opsteg/types.hpp"

namespace opsteg {

namespace masks {

/// General operator mask; `{a,b}` and `op` are substituted per operator.
inline constexpr std::string_view kOperatorTemplate = R"((?:[\d\.\-]+\s+){a,b}op[\[\s])";
inline constexpr std::string_view kTjSite = R"(\[.+?\]\s*?TJ)";
inline constexpr std::string_view kOperand = R"([\d\.\-]+)";
inline constexpr std::string_view kTjOperand = R"([\d\.\-]+(?![^\(]*\))(?![^\<]*\>))";

/// The general mask instantiated for one operator, e.g. `(?:[\d\.\-]+\s+){2,2}Td[\[\s]`.
std::string operator_mask(std::string_view op);

}  // namespace masks

struct ScanDiagnostic {
    ByteSpan span;
    std::string message;
};

struct StreamScan {
    std::vector<OperatorSite> sites;  // ascending match_span
    std::vector<ScanDiagnostic> diagnostics;
};

/// Byte-for-byte copy of `decoded` with strings, hex strings, names, comments
/// and inline images replaced by a filler byte. Used by the general mask.
std::string mask_for_operators(std::string_view decoded);

/// Copy of `decoded` with string and hex-string interiors, comments and inline
/// images replaced by a filler byte; string delimiters are kept. Used by the TJ mask.
std::string mask_for_text_arrays(std::string_view decoded);

/// Parses one numeric token; nullopt for things like "-", "." or "1-2".
std::optional<OperandSlot> parse_numeric_token(std::string_view token);

/// Scans one decoded stream. Sites carry local source_order values 0..n-1;
/// callers renumber them across a document.
StreamScan scan_stream(std::string_view decoded, ObjectId owner);

/// Numeric operands of a full mask match. Spans are relative to `site_text`.
/// Throws NoOperands (non-TJ match without numbers) or ParseError (malformed
/// numeric token).
std::vector<OperandSlot> extract_operands(std::string_view site_text, std::string_view op_name);

/// Replaces the bytes under `slot.span` with `new_text`. Throws SpanOutOfRange.
std::string splice_operand(std::string_view decoded, const OperandSlot& slot, std::string_view new_text);

}  // namespace opsteg
