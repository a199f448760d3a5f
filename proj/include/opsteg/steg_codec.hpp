#pragma once

// LSB embedding in the decimal-digit integer of each eligible operand, with
// digit extension until the change fits the operator's percentage budget.

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "opsteg/operator_scanner.hpp"
#include "opsteg/pdf_file.hpp"
#include "opsteg/steg_registry.hpp"
#include "opsteg/types.hpp"

namespace opsteg {

/// An operand viewed as the integer O formed by its digits with the point
/// removed. The point sits `frac_count` digits from the right.
struct DigitInteger {
    std::string digits;
    std::size_t frac_count = 0;
    int sign = 1;

    static DigitInteger from_slot(const OperandSlot& slot);
    /// Throws ParseError for non-numeric tokens.
    static DigitInteger from_token(std::string_view token);

    bool is_zero() const noexcept;

    /// Canonical spelling: optional '-', at least one integer digit, and a
    /// point only when frac_count > 0 (e.g. "0.5", never ".5").
    std::string to_token() const;

    bool operator==(const DigitInteger&) const = default;
};

/// Up to 32 bits, most significant first.
struct BitGroup {
    std::uint32_t value = 0;
    unsigned width = 0;

    bool operator==(const BitGroup&) const = default;
};

/// Sequential MSB-first bit reader/writer over a byte buffer.
class BitCursor {
public:
    BitCursor() = default;
    explicit BitCursor(std::string payload);

    /// Next `n` bits; positions past the end read as 0.
    BitGroup take(unsigned n);
    void put(BitGroup group);

    bool exhausted() const noexcept { return bit_pos_ >= total_bits_; }
    std::size_t bit_pos() const noexcept { return bit_pos_; }
    std::size_t total_bits() const noexcept { return total_bits_; }
    const std::string& bytes() const noexcept { return payload_; }

private:
    std::string payload_;
    std::size_t bit_pos_ = 0;
    std::size_t total_bits_ = 0;
};

struct EmbedReport {
    std::size_t operands_visited = 0;
    std::size_t operands_modified = 0;
    std::size_t operands_exact_match = 0;
    std::ptrdiff_t digits_added = 0;  // net byte growth of rewritten tokens
    std::size_t bits_embedded = 0;
};

struct OperatorCapacity {
    std::size_t slots = 0;
    std::size_t bits = 0;
};

struct CapacityReport {
    std::size_t bits = 0;
    std::size_t bytes = 0;  // payload bytes after the length header
    std::size_t eligible_operands = 0;
    std::map<std::string, OperatorCapacity> per_operator;
};

struct ScannedStream {
    ContentStreamRef stream;
    std::vector<OperatorSite> sites;  // eligibility marked, global source_order
};

struct DocumentScan {
    std::vector<ScannedStream> streams;
    std::vector<StreamDiagnostic> skipped;
    std::vector<ScanDiagnostic> diagnostics;
};

/// Scans every content stream in document order and marks eligibility.
DocumentScan scan_document(const PdfDocument& doc, const Registry& registry);

/// 4-byte big-endian length followed by the payload. Throws PayloadTooLarge.
std::string frame_payload(std::string_view payload);

/// Hides `bits` in the low bits of the operand's digit integer, appending
/// fractional digits until the change is within `budget` percent and the
/// result stays nonzero. Requires a nonzero operand.
DigitInteger embed_into_operand(const DigitInteger& operand, BitGroup bits, Percent budget);

/// Low `n` bits of the operand's digit integer.
BitGroup read_lsb_bits(const DigitInteger& operand, unsigned n);

CapacityReport capacity(const PdfDocument& doc, const StegConfig& cfg);
CapacityReport capacity(const DocumentScan& scan, const Registry& registry);

struct EmbedResult {
    PdfDocument document;
    EmbedReport report;
};

/// Throws InsufficientCapacity when the framed payload does not fit.
EmbedResult embed_document(PdfDocument doc, std::string_view payload, const StegConfig& cfg);

/// Throws TruncatedMessage or ImplausibleLength.
std::string extract_document(const PdfDocument& doc, const StegConfig& cfg);

}  // namespace opsteg
