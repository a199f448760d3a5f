#include "opsteg/steg_codec.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <limits>

#include "opsteg/error.hpp"

namespace opsteg {

namespace {

using boost::multiprecision::cpp_int;

cpp_int to_integer(std::string_view digits) {
    cpp_int value = 0;
    // Chunks of 18 digits keep the big-integer multiplications few.
    std::size_t i = 0;
    while (i < digits.size()) {
        const std::size_t take = std::min<std::size_t>(18, digits.size() - i);
        std::uint64_t chunk = 0;
        std::uint64_t scale = 1;
        for (std::size_t k = 0; k < take; ++k) {
            chunk = chunk * 10 + static_cast<std::uint64_t>(digits[i + k] - '0');
            scale *= 10;
        }
        value = value * scale + chunk;
        i += take;
    }
    return value;
}

/// Decimal digits of `value`, left-padded with zeros to at least `width`.
std::string to_digits(const cpp_int& value, std::size_t width) {
    std::string s = value.str();
    if (s.size() < width) s.insert(0, width - s.size(), '0');
    return s;
}

std::uint32_t low_bits(const cpp_int& value, unsigned n) {
    const cpp_int mask = (cpp_int(1) << n) - 1;
    return static_cast<std::uint32_t>(value & mask);
}

void check_width(unsigned n) {
    if (n == 0 || n > StegConfig::kMaxBitsPerOperand) {
        throw Error(ErrorCode::InvalidArgument, "bits per operand must be in [1, 32]");
    }
}

std::uint32_t read_be32(std::string_view b) {
    return (static_cast<std::uint32_t>(static_cast<unsigned char>(b[0])) << 24) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(b[1])) << 16) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(b[2])) << 8) |
           static_cast<std::uint32_t>(static_cast<unsigned char>(b[3]));
}

struct Edit {
    ByteSpan span;
    std::string text;
};

/// Applies non-overlapping edits sorted by span in a single forward pass.
std::string apply_edits(std::string_view decoded, const std::vector<Edit>& edits) {
    std::string out;
    std::size_t growth = 0;
    for (const auto& e : edits) growth += e.text.size();
    out.reserve(decoded.size() + growth);
    std::size_t cursor = 0;
    for (const auto& e : edits) {
        out.append(decoded.substr(cursor, e.span.begin - cursor));
        out.append(e.text);
        cursor = e.span.end;
    }
    out.append(decoded.substr(cursor));
    return out;
}

}  // namespace

DigitInteger DigitInteger::from_slot(const OperandSlot& slot) {
    return DigitInteger{slot.digits, slot.frac_count, slot.sign};
}

DigitInteger DigitInteger::from_token(std::string_view token) {
    const auto slot = parse_numeric_token(token);
    if (!slot) throw Error(ErrorCode::ParseError, "'" + std::string(token) + "' is not a numeric token");
    return from_slot(*slot);
}

bool DigitInteger::is_zero() const noexcept { return digits_are_zero(digits); }

std::string DigitInteger::to_token() const {
    std::string out;
    if (sign < 0) out.push_back('-');
    const std::size_t int_len = digits.size() - std::min(frac_count, digits.size());
    if (int_len == 0) {
        out.push_back('0');
    } else {
        out.append(digits, 0, int_len);
    }
    if (frac_count > 0) {
        out.push_back('.');
        if (frac_count > digits.size()) out.append(frac_count - digits.size(), '0');
        out.append(digits, int_len, std::string::npos);
    }
    return out;
}

BitCursor::BitCursor(std::string payload)
    : payload_(std::move(payload)), total_bits_(payload_.size() * 8) {}

BitGroup BitCursor::take(unsigned n) {
    BitGroup g{0, n};
    for (unsigned i = 0; i < n; ++i) {
        std::uint32_t bit = 0;
        if (bit_pos_ < total_bits_) {
            const auto byte = static_cast<unsigned char>(payload_[bit_pos_ / 8]);
            bit = (byte >> (7 - bit_pos_ % 8)) & 1U;
        }
        g.value = (g.value << 1) | bit;
        ++bit_pos_;
    }
    bit_pos_ = std::min(bit_pos_, total_bits_);
    return g;
}

void BitCursor::put(BitGroup group) {
    for (unsigned i = group.width; i-- > 0;) {
        const unsigned bit = (group.value >> i) & 1U;
        if (total_bits_ % 8 == 0) payload_.push_back('\0');
        if (bit != 0) {
            payload_.back() = static_cast<char>(static_cast<unsigned char>(payload_.back()) |
                                                (0x80U >> (total_bits_ % 8)));
        }
        ++total_bits_;
    }
    bit_pos_ = total_bits_;
}

std::string frame_payload(std::string_view payload) {
    if (payload.size() > std::numeric_limits<std::uint32_t>::max()) {
        throw Error(ErrorCode::PayloadTooLarge, "payload of " + std::to_string(payload.size()) +
                                                    " bytes does not fit a 32-bit length header");
    }
    const auto n = static_cast<std::uint32_t>(payload.size());
    std::string framed;
    framed.reserve(payload.size() + 4);
    framed.push_back(static_cast<char>((n >> 24) & 0xFF));
    framed.push_back(static_cast<char>((n >> 16) & 0xFF));
    framed.push_back(static_cast<char>((n >> 8) & 0xFF));
    framed.push_back(static_cast<char>(n & 0xFF));
    framed.append(payload);
    return framed;
}

DigitInteger embed_into_operand(const DigitInteger& operand, BitGroup bits, Percent budget) {
    check_width(bits.width);
    if (operand.is_zero()) throw Error(ErrorCode::InvalidArgument, "cannot embed into a zero operand");
    if (budget.numerator() == 0) throw Error(ErrorCode::InvalidArgument, "budget must be positive");

    const cpp_int mask = (cpp_int(1) << bits.width) - 1;
    const cpp_int target = bits.value & ((std::uint64_t{1} << bits.width) - 1);
    cpp_int o = to_integer(operand.digits);
    if ((o & mask) == target) return operand;

    const cpp_int p_num = budget.numerator();
    const cpp_int lhs_scale = cpp_int(100) * budget.denominator();
    std::size_t width = operand.digits.size();
    std::size_t frac = operand.frac_count;
    // |O_S - O| < 2^n is fixed while the budget grows tenfold per extension.
    while (true) {
        const cpp_int os = o - (o & mask) + target;
        const cpp_int diff = os > o ? cpp_int(os - o) : cpp_int(o - os);
        if (os > 0 && lhs_scale * diff <= p_num * o) {
            return DigitInteger{to_digits(os, width), frac, operand.sign};
        }
        o *= 10;
        ++width;
        ++frac;
    }
}

BitGroup read_lsb_bits(const DigitInteger& operand, unsigned n) {
    check_width(n);
    return BitGroup{low_bits(to_integer(operand.digits), n), n};
}

DocumentScan scan_document(const PdfDocument& doc, const Registry& registry) {
    DocumentScan result;
    auto streams = collect_content_streams(doc);
    result.skipped = std::move(streams.skipped);
    std::size_t order = 0;
    result.streams.reserve(streams.streams.size());
    for (auto& ref : streams.streams) {
        auto scan = scan_stream(ref.decoded_bytes, ref.owner);
        registry.mark(scan.sites);
        for (auto& site : scan.sites) site.source_order = order++;
        for (auto& d : scan.diagnostics) result.diagnostics.push_back(std::move(d));
        result.streams.push_back({std::move(ref), std::move(scan.sites)});
    }
    return result;
}

CapacityReport capacity(const DocumentScan& scan, const Registry& registry) {
    CapacityReport report;
    for (const auto& s : scan.streams) {
        for (const auto& site : s.sites) {
            const unsigned n = registry.bits_per_operand(site.op_name);
            for (const auto& slot : site.operands) {
                if (!slot.eligible) continue;
                auto& op = report.per_operator[site.op_name];
                ++op.slots;
                op.bits += n;
                ++report.eligible_operands;
                report.bits += n;
            }
        }
    }
    report.bytes = report.bits >= StegConfig::kHeaderBits ? (report.bits - StegConfig::kHeaderBits) / 8 : 0;
    return report;
}

CapacityReport capacity(const PdfDocument& doc, const StegConfig& cfg) {
    const Registry registry(cfg);
    return capacity(scan_document(doc, registry), registry);
}

EmbedResult embed_document(PdfDocument doc, std::string_view payload, const StegConfig& cfg) {
    const Registry registry(cfg);
    const auto scan = scan_document(doc, registry);
    const auto available = capacity(scan, registry).bits;

    BitCursor cursor(frame_payload(payload));
    if (cursor.total_bits() > available) {
        throw Error(ErrorCode::InsufficientCapacity,
                    "payload needs " + std::to_string(cursor.total_bits()) + " bits (" +
                        std::to_string(payload.size()) + " bytes) but the document holds " +
                        std::to_string(available) + " bits (" +
                        std::to_string(available >= 32 ? (available - 32) / 8 : 0) + " bytes)");
    }

    EmbedReport report;
    for (const auto& s : scan.streams) {
        if (cursor.exhausted()) break;
        std::vector<Edit> edits;
        for (const auto& site : s.sites) {
            const unsigned n = registry.bits_per_operand(site.op_name);
            for (const auto& slot : site.operands) {
                if (!slot.eligible || cursor.exhausted()) continue;
                const auto budget = registry.slot_budget(site, slot);
                const auto bits = cursor.take(n);
                ++report.operands_visited;
                const auto before = DigitInteger::from_slot(slot);
                const auto after = embed_into_operand(before, bits, *budget);
                if (after == before) {
                    ++report.operands_exact_match;
                    continue;
                }
                ++report.operands_modified;
                auto text = after.to_token();
                report.digits_added += static_cast<std::ptrdiff_t>(text.size()) -
                                       static_cast<std::ptrdiff_t>(slot.text.size());
                edits.push_back({slot.span, std::move(text)});
            }
        }
        if (!edits.empty()) {
            doc.replace_stream(s.stream.owner, apply_edits(s.stream.decoded_bytes, edits));
        }
    }
    report.bits_embedded = cursor.total_bits();
    return {std::move(doc), report};
}

std::string extract_document(const PdfDocument& doc, const StegConfig& cfg) {
    const Registry registry(cfg);
    const auto scan = scan_document(doc, registry);
    const auto available = capacity(scan, registry).bits;

    BitCursor sink;
    std::size_t target = StegConfig::kHeaderBits;
    bool have_length = false;
    for (const auto& s : scan.streams) {
        for (const auto& site : s.sites) {
            const unsigned n = registry.bits_per_operand(site.op_name);
            for (const auto& slot : site.operands) {
                if (!slot.eligible) continue;
                sink.put(read_lsb_bits(DigitInteger::from_slot(slot), n));
                if (!have_length && sink.total_bits() >= StegConfig::kHeaderBits) {
                    const std::uint64_t length = read_be32(sink.bytes());
                    target = StegConfig::kHeaderBits + 8 * length;
                    if (target > available) {
                        throw Error(ErrorCode::ImplausibleLength,
                                    "decoded length " + std::to_string(length) + " bytes exceeds the document's " +
                                        std::to_string(available) + "-bit capacity");
                    }
                    have_length = true;
                }
                if (have_length && sink.total_bits() >= target) {
                    return sink.bytes().substr(4, (target - StegConfig::kHeaderBits) / 8);
                }
            }
        }
    }
    throw Error(ErrorCode::TruncatedMessage, "document ran out of operands after " +
                                                 std::to_string(sink.total_bits()) + " of " +
                                                 std::to_string(target) + " bits");
}

}  // namespace opsteg
