#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace opsteg {

/// (object number, generation) pair identifying an indirect object.
struct ObjectId {
    std::uint32_t number = 0;
    std::uint16_t generation = 0;

    auto operator<=>(const ObjectId&) const = default;
};

std::string to_string(ObjectId id);

/// Half-open byte range [begin, end).
struct ByteSpan {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const noexcept { return end - begin; }
    bool operator==(const ByteSpan&) const = default;
};

/// One numeric operand of an operator occurrence inside a decoded stream.
struct OperandSlot {
    std::string text;           // token exactly as it appears, e.g. "-0.866"
    int sign = 1;               // +1 or -1
    std::string digits;         // decimal digits with point and sign removed
    std::size_t frac_count = 0; // digits after the decimal point
    ByteSpan span;              // position of `text` in the decoded stream
    std::size_t operand_index = 0;
    bool eligible = false;

    bool operator==(const OperandSlot&) const = default;
};

/// One located operator instance.
struct OperatorSite {
    std::string op_name;
    ObjectId stream_owner;
    ByteSpan match_span;  // first operand (or '[' for TJ) through the end of the operator token
    std::vector<OperandSlot> operands;
    std::size_t source_order = 0;

    bool operator==(const OperatorSite&) const = default;
};

}  // namespace opsteg
