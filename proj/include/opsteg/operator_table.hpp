#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string_view>

namespace opsteg {

inline constexpr std::size_t kUnboundedOperands = std::numeric_limits<std::size_t>::max();

/// Operand-count bounds for one of the 32 operators whose numeric operands
/// tolerate small changes.
struct OperatorArity {
    std::string_view name;
    std::size_t min_operands;
    std::size_t max_operands;
};

/// The 32 carrier operators, in the order graphics / state / color / text / Type3.
std::span<const OperatorArity> operator_table() noexcept;

const OperatorArity* find_operator(std::string_view name) noexcept;

}  // namespace opsteg
