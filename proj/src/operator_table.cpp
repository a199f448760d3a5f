#include "opsteg/operator_table.hpp"

#include <array>

namespace opsteg {

namespace {

// TJ takes a single array operand; its bounds count numeric array elements.
constexpr std::array<OperatorArity, 32> kOperators{{
    {"c", 6, 6},   {"v", 4, 4},   {"y", 4, 4},   {"l", 2, 2},    {"m", 2, 2},    {"re", 4, 4},
    {"cm", 6, 6},  {"i", 1, 1},   {"M", 1, 1},   {"w", 1, 1},    {"G", 1, 1},    {"g", 1, 1},
    {"K", 4, 4},   {"k", 4, 4},   {"RG", 3, 3},  {"rg", 3, 3},   {"sc", 1, 4},   {"SC", 1, 4},
    {"scn", 1, 4}, {"SCN", 1, 4}, {"Tc", 1, 1},  {"Td", 2, 2},   {"TD", 2, 2},   {"Tf", 1, 1},
    {"TL", 1, 1},  {"Tm", 6, 6},  {"Ts", 1, 1},  {"Tw", 1, 1},   {"Tz", 1, 1},
    {"TJ", 0, kUnboundedOperands},
    {"d0", 2, 2},  {"d1", 6, 6},
}};

}  // namespace

std::span<const OperatorArity> operator_table() noexcept { return kOperators; }

const OperatorArity* find_operator(std::string_view name) noexcept {
    for (const auto& op : kOperators) {
        if (op.name == name) return &op;
    }
    return nullptr;
}

}  // namespace opsteg
