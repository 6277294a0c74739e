#pragma once

#include <array>
#include <string_view>

namespace groupt {

/// The twelve distinct orders of the q-multiset {0.68, 0.65, 0.62, 0.62},
/// in the row order of the classic worked example (`groupt table1`).
inline constexpr std::array<std::string_view, 12> kExampleOrders = {
    "0.68,0.65,0.62,0.62", "0.68,0.62,0.65,0.62", "0.68,0.62,0.62,0.65", "0.65,0.68,0.62,0.62",
    "0.65,0.62,0.68,0.62", "0.65,0.62,0.62,0.68", "0.62,0.65,0.68,0.62", "0.62,0.65,0.62,0.68",
    "0.62,0.68,0.65,0.62", "0.62,0.68,0.62,0.65", "0.62,0.62,0.68,0.65", "0.62,0.62,0.65,0.68",
};

}  // namespace groupt
