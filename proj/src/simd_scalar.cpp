#include "aiql/simd.hpp"

namespace aiql::simd::scalar {

void select_codes(std::span<const std::uint8_t> codes, std::uint32_t allowed, std::uint32_t base,
                  std::vector<std::uint32_t>& out) {
    for (std::size_t i = 0; i < codes.size(); ++i) {
        if ((allowed >> codes[i]) & 1u) out.push_back(base + static_cast<std::uint32_t>(i));
    }
}

void select_range(std::span<const std::int64_t> values, std::int64_t lo, std::int64_t hi, std::uint32_t base,
                  std::vector<std::uint32_t>& out) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] >= lo && values[i] <= hi) out.push_back(base + static_cast<std::uint32_t>(i));
    }
}

}  // namespace aiql::simd::scalar
