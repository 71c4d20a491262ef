#include <gtest/gtest.h>

#include <limits>
#include <random>

#include "aiql/simd.hpp"

using namespace aiql::simd;

namespace {

std::vector<std::uint32_t> codes_oracle(const std::vector<std::uint8_t>& codes, std::uint32_t allowed,
                                        std::uint32_t base) {
    std::vector<std::uint32_t> out;
    for (std::size_t i = 0; i < codes.size(); ++i)
        if (allowed >> codes[i] & 1u) out.push_back(base + static_cast<std::uint32_t>(i));
    return out;
}

std::vector<std::uint32_t> range_oracle(const std::vector<std::int64_t>& v, std::int64_t lo, std::int64_t hi,
                                        std::uint32_t base) {
    std::vector<std::uint32_t> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (lo <= v[i] && v[i] <= hi) out.push_back(base + static_cast<std::uint32_t>(i));
    return out;
}

}  // namespace

TEST(Simd, SelectCodesExample) {
    std::vector<std::uint8_t> codes{0, 1, 2, 1, 0, 3};
    std::vector<std::uint32_t> out{99};
    scalar::select_codes(codes, 0b0110, 10, out);
    EXPECT_EQ(out, (std::vector<std::uint32_t>{99, 11, 12, 13}));
}

TEST(Simd, SelectRangeInclusive) {
    std::vector<std::int64_t> v{5, 10, 15, 20};
    std::vector<std::uint32_t> out;
    scalar::select_range(v, 10, 15, 0, out);
    EXPECT_EQ(out, (std::vector<std::uint32_t>{1, 2}));
}

TEST(Simd, KernelsAgreeWithOracleOnRandomInputs) {
    std::mt19937_64 rng(7);
    for (int round = 0; round < 300; ++round) {
        const std::size_t n = rng() % 200;
        std::vector<std::uint8_t> codes(n);
        std::vector<std::int64_t> values(n);
        for (auto& c : codes) c = static_cast<std::uint8_t>(rng() % 32);
        for (auto& v : values) v = static_cast<std::int64_t>(rng() % 1000) - 500;
        if (round % 10 == 0 && n)
            values[0] = round % 20 ? std::numeric_limits<std::int64_t>::min() : std::numeric_limits<std::int64_t>::max();
        const auto allowed = static_cast<std::uint32_t>(rng());
        std::int64_t lo = static_cast<std::int64_t>(rng() % 1000) - 500;
        std::int64_t hi = lo + static_cast<std::int64_t>(rng() % 600);
        if (round % 7 == 0) lo = std::numeric_limits<std::int64_t>::min();
        if (round % 11 == 0) hi = std::numeric_limits<std::int64_t>::max();
        const auto base = static_cast<std::uint32_t>(rng() % 1000);

        const auto want_codes = codes_oracle(codes, allowed, base);
        const auto want_range = range_oracle(values, lo, hi, base);
        std::vector<std::uint32_t> s1, s2, a1, a2, d1, d2;
        scalar::select_codes(codes, allowed, base, s1);
        scalar::select_range(values, lo, hi, base, s2);
        avx2::select_codes(codes, allowed, base, a1);
        avx2::select_range(values, lo, hi, base, a2);
        select_codes(codes, allowed, base, d1);
        select_range(values, lo, hi, base, d2);
        ASSERT_EQ(s1, want_codes);
        ASSERT_EQ(s2, want_range);
        ASSERT_EQ(a1, want_codes);
        ASSERT_EQ(a2, want_range);
        ASSERT_EQ(d1, want_codes);
        ASSERT_EQ(d2, want_range);
    }
}

TEST(Simd, DispatchOverride) {
    const Isa saved = active_isa();
    set_active_isa(Isa::scalar);
    EXPECT_EQ(active_isa(), Isa::scalar);
    set_active_isa(Isa::avx2);
    EXPECT_EQ(active_isa(), avx2::available() ? Isa::avx2 : Isa::scalar);
    EXPECT_EQ(detected_isa(), avx2::available() ? Isa::avx2 : Isa::scalar);
    set_active_isa(saved);
}
