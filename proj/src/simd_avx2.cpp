// Compiled with -mavx2; only reached after a runtime CPU check.

#include <immintrin.h>

#include "aiql/simd.hpp"

namespace aiql::simd::avx2 {

namespace {

inline void emit_bits(std::uint32_t bits, std::uint32_t base, std::vector<std::uint32_t>& out) {
    while (bits != 0) {
        out.push_back(base + static_cast<std::uint32_t>(__builtin_ctz(bits)));
        bits &= bits - 1;
    }
}

}  // namespace

bool available() { return __builtin_cpu_supports("avx2"); }

void select_codes(std::span<const std::uint8_t> codes, std::uint32_t allowed, std::uint32_t base,
                  std::vector<std::uint32_t>& out) {
    // 32-entry lookup split into two pshufb tables (codes 0-15 and 16-31);
    // pshufb works per 128-bit lane so each table is broadcast to both lanes.
    alignas(16) std::uint8_t lo_tab[16];
    alignas(16) std::uint8_t hi_tab[16];
    for (int i = 0; i < 16; ++i) {
        lo_tab[i] = ((allowed >> i) & 1u) ? 0xFF : 0x00;
        hi_tab[i] = ((allowed >> (i + 16)) & 1u) ? 0xFF : 0x00;
    }
    const __m256i lo_lut = _mm256_broadcastsi128_si256(_mm_load_si128(reinterpret_cast<const __m128i*>(lo_tab)));
    const __m256i hi_lut = _mm256_broadcastsi128_si256(_mm_load_si128(reinterpret_cast<const __m128i*>(hi_tab)));
    const __m256i low4 = _mm256_set1_epi8(0x0F);
    const __m256i sixteen = _mm256_set1_epi8(0x10);

    std::size_t i = 0;
    const std::size_t n = codes.size();
    for (; i + 32 <= n; i += 32) {
        __m256i c = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(codes.data() + i));
        __m256i idx = _mm256_and_si256(c, low4);
        __m256i from_lo = _mm256_shuffle_epi8(lo_lut, idx);
        __m256i from_hi = _mm256_shuffle_epi8(hi_lut, idx);
        __m256i is_hi = _mm256_cmpeq_epi8(_mm256_and_si256(c, sixteen), sixteen);
        __m256i hit = _mm256_blendv_epi8(from_lo, from_hi, is_hi);
        auto bits = static_cast<std::uint32_t>(_mm256_movemask_epi8(hit));
        emit_bits(bits, base + static_cast<std::uint32_t>(i), out);
    }
    for (; i < n; ++i) {
        if ((allowed >> codes[i]) & 1u) out.push_back(base + static_cast<std::uint32_t>(i));
    }
}

void select_range(std::span<const std::int64_t> values, std::int64_t lo, std::int64_t hi, std::uint32_t base,
                  std::vector<std::uint32_t>& out) {
    const __m256i vlo = _mm256_set1_epi64x(lo);
    const __m256i vhi = _mm256_set1_epi64x(hi);
    std::size_t i = 0;
    const std::size_t n = values.size();
    for (; i + 8 <= n; i += 8) {
        __m256i a = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(values.data() + i));
        __m256i b = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(values.data() + i + 4));
        // v in [lo, hi]  <=>  !(lo > v) && !(v > hi)
        __m256i out_a = _mm256_or_si256(_mm256_cmpgt_epi64(vlo, a), _mm256_cmpgt_epi64(a, vhi));
        __m256i out_b = _mm256_or_si256(_mm256_cmpgt_epi64(vlo, b), _mm256_cmpgt_epi64(b, vhi));
        auto miss_a = static_cast<std::uint32_t>(_mm256_movemask_pd(_mm256_castsi256_pd(out_a)));
        auto miss_b = static_cast<std::uint32_t>(_mm256_movemask_pd(_mm256_castsi256_pd(out_b)));
        std::uint32_t bits = (~(miss_a | (miss_b << 4))) & 0xFFu;
        emit_bits(bits, base + static_cast<std::uint32_t>(i), out);
    }
    for (; i < n; ++i) {
        if (values[i] >= lo && values[i] <= hi) out.push_back(base + static_cast<std::uint32_t>(i));
    }
}

}  // namespace aiql::simd::avx2
