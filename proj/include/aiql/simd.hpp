#pragma once

// Selection kernels for the scan and join inner loops.
//
// Every kernel has a scalar reference in `aiql::simd::scalar` and, on x86-64,
// an AVX2 variant in `aiql::simd::avx2`. The unqualified entry points
// dispatch at runtime on the detected ISA; AIQL_SIMD=scalar in the
// environment forces the reference path.

#include <cstdint>
#include <span>
#include <vector>

namespace aiql::simd {

enum class Isa { scalar, avx2 };

const char* to_string(Isa isa);

/// Best ISA supported by this CPU and build.
Isa detected_isa();
/// ISA used by the dispatching entry points.
Isa active_isa();
/// Overrides the dispatch target (tests). Requesting an unsupported ISA
/// falls back to scalar.
void set_active_isa(Isa isa);

/// Appends `base + i` for every i with bit `codes[i]` set in `allowed`.
/// Codes must be < 32.
void select_codes(std::span<const std::uint8_t> codes, std::uint32_t allowed, std::uint32_t base,
                  std::vector<std::uint32_t>& out);

/// Appends `base + i` for every i with lo <= values[i] <= hi.
void select_range(std::span<const std::int64_t> values, std::int64_t lo, std::int64_t hi, std::uint32_t base,
                  std::vector<std::uint32_t>& out);

namespace scalar {
void select_codes(std::span<const std::uint8_t> codes, std::uint32_t allowed, std::uint32_t base,
                  std::vector<std::uint32_t>& out);
void select_range(std::span<const std::int64_t> values, std::int64_t lo, std::int64_t hi, std::uint32_t base,
                  std::vector<std::uint32_t>& out);
}  // namespace scalar

namespace avx2 {
bool available();
void select_codes(std::span<const std::uint8_t> codes, std::uint32_t allowed, std::uint32_t base,
                  std::vector<std::uint32_t>& out);
void select_range(std::span<const std::int64_t> values, std::int64_t lo, std::int64_t hi, std::uint32_t base,
                  std::vector<std::uint32_t>& out);
}  // namespace avx2

}  // namespace aiql::simd
