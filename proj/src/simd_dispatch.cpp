#include <atomic>
#include <cstdlib>
#include <string_view>

#include "aiql/simd.hpp"

namespace aiql::simd {

#ifndef AIQL_HAVE_AVX2
namespace avx2 {
bool available() { return false; }
void select_codes(std::span<const std::uint8_t> codes, std::uint32_t allowed, std::uint32_t base,
                  std::vector<std::uint32_t>& out) {
    scalar::select_codes(codes, allowed, base, out);
}
void select_range(std::span<const std::int64_t> values, std::int64_t lo, std::int64_t hi, std::uint32_t base,
                  std::vector<std::uint32_t>& out) {
    scalar::select_range(values, lo, hi, base, out);
}
}  // namespace avx2
#endif

namespace {

Isa initial_isa() {
    if (const char* env = std::getenv("AIQL_SIMD"); env != nullptr && std::string_view(env) == "scalar")
        return Isa::scalar;
    return detected_isa();
}

std::atomic<Isa>& active() {
    static std::atomic<Isa> isa{initial_isa()};
    return isa;
}

}  // namespace

const char* to_string(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

Isa detected_isa() { return avx2::available() ? Isa::avx2 : Isa::scalar; }

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
    if (isa == Isa::avx2 && !avx2::available()) isa = Isa::scalar;
    active().store(isa, std::memory_order_relaxed);
}

void select_codes(std::span<const std::uint8_t> codes, std::uint32_t allowed, std::uint32_t base,
                  std::vector<std::uint32_t>& out) {
    if (active_isa() == Isa::avx2) return avx2::select_codes(codes, allowed, base, out);
    scalar::select_codes(codes, allowed, base, out);
}

void select_range(std::span<const std::int64_t> values, std::int64_t lo, std::int64_t hi, std::uint32_t base,
                  std::vector<std::uint32_t>& out) {
    if (active_isa() == Isa::avx2) return avx2::select_range(values, lo, hi, base, out);
    scalar::select_range(values, lo, hi, base, out);
}

}  // namespace aiql::simd
