#pragma once

// Dense double-precision kernels behind the linear heads. Each kernel has a
// portable scalar reference and, on x86-64, an AVX2/FMA variant; the variant
// is chosen once at first use from CPUID (override with MBA_KERNELS=scalar).
//
// axpy is bit-identical across variants. dot differs only by summation
// order, so results agree to a few ulps of sum(|x_i * y_i|).

#include <cstddef>
#include <span>
#include <string_view>

namespace mba::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa) noexcept;
bool isa_available(Isa isa) noexcept;

/// Variant used by dot()/axpy().
Isa active_isa() noexcept;
/// Pins the variant (tests and benchmarking). Throws ConfigError if the CPU
/// lacks it.
void set_active_isa(Isa isa);

double dot(std::span<const double> x, std::span<const double> y);
/// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);

namespace scalar {
double dot(const double* x, const double* y, std::size_t n) noexcept;
void axpy(double a, const double* x, double* y, std::size_t n) noexcept;
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define MBA_KERNELS_X86 1
namespace avx2 {
double dot(const double* x, const double* y, std::size_t n) noexcept;
void axpy(double a, const double* x, double* y, std::size_t n) noexcept;
}  // namespace avx2
#else
#define MBA_KERNELS_X86 0
#endif

}  // namespace mba::kernels
