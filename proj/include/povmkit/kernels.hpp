#pragma once

// Data-parallel inner loops over interleaved complex storage.
//
// Every kernel has a scalar reference implementation; AVX2+FMA (x86-64) and
// NEON (aarch64) variants are compiled when the toolchain supports them and
// selected once at runtime from the CPU feature bits. The SIMD variants sum
// in a different order, so results agree with the reference to rounding,
// not bit-for-bit.

#include <cstddef>
#include <span>
#include <string_view>

namespace povmkit::kernels {

enum class Backend { Scalar, Avx2, Neon };

std::string_view backend_name(Backend b) noexcept;

/// True when `b` was compiled in and the running CPU supports it.
bool backend_available(Backend b) noexcept;

/// Backend the dispatching entry points currently route to.
Backend active_backend() noexcept;

/// Override the runtime choice (tests, benchmarks). Throws std::invalid_argument
/// when the backend is unavailable.
void force_backend(Backend b);

/// Restore the CPU-detected default.
void reset_backend() noexcept;

/// sum_i a[i] * b[i]
double dot(std::span<const double> a, std::span<const double> b);

/// y[i] += alpha * x[i]
void axpy(double alpha, std::span<const double> x, std::span<double> y);

// Per-backend entry points, exposed for equivalence testing.
namespace scalar {
double dot(const double* a, const double* b, std::size_t n) noexcept;
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept;
}  // namespace scalar

namespace avx2 {
double dot(const double* a, const double* b, std::size_t n) noexcept;
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept;
}  // namespace avx2

namespace neon {
double dot(const double* a, const double* b, std::size_t n) noexcept;
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept;
}  // namespace neon

}  // namespace povmkit::kernels
