#include <atomic>
#include <stdexcept>
#include <string>

#include "povmkit/kernels.hpp"

namespace povmkit::kernels {

// Stubs for variants that were not compiled for this target. They are never
// selected because backend_available() reports them as missing.
#if !defined(POVMKIT_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n) noexcept { return scalar::dot(a, b, n); }
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept { scalar::axpy(alpha, x, y, n); }
}  // namespace avx2
#endif
#if !defined(POVMKIT_HAVE_NEON)
namespace neon {
double dot(const double* a, const double* b, std::size_t n) noexcept { return scalar::dot(a, b, n); }
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept { scalar::axpy(alpha, x, y, n); }
}  // namespace neon
#endif

namespace {

Backend detect() noexcept {
  if (backend_available(Backend::Avx2)) return Backend::Avx2;
  if (backend_available(Backend::Neon)) return Backend::Neon;
  return Backend::Scalar;
}

std::atomic<Backend>& current() noexcept {
  static std::atomic<Backend> backend{detect()};
  return backend;
}

}  // namespace

std::string_view backend_name(Backend b) noexcept {
  switch (b) {
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
    case Backend::Scalar: break;
  }
  return "scalar";
}

bool backend_available(Backend b) noexcept {
  switch (b) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
#if defined(POVMKIT_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::Neon:
#if defined(POVMKIT_HAVE_NEON)
      return true;  // baseline on aarch64
#else
      return false;
#endif
  }
  return false;
}

Backend active_backend() noexcept { return current().load(std::memory_order_relaxed); }

void force_backend(Backend b) {
  if (!backend_available(b)) {
    throw std::invalid_argument("kernel backend not available: " + std::string(backend_name(b)));
  }
  current().store(b, std::memory_order_relaxed);
}

void reset_backend() noexcept { current().store(detect(), std::memory_order_relaxed); }

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("kernels::dot: length mismatch");
  switch (active_backend()) {
    case Backend::Avx2: return avx2::dot(a.data(), b.data(), a.size());
    case Backend::Neon: return neon::dot(a.data(), b.data(), a.size());
    case Backend::Scalar: break;
  }
  return scalar::dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("kernels::axpy: length mismatch");
  switch (active_backend()) {
    case Backend::Avx2: avx2::axpy(alpha, x.data(), y.data(), x.size()); return;
    case Backend::Neon: neon::axpy(alpha, x.data(), y.data(), x.size()); return;
    case Backend::Scalar: break;
  }
  scalar::axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace povmkit::kernels
