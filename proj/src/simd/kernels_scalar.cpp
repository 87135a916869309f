#include "bandspectra/simd/kernels.hpp"

namespace bandspectra::simd {

namespace {

void mul_add_scalar(double* acc, const double* x, const double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += x[i] * y[i];
}

void mul_add_compensated_scalar(double* acc, double* comp, const double* x, const double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double term = x[i] * y[i] - comp[i];
    const double sum = acc[i] + term;
    comp[i] = (sum - acc[i]) - term;
    acc[i] = sum;
  }
}

void axpy_scalar(double* acc, double a, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += a * x[i];
}

void rotate_scalar(double* x, double* y, double c, double s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

constexpr KernelTable kScalar{Isa::Scalar, mul_add_scalar, mul_add_compensated_scalar, axpy_scalar,
                              rotate_scalar};

}  // namespace

const KernelTable& scalar_kernels() noexcept { return kScalar; }

}  // namespace bandspectra::simd
