#pragma once

// Elementwise arithmetic kernels behind the banded Gram, band-product,
// convolution and Jacobi-rotation inner loops.
//
// Every kernel is elementwise: lane i of the result depends only on lane i of
// the inputs, and each variant performs the same IEEE operations in the same
// order (no fused multiply-add). The scalar and SIMD variants therefore agree
// bit for bit, which is what keeps experiment output independent of the
// instruction set chosen at runtime.

#include <cstddef>
#include <span>
#include <string_view>

namespace bandspectra::simd {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
  Isa isa;
  /// acc[i] += x[i] * y[i]
  void (*mul_add)(double* acc, const double* x, const double* y, std::size_t n);
  /// Kahan-compensated acc[i] += x[i] * y[i]; comp carries the lost low bits.
  void (*mul_add_compensated)(double* acc, double* comp, const double* x, const double* y, std::size_t n);
  /// acc[i] += a * x[i]
  void (*axpy)(double* acc, double a, const double* x, std::size_t n);
  /// (x[i], y[i]) <- (c x[i] - s y[i], s x[i] + c y[i])
  void (*rotate)(double* x, double* y, double c, double s, std::size_t n);
};

const KernelTable& scalar_kernels() noexcept;
/// nullptr when the binary was built without AVX2 support.
const KernelTable* avx2_kernels() noexcept;

bool isa_available(Isa isa) noexcept;
std::string_view isa_name(Isa isa) noexcept;

/// The ISA in use. Chosen once from CPU features; the environment variable
/// BANDSPECTRA_SIMD=scalar|avx2 overrides the detection.
Isa active_isa() noexcept;
/// Forces an ISA; returns false (and changes nothing) if it is unavailable.
bool set_isa(Isa isa) noexcept;
const KernelTable& active_kernels() noexcept;

void mul_add(std::span<double> acc, std::span<const double> x, std::span<const double> y);
void mul_add_compensated(std::span<double> acc, std::span<double> comp, std::span<const double> x,
                         std::span<const double> y);
void axpy(std::span<double> acc, double a, std::span<const double> x);
void rotate(std::span<double> x, std::span<double> y, double c, double s);

}  // namespace bandspectra::simd
