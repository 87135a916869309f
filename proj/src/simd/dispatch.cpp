#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string_view>

#include "bandspectra/error.hpp"
#include "bandspectra/simd/kernels.hpp"

namespace bandspectra::simd {

#if defined(BANDSPECTRA_BUILD_AVX2)
namespace detail {
const KernelTable* avx2_table() noexcept;
}
#endif

const KernelTable* avx2_kernels() noexcept {
#if defined(BANDSPECTRA_BUILD_AVX2)
  return detail::avx2_table();
#else
  return nullptr;
#endif
}

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(BANDSPECTRA_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
  }
  return "unknown";
}

namespace {

const KernelTable* table_for(Isa isa) noexcept {
  return isa == Isa::Avx2 ? avx2_kernels() : &scalar_kernels();
}

const KernelTable* detect() noexcept {
  if (const char* env = std::getenv("BANDSPECTRA_SIMD")) {
    const std::string_view want(env);
    if (want == "scalar") return &scalar_kernels();
    if (want == "avx2" && isa_available(Isa::Avx2)) return avx2_kernels();
  }
  if (isa_available(Isa::Avx2)) return avx2_kernels();
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& current() noexcept {
  static std::atomic<const KernelTable*> table{detect()};
  return table;
}

void require_same_size(std::size_t a, std::size_t b) {
  if (a != b) throw DomainError("simd kernel operands differ in length");
}

}  // namespace

Isa active_isa() noexcept { return current().load(std::memory_order_acquire)->isa; }

bool set_isa(Isa isa) noexcept {
  if (!isa_available(isa)) return false;
  current().store(table_for(isa), std::memory_order_release);
  return true;
}

const KernelTable& active_kernels() noexcept { return *current().load(std::memory_order_acquire); }

void mul_add(std::span<double> acc, std::span<const double> x, std::span<const double> y) {
  require_same_size(acc.size(), x.size());
  require_same_size(acc.size(), y.size());
  active_kernels().mul_add(acc.data(), x.data(), y.data(), acc.size());
}

void mul_add_compensated(std::span<double> acc, std::span<double> comp, std::span<const double> x,
                         std::span<const double> y) {
  require_same_size(acc.size(), comp.size());
  require_same_size(acc.size(), x.size());
  require_same_size(acc.size(), y.size());
  active_kernels().mul_add_compensated(acc.data(), comp.data(), x.data(), y.data(), acc.size());
}

void axpy(std::span<double> acc, double a, std::span<const double> x) {
  require_same_size(acc.size(), x.size());
  active_kernels().axpy(acc.data(), a, x.data(), acc.size());
}

void rotate(std::span<double> x, std::span<double> y, double c, double s) {
  require_same_size(x.size(), y.size());
  active_kernels().rotate(x.data(), y.data(), c, s, x.size());
}

}  // namespace bandspectra::simd
