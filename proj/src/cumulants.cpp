#include "bandspectra/cumulants.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "bandspectra/error.hpp"
#include "bandspectra/process.hpp"

namespace bandspectra {

template <class Tag>
SubsetFunctional<Tag>::SubsetFunctional(int arity) : arity_(arity) {
  if (arity < 1) throw DomainError("functional arity must be positive");
  if (arity > kMaxFunctionalArity) throw CapacityError("functional arity", arity, kMaxFunctionalArity);
  values_.assign(std::size_t{1} << arity, 0.0);
}

template <class Tag>
SubsetFunctional<Tag> SubsetFunctional<Tag>::from_function(int arity, const std::function<double(Block)>& f) {
  SubsetFunctional out(arity);
  for (Block s = 1; s < (Block{1} << arity); ++s) out.values_[s] = f(s);
  return out;
}

template <class Tag>
double SubsetFunctional<Tag>::operator()(Block subset) const {
  if (subset == 0 || subset >= values_.size()) throw DomainError("subset outside functional domain");
  return values_[subset];
}

template <class Tag>
void SubsetFunctional<Tag>::set(Block subset, double value) {
  if (subset == 0 || subset >= values_.size()) throw DomainError("subset outside functional domain");
  values_[subset] = value;
}

template class SubsetFunctional<MomentTag>;
template class SubsetFunctional<CumulantTag>;

namespace {

template <class F>
void check_arity(const Partition& pi, const F& f) {
  if (pi.ground_size() != f.arity()) {
    throw DomainError("partition ground size " + std::to_string(pi.ground_size()) +
                      " does not match functional arity " + std::to_string(f.arity()));
  }
}

template <class F>
double product_over(std::span<const Block> blocks, const F& f) {
  double prod = 1.0;
  for (Block b : blocks) prod *= f(b);
  return prod;
}

double signed_factorial(int m) {
  // (-1)^(m-1) (m-1)!
  double f = 1.0;
  for (int i = 2; i < m; ++i) f *= i;
  return (m % 2 == 1) ? f : -f;
}

// Sum over partitions sigma of the mask `s`, weight(#sigma) * prod f(B).
template <class F>
double one_block_transform(Block s, const F& f, bool with_mobius) {
  double total = 0.0;
  for_each_partition_of(s, [&](std::span<const Block> blocks) {
    const double w = with_mobius ? signed_factorial(static_cast<int>(blocks.size())) : 1.0;
    total += w * product_over(blocks, f);
  });
  return total;
}

}  // namespace

double moment_product(const Partition& pi, const MomentFunctional& m) {
  check_arity(pi, m);
  return product_over(pi.blocks(), m);
}

double cumulant_product(const Partition& pi, const CumulantFunctional& c) {
  check_arity(pi, c);
  return product_over(pi.blocks(), c);
}

double moments_from_cumulants(const CumulantFunctional& c, const Partition& pi) {
  check_arity(pi, c);
  double total = 0.0;
  for (const auto& sigma : enumerate_refinements(pi)) total += cumulant_product(sigma, c);
  return total;
}

double cumulant_from_moments(const MomentFunctional& m, const Partition& pi) {
  check_arity(pi, m);
  double total = 0.0;
  for (const auto& sigma : enumerate_refinements(pi)) {
    total += static_cast<double>(mobius_weight(pi, sigma)) * moment_product(sigma, m);
  }
  return total;
}

MomentFunctional to_moments(const CumulantFunctional& c) {
  return MomentFunctional::from_function(c.arity(), [&](Block s) { return one_block_transform(s, c, false); });
}

CumulantFunctional to_cumulants(const MomentFunctional& m) {
  return CumulantFunctional::from_function(m.arity(), [&](Block s) { return one_block_transform(s, m, true); });
}

double empirical_joint_cumulant(const SampleView& samples, std::span<const std::size_t> indices) {
  const std::size_t m = samples.rows;
  const int order = static_cast<int>(indices.size());
  if (order < 1) throw DomainError("empirical cumulant needs at least one index");
  if (order > kMaxEmpiricalCumulantOrder) {
    throw CapacityError("empirical cumulant order", order, kMaxEmpiricalCumulantOrder);
  }
  if (m < 2) throw InsufficientDataError("empirical cumulant needs at least 2 samples, got " + std::to_string(m));
  if (samples.data.size() < m * samples.cols) throw DomainError("sample view smaller than rows*cols");
  for (auto idx : indices) {
    if (idx >= samples.cols) throw DomainError("cumulant index outside sample columns");
  }

  // Center first: the cumulant is shift invariant for order >= 2 and this
  // keeps the plug-in moments well conditioned.
  std::vector<double> means(order, 0.0);
  for (int a = 0; a < order; ++a) {
    double s = 0.0;
    for (std::size_t r = 0; r < m; ++r) s += samples(r, indices[a]);
    means[a] = s / static_cast<double>(m);
  }
  if (order == 1) return means[0];

  const Block full = (Block{1} << order) - 1;
  MomentFunctional moments(order);
  for (Block s = 1; s <= full; ++s) {
    if (std::popcount(s) == 1) {
      moments.set(s, 0.0);
      continue;
    }
    double acc = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      double prod = 1.0;
      for (int a = 0; a < order; ++a) {
        if (s & (Block{1} << a)) prod *= samples(r, indices[a]) - means[a];
      }
      acc += prod;
    }
    moments.set(s, acc / static_cast<double>(m));
  }
  double value = cumulant_from_moments(moments, Partition::one_block(order));
  if (order == 2) value *= static_cast<double>(m) / static_cast<double>(m - 1);
  return value;
}

double linear_process_cumulant(const ProcessModel& model, std::span<const long> offsets) {
  if (offsets.empty()) throw DomainError("linear_process_cumulant needs at least one offset");
  const int order = static_cast<int>(offsets.size());
  const double kappa = model.driver().cumulant(order);
  if (kappa == 0.0) return 0.0;
  const Kernel& h = model.kernel();
  // l must put every j_i + l inside the kernel support.
  const auto [lo_it, hi_it] = std::minmax_element(offsets.begin(), offsets.end());
  const long l_lo = h.min_offset() - *lo_it;
  const long l_hi = h.max_offset() - *hi_it;
  double total = 0.0;
  for (long l = l_lo; l <= l_hi; ++l) {
    double prod = 1.0;
    for (long j : offsets) prod *= h(j + l);
    total += prod;
  }
  return total * kappa;
}

}  // namespace bandspectra
