#pragma once

// Joint moments and joint cumulants as functions on subsets of {1..k}, and the
// partition-lattice transforms between them.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "bandspectra/partitions.hpp"

namespace bandspectra {

class ProcessModel;

inline constexpr int kMaxFunctionalArity = 10;

/// A real function on the non-empty subsets of {1..k}, indexed by bit mask.
/// Subset indexing makes symmetry in the arguments hold by construction.
template <class Tag>
class SubsetFunctional {
 public:
  SubsetFunctional() = default;
  explicit SubsetFunctional(int arity);

  /// f is called once for every non-empty mask in increasing mask order.
  static SubsetFunctional from_function(int arity, const std::function<double(Block)>& f);

  int arity() const noexcept { return arity_; }
  double operator()(Block subset) const;
  void set(Block subset, double value);
  std::span<const double> values() const noexcept { return values_; }

 private:
  int arity_ = 0;
  std::vector<double> values_;  // values_[0] is unused (empty set)
};

struct MomentTag {};
struct CumulantTag {};

/// S -> E prod_{i in S} X_i
using MomentFunctional = SubsetFunctional<MomentTag>;
/// S -> C{X_i}_{i in S}
using CumulantFunctional = SubsetFunctional<CumulantTag>;

/// prod_{A in pi} m(A)
double moment_product(const Partition& pi, const MomentFunctional& m);
/// prod_{A in pi} c(A)
double cumulant_product(const Partition& pi, const CumulantFunctional& c);

/// sum over sigma refining pi of cumulant_product(sigma, c).
double moments_from_cumulants(const CumulantFunctional& c, const Partition& pi);
/// sum over sigma refining pi of mobius_weight(pi, sigma) * moment_product(sigma, m).
double cumulant_from_moments(const MomentFunctional& m, const Partition& pi);

/// The whole functional at once: every subset S mapped through the one-block
/// transform on S.
MomentFunctional to_moments(const CumulantFunctional& c);
CumulantFunctional to_cumulants(const MomentFunctional& m);

/// Row-major m x d sample block.
struct SampleView {
  std::span<const double> data;
  std::size_t rows = 0;
  std::size_t cols = 0;

  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

inline constexpr int kMaxEmpiricalCumulantOrder = 3;

/// Plug-in estimate of C(X_{indices[0]}, ..., X_{indices[r-1]}) from sample
/// rows (indices are 0-based columns). Order 2 is rescaled by m/(m-1) so it
/// equals the unbiased sample covariance.
double empirical_joint_cumulant(const SampleView& samples, std::span<const std::size_t> indices);

/// C(Z_{j_0}, ..., Z_{j_r}) for the linear process: sum over l of
/// h(j_0 + l) ... h(j_r + l) times the (r+1)-th driver cumulant.
double linear_process_cumulant(const ProcessModel& model, std::span<const long> offsets);

}  // namespace bandspectra
