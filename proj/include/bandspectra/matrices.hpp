#pragma once

// Banded sample covariance Y = B o (X^T X), its centered variant, trace
// powers, eigenvalues and the empirical spectral histogram.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "bandspectra/dense.hpp"

namespace bandspectra {

/// Symmetric p x p matrix with entries zero when |i - j| > bandwidth.
/// Stores the main diagonal and the `bandwidth` super-diagonals; diagonal d
/// has p - d entries, entry t being (t, t + d). The bandwidth is clamped to
/// p - 1: a band wider than the matrix is the dense matrix.
class BandedMatrix {
 public:
  BandedMatrix() = default;
  BandedMatrix(std::size_t dim, std::size_t bandwidth);

  static BandedMatrix identity(std::size_t dim);
  /// Keeps the upper band of `dense` (assumed symmetric).
  static BandedMatrix from_dense(const DenseMatrix& dense, std::size_t bandwidth);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t bandwidth() const noexcept { return bandwidth_; }

  double operator()(std::size_t i, std::size_t j) const noexcept;
  /// Sets (i, j) and (j, i); throws DomainError outside the band.
  void set(std::size_t i, std::size_t j, double value);

  std::span<const double> diagonal(std::size_t d) const;
  std::span<double> diagonal(std::size_t d);

  DenseMatrix to_dense() const;
  /// Sum of squares over both triangles of the band.
  double frobenius_squared() const;

  /// Text dump: "p b" header line, then one line per stored diagonal
  /// (main diagonal first, then super-diagonals 1..b), whitespace separated.
  void write(std::ostream& os) const;
  static BandedMatrix read(std::istream& is);

  friend bool operator==(const BandedMatrix&, const BandedMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::size_t bandwidth_ = 0;
  std::vector<std::vector<double>> diagonals_;
};

/// Y(i, j) = sum_k X(k, i) X(k, j) for |i - j| <= b, else 0. Only the band
/// is computed; each entry is a compensated sum over the rows of X.
BandedMatrix banded_covariance(const DenseMatrix& x, std::size_t bandwidth);

/// Same, accumulating rows one at a time. Call add_row() n times, then take().
class BandedGramAccumulator {
 public:
  BandedGramAccumulator(std::size_t dim, std::size_t bandwidth);
  void add_row(std::span<const double> row);
  BandedMatrix take();
  void reset();

 private:
  BandedMatrix sum_;
  std::vector<std::vector<double>> comp_;
};

struct CenteredCovariance {
  BandedMatrix centered;     // B o ((X - Xbar)^T (X - Xbar))
  BandedMatrix perturbation; // Y - centered
};

/// Requires n >= 2.
CenteredCovariance centered_banded_covariance(const DenseMatrix& x, std::size_t bandwidth);

/// C = A B for symmetric banded A, B that commute (e.g. powers of one
/// matrix); the result is symmetric with bandwidth min(a + b, p - 1).
BandedMatrix multiply_commuting(const BandedMatrix& a, const BandedMatrix& b);

/// sum_{i,j} A(i, j) B(i, j) over the overlap of the bands.
double frobenius_inner(const BandedMatrix& a, const BandedMatrix& b);

/// trace(Y^k) for k >= 1.
double trace_power(const BandedMatrix& y, int k);
/// trace(Y^1), ..., trace(Y^max_k), sharing the power chain:
/// trace(Y^(a+c)) = <Y^a, Y^c> with a = ceil(k/2), c = floor(k/2).
std::vector<double> trace_powers(const BandedMatrix& y, int max_k);

struct EigenOptions {
  double tol = 1e-12;   // stop when off-diagonal Frobenius norm < tol * ||Y||_F
  int max_sweeps = 50;
};

/// All eigenvalues in ascending order (cyclic Jacobi). Throws NumericalError
/// carrying the remaining relative off-diagonal mass when max_sweeps is hit.
std::vector<double> symmetric_eigenvalues(const BandedMatrix& y, const EigenOptions& options = {});
std::vector<double> symmetric_eigenvalues(DenseMatrix a, const EigenOptions& options = {});

struct Histogram {
  std::vector<double> edges;  // strictly increasing, size >= 2
  std::vector<double> mass;   // edges.size() - 1 bins, [e_i, e_{i+1}); last bin closed
  double underflow = 0.0;
  double overflow = 0.0;

  std::size_t bins() const noexcept { return mass.size(); }
  double total() const noexcept;
};

/// n + 1 uniformly spaced edges over [lo, hi].
std::vector<double> uniform_edges(double lo, double hi, std::size_t bins);

/// Mass 1/len(values) per value.
Histogram empirical_spectral_histogram(std::span<const double> values, std::span<const double> edges);

/// sum |a - b| over bins plus under/overflow; edges must match.
double l1_distance(const Histogram& a, const Histogram& b);

}  // namespace bandspectra
