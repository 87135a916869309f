#include "bandspectra/matrices.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "bandspectra/error.hpp"
#include "bandspectra/simd/kernels.hpp"
#include "bandspectra/stats.hpp"

namespace bandspectra {

BandedMatrix::BandedMatrix(std::size_t dim, std::size_t bandwidth)
    : dim_(dim), bandwidth_(dim == 0 ? 0 : std::min(bandwidth, dim - 1)) {
  if (dim == 0) throw DomainError("banded matrix dimension must be positive");
  diagonals_.resize(bandwidth_ + 1);
  for (std::size_t d = 0; d <= bandwidth_; ++d) diagonals_[d].assign(dim_ - d, 0.0);
}

BandedMatrix BandedMatrix::identity(std::size_t dim) {
  BandedMatrix m(dim, 0);
  std::fill(m.diagonals_[0].begin(), m.diagonals_[0].end(), 1.0);
  return m;
}

BandedMatrix BandedMatrix::from_dense(const DenseMatrix& dense, std::size_t bandwidth) {
  if (dense.rows() != dense.cols()) throw DomainError("from_dense needs a square matrix");
  BandedMatrix m(dense.rows(), bandwidth);
  for (std::size_t d = 0; d <= m.bandwidth_; ++d) {
    for (std::size_t t = 0; t + d < m.dim_; ++t) m.diagonals_[d][t] = dense(t, t + d);
  }
  return m;
}

double BandedMatrix::operator()(std::size_t i, std::size_t j) const noexcept {
  if (i > j) std::swap(i, j);
  const std::size_t d = j - i;
  if (d > bandwidth_ || j >= dim_) return 0.0;
  return diagonals_[d][i];
}

void BandedMatrix::set(std::size_t i, std::size_t j, double value) {
  if (i > j) std::swap(i, j);
  if (j >= dim_) throw DomainError("banded matrix index out of range");
  if (j - i > bandwidth_) throw DomainError("entry outside the band");
  diagonals_[j - i][i] = value;
}

std::span<const double> BandedMatrix::diagonal(std::size_t d) const {
  if (d > bandwidth_) throw DomainError("diagonal outside the band");
  return diagonals_[d];
}

std::span<double> BandedMatrix::diagonal(std::size_t d) {
  if (d > bandwidth_) throw DomainError("diagonal outside the band");
  return diagonals_[d];
}

DenseMatrix BandedMatrix::to_dense() const {
  DenseMatrix out(dim_, dim_);
  for (std::size_t d = 0; d <= bandwidth_; ++d) {
    for (std::size_t t = 0; t + d < dim_; ++t) {
      out(t, t + d) = diagonals_[d][t];
      out(t + d, t) = diagonals_[d][t];
    }
  }
  return out;
}

double BandedMatrix::frobenius_squared() const {
  std::vector<double> terms;
  terms.reserve(dim_ * (bandwidth_ + 1));
  for (std::size_t d = 0; d <= bandwidth_; ++d) {
    const double w = d == 0 ? 1.0 : 2.0;
    for (double v : diagonals_[d]) terms.push_back(w * v * v);
  }
  return pairwise_sum(terms);
}

void BandedMatrix::write(std::ostream& os) const {
  const auto old_precision = os.precision(17);
  os << dim_ << ' ' << bandwidth_ << '\n';
  for (const auto& diag : diagonals_) {
    for (std::size_t t = 0; t < diag.size(); ++t) os << (t ? " " : "") << diag[t];
    os << '\n';
  }
  os.precision(old_precision);
}

BandedMatrix BandedMatrix::read(std::istream& is) {
  std::size_t p = 0, b = 0;
  if (!(is >> p >> b)) throw DomainError("banded matrix dump: missing 'p b' header");
  if (p == 0) throw DomainError("banded matrix dump: dimension must be positive");
  if (b > p - 1) throw DomainError("banded matrix dump: bandwidth exceeds p - 1");
  BandedMatrix m(p, b);
  for (std::size_t d = 0; d <= b; ++d) {
    for (auto& v : m.diagonals_[d]) {
      if (!(is >> v)) throw DomainError("banded matrix dump: diagonal " + std::to_string(d) + " truncated");
    }
  }
  return m;
}

BandedGramAccumulator::BandedGramAccumulator(std::size_t dim, std::size_t bandwidth) : sum_(dim, bandwidth) {
  comp_.resize(sum_.bandwidth() + 1);
  for (std::size_t d = 0; d <= sum_.bandwidth(); ++d) comp_[d].assign(dim - d, 0.0);
}

void BandedGramAccumulator::add_row(std::span<const double> row) {
  const std::size_t p = sum_.dim();
  if (row.size() != p) throw DomainError("row length does not match matrix dimension");
  for (std::size_t d = 0; d <= sum_.bandwidth(); ++d) {
    simd::mul_add_compensated(sum_.diagonal(d), comp_[d], row.first(p - d), row.subspan(d, p - d));
  }
}

BandedMatrix BandedGramAccumulator::take() {
  BandedMatrix out = sum_;
  reset();
  return out;
}

void BandedGramAccumulator::reset() {
  for (std::size_t d = 0; d <= sum_.bandwidth(); ++d) {
    auto diag = sum_.diagonal(d);
    std::fill(diag.begin(), diag.end(), 0.0);
    std::fill(comp_[d].begin(), comp_[d].end(), 0.0);
  }
}

BandedMatrix banded_covariance(const DenseMatrix& x, std::size_t bandwidth) {
  if (x.rows() == 0 || x.cols() == 0) throw DomainError("banded_covariance needs a non-empty data matrix");
  BandedGramAccumulator acc(x.cols(), bandwidth);
  for (std::size_t r = 0; r < x.rows(); ++r) acc.add_row(x.row(r));
  return acc.take();
}

CenteredCovariance centered_banded_covariance(const DenseMatrix& x, std::size_t bandwidth) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  if (n < 2) throw DomainError("centered covariance needs n >= 2 rows");
  std::vector<double> means(p);
  std::vector<double> column(n);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t r = 0; r < n; ++r) column[r] = x(r, j);
    means[j] = pairwise_sum(column) / static_cast<double>(n);
  }
  BandedGramAccumulator raw(p, bandwidth);
  BandedGramAccumulator centered(p, bandwidth);
  std::vector<double> shifted(p);
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = x.row(r);
    raw.add_row(row);
    for (std::size_t j = 0; j < p; ++j) shifted[j] = row[j] - means[j];
    centered.add_row(shifted);
  }
  CenteredCovariance out{centered.take(), BandedMatrix{}};
  BandedMatrix y = raw.take();
  out.perturbation = BandedMatrix(p, bandwidth);
  for (std::size_t d = 0; d <= y.bandwidth(); ++d) {
    auto dst = out.perturbation.diagonal(d);
    const auto a = y.diagonal(d);
    const auto c = out.centered.diagonal(d);
    for (std::size_t t = 0; t < dst.size(); ++t) dst[t] = a[t] - c[t];
  }
  return out;
}

BandedMatrix multiply_commuting(const BandedMatrix& a, const BandedMatrix& b) {
  if (a.dim() != b.dim()) throw DomainError("band product with mismatched dimensions");
  const std::size_t p = a.dim();
  const long wa = static_cast<long>(a.bandwidth());
  const long wb = static_cast<long>(b.bandwidth());
  BandedMatrix c(p, static_cast<std::size_t>(wa + wb));
  const long wc = static_cast<long>(c.bandwidth());
  const long lp = static_cast<long>(p);
  std::vector<double> comp;
  // C(i, i + d) = sum_e A(i, i + e) B(i + e, i + d), for fixed (d, e) a
  // contiguous elementwise product along i.
  for (long d = 0; d <= wc; ++d) {
    auto out = c.diagonal(static_cast<std::size_t>(d));
    comp.assign(out.size(), 0.0);
    for (long e = -wa; e <= wa; ++e) {
      const long f = d - e;  // offset of B's entry
      if (f < -wb || f > wb) continue;
      // Valid i: 0 <= i, i + d < p, 0 <= i + e < p.
      const long i_lo = std::max(0L, -e);
      const long i_hi = std::min(lp - 1 - d, lp - 1 - e);
      if (i_hi < i_lo) continue;
      const std::size_t len = static_cast<std::size_t>(i_hi - i_lo + 1);
      // A(i, i + e) lives on diagonal |e| at index min(i, i + e).
      const auto da = a.diagonal(static_cast<std::size_t>(std::abs(e)));
      const auto db = b.diagonal(static_cast<std::size_t>(std::abs(f)));
      const std::size_t a_start = static_cast<std::size_t>(i_lo + std::min(0L, e));
      const std::size_t b_start = static_cast<std::size_t>(i_lo + std::min(e, d));
      simd::mul_add_compensated(out.subspan(static_cast<std::size_t>(i_lo), len),
                                std::span<double>(comp).subspan(static_cast<std::size_t>(i_lo), len),
                                da.subspan(a_start, len), db.subspan(b_start, len));
    }
  }
  return c;
}

double frobenius_inner(const BandedMatrix& a, const BandedMatrix& b) {
  if (a.dim() != b.dim()) throw DomainError("inner product with mismatched dimensions");
  const std::size_t w = std::min(a.bandwidth(), b.bandwidth());
  std::vector<double> terms;
  terms.reserve(a.dim() * (w + 1));
  for (std::size_t d = 0; d <= w; ++d) {
    const double weight = d == 0 ? 1.0 : 2.0;
    const auto da = a.diagonal(d);
    const auto db = b.diagonal(d);
    for (std::size_t t = 0; t < da.size(); ++t) terms.push_back(weight * da[t] * db[t]);
  }
  return pairwise_sum(terms);
}

std::vector<double> trace_powers(const BandedMatrix& y, int max_k) {
  if (max_k < 1) throw DomainError("trace power order must be >= 1");
  const int half = (max_k + 1) / 2;
  std::vector<BandedMatrix> powers;  // powers[m] = Y^m, m >= 1
  powers.reserve(half + 1);
  powers.push_back(BandedMatrix::identity(y.dim()));
  powers.push_back(y);
  for (int m = 2; m <= half; ++m) powers.push_back(multiply_commuting(powers[m - 1], y));
  std::vector<double> traces(max_k);
  traces[0] = pairwise_sum(y.diagonal(0));
  for (int k = 2; k <= max_k; ++k) traces[k - 1] = frobenius_inner(powers[(k + 1) / 2], powers[k / 2]);
  return traces;
}

double trace_power(const BandedMatrix& y, int k) { return trace_powers(y, k).back(); }

double Histogram::total() const noexcept {
  double t = underflow + overflow;
  for (double m : mass) t += m;
  return t;
}

std::vector<double> uniform_edges(double lo, double hi, std::size_t bins) {
  if (bins == 0 || !(hi > lo)) throw DomainError("uniform_edges needs bins >= 1 and hi > lo");
  std::vector<double> edges(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  edges.back() = hi;
  return edges;
}

namespace {

void check_edges(std::span<const double> edges) {
  if (edges.size() < 2) throw DomainError("histogram needs at least two edges");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) throw DomainError("histogram edges must be strictly increasing");
  }
}

}  // namespace

Histogram empirical_spectral_histogram(std::span<const double> values, std::span<const double> edges) {
  check_edges(edges);
  if (values.empty()) throw DomainError("histogram of an empty sample");
  Histogram h;
  h.edges.assign(edges.begin(), edges.end());
  h.mass.assign(edges.size() - 1, 0.0);
  std::vector<std::size_t> counts(h.mass.size(), 0);
  std::size_t under = 0, over = 0;
  for (double v : values) {
    if (v < edges.front()) {
      ++under;
    } else if (v > edges.back()) {
      ++over;
    } else {
      auto it = std::upper_bound(edges.begin(), edges.end(), v);
      std::size_t bin = static_cast<std::size_t>(it - edges.begin()) - 1;
      if (bin >= counts.size()) bin = counts.size() - 1;  // v == last edge
      ++counts[bin];
    }
  }
  const double w = 1.0 / static_cast<double>(values.size());
  for (std::size_t i = 0; i < counts.size(); ++i) h.mass[i] = static_cast<double>(counts[i]) * w;
  h.underflow = static_cast<double>(under) * w;
  h.overflow = static_cast<double>(over) * w;
  return h;
}

double l1_distance(const Histogram& a, const Histogram& b) {
  if (a.edges != b.edges) throw DomainError("l1_distance needs histograms on identical edges");
  double s = std::abs(a.underflow - b.underflow) + std::abs(a.overflow - b.overflow);
  for (std::size_t i = 0; i < a.mass.size(); ++i) s += std::abs(a.mass[i] - b.mass[i]);
  return s;
}

}  // namespace bandspectra
