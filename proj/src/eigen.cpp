#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "bandspectra/error.hpp"
#include "bandspectra/matrices.hpp"
#include "bandspectra/simd/kernels.hpp"
#include "bandspectra/stats.hpp"

namespace bandspectra {

namespace {

double off_diagonal_squared(const DenseMatrix& a) {
  const std::size_t p = a.rows();
  std::vector<double> rows(p);
  for (std::size_t i = 0; i < p; ++i) {
    double s = 0.0;
    for (std::size_t j = i + 1; j < p; ++j) s += a(i, j) * a(i, j);
    rows[i] = 2.0 * s;
  }
  return pairwise_sum(rows);
}

double frobenius_squared(const DenseMatrix& a) {
  std::vector<double> rows(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (double v : a.row(i)) s += v * v;
    rows[i] = s;
  }
  return pairwise_sum(rows);
}

struct Rotation {
  std::size_t p, q;
  double c, s, t;
};

// Pairs of the round-robin schedule: slot i meets slot m-1-i, with slot 0
// fixed and the others shifted by `round`. Indices >= n are padding.
void round_pairs(std::size_t m, std::size_t round, std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  pairs.clear();
  auto player = [&](std::size_t slot) { return slot == 0 ? 0 : 1 + (slot - 1 + round) % (m - 1); };
  for (std::size_t i = 0; i < m / 2; ++i) {
    const std::size_t x = player(i);
    const std::size_t y = player(m - 1 - i);
    pairs.emplace_back(std::min(x, y), std::max(x, y));
  }
}

}  // namespace

// Cyclic Jacobi in round-robin order. Every round applies up to n/2
// disjoint rotations J at once: a row pass forms J^T A with the vector
// kernel, then a column pass walks each row once to form (J^T A) J.
// Disjoint rotations do not disturb each other's 2x2 blocks, which are then
// set from the closed-form update.
std::vector<double> symmetric_eigenvalues(DenseMatrix a, const EigenOptions& options) {
  if (!(options.tol > 0.0)) throw DomainError("eigenvalue tolerance must be positive");
  if (a.rows() != a.cols()) throw DomainError("eigenvalues need a square matrix");
  const std::size_t n = a.rows();
  if (n == 0) return {};

  const double norm2 = frobenius_squared(a);
  const double target2 = options.tol * options.tol * norm2;
  const std::size_t m = n + (n % 2);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<Rotation> rotations;
  double off2 = off_diagonal_squared(a);
  int sweep = 0;
  while (off2 >= target2 && off2 > 0.0) {
    if (sweep == options.max_sweeps) {
      throw NumericalError("Jacobi eigenvalue iteration did not converge in " + std::to_string(options.max_sweeps) +
                               " sweeps",
                           std::sqrt(off2 / norm2));
    }
    ++sweep;
    for (std::size_t round = 0; round + 1 < m; ++round) {
      round_pairs(m, round, pairs);
      rotations.clear();
      for (const auto& [p, q] : pairs) {
        if (q >= n) continue;
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        // Skip entries already negligible against both diagonal entries.
        const double g = 100.0 * std::abs(apq);
        if (sweep > 4 && std::abs(app) + g == std::abs(app) && std::abs(aqq) + g == std::abs(aqq)) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        rotations.push_back({p, q, c, t * c, t});
      }
      if (rotations.empty()) continue;
      std::vector<double> app_before(rotations.size());
      std::vector<double> aqq_before(rotations.size());
      std::vector<double> apq_before(rotations.size());
      for (std::size_t r = 0; r < rotations.size(); ++r) {
        app_before[r] = a(rotations[r].p, rotations[r].p);
        aqq_before[r] = a(rotations[r].q, rotations[r].q);
        apq_before[r] = a(rotations[r].p, rotations[r].q);
      }
      for (const Rotation& r : rotations) simd::rotate(a.row(r.p), a.row(r.q), r.c, r.s);
      for (std::size_t i = 0; i < n; ++i) {
        const auto row = a.row(i);
        for (const Rotation& r : rotations) {
          const double x = row[r.p];
          const double y = row[r.q];
          row[r.p] = r.c * x - r.s * y;
          row[r.q] = r.s * x + r.c * y;
        }
      }
      for (std::size_t i = 0; i < rotations.size(); ++i) {
        const Rotation& r = rotations[i];
        a(r.p, r.p) = app_before[i] - r.t * apq_before[i];
        a(r.q, r.q) = aqq_before[i] + r.t * apq_before[i];
        a(r.p, r.q) = 0.0;
        a(r.q, r.p) = 0.0;
      }
    }
    off2 = off_diagonal_squared(a);
  }
  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

std::vector<double> symmetric_eigenvalues(const BandedMatrix& y, const EigenOptions& options) {
  return symmetric_eigenvalues(y.to_dense(), options);
}

}  // namespace bandspectra
