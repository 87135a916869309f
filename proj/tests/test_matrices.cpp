#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "bandspectra/dense.hpp"
#include "bandspectra/error.hpp"
#include "bandspectra/matrices.hpp"

using namespace bandspectra;

namespace {

DenseMatrix random_dense(std::mt19937_64& gen, std::size_t rows, std::size_t cols) {
  std::normal_distribution<double> nd;
  DenseMatrix x(rows, cols);
  for (auto& v : x.data()) v = nd(gen);
  return x;
}

DenseMatrix masked_gram(const DenseMatrix& x, std::size_t b) {
  const std::size_t p = x.cols();
  DenseMatrix g = multiply(x.transpose(), x);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j)
      if ((i > j ? i - j : j - i) > b) g(i, j) = 0.0;
  return g;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

BandedMatrix random_banded(std::mt19937_64& gen, std::size_t p, std::size_t b) {
  std::normal_distribution<double> nd;
  BandedMatrix y(p, b);
  for (std::size_t d = 0; d <= y.bandwidth(); ++d)
    for (auto& v : y.diagonal(d)) v = nd(gen);
  return y;
}

}  // namespace

TEST_SUITE("matrices") {
  TEST_CASE("banded matrix storage") {
    BandedMatrix y(4, 9);
    CHECK(y.bandwidth() == 3);
    BandedMatrix z(5, 1);
    z.set(2, 3, 7.0);
    CHECK(z(3, 2) == 7.0);
    CHECK(z(0, 4) == 0.0);
    CHECK_THROWS_AS(z.set(0, 2, 1.0), DomainError);
    CHECK_THROWS_AS(BandedMatrix(0, 0), DomainError);
    CHECK(BandedMatrix::identity(3).to_dense() == DenseMatrix::identity(3));
    z.set(1, 1, 2.0);
    CHECK(z.frobenius_squared() == doctest::Approx(2.0 * 49.0 + 4.0));
  }

  TEST_CASE("banded matrix dump round trip") {
    std::mt19937_64 gen(1);
    const BandedMatrix y = random_banded(gen, 7, 3);
    std::stringstream ss;
    y.write(ss);
    const BandedMatrix back = BandedMatrix::read(ss);
    CHECK(back == y);
    std::istringstream bad("3 5\n1 2 3\n");
    CHECK_THROWS_AS(BandedMatrix::read(bad), DomainError);
    std::istringstream truncated("3 1\n1 2 3\n4\n");
    CHECK_THROWS_AS(BandedMatrix::read(truncated), DomainError);
  }

  TEST_CASE("banded covariance matches the masked dense Gram") {
    std::mt19937_64 gen(2);
    for (std::size_t p : {1u, 2u, 5u, 17u, 40u}) {
      for (std::size_t b : {0u, 1u, 3u, 100u}) {
        const DenseMatrix x = random_dense(gen, 13, p);
        const DenseMatrix expected = masked_gram(x, b);
        const BandedMatrix y = banded_covariance(x, b);
        CHECK(max_abs_diff(y.to_dense(), expected) < 1e-12);
        BandedGramAccumulator acc(p, b);
        for (std::size_t i = 0; i < x.rows(); ++i) acc.add_row(x.row(i));
        const BandedMatrix streamed = acc.take();
        CHECK(streamed == y);
      }
    }
  }

  TEST_CASE("centered covariance") {
    std::mt19937_64 gen(3);
    const std::size_t n = 11;
    const std::size_t p = 9;
    const std::size_t b = 2;
    const DenseMatrix x = random_dense(gen, n, p);
    const CenteredCovariance c = centered_banded_covariance(x, b);
    std::vector<double> xbar(p, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < p; ++j) xbar[j] += x(i, j) / static_cast<double>(n);
    DenseMatrix xc = x;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < p; ++j) xc(i, j) -= xbar[j];
    CHECK(max_abs_diff(c.centered.to_dense(), masked_gram(xc, b)) < 1e-12);
    DenseMatrix delta(p, p);
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j)
        if ((i > j ? i - j : j - i) <= b) delta(i, j) = static_cast<double>(n) * xbar[i] * xbar[j];
    CHECK(max_abs_diff(c.perturbation.to_dense(), delta) < 1e-12);
    const DenseMatrix y = banded_covariance(x, b).to_dense();
    DenseMatrix sum = c.centered.to_dense();
    for (std::size_t i = 0; i < sum.data().size(); ++i) sum.data()[i] += c.perturbation.to_dense().data()[i];
    CHECK(max_abs_diff(sum, y) < 1e-12);
    CHECK_THROWS_AS(centered_banded_covariance(random_dense(gen, 1, 3), 1), DomainError);
  }

  TEST_CASE("trace powers match dense products") {
    std::mt19937_64 gen(4);
    std::uniform_int_distribution<std::size_t> dim(1, 64);
    std::uniform_int_distribution<std::size_t> bw(0, 10);
    for (int t = 0; t < 20; ++t) {
      const std::size_t p = dim(gen);
      const BandedMatrix y = random_banded(gen, p, bw(gen));
      const DenseMatrix d = y.to_dense();
      DenseMatrix power = d;
      const std::vector<double> tr = trace_powers(y, 6);
      REQUIRE(tr.size() == 6);
      for (int k = 1; k <= 6; ++k) {
        const double expected = power.trace();
        CHECK(std::abs(tr[k - 1] - expected) <= 1e-9 * std::max(1.0, std::abs(expected)));
        CHECK(trace_power(y, k) == doctest::Approx(tr[k - 1]).epsilon(1e-12));
        power = multiply(power, d);
      }
      const BandedMatrix y2 = multiply_commuting(y, y);
      CHECK(y2.bandwidth() == std::min(2 * y.bandwidth(), p - 1));
      CHECK(max_abs_diff(y2.to_dense(), multiply(d, d)) < 1e-10);
    }
    CHECK_THROWS_AS(trace_powers(BandedMatrix(2, 1), 0), DomainError);
  }

  TEST_CASE("eigenvalues in closed form") {
    BandedMatrix diag(4, 0);
    const double vals[] = {3.0, -1.0, 2.0, 0.5};
    for (std::size_t i = 0; i < 4; ++i) diag.set(i, i, vals[i]);
    CHECK(symmetric_eigenvalues(diag) == std::vector<double>{-1.0, 0.5, 2.0, 3.0});

    BandedMatrix two(2, 1);
    two.set(0, 0, 2.0);
    two.set(1, 1, 2.0);
    two.set(0, 1, 1.0);
    const auto ev2 = symmetric_eigenvalues(two);
    CHECK(ev2[0] == doctest::Approx(1.0));
    CHECK(ev2[1] == doctest::Approx(3.0));

    for (std::size_t n : {5u, 16u, 33u}) {
      BandedMatrix t(n, 1);
      for (std::size_t i = 0; i + 1 < n; ++i) t.set(i, i + 1, 1.0);
      const auto ev = symmetric_eigenvalues(t);
      std::vector<double> expected;
      for (std::size_t j = 1; j <= n; ++j) expected.push_back(2.0 * std::cos(std::numbers::pi * j / (n + 1.0)));
      std::sort(expected.begin(), expected.end());
      for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(ev[j] - expected[j]) < 1e-10);
    }
  }

  TEST_CASE("eigenvalue invariants") {
    std::mt19937_64 gen(5);
    for (std::size_t p : {1u, 7u, 20u, 31u}) {
      const BandedMatrix y = random_banded(gen, p, 4);
      const auto ev = symmetric_eigenvalues(y);
      CHECK(std::is_sorted(ev.begin(), ev.end()));
      double sum = 0.0, sq = 0.0;
      for (double v : ev) {
        sum += v;
        sq += v * v;
      }
      CHECK(std::abs(sum - y.to_dense().trace()) < 1e-10 * std::max(1.0, y.frobenius_squared()));
      CHECK(sq == doctest::Approx(y.frobenius_squared()).epsilon(1e-10));
    }
    const BandedMatrix hard = random_banded(gen, 30, 29);
    CHECK_THROWS_AS(symmetric_eigenvalues(hard, EigenOptions{1e-14, 1}), NumericalError);
  }

  TEST_CASE("full band of a Gram matrix is positive semidefinite") {
    std::mt19937_64 gen(6);
    const DenseMatrix x = random_dense(gen, 12, 20);
    const auto ev = symmetric_eigenvalues(banded_covariance(x, 19));
    // Rank at most 12: the eight smallest are zero up to rounding.
    for (double v : ev) CHECK(v > -1e-10);
    CHECK(std::abs(ev[7]) < 1e-10);
    CHECK(ev[8] > 1e-6);
  }

  TEST_CASE("histograms") {
    const auto edges = uniform_edges(0.0, 1.0, 4);
    CHECK(edges == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    CHECK_THROWS_AS(uniform_edges(1.0, 1.0, 3), DomainError);
    const std::vector<double> same(10, 0.3);
    const Histogram h = empirical_spectral_histogram(same, edges);
    CHECK(h.mass[1] == 1.0);
    CHECK(h.total() == 1.0);
    const std::vector<double> vals{-1.0, 0.1, 0.5, 1.0, 2.0};
    const Histogram g = empirical_spectral_histogram(vals, edges);
    CHECK(g.underflow == doctest::Approx(0.2));
    CHECK(g.overflow == doctest::Approx(0.2));
    CHECK(g.mass[0] == doctest::Approx(0.2));
    CHECK(g.mass[2] == doctest::Approx(0.2));
    CHECK(g.mass[3] == doctest::Approx(0.2));  // last bin is closed
    CHECK(g.total() == doctest::Approx(1.0));
    CHECK(l1_distance(h, g) == doctest::Approx(2.0));
    CHECK(l1_distance(g, g) == 0.0);
    const Histogram other = empirical_spectral_histogram(vals, uniform_edges(0.0, 1.0, 5));
    CHECK_THROWS_AS(l1_distance(g, other), DomainError);
    CHECK_THROWS_AS(empirical_spectral_histogram(std::vector<double>{}, edges), DomainError);
    const std::vector<double> bad_edges{0.0, 0.0, 1.0};
    CHECK_THROWS_AS(empirical_spectral_histogram(vals, bad_edges), DomainError);
  }
}
