// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Tolerances are pinned here and do not read from configuration.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bandspectra/config.hpp"
#include "bandspectra/cumulants.hpp"
#include "bandspectra/experiments.hpp"
#include "bandspectra/limits.hpp"
#include "bandspectra/oracle.hpp"
#include "bandspectra/partitions.hpp"
#include "bandspectra/process.hpp"
#include "bandspectra/report.hpp"
#include "bandspectra/stats.hpp"

using namespace bandspectra;

namespace {

constexpr double kRoundTripTol = 1e-12;
constexpr double kMeanIdentityTol = 1e-12;
constexpr double kMeanZ = 4.0;
constexpr double kOracleZ = 4.0;
constexpr double kLlnRel = 0.05;
constexpr double kSupportMass = 0.95;
constexpr double kSupportRadius = 0.2;
constexpr double kCltRel = 0.10;
constexpr double kCltAbs = 0.05;
constexpr double kCltZ = 3.0;
constexpr double kShapeZ = 4.0;
constexpr double kCenteredSpread = 3.0;
constexpr double kAuditSeconds = 60.0;
constexpr double kMeanSeconds = 120.0;
constexpr double kOracleSeconds = 600.0;
constexpr double kLlnSeconds = 300.0;
constexpr double kCltSeconds = 900.0;

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    pass = false;
    detail += (detail.empty() ? "" : "; ") + why;
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[192];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

ProcessModel white(DriverSpec d) { return ProcessModel(Kernel::impulse(), std::move(d)); }
ProcessModel ma1(DriverSpec d) { return ProcessModel(Kernel::ma1(0.5), std::move(d)); }

ExperimentConfig base_config(const ProcessModel& model, std::vector<SizeSpec> sizes, std::size_t replicas) {
  ExperimentConfig c;
  c.model = model;
  c.sizes = std::move(sizes);
  c.replicas = replicas;
  c.seed = 20240601;
  return c;
}

int g_failures = 0;

void criterion(int id, const std::string& name, double budget_seconds, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out.fail(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_seconds > 0.0 && secs > budget_seconds) out.fail(fmt("runtime %.1f s over budget %.0f s", secs, budget_seconds));
  if (!out.pass) ++g_failures;
  std::printf("%s criterion %d %s: %s [%.1f s]\n", out.pass ? "PASS" : "FAIL", id, name.c_str(), out.detail.c_str(),
              secs);
  std::fflush(stdout);
}

Outcome partition_audit() {
  Outcome out;
  for (int k = 2; k <= 4; ++k) {
    const AuditReport r = audit_join_bounds(k);
    out.note("k=" + std::to_string(k) + " triples=" + std::to_string(r.triples_checked) +
             " violations=" + std::to_string(r.violations));
    if (r.violations != 0 || r.triples_checked == 0) out.fail("audit k=" + std::to_string(k));
  }
  const Partition pi0 = Partition::from_parts(12, {{1, 2}, {3, 4}, {5, 6}, {7, 8}, {9, 10}, {11, 12}});
  const Partition pi1 = Partition::from_parts(12, {{2, 3}, {1, 4}, {5, 6}, {7, 8}, {9, 10}, {11, 12}});
  const Partition pi = Partition::from_parts(12, {{1, 5, 6}, {2, 7, 8}, {3, 9, 10}, {4, 11, 12}});
  const TripleCheck t = check_join_bounds(pi0, pi1, pi);
  out.note("fixture join0=" + std::to_string(t.join0) + " join1=" + std::to_string(t.join1) +
           " r=" + std::to_string(t.r) + " refined_bound=" + std::to_string(t.refined_bound) +
           " matching_bound=" + std::to_string(t.matching_bound));
  if (!(t.k == 6 && t.join0 == 2 && t.join1 == 2 && t.r == 5 && t.total_join == 1)) out.fail("fixture joins");
  if (!t.refined_holds) out.fail("refined bound should hold on the fixture");
  if (t.matching_bound_holds) out.fail("matching bound should fail on the fixture");
  return out;
}

Outcome mobius_round_trip() {
  Outcome out;
  std::mt19937_64 gen(31);
  std::uniform_int_distribution<int> arity(1, 5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int k = arity(gen);
    const auto c = CumulantFunctional::from_function(k, [&](Block) { return u(gen); });
    const auto m = MomentFunctional::from_function(k, [&](Block) { return u(gen); });
    const CumulantFunctional c2 = to_cumulants(to_moments(c));
    const MomentFunctional m2 = to_moments(to_cumulants(m));
    for (Block s = 1; s < (Block{1} << k); ++s) {
      worst = std::max(worst, std::abs(c2(s) - c(s)) / std::max(1.0, std::abs(c(s))));
      worst = std::max(worst, std::abs(m2(s) - m(s)) / std::max(1.0, std::abs(m(s))));
    }
  }
  out.note(fmt("100 instances, max relative error %.3g", worst));
  if (!(worst <= kRoundTripTol)) out.fail("round trip error above tolerance");
  return out;
}

Outcome mean_identity() {
  Outcome out;
  std::mt19937_64 gen(47);
  std::uniform_int_distribution<std::size_t> pd(1, 8), nd(1, 6), bd(0, 8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const DriverSpec drivers[] = {DriverSpec::gaussian(), DriverSpec::rademacher(), DriverSpec::uniform(),
                                DriverSpec::centered_exponential()};
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Kernel h = Kernel::from_pairs({{-1, u(gen)}, {0, 1.0}, {1, u(gen)}, {2, u(gen)}});
    const ProcessModel m(h, drivers[t % 4].scaled(0.5 + (t % 3)));
    const std::size_t p = pd(gen);
    const double exact = exact_mean_trace(m, 1, p, nd(gen), std::min(bd(gen), p));
    const double target = static_cast<double>(p) * autocovariance(m, 0);
    worst = std::max(worst, std::abs(exact - target) / std::abs(target));
  }
  out.note(fmt("20 configs, max relative error %.3g", worst));
  if (!(worst <= kMeanIdentityTol)) out.fail("exact mean differs from p R(0)");

  const ProcessModel m = ma1(DriverSpec::gaussian());
  const SizeSpec size{4, 3, 1, 0};
  const std::size_t reps = 1000000;
  std::vector<double> tr(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    tr[r] = replica_trace_powers(m, size, 1, replica_stream(11, StreamTag::Oracle, 0, r))[0];
  }
  const BatchedEstimate est = batched_estimate(reps, kDefaultBatches, [&](std::size_t lo, std::size_t hi) {
    return mean(std::span<const double>(tr).subspan(lo, hi - lo));
  });
  const double target = exact_mean_trace(m, 1, 4, 3, 1);
  const double z = z_score(est.value, target, est.se);
  out.note(fmt("MC mean %.6f vs %.6f, z=%.2f", est.value, target, z));
  if (!(std::abs(z) <= kMeanZ)) out.fail("Monte Carlo mean outside 4 SE");
  return out;
}

Outcome oracle_grid() {
  Outcome out;
  const ProcessModel models[] = {white(DriverSpec::gaussian()), white(DriverSpec::rademacher()),
                                 ma1(DriverSpec::rademacher())};
  const char* names[] = {"white-gaussian", "white-rademacher", "ma1-rademacher"};
  std::size_t checked = 0;
  double worst = 0.0;
  for (int mi = 0; mi < 3; ++mi) {
    std::vector<SizeSpec> sizes;
    for (std::size_t p : {3u, 4u})
      for (std::size_t n : {2u, 3u})
        for (std::size_t b : {0u, 1u}) sizes.push_back({p, n, b, 0});
    ExperimentConfig c = base_config(models[mi], sizes, 200000);
    c.orders = {{1}, {2}, {1, 1}, {2, 1}};
    const ExperimentReport r = run_oracle_check(c);
    for (const auto& cmp : r.oracle) {
      ++checked;
      worst = std::max(worst, std::abs(cmp.z));
      if (!(std::abs(cmp.z) <= kOracleZ)) {
        std::ostringstream os;
        os << names[mi] << " (" << cmp.size.p << "," << cmp.size.n << "," << cmp.size.b << ") order";
        for (int k : cmp.order) os << ' ' << k;
        os << " z=" << cmp.z;
        out.fail(os.str());
      }
    }
  }
  out.note(std::to_string(checked) + " comparisons over 24 configs, max |z| " + fmt("%.2f", worst));
  if (checked != 96) out.fail("expected 96 comparisons");
  return out;
}

// Criteria 5 and 6 share the MA(1) schedule run.
struct LlnRuns {
  ExperimentReport ma1_single;
  ExperimentReport ma1_schedule;
  ExperimentReport white_single;
};

const std::vector<SizeSpec> kSchedule{{128, 1024, 8, 64}, {256, 2048, 12, 64}, {512, 4096, 16, 64}};

LlnRuns& lln_runs() {
  static LlnRuns runs = [] {
    LlnRuns r;
    ExperimentConfig single = base_config(ma1(DriverSpec::gaussian()), {{512, 4096, 16, 0}}, 8);
    single.spectrum_replicas = 0;
    r.ma1_single = run_lln(single);
    ExperimentConfig sched = base_config(ma1(DriverSpec::gaussian()), kSchedule, 64);
    sched.trend_checks = true;
    sched.spectrum_replicas = 4;
    r.ma1_schedule = run_lln(sched);
    ExperimentConfig w = base_config(white(DriverSpec::gaussian()), {{512, 4096, 16, 0}}, 8);
    w.spectrum_replicas = 4;
    r.white_single = run_lln(w);
    return r;
  }();
  return runs;
}

Outcome lln_moments() {
  Outcome out;
  const LlnRuns& runs = lln_runs();
  const LlnSizeReport& s = runs.ma1_single.lln.at(0);
  for (std::size_t i = 0; i < s.k_list.size(); ++i) {
    out.note(fmt("k=%.0f rel error %.4f", s.k_list[i], s.moment_rel_error[i]));
    if (!(s.moment_rel_error[i] <= kLlnRel)) out.fail("moment outside 5%");
  }
  std::vector<double> var;
  for (const auto& size : runs.ma1_schedule.lln) {
    const auto it = std::find(size.k_list.begin(), size.k_list.end(), 2);
    var.push_back(size.moment_variance.at(static_cast<std::size_t>(it - size.k_list.begin())));
  }
  out.note(fmt("Var(tr Y^2 / p) %.3g > %.3g > %.3g", var[0], var[1], var[2]));
  if (!(var[0] > var[1] && var[1] > var[2])) out.fail("variance not strictly decreasing");
  return out;
}

Outcome spectral_histograms() {
  Outcome out;
  const LlnRuns& runs = lln_runs();
  const LlnSizeReport& w = runs.white_single.lln.at(0);
  std::size_t near = 0;
  for (double v : w.eigenvalues) near += std::abs(v - 1.0) <= kSupportRadius;
  const double mass = static_cast<double>(near) / static_cast<double>(w.eigenvalues.size());
  out.note(fmt("white noise mass within 0.2 of 1: %.4f over %.0f eigenvalues", mass,
               static_cast<double>(w.eigenvalues.size())));
  if (!(mass >= kSupportMass)) out.fail("white-noise eigenvalue mass below 95%");
  const auto& sched = runs.ma1_schedule.lln;
  out.note(fmt("MA(1) L1 %.4f > %.4f > %.4f", sched[0].l1, sched[1].l1, sched[2].l1));
  if (!(sched[0].l1 > sched[1].l1 && sched[1].l1 > sched[2].l1)) out.fail("L1 distance not decreasing");
  return out;
}

struct CltRuns {
  ExperimentReport white_gaussian;
  ExperimentReport white_rademacher;
  ExperimentReport ma1_gaussian;
};

CltRuns& clt_runs() {
  static CltRuns runs = [] {
    CltRuns r;
    ExperimentConfig wg = base_config(white(DriverSpec::gaussian()), {{400, 1600, 10, 0}}, 2000);
    wg.k_list = {1};
    r.white_gaussian = run_clt(wg);
    ExperimentConfig wr = wg;
    wr.model = white(DriverSpec::rademacher());
    r.white_rademacher = run_clt(wr);
    ExperimentConfig m = base_config(ma1(DriverSpec::gaussian()), {{400, 3200, 16, 0}}, 2000);
    m.k_list = {1, 2};
    r.ma1_gaussian = run_clt(m);
    return r;
  }();
  return runs;
}

Outcome clt_covariances() {
  Outcome out;
  const CltRuns& runs = clt_runs();
  const CltSizeReport& wg = runs.white_gaussian.clt.at(0);
  const double v = wg.sample_cov(0, 0);
  out.note(fmt("white gaussian var %.4f (target 2)", v));
  if (!(std::abs(v - 2.0) <= kCltRel * 2.0)) out.fail("white gaussian variance outside 10%");
  const CltSizeReport& wr = runs.white_rademacher.clt.at(0);
  out.note(fmt("white rademacher var %.3g (target %.3g)", wr.sample_cov(0, 0), wr.target_cov(0, 0)));
  if (!(std::abs(wr.sample_cov(0, 0)) <= kCltAbs && wr.target_cov(0, 0) == 0.0)) out.fail("rademacher variance not near 0");
  const CltSizeReport& m = runs.ma1_gaussian.clt.at(0);
  const ProcessModel model = ma1(DriverSpec::gaussian());
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      const int k = static_cast<int>(i) + 1;
      const int l = static_cast<int>(j) + 1;
      const double target = 2.0 * k * l * nu_moment(model, k + l);
      const double z = z_score(m.sample_cov(i, j), target, m.se(i, j));
      out.note(fmt("MA(1) (%.0f,%.0f) ", k, l) + fmt("%.4f vs %.4f", m.sample_cov(i, j), target) + fmt(" z=%.2f", z));
      if (!(std::abs(z) <= kCltZ)) out.fail("MA(1) covariance outside 3 SE");
    }
  }
  return out;
}

Outcome gaussianity() {
  Outcome out;
  const CltRuns& runs = clt_runs();
  for (const ExperimentReport* r : {&runs.white_gaussian, &runs.ma1_gaussian}) {
    const CltSizeReport& s = r->clt.at(0);
    for (std::size_t i = 0; i < s.k_list.size(); ++i) {
      const ShapeStats& sh = s.shape.at(i);
      const double zs = sh.skewness / sh.se_skewness;
      const double zk = sh.excess_kurtosis / sh.se_kurtosis;
      out.note(fmt("k=%.0f skew z=%.2f kurt z=%.2f", s.k_list[i], zs, zk));
      if (!(std::abs(zs) <= kShapeZ && std::abs(zk) <= kShapeZ)) out.fail("shape diagnostic outside 4 SE");
    }
  }
  return out;
}

Outcome centered_variant() {
  Outcome out;
  ExperimentConfig c = base_config(ma1(DriverSpec::gaussian()),
                                   {{128, 512, 8, 0}, {256, 1024, 8, 0}, {512, 2048, 8, 0}}, 8);
  c.centered = true;
  c.spectrum_replicas = 0;
  const ExperimentReport r = run_lln(c);
  double lo = INFINITY, hi = 0.0;
  for (const auto& s : r.lln) {
    const double v = s.centered_ratio.value();
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    out.note(fmt("p=%.0f ratio %.4f", static_cast<double>(s.size.p), v));
  }
  out.note(fmt("spread %.3f", hi / lo));
  if (!(lo > 0.0 && hi / lo < kCenteredSpread)) out.fail("ratio spread not below 3");
  return out;
}

std::string summary_text(const ExperimentReport& r) {
  std::ostringstream os;
  write_summary_csv(r, os);
  return os.str();
}

Outcome determinism() {
  Outcome out;
  ExperimentConfig lln = base_config(ma1(DriverSpec::centered_exponential()), {{40, 160, 3, 0}, {64, 256, 4, 0}}, 16);
  lln.trend_checks = true;
  lln.centered = true;
  ExperimentConfig clt = base_config(ma1(DriverSpec::uniform()), {{24, 96, 3, 0}}, 240);
  ExperimentConfig orc = base_config(ma1(DriverSpec::rademacher()), {{3, 2, 1, 0}}, 3000);
  const std::pair<ExperimentKind, ExperimentConfig*> runs[] = {
      {ExperimentKind::Lln, &lln}, {ExperimentKind::Clt, &clt}, {ExperimentKind::Oracle, &orc}};
  for (const auto& [kind, cfg] : runs) {
    std::string first;
    for (std::size_t workers : {1u, 2u, 4u}) {
      cfg->workers = workers;
      const std::string text = summary_text(run_experiment(kind, *cfg));
      if (first.empty()) {
        first = text;
      } else if (text != first) {
        out.fail(std::string(experiment_name(kind)) + " summary differs at workers=" + std::to_string(workers));
      }
    }
    out.note(std::string(experiment_name(kind)) + " " + std::to_string(first.size()) + " bytes identical");
  }
  return out;
}

}  // namespace

int main() {
  criterion(1, "partition audit", kAuditSeconds, partition_audit);
  criterion(2, "moment-cumulant round trip", 0.0, mobius_round_trip);
  criterion(3, "exact mean identity", kMeanSeconds, mean_identity);
  criterion(4, "oracle equivalence", kOracleSeconds, oracle_grid);
  {
    // Criteria 5 and 6 share their simulations; the budget covers both.
    const auto t0 = std::chrono::steady_clock::now();
    criterion(5, "LLN moments and variance trend", 0.0, lln_moments);
    criterion(6, "spectral histogram", 0.0, spectral_histograms);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > kLlnSeconds) {
      ++g_failures;
      std::printf("FAIL criteria 5-6 runtime %.1f s over budget %.0f s\n", secs, kLlnSeconds);
    }
  }
  {
    const auto t0 = std::chrono::steady_clock::now();
    criterion(7, "CLT covariance", 0.0, clt_covariances);
    criterion(8, "Gaussianity diagnostics", 0.0, gaussianity);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > kCltSeconds) {
      ++g_failures;
      std::printf("FAIL criteria 7-8 runtime %.1f s over budget %.0f s\n", secs, kCltSeconds);
    }
  }
  criterion(9, "centered variant", 0.0, centered_variant);
  criterion(10, "determinism across worker counts", 0.0, determinism);
  std::printf("%s: %d criteria failed\n", g_failures == 0 ? "ACCEPTED" : "REJECTED", g_failures);
  return g_failures == 0 ? 0 : 1;
}
