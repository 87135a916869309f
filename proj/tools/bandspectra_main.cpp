// bandspectra command line: lln | clt | oracle | limits | partitions audit.
//
// Exit codes: 0 pass, 1 acceptance failure, 2 configuration error,
// 3 numerical error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bandspectra/config.hpp"
#include "bandspectra/error.hpp"
#include "bandspectra/experiments.hpp"
#include "bandspectra/limits.hpp"
#include "bandspectra/partitions.hpp"
#include "bandspectra/report.hpp"

namespace {

using namespace bandspectra;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> workers;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "JSON experiment configuration");
  cmd->add_option("--seed", opts.seed, "master seed (overrides the config)");
  cmd->add_option("--out", opts.out, "output directory (overrides the config)");
  cmd->add_option("--workers", opts.workers, "worker threads (overrides the config)");
}

ExperimentConfig resolve(const CommonOptions& opts) {
  ExperimentConfig config = opts.config_path.empty() ? ExperimentConfig{} : load_config(opts.config_path);
  if (opts.seed) config.seed = *opts.seed;
  if (opts.out) config.out = *opts.out;
  if (opts.workers) config.workers = *opts.workers;
  return config;
}

int run(ExperimentKind kind, const CommonOptions& opts) {
  const ExperimentConfig config = resolve(opts);
  for (const auto& w : validate(config, kind).warnings) std::cerr << "warning: " << w << "\n";
  const ExperimentReport report = run_experiment(kind, config);
  emit_reports(report, config.out);
  std::size_t failed = 0;
  for (const auto& row : report.rows) {
    if (row.pass && !*row.pass) {
      ++failed;
      std::cout << "FAIL " << row.experiment << " p=" << row.p << " n=" << row.n << " b=" << row.b << " k=" << row.k
                << (row.l.empty() ? "" : " l=" + row.l) << " sample=" << row.sample_value
                << " target=" << row.target_value << " z=" << row.z << "\n";
    }
  }
  std::cout << experiment_name(kind) << ": " << report.rows.size() << " rows, " << failed << " failed; reports in "
            << config.out << "\n";
  return report.passed() ? kExitPass : kExitFail;
}

int run_limits(const CommonOptions& opts, int max_order) {
  const ExperimentConfig config = resolve(opts);
  const LimitTable table = build_limit_table(config.model, max_order);
  std::filesystem::create_directories(config.out);
  const auto path = std::filesystem::path(config.out) / "limits.csv";
  std::ofstream os(path);
  if (!os) throw Error("cannot open '" + path.string() + "' for writing");
  write_limit_csv(table, os);
  const PsdCheck psd = check_clt_psd(table);
  std::cout << config.model.describe() << "\n";
  for (int k = 1; k <= max_order; ++k) std::cout << "nu moment " << k << ": " << table.nu_moments[k - 1] << "\n";
  std::cout << "CLT covariance min eigenvalue: " << psd.min_eigenvalue << (psd.passed ? " (PSD)" : " (NOT PSD)")
            << "\nwrote " << path.string() << "\n";
  return psd.passed ? kExitPass : kExitFail;
}

int run_audit(int k, bool allow_large) {
  const AuditReport report = audit_join_bounds(k, allow_large);
  std::cout << "k=" << k << " matchings=" << report.matchings << " candidates=" << report.candidates
            << " triples=" << report.triples_checked << " violations=" << report.violations << "\n";
  for (const auto& detail : report.violation_details) std::cout << "  " << detail << "\n";
  return report.violations == 0 ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Banded covariance spectra: limits, Monte Carlo checks and exact oracle"};
  app.require_subcommand(1);

  CommonOptions lln_opts, clt_opts, oracle_opts, limits_opts;
  auto* lln = app.add_subcommand("lln", "law of large numbers: moments, variance trend and spectra");
  add_common(lln, lln_opts);
  auto* clt = app.add_subcommand("clt", "central limit theorem: covariance of scaled trace powers");
  add_common(clt, clt_opts);
  auto* oracle = app.add_subcommand("oracle", "exact trace cumulants versus Monte Carlo at tiny sizes");
  add_common(oracle, oracle_opts);
  auto* limits = app.add_subcommand("limits", "write the limit table (limits.csv) for the configured model");
  add_common(limits, limits_opts);
  int max_order = 5;
  limits->add_option("--k", max_order, "largest trace power")->check(CLI::Range(1, 8));

  auto* partitions = app.add_subcommand("partitions", "set-partition utilities");
  partitions->require_subcommand(1);
  auto* audit = partitions->add_subcommand("audit", "exhaustive check of the join-count bounds");
  int audit_k = 4;
  bool allow_large = false;
  audit->add_option("--k", audit_k, "number of trace factors")->required();
  audit->add_flag("--allow-large", allow_large, "permit k = 5 (slow)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }

  try {
    if (*lln) return run(ExperimentKind::Lln, lln_opts);
    if (*clt) return run(ExperimentKind::Clt, clt_opts);
    if (*oracle) return run(ExperimentKind::Oracle, oracle_opts);
    if (*limits) return run_limits(limits_opts, max_order);
    if (*audit) return run_audit(audit_k, allow_large);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const CapacityError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}
