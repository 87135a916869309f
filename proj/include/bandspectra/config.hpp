#pragma once

// Experiment configuration: JSON ingestion, defaults and validation.
//
// Keys (all optional unless noted):
//   model.kernel         {"0": 1, "1": 0.5} or [[0, 1], [1, 0.5]]   (default impulse)
//   model.driver         {"family": "gaussian", "scale": 1} or
//                        {"family": "custom", "cumulants": [0, 1, 0, -2]}
//   sizes                [{"p": 512, "n": 4096, "b": 16, "replicas": 8}, ...]
//                        n defaults to 8p, b to ceil(sqrt(p) / 2)
//   k_list               [1, 2, 3]
//   replicas             per-size default
//   seed                 unsigned 64-bit integer
//   bins                 histogram bins (default 40)
//   out, workers
//   trend_checks         compare statistics along the size schedule
//   spectrum_replicas    replicas per size whose eigenvalues are computed
//   centered             also measure the centered-estimator perturbation
//   orders               oracle order tuples, e.g. [[1], [2], [1, 1], [2, 1]]
//   allow_large          raise the oracle caps
//   tolerances           {"lln_rel": 0.05, "clt_z": 3, "clt_rel": 0.1,
//                         "degenerate_floor": 0.05, "shape_z": 4,
//                         "oracle_z": 4, "support_mass": 0.95,
//                         "support_radius": 0.2, "centered_spread": 3}

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "bandspectra/process.hpp"

namespace bandspectra {

enum class ExperimentKind { Lln, Clt, Oracle };

std::string_view experiment_name(ExperimentKind kind) noexcept;

struct SizeSpec {
  std::size_t p = 0;
  std::size_t n = 0;
  std::size_t b = 0;
  std::size_t replicas = 0;  // 0: use ExperimentConfig::replicas
};

struct Tolerances {
  double lln_rel = 0.05;
  double clt_z = 3.0;
  double clt_rel = 0.10;
  double degenerate_floor = 0.05;
  double shape_z = 4.0;
  double oracle_z = 4.0;
  double support_mass = 0.95;
  double support_radius = 0.2;
  double centered_spread = 3.0;
};

inline constexpr std::size_t kMaxTracePower = 5;
inline constexpr std::size_t kMinCltReplicas = 200;
inline constexpr std::size_t kMinOracleReplicas = 100;
inline constexpr double kBandRatioWarning = 0.1;

struct ExperimentConfig {
  ProcessModel model{Kernel::impulse(), DriverSpec::gaussian()};
  std::vector<SizeSpec> sizes;
  std::vector<int> k_list{1, 2, 3};
  std::size_t replicas = 8;
  std::uint64_t seed = 1;
  std::size_t bins = 40;
  std::string out = "out";
  std::size_t workers = 1;
  bool trend_checks = false;
  std::size_t spectrum_replicas = std::numeric_limits<std::size_t>::max();
  bool centered = false;
  std::vector<std::vector<int>> orders{{1}, {2}, {1, 1}, {2, 1}};
  bool allow_large = false;
  Tolerances tolerances;

  std::size_t replicas_for(const SizeSpec& size) const noexcept { return size.replicas ? size.replicas : replicas; }
  int max_k() const;
  /// Effective configuration as pretty-printed JSON (used in the manifest).
  std::string to_json() const;
};

/// Throws ConfigError on malformed JSON, unknown keys or bad types.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

struct Validation {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const noexcept { return errors.empty(); }
};

Validation validate(const ExperimentConfig& config, ExperimentKind kind);
/// Throws ConfigError listing every violation.
void require_valid(const ExperimentConfig& config, ExperimentKind kind);

}  // namespace bandspectra
