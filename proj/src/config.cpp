#include "bandspectra/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "bandspectra/error.hpp"

namespace bandspectra {

using nlohmann::json;

std::string_view experiment_name(ExperimentKind kind) noexcept {
  switch (kind) {
    case ExperimentKind::Lln: return "lln";
    case ExperimentKind::Clt: return "clt";
    case ExperimentKind::Oracle: return "oracle";
  }
  return "unknown";
}

int ExperimentConfig::max_k() const {
  int k = 0;
  for (int v : k_list) k = std::max(k, v);
  return k;
}

namespace {

void reject_unknown(const json& object, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : object.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <class T>
T get_as(const json& value, const std::string& key) {
  try {
    return value.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("bad value for '" + key + "': " + e.what());
  }
}

std::size_t get_count(const json& value, const std::string& key) {
  if (!value.is_number_integer() || value.get<long long>() < 0) {
    throw ConfigError("'" + key + "' must be a non-negative integer");
  }
  return value.get<std::size_t>();
}

Kernel parse_kernel(const json& j) {
  std::vector<std::pair<long, double>> pairs;
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      std::size_t used = 0;
      long offset = 0;
      try {
        offset = std::stol(key, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != key.size()) throw ConfigError("kernel offset '" + key + "' is not an integer");
      pairs.emplace_back(offset, get_as<double>(value, "model.kernel"));
    }
  } else if (j.is_array()) {
    for (const auto& entry : j) {
      if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number_integer()) {
        throw ConfigError("kernel entries must be [offset, coefficient] pairs");
      }
      pairs.emplace_back(entry[0].get<long>(), get_as<double>(entry[1], "model.kernel"));
    }
  } else {
    throw ConfigError("model.kernel must be an object or an array of pairs");
  }
  std::sort(pairs.begin(), pairs.end());
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    if (pairs[i].first == pairs[i - 1].first) throw ConfigError("duplicate kernel offset");
  }
  try {
    return Kernel::from_pairs(pairs);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("model.kernel: ") + e.what());
  }
}

DriverSpec parse_driver(const json& j) {
  if (!j.is_object()) throw ConfigError("model.driver must be an object");
  reject_unknown(j, {"family", "scale", "cumulants"}, "model.driver");
  const std::string family_text = j.contains("family") ? get_as<std::string>(j["family"], "family") : "gaussian";
  DriverFamily family;
  try {
    family = parse_family(family_text);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (family == DriverFamily::Custom) {
    if (!j.contains("cumulants")) throw ConfigError("custom driver needs 'cumulants'");
    if (j.contains("scale")) throw ConfigError("custom driver takes no 'scale'");
    try {
      return DriverSpec::custom(get_as<std::vector<double>>(j["cumulants"], "cumulants"));
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  }
  if (j.contains("cumulants")) throw ConfigError("'cumulants' is only valid for the custom family");
  const double scale = j.contains("scale") ? get_as<double>(j["scale"], "scale") : 1.0;
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ConfigError("driver scale must be positive and finite");
  return DriverSpec::named(family, scale);
}

SizeSpec parse_size(const json& j) {
  if (!j.is_object()) throw ConfigError("sizes entries must be objects");
  reject_unknown(j, {"p", "n", "b", "replicas"}, "sizes");
  if (!j.contains("p")) throw ConfigError("every size needs 'p'");
  SizeSpec s;
  s.p = get_count(j["p"], "p");
  s.n = j.contains("n") ? get_count(j["n"], "n") : 8 * s.p;
  s.b = j.contains("b") ? get_count(j["b"], "b")
                        : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(s.p)) / 2.0));
  if (j.contains("replicas")) s.replicas = get_count(j["replicas"], "replicas");
  return s;
}

Tolerances parse_tolerances(const json& j) {
  if (!j.is_object()) throw ConfigError("tolerances must be an object");
  Tolerances t;
  const std::map<std::string, double*> fields{
      {"lln_rel", &t.lln_rel},         {"clt_z", &t.clt_z},
      {"clt_rel", &t.clt_rel},         {"degenerate_floor", &t.degenerate_floor},
      {"shape_z", &t.shape_z},         {"oracle_z", &t.oracle_z},
      {"support_mass", &t.support_mass}, {"support_radius", &t.support_radius},
      {"centered_spread", &t.centered_spread}};
  for (const auto& [key, value] : j.items()) {
    auto it = fields.find(key);
    if (it == fields.end()) throw ConfigError("unknown key '" + key + "' in tolerances");
    *it->second = get_as<double>(value, key);
  }
  return t;
}

json kernel_json(const Kernel& kernel) {
  json out = json::array();
  for (long s = kernel.min_offset(); s <= kernel.max_offset(); ++s) {
    if (kernel(s) != 0.0) out.push_back({s, kernel(s)});
  }
  return out;
}

json driver_json(const DriverSpec& driver) {
  json out{{"family", std::string(family_name(driver.family()))}};
  if (driver.family() == DriverFamily::Custom) {
    out["cumulants"] = driver.cumulants();
  } else {
    out["scale"] = driver.scale();
  }
  return out;
}

}  // namespace

std::string ExperimentConfig::to_json() const {
  json j;
  j["model"] = {{"kernel", kernel_json(model.kernel())}, {"driver", driver_json(model.driver())}};
  j["sizes"] = json::array();
  for (const auto& s : sizes) j["sizes"].push_back({{"p", s.p}, {"n", s.n}, {"b", s.b}, {"replicas", replicas_for(s)}});
  j["k_list"] = k_list;
  j["replicas"] = replicas;
  j["seed"] = seed;
  j["bins"] = bins;
  j["out"] = out;
  j["workers"] = workers;
  j["trend_checks"] = trend_checks;
  if (spectrum_replicas != std::numeric_limits<std::size_t>::max()) j["spectrum_replicas"] = spectrum_replicas;
  j["centered"] = centered;
  j["orders"] = orders;
  j["allow_large"] = allow_large;
  j["tolerances"] = {{"lln_rel", tolerances.lln_rel},
                     {"clt_z", tolerances.clt_z},
                     {"clt_rel", tolerances.clt_rel},
                     {"degenerate_floor", tolerances.degenerate_floor},
                     {"shape_z", tolerances.shape_z},
                     {"oracle_z", tolerances.oracle_z},
                     {"support_mass", tolerances.support_mass},
                     {"support_radius", tolerances.support_radius},
                     {"centered_spread", tolerances.centered_spread}};
  return j.dump(2);
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j,
                 {"model", "sizes", "k_list", "replicas", "seed", "bins", "out", "workers", "trend_checks",
                  "spectrum_replicas", "centered", "orders", "allow_large", "tolerances"},
                 "config");
  ExperimentConfig c;
  if (j.contains("model")) {
    const json& m = j["model"];
    if (!m.is_object()) throw ConfigError("model must be an object");
    reject_unknown(m, {"kernel", "driver"}, "model");
    Kernel kernel = m.contains("kernel") ? parse_kernel(m["kernel"]) : Kernel::impulse();
    DriverSpec driver = m.contains("driver") ? parse_driver(m["driver"]) : DriverSpec::gaussian();
    c.model = ProcessModel(std::move(kernel), std::move(driver));
  }
  if (j.contains("sizes")) {
    if (!j["sizes"].is_array()) throw ConfigError("sizes must be an array");
    for (const auto& s : j["sizes"]) c.sizes.push_back(parse_size(s));
  }
  if (j.contains("k_list")) c.k_list = get_as<std::vector<int>>(j["k_list"], "k_list");
  if (j.contains("replicas")) c.replicas = get_count(j["replicas"], "replicas");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0)) {
      throw ConfigError("'seed' must be an unsigned 64-bit integer");
    }
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("bins")) c.bins = get_count(j["bins"], "bins");
  if (j.contains("out")) c.out = get_as<std::string>(j["out"], "out");
  if (j.contains("workers")) c.workers = get_count(j["workers"], "workers");
  if (j.contains("trend_checks")) c.trend_checks = get_as<bool>(j["trend_checks"], "trend_checks");
  if (j.contains("spectrum_replicas")) c.spectrum_replicas = get_count(j["spectrum_replicas"], "spectrum_replicas");
  if (j.contains("centered")) c.centered = get_as<bool>(j["centered"], "centered");
  if (j.contains("orders")) c.orders = get_as<std::vector<std::vector<int>>>(j["orders"], "orders");
  if (j.contains("allow_large")) c.allow_large = get_as<bool>(j["allow_large"], "allow_large");
  if (j.contains("tolerances")) c.tolerances = parse_tolerances(j["tolerances"]);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

Validation validate(const ExperimentConfig& c, ExperimentKind kind) {
  Validation v;
  auto error = [&](std::string msg) { v.errors.push_back(std::move(msg)); };
  if (c.sizes.empty()) error("sizes must be non-empty");
  if (kind != ExperimentKind::Oracle) {
    if (c.k_list.empty()) error("k_list must be non-empty");
    for (int k : c.k_list) {
      if (k < 1 || static_cast<std::size_t>(k) > kMaxTracePower) {
        error("k_list values must lie in [1, " + std::to_string(kMaxTracePower) + "]");
        break;
      }
    }
  }
  if (c.workers < 1) error("workers must be >= 1");
  if (c.bins < 1) error("bins must be >= 1");
  for (std::size_t i = 0; i < c.sizes.size(); ++i) {
    const SizeSpec& s = c.sizes[i];
    const std::string where = "size " + std::to_string(i) + " (p=" + std::to_string(s.p) + ", n=" +
                              std::to_string(s.n) + ", b=" + std::to_string(s.b) + ")";
    if (s.p < 1) error(where + ": p must be >= 1");
    if (s.n < 1) error(where + ": n must be >= 1");
    if (kind != ExperimentKind::Oracle && (s.b < 1 || s.b > s.p)) error(where + ": need 1 <= b <= p");
    if (kind == ExperimentKind::Oracle && s.b > s.p) error(where + ": need b <= p");
    const std::size_t reps = c.replicas_for(s);
    if (reps < 1) error(where + ": replicas must be >= 1");
    if (kind == ExperimentKind::Clt && reps < kMinCltReplicas) {
      error(where + ": CLT runs need at least " + std::to_string(kMinCltReplicas) + " replicas");
    }
    if (kind == ExperimentKind::Oracle && reps < kMinOracleReplicas) {
      error(where + ": oracle checks need at least " + std::to_string(kMinOracleReplicas) + " replicas");
    }
    if (kind == ExperimentKind::Clt && s.n > 0 && static_cast<double>(s.b) / static_cast<double>(s.n) > kBandRatioWarning) {
      v.warnings.push_back(where + ": b/n exceeds " + std::to_string(kBandRatioWarning));
    }
    if (c.centered && s.n < 2) error(where + ": the centered estimator needs n >= 2");
    if (c.trend_checks && i > 0 && s.p <= c.sizes[i - 1].p) error("trend checks need sizes strictly increasing in p");
  }
  if (kind == ExperimentKind::Oracle) {
    if (c.orders.empty()) error("orders must be non-empty");
    for (const auto& order : c.orders) {
      if (order.empty() || order.size() > 3) error("oracle orders need 1 to 3 trace powers");
      for (int k : order) {
        if (k < 1) error("oracle trace powers must be >= 1");
      }
    }
  }
  return v;
}

void require_valid(const ExperimentConfig& config, ExperimentKind kind) {
  const Validation v = validate(config, kind);
  if (v.ok()) return;
  std::string msg = "invalid configuration:";
  for (const auto& e : v.errors) msg += "\n  - " + e;
  throw ConfigError(msg);
}

}  // namespace bandspectra
