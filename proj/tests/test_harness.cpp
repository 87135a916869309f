#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bandspectra/config.hpp"
#include "bandspectra/error.hpp"
#include "bandspectra/experiments.hpp"
#include "bandspectra/report.hpp"
#include "bandspectra/stats.hpp"

using namespace bandspectra;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("bandspectra_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const char* kSmallLln = R"({
  "model": {"kernel": {"0": 1, "1": 0.5}, "driver": {"family": "rademacher"}},
  "sizes": [{"p": 24, "n": 96, "b": 3}, {"p": 48, "n": 192, "b": 4}],
  "replicas": 12, "seed": 7, "trend_checks": true, "bins": 12
})";

int run_cli(const std::string& args) {
  const std::string cmd = std::string(BANDSPECTRA_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("config parsing and defaults") {
    const ExperimentConfig c = parse_config(R"({"sizes": [{"p": 64}], "model": {"kernel": [[0, 1], [2, 0.25]]}})");
    REQUIRE(c.sizes.size() == 1);
    CHECK(c.sizes[0].n == 512);
    CHECK(c.sizes[0].b == 4);
    CHECK(c.replicas_for(c.sizes[0]) == 8);
    CHECK(c.model.kernel().max_offset() == 2);
    CHECK(c.model.kernel()(1) == 0.0);
    CHECK(parse_config(c.to_json()).to_json() == c.to_json());
    CHECK_THROWS_AS(parse_config(R"({"sizes": [], "bogus": 1})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"sizes": [{"n": 3}]})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"model": {"driver": {"family": "cauchy"}}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"model": {"driver": {"family": "custom"}}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"model": {"driver": {"family": "gaussian", "scale": -1}}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"model": {"kernel": {"0": 0}}})"), ConfigError);
    CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
  }

  TEST_CASE("shipped configurations are valid") {
    const fs::path dir = BANDSPECTRA_CONFIG_DIR;
    CHECK(validate(load_config((dir / "lln_ma1.json").string()), ExperimentKind::Lln).ok());
    CHECK(validate(load_config((dir / "clt_white.json").string()), ExperimentKind::Clt).ok());
    CHECK(validate(load_config((dir / "oracle_tiny.json").string()), ExperimentKind::Oracle).ok());
  }

  TEST_CASE("validation") {
    ExperimentConfig c = parse_config(R"({"sizes": [{"p": 16, "n": 20, "b": 4}]})");
    CHECK(validate(c, ExperimentKind::Lln).ok());
    CHECK_FALSE(validate(c, ExperimentKind::Clt).ok());  // too few replicas
    c.replicas = 200;
    const Validation v = validate(c, ExperimentKind::Clt);
    CHECK(v.ok());
    CHECK(v.warnings.size() == 1);  // b / n = 0.2
    c.sizes[0].b = 0;
    CHECK_FALSE(validate(c, ExperimentKind::Lln).ok());
    c.replicas = 100;
    CHECK(validate(c, ExperimentKind::Oracle).ok());
    c.orders = {{1, 1, 1, 1}};
    CHECK_FALSE(validate(c, ExperimentKind::Oracle).ok());
    ExperimentConfig t = parse_config(R"({"sizes": [{"p": 16}, {"p": 16}], "trend_checks": true})");
    CHECK_FALSE(validate(t, ExperimentKind::Lln).ok());
    CHECK_THROWS_AS(require_valid(t, ExperimentKind::Lln), ConfigError);
    t.k_list = {6};
    t.trend_checks = false;
    CHECK_FALSE(validate(t, ExperimentKind::Lln).ok());
  }

  TEST_CASE("parallel_for") {
    std::vector<int> hit(50, 0);
    parallel_for(50, 4, [&](std::size_t i) { hit[i] += 1; });
    for (int h : hit) CHECK(h == 1);
    try {
      parallel_for(40, 3, [](std::size_t i) {
        if (i == 7 || i == 31) throw std::runtime_error(std::to_string(i));
      });
      FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()) == "7");
    }
  }

  TEST_CASE("output is independent of the worker count") {
    ExperimentConfig c = parse_config(kSmallLln);
    c.workers = 1;
    const ExperimentReport a = run_lln(c);
    c.workers = 3;
    const ExperimentReport b = run_lln(c);
    const fs::path da = scratch_dir("w1");
    const fs::path db = scratch_dir("w3");
    emit_reports(a, da);
    emit_reports(b, db);
    for (const char* f : {"summary.csv", "histograms.tsv", "histograms_p24.tsv", "histograms_p48.tsv", "spectrum.svg"}) {
      CAPTURE(f);
      CHECK(fs::exists(da / f));
      CHECK(slurp(da / f) == slurp(db / f));
    }
    CHECK(fs::exists(da / "manifest.txt"));
    const std::string summary = slurp(da / "summary.csv");
    CHECK(summary.rfind("experiment,p,n,b,k,l,sample_value,target_value,se,z,pass\n", 0) == 0);
    CHECK(summary.find("lln_moment,24,96,3,2,") != std::string::npos);
    CHECK(summary.find("lln_variance_trend") != std::string::npos);
    CHECK(slurp(da / "histograms.tsv").rfind("bin_left\tbin_right\tempirical_mass\treference_mass\n", 0) == 0);
  }

  TEST_CASE("single size without trend checks") {
    ExperimentConfig c = parse_config(R"({"sizes": [{"p": 20, "n": 80, "b": 2}], "replicas": 3, "k_list": [1]})");
    const ExperimentReport r = run_lln(c);
    for (const auto& row : r.rows) CHECK(row.experiment.find("trend") == std::string::npos);
    REQUIRE(r.lln.size() == 1);
    CHECK(r.lln[0].moment_mean.size() == 1);
    // White noise: p^-1 tr Y has mean exactly 1.
    CHECK(std::abs(r.lln[0].moment_mean[0] - 1.0) < 0.05);
  }

  TEST_CASE("point-mass spectrum renders") {
    ExperimentConfig c = parse_config(R"({"sizes": [{"p": 30, "n": 60, "b": 1}], "replicas": 2,
      "model": {"driver": {"family": "rademacher"}}, "k_list": [1, 2]})");
    const ExperimentReport r = run_lln(c);
    REQUIRE(r.spectra.size() == 1);
    std::ostringstream svg;
    write_spectrum_svg(&r.spectra[0], svg);
    CHECK(svg.str().find("<svg") != std::string::npos);
    std::ostringstream empty;
    write_spectrum_svg(nullptr, empty);
    CHECK(empty.str().find("<svg") != std::string::npos);
    ExperimentReport none;
    std::ostringstream csv;
    write_summary_csv(none, csv);
    CHECK(csv.str() == "experiment,p,n,b,k,l,sample_value,target_value,se,z,pass\n");
  }

  TEST_CASE("replicas are independent") {
    // Batch means of p^-1 tr Y over disjoint replica groups must scatter like
    // independent draws: their variance matches the per-replica variance / group size.
    const ExperimentConfig c = parse_config(R"({"sizes": [{"p": 16, "n": 32, "b": 2}],
      "model": {"kernel": {"0": 1, "1": 0.5}}})");
    const std::size_t groups = 40, per = 25;
    std::vector<double> all, means;
    for (std::size_t g = 0; g < groups; ++g) {
      double s = 0.0;
      for (std::size_t i = 0; i < per; ++i) {
        const auto tr = replica_trace_powers(c.model, c.sizes[0], 1, replica_stream(3, StreamTag::Lln, 0, g * per + i));
        all.push_back(tr[0]);
        s += tr[0];
      }
      means.push_back(s / per);
    }
    const double expected = sample_variance(all) / per;
    const double observed = sample_variance(means);
    // Var of a sample variance over 40 near-normal values is about 2 sigma^4 / 39.
    const double se = expected * std::sqrt(2.0 / (groups - 1));
    CHECK(std::abs(observed - expected) < 4.0 * se);
    CHECK(replica_stream(3, StreamTag::Lln, 0, 1).key() != replica_stream(3, StreamTag::Clt, 0, 1).key());
  }

  TEST_CASE("oracle experiment") {
    const ExperimentConfig c = parse_config(R"({"sizes": [{"p": 3, "n": 2, "b": 1}], "replicas": 2000,
      "model": {"kernel": {"0": 1, "1": 0.5}, "driver": {"family": "uniform"}}, "orders": [[1], [2], [1, 1]]})");
    const ExperimentReport r = run_oracle_check(c);
    CHECK(r.oracle.size() == 3);
    CHECK(r.passed());
    for (const auto& row : r.rows) CHECK(row.experiment == "oracle_cumulant");
  }

  TEST_CASE("command line exit codes") {
    const fs::path dir = scratch_dir("cli");
    {
      std::ofstream bad(dir / "bad.json");
      bad << R"({"sizes": [{"p": 8, "b": 0}]})";
      std::ofstream unknown(dir / "unknown.json");
      unknown << R"({"colour": 1})";
      std::ofstream good(dir / "good.json");
      good << R"({"sizes": [{"p": 200, "n": 1600, "b": 7}], "replicas": 2, "k_list": [1],
                 "model": {"kernel": {"0": 1, "1": 0.5}}})";
      // White noise at p = 12 is far from its point-mass limit: an acceptance failure.
      std::ofstream small(dir / "small.json");
      small << R"({"sizes": [{"p": 12, "n": 48, "b": 2}], "replicas": 2, "k_list": [1]})";
    }
    CHECK(run_cli("lln --config " + (dir / "bad.json").string() + " --out " + (dir / "o1").string()) == 2);
    CHECK(run_cli("lln --config " + (dir / "unknown.json").string()) == 2);
    CHECK(run_cli("lln --config " + (dir / "missing.json").string()) == 2);
    CHECK(run_cli("partitions audit --k 2") == 0);
    CHECK(run_cli("partitions audit --k 5") == 2);
    CHECK(run_cli("lln --config " + (dir / "good.json").string() + " --out " + (dir / "o2").string()) == 0);
    CHECK(fs::exists(dir / "o2" / "summary.csv"));
    CHECK(run_cli("lln --config " + (dir / "small.json").string() + " --out " + (dir / "o4").string()) == 1);
    CHECK(run_cli("limits --config " + (dir / "good.json").string() + " --out " + (dir / "o3").string()) == 0);
    CHECK(fs::exists(dir / "o3" / "limits.csv"));
  }
}
