#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "chainbreak/experiments.hpp"
#include "chainbreak/io.hpp"

using namespace chainbreak;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("chainbreak_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  std::string str(const std::string& name = "") const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliRun {
  int status = -1;
  std::string out;
  std::string err;
};

CliRun run_cli(const std::string& args, const TempDir& dir, const std::string& env = "") {
  const auto out = dir.str("stdout.txt"), err = dir.str("stderr.txt");
  const std::string cmd = env + " \"" CHAINBREAK_CLI "\" " + args + " >" + out + " 2>" + err;
  const int raw = std::system(cmd.c_str());
  CliRun r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

ExperimentConfig quiet_config(const TempDir& dir) {
  ExperimentConfig cfg;
  cfg.output_dir = dir.str();
  return cfg;
}

}  // namespace

TEST(Chainlen, StaircaseFreeSlopeIsRecoveredExactly) {
  TempDir dir;
  auto cfg = quiet_config(dir);
  cfg.chain_model = {0.2, 1.0, 0};
  const auto r = run_chainlen(cfg, false);
  EXPECT_NEAR(r.fit.slope, 0.2, 1e-9);
  EXPECT_NEAR(r.fit.intercept, 1.0, 1e-9);
  EXPECT_NEAR(r.fit.r_squared, 1.0, 1e-12);
}

TEST(Chainlen, DefaultSlopeWithinStandardErrors) {
  TempDir dir;
  auto cfg = quiet_config(dir);
  const auto plain = run_chainlen(cfg, false);
  EXPECT_NEAR(plain.fit.slope, 0.122, 3 * plain.fit.slope_stderr);
  EXPECT_GT(plain.fit.r_squared, 0.99);
  cfg.chain_model.jitter = 2;
  const auto jittered = run_chainlen(cfg, false);
  EXPECT_NEAR(jittered.fit.slope, 0.122, 3 * jittered.fit.slope_stderr);
}

TEST(Chainlen, WritesCurveAndFit) {
  TempDir dir;
  const auto r = run_chainlen(quiet_config(dir));
  const auto table = read_csv_file(dir.path() / "chainlen.csv");
  EXPECT_EQ(table.header, (std::vector<std::string>{"L", "mean_chain_len"}));
  EXPECT_EQ(table.rows.size(), 20u);
  const auto j = read_json_file(dir.path() / "chainlen_fit.json");
  EXPECT_EQ(j.at("slope").get<double>(), r.fit.slope);
}

TEST(CbfCurve, MarginSourceMatchesPredictionWithinBinomialError) {
  TempDir dir;
  auto cfg = quiet_config(dir);
  const auto r = run_cbf_curve(cfg);
  const auto Ls = r.curve.numeric_column("L");
  const auto obs = r.curve.numeric_column("cbf_obs");
  const auto pred = r.curve.numeric_column("cbf_pred");
  for (std::size_t i = 0; i < Ls.size(); ++i) {
    const double n = static_cast<double>(cfg.reads) * Ls[i];
    const double se = std::sqrt(std::max(pred[i] * (1 - pred[i]), 1e-12) / n);
    EXPECT_NEAR(obs[i], pred[i], 3 * se + 1e-12) << "L=" << Ls[i];
  }
  EXPECT_TRUE(fs::exists(dir.path() / "cbf_curve.csv"));
  EXPECT_EQ(detail::read_lengths_json(dir.path() / "cbf_lengths.json"), r.lengths);
}

TEST(CbfCurve, LargeChainStrengthGivesNoBreaks) {
  TempDir dir;
  auto cfg = quiet_config(dir);
  cfg.k = 1000.0;
  cfg.reads = 200;
  for (double v : run_cbf_curve(cfg, false).curve.numeric_column("cbf_obs")) EXPECT_EQ(v, 0.0);
}

TEST(CbfCurve, SyntheticSourceRuns) {
  TempDir dir;
  auto cfg = quiet_config(dir);
  cfg.cbf_source = CbfSource::synthetic;
  cfg.L_sweep = {5, 10, 5};
  cfg.reads = 20;
  cfg.schedule.sweeps = 50;
  cfg.k = 0.05;
  const auto r = run_cbf_curve(cfg, false);
  ASSERT_EQ(r.curve.rows.size(), 2u);
  for (double v : r.curve.numeric_column("cbf_obs")) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Fit, ReproRecoversGeneratingParameters) {
  TempDir dir;
  auto cfg = quiet_config(dir);
  cfg.reads = 20000;
  cfg.kstar.reads = 2000;
  const auto r = run_repro(cfg);
  ASSERT_EQ(r.fit.fits.size(), 1u);
  const auto& f = r.fit.fits[0];
  EXPECT_NEAR(f.sigma_h, 0.06, 0.005 + 1e-12);
  EXPECT_NEAR(f.sigma_c, 0.005, 0.005 + 1e-12);
  EXPECT_NEAR(f.kappa, 0.35, 0.05 + 1e-12);
  for (const char* name : {"chainlen.csv", "chainlen_fit.json", "cbf_curve.csv", "cbf_lengths.json",
                           "observations.csv", "fit.json", "fit_table.csv", "kstar.csv", "kstar_empirical.csv",
                           "kstar_fit.csv"})
    EXPECT_TRUE(fs::exists(dir.path() / name)) << name;
  const auto back = read_json_file(dir.path() / "fit.json").get<FitResult>();
  EXPECT_EQ(back.kappa, f.kappa);
}

TEST(Fit, TemperatureColumnSplitsIntoIndependentFits) {
  TempDir dir;
  auto cfg = quiet_config(dir);
  CsvTable obs{{"L", "cbf_obs", "T"}, {}};
  for (double kappa : {0.35, 0.5}) {
    const CbpModel model{{0.06, 0.005, 0, 0}, kappa, 1.0};
    for (auto L : cfg.L_sweep.values())
      obs.add(L, cbf_predict(lengths_for(cfg, L), model), kappa == 0.35 ? "20" : "200");
  }
  write_csv_file(dir.path() / "obs.csv", obs);
  const auto r = run_fit(cfg, dir.path() / "obs.csv");
  ASSERT_EQ(r.labels, (std::vector<std::string>{"20", "200"}));
  EXPECT_EQ(r.fits[0].kappa, 0.35);
  EXPECT_EQ(r.fits[1].kappa, 0.5);
  EXPECT_TRUE(fs::exists(dir.path() / "fit_T20.json"));
  EXPECT_TRUE(fs::exists(dir.path() / "fit_table_T200.csv"));
  EXPECT_EQ(read_csv_file(dir.path() / "fit_by_T.csv").rows.size(), 2u);
}

TEST(Fit, MissingLengthEntryIsAnError) {
  TempDir dir;
  auto cfg = quiet_config(dir);
  write_text_file(dir.path() / "obs.csv", "L,cbf_obs\n5,0.1\n10,0.2\n15,0.3\n");
  write_text_file(dir.path() / "len.json", R"({"5": [2,2,2,2,2], "10": [3,3,3,3,3,3,3,3,3,3]})");
  EXPECT_THROW(run_fit(cfg, dir.path() / "obs.csv", dir.path() / "len.json", false), std::invalid_argument);
  write_text_file(dir.path() / "bad.csv", "L,cbf_obs\n5.5,0.1\n10,0.2\n15,0.3\n");
  EXPECT_THROW(run_fit(cfg, dir.path() / "bad.csv", std::nullopt, false), std::invalid_argument);
}

TEST(Kstar, AnalyticAndEmpiricalAgree) {
  TempDir dir;
  auto cfg = quiet_config(dir);
  cfg.kstar.reads = 200000;
  cfg.kstar.ell = {3, 30, 3};
  const auto r = run_kstar(cfg, false);
  const auto a = r.analytic.numeric_column("k_star");
  const auto e = r.empirical.numeric_column("k_star");
  ASSERT_EQ(a.size(), e.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(e[i], a[i], 0.03 * a[i]);
  for (const auto& [tau, f] : r.analytic_fits) {
    EXPECT_GE(f.exponent, 0.45);
    EXPECT_LE(f.exponent, 0.55);
  }
}

TEST(Kstar, CorrelatedPresetSteepensExponent) {
  TempDir dir;
  auto cfg = quiet_config(dir);
  cfg.kstar.correlated = true;
  cfg.kstar.empirical = false;
  const auto r = run_kstar(cfg, false);
  EXPECT_TRUE(r.empirical.rows.empty());
  for (const auto& [tau, f] : r.analytic_fits) {
    EXPECT_GE(f.exponent, 0.78);
    EXPECT_LE(f.exponent, 0.86);
  }
}

TEST(Heatmap, MonotoneInBothAxesAndContourTracksKstar) {
  TempDir dir;
  auto cfg = quiet_config(dir);
  cfg.reads = 4000;
  const auto r = run_heatmap(cfg);
  const auto ks = cfg.heatmap.ks();
  const auto cbf = r.grid.numeric_column("cbf_mean");
  const auto Ls = cfg.L_sweep.values();
  ASSERT_EQ(cbf.size(), Ls.size() * ks.size());
  for (std::size_t a = 0; a < Ls.size(); ++a)
    for (std::size_t b = 1; b < ks.size(); ++b) EXPECT_LE(cbf[a * ks.size() + b], cbf[a * ks.size() + b - 1]);
  // Chain length is nondecreasing in L, so the mean CBF grows with L up to noise.
  for (std::size_t b = 0; b < ks.size(); ++b)
    for (std::size_t a = 1; a < Ls.size(); ++a) {
      const double p = cbf[(a - 1) * ks.size() + b];
      const double se = std::sqrt(std::max(p * (1 - p), 1e-6) / (static_cast<double>(cfg.reads) * Ls[a - 1]));
      EXPECT_GE(cbf[a * ks.size() + b], p - 4 * se);
    }

  const auto contour = r.contour.numeric_column("k_star_empirical");
  const auto nm = cfg.effective_noise();
  for (std::size_t a = 0; a < Ls.size(); ++a) {
    const auto lens = lengths_for(cfg, Ls[a]);
    const CbpModel unit{nm, 1.0, 1.0};
    // k at which the analytic mean CBF reaches tau, by bisection.
    double lo = 1e-6, hi = 10.0;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      CbpModel m = unit;
      m.kappa = mid;
      (cbf_predict(lens, m) > cfg.heatmap.tau ? lo : hi) = mid;
    }
    EXPECT_NEAR(contour[a], hi, 0.05) << "L=" << Ls[a];
  }
  EXPECT_TRUE(fs::exists(dir.path() / "heatmap.csv"));
  EXPECT_TRUE(fs::exists(dir.path() / "heatmap_contour.csv"));
}

TEST(Heatmap, ContourCrossing) {
  const std::vector<double> ks{0.1, 0.2, 0.3};
  EXPECT_NEAR(contour_crossing(ks, std::vector<double>{0.5, 0.1, 0.0}, 0.3), 0.15, 1e-15);
  EXPECT_EQ(contour_crossing(ks, std::vector<double>{0.01, 0.0, 0.0}, 0.02), 0.1);
  EXPECT_TRUE(std::isnan(contour_crossing(ks, std::vector<double>{0.5, 0.4, 0.3}, 0.02)));
}

TEST(Bench, AllSolversAgreeAtSmallL) {
  TempDir dir;
  auto cfg = quiet_config(dir);
  cfg.bench.L = {5, 5, 1};
  cfg.bench.instances = 3;
  cfg.reads = 200;
  const auto t = run_bench(cfg);
  ASSERT_EQ(t.rows.size(), 9u);
  const auto e = t.numeric_column("E_min");
  for (std::size_t i = 0; i < 9; i += 3) {
    EXPECT_EQ(t.rows[i][1], "brute_force");
    EXPECT_NEAR(e[i + 1], e[i], 1e-9);
    EXPECT_NEAR(e[i + 2], e[i], 1e-9);
  }
  for (double s : t.numeric_column("seconds")) EXPECT_GE(s, 0.0);
  EXPECT_TRUE(fs::exists(dir.path() / "bench.csv"));
}

TEST(Bench, RejectsSizesBeyondBruteForce) {
  TempDir dir;
  auto cfg = quiet_config(dir);
  cfg.bench.L = {25, 25, 1};
  EXPECT_THROW(run_bench(cfg, false), std::invalid_argument);
}

TEST(Zephyr, WritesGraphFiles) {
  TempDir dir;
  const auto r = run_zephyr(2, 2, dir.path());
  EXPECT_EQ(r.graph.vertices.size(), 80u);
  EXPECT_EQ(slurp(dir.path() / "zephyr_2_2.edges"), slurp(CHAINBREAK_TEST_DATA "/zephyr_2_2.edges"));
  const auto hist = read_csv_file(dir.path() / "zephyr_2_2_degrees.csv");
  EXPECT_EQ(hist.header, (std::vector<std::string>{"degree", "count"}));
  EXPECT_EQ(read_json_file(dir.path() / "zephyr_2_2.json").get<ZephyrGraph>().edges, r.graph.edges);
}

TEST(Config, OverlayAndValidation) {
  ExperimentConfig cfg;
  apply_config_json(cfg, json::parse(R"({"reads": 50, "L_sweep": {"stop": 40}, "kstar": {"reads": 10},
                                          "noise_presets": {"20": {"sigma_h": 0.03, "sigma_c": 0.001}},
                                          "anneal_time": 20})"));
  EXPECT_EQ(cfg.reads, 50u);
  EXPECT_EQ(cfg.L_sweep.values().size(), 8u);
  EXPECT_EQ(cfg.kstar.reads, 10u);
  EXPECT_EQ(cfg.effective_noise().sigma_h, 0.03);
  cfg.anneal_time = "999";
  EXPECT_EQ(cfg.effective_noise().sigma_h, 0.06);

  ExperimentConfig other;
  EXPECT_THROW(apply_config_json(other, json::parse(R"({"raeds": 5})")), std::invalid_argument);
  EXPECT_THROW(apply_config_json(other, json::parse(R"({"kstar": {"bogus": 1}})")), std::invalid_argument);
  EXPECT_THROW(apply_config_json(other, json::parse(R"({"cbf_source": "hardware"})")), std::invalid_argument);
  other = {};
  other.taus = {0.0};
  EXPECT_THROW(other.validate(), std::invalid_argument);
  other = {};
  other.L_sweep = {10, 5, 1};
  EXPECT_THROW(other.validate(), std::invalid_argument);
}

TEST(Config, EmbeddingsFileOverridesSyntheticLengths) {
  TempDir dir;
  auto cfg = quiet_config(dir);
  write_text_file(dir.path() / "emb.json", R"({"5": {"chains": [[0,1],[2],[3,4,5],[6],[7]]}})");
  cfg.embeddings_file = dir.str("emb.json");
  EXPECT_EQ(lengths_for(cfg, 5), (std::vector<std::size_t>{2, 1, 3, 1, 1}));
  EXPECT_EQ(lengths_for(cfg, 10), synth_chain_lengths(10, cfg.chain_model, cfg.seed));
}

TEST(Determinism, SameSeedSameFiles) {
  TempDir a, b;
  auto ca = quiet_config(a), cb = quiet_config(b);
  ca.reads = cb.reads = 300;
  ca.kstar.reads = cb.kstar.reads = 1000;
  run_repro(ca);
  run_repro(cb);
  for (const char* name : {"cbf_curve.csv", "fit.json", "kstar_empirical.csv"})
    EXPECT_EQ(slurp(a.path() / name), slurp(b.path() / name)) << name;
  cb.seed = 2;
  EXPECT_NE(to_csv_string(run_cbf_curve(ca, false).curve), to_csv_string(run_cbf_curve(cb, false).curve));
}

TEST(Binary, ZephyrAndExitCodes) {
  TempDir dir;
  auto r = run_cli("zephyr 2 2 --out " + dir.str("z"), dir);
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("80 vertices"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir.path() / "z" / "zephyr_2_2.edges"));

  r = run_cli("", dir);
  EXPECT_NE(r.status, 0);
  r = run_cli("nonsense", dir);
  EXPECT_NE(r.status, 0);
  r = run_cli("zephyr 0 4 --out " + dir.str("z"), dir);
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("chainbreak: error:"), std::string::npos);
}

TEST(Binary, ConfigErrorsAreReported) {
  TempDir dir;
  write_text_file(dir.path() / "bad.json", R"({"unknown_key": 1})");
  auto r = run_cli("chainlen --config " + dir.str("bad.json") + " --out " + dir.str("o"), dir);
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("unknown_key"), std::string::npos);
  write_text_file(dir.path() / "broken.json", "{ not json");
  r = run_cli("chainlen --config " + dir.str("broken.json") + " --out " + dir.str("o"), dir);
  EXPECT_EQ(r.status, 1);
  r = run_cli("fit " + dir.str("missing.csv") + " --out " + dir.str("o"), dir);
  EXPECT_NE(r.status, 0);
  write_text_file(dir.path() / "big.json", R"({"bench": {"L_sweep": {"start": 30, "stop": 30}}})");
  r = run_cli("bench --config " + dir.str("big.json") + " --out " + dir.str("o"), dir);
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("brute-force"), std::string::npos);
}

TEST(Binary, PrecedenceDefaultsEnvConfigFlags) {
  TempDir dir;
  // Environment only.
  auto r = run_cli("chainlen", dir, "CHAINBREAK_OUT=" + dir.str("env"));
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir.path() / "env" / "chainlen.csv"));
  // Config beats environment.
  write_text_file(dir.path() / "cfg.json", "{\"out\": \"" + dir.str("cfg") + "\", \"reads\": 10}");
  r = run_cli("chainlen --config " + dir.str("cfg.json"), dir, "CHAINBREAK_OUT=" + dir.str("env2"));
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir.path() / "cfg" / "chainlen.csv"));
  EXPECT_FALSE(fs::exists(dir.path() / "env2"));
  // Flags beat config.
  r = run_cli("cbf-curve --config " + dir.str("cfg.json") + " --out " + dir.str("flag") + " --reads 7 --seed 3", dir);
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir.path() / "flag" / "cbf_curve.csv"));
  ExperimentConfig expect;
  expect.reads = 7;
  expect.seed = 3;
  EXPECT_EQ(slurp(dir.path() / "flag" / "cbf_curve.csv"), to_csv_string(run_cbf_curve(expect, false).curve));
}

TEST(Binary, FitAndKstarSubcommands) {
  TempDir dir;
  ExperimentConfig cfg = quiet_config(dir);
  CsvTable obs{{"L", "cbf_obs"}, {}};
  const CbpModel model{{0.06, 0.005, 0, 0}, 0.35, 1.0};
  for (auto L : cfg.L_sweep.values()) obs.add(L, cbf_predict(lengths_for(cfg, L), model));
  write_csv_file(dir.path() / "obs.csv", obs);
  auto r = run_cli("fit " + dir.str("obs.csv") + " --out " + dir.str("o"), dir);
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(r.out.rfind("sigma_h=0.06 sigma_c=0.005 kappa=0.35", 0), 0u) << r.out;

  r = run_cli("kstar --analytic-only --out " + dir.str("o"), dir);
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("analytic tau=0.02 exponent=0.5"), std::string::npos) << r.out;
  EXPECT_FALSE(fs::exists(dir.path() / "o" / "kstar_empirical.csv"));
}
