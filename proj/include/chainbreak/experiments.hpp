#pragma once

// Experiment pipelines behind the command-line tool.  Each run_* function is
// deterministic given its ExperimentConfig, returns its tables in memory and,
// when `write` is set, writes them under config.output_dir.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "chainbreak/analytics.hpp"
#include "chainbreak/csv.hpp"
#include "chainbreak/embedding.hpp"
#include "chainbreak/fitting.hpp"
#include "chainbreak/io.hpp"
#include "chainbreak/noise.hpp"
#include "chainbreak/problem.hpp"
#include "chainbreak/regression.hpp"
#include "chainbreak/rng.hpp"
#include "chainbreak/sampler.hpp"
#include "chainbreak/topology.hpp"

namespace chainbreak {

struct SweepRange {
  std::size_t start = 5;
  std::size_t stop = 100;
  std::size_t step = 5;

  void validate(const char* name) const {
    if (step == 0) throw std::invalid_argument(std::string(name) + ": step must be >= 1");
    if (start < 1) throw std::invalid_argument(std::string(name) + ": start must be >= 1");
    if (stop < start) throw std::invalid_argument(std::string(name) + ": sweep is empty (stop < start)");
  }

  std::vector<std::size_t> values() const {
    std::vector<std::size_t> v;
    for (std::size_t x = start; x <= stop; x += step) v.push_back(x);
    return v;
  }
};

/// sigma_h = 0.06, sigma_c = 0.005 plus a correlated term rho * l^1.64 that
/// dominates over l in [3, 30].
inline NoiseModel correlated_noise_preset() { return {0.06, 0.005, 0.05, 1.64}; }

enum class CbfSource { margin, synthetic };

struct KstarConfig {
  SweepRange ell{3, 30, 1};
  bool empirical = true;
  std::size_t reads = 100000;
  bool correlated = false;
};

struct HeatmapConfig {
  std::vector<double> k_values;  // empty: 0.05, 0.10, ..., 1.00
  double tau = 0.02;

  std::vector<double> ks() const {
    if (!k_values.empty()) return k_values;
    return GridRange{0.05, 1.0, 0.05}.values();
  }
};

struct BenchConfig {
  SweepRange L{5, 20, 5};
  std::size_t instances = 1;
  double density = 1.0;
  double k = 2.0;
  NoiseModel noise{};
};

struct ZephyrConfig {
  int m = 2;
  int t = 4;
};

struct ExperimentConfig {
  SweepRange L_sweep{};
  std::size_t reads = 2000;
  double k = 0.35;
  double eta = 1.0;
  std::vector<double> taus{0.01, 0.02, 0.05};
  NoiseModel noise{0.06, 0.005, 0.0, 0.0};
  ChainLengthModel chain_model{};
  FitGrid fit_grid{};
  std::uint64_t seed = 1;
  std::string output_dir = "chainbreak_out";
  unsigned threads = 1;

  CbfSource cbf_source = CbfSource::margin;
  double density = 1.0;
  AnnealSchedule schedule{};

  // Anneal-time label selecting a noise preset; unknown labels and the
  // absence of a label leave `noise` unchanged.
  std::optional<std::string> anneal_time;
  std::map<std::string, NoiseModel> noise_presets;

  std::optional<std::string> embeddings_file;  // {"<L>": {"chains": [...]}, ...}
  std::optional<std::string> observations_file;
  std::optional<std::string> lengths_file;  // {"<L>": [l_1, l_2, ...], ...}

  KstarConfig kstar{};
  HeatmapConfig heatmap{};
  BenchConfig bench{};
  ZephyrConfig zephyr{};

  NoiseModel effective_noise() const {
    if (anneal_time) {
      const auto it = noise_presets.find(*anneal_time);
      if (it != noise_presets.end()) return it->second;
    }
    return noise;
  }

  void validate() const {
    L_sweep.validate("L_sweep");
    if (reads < 1) throw std::invalid_argument("reads must be >= 1");
    if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("k must be > 0");
    if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must lie in (0, 1]");
    if (taus.empty()) throw std::invalid_argument("taus must be nonempty");
    for (auto tau : taus)
      if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("every tau must lie in (0, 1)");
    noise.validate();
    for (const auto& [label, nm] : noise_presets) nm.validate();
    chain_model.validate();
    fit_grid.validate();
    schedule.validate();
    if (!(density >= 0.0 && density <= 1.0)) throw std::invalid_argument("density must lie in [0, 1]");
    kstar.ell.validate("kstar.ell");
    if (kstar.reads < 1) throw std::invalid_argument("kstar.reads must be >= 1");
    for (auto kv : heatmap.ks())
      if (!(kv > 0.0)) throw std::invalid_argument("heatmap k values must be > 0");
    if (!(heatmap.tau > 0.0 && heatmap.tau < 1.0)) throw std::invalid_argument("heatmap.tau must lie in (0, 1)");
    bench.L.validate("bench.L");
    if (bench.instances < 1) throw std::invalid_argument("bench.instances must be >= 1");
    if (!(bench.k > 0.0)) throw std::invalid_argument("bench.k must be > 0");
    bench.noise.validate();
    detail::check_grid(zephyr.m, zephyr.t);
  }
};

// ---------------------------------------------------------------------------
// Config JSON

namespace detail {

inline SweepRange sweep_from_json(const json& j, SweepRange s) {
  s.start = j.value("start", s.start);
  s.stop = j.value("stop", s.stop);
  s.step = j.value("step", s.step);
  return s;
}

inline void check_config_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  if (!j.is_object()) throw std::invalid_argument(std::string(where) + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw std::invalid_argument(std::string("unknown key '") + key + "' in " + where);
  }
}

}  // namespace detail

/// Overlays the keys present in `j` onto `cfg`.  Unknown keys are errors.
inline void apply_config_json(ExperimentConfig& cfg, const json& j) {
  detail::check_config_keys(j,
                     {"L_sweep", "reads", "k", "eta", "taus", "noise", "chain_model", "fit_grid", "seed", "out",
                      "threads", "cbf_source", "density", "schedule", "anneal_time", "noise_presets", "embeddings",
                      "observations", "lengths", "kstar", "heatmap", "bench", "zephyr"},
                     "config");
  if (j.contains("L_sweep")) cfg.L_sweep = detail::sweep_from_json(j.at("L_sweep"), cfg.L_sweep);
  cfg.reads = j.value("reads", cfg.reads);
  cfg.k = j.value("k", cfg.k);
  cfg.eta = j.value("eta", cfg.eta);
  if (j.contains("taus")) cfg.taus = j.at("taus").get<std::vector<double>>();
  if (j.contains("noise")) cfg.noise = j.at("noise").get<NoiseModel>();
  if (j.contains("chain_model")) {
    const auto& c = j.at("chain_model");
    cfg.chain_model.slope = c.value("slope", cfg.chain_model.slope);
    cfg.chain_model.intercept = c.value("intercept", cfg.chain_model.intercept);
    cfg.chain_model.jitter = c.value("jitter", cfg.chain_model.jitter);
  }
  if (j.contains("fit_grid")) cfg.fit_grid = j.at("fit_grid").get<FitGrid>();
  cfg.seed = j.value("seed", cfg.seed);
  cfg.output_dir = j.value("out", cfg.output_dir);
  cfg.threads = j.value("threads", cfg.threads);
  if (j.contains("cbf_source")) {
    const auto s = j.at("cbf_source").get<std::string>();
    if (s == "margin") cfg.cbf_source = CbfSource::margin;
    else if (s == "synthetic") cfg.cbf_source = CbfSource::synthetic;
    else throw std::invalid_argument("cbf_source must be 'margin' or 'synthetic'");
  }
  cfg.density = j.value("density", cfg.density);
  if (j.contains("schedule")) {
    const auto& s = j.at("schedule");
    if (s.contains("kind")) cfg.schedule.kind = schedule_kind_from_string(s.at("kind").get<std::string>());
    cfg.schedule.sweeps = s.value("sweeps", cfg.schedule.sweeps);
    if (s.contains("beta_min")) cfg.schedule.beta_min = s.at("beta_min").get<double>();
    if (s.contains("beta_max")) cfg.schedule.beta_max = s.at("beta_max").get<double>();
  }
  if (j.contains("anneal_time")) {
    const auto& t = j.at("anneal_time");
    cfg.anneal_time = t.is_string() ? t.get<std::string>() : t.dump();
  }
  if (j.contains("noise_presets"))
    for (const auto& [label, nm] : j.at("noise_presets").items()) cfg.noise_presets[label] = nm.get<NoiseModel>();
  if (j.contains("embeddings")) cfg.embeddings_file = j.at("embeddings").get<std::string>();
  if (j.contains("observations")) cfg.observations_file = j.at("observations").get<std::string>();
  if (j.contains("lengths")) cfg.lengths_file = j.at("lengths").get<std::string>();
  if (j.contains("kstar")) {
    const auto& s = j.at("kstar");
    detail::check_config_keys(s, {"ell", "empirical", "reads", "correlated"}, "kstar");
    if (s.contains("ell")) cfg.kstar.ell = detail::sweep_from_json(s.at("ell"), cfg.kstar.ell);
    cfg.kstar.empirical = s.value("empirical", cfg.kstar.empirical);
    cfg.kstar.reads = s.value("reads", cfg.kstar.reads);
    cfg.kstar.correlated = s.value("correlated", cfg.kstar.correlated);
  }
  if (j.contains("heatmap")) {
    const auto& s = j.at("heatmap");
    detail::check_config_keys(s, {"k_values", "tau"}, "heatmap");
    if (s.contains("k_values")) cfg.heatmap.k_values = s.at("k_values").get<std::vector<double>>();
    cfg.heatmap.tau = s.value("tau", cfg.heatmap.tau);
  }
  if (j.contains("bench")) {
    const auto& s = j.at("bench");
    detail::check_config_keys(s, {"L_sweep", "instances", "density", "k", "noise"}, "bench");
    if (s.contains("L_sweep")) cfg.bench.L = detail::sweep_from_json(s.at("L_sweep"), cfg.bench.L);
    cfg.bench.instances = s.value("instances", cfg.bench.instances);
    cfg.bench.density = s.value("density", cfg.bench.density);
    cfg.bench.k = s.value("k", cfg.bench.k);
    if (s.contains("noise")) cfg.bench.noise = s.at("noise").get<NoiseModel>();
  }
  if (j.contains("zephyr")) {
    const auto& s = j.at("zephyr");
    cfg.zephyr.m = s.value("m", cfg.zephyr.m);
    cfg.zephyr.t = s.value("t", cfg.zephyr.t);
  }
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  ExperimentConfig cfg;
  apply_config_json(cfg, read_json_file(path));
  return cfg;
}

// ---------------------------------------------------------------------------
// Shared helpers

namespace detail {

enum class Purpose : std::uint64_t { cbf_curve = 1, heatmap, kstar, bench_qubo, bench_sa, bench_hw, synthetic_qubo };

inline std::uint64_t experiment_seed(const ExperimentConfig& cfg, Purpose p, std::uint64_t index) {
  return derive_seed(cfg.seed, StreamTag::experiment, static_cast<std::uint64_t>(p), index);
}

inline std::filesystem::path out_path(const ExperimentConfig& cfg, const std::string& name) {
  return std::filesystem::path(cfg.output_dir) / name;
}

inline std::map<std::size_t, std::vector<std::size_t>> read_lengths_json(const std::filesystem::path& path) {
  std::map<std::size_t, std::vector<std::size_t>> out;
  const auto j = read_json_file(path);
  if (!j.is_object()) throw std::invalid_argument(path.string() + ": expected an object keyed by L");
  for (const auto& [key, value] : j.items()) {
    const auto L = static_cast<std::size_t>(std::stoull(key));
    if (value.is_array()) out[L] = value.get<std::vector<std::size_t>>();
    else out[L] = chain_lengths(value.get<Embedding>());
  }
  return out;
}

}  // namespace detail

/// Chain lengths used for problem size L: from the external embeddings file
/// when it lists L, otherwise from the synthetic chain-length model.
inline std::vector<std::size_t> lengths_for(const ExperimentConfig& cfg, std::size_t L) {
  if (cfg.embeddings_file) {
    const auto external = detail::read_lengths_json(*cfg.embeddings_file);
    const auto found = external.find(L);
    if (found != external.end()) return found->second;
  }
  return synth_chain_lengths(L, cfg.chain_model, cfg.seed);
}

// ---------------------------------------------------------------------------
// chainlen

struct ChainlenResult {
  CsvTable curve;  // L,mean_chain_len
  LinearFit fit;
};

inline ChainlenResult run_chainlen(const ExperimentConfig& cfg, bool write = true) {
  cfg.validate();
  ChainlenResult res{{{"L", "mean_chain_len"}, {}}, {}};
  std::vector<double> xs, ys;
  for (auto L : cfg.L_sweep.values()) {
    const double mean = chain_stats(lengths_for(cfg, L)).mean;
    xs.push_back(static_cast<double>(L));
    ys.push_back(mean);
    res.curve.add(L, mean);
  }
  res.fit = fit_linear(xs, ys);
  if (write) {
    write_csv_file(detail::out_path(cfg, "chainlen.csv"), res.curve);
    write_json_file(detail::out_path(cfg, "chainlen_fit.json"),
                    {{"slope", res.fit.slope},
                     {"intercept", res.fit.intercept},
                     {"r_squared", res.fit.r_squared},
                     {"slope_stderr", res.fit.slope_stderr}});
  }
  return res;
}

// ---------------------------------------------------------------------------
// cbf-curve

struct CbfCurveResult {
  CsvTable curve;  // L,cbf_obs,cbf_pred
  std::map<std::size_t, std::vector<std::size_t>> lengths;
};

inline CbfCurveResult run_cbf_curve(const ExperimentConfig& cfg, bool write = true) {
  cfg.validate();
  const auto nm = cfg.effective_noise();
  const CbpModel model{nm, cfg.eta * cfg.k, cfg.eta};
  CbfCurveResult res{{{"L", "cbf_obs", "cbf_pred"}, {}}, {}};
  for (auto L : cfg.L_sweep.values()) {
    auto lengths = lengths_for(cfg, L);
    double obs = 0.0;
    if (cfg.cbf_source == CbfSource::margin) {
      const auto cbf = margin_model_run(lengths, cfg.k, cfg.eta, nm, cfg.reads,
                                        detail::experiment_seed(cfg, detail::Purpose::cbf_curve, L), cfg.threads);
      obs = mean_of(cbf);
    } else {
      const auto q = generate_random_qubo(L, cfg.density, detail::experiment_seed(cfg, detail::Purpose::synthetic_qubo, L));
      SyntheticHardwareOptions opt;
      opt.threads = cfg.threads;
      obs = synthetic_hardware_run(q, lengths, cfg.k, nm, cfg.schedule, cfg.reads,
                                   detail::experiment_seed(cfg, detail::Purpose::cbf_curve, L), opt)
                .mean_cbf;
    }
    res.curve.add(L, obs, cbf_predict(lengths, model));
    res.lengths[L] = std::move(lengths);
  }
  if (write) {
    write_csv_file(detail::out_path(cfg, "cbf_curve.csv"), res.curve);
    json lj = json::object();
    for (const auto& [L, lens] : res.lengths) lj[std::to_string(L)] = lens;
    write_json_file(detail::out_path(cfg, "cbf_lengths.json"), lj);
  }
  return res;
}

// ---------------------------------------------------------------------------
// fit

struct FitRunResult {
  std::vector<std::string> labels;  // one per T-slice; {""} without a T column
  std::vector<FitResult> fits;
};

/// Observations from a CSV with columns L and cbf_obs (optionally T).  Chain
/// lengths per L come from `lengths` when given, else from lengths_for.
inline std::map<std::string, std::vector<Observation>> read_observations(
    const CsvTable& table, const ExperimentConfig& cfg,
    const std::optional<std::map<std::size_t, std::vector<std::size_t>>>& lengths) {
  const auto Ls = table.numeric_column("L");
  const auto obs = table.numeric_column("cbf_obs");
  const bool sliced = table.has_column("T");
  std::map<std::string, std::vector<Observation>> out;
  for (std::size_t r = 0; r < Ls.size(); ++r) {
    if (!(Ls[r] >= 1.0) || Ls[r] != std::floor(Ls[r]))
      throw std::invalid_argument("observation row " + std::to_string(r + 1) + ": L must be a positive integer");
    const auto L = static_cast<std::size_t>(Ls[r]);
    std::vector<std::size_t> lens;
    if (lengths) {
      const auto it = lengths->find(L);
      if (it == lengths->end()) throw std::invalid_argument("lengths file has no entry for L=" + std::to_string(L));
      lens = it->second;
    } else {
      lens = lengths_for(cfg, L);
    }
    const std::string label = sliced ? table.rows[r][table.column("T")] : std::string{};
    out[label].push_back({L, std::vector<double>(lens.begin(), lens.end()), obs[r]});
  }
  return out;
}

inline FitRunResult run_fit(const ExperimentConfig& cfg, const std::filesystem::path& observations,
                            const std::optional<std::filesystem::path>& lengths_file = std::nullopt,
                            bool write = true) {
  cfg.validate();
  std::optional<std::map<std::size_t, std::vector<std::size_t>>> lengths;
  if (lengths_file) lengths = detail::read_lengths_json(*lengths_file);
  const auto slices = read_observations(read_csv_file(observations), cfg, lengths);

  FitRunResult res;
  CsvTable by_t{{"T", "sigma_h", "sigma_c", "kappa", "sse"}, {}};
  for (const auto& [label, obs] : slices) {
    auto fr = fit_noise_params(obs, cfg.fit_grid, cfg.threads);
    if (write) {
      const std::string suffix = label.empty() ? "" : "_T" + label;
      write_json_file(detail::out_path(cfg, "fit" + suffix + ".json"), fr);
      write_csv_file(detail::out_path(cfg, "fit_table" + suffix + ".csv"), fit_report(fr));
    }
    if (!label.empty()) by_t.add(label, fr.sigma_h, fr.sigma_c, fr.kappa, fr.sse);
    res.labels.push_back(label);
    res.fits.push_back(std::move(fr));
  }
  if (write && !by_t.rows.empty()) write_csv_file(detail::out_path(cfg, "fit_by_T.csv"), by_t);
  return res;
}

// ---------------------------------------------------------------------------
// kstar

struct KstarResult {
  CsvTable analytic;   // l,k_star,tau
  CsvTable empirical;  // l,k_star,tau (empty rows when disabled)
  std::map<double, PowerLawFit> analytic_fits;
  std::map<double, PowerLawFit> empirical_fits;
};

inline KstarResult run_kstar(const ExperimentConfig& cfg, bool write = true) {
  cfg.validate();
  const auto nm = cfg.kstar.correlated ? correlated_noise_preset() : cfg.effective_noise();
  const auto ells = cfg.kstar.ell.values();
  KstarResult res{{{"l", "k_star", "tau"}, {}}, {{"l", "k_star", "tau"}, {}}, {}, {}};

  std::vector<std::vector<double>> emp(cfg.taus.size(), std::vector<double>(ells.size()));
  if (cfg.kstar.empirical) {
    for (std::size_t e = 0; e < ells.size(); ++e) {
      const std::vector<std::size_t> one{ells[e]};
      const auto draws = chain_error_draws(one, nm, cfg.kstar.reads,
                                           detail::experiment_seed(cfg, detail::Purpose::kstar, ells[e]), cfg.threads);
      for (std::size_t t = 0; t < cfg.taus.size(); ++t)
        emp[t][e] = empirical_critical_strength(draws, cfg.taus[t], cfg.eta);
    }
  }

  std::vector<double> xs(ells.begin(), ells.end());
  for (std::size_t t = 0; t < cfg.taus.size(); ++t) {
    const double tau = cfg.taus[t];
    std::vector<double> ks;
    for (auto ell : ells) {
      ks.push_back(critical_chain_strength(static_cast<double>(ell), nm, tau, cfg.eta));
      res.analytic.add(ell, ks.back(), tau);
    }
    if (ells.size() >= 2) res.analytic_fits[tau] = power_law_fit(xs, ks);
    if (cfg.kstar.empirical) {
      for (std::size_t e = 0; e < ells.size(); ++e) res.empirical.add(ells[e], emp[t][e], tau);
      bool positive = ells.size() >= 2;
      for (auto v : emp[t]) positive = positive && v > 0.0;
      if (positive) res.empirical_fits[tau] = power_law_fit(xs, emp[t]);
    }
  }

  if (write) {
    write_csv_file(detail::out_path(cfg, "kstar.csv"), res.analytic);
    if (cfg.kstar.empirical) write_csv_file(detail::out_path(cfg, "kstar_empirical.csv"), res.empirical);
    CsvTable fits{{"source", "tau", "exponent", "prefactor", "r_squared"}, {}};
    for (const auto& [tau, f] : res.analytic_fits) fits.add("analytic", tau, f.exponent, f.prefactor, f.r_squared);
    for (const auto& [tau, f] : res.empirical_fits) fits.add("empirical", tau, f.exponent, f.prefactor, f.r_squared);
    write_csv_file(detail::out_path(cfg, "kstar_fit.csv"), fits);
  }
  return res;
}

// ---------------------------------------------------------------------------
// heatmap

struct HeatmapResult {
  CsvTable grid;     // L,k,cbf_mean
  CsvTable contour;  // L,k_star_empirical
};

/// Where the piecewise-linear curve through (ks, cbf) first reaches tau.
/// Returns ks.front() when the first point is already at or below tau and
/// NaN when no point is.
inline double contour_crossing(std::span<const double> ks, std::span<const double> cbf, double tau) {
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (cbf[i] <= tau) {
      if (i == 0) return ks[0];
      const double c0 = cbf[i - 1], c1 = cbf[i];
      if (c0 == c1) return ks[i];
      return ks[i - 1] + (c0 - tau) * (ks[i] - ks[i - 1]) / (c0 - c1);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

inline HeatmapResult run_heatmap(const ExperimentConfig& cfg, bool write = true) {
  cfg.validate();
  const auto nm = cfg.effective_noise();
  auto ks = cfg.heatmap.ks();
  std::sort(ks.begin(), ks.end());
  HeatmapResult res{{{"L", "k", "cbf_mean"}, {}}, {{"L", "k_star_empirical"}, {}}};
  for (auto L : cfg.L_sweep.values()) {
    const auto lengths = lengths_for(cfg, L);
    const auto draws = chain_error_draws(lengths, nm, cfg.reads,
                                         detail::experiment_seed(cfg, detail::Purpose::heatmap, L), cfg.threads);
    std::vector<double> row;
    for (auto k : ks) {
      row.push_back(mean_of(cbf_from_draws(draws, lengths.size(), k, cfg.eta)));
      res.grid.add(L, k, row.back());
    }
    res.contour.add(L, contour_crossing(ks, row, cfg.heatmap.tau));
  }
  if (write) {
    write_csv_file(detail::out_path(cfg, "heatmap.csv"), res.grid);
    write_csv_file(detail::out_path(cfg, "heatmap_contour.csv"), res.contour);
  }
  return res;
}

// ---------------------------------------------------------------------------
// bench

/// Rows "L,solver,E_min,seconds"; solvers brute_force, sa, synthetic_hardware.
/// E_min is the logical QUBO energy (Ising energy including the offset).
inline CsvTable run_bench(const ExperimentConfig& cfg, bool write = true) {
  cfg.validate();
  for (auto L : cfg.bench.L.values())
    if (L > kBruteForceLimit)
      throw std::invalid_argument("bench: L=" + std::to_string(L) + " exceeds the brute-force limit of " +
                                  std::to_string(kBruteForceLimit));
  using clock = std::chrono::steady_clock;
  auto seconds_since = [](clock::time_point t0) {
    return std::chrono::duration<double>(clock::now() - t0).count();
  };

  CsvTable t{{"L", "solver", "E_min", "seconds"}, {}};
  for (auto L : cfg.bench.L.values()) {
    for (std::size_t inst = 0; inst < cfg.bench.instances; ++inst) {
      const std::uint64_t index = L * 1000003ULL + inst;
      const auto q = generate_random_qubo(L, cfg.bench.density,
                                          detail::experiment_seed(cfg, detail::Purpose::bench_qubo, index));
      const auto model = qubo_to_ising(q);

      auto t0 = clock::now();
      const auto bf = brute_force(model);
      t.add(L, "brute_force", bf.best_energy, seconds_since(t0));

      t0 = clock::now();
      const auto sa = simulated_anneal(model, cfg.reads, cfg.schedule,
                                       detail::experiment_seed(cfg, detail::Purpose::bench_sa, index), cfg.threads);
      t.add(L, "sa", energy_stats(sa).e_min, seconds_since(t0));

      t0 = clock::now();
      SyntheticHardwareOptions opt;
      opt.threads = cfg.threads;
      const auto hw = synthetic_hardware_run(q, lengths_for(cfg, L), cfg.bench.k, cfg.bench.noise, cfg.schedule,
                                             cfg.reads, detail::experiment_seed(cfg, detail::Purpose::bench_hw, index),
                                             opt);
      t.add(L, "synthetic_hardware", hw.logical_e_min, seconds_since(t0));
    }
  }
  if (write) write_csv_file(detail::out_path(cfg, "bench.csv"), t);
  return t;
}

// ---------------------------------------------------------------------------
// zephyr

struct ZephyrResult {
  ZephyrGraph graph;
  CsvTable histogram;  // degree,count
};

inline ZephyrResult run_zephyr(int m, int t, const std::filesystem::path& out_dir, bool write = true) {
  ZephyrResult res{build_zephyr(m, t), {{"degree", "count"}, {}}};
  for (const auto& [deg, count] : degree_histogram(res.graph)) res.histogram.add(deg, count);
  if (write) {
    const std::string stem = "zephyr_" + std::to_string(m) + "_" + std::to_string(t);
    write_json_file(out_dir / (stem + ".json"), res.graph);
    std::ostringstream edges;
    write_edge_list(edges, res.graph);
    write_text_file(out_dir / (stem + ".edges"), edges.str());
    write_csv_file(out_dir / (stem + "_degrees.csv"), res.histogram);
  }
  return res;
}

// ---------------------------------------------------------------------------
// repro

struct ReproResult {
  ChainlenResult chainlen;
  CbfCurveResult cbf_curve;
  FitRunResult fit;
  KstarResult kstar;
};

/// chainlen, then cbf-curve, then a fit of that curve with its own chain
/// lengths, then kstar.
inline ReproResult run_repro(const ExperimentConfig& cfg) {
  ReproResult res;
  res.chainlen = run_chainlen(cfg);
  res.cbf_curve = run_cbf_curve(cfg);
  CsvTable obs{{"L", "cbf_obs"}, {}};
  const auto Ls = res.cbf_curve.curve.numeric_column("L");
  const auto cbf = res.cbf_curve.curve.numeric_column("cbf_obs");
  for (std::size_t i = 0; i < Ls.size(); ++i) obs.add(static_cast<std::size_t>(Ls[i]), cbf[i]);
  write_csv_file(detail::out_path(cfg, "observations.csv"), obs);
  res.fit = run_fit(cfg, detail::out_path(cfg, "observations.csv"), detail::out_path(cfg, "cbf_lengths.json"));
  res.kstar = run_kstar(cfg);
  return res;
}

}  // namespace chainbreak
