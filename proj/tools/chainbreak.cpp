#include <cstdio>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "chainbreak/experiments.hpp"

namespace cb = chainbreak;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> reads;
  std::optional<unsigned> threads;
  std::optional<std::string> anneal_time;
};

// defaults < CHAINBREAK_OUT < config file < flags
cb::ExperimentConfig resolve(const CommonFlags& f) {
  cb::ExperimentConfig cfg;
  if (const char* env = std::getenv("CHAINBREAK_OUT"); env && *env) cfg.output_dir = env;
  if (!f.config.empty()) cb::apply_config_json(cfg, cb::read_json_file(f.config));
  if (f.seed) cfg.seed = *f.seed;
  if (f.out) cfg.output_dir = *f.out;
  if (f.reads) cfg.reads = *f.reads;
  if (f.threads) cfg.threads = *f.threads;
  if (f.anneal_time) cfg.anneal_time = *f.anneal_time;
  cfg.threads = cb::resolve_threads(cfg.threads);
  return cfg;
}

void print_fit(const char* label, const cb::PowerLawFit& f) {
  std::printf("%s exponent=%.6g prefactor=%.6g R2=%.6g\n", label, f.exponent, f.prefactor, f.r_squared);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chain-break modelling toolkit for embedded Ising problems"};
  app.require_subcommand(1);
  app.fallthrough();

  CommonFlags flags;
  app.add_option("--config", flags.config, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--seed", flags.seed, "Master seed");
  app.add_option("--out", flags.out, "Output directory (default: $CHAINBREAK_OUT or ./chainbreak_out)");
  app.add_option("--reads", flags.reads, "Reads per sweep point")->check(CLI::PositiveNumber);
  app.add_option("--threads", flags.threads, "Worker threads (0 = hardware concurrency)");
  app.add_option("--anneal-time", flags.anneal_time, "Anneal-time label selecting a noise preset");

  auto* chainlen = app.add_subcommand("chainlen", "Mean chain length vs L with a linear fit");

  auto* cbf_curve = app.add_subcommand("cbf-curve", "Observed vs predicted mean CBF over L");
  std::optional<std::string> source;
  std::optional<double> k;
  cbf_curve->add_option("--source", source, "margin or synthetic")->check(CLI::IsMember({"margin", "synthetic"}));
  cbf_curve->add_option("--k", k, "Chain strength");

  auto* fit = app.add_subcommand("fit", "Grid-search fit of (sigma_h, sigma_c, kappa)");
  std::string observations;
  std::optional<std::string> lengths;
  fit->add_option("observations", observations, "CSV with columns L,cbf_obs[,T]")->check(CLI::ExistingFile);
  fit->add_option("--lengths", lengths, "JSON object mapping L to chain lengths")->check(CLI::ExistingFile);

  auto* kstar = app.add_subcommand("kstar", "Critical chain strength vs chain length");
  bool correlated = false;
  bool analytic_only = false;
  std::optional<std::size_t> kstar_reads;
  kstar->add_flag("--correlated", correlated, "Use the correlated noise preset");
  kstar->add_flag("--analytic-only", analytic_only, "Skip the Monte Carlo estimate");
  kstar->add_option("--mc-reads", kstar_reads, "Draws per chain length for the empirical k*")
      ->check(CLI::PositiveNumber);

  auto* heatmap = app.add_subcommand("heatmap", "Mean CBF over (L, k) and the tau contour");

  auto* bench = app.add_subcommand("bench", "Brute force vs SA vs synthetic hardware");
  std::optional<std::size_t> instances;
  bench->add_option("--instances", instances, "Random instances per L")->check(CLI::PositiveNumber);

  auto* zephyr = app.add_subcommand("zephyr", "Write a Zephyr graph, its edge list and degree histogram");
  std::optional<int> zm, zt;
  zephyr->add_option("m", zm, "Grid parameter");
  zephyr->add_option("t", zt, "Tile parameter");

  auto* repro = app.add_subcommand("repro", "chainlen, cbf-curve, fit and kstar in sequence");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    auto cfg = resolve(flags);

    if (chainlen->parsed()) {
      const auto r = cb::run_chainlen(cfg);
      std::printf("slope=%.6g intercept=%.6g R2=%.6g\n", r.fit.slope, r.fit.intercept, r.fit.r_squared);
    } else if (cbf_curve->parsed()) {
      if (source) cfg.cbf_source = *source == "synthetic" ? cb::CbfSource::synthetic : cb::CbfSource::margin;
      if (k) cfg.k = *k;
      const auto r = cb::run_cbf_curve(cfg);
      std::printf("%zu points written\n", r.curve.rows.size());
    } else if (fit->parsed()) {
      std::optional<std::filesystem::path> obs_path;
      if (!observations.empty()) obs_path = observations;
      else if (cfg.observations_file) obs_path = *cfg.observations_file;
      if (!obs_path) throw std::invalid_argument("fit: no observations file given");
      std::optional<std::filesystem::path> len_path;
      if (lengths) len_path = *lengths;
      else if (cfg.lengths_file) len_path = *cfg.lengths_file;
      const auto r = cb::run_fit(cfg, *obs_path, len_path);
      for (std::size_t i = 0; i < r.fits.size(); ++i) {
        if (!r.labels[i].empty()) std::printf("T=%s ", r.labels[i].c_str());
        std::printf("%s\n", cb::fit_summary(r.fits[i]).c_str());
      }
    } else if (kstar->parsed()) {
      if (correlated) cfg.kstar.correlated = true;
      if (analytic_only) cfg.kstar.empirical = false;
      if (kstar_reads) cfg.kstar.reads = *kstar_reads;
      const auto r = cb::run_kstar(cfg);
      for (const auto& [tau, f] : r.analytic_fits) print_fit(("analytic tau=" + cb::format_double(tau)).c_str(), f);
      for (const auto& [tau, f] : r.empirical_fits) print_fit(("empirical tau=" + cb::format_double(tau)).c_str(), f);
    } else if (heatmap->parsed()) {
      const auto r = cb::run_heatmap(cfg);
      std::printf("%zu cells written\n", r.grid.rows.size());
    } else if (bench->parsed()) {
      if (instances) cfg.bench.instances = *instances;
      const auto t = cb::run_bench(cfg);
      cb::write_csv(std::cout, t);
    } else if (zephyr->parsed()) {
      const int m = zm.value_or(cfg.zephyr.m);
      const int t = zt.value_or(cfg.zephyr.t);
      const auto r = cb::run_zephyr(m, t, cfg.output_dir);
      std::printf("Z(%d,%d): %zu vertices, %zu edges, max degree %zu\n", m, t, r.graph.vertices.size(),
                  r.graph.edges.size(), cb::max_degree(r.graph));
    } else if (repro->parsed()) {
      const auto r = cb::run_repro(cfg);
      std::printf("chain length slope=%.6g R2=%.6g\n", r.chainlen.fit.slope, r.chainlen.fit.r_squared);
      std::printf("%s\n", cb::fit_summary(r.fit.fits.front()).c_str());
      for (const auto& [tau, f] : r.kstar.analytic_fits) print_fit(("analytic tau=" + cb::format_double(tau)).c_str(), f);
    }
  } catch (const std::exception& e) {
    std::cerr << "chainbreak: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
