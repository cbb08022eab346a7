#pragma once

// Calibration of (sigma_h, sigma_c, kappa) from observed chain-break-fraction
// curves by exhaustive grid search on the sum of squared errors.

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "chainbreak/analytics.hpp"
#include "chainbreak/csv.hpp"
#include "chainbreak/parallel.hpp"

namespace chainbreak {

struct GridRange {
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;

  void validate(const char* name) const {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !std::isfinite(step))
      throw std::invalid_argument(std::string(name) + ": grid bounds must be finite");
    if (!(step > 0.0)) throw std::invalid_argument(std::string(name) + ": grid step must be > 0");
    if (!(lo <= hi)) throw std::invalid_argument(std::string(name) + ": grid lo must be <= hi");
  }

  /// lo, lo + step, ... up to hi (inclusive within 1e-9 steps).  Values are
  /// snapped to 12 decimals so that e.g. the 12th point of 0.005:0.005 is 0.06.
  std::vector<double> values() const {
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i)
      v[i] = std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12;
    return v;
  }
};

struct FitGrid {
  GridRange sigma_h{0.005, 0.08, 0.005};
  GridRange sigma_c{0.005, 0.08, 0.005};
  GridRange kappa{0.10, 1.00, 0.05};

  void validate() const {
    sigma_h.validate("sigma_h");
    sigma_c.validate("sigma_c");
    kappa.validate("kappa");
    for (auto v : sigma_h.values())
      if (v < 0.0) throw std::invalid_argument("sigma_h grid contains negative values");
    for (auto v : sigma_c.values())
      if (v < 0.0) throw std::invalid_argument("sigma_c grid contains negative values");
    for (auto v : kappa.values())
      if (!(v > 0.0)) throw std::invalid_argument("kappa grid must be positive");
  }

  std::size_t size() const {
    return sigma_h.values().size() * sigma_c.values().size() * kappa.values().size();
  }
};

/// One point of an observed curve.  `lengths` is the chain-length multiset
/// for problem size L; a single entry stands for the mean chain length.
struct Observation {
  std::size_t L = 0;
  std::vector<double> lengths;
  double cbf_obs = 0.0;
};

struct FitRow {
  std::size_t L = 0;
  double cbf_obs = 0.0;
  double cbf_pred = 0.0;
  double abs_err = 0.0;
};

struct FitResult {
  double sigma_h = 0.0;
  double sigma_c = 0.0;
  double kappa = 0.0;
  double sse = 0.0;
  std::vector<FitRow> per_L;
};

inline double sse(std::span<const double> obs, std::span<const double> pred) {
  if (obs.size() != pred.size()) throw std::invalid_argument("sse: sequence lengths differ");
  if (obs.empty()) throw std::invalid_argument("sse: empty sequences");
  double total = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const double r = obs[i] - pred[i];
    total += r * r;
  }
  return total;
}

inline std::vector<double> predict_curve(std::span<const Observation> observations, const CbpModel& model) {
  std::vector<double> pred;
  pred.reserve(observations.size());
  for (const auto& o : observations) pred.push_back(cbf_predict(o.lengths, model));
  return pred;
}

/// Residual table and SSE for a given triple.
inline FitResult evaluate_fit(std::span<const Observation> observations, double sigma_h, double sigma_c,
                              double kappa) {
  const CbpModel model{{sigma_h, sigma_c, 0.0, 0.0}, kappa, 1.0};
  FitResult fr{sigma_h, sigma_c, kappa, 0.0, {}};
  const auto pred = predict_curve(observations, model);
  std::vector<double> obs;
  for (std::size_t i = 0; i < observations.size(); ++i) {
    obs.push_back(observations[i].cbf_obs);
    fr.per_L.push_back({observations[i].L, observations[i].cbf_obs, pred[i], std::fabs(observations[i].cbf_obs - pred[i])});
  }
  fr.sse = sse(obs, pred);
  return fr;
}

/// Exhaustive search over every grid triple.  Returns the minimiser of the
/// SSE; exact ties go to the lexicographically smallest (sigma_h, sigma_c, kappa).
inline FitResult fit_noise_params(std::span<const Observation> observations, const FitGrid& grid = {},
                                  unsigned threads = 1) {
  grid.validate();
  if (observations.size() < 3) throw std::invalid_argument("fit_noise_params: need at least three observations");
  for (const auto& o : observations) {
    if (o.lengths.empty()) throw std::invalid_argument("observation at L=" + std::to_string(o.L) + " has no chain lengths");
    if (!(o.cbf_obs >= 0.0 && o.cbf_obs <= 1.0))
      throw std::invalid_argument("observed CBF at L=" + std::to_string(o.L) + " outside [0, 1]");
  }

  const auto sh = grid.sigma_h.values();
  const auto sc = grid.sigma_c.values();
  const auto kp = grid.kappa.values();
  std::vector<double> obs;
  for (const auto& o : observations) obs.push_back(o.cbf_obs);

  // One slot per sigma_h value; each slot scans its (sigma_c, kappa) plane in
  // lexicographic order and keeps the first strict minimum.
  struct Best {
    double sse = std::numeric_limits<double>::infinity();
    std::size_t c = 0, k = 0;
  };
  std::vector<Best> best(sh.size());
  parallel_for(sh.size(), threads, [&](std::size_t a) {
    Best b;
    for (std::size_t c = 0; c < sc.size(); ++c) {
      for (std::size_t k = 0; k < kp.size(); ++k) {
        const CbpModel model{{sh[a], sc[c], 0.0, 0.0}, kp[k], 1.0};
        const double s = sse(obs, predict_curve(observations, model));
        if (s < b.sse) b = {s, c, k};
      }
    }
    best[a] = b;
  });

  std::size_t arg = 0;
  for (std::size_t a = 1; a < best.size(); ++a)
    if (best[a].sse < best[arg].sse) arg = a;
  if (!std::isfinite(best[arg].sse)) throw std::runtime_error("fit_noise_params: no finite SSE on the grid");
  return evaluate_fit(observations, sh[arg], sc[best[arg].c], kp[best[arg].k]);
}

/// Observed-vs-predicted table "L,cbf_obs,cbf_pred,abs_err".
inline CsvTable fit_report(const FitResult& fr) {
  CsvTable t{{"L", "cbf_obs", "cbf_pred", "abs_err"}, {}};
  for (const auto& row : fr.per_L) t.add(row.L, row.cbf_obs, row.cbf_pred, row.abs_err);
  return t;
}

/// One-line summary, e.g. "sigma_h=0.06 sigma_c=0.005 kappa=0.35 SSE=0.0021".
inline std::string fit_summary(const FitResult& fr) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "sigma_h=%.6g sigma_c=%.6g kappa=%.6g SSE=%.4g", fr.sigma_h, fr.sigma_c, fr.kappa,
                fr.sse);
  return buf;
}

/// Parses a table written by fit_report back into rows.
inline std::vector<FitRow> read_fit_rows(const CsvTable& t) {
  const auto L = t.numeric_column("L");
  const auto obs = t.numeric_column("cbf_obs");
  const auto pred = t.numeric_column("cbf_pred");
  const auto err = t.numeric_column("abs_err");
  std::vector<FitRow> rows;
  for (std::size_t i = 0; i < L.size(); ++i)
    rows.push_back({static_cast<std::size_t>(L[i]), obs[i], pred[i], err[i]});
  return rows;
}

}  // namespace chainbreak
