#pragma once

// Monte Carlo engines.
//
//  * simulated_anneal       single-spin Metropolis SA on an Ising model
//  * brute_force            exhaustive minimum for n <= 24
//  * detect_breaks /
//    resolve_chains         chain-break bookkeeping and majority vote
//  * margin_model_run       the Gaussian-margin generative model: a chain
//                           breaks iff |Delta(l)| > eta * k
//  * synthetic_hardware_run perturb -> anneal -> detect -> resolve, per read
//
// Every read draws from its own substream (seed, tag, read index[, chain]),
// so results do not depend on the thread count.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "chainbreak/embedding.hpp"
#include "chainbreak/noise.hpp"
#include "chainbreak/parallel.hpp"
#include "chainbreak/problem.hpp"
#include "chainbreak/rng.hpp"

namespace chainbreak {

// ---------------------------------------------------------------------------
// Sample containers

struct Read {
  Spins physical_spins;
  double energy = 0.0;
  double cbf = 0.0;

  friend bool operator==(const Read&, const Read&) = default;
};

struct SampleSetInfo {
  std::size_t reads = 0;
  std::size_t sweeps = 0;
  std::uint64_t seed = 0;
  std::string schedule;

  friend bool operator==(const SampleSetInfo&, const SampleSetInfo&) = default;
};

struct SampleSet {
  std::vector<Read> reads;
  SampleSetInfo info;

  friend bool operator==(const SampleSet&, const SampleSet&) = default;
};

struct EnergyStats {
  double e_min = 0.0;
  double e_mean = 0.0;
  double e_std = 0.0;  // population standard deviation
};

inline EnergyStats energy_stats(const SampleSet& ss) {
  if (ss.reads.empty()) throw std::invalid_argument("energy_stats: sample set is empty");
  // Shift by the first energy so identical reads give exactly zero spread.
  const double shift = ss.reads.front().energy;
  double e_min = shift, sum = 0.0, sum_sq = 0.0;
  for (const auto& r : ss.reads) {
    e_min = std::min(e_min, r.energy);
    const double d = r.energy - shift;
    sum += d;
    sum_sq += d * d;
  }
  const double n = static_cast<double>(ss.reads.size());
  const double mean_d = sum / n;
  EnergyStats st;
  st.e_min = e_min;
  st.e_mean = shift + mean_d;
  st.e_std = std::sqrt(std::max(0.0, sum_sq / n - mean_d * mean_d));
  return st;
}

inline double mean_cbf(const SampleSet& ss) {
  if (ss.reads.empty()) throw std::invalid_argument("mean_cbf: sample set is empty");
  double total = 0.0;
  for (const auto& r : ss.reads) total += r.cbf;
  return total / static_cast<double>(ss.reads.size());
}

// ---------------------------------------------------------------------------
// Anneal schedules

enum class ScheduleKind { logarithmic, geometric, linear };

inline std::string to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::logarithmic: return "logarithmic";
    case ScheduleKind::geometric: return "geometric";
    case ScheduleKind::linear: return "linear";
  }
  return "?";
}

inline ScheduleKind schedule_kind_from_string(const std::string& s) {
  if (s == "logarithmic") return ScheduleKind::logarithmic;
  if (s == "geometric") return ScheduleKind::geometric;
  if (s == "linear") return ScheduleKind::linear;
  throw std::invalid_argument("unknown schedule kind '" + s + "'");
}

/// Inverse-temperature schedule.  Unset endpoints are derived from the model.
///
///   geometric    beta_s = beta_min (beta_max/beta_min)^(s/(S-1)),
///                i.e. temperatures evenly spaced on a log scale
///   logarithmic  classical cooling T_s ~ 1/ln(s + 2), rescaled to the endpoints
///   linear       beta evenly spaced
struct AnnealSchedule {
  ScheduleKind kind = ScheduleKind::geometric;
  std::optional<double> beta_min;
  std::optional<double> beta_max;
  std::size_t sweeps = 1000;

  void validate() const {
    if (sweeps < 1) throw std::invalid_argument("schedule needs at least one sweep");
    if (beta_min && !(*beta_min > 0.0)) throw std::invalid_argument("beta_min must be > 0");
    if (beta_max && !(*beta_max > 0.0)) throw std::invalid_argument("beta_max must be > 0");
    if (beta_min && beta_max && !(*beta_min < *beta_max))
      throw std::invalid_argument("beta_min must be < beta_max");
  }
};

struct BetaRange {
  double beta_min = 0.0;
  double beta_max = 0.0;
};

/// Endpoints from the typical flip cost 2 * median_i(|h_i| + sum_j |J_ij|):
/// such a flip is accepted with probability 1/2 at beta_min and 1e-4 at
/// beta_max.
inline BetaRange default_beta_range(const IsingModel& m) {
  std::vector<double> reach(m.n, 0.0);
  for (std::size_t i = 0; i < m.n; ++i) reach[i] = std::fabs(m.h[i]);
  for (const auto& [key, value] : m.J) {
    reach[key.first] += std::fabs(value);
    reach[key.second] += std::fabs(value);
  }
  double typical = 1.0;
  if (!reach.empty()) {
    auto mid = reach.begin() + static_cast<std::ptrdiff_t>(reach.size() / 2);
    std::nth_element(reach.begin(), mid, reach.end());
    if (*mid > 0.0) typical = *mid;
  }
  const double flip = 2.0 * typical;
  return {std::log(2.0) / flip, std::log(1e4) / flip};
}

inline std::vector<double> beta_sequence(ScheduleKind kind, double beta_min, double beta_max, std::size_t sweeps) {
  std::vector<double> betas(sweeps);
  if (sweeps == 1) {
    betas[0] = beta_max;
    return betas;
  }
  const double last = static_cast<double>(sweeps - 1);
  for (std::size_t s = 0; s < sweeps; ++s) {
    const double f = static_cast<double>(s) / last;
    switch (kind) {
      case ScheduleKind::geometric:
        betas[s] = beta_min * std::pow(beta_max / beta_min, f);
        break;
      case ScheduleKind::linear:
        betas[s] = beta_min + (beta_max - beta_min) * f;
        break;
      case ScheduleKind::logarithmic: {
        // T_s = c / ln(s + 2) mapped affinely in 1/T onto [beta_min, beta_max].
        const double g = (std::log(static_cast<double>(s) + 2.0) - std::log(2.0)) /
                         (std::log(last + 2.0) - std::log(2.0));
        betas[s] = beta_min + (beta_max - beta_min) * g;
        break;
      }
    }
  }
  return betas;
}

inline std::vector<double> beta_sequence(const AnnealSchedule& schedule, const IsingModel& m) {
  schedule.validate();
  const auto range = default_beta_range(m);
  const double lo = schedule.beta_min.value_or(range.beta_min);
  const double hi = schedule.beta_max.value_or(std::max(range.beta_max, lo * 1.0000001));
  if (!(lo < hi)) throw std::invalid_argument("beta_min must be < beta_max");
  return beta_sequence(schedule.kind, lo, hi, schedule.sweeps);
}

inline std::string describe(const AnnealSchedule& s, std::span<const double> betas) {
  return to_string(s.kind) + " beta=[" + std::to_string(betas.front()) + ", " + std::to_string(betas.back()) +
         "] sweeps=" + std::to_string(s.sweeps);
}

// ---------------------------------------------------------------------------
// Simulated annealing

/// Compressed adjacency for fast local-field updates.
class CompiledIsing {
 public:
  explicit CompiledIsing(const IsingModel& m) : h_(m.h), offsets_(m.n + 1, 0) {
    validate(m);
    for (const auto& [key, value] : m.J) {
      ++offsets_[key.first + 1];
      ++offsets_[key.second + 1];
    }
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    neighbours_.resize(offsets_.back());
    weights_.resize(offsets_.back());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& [key, value] : m.J) {
      neighbours_[fill[key.first]] = static_cast<std::uint32_t>(key.second);
      weights_[fill[key.first]++] = value;
      neighbours_[fill[key.second]] = static_cast<std::uint32_t>(key.first);
      weights_[fill[key.second]++] = value;
    }
  }

  std::size_t size() const noexcept { return h_.size(); }

  /// One read: random start, `betas.size()` Metropolis sweeps in a
  /// per-read random spin order.
  template <class Engine>
  Spins anneal(std::span<const double> betas, Engine& rng) const {
    const std::size_t n = size();
    Spins s(n);
    for (auto& v : s) v = (rng() >> 63) ? Spin{1} : Spin{-1};

    std::vector<double> field(h_);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t e = offsets_[i]; e < offsets_[i + 1]; ++e) field[i] += weights_[e] * s[neighbours_[e]];

    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);

    for (const double beta : betas) {
      for (const auto i : order) {
        const double delta = -2.0 * s[i] * field[i];
        if (delta > 0.0) {
          const double x = beta * delta;
          if (x > 40.0 || rng.uniform01() >= std::exp(-x)) continue;
        }
        const double change = -2.0 * s[i];
        s[i] = static_cast<Spin>(-s[i]);
        for (std::size_t e = offsets_[i]; e < offsets_[i + 1]; ++e) field[neighbours_[e]] += weights_[e] * change;
      }
    }
    return s;
  }

 private:
  std::vector<double> h_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> neighbours_;
  std::vector<double> weights_;
};

inline SampleSet simulated_anneal(const IsingModel& model, std::size_t reads, const AnnealSchedule& schedule,
                                  std::uint64_t seed, unsigned threads = 1) {
  if (model.n < 1) throw std::invalid_argument("simulated_anneal: model has no spins");
  const CompiledIsing compiled(model);
  const auto betas = beta_sequence(schedule, model);

  SampleSet ss;
  ss.info = {reads, schedule.sweeps, seed, describe(schedule, betas)};
  ss.reads.resize(reads);
  parallel_for(reads, threads, [&](std::size_t r) {
    auto rng = substream(seed, StreamTag::anneal, r);
    auto& read = ss.reads[r];
    read.physical_spins = compiled.anneal(betas, rng);
    read.energy = ising_energy(model, read.physical_spins);
  });
  return ss;
}

// ---------------------------------------------------------------------------
// Exhaustive search

inline constexpr std::size_t kBruteForceLimit = 24;

struct BruteForceResult {
  Spins best_spins;
  double best_energy = 0.0;
};

/// Global minimum by Gray-code enumeration.  Among assignments whose energies
/// agree to 1e-12 (relative), the lexicographically smallest spin vector
/// (-1 < +1, index 0 most significant) wins.
inline BruteForceResult brute_force(const IsingModel& model) {
  validate(model);
  const std::size_t n = model.n;
  if (n > kBruteForceLimit)
    throw std::invalid_argument("brute_force: n = " + std::to_string(n) + " exceeds the enumeration bound " +
                                std::to_string(kBruteForceLimit));
  if (n == 0) return {{}, model.offset};

  std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
  for (const auto& [key, value] : model.J) {
    adj[key.first].emplace_back(key.second, value);
    adj[key.second].emplace_back(key.first, value);
  }

  Spins s(n, Spin{-1});
  std::vector<double> field(model.h);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& [j, w] : adj[i]) field[i] += w * s[j];

  double running = ising_energy(model, s);
  BruteForceResult best{s, running};
  auto tie = [](double a, double b) { return std::fabs(a - b) <= 1e-12 * std::max(1.0, std::fabs(b)); };

  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t g = 1; g < total; ++g) {
    const auto i = static_cast<std::size_t>(std::countr_zero(g));
    running += -2.0 * s[i] * field[i];
    const double change = -2.0 * s[i];
    s[i] = static_cast<Spin>(-s[i]);
    for (const auto& [j, w] : adj[i]) field[j] += w * change;

    // The running value drifts by rounding; confirm candidates exactly.
    if (running <= best.best_energy + 1e-7 * std::max(1.0, std::fabs(best.best_energy))) {
      const double exact = ising_energy(model, s);
      if (tie(exact, best.best_energy)) {
        if (std::lexicographical_compare(s.begin(), s.end(), best.best_spins.begin(), best.best_spins.end())) {
          best.best_spins = s;
          best.best_energy = std::min(exact, best.best_energy);
        }
      } else if (exact < best.best_energy) {
        best = {s, exact};
      }
      running = exact;
    }
  }
  best.best_energy = ising_energy(model, best.best_spins);
  return best;
}

// ---------------------------------------------------------------------------
// Chain breaks

struct BreakReport {
  std::vector<std::uint8_t> broken;  // per chain
  double cbf = 0.0;
};

/// A chain is broken iff its spins are not all equal.  Length-1 chains never break.
inline BreakReport detect_breaks(std::span<const Spin> spins, std::span<const Chain> chains) {
  BreakReport rep;
  rep.broken.assign(chains.size(), 0);
  std::size_t count = 0;
  for (std::size_t c = 0; c < chains.size(); ++c) {
    const auto& chain = chains[c];
    for (auto p : chain)
      if (p >= spins.size())
        throw std::out_of_range("detect_breaks: qubit " + std::to_string(p) + " has no spin");
    for (std::size_t q = 1; q < chain.size(); ++q) {
      if (spins[chain[q]] != spins[chain[0]]) {
        rep.broken[c] = 1;
        ++count;
        break;
      }
    }
  }
  rep.cbf = chains.empty() ? 0.0 : static_cast<double>(count) / static_cast<double>(chains.size());
  return rep;
}

enum class TiePolicy { coin, plus_one };

/// Majority vote per chain.  Even splits use a coin from `rng` (one draw per
/// tied chain, in chain order) or +1 under TiePolicy::plus_one.
template <class Engine>
Spins resolve_chains(std::span<const Spin> spins, std::span<const Chain> chains, TiePolicy policy, Engine& rng) {
  Spins logical(chains.size());
  for (std::size_t c = 0; c < chains.size(); ++c) {
    long long vote = 0;
    for (auto p : chains[c]) {
      if (p >= spins.size()) throw std::out_of_range("resolve_chains: qubit " + std::to_string(p) + " has no spin");
      vote += spins[p];
    }
    if (vote > 0) {
      logical[c] = 1;
    } else if (vote < 0) {
      logical[c] = -1;
    } else if (policy == TiePolicy::plus_one) {
      logical[c] = 1;
    } else {
      logical[c] = (rng() >> 63) ? Spin{1} : Spin{-1};
    }
  }
  return logical;
}

// ---------------------------------------------------------------------------
// Margin model

/// Delta draws laid out read-major: draws[r * chains + c].  Draw (r, c) comes
/// from substream (seed, margin, r, c).
inline std::vector<double> chain_error_draws(std::span<const std::size_t> lengths, const NoiseModel& nm,
                                             std::size_t reads, std::uint64_t seed, unsigned threads = 1) {
  nm.validate();
  for (auto len : lengths)
    if (len < 1) throw std::invalid_argument("chain length must be >= 1");
  const std::size_t chains = lengths.size();
  std::vector<double> draws(reads * chains);
  parallel_for(reads, threads, [&](std::size_t r) {
    for (std::size_t c = 0; c < chains; ++c) {
      auto rng = substream(seed, StreamTag::margin, r, c);
      draws[r * chains + c] = chain_error_sample(lengths[c], nm, rng);
    }
  });
  return draws;
}

/// Per-read break fraction for margin eta * k given precomputed draws.
inline std::vector<double> cbf_from_draws(std::span<const double> draws, std::size_t chains, double k, double eta) {
  if (chains == 0) throw std::invalid_argument("no chains");
  const double margin = eta * k;
  const std::size_t reads = draws.size() / chains;
  std::vector<double> cbf(reads);
  for (std::size_t r = 0; r < reads; ++r) {
    std::size_t broken = 0;
    for (std::size_t c = 0; c < chains; ++c) broken += std::fabs(draws[r * chains + c]) > margin ? 1 : 0;
    cbf[r] = static_cast<double>(broken) / static_cast<double>(chains);
  }
  return cbf;
}

inline double mean_of(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean of empty sequence");
  double total = 0.0;
  for (auto x : xs) total += x;
  return total / static_cast<double>(xs.size());
}

/// Per read: chain i breaks iff |Delta(l_i)| > eta * k.  Returns the per-read
/// chain-break fractions.
inline std::vector<double> margin_model_run(std::span<const std::size_t> lengths, double k, double eta,
                                            const NoiseModel& nm, std::size_t reads, std::uint64_t seed,
                                            unsigned threads = 1) {
  if (!(k > 0.0)) throw std::invalid_argument("margin_model_run: k must be > 0");
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("margin_model_run: eta must lie in (0, 1]");
  if (lengths.empty()) throw std::invalid_argument("margin_model_run: no chains");
  const auto draws = chain_error_draws(lengths, nm, reads, seed, threads);
  return cbf_from_draws(draws, lengths.size(), k, eta);
}

/// Smallest k at which the mean margin-model CBF over `draws` is at most tau.
///
/// The mean CBF at k is the fraction of draws with |Delta| > eta * k, so the
/// answer is an order statistic: with N draws and m = floor(tau * N), k* is
/// the (m+1)-th largest |Delta| divided by eta.  This is the limit of
/// bisecting margin_model_run on k with the draws held fixed.
inline double empirical_critical_strength(std::span<const double> draws, double tau, double eta = 1.0) {
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("tau must lie in (0, 1)");
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must lie in (0, 1]");
  if (draws.empty()) throw std::invalid_argument("no draws");
  std::vector<double> mag(draws.size());
  std::transform(draws.begin(), draws.end(), mag.begin(), [](double d) { return std::fabs(d); });
  const auto allowed = static_cast<std::size_t>(std::floor(tau * static_cast<double>(mag.size())));
  auto nth = mag.begin() + static_cast<std::ptrdiff_t>(allowed);
  std::nth_element(mag.begin(), nth, mag.end(), std::greater<>());
  return *nth / eta;
}

inline double empirical_critical_strength(std::span<const std::size_t> lengths, const NoiseModel& nm, double tau,
                                          double eta, std::size_t reads, std::uint64_t seed, unsigned threads = 1) {
  const auto draws = chain_error_draws(lengths, nm, reads, seed, threads);
  return empirical_critical_strength(draws, tau, eta);
}

// ---------------------------------------------------------------------------
// Synthetic hardware

struct SyntheticHardwareOptions {
  NoiseRedraw redraw = NoiseRedraw::per_read;
  TiePolicy tie_policy = TiePolicy::coin;
  unsigned threads = 1;
};

struct SyntheticRun {
  IsingModel logical;
  EmbeddedIsing programmed;
  SampleSet physical;  // energies on the unperturbed programmed model
  SampleSet logical_samples;  // majority-vote assignments, logical energies
  double mean_cbf = 0.0;
  double logical_e_min = 0.0;
};

namespace detail {

inline SyntheticRun run_synthetic(IsingModel logical, EmbeddedIsing programmed, const NoiseModel& nm,
                                  const AnnealSchedule& schedule, std::size_t reads, std::uint64_t seed,
                                  const SyntheticHardwareOptions& opt) {
  nm.validate();
  if (reads < 1) throw std::invalid_argument("synthetic_hardware_run: reads must be >= 1");
  const auto betas = beta_sequence(schedule, programmed.physical);

  std::optional<CompiledIsing> shared;
  if (opt.redraw == NoiseRedraw::per_programming) {
    auto rng = substream(seed, StreamTag::perturb, 0);
    shared.emplace(perturb_hamiltonian(programmed, nm, rng).physical);
  }

  SyntheticRun run;
  run.physical.info = {reads, schedule.sweeps, seed, describe(schedule, betas)};
  run.logical_samples.info = run.physical.info;
  run.physical.reads.resize(reads);
  run.logical_samples.reads.resize(reads);

  parallel_for(reads, opt.threads, [&](std::size_t r) {
    Spins spins;
    auto anneal_rng = substream(seed, StreamTag::anneal, r);
    if (shared) {
      spins = shared->anneal(betas, anneal_rng);
    } else {
      auto perturb_rng = substream(seed, StreamTag::perturb, r);
      const CompiledIsing realised(perturb_hamiltonian(programmed, nm, perturb_rng).physical);
      spins = realised.anneal(betas, anneal_rng);
    }
    const auto breaks = detect_breaks(spins, programmed.chains);
    auto tie_rng = substream(seed, StreamTag::tie_break, r);
    auto resolved = resolve_chains(spins, programmed.chains, opt.tie_policy, tie_rng);

    auto& phys = run.physical.reads[r];
    phys.energy = ising_energy(programmed.physical, spins);
    phys.cbf = breaks.cbf;
    phys.physical_spins = std::move(spins);

    auto& lg = run.logical_samples.reads[r];
    lg.energy = ising_energy(logical, resolved);
    lg.cbf = breaks.cbf;
    lg.physical_spins = std::move(resolved);
  });

  run.mean_cbf = mean_cbf(run.physical);
  run.logical_e_min = energy_stats(run.logical_samples).e_min;
  run.logical = std::move(logical);
  run.programmed = std::move(programmed);
  return run;
}

}  // namespace detail

/// Simulates a noisy annealer on an embedded QUBO.  Per read: realise the
/// programmed Hamiltonian with fresh control errors (or once for all reads),
/// run one SA read on it, score the spins on the programmed model, detect
/// breaks and majority-vote back to logical spins.
inline SyntheticRun synthetic_hardware_run(const QuboInstance& q, std::span<const std::size_t> lengths, double k,
                                           const NoiseModel& nm, const AnnealSchedule& schedule, std::size_t reads,
                                           std::uint64_t seed, const SyntheticHardwareOptions& opt = {}) {
  auto logical = qubo_to_ising(q);
  auto programmed = build_embedded_ising(logical, lengths, k);
  return detail::run_synthetic(std::move(logical), std::move(programmed), nm, schedule, reads, seed, opt);
}

inline SyntheticRun synthetic_hardware_run(const QuboInstance& q, const Embedding& embedding, double k,
                                           const NoiseModel& nm, const AnnealSchedule& schedule, std::size_t reads,
                                           std::uint64_t seed, const SyntheticHardwareOptions& opt = {},
                                           const ZephyrGraph* hardware = nullptr) {
  auto logical = qubo_to_ising(q);
  auto programmed = build_embedded_ising(logical, embedding, k, hardware);
  return detail::run_synthetic(std::move(logical), std::move(programmed), nm, schedule, reads, seed, opt);
}

/// Largest |stored - recomputed| energy over the reads.
inline double max_energy_mismatch(const SampleSet& ss, const IsingModel& model) {
  double worst = 0.0;
  for (const auto& r : ss.reads) worst = std::max(worst, std::fabs(r.energy - ising_energy(model, r.physical_spins)));
  return worst;
}

}  // namespace chainbreak
