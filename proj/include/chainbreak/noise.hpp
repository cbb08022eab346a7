#pragma once

// Gaussian control-error model for programmed fields and couplers, plus an
// optional correlated per-chain term with variance corr_strength * l^corr_exponent.

#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>

#include "chainbreak/embedding.hpp"

namespace chainbreak {

struct NoiseModel {
  double sigma_h = 0.0;
  double sigma_c = 0.0;
  double corr_strength = 0.0;
  double corr_exponent = 0.0;

  void validate() const {
    if (!(sigma_h >= 0.0) || !std::isfinite(sigma_h)) throw std::invalid_argument("sigma_h must be >= 0");
    if (!(sigma_c >= 0.0) || !std::isfinite(sigma_c)) throw std::invalid_argument("sigma_c must be >= 0");
    if (!(corr_strength >= 0.0) || !std::isfinite(corr_strength))
      throw std::invalid_argument("corr_strength must be >= 0");
    if (!std::isfinite(corr_exponent)) throw std::invalid_argument("corr_exponent must be finite");
  }

  bool is_zero() const noexcept { return sigma_h == 0.0 && sigma_c == 0.0 && corr_strength == 0.0; }

  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

/// When the device errors are drawn: afresh for every read, or once per
/// programming of the problem (shared by all reads).
enum class NoiseRedraw { per_read, per_programming };

/// l * sigma_h^2 + (l - 1) * sigma_c^2 + corr_strength * l^corr_exponent.
/// Real-valued l is accepted for grid-parameter scaling.
inline double variance_law(double ell, const NoiseModel& nm) {
  if (!(ell >= 1.0)) throw std::invalid_argument("variance_law: chain length must be >= 1");
  double var = ell * nm.sigma_h * nm.sigma_h + (ell - 1.0) * nm.sigma_c * nm.sigma_c;
  if (nm.corr_strength > 0.0) var += nm.corr_strength * std::pow(ell, nm.corr_exponent);
  return var;
}

/// One draw of a chain's accumulated control error: l field errors, l - 1
/// intra-chain coupler errors and, if enabled, one correlated term.
template <class Engine>
double chain_error_sample(std::size_t ell, const NoiseModel& nm, Engine& rng) {
  if (ell < 1) throw std::invalid_argument("chain_error_sample: chain length must be >= 1");
  std::normal_distribution<double> gauss;
  double delta = 0.0;
  if (nm.sigma_h > 0.0)
    for (std::size_t p = 0; p < ell; ++p) delta += nm.sigma_h * gauss(rng);
  if (nm.sigma_c > 0.0)
    for (std::size_t p = 1; p < ell; ++p) delta += nm.sigma_c * gauss(rng);
  if (nm.corr_strength > 0.0)
    delta += std::sqrt(nm.corr_strength * std::pow(static_cast<double>(ell), nm.corr_exponent)) * gauss(rng);
  return delta;
}

/// Adds N(0, sigma_h^2) to every physical field and N(0, sigma_c^2) to every
/// physical coupler (intra- and inter-chain), in index / key order.
template <class Engine>
EmbeddedIsing perturb_hamiltonian(const EmbeddedIsing& emb, const NoiseModel& nm, Engine& rng) {
  EmbeddedIsing out = emb;
  std::normal_distribution<double> gauss;
  if (nm.sigma_h > 0.0)
    for (auto& h : out.physical.h) h += nm.sigma_h * gauss(rng);
  if (nm.sigma_c > 0.0)
    for (auto& [key, value] : out.physical.J) value += nm.sigma_c * gauss(rng);
  return out;
}

}  // namespace chainbreak
