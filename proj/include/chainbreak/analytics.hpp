#pragma once

// Closed-form chain-break predictions.
//
//   cbp(l)   = erfc( kappa / sqrt(2 Var[l]) )     Var from variance_law
//   cbf      = mean_i cbp(l_i)
//   k*(l)    = sqrt(2 Var[l]) erfc_inv(tau) / eta
//
// kappa is the effective stabilising margin eta * k.

#include <cmath>
#include <cstddef>
#include <iterator>
#include <ranges>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "chainbreak/noise.hpp"
#include "chainbreak/regression.hpp"
#include "chainbreak/special.hpp"

namespace chainbreak {

struct CbpModel {
  NoiseModel noise;
  double kappa = 1.0;
  double eta = 1.0;

  void validate() const {
    noise.validate();
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw std::invalid_argument("kappa must be > 0");
    if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must lie in (0, 1]");
  }
};

/// Chain-break probability for a chain of length ell.
inline double cbp(double ell, const CbpModel& model) {
  if (!(ell >= 1.0)) throw std::invalid_argument("cbp: chain length must be >= 1");
  const double var = variance_law(ell, model.noise);
  if (var <= 0.0) return 0.0;
  return erfc(model.kappa / std::sqrt(2.0 * var));
}

/// Expected chain-break fraction: the arithmetic mean of cbp over the chains.
template <std::ranges::input_range Lengths>
  requires std::is_arithmetic_v<std::ranges::range_value_t<Lengths>>
double cbf_predict(const Lengths& lengths, const CbpModel& model) {
  double sum = 0.0;
  double comp = 0.0;  // Neumaier compensation
  std::size_t n = 0;
  for (const auto& ell : lengths) {
    const double v = cbp(static_cast<double>(ell), model);
    const double t = sum + v;
    comp += std::fabs(sum) >= std::fabs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
    ++n;
  }
  if (n == 0) throw std::invalid_argument("cbf_predict: no chain lengths");
  return (sum + comp) / static_cast<double>(n);
}

/// cbp at the grid-parameter chain length alpha * m + beta.
inline double cbp_vs_m(double m, double alpha, double beta, const CbpModel& model) {
  const double ell = alpha * m + beta;
  if (!(ell >= 1.0)) throw std::invalid_argument("cbp_vs_m: alpha*m + beta must be >= 1");
  return cbp(ell, model);
}

/// Chain strength whose margin eta * k gives break probability tau.
inline double critical_chain_strength(double ell, const NoiseModel& nm, double tau, double eta = 1.0) {
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("tau must lie in (0, 1)");
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must lie in (0, 1]");
  return std::sqrt(2.0 * variance_law(ell, nm)) * erfc_inv(tau) / eta;
}

struct PowerLawFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double r_squared = 0.0;
};

/// Least squares of log y on log x: y ~ prefactor * x^exponent.
inline PowerLawFit power_law_fit(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("power_law_fit: lengths differ");
  if (xs.size() < 2) throw std::invalid_argument("power_law_fit: need at least two points");
  std::vector<double> lx, ly;
  lx.reserve(xs.size());
  ly.reserve(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw std::invalid_argument("power_law_fit: data must be positive");
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(ys[i]));
  }
  const auto lin = fit_linear(lx, ly);
  return {lin.slope, std::exp(lin.intercept), lin.r_squared};
}

}  // namespace chainbreak
