#pragma once

// Logical problems: random QUBO instances and their Ising equivalents.
//
// Energy convention (used everywhere in the library, minimisation):
//   QUBO   E(x) = sum_i Q_ii x_i + sum_{i<j} Q_ij x_i x_j,   x_i in {0, 1}
//   Ising  E(s) = sum_i h_i s_i + sum_{i<j} J_ij s_i s_j + offset,   s_i = +-1

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chainbreak/rng.hpp"

namespace chainbreak {

using Spin = std::int8_t;
using Spins = std::vector<Spin>;
using Bits = std::vector<std::uint8_t>;

/// Key (i, j) with i < j.  std::map keeps couplers in lexicographic order,
/// which fixes the order of every derived computation and serialization.
using EdgeKey = std::pair<std::size_t, std::size_t>;
using CouplerMap = std::map<EdgeKey, double>;

inline EdgeKey make_edge(std::size_t a, std::size_t b) {
  if (a == b) throw std::invalid_argument("self-loop coupler (" + std::to_string(a) + ")");
  return a < b ? EdgeKey{a, b} : EdgeKey{b, a};
}

struct QuboInstance {
  std::size_t L = 0;
  std::vector<double> diag;
  CouplerMap offdiag;
  double density = 0.0;
  std::uint64_t seed = 0;

  friend bool operator==(const QuboInstance&, const QuboInstance&) = default;
};

struct IsingModel {
  std::size_t n = 0;
  std::vector<double> h;
  CouplerMap J;
  double offset = 0.0;

  IsingModel() = default;
  explicit IsingModel(std::size_t spins) : n(spins), h(spins, 0.0) {}

  friend bool operator==(const IsingModel&, const IsingModel&) = default;
};

namespace detail {

inline void check_keys(const CouplerMap& couplers, std::size_t n, const char* what) {
  for (const auto& [key, value] : couplers) {
    if (key.first >= key.second || key.second >= n)
      throw std::invalid_argument(std::string(what) + " key (" + std::to_string(key.first) +
                                  ", " + std::to_string(key.second) + ") out of range");
  }
}

}  // namespace detail

inline void validate(const QuboInstance& q) {
  if (q.diag.size() != q.L) throw std::invalid_argument("QUBO diagonal length differs from L");
  detail::check_keys(q.offdiag, q.L, "QUBO off-diagonal");
}

inline void validate(const IsingModel& m) {
  if (m.h.size() != m.n) throw std::invalid_argument("Ising field vector length differs from n");
  detail::check_keys(m.J, m.n, "Ising coupler");
}

/// Diagonal terms are Uniform(-1,1); each i<j slot is present with
/// probability `density` and then also Uniform(-1,1).  Draw order is the
/// L diagonal values first, then the slots in lexicographic order, from a
/// stream derived only from `seed`.
inline QuboInstance generate_random_qubo(std::size_t L, double density, std::uint64_t seed) {
  if (L < 1) throw std::invalid_argument("QUBO needs at least one variable");
  if (!(density >= 0.0 && density <= 1.0))
    throw std::invalid_argument("edge density must lie in [0, 1]");

  QuboInstance q;
  q.L = L;
  q.density = density;
  q.seed = seed;
  q.diag.resize(L);

  auto rng = substream(seed, StreamTag::qubo);
  auto coefficient = [&rng] { return 2.0 * rng.uniform01() - 1.0; };
  for (auto& d : q.diag) d = coefficient();
  for (std::size_t i = 0; i < L; ++i) {
    for (std::size_t j = i + 1; j < L; ++j) {
      if (rng.uniform01() < density) q.offdiag.emplace_hint(q.offdiag.end(), EdgeKey{i, j}, coefficient());
    }
  }
  return q;
}

/// Substitutes x_i = (1 + s_i) / 2.
inline IsingModel qubo_to_ising(const QuboInstance& q) {
  validate(q);
  IsingModel m(q.L);
  for (std::size_t i = 0; i < q.L; ++i) {
    m.h[i] += q.diag[i] / 2.0;
    m.offset += q.diag[i] / 2.0;
  }
  for (const auto& [key, value] : q.offdiag) {
    m.J.emplace_hint(m.J.end(), key, value / 4.0);
    m.h[key.first] += value / 4.0;
    m.h[key.second] += value / 4.0;
    m.offset += value / 4.0;
  }
  return m;
}

inline double qubo_energy(const QuboInstance& q, std::span<const std::uint8_t> x) {
  if (x.size() != q.L)
    throw std::invalid_argument("assignment length " + std::to_string(x.size()) +
                                " differs from L = " + std::to_string(q.L));
  double e = 0.0;
  for (std::size_t i = 0; i < q.L; ++i)
    if (x[i]) e += q.diag[i];
  for (const auto& [key, value] : q.offdiag)
    if (x[key.first] && x[key.second]) e += value;
  return e;
}

inline double ising_energy(const IsingModel& m, std::span<const Spin> s) {
  if (s.size() != m.n)
    throw std::invalid_argument("spin vector length " + std::to_string(s.size()) +
                                " differs from n = " + std::to_string(m.n));
  double e = m.offset;
  for (std::size_t i = 0; i < m.n; ++i) {
    if (s[i] != 1 && s[i] != -1)
      throw std::invalid_argument("spin " + std::to_string(i) + " is not +-1");
    e += m.h[i] * s[i];
  }
  for (const auto& [key, value] : m.J) e += value * s[key.first] * s[key.second];
  return e;
}

inline Spins bits_to_spins(std::span<const std::uint8_t> x) {
  Spins s(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) s[i] = x[i] ? Spin{1} : Spin{-1};
  return s;
}

inline Bits spins_to_bits(std::span<const Spin> s) {
  Bits x(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) x[i] = s[i] > 0 ? 1 : 0;
  return x;
}

}  // namespace chainbreak
