#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "chainbreak/embedding.hpp"
#include "chainbreak/noise.hpp"
#include "chainbreak/rng.hpp"
#include "chainbreak/io.hpp"

using namespace chainbreak;

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

Moments moments(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  const double mean = s / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, ss / static_cast<double>(xs.size() - 1)};
}

std::vector<double> draws(std::size_t ell, const NoiseModel& nm, std::size_t n, std::uint64_t seed) {
  std::vector<double> out(n);
  for (std::size_t r = 0; r < n; ++r) {
    auto rng = substream(seed, StreamTag::chain_error, r);
    out[r] = chain_error_sample(ell, nm, rng);
  }
  return out;
}

}  // namespace

TEST(VarianceLaw, Examples) {
  EXPECT_DOUBLE_EQ(variance_law(1, {0.06, 0.9, 0, 0}), 0.0036);
  const double s = 0.03;
  EXPECT_NEAR(variance_law(7, {s, s, 0, 0}), 13 * s * s, 1e-15);
  EXPECT_NEAR(variance_law(13, {0.06, 0.005, 0, 0}), 0.0471, 1e-15);
  EXPECT_NEAR(variance_law(4, {0.0, 0.0, 0.5, 1.5}), 4.0, 1e-15);
  EXPECT_NEAR(variance_law(2.5, {0.1, 0.0, 0, 0}), 0.025, 1e-15);
  EXPECT_THROW(variance_law(0.5, {}), std::invalid_argument);
}

TEST(VarianceLaw, CorrelatedRegimeSlopeApproachesGamma) {
  const NoiseModel nm{0.001, 0.0, 1.0, 1.64};
  const double slope = (std::log(variance_law(1000, nm)) - std::log(variance_law(500, nm))) / std::log(2.0);
  EXPECT_NEAR(slope, 1.64, 1e-3);
}

TEST(NoiseModel, Validation) {
  EXPECT_THROW((NoiseModel{-0.1, 0, 0, 0}.validate()), std::invalid_argument);
  EXPECT_THROW((NoiseModel{0, -0.1, 0, 0}.validate()), std::invalid_argument);
  EXPECT_THROW((NoiseModel{0, 0, -1, 0}.validate()), std::invalid_argument);
  EXPECT_THROW((NoiseModel{0, 0, 0, NAN}.validate()), std::invalid_argument);
  EXPECT_TRUE(NoiseModel{}.is_zero());
  const NoiseModel nm{0.06, 0.005, 0.1, 1.64};
  const json j = nm;
  EXPECT_EQ(j.get<NoiseModel>(), nm);
}

TEST(ChainErrorSample, ZeroWidthIsZero) {
  Xoshiro256 rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(chain_error_sample(5, NoiseModel{}, rng), 0.0);
}

TEST(ChainErrorSample, MeanAndVarianceAtOneMillion) {
  const NoiseModel nm{0.06, 0.015, 0, 0};
  for (std::size_t ell : {2u, 8u, 32u}) {
    const auto m = moments(draws(ell, nm, 1'000'000, 17 + ell));
    const double var = variance_law(static_cast<double>(ell), nm);
    EXPECT_LT(std::fabs(m.mean), 4.0 * std::sqrt(var / 1e6)) << "ell=" << ell;
    EXPECT_LT(std::fabs(m.var / var - 1.0), 0.01) << "ell=" << ell;
  }
}

TEST(ChainErrorSample, CorrelatedTermAddsVariance) {
  const NoiseModel nm{0.02, 0.01, 0.01, 1.64};
  const auto m = moments(draws(10, nm, 400'000, 3));
  EXPECT_LT(std::fabs(m.var / variance_law(10, nm) - 1.0), 0.02);
}

TEST(ChainErrorSample, DisjointChainsUncorrelated) {
  const NoiseModel nm{0.06, 0.015, 0, 0};
  const std::size_t n = 200'000;
  std::vector<double> a(n), b(n);
  for (std::size_t r = 0; r < n; ++r) {
    auto ra = substream(5, StreamTag::margin, r, 0);
    auto rb = substream(5, StreamTag::margin, r, 1);
    a[r] = chain_error_sample(4, nm, ra);
    b[r] = chain_error_sample(6, nm, rb);
  }
  const auto ma = moments(a), mb = moments(b);
  double cov = 0.0;
  for (std::size_t r = 0; r < n; ++r) cov += (a[r] - ma.mean) * (b[r] - mb.mean);
  cov /= static_cast<double>(n - 1);
  const double se = std::sqrt(ma.var * mb.var / static_cast<double>(n));
  EXPECT_LT(std::fabs(cov), 4.0 * se);
}

TEST(PerturbHamiltonian, ZeroWidthIsIdentity) {
  IsingModel logical(3);
  logical.h = {0.2, -0.4, 0.1};
  logical.J[{0, 1}] = 0.5;
  logical.J[{1, 2}] = -0.3;
  const auto emb = build_embedded_ising(logical, std::vector<std::size_t>{2, 1, 3}, 1.0);
  Xoshiro256 rng(4);
  const auto out = perturb_hamiltonian(emb, NoiseModel{}, rng);
  EXPECT_EQ(out.physical, emb.physical);
}

TEST(PerturbHamiltonian, DeterministicPerStream) {
  IsingModel logical(2);
  logical.J[{0, 1}] = 0.5;
  const auto emb = build_embedded_ising(logical, std::vector<std::size_t>{3, 3}, 1.0);
  const NoiseModel nm{0.05, 0.02, 0, 0};
  auto r1 = substream(9, StreamTag::perturb, 0);
  auto r2 = substream(9, StreamTag::perturb, 0);
  const auto a = perturb_hamiltonian(emb, nm, r1);
  const auto b = perturb_hamiltonian(emb, nm, r2);
  EXPECT_EQ(a.physical, b.physical);
  EXPECT_NE(a.physical, emb.physical);
  // Only values move; structure and provenance are kept.
  EXPECT_EQ(a.provenance, emb.provenance);
  EXPECT_EQ(a.physical.J.size(), emb.physical.J.size());
}

TEST(PerturbHamiltonian, PerCoefficientMoments) {
  IsingModel logical(2);
  logical.J[{0, 1}] = 0.5;
  const auto emb = build_embedded_ising(logical, std::vector<std::size_t>{2, 2}, 1.0);
  const NoiseModel nm{0.05, 0.02, 0, 0};
  std::vector<double> dh, dj;
  for (std::size_t r = 0; r < 100'000; ++r) {
    auto rng = substream(21, StreamTag::perturb, r);
    const auto out = perturb_hamiltonian(emb, nm, rng);
    dh.push_back(out.physical.h[1] - emb.physical.h[1]);
    dj.push_back(out.physical.J.at({0, 1}) - emb.physical.J.at({0, 1}));
  }
  EXPECT_LT(std::fabs(moments(dh).var / (0.05 * 0.05) - 1.0), 0.02);
  EXPECT_LT(std::fabs(moments(dj).var / (0.02 * 0.02) - 1.0), 0.02);
}
