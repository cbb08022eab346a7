#pragma once

// Chains, embedded Hamiltonians and chain-length models.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "chainbreak/problem.hpp"
#include "chainbreak/regression.hpp"
#include "chainbreak/rng.hpp"
#include "chainbreak/topology.hpp"

namespace chainbreak {

using Chain = std::vector<std::size_t>;

/// Logical vertex i is represented by the physical qubits chains[i].
struct Embedding {
  std::vector<Chain> chains;
  std::vector<EdgeKey> source_edges;

  friend bool operator==(const Embedding&, const Embedding&) = default;
};

/// Mean chain length as a linear function of logical problem size L,
/// with optional integer jitter of at most +-jitter per chain.
struct ChainLengthModel {
  double slope = 0.122;
  double intercept = 1.0;
  unsigned jitter = 0;

  void validate() const {
    if (!(slope >= 0.0) || !std::isfinite(slope))
      throw std::invalid_argument("chain-length slope must be finite and >= 0");
    if (!std::isfinite(intercept)) throw std::invalid_argument("chain-length intercept must be finite");
  }

  long long base_length(std::size_t L) const {
    return std::llround(slope * static_cast<double>(L) + intercept);
  }
};

/// Chain length as a function of the grid parameter m: alpha * m + beta.
/// Neither constant is known for Zephyr clique embeddings; both are inputs.
struct GridChainLengthModel {
  double alpha = 0.0;
  double beta = 1.0;

  double length(double m) const { return alpha * m + beta; }
};

inline std::vector<std::size_t> synth_chain_lengths(std::size_t L, const ChainLengthModel& model,
                                                    std::uint64_t seed) {
  if (L < 1) throw std::invalid_argument("synth_chain_lengths: L must be >= 1");
  model.validate();
  const long long base = model.base_length(L);
  std::vector<std::size_t> lengths(L);
  auto rng = substream(seed, StreamTag::chain_jitter, L);
  const long long span = 2LL * model.jitter + 1;
  for (auto& len : lengths) {
    long long value = base;
    if (model.jitter > 0) value += static_cast<long long>(rng() % static_cast<std::uint64_t>(span)) - model.jitter;
    len = static_cast<std::size_t>(std::max(1LL, value));
  }
  return lengths;
}

struct ChainStats {
  double mean = 0.0;
  std::size_t min = 0;
  std::size_t max = 0;
  std::map<std::size_t, std::size_t> histogram;
};

inline ChainStats chain_stats(std::span<const std::size_t> lengths) {
  if (lengths.empty()) throw std::invalid_argument("chain_stats: no chains");
  ChainStats s;
  s.min = *std::min_element(lengths.begin(), lengths.end());
  s.max = *std::max_element(lengths.begin(), lengths.end());
  double total = 0.0;
  for (auto len : lengths) {
    total += static_cast<double>(len);
    ++s.histogram[len];
  }
  s.mean = total / static_cast<double>(lengths.size());
  return s;
}

inline std::vector<std::size_t> chain_lengths(const Embedding& e) {
  std::vector<std::size_t> lengths;
  lengths.reserve(e.chains.size());
  for (const auto& c : e.chains) lengths.push_back(c.size());
  return lengths;
}

inline ChainStats chain_stats(const Embedding& e) { return chain_stats(chain_lengths(e)); }

// ---------------------------------------------------------------------------
// Embedded Hamiltonian

enum class CouplerRole { inter_chain, intra_chain };

/// intra_chain couplers have i == j.
struct CouplerProvenance {
  CouplerRole role = CouplerRole::inter_chain;
  std::size_t i = 0;
  std::size_t j = 0;

  friend bool operator==(const CouplerProvenance&, const CouplerProvenance&) = default;
};

/// Physical Ising model for a logical model spread over chains.
///
/// Physical spins use compact indices 0..P-1, assigned chain by chain;
/// qubit_ids maps them back to hardware ids.  In the library's minimisation
/// convention intra-chain couplers hold -k, so aligned chains lower the energy.
struct EmbeddedIsing {
  IsingModel physical;
  double chain_strength = 0.0;
  std::map<EdgeKey, CouplerProvenance> provenance;
  std::vector<Chain> chains;
  std::vector<std::size_t> qubit_ids;

  std::size_t intra_chain_edge_count() const {
    return static_cast<std::size_t>(std::count_if(provenance.begin(), provenance.end(), [](const auto& kv) {
      return kv.second.role == CouplerRole::intra_chain;
    }));
  }

  /// Physical spins with every qubit of chain i set to logical[i].
  Spins aligned_spins(std::span<const Spin> logical) const {
    if (logical.size() != chains.size())
      throw std::invalid_argument("aligned_spins: logical assignment has wrong length");
    Spins s(physical.n, 1);
    for (std::size_t i = 0; i < chains.size(); ++i)
      for (auto p : chains[i]) s[p] = logical[i];
    return s;
  }
};

namespace detail {

struct ChainLayout {
  std::vector<Chain> chains;                                   // compact ids
  std::vector<std::size_t> qubit_ids;                          // compact -> hardware
  std::vector<EdgeKey> intra;                                  // compact ids
  std::map<EdgeKey, std::vector<EdgeKey>> inter;               // logical edge -> physical edges
};

inline EmbeddedIsing assemble(const IsingModel& logical, ChainLayout layout, double k) {
  EmbeddedIsing emb;
  emb.chain_strength = k;
  emb.physical = IsingModel(layout.qubit_ids.size());
  emb.physical.offset = logical.offset;

  for (std::size_t i = 0; i < layout.chains.size(); ++i) {
    const double share = logical.h[i] / static_cast<double>(layout.chains[i].size());
    for (auto p : layout.chains[i]) emb.physical.h[p] = share;
  }

  std::vector<std::size_t> owner(layout.qubit_ids.size());
  for (std::size_t i = 0; i < layout.chains.size(); ++i)
    for (auto p : layout.chains[i]) owner[p] = i;

  for (const auto& e : layout.intra) {
    const auto key = make_edge(e.first, e.second);
    emb.physical.J[key] = -k;
    emb.provenance[key] = {CouplerRole::intra_chain, owner[key.first], owner[key.first]};
  }
  for (const auto& [logical_edge, physical_edges] : layout.inter) {
    const double share = logical.J.at(logical_edge) / static_cast<double>(physical_edges.size());
    for (const auto& e : physical_edges) {
      const auto key = make_edge(e.first, e.second);
      emb.physical.J[key] = share;
      emb.provenance[key] = {CouplerRole::inter_chain, logical_edge.first, logical_edge.second};
    }
  }
  emb.chains = std::move(layout.chains);
  emb.qubit_ids = std::move(layout.qubit_ids);
  return emb;
}

}  // namespace detail

/// Length-only embedding: chain i becomes a path of fresh consecutive ids and
/// every logical coupler is realised by one edge joining the lowest-index
/// qubits of the two chains.
inline EmbeddedIsing build_embedded_ising(const IsingModel& logical, std::span<const std::size_t> lengths,
                                          double k) {
  validate(logical);
  if (!(k > 0.0)) throw std::invalid_argument("chain strength must be > 0");
  if (lengths.size() != logical.n)
    throw std::invalid_argument("chain count " + std::to_string(lengths.size()) + " differs from n = " +
                                std::to_string(logical.n));

  detail::ChainLayout layout;
  std::size_t next = 0;
  for (auto len : lengths) {
    if (len < 1) throw std::invalid_argument("chain length must be >= 1");
    Chain c(len);
    std::iota(c.begin(), c.end(), next);
    for (std::size_t q = 1; q < len; ++q) layout.intra.emplace_back(next + q - 1, next + q);
    next += len;
    layout.chains.push_back(std::move(c));
  }
  layout.qubit_ids.resize(next);
  std::iota(layout.qubit_ids.begin(), layout.qubit_ids.end(), std::size_t{0});
  for (const auto& [key, value] : logical.J)
    layout.inter[key] = {EdgeKey{layout.chains[key.first].front(), layout.chains[key.second].front()}};
  return detail::assemble(logical, std::move(layout), k);
}

/// Explicit embedding.  With a hardware graph every hardware coupler inside a
/// chain carries -k and every hardware coupler between two chains whose
/// logical pair has a coupler carries an equal share of it; a logical coupler
/// with no hardware realisation is an error.  Without hardware the chain's
/// listed order is taken as a path and logical couplers use the lowest ids.
inline EmbeddedIsing build_embedded_ising(const IsingModel& logical, const Embedding& embedding, double k,
                                          const ZephyrGraph* hardware = nullptr) {
  validate(logical);
  if (!(k > 0.0)) throw std::invalid_argument("chain strength must be > 0");
  if (embedding.chains.size() != logical.n)
    throw std::invalid_argument("chain count " + std::to_string(embedding.chains.size()) +
                                " differs from n = " + std::to_string(logical.n));

  detail::ChainLayout layout;
  std::unordered_map<std::size_t, std::size_t> compact;  // hardware id -> compact id
  std::unordered_map<std::size_t, std::size_t> owner;    // hardware id -> logical vertex
  for (std::size_t i = 0; i < embedding.chains.size(); ++i) {
    const auto& chain = embedding.chains[i];
    if (chain.empty()) throw std::invalid_argument("chain " + std::to_string(i) + " is empty");
    Chain c;
    for (auto q : chain) {
      if (hardware && q >= hardware->vertex_count())
        throw std::invalid_argument("qubit " + std::to_string(q) + " is not in the hardware graph");
      if (!owner.emplace(q, i).second)
        throw std::invalid_argument("qubit " + std::to_string(q) + " appears in more than one chain");
      compact[q] = layout.qubit_ids.size();
      c.push_back(layout.qubit_ids.size());
      layout.qubit_ids.push_back(q);
    }
    layout.chains.push_back(std::move(c));
  }

  if (hardware) {
    std::map<EdgeKey, std::vector<EdgeKey>> between;
    for (const auto& e : hardware->edges) {
      const auto ia = owner.find(e.a);
      const auto ib = owner.find(e.b);
      if (ia == owner.end() || ib == owner.end()) continue;
      const EdgeKey phys{compact[e.a], compact[e.b]};
      if (ia->second == ib->second) {
        layout.intra.push_back(phys);
      } else {
        between[make_edge(ia->second, ib->second)].push_back(phys);
      }
    }
    for (const auto& [key, value] : logical.J) {
      auto it = between.find(key);
      if (it == between.end())
        throw std::invalid_argument("logical coupler (" + std::to_string(key.first) + ", " +
                                    std::to_string(key.second) + ") has no hardware realisation");
      layout.inter[key] = it->second;
    }
  } else {
    for (const auto& c : layout.chains)
      for (std::size_t q = 1; q < c.size(); ++q) layout.intra.emplace_back(c[q - 1], c[q]);
    for (const auto& [key, value] : logical.J) {
      const auto& ci = embedding.chains[key.first];
      const auto& cj = embedding.chains[key.second];
      const auto qi = *std::min_element(ci.begin(), ci.end());
      const auto qj = *std::min_element(cj.begin(), cj.end());
      layout.inter[key] = {EdgeKey{compact[qi], compact[qj]}};
    }
  }
  return detail::assemble(logical, std::move(layout), k);
}

// ---------------------------------------------------------------------------
// Validation against a hardware graph

enum class ViolationKind { empty_chain, unknown_qubit, overlap, disconnected, missing_edge };

struct EmbeddingViolation {
  ViolationKind kind;
  std::size_t i = 0;      // chain (or first chain of a pair)
  std::size_t j = 0;      // second chain for overlap / missing_edge
  std::size_t qubit = 0;  // offending qubit for unknown_qubit / overlap
  std::string message;
};

struct EmbeddingReport {
  std::vector<EmbeddingViolation> violations;

  bool valid() const noexcept { return violations.empty(); }
  std::size_t count(ViolationKind kind) const {
    return static_cast<std::size_t>(std::count_if(violations.begin(), violations.end(),
                                                  [kind](const auto& v) { return v.kind == kind; }));
  }
};

/// Checks non-emptiness, disjointness, chain connectivity and coverage of
/// every logical edge.  Violations are reported, never thrown.
inline EmbeddingReport validate_embedding(const Embedding& e, const ZephyrGraph& hardware,
                                          std::span<const EdgeKey> logical_edges) {
  EmbeddingReport report;
  auto add = [&report](ViolationKind kind, std::size_t i, std::size_t j, std::size_t qubit, std::string msg) {
    report.violations.push_back({kind, i, j, qubit, std::move(msg)});
  };

  const std::size_t nv = hardware.vertex_count();
  std::unordered_map<std::size_t, std::size_t> owner;
  for (std::size_t i = 0; i < e.chains.size(); ++i) {
    if (e.chains[i].empty()) add(ViolationKind::empty_chain, i, i, 0, "chain " + std::to_string(i) + " is empty");
    for (auto q : e.chains[i]) {
      if (q >= nv) {
        add(ViolationKind::unknown_qubit, i, i, q, "qubit " + std::to_string(q) + " not in hardware graph");
        continue;
      }
      auto [it, inserted] = owner.emplace(q, i);
      if (!inserted && it->second != i)
        add(ViolationKind::overlap, it->second, i, q,
            "qubit " + std::to_string(q) + " shared by chains " + std::to_string(it->second) + " and " +
                std::to_string(i));
    }
  }

  const auto adj = hardware.adjacency();
  for (std::size_t i = 0; i < e.chains.size(); ++i) {
    std::vector<std::size_t> members;
    for (auto q : e.chains[i])
      if (q < nv) members.push_back(q);
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    if (members.size() <= 1) continue;

    std::vector<std::size_t> stack{members.front()};
    std::vector<std::size_t> seen{members.front()};
    while (!stack.empty()) {
      const auto q = stack.back();
      stack.pop_back();
      for (auto r : adj[q]) {
        if (!std::binary_search(members.begin(), members.end(), r)) continue;
        if (std::find(seen.begin(), seen.end(), r) != seen.end()) continue;
        seen.push_back(r);
        stack.push_back(r);
      }
    }
    if (seen.size() != members.size())
      add(ViolationKind::disconnected, i, i, 0, "chain " + std::to_string(i) + " is not connected");
  }

  for (const auto& le : logical_edges) {
    if (le.first >= e.chains.size() || le.second >= e.chains.size()) {
      add(ViolationKind::missing_edge, le.first, le.second, 0, "logical edge refers to a missing chain");
      continue;
    }
    bool found = false;
    for (auto q : e.chains[le.first]) {
      if (q >= nv) continue;
      for (auto r : adj[q]) {
        auto it = owner.find(r);
        if (it != owner.end() && it->second == le.second) {
          found = true;
          break;
        }
      }
      if (found) break;
    }
    if (!found)
      add(ViolationKind::missing_edge, le.first, le.second, 0,
          "no hardware edge between chains " + std::to_string(le.first) + " and " + std::to_string(le.second));
  }
  return report;
}

}  // namespace chainbreak
