#pragma once

// JSON serialization (nlohmann::json ADL hooks) for the library's data types.
//
// Sparse coupler maps are written as [[i, j, value], ...] in lexicographic
// key order.

#include <fstream>
#include <filesystem>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "chainbreak/csv.hpp"
#include "chainbreak/embedding.hpp"
#include "chainbreak/fitting.hpp"
#include "chainbreak/noise.hpp"
#include "chainbreak/problem.hpp"
#include "chainbreak/sampler.hpp"
#include "chainbreak/topology.hpp"

namespace chainbreak {

using json = nlohmann::json;

namespace detail {

inline json couplers_to_json(const CouplerMap& m) {
  json out = json::array();
  for (const auto& [key, value] : m) out.push_back({key.first, key.second, value});
  return out;
}

inline CouplerMap couplers_from_json(const json& j) {
  CouplerMap m;
  for (const auto& t : j) {
    if (!t.is_array() || t.size() != 3) throw std::invalid_argument("coupler entry must be [i, j, value]");
    m[make_edge(t[0].get<std::size_t>(), t[1].get<std::size_t>())] = t[2].get<double>();
  }
  return m;
}

}  // namespace detail

inline void to_json(json& j, const QuboInstance& q) {
  j = json{{"L", q.L},
           {"diag", q.diag},
           {"offdiag", detail::couplers_to_json(q.offdiag)},
           {"density", q.density},
           {"seed", q.seed}};
}

inline void from_json(const json& j, QuboInstance& q) {
  q.L = j.at("L").get<std::size_t>();
  q.diag = j.at("diag").get<std::vector<double>>();
  q.offdiag = detail::couplers_from_json(j.at("offdiag"));
  q.density = j.value("density", 0.0);
  q.seed = j.value("seed", std::uint64_t{0});
  validate(q);
}

inline void to_json(json& j, const IsingModel& m) {
  j = json{{"n", m.n}, {"h", m.h}, {"J", detail::couplers_to_json(m.J)}, {"offset", m.offset}};
}

inline void from_json(const json& j, IsingModel& m) {
  m.n = j.at("n").get<std::size_t>();
  m.h = j.at("h").get<std::vector<double>>();
  m.J = detail::couplers_from_json(j.at("J"));
  m.offset = j.value("offset", 0.0);
  validate(m);
}

inline void to_json(json& j, const NoiseModel& nm) {
  j = json{{"sigma_h", nm.sigma_h},
           {"sigma_c", nm.sigma_c},
           {"corr_strength", nm.corr_strength},
           {"corr_exponent", nm.corr_exponent}};
}

inline void from_json(const json& j, NoiseModel& nm) {
  nm.sigma_h = j.value("sigma_h", 0.0);
  nm.sigma_c = j.value("sigma_c", 0.0);
  nm.corr_strength = j.value("corr_strength", 0.0);
  nm.corr_exponent = j.value("corr_exponent", 0.0);
  nm.validate();
}

inline void to_json(json& j, const ZephyrGraph& g) {
  json vertices = json::array();
  for (const auto& v : g.vertices) vertices.push_back({v.u, v.w, v.k, v.j, v.z});
  json edges = json::array();
  for (const auto& e : g.edges) edges.push_back({e.a, e.b, std::string(to_string(e.cls))});
  j = json{{"m", g.m}, {"t", g.t}, {"vertices", std::move(vertices)}, {"edges", std::move(edges)}};
}

inline void from_json(const json& j, ZephyrGraph& g) {
  g.m = j.at("m").get<int>();
  g.t = j.at("t").get<int>();
  g.vertices.clear();
  for (const auto& v : j.at("vertices"))
    g.vertices.push_back({v.at(0).get<int>(), v.at(1).get<int>(), v.at(2).get<int>(), v.at(3).get<int>(),
                          v.at(4).get<int>()});
  g.edges.clear();
  for (const auto& e : j.at("edges"))
    g.edges.push_back({e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>(),
                       coupler_class_from_string(e.at(2).get<std::string>())});
}

inline void to_json(json& j, const Embedding& e) {
  j = json{{"chains", e.chains}};
  if (!e.source_edges.empty()) {
    json edges = json::array();
    for (const auto& [a, b] : e.source_edges) edges.push_back({a, b});
    j["source_edges"] = std::move(edges);
  }
}

inline void from_json(const json& j, Embedding& e) {
  e.chains = j.at("chains").get<std::vector<Chain>>();
  e.source_edges.clear();
  if (j.contains("source_edges"))
    for (const auto& pair : j.at("source_edges"))
      e.source_edges.push_back(make_edge(pair.at(0).get<std::size_t>(), pair.at(1).get<std::size_t>()));
}

inline void to_json(json& j, const EmbeddedIsing& emb) {
  json prov = json::array();
  for (const auto& [key, p] : emb.provenance) {
    if (p.role == CouplerRole::intra_chain) {
      prov.push_back({key.first, key.second, "intra_chain", p.i});
    } else {
      prov.push_back({key.first, key.second, "inter_chain", p.i, p.j});
    }
  }
  j = json{{"physical", emb.physical},
           {"chain_strength", emb.chain_strength},
           {"chains", emb.chains},
           {"qubit_ids", emb.qubit_ids},
           {"provenance", std::move(prov)}};
}

inline void to_json(json& j, const Read& r) {
  std::vector<int> spins(r.physical_spins.begin(), r.physical_spins.end());
  j = json{{"spins", std::move(spins)}, {"energy", r.energy}, {"cbf", r.cbf}};
}

inline void from_json(const json& j, Read& r) {
  const auto spins = j.at("spins").get<std::vector<int>>();
  r.physical_spins.assign(spins.begin(), spins.end());
  r.energy = j.at("energy").get<double>();
  r.cbf = j.value("cbf", 0.0);
}

inline void to_json(json& j, const SampleSet& ss) {
  j = json{{"reads", ss.reads},
           {"metadata",
            {{"reads", ss.info.reads},
             {"sweeps", ss.info.sweeps},
             {"seed", ss.info.seed},
             {"schedule", ss.info.schedule}}}};
}

inline void from_json(const json& j, SampleSet& ss) {
  ss.reads = j.at("reads").get<std::vector<Read>>();
  const auto& md = j.at("metadata");
  ss.info.reads = md.value("reads", ss.reads.size());
  ss.info.sweeps = md.value("sweeps", std::size_t{0});
  ss.info.seed = md.value("seed", std::uint64_t{0});
  ss.info.schedule = md.value("schedule", std::string{});
}

/// "read,energy,cbf"
inline CsvTable sample_summary(const SampleSet& ss) {
  CsvTable t{{"read", "energy", "cbf"}, {}};
  for (std::size_t r = 0; r < ss.reads.size(); ++r) t.add(r, ss.reads[r].energy, ss.reads[r].cbf);
  return t;
}

inline void to_json(json& j, const GridRange& g) { j = json{{"lo", g.lo}, {"hi", g.hi}, {"step", g.step}}; }

inline void from_json(const json& j, GridRange& g) {
  g.lo = j.at("lo").get<double>();
  g.hi = j.at("hi").get<double>();
  g.step = j.at("step").get<double>();
}

inline void to_json(json& j, const FitGrid& g) {
  j = json{{"sigma_h", g.sigma_h}, {"sigma_c", g.sigma_c}, {"kappa", g.kappa}};
}

inline void from_json(const json& j, FitGrid& g) {
  if (j.contains("sigma_h")) g.sigma_h = j.at("sigma_h").get<GridRange>();
  if (j.contains("sigma_c")) g.sigma_c = j.at("sigma_c").get<GridRange>();
  if (j.contains("kappa")) g.kappa = j.at("kappa").get<GridRange>();
  g.validate();
}

inline void to_json(json& j, const FitResult& fr) {
  json rows = json::array();
  for (const auto& r : fr.per_L)
    rows.push_back({{"L", r.L}, {"cbf_obs", r.cbf_obs}, {"cbf_pred", r.cbf_pred}, {"abs_err", r.abs_err}});
  j = json{{"sigma_h", fr.sigma_h}, {"sigma_c", fr.sigma_c}, {"kappa", fr.kappa}, {"sse", fr.sse},
           {"per_L", std::move(rows)}};
}

inline void from_json(const json& j, FitResult& fr) {
  fr.sigma_h = j.at("sigma_h").get<double>();
  fr.sigma_c = j.at("sigma_c").get<double>();
  fr.kappa = j.at("kappa").get<double>();
  fr.sse = j.at("sse").get<double>();
  fr.per_L.clear();
  for (const auto& r : j.at("per_L"))
    fr.per_L.push_back({r.at("L").get<std::size_t>(), r.at("cbf_obs").get<double>(), r.at("cbf_pred").get<double>(),
                        r.at("abs_err").get<double>()});
}

// ---------------------------------------------------------------------------
// Files

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

inline void write_json_file(const std::filesystem::path& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

inline void write_csv_file(const std::filesystem::path& path, const CsvTable& t) {
  write_text_file(path, to_csv_string(t));
}

inline CsvTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_csv(in);
}

}  // namespace chainbreak
