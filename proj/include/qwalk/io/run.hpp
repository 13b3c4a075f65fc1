#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "qwalk/backend/engine.hpp"
#include "qwalk/coined.hpp"
#include "qwalk/ctqw.hpp"
#include "qwalk/graphs.hpp"
#include "qwalk/io/config.hpp"

namespace qwalk::io {

/// Probabilities of one snapshot. For the coined model `t` is the step count.
struct DistributionRecord {
  std::size_t k = 0;
  double t = 0.0;
  std::vector<double> p;
};

struct SimulationResult {
  Model model = Model::Ctqw;
  nlohmann::json graph;  // descriptor written to the JSON sink
  GraphKind kind;
  std::vector<DistributionRecord> snapshots;
};

inline nlohmann::json describe_graph(const Graph& g) {
  nlohmann::json d;
  d["family"] = family_name(g.kind());
  d["vertices"] = g.vertex_count();
  d["edges"] = g.edge_count();
  if (const auto* grid = std::get_if<family::Grid>(&g.kind())) {
    d["nx"] = grid->nx;
    d["ny"] = grid->ny;
    d["periodic"] = grid->periodic;
  } else if (const auto* cube = std::get_if<family::Hypercube>(&g.kind())) {
    d["dim"] = cube->dim;
  }
  return d;
}

/// Runs the configured walk. Configuration problems surface as ConfigError;
/// numeric failures as qwalk::Error.
inline SimulationResult run_simulation(const RunConfig& cfg) {
  Graph graph = build_graph(cfg);
  for (std::size_t i = 0; i < cfg.marked.size(); ++i) {
    if (cfg.marked[i] >= graph.vertex_count()) {
      throw ConfigError("marked[" + std::to_string(i) + "]", "vertex out of range");
    }
  }

  SimulationResult result{cfg.model, describe_graph(graph), graph.kind(), {}};
  Engine engine = init_engine(cfg.engine, cfg.threads);
  const auto ks = cfg.range().indices();

  std::vector<std::vector<double>> probs;
  std::vector<double> times;
  if (cfg.model == Model::Ctqw) {
    ctqw::ContinuousTimeWalk walk(ctqw::CtqwSpec{std::move(graph), cfg.gamma, cfg.delta_t, cfg.marked});
    const WalkState psi0 = assemble_initial_state(cfg, walk.spec().graph, nullptr);
    const auto states = walk.simulate(engine, cfg.range(), psi0, cfg.tolerance);
    probs = walk.probability_distribution(states);
    for (auto k : ks) times.push_back(walk.time_of(k));
  } else {
    if (graph.edge_count() == 0) throw ConfigError("graph", "coined walks need at least one edge");
    coined::CoinedSpec spec{std::move(graph), cfg.shift, cfg.coin, cfg.marked, cfg.marked_policy};
    std::optional<coined::CoinedWalk> walk;
    try {
      walk.emplace(engine, std::move(spec));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::UnsupportedGraphForPersistentShift) throw ConfigError("shift", e.what());
      throw;
    }
    const WalkState psi0 = assemble_initial_state(cfg, walk->spec().graph, &walk->arc_basis());
    const auto states = walk->simulate(engine, cfg.range(), psi0);
    probs = walk->probability_distribution(states);
    for (auto k : ks) times.push_back(static_cast<double>(k));
  }
  engine.stop();

  for (std::size_t i = 0; i < ks.size(); ++i) {
    result.snapshots.push_back({ks[i], times[i], std::move(probs[i])});
  }
  return result;
}

}  // namespace qwalk::io
