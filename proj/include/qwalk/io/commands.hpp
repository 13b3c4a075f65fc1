#pragma once

#include <filesystem>
#include <new>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qwalk/error.hpp"
#include "qwalk/graphs.hpp"
#include "qwalk/io/benchmark.hpp"
#include "qwalk/io/config.hpp"
#include "qwalk/io/graph_io.hpp"
#include "qwalk/io/run.hpp"
#include "qwalk/io/sinks.hpp"

namespace qwalk::io {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitNumeric = 2, kExitIo = 3 };

/// `qwalk simulate`: runs the config and writes the requested sinks into
/// `out_dir`. `plot_index` forces an SVG of that snapshot.
inline int cmd_simulate(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
                        std::optional<std::size_t> plot_index, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig cfg = load_config(config_path);
    const SimulationResult result = run_simulation(cfg);

    const bool svg = plot_index.has_value() || cfg.outputs.count("svg");
    const std::size_t plot_at = plot_index.value_or(result.snapshots.size() - 1);
    if (svg && plot_at >= result.snapshots.size()) {
      throw ConfigError("--plot", "snapshot index " + std::to_string(plot_at) + " out of range (have " +
                                      std::to_string(result.snapshots.size()) + ")");
    }

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
    if (cfg.outputs.count("json")) write_json(result, out_dir / "distributions.json");
    if (cfg.outputs.count("csv")) write_csv(result, out_dir / "distributions.csv");
    if (cfg.outputs.count("frames")) write_frames(result, out_dir / "frames");
    if (svg) write_svg(result, plot_at, cfg.plot, out_dir / "plot.svg");
    out << "wrote " << result.snapshots.size() << " snapshots to " << out_dir.string() << '\n';
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::bad_alloc&) {
    err << "error: out of memory\n";
    return kExitNumeric;
  }
}

/// `qwalk benchmark`: prints one JSON report line.
inline int cmd_benchmark(std::size_t n, std::size_t iters, EngineKind engine, std::optional<unsigned> threads,
                         std::ostream& out, std::ostream& err) {
  if (n == 0 || iters == 0) {
    err << "error: --n and --iters must be >= 1\n";
    return kExitConfig;
  }
  try {
    if (!threads && engine == EngineKind::ParallelCpu) threads = detail::threads_from_env();
    out << format_report(run_benchmark(engine, threads, n, iters)) << '\n';
    return kExitOk;
  } catch (const std::bad_alloc&) {
    err << "error: cannot allocate a " << n << "x" << n << " matrix\n";
    return kExitNumeric;
  } catch (const std::length_error&) {
    err << "error: cannot allocate a " << n << "x" << n << " matrix\n";
    return kExitNumeric;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::UnsupportedEngineKind || e.code() == ErrorCode::InvalidArgument ? kExitConfig
                                                                                                  : kExitNumeric;
  }
}

/// Parses "cycle N", "line N", "grid NX NY [open]", "hypercube D" or a
/// single graph file path.
inline Graph graph_from_tokens(const std::vector<std::string>& tokens) {
  auto count = [&](std::size_t i) -> std::size_t {
    if (i >= tokens.size()) throw Error(ErrorCode::InvalidArgument, "missing size parameter for " + tokens[0]);
    const auto& s = tokens[i];
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
      throw Error(ErrorCode::InvalidArgument, "'" + s + "' is not a non-negative integer");
    }
    return static_cast<std::size_t>(std::stoull(s));
  };
  auto expect_arity = [&](std::size_t lo, std::size_t hi) {
    if (tokens.size() < lo || tokens.size() > hi) {
      throw Error(ErrorCode::InvalidArgument, "wrong number of parameters for " + tokens[0]);
    }
  };
  if (tokens.empty()) throw Error(ErrorCode::InvalidArgument, "no graph given");
  const auto& name = tokens[0];
  if (name == "cycle") {
    expect_arity(2, 2);
    return cycle(count(1));
  }
  if (name == "line") {
    expect_arity(2, 2);
    return line(count(1));
  }
  if (name == "hypercube") {
    expect_arity(2, 2);
    return hypercube(count(1));
  }
  if (name == "grid") {
    expect_arity(3, 4);
    bool periodic = true;
    if (tokens.size() == 4) {
      if (tokens[3] == "open") periodic = false;
      else if (tokens[3] != "periodic") throw Error(ErrorCode::InvalidArgument, "grid boundary must be periodic|open");
    }
    return grid(count(1), count(2), periodic);
  }
  expect_arity(1, 1);
  return load_graph_file(name);
}

/// `qwalk graph`: vertex/edge counts, degree sequence, optionally arcs.
inline int cmd_graph(const std::vector<std::string>& tokens, bool arcs, std::ostream& out, std::ostream& err) {
  try {
    const Graph g = graph_from_tokens(tokens);
    out << g.vertex_count() << " vertices, " << g.edge_count() << " edges\n";
    out << "degrees:";
    for (Vertex v = 0; v < g.vertex_count(); ++v) out << ' ' << g.degree(v);
    out << '\n';
    if (arcs) {
      const ArcBasis basis(g);
      for (std::size_t i = 0; i < basis.size(); ++i) {
        const Arc a = basis.at(i);
        out << i << ": (" << a.tail << ',' << a.head << ")\n";
      }
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace qwalk::io
