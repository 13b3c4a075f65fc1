#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qwalk/io/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"qwalk: continuous-time and coined quantum walk simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::size_t> plot_index;
  auto* simulate = app.add_subcommand("simulate", "Run a simulation described by a JSON config");
  simulate->add_option("config", config_path, "Run configuration (JSON)")->required();
  simulate->add_option("--out-dir", out_dir, "Directory for output files");
  simulate->add_option("--plot", plot_index, "Write plot.svg for this snapshot index");

  std::size_t n = 0;
  std::size_t iters = 0;
  std::string engine_name = "serial";
  std::optional<unsigned> threads;
  auto* bench = app.add_subcommand("benchmark", "Time repeated dense matrix-vector products");
  bench->add_option("--n", n, "Matrix order")->required();
  bench->add_option("--iters", iters, "Number of products")->required();
  bench->add_option("--engine", engine_name, "serial or parallel")->check(CLI::IsMember({"serial", "parallel"}));
  bench->add_option("--threads", threads, "Worker threads for the parallel engine (default: QWALK_THREADS or all)")
      ->check(CLI::PositiveNumber);

  std::vector<std::string> graph_tokens;
  bool arcs = false;
  auto* graph = app.add_subcommand("graph", "Describe a graph family or graph file");
  graph->add_option("spec", graph_tokens, "cycle N | line N | grid NX NY [open] | hypercube D | FILE")->required();
  graph->add_flag("--arcs", arcs, "List the ordered arc basis");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : qwalk::io::kExitConfig;
  }

  if (*simulate) return qwalk::io::cmd_simulate(config_path, out_dir, plot_index, std::cout, std::cerr);
  if (*bench) {
    const auto kind = engine_name == "parallel" ? qwalk::EngineKind::ParallelCpu : qwalk::EngineKind::Serial;
    return qwalk::io::cmd_benchmark(n, iters, kind, threads, std::cout, std::cerr);
  }
  return qwalk::io::cmd_graph(graph_tokens, arcs, std::cout, std::cerr);
}
