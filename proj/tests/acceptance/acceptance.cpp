// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "qwalk/io/benchmark.hpp"
#include "qwalk/qwalk.hpp"
#include "../support/oracles.hpp"

namespace {

using namespace qwalk;
namespace fs = std::filesystem;

struct Outcome {
  bool ok = true;
  std::string detail;
};

struct Criterion {
  std::string name;
  double time_limit;  // seconds; <= 0 means none
  std::function<Outcome()> body;
};

std::string fmt(const char* pattern, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, x);
  return buf;
}

coined::CoinedSpec grover_spec(Graph g, coined::ShiftKind shift) {
  return {std::move(g), shift, coined::CoinKind::Grover, {}, coined::MarkedPolicy::MinusIdentity};
}

oracle::EdgeGraph edges_of(const Graph& g) {
  oracle::EdgeGraph eg{g.vertex_count(), {}};
  for (Vertex v = 0; v < g.vertex_count(); ++v)
    for (auto w : g.neighbors(v))
      if (v < w) eg.edges.emplace_back(v, w);
  return eg;
}

// ---------------------------------------------------------------------------------

Outcome k2_closed_form() {
  Engine e = init_engine(EngineKind::Serial);
  const std::size_t samples = 50;
  const double dt = 2.0 * std::numbers::pi / static_cast<double>(samples - 1);
  const ctqw::ContinuousTimeWalk walk({graph_from_edges(2, {{0, 1}}), 1.0, dt, {}});
  const auto probs = walk.probability_distribution(walk.simulate(e, SimRange(samples), walk.ket(0)));
  double worst = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const double s = std::sin(walk.time_of(k));
    worst = std::max(worst, std::abs(probs[k][1] - s * s));
  }
  return {worst <= 1e-10, "max |p1 - sin^2| = " + fmt("%.2e", worst) + " over 50 times in [0, 2pi]"};
}

Outcome ctqw_oracle_suite() {
  Engine e = init_engine(EngineKind::Serial);
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<std::size_t> size(2, 32);
  std::uniform_real_distribution<double> density(0.05, 0.6), gamma(0.05, 2.0), time(0.01, 10.0);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto eg = oracle::random_graph(size(rng), density(rng), 1000, rng);
    std::vector<Vertex> marked;
    for (int m = 0; m < trial % 3; ++m) marked.push_back(std::uniform_int_distribution<Vertex>(0, eg.n - 1)(rng));
    const double g = gamma(rng), t = time(rng);
    const ctqw::ContinuousTimeWalk walk({graph_from_edges(eg.n, eg.edges), g, t, marked});
    const auto psi0 = oracle::random_unit_vector(eg.n, rng);
    const auto out = walk.simulate(e, SimRange(1, 2, 1), WalkState(Basis::Vertex, ComplexVector(psi0)));
    const auto ref = oracle::expm_action(oracle::dense_hamiltonian(eg, g, marked), t, oracle::to_eigen(psi0));
    worst = std::max(worst, oracle::max_abs_diff(oracle::to_eigen(out[0].amplitudes()), ref));
  }
  return {worst <= 1e-8, "200 instances, max componentwise error " + fmt("%.2e", worst)};
}

Outcome cycle101_spread() {
  Engine e = init_engine(EngineKind::Serial);
  const std::size_t n = 101, start = 50;
  const ctqw::ContinuousTimeWalk walk({cycle(n), 0.35, 0.5, {}});
  const auto states = walk.simulate(e, SimRange(101), walk.ket(start));
  const WalkState& last = states.back();
  const auto p = walk.probability_distribution(std::vector{last})[0];

  double total = 0.0, asym = 0.0;
  for (double x : p) total += x;
  for (std::size_t k = 1; k <= n / 2; ++k) asym = std::max(asym, std::abs(p[start + k] - p[start - k]));

  Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(n);
  e0(start) = 1.0;
  const auto ref = oracle::expm_action(oracle::dense_hamiltonian(edges_of(cycle(n)), 0.35, {}), 50.0, e0);
  const double err = oracle::max_abs_diff(oracle::to_eigen(last.amplitudes()), ref);

  const bool ok = std::abs(total - 1.0) <= 1e-10 && asym <= 1e-10 && err <= 1e-8 && walk.time_of(100) == 50.0;
  return {ok, "|sum-1| = " + fmt("%.2e", std::abs(total - 1.0)) + ", asymmetry " + fmt("%.2e", asym) +
                  ", oracle error " + fmt("%.2e", err)};
}

Outcome coined_oracle_suite() {
  Engine e = init_engine(EngineKind::Serial);
  std::mt19937_64 rng(777);
  std::uniform_int_distribution<std::size_t> size(2, 24), steps(0, 100);
  std::uniform_real_distribution<double> density(0.1, 0.7);
  double worst_state = 0.0, worst_unitary = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    oracle::EdgeGraph eg;
    do {
      eg = oracle::random_graph(size(rng), density(rng), 32, rng);
    } while (eg.edges.empty());
    const coined::CoinedWalk walk(e, grover_spec(graph_from_edges(eg.n, eg.edges), coined::ShiftKind::FlipFlop));

    const Eigen::MatrixXcd u = oracle::to_eigen(walk.get_evolution_operator());
    const auto m = u.rows();
    worst_unitary =
        std::max(worst_unitary, (u.adjoint() * u - Eigen::MatrixXcd::Identity(m, m)).cwiseAbs().maxCoeff());

    const auto t = steps(rng);
    const auto psi0 = oracle::random_unit_vector(walk.dim(), rng);
    const auto out = walk.simulate(e, SimRange(t, t + 1, 1), WalkState(Basis::Arc, ComplexVector(psi0)));

    const auto arcs = oracle::sorted_arcs(eg);
    const Eigen::MatrixXcd u_ref = oracle::dense_flip_flop(arcs) * oracle::dense_grover(arcs);
    Eigen::VectorXcd ref = oracle::to_eigen(psi0);
    for (std::size_t s = 0; s < t; ++s) ref = u_ref * ref;
    worst_state = std::max(worst_state, oracle::max_abs_diff(oracle::to_eigen(out[0].amplitudes()), ref));
  }
  return {worst_state <= 1e-10 && worst_unitary <= 1e-12,
          "200 graphs, max state error " + fmt("%.2e", worst_state) + ", max |U*U - I| " + fmt("%.2e", worst_unitary)};
}

Outcome grid21_persistent() {
  Engine e = init_engine(EngineKind::Serial);
  const std::size_t side = 21, c = 10, steps = 60;
  const Graph g = grid(side, side, true);
  const coined::CoinedWalk walk(e, grover_spec(g, coined::ShiftKind::Persistent));
  const Vertex centre = c + side * c;
  const WalkState psi0 = 0.5 * (walk.ket(centre, centre + 1) + walk.ket(centre, centre - 1) +
                                walk.ket(centre, centre + side) + walk.ket(centre, centre - side));
  const auto states = walk.simulate(e, SimRange(steps, steps + 1, 1), psi0);
  const auto p = walk.probability_distribution(states)[0];

  double total = 0.0;
  for (double x : p) total += x;
  double asym = 0.0;
  for (std::size_t y = 0; y < side; ++y) {
    for (std::size_t x = 0; x < side; ++x) {
      // (dx, dy) -> (-dy, dx) about the centre.
      const std::size_t rx = 2 * c - y, ry = x;
      asym = std::max(asym, std::abs(p[x + side * y] - p[rx + side * ry]));
    }
  }

  const auto arcs = oracle::sorted_arcs(edges_of(g));
  const Eigen::MatrixXcd s = oracle::dense_persistent_grid(arcs, side, side, true);
  const Eigen::MatrixXcd coin = oracle::dense_grover(arcs);
  Eigen::VectorXcd ref = oracle::to_eigen(psi0.amplitudes());
  for (std::size_t k = 0; k < steps; ++k) ref = s * (coin * ref);
  const double err = oracle::max_abs_diff(oracle::to_eigen(states[0].amplitudes()), ref);

  const bool ok = arcs.size() == 1764 && std::abs(total - 1.0) <= 1e-10 && asym <= 1e-10 && err <= 1e-9;
  return {ok, "dim " + std::to_string(arcs.size()) + ", |sum-1| = " + fmt("%.2e", std::abs(total - 1.0)) +
                  ", rotation asymmetry " + fmt("%.2e", asym) + ", oracle error " + fmt("%.2e", err)};
}

Outcome arc_ordering() {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> size(1, 30);
  std::uniform_real_distribution<double> density(0.0, 0.8);
  std::size_t mismatched = 0, off_block = 0, wrong_entry = 0, checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto eg = oracle::random_graph(size(rng), density(rng), 200, rng);
    const Graph g = graph_from_edges(eg.n, eg.edges);
    const ArcBasis basis(g);
    const auto expected = oracle::sorted_arcs(eg);
    if (basis.size() != expected.size()) {
      ++mismatched;
      continue;
    }
    for (std::size_t i = 0; i < basis.size(); ++i) {
      if (std::pair(basis.at(i).tail, basis.at(i).head) != expected[i] ||
          basis.index_of(expected[i].first, expected[i].second) != i) {
        ++mismatched;
      }
    }
    if (basis.size() == 0) continue;
    ++checked;

    const CsrMatrix coin = coined::grover_coin(basis);
    for (Vertex v = 0; v < eg.n; ++v) {
      const std::size_t lo = basis.span_begin(v), hi = basis.span_end(v);
      const double d = static_cast<double>(hi - lo);
      for (std::size_t i = lo; i < hi; ++i) {
        if (expected[i].first != v) ++mismatched;
        for (auto j : coin.row_cols(i))
          if (j < lo || j >= hi) ++off_block;
        for (std::size_t j = lo; j < hi; ++j) {
          if (coin.coeff(i, j) != ComplexScalar(2.0 / d - (i == j ? 1.0 : 0.0))) ++wrong_entry;
        }
      }
    }
  }
  return {mismatched == 0 && off_block == 0 && wrong_entry == 0,
          "100 graphs (" + std::to_string(checked) + " with edges): " + std::to_string(mismatched) +
              " ordering mismatches, " + std::to_string(off_block) + " off-block coin entries, " +
              std::to_string(wrong_entry) + " wrong block entries"};
}

Outcome backend_equivalence() {
  const std::size_t n = 2000, iters = 100;
  const unsigned threads = std::max(2u, std::thread::hardware_concurrency());
  const auto serial = io::run_benchmark(EngineKind::Serial, std::nullopt, n, iters);
  const auto parallel = io::run_benchmark(EngineKind::ParallelCpu, threads, n, iters);
  std::printf("  report: %s\n  report: %s\n", io::format_report(serial).c_str(), io::format_report(parallel).c_str());
  std::printf("  speedup (serial loop / parallel loop, informational): %.2f\n",
              serial.loop_seconds / parallel.loop_seconds);

  // Entries pass DBL_MAX before the 100th product; compare bit patterns.
  const auto& a = serial.result.entries();
  const auto& b = parallel.result.entries();
  const bool bitwise = a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(a[0])) == 0;
  std::size_t finite = 0;
  for (auto z : a) finite += std::isfinite(z.real()) && std::isfinite(z.imag());

  // First product, still finite: n (3+3i)(2+2i) = 12n i.
  const auto s1 = io::run_benchmark(EngineKind::Serial, std::nullopt, n, 1);
  const auto p1 = io::run_benchmark(EngineKind::ParallelCpu, threads, n, 1);
  double first_err = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    first_err = std::max(first_err, std::abs(s1.result[i] - ComplexScalar(0.0, 12.0 * n)));
    first_err = std::max(first_err, std::abs(p1.result[i] - s1.result[i]));
  }

  const bool ok = bitwise && io::digest(serial.result) == io::digest(parallel.result) && first_err <= 1e-12;
  return {ok, std::string(bitwise ? "bit-identical" : "DIFFERENT") + " after 100 products (" + std::to_string(finite) +
                  "/" + std::to_string(n) + " entries finite), first product error " + fmt("%.2e", first_err) +
                  ", parallel threads " + std::to_string(parallel.threads)};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const fs::path& config, const fs::path& out_dir) {
  const std::string cmd = std::string("\"") + QWALK_CLI_PATH + "\" simulate \"" + config.string() + "\" --out-dir \"" +
                          out_dir.string() + "\" > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome cli_round_trip() {
  const fs::path dir = fs::temp_directory_path() / ("qwalk_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  const nlohmann::json cfg = nlohmann::json::parse(R"({
    "schema": 1, "model": "ctqw",
    "graph": {"family": "cycle", "n": 101},
    "gamma": 0.35, "delta_t": 0.5,
    "initial_state": [["v:50", 1.0, 0.0]],
    "range": [0, 101, 10],
    "engine": "serial",
    "outputs": ["json", "csv"]
  })");
  std::ofstream(dir / "run.json") << cfg.dump(2);

  const int rc1 = run_cli(dir / "run.json", dir / "a");
  const int rc2 = run_cli(dir / "run.json", dir / "b");
  const std::string ja = read_file(dir / "a" / "distributions.json");
  const std::string jb = read_file(dir / "b" / "distributions.json");
  const bool identical = rc1 == 0 && rc2 == 0 && !ja.empty() && ja == jb;

  double worst = 0.0;
  std::size_t rows = 0, mismatched_rows = 0;
  if (identical) {
    const auto doc = nlohmann::json::parse(ja);
    std::istringstream csv(read_file(dir / "a" / "distributions.csv"));
    std::string line;
    std::getline(csv, line);
    while (std::getline(csv, line)) {
      std::size_t k = 0, v = 0;
      double t = 0.0, p = 0.0;
      if (std::sscanf(line.c_str(), "%zu,%lf,%zu,%lf", &k, &t, &v, &p) != 4) {
        ++mismatched_rows;
        continue;
      }
      const auto& snap = doc["snapshots"][k / 10];
      if (snap["k"].get<std::size_t>() != k || snap["t"].get<double>() != t) ++mismatched_rows;
      worst = std::max(worst, std::abs(snap["p"][v].get<double>() - p));
      ++rows;
    }
  }
  fs::remove_all(dir);
  const bool ok = identical && rows == 11 * 101 && mismatched_rows == 0 && worst <= 1e-15;
  return {ok, std::string(identical ? "two runs byte-identical" : "runs DIFFER or failed") + ", " +
                  std::to_string(rows) + " CSV rows, max JSON/CSV difference " + fmt("%.2e", worst)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"ctqw_two_vertex_closed_form", 1.0, k2_closed_form},
      {"ctqw_random_oracle_suite", 30.0, ctqw_oracle_suite},
      {"ctqw_cycle101_spread", 10.0, cycle101_spread},
      {"coined_random_oracle_suite", 60.0, coined_oracle_suite},
      {"coined_grid21_persistent", 30.0, grid21_persistent},
      {"arc_ordering_and_block_coin", 0.0, arc_ordering},
      {"backend_serial_parallel_benchmark", 0.0, backend_equivalence},
      {"cli_determinism_round_trip", 0.0, cli_round_trip},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string timing = fmt("%.2fs", secs);
    if (c.time_limit > 0.0) {
      timing += fmt(" (limit %.0fs)", c.time_limit);
      if (secs >= c.time_limit) {
        o.ok = false;
        timing += " TOO SLOW";
      }
    }
    std::printf("%s %-36s %s; %s\n", o.ok ? "PASS" : "FAIL", c.name.c_str(), o.detail.c_str(), timing.c_str());
    std::fflush(stdout);
    failures += o.ok ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
