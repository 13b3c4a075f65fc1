#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "qwalk/backend/engine.hpp"
#include "qwalk/coined.hpp"
#include "qwalk/ctqw.hpp"
#include "qwalk/graphs.hpp"
#include "qwalk/io/graph_io.hpp"
#include "qwalk/walk_state.hpp"

namespace qwalk::io {

inline constexpr int kConfigSchemaVersion = 1;

/// Invalid run configuration. `key()` is the dotted path of the offending
/// entry, e.g. "graph.n" or "initial_state[2]".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error("config key '" + key + "': " + message), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

enum class Model { Ctqw, Coined };

inline std::string to_string(Model m) { return m == Model::Ctqw ? "ctqw" : "coined"; }

struct FamilySpec {
  std::string name;  // cycle | line | grid | hypercube
  std::size_t n = 0;
  std::size_t nx = 0;
  std::size_t ny = 0;
  bool periodic = true;
  std::size_t dim = 0;
};

struct FileSpec {
  std::filesystem::path path;
  std::string format;  // mtx | json
};

struct AmplitudeTerm {
  std::string label;  // "v:12" or "a:3,4"
  double re = 0.0;
  double im = 0.0;
};

struct PlotStyle {
  int width = 720;
  int height = 360;
  std::string color = "#2b6cb0";
};

struct RunConfig {
  Model model = Model::Ctqw;
  std::optional<FamilySpec> family;
  std::optional<FileSpec> file;
  double gamma = 0.0;
  double delta_t = 0.0;
  coined::ShiftKind shift = coined::ShiftKind::FlipFlop;
  coined::CoinKind coin = coined::CoinKind::Grover;
  coined::MarkedPolicy marked_policy = coined::MarkedPolicy::MinusIdentity;
  std::vector<Vertex> marked;
  std::vector<AmplitudeTerm> initial_state;
  std::size_t range_start = 0;
  std::size_t range_stop = 1;
  std::size_t range_step = 1;
  EngineKind engine = EngineKind::Serial;
  std::optional<unsigned> threads;
  double tolerance = ctqw::kDefaultTolerance;
  std::set<std::string> outputs{"json"};
  PlotStyle plot;

  SimRange range() const { return SimRange(range_start, range_stop, range_step); }
};

namespace detail {

inline std::size_t get_count(const nlohmann::json& j, const std::string& key) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw ConfigError(key, "must be a non-negative integer");
  return j.get<std::size_t>();
}

inline double get_real(const nlohmann::json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError(key, "must be a number");
  return j.get<double>();
}

inline std::string get_string(const nlohmann::json& j, const std::string& key) {
  if (!j.is_string()) throw ConfigError(key, "must be a string");
  return j.get<std::string>();
}

inline void reject_unknown(const nlohmann::json& obj, const std::set<std::string>& allowed, const std::string& prefix) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(prefix + key, "unknown key");
  }
}

inline std::optional<unsigned> threads_from_env() {
  const char* env = std::getenv("QWALK_THREADS");
  if (env == nullptr || *env == '\0') return std::nullopt;
  char* end = nullptr;
  const long value = std::strtol(env, &end, 10);
  if (*end != '\0' || value <= 0) throw ConfigError("QWALK_THREADS", "must be a positive integer");
  return static_cast<unsigned>(value);
}

inline void parse_graph(const nlohmann::json& g, const std::filesystem::path& base_dir, RunConfig& cfg) {
  if (!g.is_object()) throw ConfigError("graph", "must be an object");
  const bool has_family = g.contains("family");
  const bool has_file = g.contains("file");
  if (has_family == has_file) throw ConfigError("graph", "exactly one of 'family' or 'file' is required");

  if (has_file) {
    reject_unknown(g, {"file", "format"}, "graph.");
    FileSpec file;
    file.path = get_string(g["file"], "graph.file");
    if (file.path.is_relative()) file.path = base_dir / file.path;
    if (g.contains("format")) {
      file.format = get_string(g["format"], "graph.format");
      if (file.format != "mtx" && file.format != "json") throw ConfigError("graph.format", "must be 'mtx' or 'json'");
    }
    cfg.file = std::move(file);
    return;
  }

  FamilySpec fam;
  fam.name = get_string(g["family"], "graph.family");
  if (fam.name == "cycle" || fam.name == "line") {
    reject_unknown(g, {"family", "n"}, "graph.");
    if (!g.contains("n")) throw ConfigError("graph.n", "required for " + fam.name);
    fam.n = get_count(g["n"], "graph.n");
  } else if (fam.name == "grid") {
    reject_unknown(g, {"family", "nx", "ny", "periodic"}, "graph.");
    if (!g.contains("nx")) throw ConfigError("graph.nx", "required for grid");
    if (!g.contains("ny")) throw ConfigError("graph.ny", "required for grid");
    fam.nx = get_count(g["nx"], "graph.nx");
    fam.ny = get_count(g["ny"], "graph.ny");
    if (g.contains("periodic")) {
      if (!g["periodic"].is_boolean()) throw ConfigError("graph.periodic", "must be a boolean");
      fam.periodic = g["periodic"].get<bool>();
    }
  } else if (fam.name == "hypercube") {
    reject_unknown(g, {"family", "dim"}, "graph.");
    if (!g.contains("dim")) throw ConfigError("graph.dim", "required for hypercube");
    fam.dim = get_count(g["dim"], "graph.dim");
  } else {
    throw ConfigError("graph.family", "unknown family '" + fam.name + "'");
  }
  cfg.family = std::move(fam);
}

}  // namespace detail

/// Parses and validates a run configuration document. Relative graph file
/// paths resolve against `base_dir`.
inline RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {}) {
  using detail::get_count;
  using detail::get_real;
  using detail::get_string;

  if (!doc.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  RunConfig cfg;

  if (!doc.contains("schema")) throw ConfigError("schema", "required");
  if (!doc["schema"].is_number_integer() || doc["schema"].get<long long>() != kConfigSchemaVersion) {
    throw ConfigError("schema", "must be " + std::to_string(kConfigSchemaVersion));
  }

  if (!doc.contains("model")) throw ConfigError("model", "required");
  const std::string model = get_string(doc["model"], "model");
  if (model == "ctqw") cfg.model = Model::Ctqw;
  else if (model == "coined") cfg.model = Model::Coined;
  else throw ConfigError("model", "must be 'ctqw' or 'coined'");

  std::set<std::string> allowed{"schema", "model",   "graph",  "marked",    "initial_state", "range",
                                "engine", "threads", "outputs", "plot"};
  if (cfg.model == Model::Ctqw) {
    allowed.insert({"gamma", "delta_t", "tolerance"});
  } else {
    allowed.insert({"shift", "coin", "marked_policy"});
  }
  for (const auto& [key, _] : doc.items()) {
    if (!allowed.count(key)) {
      throw ConfigError(key, "unknown key for model '" + model + "'");
    }
  }

  if (!doc.contains("graph")) throw ConfigError("graph", "required");
  detail::parse_graph(doc["graph"], base_dir, cfg);

  if (cfg.model == Model::Ctqw) {
    if (!doc.contains("gamma")) throw ConfigError("gamma", "required for ctqw");
    cfg.gamma = get_real(doc["gamma"], "gamma");
    if (!(cfg.gamma > 0.0) || !std::isfinite(cfg.gamma)) throw ConfigError("gamma", "must be positive");
    if (!doc.contains("delta_t")) throw ConfigError("delta_t", "required for ctqw");
    cfg.delta_t = get_real(doc["delta_t"], "delta_t");
    if (!(cfg.delta_t > 0.0) || !std::isfinite(cfg.delta_t)) throw ConfigError("delta_t", "must be positive");
    if (doc.contains("tolerance")) {
      cfg.tolerance = get_real(doc["tolerance"], "tolerance");
      if (!(cfg.tolerance > 0.0) || cfg.tolerance >= 1.0) throw ConfigError("tolerance", "must be in (0, 1)");
    }
  } else {
    try {
      if (doc.contains("shift")) cfg.shift = coined::shift_from_name(get_string(doc["shift"], "shift"));
    } catch (const Error& e) {
      throw ConfigError("shift", e.what());
    }
    try {
      if (doc.contains("coin")) cfg.coin = coined::coin_from_name(get_string(doc["coin"], "coin"));
    } catch (const Error& e) {
      throw ConfigError("coin", e.what());
    }
    try {
      if (doc.contains("marked_policy")) {
        cfg.marked_policy = coined::policy_from_name(get_string(doc["marked_policy"], "marked_policy"));
      }
    } catch (const Error& e) {
      throw ConfigError("marked_policy", e.what());
    }
  }

  if (doc.contains("marked")) {
    if (!doc["marked"].is_array()) throw ConfigError("marked", "must be an array of vertex ids");
    for (std::size_t i = 0; i < doc["marked"].size(); ++i) {
      cfg.marked.push_back(get_count(doc["marked"][i], "marked[" + std::to_string(i) + "]"));
    }
  }
  if (cfg.model == Model::Coined && !cfg.marked.empty() && cfg.marked_policy == coined::MarkedPolicy::None) {
    throw ConfigError("marked_policy", "must be 'minus_identity' when vertices are marked");
  }

  if (!doc.contains("initial_state")) throw ConfigError("initial_state", "required");
  const auto& init = doc["initial_state"];
  if (!init.is_array() || init.empty()) throw ConfigError("initial_state", "must be a non-empty array");
  for (std::size_t i = 0; i < init.size(); ++i) {
    const std::string key = "initial_state[" + std::to_string(i) + "]";
    const auto& term = init[i];
    if (!term.is_array() || term.size() != 3) throw ConfigError(key, "must be [label, re, im]");
    AmplitudeTerm t{get_string(term[0], key), get_real(term[1], key), get_real(term[2], key)};
    if (!std::isfinite(t.re) || !std::isfinite(t.im)) throw ConfigError(key, "amplitude must be finite");
    cfg.initial_state.push_back(std::move(t));
  }

  if (!doc.contains("range")) throw ConfigError("range", "required");
  const auto& range = doc["range"];
  if (range.is_number_integer()) {
    cfg.range_stop = get_count(range, "range");
  } else if (range.is_array() && range.size() == 3) {
    cfg.range_start = get_count(range[0], "range");
    cfg.range_stop = get_count(range[1], "range");
    cfg.range_step = get_count(range[2], "range");
  } else {
    throw ConfigError("range", "must be an integer or [start, stop, step]");
  }
  if (cfg.range_step == 0) throw ConfigError("range", "step must be >= 1");
  if (cfg.range_start >= cfg.range_stop) throw ConfigError("range", "must select at least one snapshot");

  if (doc.contains("engine")) {
    const std::string name = get_string(doc["engine"], "engine");
    if (name == "serial") cfg.engine = EngineKind::Serial;
    else if (name == "parallel") cfg.engine = EngineKind::ParallelCpu;
    else throw ConfigError("engine", "must be 'serial' or 'parallel'");
  }
  if (doc.contains("threads")) {
    const auto t = get_count(doc["threads"], "threads");
    if (t == 0) throw ConfigError("threads", "must be positive");
    cfg.threads = static_cast<unsigned>(t);
  } else {
    cfg.threads = detail::threads_from_env();
  }

  if (doc.contains("outputs")) {
    const auto& outs = doc["outputs"];
    if (!outs.is_array()) throw ConfigError("outputs", "must be an array");
    cfg.outputs.clear();
    for (std::size_t i = 0; i < outs.size(); ++i) {
      const std::string key = "outputs[" + std::to_string(i) + "]";
      const std::string sink = get_string(outs[i], key);
      if (sink != "json" && sink != "csv" && sink != "svg" && sink != "frames") {
        throw ConfigError(key, "unknown sink '" + sink + "' (json, csv, svg, frames)");
      }
      cfg.outputs.insert(sink);
    }
  }

  if (doc.contains("plot")) {
    const auto& plot = doc["plot"];
    if (!plot.is_object()) throw ConfigError("plot", "must be an object");
    detail::reject_unknown(plot, {"width", "height", "color"}, "plot.");
    if (plot.contains("width")) cfg.plot.width = static_cast<int>(get_count(plot["width"], "plot.width"));
    if (plot.contains("height")) cfg.plot.height = static_cast<int>(get_count(plot["height"], "plot.height"));
    if (plot.contains("color")) cfg.plot.color = get_string(plot["color"], "plot.color");
    if (cfg.plot.width < 64 || cfg.plot.height < 64) throw ConfigError("plot", "width and height must be >= 64");
    const auto& c = cfg.plot.color;
    if (c.size() != 7 || c[0] != '#' ||
        !std::all_of(c.begin() + 1, c.end(), [](char ch) { return std::isxdigit(static_cast<unsigned char>(ch)); })) {
      throw ConfigError("plot.color", "must be '#rrggbb'");
    }
  }
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("<file>", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc, path.parent_path());
}

/// Constructs the graph named by the config. Library validation failures
/// are reported against the graph key.
inline Graph build_graph(const RunConfig& cfg) {
  try {
    if (cfg.file) return load_graph_file(cfg.file->path, cfg.file->format);
    const auto& f = *cfg.family;
    if (f.name == "cycle") return cycle(f.n);
    if (f.name == "line") return line(f.n);
    if (f.name == "grid") return grid(f.nx, f.ny, f.periodic);
    return hypercube(f.dim);
  } catch (const Error& e) {
    throw ConfigError(cfg.file ? "graph.file" : "graph", e.what());
  }
}

namespace detail {

inline std::size_t parse_index(const std::string& text, const std::string& key) {
  if (text.empty() || !std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw ConfigError(key, "malformed basis label");
  }
  return static_cast<std::size_t>(std::stoull(text));
}

}  // namespace detail

/// Sums the labelled amplitude terms into a state. Vertex labels are
/// "v:<id>", arc labels "a:<tail>,<head>". The result must have unit norm
/// within 1e-8.
inline WalkState assemble_initial_state(const RunConfig& cfg, const Graph& graph,
                                        const ArcBasis* arcs /* coined only */) {
  const std::size_t dim = cfg.model == Model::Ctqw ? graph.vertex_count() : arcs->size();
  std::vector<ComplexScalar> amps(dim);
  for (std::size_t i = 0; i < cfg.initial_state.size(); ++i) {
    const std::string key = "initial_state[" + std::to_string(i) + "]";
    const auto& term = cfg.initial_state[i];
    const std::string& label = term.label;
    std::size_t index = 0;
    if (cfg.model == Model::Ctqw) {
      if (label.rfind("v:", 0) != 0) throw ConfigError(key, "ctqw states use vertex labels 'v:<id>'");
      index = detail::parse_index(label.substr(2), key);
      if (index >= dim) throw ConfigError(key, "vertex " + std::to_string(index) + " out of range");
    } else {
      if (label.rfind("a:", 0) != 0) throw ConfigError(key, "coined states use arc labels 'a:<tail>,<head>'");
      const auto comma = label.find(',', 2);
      if (comma == std::string::npos) throw ConfigError(key, "arc label needs '<tail>,<head>'");
      const auto tail = detail::parse_index(label.substr(2, comma - 2), key);
      const auto head = detail::parse_index(label.substr(comma + 1), key);
      try {
        index = arcs->index_of(tail, head);
      } catch (const Error& e) {
        throw ConfigError(key, e.what());
      }
    }
    amps[index] += ComplexScalar{term.re, term.im};
  }
  WalkState state(cfg.model == Model::Ctqw ? Basis::Vertex : Basis::Arc, ComplexVector(std::move(amps)));
  const double norm = state.norm();
  if (std::abs(norm - 1.0) > qwalk::detail::kInitialNormTolerance) {
    throw ConfigError("initial_state", "amplitudes have norm " + std::to_string(norm) + ", expected 1");
  }
  return state;
}

}  // namespace qwalk::io
