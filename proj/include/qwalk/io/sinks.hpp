#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>

#include "json.hpp"
#include "qwalk/graphs.hpp"
#include "qwalk/io/config.hpp"
#include "qwalk/io/run.hpp"

namespace qwalk::io {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kOutputSchemaVersion = 1;

/// Shortest text that parses back to the same double, via %.17g.
inline std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline nlohmann::ordered_json to_json(const SimulationResult& result) {
  nlohmann::ordered_json doc;
  doc["schema"] = kOutputSchemaVersion;
  doc["model"] = to_string(result.model);
  doc["graph"] = result.graph;
  auto& snaps = doc["snapshots"] = nlohmann::ordered_json::array();
  for (const auto& s : result.snapshots) {
    nlohmann::ordered_json entry;
    entry["k"] = s.k;
    entry["t"] = s.t;
    entry["p"] = s.p;
    snaps.push_back(std::move(entry));
  }
  return doc;
}

namespace detail {

inline std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

inline void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace detail

inline void write_json(const SimulationResult& result, const std::filesystem::path& path) {
  auto out = detail::open_for_write(path);
  out << to_json(result).dump() << '\n';
  detail::finish(out, path);
}

/// One row per snapshot per vertex: snapshot,t,vertex,probability.
inline void write_csv(const SimulationResult& result, const std::filesystem::path& path) {
  auto out = detail::open_for_write(path);
  out << "snapshot,t,vertex,probability\n";
  for (const auto& s : result.snapshots) {
    const std::string t = format_real(s.t);
    for (std::size_t v = 0; v < s.p.size(); ++v) {
      out << s.k << ',' << t << ',' << v << ',' << format_real(s.p[v]) << '\n';
    }
  }
  detail::finish(out, path);
}

/// Per-snapshot CSV files frames/frame_<k>.csv with columns vertex,probability.
inline void write_frames(const SimulationResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  for (const auto& s : result.snapshots) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%05zu.csv", s.k);
    const auto path = dir / name;
    auto out = detail::open_for_write(path);
    out << "vertex,probability\n";
    for (std::size_t v = 0; v < s.p.size(); ++v) out << v << ',' << format_real(s.p[v]) << '\n';
    detail::finish(out, path);
  }
}

namespace detail {

inline std::string blend(const std::string& color, double weight) {
  // Linear blend from white to `color`.
  auto channel = [&](std::size_t at) { return std::stoi(color.substr(at, 2), nullptr, 16); };
  char buf[8];
  const int r = static_cast<int>(255 + (channel(1) - 255) * weight + 0.5);
  const int g = static_cast<int>(255 + (channel(3) - 255) * weight + 0.5);
  const int b = static_cast<int>(255 + (channel(5) - 255) * weight + 0.5);
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

inline std::string fixed(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

}  // namespace detail

/// Static plot of one snapshot: heatmap for grids, bar chart otherwise.
inline std::string render_svg(const DistributionRecord& snap, const GraphKind& kind, const PlotStyle& style,
                              Model model) {
  const double w = style.width;
  const double h = style.height;
  const double margin = 36.0;
  const double pmax = std::max(1e-300, *std::max_element(snap.p.begin(), snap.p.end()));

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.width << "\" height=\"" << style.height
      << "\" viewBox=\"0 0 " << style.width << ' ' << style.height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  svg << "<text x=\"" << margin << "\" y=\"22\" font-family=\"sans-serif\" font-size=\"14\">"
      << (model == Model::Ctqw ? "t = " : "step ") << format_real(snap.t) << "  (max p = " << format_real(pmax)
      << ")</text>\n";

  const double plot_w = w - 2 * margin;
  const double plot_h = h - 2 * margin;
  if (const auto* g = std::get_if<family::Grid>(&kind)) {
    const double cell = std::min(plot_w / static_cast<double>(g->nx), plot_h / static_cast<double>(g->ny));
    for (std::size_t y = 0; y < g->ny; ++y) {
      for (std::size_t x = 0; x < g->nx; ++x) {
        const double p = snap.p[x + g->nx * y];
        svg << "<rect x=\"" << detail::fixed(margin + cell * static_cast<double>(x)) << "\" y=\""
            << detail::fixed(margin + cell * static_cast<double>(g->ny - 1 - y)) << "\" width=\""
            << detail::fixed(cell) << "\" height=\"" << detail::fixed(cell) << "\" fill=\""
            << detail::blend(style.color, p / pmax) << "\"/>\n";
      }
    }
  } else {
    const double bar = plot_w / static_cast<double>(snap.p.size());
    const double base = margin + plot_h;
    svg << "<line x1=\"" << margin << "\" y1=\"" << base << "\" x2=\"" << margin + plot_w << "\" y2=\"" << base
        << "\" stroke=\"#333333\"/>\n";
    for (std::size_t v = 0; v < snap.p.size(); ++v) {
      const double bh = plot_h * snap.p[v] / pmax;
      svg << "<rect x=\"" << detail::fixed(margin + bar * static_cast<double>(v)) << "\" y=\""
          << detail::fixed(base - bh) << "\" width=\"" << detail::fixed(std::max(bar, 0.5)) << "\" height=\""
          << detail::fixed(bh) << "\" fill=\"" << style.color << "\"/>\n";
    }
    svg << "<text x=\"" << margin << "\" y=\"" << h - 10 << "\" font-family=\"sans-serif\" font-size=\"11\">0</text>\n";
    svg << "<text x=\"" << margin + plot_w - 24 << "\" y=\"" << h - 10
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << snap.p.size() - 1 << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

inline void write_svg(const SimulationResult& result, std::size_t snapshot_index, const PlotStyle& style,
                      const std::filesystem::path& path) {
  if (snapshot_index >= result.snapshots.size()) {
    throw ConfigError("--plot", "snapshot index " + std::to_string(snapshot_index) + " out of range (have " +
                                    std::to_string(result.snapshots.size()) + ")");
  }
  auto out = detail::open_for_write(path);
  out << render_svg(result.snapshots[snapshot_index], result.kind, style, result.model);
  detail::finish(out, path);
}

}  // namespace qwalk::io
