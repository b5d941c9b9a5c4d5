#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "lsc/schedule.hpp"

namespace lsc {

namespace detail {

constexpr const char* kGlyphs =
    "123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";

constexpr const char* kPalette[] = {
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b4", "#59a14f",
    "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};

// Patch ids in first-appearance order across the schedule.
inline std::vector<std::string> patch_order(const SurgerySchedule& s) {
  std::vector<std::string> order;
  std::map<std::string, bool> seen;
  auto note = [&](const std::string& id) {
    if (seen.count(id)) return;
    seen[id] = true;
    order.push_back(id);
  };
  for (const auto& wave : s.steps)
    for (const auto& op : wave) switch (op.kind) {
        case OpKind::SPLIT:
          for (const auto& p : op.pieces) note(p.patch);
          break;
        case OpKind::MEASURE:
        case OpKind::CORRECT:
          break;
        default:
          note(op.patch);
          break;
      }
  return order;
}

inline void check_cell(const SurgerySchedule& s, Cell c) {
  if (c.r < 0 || c.r >= s.rows || c.c < 0 || c.c >= s.cols)
    throw ValidationError("cell (" + std::to_string(c.r) + "," +
                          std::to_string(c.c) + ") is outside the grid");
}

}  // namespace detail

// One text frame per timestep showing post-wave occupancy, preceded by a
// legend mapping glyphs to patch ids (and qubits where mapped). An empty
// schedule renders to nothing.
inline std::string render_ascii(const SurgerySchedule& s) {
  if (s.steps.empty()) return "";
  auto order = detail::patch_order(s);
  std::map<std::string, char> glyph;
  size_t n_glyphs = std::string(detail::kGlyphs).size();
  for (size_t i = 0; i < order.size(); ++i)
    glyph[order[i]] = detail::kGlyphs[i % n_glyphs];

  std::string out = "legend\n";
  for (const auto& id : order) {
    out += "  ";
    out += glyph.at(id);
    out += " = " + id;
    for (const auto& [q, pid] : s.qubit_map)
      if (pid == id) out += "  (qubit " + std::to_string(q + s.base) + ")";
    out += "\n";
  }

  GridState g;
  g.rows = s.rows;
  g.cols = s.cols;
  for (size_t t = 0; t < s.steps.size(); ++t) {
    for (const auto& op : s.steps[t]) g.apply(op);
    out += "t=" + std::to_string(t + 1) + "\n";
    std::vector<std::string> lines(s.rows, std::string(s.cols, '.'));
    for (const auto& [id, cells] : g.patches)
      for (const auto& c : cells) {
        detail::check_cell(s, c);
        lines[c.r][c.c] = glyph.at(id);
      }
    for (const auto& line : lines) out += line + "\n";
  }
  return out;
}

// Flat stacked SVG, one frame per timestep, 20px cells, patch labels at
// each patch's smallest cell.
inline std::string render_svg(const SurgerySchedule& s) {
  constexpr int px = 20;
  constexpr int header = 16;  // per-frame title band
  constexpr int margin = 4;
  int fw = s.cols * px;
  int fh = s.rows * px;
  int T = (int)s.steps.size();
  int width = fw + 2 * margin;
  int height = T > 0 ? margin + T * (header + fh + margin) : 2 * margin;

  auto order = detail::patch_order(s);
  std::map<std::string, int> color;
  for (size_t i = 0; i < order.size(); ++i)
    color[order[i]] = (int)(i % (sizeof(detail::kPalette) /
                                 sizeof(detail::kPalette[0])));

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    std::to_string(width) + "\" height=\"" +
                    std::to_string(height) + "\">\n";
  GridState g;
  g.rows = s.rows;
  g.cols = s.cols;
  int y0 = margin;
  for (int t = 0; t < T; ++t) {
    for (const auto& op : s.steps[t]) g.apply(op);
    out += "<g>\n";
    out += "<text x=\"" + std::to_string(margin) + "\" y=\"" +
           std::to_string(y0 + 12) + "\" font-size=\"12\" font-family=\"monospace\">t=" +
           std::to_string(t + 1) + "</text>\n";
    int gy = y0 + header;
    out += "<rect x=\"" + std::to_string(margin) + "\" y=\"" +
           std::to_string(gy) + "\" width=\"" + std::to_string(fw) +
           "\" height=\"" + std::to_string(fh) +
           "\" fill=\"none\" stroke=\"#999\"/>\n";
    for (const auto& [id, cells] : g.patches) {
      Cell mc = cells.empty() ? Cell{0, 0} : cells[0];
      for (const auto& c : cells) {
        detail::check_cell(s, c);
        mc = std::min(mc, c);
        out += "<rect x=\"" + std::to_string(margin + c.c * px) + "\" y=\"" +
               std::to_string(gy + c.r * px) + "\" width=\"" +
               std::to_string(px) + "\" height=\"" + std::to_string(px) +
               "\" fill=\"" + detail::kPalette[color.at(id)] +
               "\" stroke=\"#333\"/>\n";
      }
      out += "<text x=\"" + std::to_string(margin + mc.c * px + 2) +
             "\" y=\"" + std::to_string(gy + mc.r * px + 13) +
             "\" font-size=\"9\" font-family=\"monospace\" fill=\"#fff\">" +
             id + "</text>\n";
    }
    out += "</g>\n";
    y0 = gy + fh + margin;
  }
  out += "</svg>\n";
  return out;
}

}  // namespace lsc
