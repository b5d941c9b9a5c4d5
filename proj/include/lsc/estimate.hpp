#pragma once

#include <cstdio>
#include <set>
#include <string>

#include "lsc/schedule.hpp"

namespace lsc {

// Braid-based space-time volumes (in d^3 units) of the reference protocols.
constexpr long long Y_BRAID = 140;
constexpr long long A_BRAID = 1500;
constexpr long long BH_BRAID = 4688;

struct ResourceEstimate {
  int patches = 0;    // P: bounding-box area of every cell ever occupied
  int timesteps = 0;  // T
  int box_rows = 0, box_cols = 0;    // bounding box shape
  long long volume_coefficient = 0;  // c, where volume = c d^3
  std::string cycles;                // "T d"
  std::string phys_qubits_per_patch = "2 d^2";
  std::string volume;  // "c d^3"
};

inline ResourceEstimate estimate(const SurgerySchedule& s) {
  GridState g;
  g.rows = s.rows;
  g.cols = s.cols;
  std::set<Cell> ever;
  for (const auto& wave : s.steps)
    for (const auto& op : wave) {
      g.apply(op);
      for (const auto& c : op.path) ever.insert(c);
      for (const auto& [id, cells] : g.patches)
        for (const auto& c : cells) ever.insert(c);
    }
  ResourceEstimate e;
  e.timesteps = (int)s.steps.size();
  if (!ever.empty()) {
    int rmin = ever.begin()->r, rmax = rmin, cmin = ever.begin()->c, cmax = cmin;
    for (const auto& c : ever) {
      rmin = std::min(rmin, c.r);
      rmax = std::max(rmax, c.r);
      cmin = std::min(cmin, c.c);
      cmax = std::max(cmax, c.c);
    }
    e.box_rows = rmax - rmin + 1;
    e.box_cols = cmax - cmin + 1;
    e.patches = e.box_rows * e.box_cols;
  }
  e.volume_coefficient = 2LL * e.patches * e.timesteps;
  e.cycles = std::to_string(e.timesteps) + " d";
  e.volume = std::to_string(e.volume_coefficient) + " d^3";
  return e;
}

struct ComparisonReport {
  std::string baseline;
  long long baseline_volume = 0;  // in d^3 units
  double ratio = 0.0;
  std::string note;
};

inline long long baseline_volume(const std::string& name) {
  if (name == "Y_BRAID") return Y_BRAID;
  if (name == "A_BRAID") return A_BRAID;
  if (name == "BH_BRAID") return BH_BRAID;
  throw ValidationError("unknown baseline '" + name + "'");
}

inline ComparisonReport compare_table(const ResourceEstimate& e,
                                      const std::string& baseline) {
  ComparisonReport r;
  r.baseline = baseline;
  r.baseline_volume = baseline_volume(baseline);
  r.ratio = double(e.volume_coefficient) / double(r.baseline_volume);
  if (r.ratio > 1.0)
    r.note = "costs more than the braided implementation";
  else if (r.ratio < 1.0)
    r.note = "improves on the braided implementation";
  else
    r.note = "matches the braided implementation";
  return r;
}

// Volume coefficients whose braided counterpart is on record.
inline std::string known_baseline_for(long long volume_coefficient) {
  if (volume_coefficient == 280) return "Y_BRAID";
  if (volume_coefficient == 1080) return "A_BRAID";
  if (volume_coefficient == 2268) return "BH_BRAID";
  return "";
}

struct NumericEstimate {
  long long cycles = 0;          // T * d
  long long phys_per_patch = 0;  // 2 d^2
  long long phys_total = 0;      // P * 2 d^2
  long long volume = 0;          // c * d^3
};

inline NumericEstimate evaluate_at(const ResourceEstimate& e, int d) {
  if (d <= 0) throw ValidationError("distance must be positive");
  NumericEstimate n;
  n.cycles = (long long)e.timesteps * d;
  n.phys_per_patch = 2LL * d * d;
  n.phys_total = (long long)e.patches * n.phys_per_patch;
  n.volume = e.volume_coefficient * (long long)d * d * d;
  return n;
}

namespace detail {

inline std::string ratio_string(double ratio) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", ratio);
  return buf;
}

}  // namespace detail

inline ordered_json estimate_to_json(const ResourceEstimate& e,
                                     int distance = 0) {
  ordered_json j;
  j["patches"] = e.patches;
  j["timesteps"] = e.timesteps;
  j["cycles"] = e.cycles;
  j["phys_qubits_per_patch"] = e.phys_qubits_per_patch;
  j["volume"] = e.volume;
  j["volume_coefficient"] = e.volume_coefficient;
  std::string bl = known_baseline_for(e.volume_coefficient);
  if (!bl.empty()) {
    ComparisonReport r = compare_table(e, bl);
    ordered_json cj;
    cj["baseline"] = r.baseline;
    cj["baseline_volume"] = std::to_string(r.baseline_volume) + " d^3";
    cj["ratio"] = r.ratio;
    cj["note"] = r.note;
    j["comparison"] = cj;
  }
  if (distance > 0) {
    NumericEstimate n = evaluate_at(e, distance);
    ordered_json nj;
    nj["distance"] = distance;
    nj["cycles"] = n.cycles;
    nj["phys_qubits_per_patch"] = n.phys_per_patch;
    nj["phys_qubits_total"] = n.phys_total;
    nj["volume"] = n.volume;
    j["at_distance"] = nj;
  }
  return j;
}

inline std::string estimate_text(const ResourceEstimate& e, int distance = 0) {
  std::string out;
  out += "patches (P):     " + std::to_string(e.patches);
  if (e.patches > 0)
    out += "  (" + std::to_string(e.box_rows) + " x " +
           std::to_string(e.box_cols) + " bounding box)";
  out += "\n";
  out += "timesteps (T):   " + std::to_string(e.timesteps) + "\n";
  out += "cycles:          " + e.cycles + "\n";
  out += "qubits per patch: " + e.phys_qubits_per_patch + "\n";
  out += "volume:          " + e.volume + "  (c = 2 P T)\n";
  std::string bl = known_baseline_for(e.volume_coefficient);
  if (!bl.empty()) {
    ComparisonReport r = compare_table(e, bl);
    out += "vs " + r.baseline + " (" + std::to_string(r.baseline_volume) +
           " d^3): ratio " + detail::ratio_string(r.ratio) + ", " + r.note +
           "\n";
  }
  if (distance > 0) {
    NumericEstimate n = evaluate_at(e, distance);
    out += "at d=" + std::to_string(distance) + ": " +
           std::to_string(n.cycles) + " cycles, " +
           std::to_string(n.phys_per_patch) + " qubits per patch, " +
           std::to_string(n.phys_total) + " qubits total, volume " +
           std::to_string(n.volume) + "\n";
  }
  return out;
}

}  // namespace lsc
