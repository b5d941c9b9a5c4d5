#pragma once

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "lsc/icm.hpp"

namespace lsc {

using ordered_json = nlohmann::ordered_json;

struct Cell {
  int r = 0, c = 0;
  auto operator<=>(const Cell&) const = default;
};

enum class OpKind { INIT, SPLIT, MOVE, SHRINK, GROW, MERGE, INJECT, MEASURE, CORRECT };

// Fires when the product of the trigger outcomes equals `outcome`.
struct Condition {
  std::vector<std::string> triggers;
  int outcome = -1;
  bool empty() const { return triggers.empty(); }
};

struct Piece {
  std::string patch;
  std::vector<Cell> cells;
};

struct SurgeryOp {
  OpKind kind = OpKind::INIT;
  std::string patch;                 // acted-on patch, or merge result id
  std::vector<std::string> patches;  // merge members, in merge order
  std::vector<Piece> pieces;         // split results
  std::vector<Cell> cells;  // init/inject cells; move/shrink/grow targets;
                            // merge result extent
  std::vector<Cell> path;   // free cells recruited by a merge
  bool rough = false;
  std::string state;        // init: plus/zero; inject: Y/A
  char basis = 'X';
  std::vector<std::string> ids;  // merge outcome ids (members-1 of them)
  std::string id;                // measurement outcome id
  int qubit = -1;                // inject/measure/correct subject
  Action action = Action::TRACK_Z;
  Condition condition;
};

struct SurgerySchedule {
  int rows = 0, cols = 0;
  int base = 0;
  std::vector<std::vector<SurgeryOp>> steps;
  std::vector<CorrectionRule> corrections;
  std::map<int, std::string> qubit_map;  // qubit -> patch carrying it
  std::string circuit_text;              // canonical source program
};

namespace detail {

inline bool cells_connected(const std::vector<Cell>& cells) {
  if (cells.empty()) return false;
  std::set<Cell> all(cells.begin(), cells.end());
  std::set<Cell> seen;
  std::queue<Cell> q;
  q.push(cells[0]);
  seen.insert(cells[0]);
  while (!q.empty()) {
    Cell c = q.front();
    q.pop();
    for (Cell d : {Cell{c.r - 1, c.c}, Cell{c.r + 1, c.c}, Cell{c.r, c.c - 1},
                   Cell{c.r, c.c + 1}}) {
      if (all.count(d) && !seen.count(d)) {
        seen.insert(d);
        q.push(d);
      }
    }
  }
  return seen.size() == all.size();
}

}  // namespace detail

// Grid occupancy evolved over the schedule, geometry only.
struct GridState {
  int rows = 0, cols = 0;
  std::map<std::string, std::vector<Cell>> patches;

  bool occupied(Cell c) const {
    for (const auto& [id, cells] : patches)
      if (std::find(cells.begin(), cells.end(), c) != cells.end()) return true;
    return false;
  }

  void apply(const SurgeryOp& op) {
    switch (op.kind) {
      case OpKind::INIT:
      case OpKind::INJECT:
        patches[op.patch] = op.cells;
        break;
      case OpKind::SPLIT:
        patches.erase(op.patch);
        for (const auto& p : op.pieces) patches[p.patch] = p.cells;
        break;
      case OpKind::MOVE:
      case OpKind::SHRINK:
      case OpKind::GROW:
        patches[op.patch] = op.cells;
        break;
      case OpKind::MERGE:
        for (const auto& m : op.patches) patches.erase(m);
        patches[op.patch] = op.cells;
        break;
      case OpKind::MEASURE:
        patches.erase(op.patch);
        break;
      case OpKind::CORRECT:
        break;
    }
  }
};

inline const char* op_name(OpKind k) {
  switch (k) {
    case OpKind::INIT: return "init";
    case OpKind::SPLIT: return "split";
    case OpKind::MOVE: return "move";
    case OpKind::SHRINK: return "shrink";
    case OpKind::GROW: return "grow";
    case OpKind::MERGE: return "merge";
    case OpKind::INJECT: return "inject";
    case OpKind::MEASURE: return "measure";
    case OpKind::CORRECT: return "correct";
  }
  throw EngineBug("bad op kind");
}

inline OpKind op_kind_from(const std::string& s) {
  for (OpKind k : {OpKind::INIT, OpKind::SPLIT, OpKind::MOVE, OpKind::SHRINK,
                   OpKind::GROW, OpKind::MERGE, OpKind::INJECT,
                   OpKind::MEASURE, OpKind::CORRECT})
    if (s == op_name(k)) return k;
  throw ValidationError("unknown op '" + s + "'");
}

inline Action action_from(const std::string& s) {
  if (s == "track_x") return Action::TRACK_X;
  if (s == "track_z") return Action::TRACK_Z;
  if (s == "apply_p") return Action::APPLY_P;
  throw ValidationError("unknown correction action '" + s + "'");
}

namespace detail {

inline ordered_json cells_json(const std::vector<Cell>& cells) {
  ordered_json arr = ordered_json::array();
  for (const auto& c : cells) arr.push_back(ordered_json::array({c.r, c.c}));
  return arr;
}

inline std::vector<Cell> cells_from_json(const ordered_json& arr) {
  std::vector<Cell> out;
  for (const auto& c : arr) out.push_back({c.at(0).get<int>(), c.at(1).get<int>()});
  return out;
}

inline ordered_json condition_json(const Condition& c) {
  ordered_json j;
  j["if"] = c.triggers;
  j["outcome"] = c.outcome;
  return j;
}

}  // namespace detail

inline ordered_json schedule_to_json(const SurgerySchedule& s) {
  ordered_json j;
  j["grid"] = ordered_json::array({s.rows, s.cols});
  ordered_json steps = ordered_json::array();
  for (const auto& wave : s.steps) {
    ordered_json w = ordered_json::array();
    for (const auto& op : wave) {
      ordered_json o;
      o["op"] = op_name(op.kind);
      switch (op.kind) {
        case OpKind::INIT:
          o["patch"] = op.patch;
          o["state"] = op.state;
          o["cells"] = detail::cells_json(op.cells);
          break;
        case OpKind::SPLIT: {
          o["kind"] = op.rough ? "rough" : "smooth";
          o["patch"] = op.patch;
          ordered_json ps = ordered_json::array();
          for (const auto& p : op.pieces) {
            ordered_json pj;
            pj["patch"] = p.patch;
            pj["cells"] = detail::cells_json(p.cells);
            ps.push_back(pj);
          }
          o["pieces"] = ps;
          break;
        }
        case OpKind::MOVE:
        case OpKind::SHRINK:
        case OpKind::GROW:
          o["patch"] = op.patch;
          o["cells"] = detail::cells_json(op.cells);
          break;
        case OpKind::MERGE:
          o["kind"] = op.rough ? "rough" : "smooth";
          o["patches"] = op.patches;
          o["patch"] = op.patch;
          o["cells"] = detail::cells_json(op.cells);
          if (!op.path.empty()) o["path"] = detail::cells_json(op.path);
          o["ids"] = op.ids;
          break;
        case OpKind::INJECT:
          o["patch"] = op.patch;
          o["state"] = op.state;
          o["qubit"] = op.qubit + s.base;
          o["cells"] = detail::cells_json(op.cells);
          break;
        case OpKind::MEASURE:
          o["patch"] = op.patch;
          o["basis"] = std::string(1, op.basis);
          o["qubit"] = op.qubit + s.base;
          o["id"] = op.id;
          break;
        case OpKind::CORRECT:
          o["do"] = action_name(op.action);
          o["qubit"] = op.qubit + s.base;
          break;
      }
      if (!op.condition.empty()) o["condition"] = detail::condition_json(op.condition);
      w.push_back(o);
    }
    steps.push_back(w);
  }
  j["steps"] = steps;
  ordered_json corr = ordered_json::array();
  for (const auto& r : s.corrections) {
    ordered_json cj;
    cj["if"] = r.triggers;
    cj["do"] = action_name(r.action);
    cj["qubit"] = r.qubit + s.base;
    corr.push_back(cj);
  }
  j["corrections"] = corr;
  ordered_json qm;
  for (const auto& [q, patch] : s.qubit_map)
    qm[std::to_string(q + s.base)] = patch;
  j["qubit_map"] = qm;
  j["circuit"] = s.circuit_text;
  return j;
}

inline SurgerySchedule schedule_from_json(const ordered_json& j) {
  SurgerySchedule s;
  try {
    s.rows = j.at("grid").at(0).get<int>();
    s.cols = j.at("grid").at(1).get<int>();
    s.circuit_text = j.value("circuit", std::string{});
    if (!s.circuit_text.empty())
      s.base = parse_circuit(s.circuit_text).base;
    for (const auto& wj : j.at("steps")) {
      std::vector<SurgeryOp> wave;
      for (const auto& o : wj) {
        SurgeryOp op;
        op.kind = op_kind_from(o.at("op").get<std::string>());
        switch (op.kind) {
          case OpKind::INIT:
            op.patch = o.at("patch").get<std::string>();
            op.state = o.at("state").get<std::string>();
            op.cells = detail::cells_from_json(o.at("cells"));
            break;
          case OpKind::SPLIT:
            op.rough = o.value("kind", std::string{"smooth"}) == "rough";
            op.patch = o.at("patch").get<std::string>();
            for (const auto& pj : o.at("pieces"))
              op.pieces.push_back({pj.at("patch").get<std::string>(),
                                   detail::cells_from_json(pj.at("cells"))});
            break;
          case OpKind::MOVE:
          case OpKind::SHRINK:
          case OpKind::GROW:
            op.patch = o.at("patch").get<std::string>();
            op.cells = detail::cells_from_json(o.at("cells"));
            break;
          case OpKind::MERGE:
            op.rough = o.at("kind").get<std::string>() == "rough";
            op.patches = o.at("patches").get<std::vector<std::string>>();
            op.patch = o.at("patch").get<std::string>();
            op.cells = detail::cells_from_json(o.at("cells"));
            if (o.contains("path")) op.path = detail::cells_from_json(o.at("path"));
            op.ids = o.at("ids").get<std::vector<std::string>>();
            break;
          case OpKind::INJECT:
            op.patch = o.at("patch").get<std::string>();
            op.state = o.at("state").get<std::string>();
            op.qubit = o.at("qubit").get<int>() - s.base;
            op.cells = detail::cells_from_json(o.at("cells"));
            break;
          case OpKind::MEASURE:
            op.patch = o.at("patch").get<std::string>();
            op.basis = o.at("basis").get<std::string>().at(0);
            op.qubit = o.at("qubit").get<int>() - s.base;
            op.id = o.at("id").get<std::string>();
            break;
          case OpKind::CORRECT:
            op.action = action_from(o.at("do").get<std::string>());
            op.qubit = o.at("qubit").get<int>() - s.base;
            break;
        }
        if (o.contains("condition")) {
          op.condition.triggers =
              o.at("condition").at("if").get<std::vector<std::string>>();
          op.condition.outcome = o.at("condition").at("outcome").get<int>();
        }
        wave.push_back(op);
      }
      s.steps.push_back(wave);
    }
    for (const auto& cj : j.at("corrections")) {
      CorrectionRule r;
      r.triggers = cj.at("if").get<std::vector<std::string>>();
      r.action = action_from(cj.at("do").get<std::string>());
      r.qubit = cj.at("qubit").get<int>() - s.base;
      s.corrections.push_back(r);
    }
    for (const auto& [k, v] : j.at("qubit_map").items())
      s.qubit_map[std::stoi(k) - s.base] = v.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed schedule json: ") + e.what(), 0);
  }
  return s;
}

// Structural validation: bounds, footprint exclusivity per timestep, patch
// life cycle and connectivity, move/shrink/grow/split/merge geometry,
// outcome id uniqueness, and condition/correction trigger resolution.
// Conditional ops are checked as if they fire (worst case).
inline void validate_schedule(const SurgerySchedule& s) {
  if (s.rows <= 0 || s.cols <= 0)
    throw ValidationError("schedule grid must be positive");
  GridState g;
  g.rows = s.rows;
  g.cols = s.cols;
  std::set<std::string> ids;      // outcome ids seen in finished waves
  std::set<std::string> all_ids;  // for global uniqueness
  auto fresh_id = [&](const std::string& id) {
    if (id.empty()) throw ValidationError("empty outcome id");
    if (!all_ids.insert(id).second)
      throw ValidationError("duplicate outcome id " + id);
  };
  auto in_grid = [&](Cell c) {
    return c.r >= 0 && c.r < s.rows && c.c >= 0 && c.c < s.cols;
  };
  int t = 0;
  for (const auto& wave : s.steps) {
    ++t;
    auto at = [&](const std::string& what) {
      return "t=" + std::to_string(t) + ": " + what;
    };
    std::set<Cell> claimed;  // union of footprints this wave
    auto claim = [&](const std::vector<Cell>& cells) {
      for (const auto& c : cells) {
        if (!in_grid(c))
          throw ValidationError(at("cell out of grid bounds"));
        if (!claimed.insert(c).second)
          throw ValidationError(at("overlapping op footprints"));
      }
    };
    GridState next = g;  // ops read wave-start state g, write next
    for (const auto& op : wave) {
      if (!op.condition.empty())
        for (const auto& trig : op.condition.triggers)
          if (!ids.count(trig))
            throw ValidationError(at("condition references unknown outcome " + trig));
      switch (op.kind) {
        case OpKind::INIT:
        case OpKind::INJECT: {
          if (next.patches.count(op.patch))
            throw ValidationError(at("patch " + op.patch + " already exists"));
          if (op.kind == OpKind::INJECT && op.cells.size() != 1)
            throw ValidationError(at("injection must occupy a single cell"));
          if (op.cells.empty()) throw ValidationError(at("init without cells"));
          if (!detail::cells_connected(op.cells))
            throw ValidationError(at("patch " + op.patch + " is disconnected"));
          for (const auto& c : op.cells)
            if (g.occupied(c))
              throw ValidationError(at("init over an occupied cell"));
          claim(op.cells);
          if (op.kind == OpKind::INIT && op.state != "plus" && op.state != "zero")
            throw ValidationError(at("init state must be plus or zero"));
          if (op.kind == OpKind::INJECT && op.state != "Y" && op.state != "A")
            throw ValidationError(at("inject state must be Y or A"));
          break;
        }
        case OpKind::SPLIT: {
          auto it = g.patches.find(op.patch);
          if (it == g.patches.end())
            throw ValidationError(at("split of unknown patch " + op.patch));
          if (op.pieces.size() < 2)
            throw ValidationError(at("split needs at least two pieces"));
          std::set<Cell> parent(it->second.begin(), it->second.end());
          std::set<Cell> covered;
          for (const auto& p : op.pieces) {
            if (p.cells.empty() || !detail::cells_connected(p.cells))
              throw ValidationError(at("split piece " + p.patch +
                                       " is empty or disconnected"));
            if (next.patches.count(p.patch) && p.patch != op.patch)
              throw ValidationError(at("piece id " + p.patch + " already exists"));
            for (const auto& c : p.cells) {
              if (!parent.count(c))
                throw ValidationError(at("split piece leaves the parent patch"));
              if (!covered.insert(c).second)
                throw ValidationError(at("split pieces overlap"));
            }
          }
          if (covered != parent)
            throw ValidationError(at("split pieces must cover the parent"));
          claim(it->second);
          break;
        }
        case OpKind::MOVE: {
          auto it = g.patches.find(op.patch);
          if (it == g.patches.end())
            throw ValidationError(at("move of unknown patch " + op.patch));
          std::vector<Cell> old = it->second, nw = op.cells;
          std::sort(old.begin(), old.end());
          std::sort(nw.begin(), nw.end());
          if (nw.size() != old.size())
            throw ValidationError(at("move must preserve patch shape"));
          int dr = nw[0].r - old[0].r, dc = nw[0].c - old[0].c;
          if (std::abs(dr) + std::abs(dc) != 1)
            throw ValidationError(at("move must translate by one cell"));
          for (size_t i = 0; i < old.size(); ++i)
            if (nw[i].r - old[i].r != dr || nw[i].c - old[i].c != dc)
              throw ValidationError(at("move must be a rigid translation"));
          std::set<Cell> own(old.begin(), old.end());
          for (const auto& c : op.cells)
            if (!own.count(c) && g.occupied(c))
              throw ValidationError(at("move into an occupied cell"));
          std::vector<Cell> fp = old;
          for (const auto& c : op.cells)
            if (!own.count(c)) fp.push_back(c);
          claim(fp);
          break;
        }
        case OpKind::SHRINK:
        case OpKind::GROW: {
          auto it = g.patches.find(op.patch);
          if (it == g.patches.end())
            throw ValidationError(at("resize of unknown patch " + op.patch));
          std::set<Cell> old(it->second.begin(), it->second.end());
          std::set<Cell> nw(op.cells.begin(), op.cells.end());
          if (op.cells.empty() || !detail::cells_connected(op.cells))
            throw ValidationError(at("resized patch is empty or disconnected"));
          if (op.kind == OpKind::SHRINK) {
            if (nw == old || !std::includes(old.begin(), old.end(), nw.begin(), nw.end()))
              throw ValidationError(at("shrink must keep a proper subset"));
            claim(it->second);
          } else {
            if (nw == old || !std::includes(nw.begin(), nw.end(), old.begin(), old.end()))
              throw ValidationError(at("grow must keep a proper superset"));
            for (const auto& c : op.cells)
              if (!old.count(c) && g.occupied(c))
                throw ValidationError(at("grow into an occupied cell"));
            claim(op.cells);
          }
          break;
        }
        case OpKind::MERGE: {
          if (op.patches.size() < 2)
            throw ValidationError(at("merge needs at least two patches"));
          if (op.ids.size() != op.patches.size() - 1)
            throw ValidationError(at("merge must carry one outcome per fusion"));
          for (const auto& id : op.ids) fresh_id(id);
          std::set<Cell> expect;
          std::set<std::string> uniq;
          for (const auto& pid : op.patches) {
            if (!uniq.insert(pid).second)
              throw ValidationError(at("merge lists patch " + pid + " twice"));
            auto it = g.patches.find(pid);
            if (it == g.patches.end())
              throw ValidationError(at("merge of unknown patch " + pid));
            expect.insert(it->second.begin(), it->second.end());
          }
          for (const auto& c : op.path) {
            if (g.occupied(c))
              throw ValidationError(at("merge path crosses an occupied cell"));
            if (!expect.insert(c).second)
              throw ValidationError(at("merge path overlaps its patches"));
          }
          std::set<Cell> got(op.cells.begin(), op.cells.end());
          if (got != expect)
            throw ValidationError(at("merge cells must be members plus path"));
          if (!detail::cells_connected(op.cells))
            throw ValidationError(at("merged patch is disconnected"));
          if (next.patches.count(op.patch) &&
              std::find(op.patches.begin(), op.patches.end(), op.patch) ==
                  op.patches.end())
            throw ValidationError(at("merge result id " + op.patch +
                                     " already exists"));
          claim(op.cells);
          break;
        }
        case OpKind::MEASURE: {
          auto it = g.patches.find(op.patch);
          if (it == g.patches.end())
            throw ValidationError(at("measure of unknown patch " + op.patch));
          if (op.basis != 'X' && op.basis != 'Z')
            throw ValidationError(at("patch measurement basis must be X or Z"));
          fresh_id(op.id);
          claim(it->second);
          break;
        }
        case OpKind::CORRECT:
          if (op.condition.empty())
            throw ValidationError(at("correct op needs a condition"));
          break;
      }
      next.apply(op);
      for (const auto& id : op.ids) ids.insert(id);
      if (op.kind == OpKind::MEASURE) ids.insert(op.id);
    }
    g = std::move(next);
  }
  for (const auto& r : s.corrections) {
    for (const auto& trig : r.triggers)
      if (!ids.count(trig))
        throw ValidationError("correction references unknown outcome " + trig);
  }
  // Each mapped patch must either survive to the end or flow, through
  // merges, into the patch consumed by that qubit's own measurement.
  for (const auto& [q, pid] : s.qubit_map) {
    std::string cur = pid;
    bool consumed = false;
    for (const auto& wave : s.steps) {
      for (const auto& op : wave) {
        if (op.kind == OpKind::MERGE &&
            std::find(op.patches.begin(), op.patches.end(), cur) !=
                op.patches.end()) {
          cur = op.patch;
        } else if (op.kind == OpKind::MEASURE && op.patch == cur) {
          if (op.qubit != q)
            throw ValidationError("patch of qubit " + std::to_string(q + s.base) +
                                  " is measured as a different qubit");
          consumed = true;
        } else if (op.kind == OpKind::SPLIT && op.patch == cur) {
          throw ValidationError("mapped patch " + pid + " is split apart");
        }
        if (consumed) break;
      }
      if (consumed) break;
    }
    if (!consumed && !g.patches.count(cur))
      throw ValidationError("qubit_map patch " + pid +
                            " neither survives nor is measured");
  }
  if (!s.circuit_text.empty()) {
    Circuit c = parse_circuit(s.circuit_text);
    std::set<int> measured;
    for (const auto& wave : s.steps)
      for (const auto& op : wave)
        if (op.kind == OpKind::MEASURE) {
          measured.insert(op.qubit);
          const MeasureOp* m = c.measure_of(op.qubit);
          if (m == nullptr)
            throw ValidationError("schedule measures unmeasured qubit " +
                                  std::to_string(op.qubit + c.base));
          char want = m->basis == MeasBasis::Z ? 'Z' : 'X';
          if (op.basis != want)
            throw ValidationError("measurement basis mismatch on qubit " +
                                  std::to_string(op.qubit + c.base));
          if (op.id != trig_m(op.qubit, c.base))
            throw ValidationError("measurement id mismatch on qubit " +
                                  std::to_string(op.qubit + c.base));
        }
    for (const auto& m : c.measures)
      if (!measured.count(m.qubit))
        throw ValidationError("circuit measurement of qubit " +
                              std::to_string(m.qubit + c.base) +
                              " is missing from the schedule");
    for (int q : c.output_qubits())
      if (!s.qubit_map.count(q))
        throw ValidationError("output qubit " + std::to_string(q + c.base) +
                              " has no final patch");
  }
}

// Report form: empty when the schedule is structurally sound, otherwise the
// first violated constraint.
inline std::vector<std::string> validate_schedule_report(
    const SurgerySchedule& s) {
  try {
    validate_schedule(s);
  } catch (const ValidationError& e) {
    return {e.what()};
  }
  return {};
}

}  // namespace lsc
