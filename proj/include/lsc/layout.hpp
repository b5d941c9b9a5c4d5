#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lsc/canonicalize.hpp"
#include "lsc/schedule.hpp"

namespace lsc {

// A placement: the grid plus one occupancy listing per timestep phase.
// Phase "init" labels cells with the owning control (strips), "0" (zero
// mediator), or an unfanned qubit id. Phase "split" relabels strip cells
// by member qubit. Every later phase is a full listing: qubit labels give
// target extents (patches overlapping one extent merge through its listed
// free cells), Y<q>/A<q> labels inject ancillas, unlisted cells are free.
// A label `q.k` names one of several disjoint extents of qubit q, so
// separate pieces can shrink, move, or merge pairwise in the same phase.
struct Phase {
  std::string name;
  std::map<Cell, std::string> cells;
};

struct Placement {
  int rows = 0, cols = 0;
  std::vector<Phase> phases;
};

inline Placement parse_placement(const std::string& text) {
  Placement p;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  bool saw_grid = false;
  while (std::getline(in, raw)) {
    ++lineno;
    auto toks = detail::tokenize(raw);
    if (toks.empty()) continue;
    if (toks[0] == "grid") {
      if (saw_grid) throw ParseError("duplicate grid line", lineno);
      if (toks.size() != 3) throw ParseError("usage: grid <rows> <cols>", lineno);
      p.rows = detail::parse_int(toks[1], lineno);
      p.cols = detail::parse_int(toks[2], lineno);
      if (p.rows <= 0 || p.cols <= 0)
        throw ParseError("grid dimensions must be positive", lineno);
      saw_grid = true;
      continue;
    }
    if (!saw_grid) throw ParseError("the first statement must be 'grid'", lineno);
    if (toks[0] == "phase") {
      if (toks.size() != 2) throw ParseError("usage: phase <name>", lineno);
      p.phases.push_back({toks[1], {}});
      continue;
    }
    if (toks[0] == "at") {
      if (toks.size() != 4)
        throw ParseError("usage: at <row> <col> <label>", lineno);
      if (p.phases.empty())
        throw ParseError("cell listing before any phase", lineno);
      Cell c{detail::parse_int(toks[1], lineno), detail::parse_int(toks[2], lineno)};
      if (c.r < 0 || c.r >= p.rows || c.c < 0 || c.c >= p.cols)
        throw ParseError("cell outside the grid", lineno);
      if (toks[3] == "free") continue;
      if (!p.phases.back().cells.emplace(c, toks[3]).second)
        throw ParseError("cell listed twice in one phase", lineno);
      continue;
    }
    throw ParseError("unknown statement '" + toks[0] + "'", lineno);
  }
  if (!saw_grid) throw ParseError("empty placement: missing grid line", 1);
  if (p.phases.empty()) throw ParseError("placement has no phases", 1);
  return p;
}

// One column per fan, one row per qubit. Strips span the fan's member
// rows; each member's piece absorbs the rows down to the next member.
// Unfanned qubits sit in the first column whose strip skips their row.
// If every inter-piece gap along a qubit's row is already free after the
// split, the pieces chain-merge immediately; otherwise a shrink-to-home
// wave frees the rows first.
inline Placement naive_layout(const Circuit& prog) {
  int n = prog.n_qubits;
  const auto& fans = prog.cnots;
  int m = static_cast<int>(fans.size());
  std::vector<int> lo(m, 0), hi(m, 0);
  std::vector<std::vector<int>> members(m);
  std::vector<std::vector<int>> cols_of(n);
  std::vector<bool> fanned(n, false);
  for (int j = 0; j < m; ++j) {
    members[j] = fans[j].targets;
    members[j].push_back(fans[j].control);
    std::sort(members[j].begin(), members[j].end());
    lo[j] = members[j].front();
    hi[j] = members[j].back();
    for (int q : members[j]) {
      cols_of[q].push_back(j);
      fanned[q] = true;
    }
  }
  auto strip_covers = [&](int j, int r) { return lo[j] <= r && r <= hi[j]; };

  Placement p;
  p.rows = n;
  p.cols = std::max(m, 1);
  std::vector<Cell> home(n, Cell{-1, -1});
  bool extra_col = false;
  for (int q = 0; q < n; ++q) {
    if (fanned[q]) continue;
    int col = -1;
    for (int j = 0; j < m; ++j)
      if (!strip_covers(j, q)) {
        col = j;
        break;
      }
    if (col < 0) {
      extra_col = true;
      col = m;
    }
    home[q] = {q, col};
  }
  if (extra_col) p.cols = m + 1;

  auto disp = [&](int q) { return std::to_string(q + prog.base); };

  Phase init{"init", {}};
  for (int j = 0; j < m; ++j)
    for (int r = lo[j]; r <= hi[j]; ++r)
      init.cells[{r, j}] = disp(fans[j].control);
  for (int q = 0; q < n; ++q)
    if (!fanned[q]) init.cells[home[q]] = disp(q);
  p.phases.push_back(std::move(init));

  // Piece extents within each strip, keyed by (member, column).
  std::map<std::pair<int, int>, std::pair<int, int>> piece_rows;
  if (m > 0) {
    Phase split{"split", {}};
    for (int j = 0; j < m; ++j) {
      for (size_t i = 0; i < members[j].size(); ++i) {
        int from = members[j][i];
        int to = i + 1 < members[j].size() ? members[j][i + 1] - 1 : hi[j];
        piece_rows[{members[j][i], j}] = {from, to};
        for (int r = from; r <= to; ++r)
          split.cells[{r, j}] = disp(members[j][i]);
      }
    }
    p.phases.push_back(std::move(split));
  }

  bool blocked = false;
  for (int q = 0; q < n && !blocked; ++q) {
    if (cols_of[q].size() < 2) continue;
    int jmin = cols_of[q].front(), jmax = cols_of[q].back();
    for (int j = jmin; j <= jmax && !blocked; ++j) {
      if (std::find(cols_of[q].begin(), cols_of[q].end(), j) != cols_of[q].end())
        continue;
      if (j < m && strip_covers(j, q)) blocked = true;
    }
  }

  auto merged_listing = [&](bool from_home) {
    Phase ph{"merge", {}};
    for (int q = 0; q < n; ++q) {
      if (!fanned[q]) {
        ph.cells[home[q]] = disp(q);
        continue;
      }
      if (cols_of[q].size() == 1) {
        int j = cols_of[q][0];
        if (from_home) {
          ph.cells[{q, j}] = disp(q);
        } else {
          auto [from, to] = piece_rows.at({q, j});
          for (int r = from; r <= to; ++r) ph.cells[{r, j}] = disp(q);
        }
        continue;
      }
      for (int j = cols_of[q].front(); j <= cols_of[q].back(); ++j) {
        bool member = std::find(cols_of[q].begin(), cols_of[q].end(), j) !=
                      cols_of[q].end();
        if (member && !from_home) {
          auto [from, to] = piece_rows.at({q, j});
          for (int r = from; r <= to; ++r) ph.cells[{r, j}] = disp(q);
        } else {
          ph.cells[{q, j}] = disp(q);
        }
      }
    }
    return ph;
  };

  if (m > 0 && !blocked) {
    p.phases.push_back(merged_listing(false));
  } else if (m > 0) {
    Phase shrink{"shrink", {}};
    for (int q = 0; q < n; ++q) {
      if (!fanned[q]) {
        shrink.cells[home[q]] = disp(q);
        continue;
      }
      for (size_t i = 0; i < cols_of[q].size(); ++i) {
        std::string label = disp(q);
        if (cols_of[q].size() > 1) label += "." + std::to_string(i + 1);
        shrink.cells[{q, cols_of[q][i]}] = label;
      }
    }
    p.phases.push_back(std::move(shrink));
    p.phases.push_back(merged_listing(true));
  }
  return p;
}

namespace detail {

struct EPatch {
  std::vector<Cell> cells;  // sorted
  int qubit = -1;           // -1 for zero mediators
  bool zero = false;
  bool anc = false;
  std::set<int> controls;
};

struct LabelRef {
  char kind;  // 'q' qubit, '0' zero, 'Y'/'A' injection
  int qubit = -1;
  int piece = 0;  // 1-based `.k` extent suffix, 0 when absent
};

inline LabelRef parse_label(const std::string& s, int base, int n_qubits) {
  if (s == "0") return {'0'};
  std::string body = s;
  char kind = 'q';
  if (s.size() > 1 && (s[0] == 'Y' || s[0] == 'A')) {
    kind = s[0];
    body = s.substr(1);
  }
  int piece = 0;
  auto dot = body.find('.');
  if (dot != std::string::npos) {
    std::string tail = body.substr(dot + 1);
    body = body.substr(0, dot);
    try {
      size_t pos = 0;
      piece = std::stoi(tail, &pos);
      if (pos != tail.size() || piece < 1) throw std::invalid_argument(tail);
    } catch (const std::invalid_argument&) {
      throw PlacementError("unknown placement label '" + s + "'");
    } catch (const std::out_of_range&) {
      throw PlacementError("unknown placement label '" + s + "'");
    }
  }
  try {
    size_t pos = 0;
    int v = std::stoi(body, &pos);
    if (pos != body.size()) throw std::invalid_argument(body);
    v -= base;
    if (v < 0 || v >= n_qubits)
      throw PlacementError("label '" + s + "' is out of qubit range");
    return {kind, v, piece};
  } catch (const std::invalid_argument&) {
    throw PlacementError("unknown placement label '" + s + "'");
  } catch (const std::out_of_range&) {
    throw PlacementError("unknown placement label '" + s + "'");
  }
}

inline std::vector<std::vector<Cell>> components(const std::set<Cell>& cells) {
  std::vector<std::vector<Cell>> out;
  std::set<Cell> left = cells;
  while (!left.empty()) {
    std::vector<Cell> comp{*left.begin()};
    left.erase(left.begin());
    for (size_t i = 0; i < comp.size(); ++i) {
      Cell c = comp[i];
      for (Cell d : {Cell{c.r - 1, c.c}, Cell{c.r + 1, c.c},
                     Cell{c.r, c.c - 1}, Cell{c.r, c.c + 1}}) {
        auto it = left.find(d);
        if (it != left.end()) {
          comp.push_back(d);
          left.erase(it);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

// Realizes a canonical program on the placement, producing the schedule:
// the placement's phases become the leading waves, then ancilla
// injections, phase merges, conditional corrective merges, and the final
// measurement wave are appended. `rules` carries the inversion's frame
// discipline (phase-merge realization rules plus any teleport rules).
inline SurgerySchedule emit_schedule(const Circuit& prog,
                                     const std::vector<CorrectionRule>& rules,
                                     const Placement& place) {
  if (!prog.input_qubits().empty())
    throw ValidationError("scheduling requires a fully initialized circuit");
  validate_or_throw(prog, Form::INVERTED);
  if (prog.base < 1)
    throw ValidationError(
        "scheduling requires base >= 1 so qubit labels stay distinct from "
        "the mediator label 0");

  int n = prog.n_qubits;
  std::vector<InitState> st(n, InitState::ZERO);
  for (const auto& i : prog.inits) st[i.qubit] = i.state;
  std::vector<int> fan_of(n, -1);
  std::vector<bool> is_target(n, false);
  for (size_t j = 0; j < prog.cnots.size(); ++j) {
    int c = prog.cnots[j].control;
    if (fan_of[c] >= 0)
      throw ValidationError("control " + std::to_string(c + prog.base) +
                            " has more than one fan");
    fan_of[c] = static_cast<int>(j);
    for (int t : prog.cnots[j].targets) is_target[t] = true;
  }
  for (int q = 0; q < n; ++q) {
    if (fan_of[q] >= 0 && st[q] != InitState::PLUS)
      throw ValidationError("fan control " + std::to_string(q + prog.base) +
                            " must be |+> initialized");
    if (is_target[q] && st[q] != InitState::ZERO)
      throw ValidationError("fan target " + std::to_string(q + prog.base) +
                            " must be |0> initialized");
    if (is_target[q] && fan_of[q] >= 0)
      throw ValidationError("qubit " + std::to_string(q + prog.base) +
                            " is both a control and a target");
  }

  if (place.phases.empty() || place.phases[0].name != "init")
    throw PlacementError("the first phase must be 'init'");
  bool has_fans = !prog.cnots.empty();
  if (has_fans &&
      (place.phases.size() < 2 || place.phases[1].name != "split"))
    throw PlacementError("a program with fans needs a 'split' second phase");

  SurgerySchedule s;
  s.rows = place.rows;
  s.cols = place.cols;
  s.base = prog.base;
  s.circuit_text = serialize_circuit(prog);

  auto disp = [&](int q) { return std::to_string(q + prog.base); };
  std::map<std::string, detail::EPatch> patches;
  auto occupied = [&](Cell c) {
    for (const auto& [id, p] : patches)
      for (const auto& pc : p.cells)
        if (pc == c) return true;
    return false;
  };
  auto patch_of = [&](int q) -> std::string {
    std::string found;
    for (const auto& [id, p] : patches)
      if (!p.anc && p.qubit == q) {
        if (!found.empty())
          throw PlacementError("qubit " + disp(q) +
                               " is spread over several patches");
        found = id;
      }
    if (found.empty())
      throw PlacementError("qubit " + disp(q) + " has no patch");
    return found;
  };

  // Phase 1: strips, mediators, and unfanned qubits.
  {
    std::map<std::string, std::set<Cell>> by_label;
    for (const auto& [cell, label] : place.phases[0].cells)
      by_label[label].insert(cell);
    std::vector<SurgeryOp> wave;
    int zero_idx = 0;
    std::set<int> placed;
    for (const auto& [label, cells] : by_label) {
      auto comps = detail::components(cells);
      detail::LabelRef ref = detail::parse_label(label, prog.base, n);
      if (ref.kind == '0') {
        for (const auto& comp : comps) {
          std::string id = "z" + std::to_string(++zero_idx);
          patches[id] = {comp, -1, true, false, {}};
          SurgeryOp op;
          op.kind = OpKind::INIT;
          op.patch = id;
          op.state = "zero";
          op.cells = comp;
          wave.push_back(op);
        }
        continue;
      }
      if (ref.kind != 'q')
        throw PlacementError("injection labels are not allowed in 'init'");
      if (ref.piece != 0)
        throw PlacementError("piece labels are not allowed in 'init'");
      int q = ref.qubit;
      if (comps.size() != 1)
        throw PlacementError("qubit " + disp(q) +
                             " must start as one connected patch");
      if (is_target[q])
        throw PlacementError("fan target " + disp(q) +
                             " emerges from a strip; do not place it");
      placed.insert(q);
      SurgeryOp op;
      op.kind = OpKind::INIT;
      op.cells = comps[0];
      if (fan_of[q] >= 0) {
        if (comps[0].size() < prog.cnots[fan_of[q]].targets.size() + 1)
          throw PlacementError("strip of control " + disp(q) +
                               " is too small for its pieces");
        op.patch = "s" + disp(q);
        op.state = "plus";
        patches[op.patch] = {comps[0], q, false, false, {q}};
      } else {
        op.patch = "q" + disp(q);
        op.state = st[q] == InitState::PLUS ? "plus" : "zero";
        patches[op.patch] = {comps[0], q, false, false,
                             st[q] == InitState::PLUS ? std::set<int>{q}
                                                      : std::set<int>{}};
      }
      wave.push_back(op);
    }
    for (int q = 0; q < n; ++q)
      if (!is_target[q] && !placed.count(q))
        throw PlacementError("qubit " + disp(q) + " is missing from 'init'");
    std::sort(wave.begin(), wave.end(),
              [](const SurgeryOp& a, const SurgeryOp& b) {
                return a.cells.front() < b.cells.front();
              });
    s.steps.push_back(std::move(wave));
  }

  // Phase 2: split each strip into member pieces.
  if (has_fans) {
    std::map<std::string, std::map<int, std::set<Cell>>> strip_pieces;
    for (const auto& [cell, label] : place.phases[1].cells) {
      detail::LabelRef ref = detail::parse_label(label, prog.base, n);
      if (ref.kind != 'q' || ref.piece != 0)
        throw PlacementError("'split' accepts qubit labels only");
      std::string strip;
      for (const auto& [id, p] : patches) {
        if (p.zero || fan_of[p.qubit] < 0) continue;
        if (std::binary_search(p.cells.begin(), p.cells.end(), cell))
          strip = id;
      }
      if (strip.empty())
        throw PlacementError("'split' lists a cell outside any strip");
      strip_pieces[strip][ref.qubit].insert(cell);
    }
    std::vector<SurgeryOp> wave;
    for (const auto& [strip, by_member] : strip_pieces) {
      int control = patches.at(strip).qubit;
      const CnotOp& fan = prog.cnots[fan_of[control]];
      std::set<int> want(fan.targets.begin(), fan.targets.end());
      want.insert(control);
      size_t covered = 0;
      SurgeryOp op;
      op.kind = OpKind::SPLIT;
      op.patch = strip;
      for (const auto& [member, cells] : by_member) {
        if (!want.count(member))
          throw PlacementError("qubit " + disp(member) +
                               " is not a member of strip " + strip);
        auto comps = detail::components(cells);
        if (comps.size() != 1)
          throw PlacementError("piece of qubit " + disp(member) +
                               " must be connected");
        covered += comps[0].size();
        op.pieces.push_back({"p" + disp(control) + "." + disp(member),
                             comps[0]});
      }
      if (by_member.size() != want.size())
        throw PlacementError("strip " + strip +
                             " must split into one piece per member");
      if (covered != patches.at(strip).cells.size())
        throw PlacementError("split pieces must cover strip " + strip);
      std::sort(op.pieces.begin(), op.pieces.end(),
                [](const Piece& a, const Piece& b) {
                  return a.cells.front() < b.cells.front();
                });
      wave.push_back(op);
    }
    for (const auto& [id, p] : patches)
      if (!p.zero && fan_of[p.qubit] >= 0 && !strip_pieces.count(id))
        throw PlacementError("strip " + id + " is missing from 'split'");
    std::sort(wave.begin(), wave.end(),
              [&](const SurgeryOp& a, const SurgeryOp& b) {
                return patches.at(a.patch).cells.front() <
                       patches.at(b.patch).cells.front();
              });
    for (const auto& op : wave) {
      int control = patches.at(op.patch).qubit;
      for (const auto& piece : op.pieces) {
        detail::LabelRef ref = detail::parse_label(
            place.phases[1].cells.at(piece.cells.front()), prog.base, n);
        patches[piece.patch] = {piece.cells, ref.qubit, false, false,
                                {control}};
      }
      patches.erase(op.patch);
    }
    s.steps.push_back(std::move(wave));
  }

  int rough_idx = 0;
  std::vector<CorrectionRule> rs_rules;

  // Remaining placement phases: full listings driving diffs and merges.
  for (size_t k = has_fans ? 2 : 1; k < place.phases.size(); ++k) {
    const Phase& ph = place.phases[k];
    // qubit -> extent suffix -> listed cells
    std::map<int, std::map<int, std::set<Cell>>> target;
    std::set<Cell> zero_listed;
    std::vector<std::pair<int, Cell>> injections;
    std::vector<char> inject_kind;
    for (const auto& [cell, label] : ph.cells) {
      detail::LabelRef ref = detail::parse_label(label, prog.base, n);
      switch (ref.kind) {
        case 'q': target[ref.qubit][ref.piece].insert(cell); break;
        case '0': zero_listed.insert(cell); break;
        default:
          if (ref.piece != 0)
            throw PlacementError("injection label '" + label +
                                 "' cannot carry a piece suffix");
          injections.push_back({ref.qubit, cell});
          inject_kind.push_back(ref.kind);
      }
    }

    std::vector<SurgeryOp> wave;
    std::set<std::string> absorbed_zeros;
    for (const auto& [q, groups] : target) {
      for (const auto& [g, cells] : groups)
        if (detail::components(cells).size() != 1)
          throw PlacementError("phase " + ph.name + " lists qubit " +
                               disp(q) + " as a disconnected extent");
      std::vector<std::string> alive;
      for (const auto& [id, p] : patches)
        if (!p.anc && !p.zero && p.qubit == q) alive.push_back(id);
      if (alive.empty())
        throw PlacementError("phase " + ph.name + " lists qubit " + disp(q) +
                             " which has no patch");
      // Match each live patch to the one listed extent it overlaps. A
      // lone patch with a lone extent pairs directly so it can still move.
      std::map<int, std::vector<std::string>> members;
      if (groups.size() == 1 && alive.size() == 1) {
        members[groups.begin()->first].push_back(alive[0]);
      } else {
        for (const auto& id : alive) {
          std::set<int> hit;
          for (const auto& [g, cells] : groups)
            for (const auto& c : patches.at(id).cells)
              if (cells.count(c)) {
                hit.insert(g);
                break;
              }
          if (hit.empty())
            throw PlacementError("phase " + ph.name + " drops patch " + id +
                                 " of qubit " + disp(q));
          if (hit.size() > 1)
            throw PlacementError("phase " + ph.name + " splits patch " + id +
                                 " across extents of qubit " + disp(q));
          members[*hit.begin()].push_back(id);
        }
        for (const auto& [g, cells] : groups)
          if (!members.count(g))
            throw PlacementError("phase " + ph.name + " lists an extent of " +
                                 "qubit " + disp(q) + " holding no patch");
      }
      for (auto& [g, mem] : members) {
        const std::set<Cell>& tset = groups.at(g);
        for (const auto& [id, p] : patches) {
          if (!p.zero) continue;
          bool inside = true;
          for (const auto& c : p.cells) inside = inside && tset.count(c);
          if (inside) {
            if (!absorbed_zeros.insert(id).second)
              throw PlacementError("mediator " + id + " is claimed twice");
            mem.push_back(id);
          }
        }
        std::sort(mem.begin(), mem.end(),
                  [&](const std::string& a, const std::string& b) {
                    return patches.at(a).cells.front() <
                           patches.at(b).cells.front();
                  });
        if (mem.size() >= 2) {
          std::set<Cell> unioned;
          for (const auto& id : mem)
            for (const auto& c : patches.at(id).cells) {
              if (!tset.count(c))
                throw PlacementError("phase " + ph.name +
                                     " shrinks a merging patch of qubit " +
                                     disp(q));
              unioned.insert(c);
            }
          SurgeryOp op;
          op.kind = OpKind::MERGE;
          op.rough = true;
          op.patches = mem;
          op.patch = "q" + disp(q);
          if (g != 0) op.patch += "." + std::to_string(g);
          if (patches.count(op.patch) &&
              std::find(mem.begin(), mem.end(), op.patch) == mem.end())
            throw PlacementError("merge of qubit " + disp(q) +
                                 " collides with patch " + op.patch);
          op.cells.assign(tset.begin(), tset.end());
          for (const auto& c : tset)
            if (!unioned.count(c)) {
              if (occupied(c))
                throw PlacementError("merge path of qubit " + disp(q) +
                                     " crosses an occupied cell");
              op.path.push_back(c);
            }
          wave.push_back(op);
          continue;
        }
        // Single patch: unchanged, shrink, grow, or a unit move.
        const auto& p = patches.at(mem[0]);
        std::set<Cell> old(p.cells.begin(), p.cells.end());
        if (old == tset) continue;
        SurgeryOp op;
        op.patch = mem[0];
        op.cells.assign(tset.begin(), tset.end());
        if (std::includes(old.begin(), old.end(), tset.begin(), tset.end())) {
          op.kind = OpKind::SHRINK;
        } else if (std::includes(tset.begin(), tset.end(), old.begin(),
                                 old.end())) {
          op.kind = OpKind::GROW;
          for (const auto& c : tset)
            if (!old.count(c) && occupied(c))
              throw PlacementError("grow of qubit " + disp(q) +
                                   " hits an occupied cell");
        } else if (old.size() == tset.size()) {
          int dr = op.cells.front().r - p.cells.front().r;
          int dc = op.cells.front().c - p.cells.front().c;
          if (std::abs(dr) + std::abs(dc) != 1)
            throw PlacementError("patch of qubit " + disp(q) +
                                 " moves more than one cell");
          for (size_t i = 0; i < p.cells.size(); ++i)
            if (op.cells[i].r - p.cells[i].r != dr ||
                op.cells[i].c - p.cells[i].c != dc)
              throw PlacementError("patch of qubit " + disp(q) +
                                   " changes shape while moving");
          op.kind = OpKind::MOVE;
          for (const auto& c : tset)
            if (!old.count(c) && occupied(c))
              throw PlacementError("move of qubit " + disp(q) +
                                   " hits an occupied cell");
        } else {
          throw PlacementError("unsupported patch transform for qubit " +
                               disp(q) + " in phase " + ph.name);
        }
        wave.push_back(op);
      }
    }

    // Unreferenced qubit patches must persist explicitly.
    for (const auto& [id, p] : patches)
      if (!p.anc && !p.zero && p.qubit >= 0 && !target.count(p.qubit))
        throw PlacementError("phase " + ph.name + " omits qubit " +
                             disp(p.qubit));
    // Listed mediator cells must match surviving mediators exactly.
    if (!zero_listed.empty()) {
      std::set<Cell> expect;
      for (const auto& [id, p] : patches)
        if (p.zero && !absorbed_zeros.count(id))
          expect.insert(p.cells.begin(), p.cells.end());
      if (zero_listed != expect)
        throw PlacementError("phase " + ph.name +
                             " relocates a zero mediator");
    }

    for (size_t i = 0; i < injections.size(); ++i) {
      auto [q, cell] = injections[i];
      const MeasureOp* m = prog.measure_of(q);
      MeasBasis want = inject_kind[i] == 'Y' ? MeasBasis::Y : MeasBasis::A;
      if (m == nullptr || m->basis != want)
        throw PlacementError("injection for qubit " + disp(q) +
                             " does not match its measurement basis");
      if (patches.count("a" + disp(q)))
        throw PlacementError("qubit " + disp(q) + " is injected twice");
      if (occupied(cell))
        throw PlacementError("injection cell for qubit " + disp(q) +
                             " is occupied");
      SurgeryOp op;
      op.kind = OpKind::INJECT;
      op.patch = "a" + disp(q);
      op.state = std::string(1, inject_kind[i]);
      op.qubit = q;
      op.cells = {cell};
      wave.push_back(op);
    }

    std::stable_sort(wave.begin(), wave.end(),
                     [](const SurgeryOp& a, const SurgeryOp& b) {
                       if (a.kind != b.kind) return a.kind < b.kind;
                       return a.cells.front() < b.cells.front();
                     });
    for (auto& op : wave) {
      if (op.kind == OpKind::MERGE) {
        for (size_t i = 1; i < op.patches.size(); ++i)
          op.ids.push_back("R" + std::to_string(++rough_idx));
        std::set<int> controls;
        int result_qubit = -1;
        for (size_t i = 0; i < op.patches.size(); ++i) {
          const auto& mp = patches.at(op.patches[i]);
          result_qubit = std::max(result_qubit, mp.qubit);
          if (i > 0)
            for (int ctrl : mp.controls)
              rs_rules.push_back({{op.ids[i - 1]}, Action::TRACK_Z, ctrl});
          for (int ctrl : mp.controls)
            if (!controls.erase(ctrl)) controls.insert(ctrl);
        }
        detail::EPatch np{op.cells, result_qubit, false, false, controls};
        for (const auto& id : op.patches) patches.erase(id);
        patches[op.patch] = np;
      } else if (op.kind == OpKind::INJECT) {
        patches[op.patch] = {op.cells, op.qubit, false, true, {}};
      } else {
        patches.at(op.patch).cells = op.cells;
      }
    }
    s.steps.push_back(std::move(wave));
  }

  for (const auto& [id, p] : patches)
    if (p.zero)
      throw PlacementError("mediator " + id + " is never absorbed");
  for (int q = 0; q < n; ++q) s.qubit_map[q] = patch_of(q);

  // Ancilla injection for rotated measurements not placed by hand.
  std::vector<int> rotated, a_measured;
  for (const auto& m : prog.measures) {
    if (!rotated_basis(m.basis)) continue;
    rotated.push_back(m.qubit);
    if (m.basis == MeasBasis::A) a_measured.push_back(m.qubit);
  }
  std::sort(rotated.begin(), rotated.end());
  std::sort(a_measured.begin(), a_measured.end());

  // One free adjacent cell per patch, all distinct. Candidates are scanned
  // in patch-cell order (left, right, up, down); backtracking resolves
  // contention between patches that share their free neighbours.
  auto place_adjacent = [&](const std::vector<std::string>& pids) {
    std::vector<std::vector<Cell>> options;
    for (const auto& pid : pids) {
      std::vector<Cell> opts;
      std::set<Cell> seen;
      for (const auto& c : patches.at(pid).cells)
        for (Cell d : {Cell{c.r, c.c - 1}, Cell{c.r, c.c + 1},
                       Cell{c.r - 1, c.c}, Cell{c.r + 1, c.c}}) {
          if (d.r < 0 || d.r >= s.rows || d.c < 0 || d.c >= s.cols) continue;
          if (occupied(d) || !seen.insert(d).second) continue;
          opts.push_back(d);
        }
      if (opts.empty())
        throw PlacementError("no free cell adjacent to patch " + pid +
                             " for ancilla injection");
      options.push_back(std::move(opts));
    }
    std::vector<Cell> chosen(pids.size());
    std::set<Cell> used;
    std::function<bool(size_t)> assign = [&](size_t i) {
      if (i == options.size()) return true;
      for (const auto& c : options[i]) {
        if (!used.insert(c).second) continue;
        chosen[i] = c;
        if (assign(i + 1)) return true;
        used.erase(c);
      }
      return false;
    };
    if (!assign(0))
      throw PlacementError("ancilla injections cannot all be placed");
    return chosen;
  };

  if (!rotated.empty()) {
    std::vector<int> need;
    for (int q : rotated)
      if (!patches.count("a" + disp(q))) need.push_back(q);
    if (!need.empty()) {
      std::vector<std::string> pids;
      for (int q : need) pids.push_back(patch_of(q));
      std::vector<Cell> cells = place_adjacent(pids);
      std::vector<SurgeryOp> inject_wave;
      for (size_t i = 0; i < need.size(); ++i) {
        int q = need[i];
        SurgeryOp op;
        op.kind = OpKind::INJECT;
        op.patch = "a" + disp(q);
        op.state = prog.measure_of(q)->basis == MeasBasis::Y ? "Y" : "A";
        op.qubit = q;
        op.cells = {cells[i]};
        inject_wave.push_back(op);
      }
      for (const auto& op : inject_wave)
        patches[op.patch] = {op.cells, op.qubit, false, true, {}};
      s.steps.push_back(std::move(inject_wave));
    }
    std::vector<SurgeryOp> pm_wave;
    for (int q : rotated) {
      std::string data = patch_of(q), anc = "a" + disp(q);
      SurgeryOp op;
      op.kind = OpKind::MERGE;
      op.rough = false;
      op.patches = {data, anc};
      op.patch = "q" + disp(q);
      op.ids = {trig_pm(q, prog.base)};
      std::set<Cell> cells(patches.at(data).cells.begin(),
                           patches.at(data).cells.end());
      cells.insert(patches.at(anc).cells.front());
      op.cells.assign(cells.begin(), cells.end());
      if (!detail::cells_connected(op.cells))
        throw PlacementError("ancilla of qubit " + disp(q) +
                             " is not adjacent to its patch");
      detail::EPatch np{op.cells, q, false, false,
                        patches.at(data).controls};
      patches.erase(data);
      patches.erase(anc);
      patches[op.patch] = np;
      pm_wave.push_back(op);
    }
    s.steps.push_back(std::move(pm_wave));
  }

  std::vector<CorrectionRule> pc_rules;
  if (!a_measured.empty()) {
    std::vector<SurgeryOp> inj_wave, merge_wave;
    std::vector<std::string> pids;
    for (int q : a_measured) pids.push_back(patch_of(q));
    std::vector<Cell> cells = place_adjacent(pids);
    for (size_t i = 0; i < a_measured.size(); ++i) {
      int q = a_measured[i];
      Condition cond{{trig_pm(q, prog.base)}, -1};
      SurgeryOp inj;
      inj.kind = OpKind::INJECT;
      inj.patch = "y" + disp(q);
      inj.state = "Y";
      inj.qubit = q;
      inj.cells = {cells[i]};
      inj.condition = cond;
      inj_wave.push_back(inj);
      patches[inj.patch] = {inj.cells, q, false, true, {}};
      pc_rules.push_back({{trig_pc(q, prog.base)}, Action::TRACK_X, q});
      pc_rules.push_back({{trig_pc(q, prog.base)}, Action::TRACK_Z, q});
    }
    for (int q : a_measured) {
      Condition cond{{trig_pm(q, prog.base)}, -1};
      std::string data = patch_of(q), anc = "y" + disp(q);
      SurgeryOp op;
      op.kind = OpKind::MERGE;
      op.rough = false;
      op.patches = {data, anc};
      op.patch = "q" + disp(q);
      op.ids = {trig_pc(q, prog.base)};
      op.condition = cond;
      std::set<Cell> cells(patches.at(data).cells.begin(),
                           patches.at(data).cells.end());
      cells.insert(patches.at(anc).cells.front());
      op.cells.assign(cells.begin(), cells.end());
      detail::EPatch np{op.cells, q, false, false, patches.at(data).controls};
      patches.erase(data);
      patches.erase(anc);
      patches[op.patch] = np;
      merge_wave.push_back(op);
    }
    s.steps.push_back(std::move(inj_wave));
    s.steps.push_back(std::move(merge_wave));
  }

  // Assemble the frame rules: phase-merge realization first (so folding
  // happens before anything reads M values), then corrective-merge and
  // chain-merge frames, then teleport rules.
  std::vector<CorrectionRule> pm_rules, gadget_rules;
  for (const auto& r : rules) {
    bool pm = !r.triggers.empty() && r.triggers[0].rfind("PM", 0) == 0;
    (pm ? pm_rules : gadget_rules).push_back(r);
  }
  s.corrections = pm_rules;
  s.corrections.insert(s.corrections.end(), pc_rules.begin(), pc_rules.end());
  s.corrections.insert(s.corrections.end(), rs_rules.begin(), rs_rules.end());
  s.corrections.insert(s.corrections.end(), gadget_rules.begin(),
                       gadget_rules.end());

  if (!prog.measures.empty()) {
    std::vector<SurgeryOp> wave;
    auto meas = prog.measures;
    std::sort(meas.begin(), meas.end(),
              [](const MeasureOp& a, const MeasureOp& b) {
                return a.qubit < b.qubit;
              });
    for (const auto& m : meas) {
      SurgeryOp op;
      op.kind = OpKind::MEASURE;
      op.patch = patch_of(m.qubit);
      op.basis = m.basis == MeasBasis::Z ? 'Z' : 'X';
      op.qubit = m.qubit;
      op.id = trig_m(m.qubit, prog.base);
      patches.erase(op.patch);
      wave.push_back(op);
    }
    std::set<int> measured;
    for (const auto& m : meas) measured.insert(m.qubit);
    for (const auto& r : s.corrections) {
      if (measured.count(r.qubit)) continue;
      SurgeryOp op;
      op.kind = OpKind::CORRECT;
      op.action = r.action;
      op.qubit = r.qubit;
      op.condition = {r.triggers, -1};
      wave.push_back(op);
    }
    s.steps.push_back(std::move(wave));
  }
  return s;
}

}  // namespace lsc
