#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lsc/canonicalize.hpp"
#include "lsc/schedule.hpp"

namespace lsc {

namespace detail {

// Patch id -> engine column for schedule replays. Columns mirror the engine
// exactly: new qubits append on top, dropped columns shift the rest down.
struct SlotMap {
  std::map<std::string, int> slots;

  int count() const { return (int)slots.size(); }
  bool has(const std::string& id) const { return slots.count(id) != 0; }

  int at(const std::string& id) const {
    auto it = slots.find(id);
    if (it == slots.end()) throw EngineBug("no slot for patch " + id);
    return it->second;
  }

  void append(const std::string& id) {
    if (has(id)) throw ValidationError("patch id reused: " + id);
    slots[id] = count();
  }

  void drop(const std::string& id) {
    int s = at(id);
    slots.erase(id);
    for (auto& [k, v] : slots)
      if (v > s) v -= 1;
  }

  void rename(const std::string& from, const std::string& to) {
    if (from == to) return;
    int s = at(from);
    slots.erase(from);
    if (has(to)) throw ValidationError("patch id reused: " + to);
    slots[to] = s;
  }

  // Replaces the parent's column with k piece columns at the same position.
  void split(const std::string& parent, const std::vector<Piece>& pieces) {
    int s = at(parent);
    slots.erase(parent);
    int k = (int)pieces.size();
    for (auto& [id, v] : slots)
      if (v > s) v += k - 1;
    for (int i = 0; i < k; ++i) {
      if (has(pieces[i].patch))
        throw ValidationError("patch id reused: " + pieces[i].patch);
      slots[pieces[i].patch] = s + i;
    }
  }
};

inline void check_merge_shape(const SurgeryOp& op) {
  if (op.patches.size() < 2)
    throw ValidationError("merge needs at least two patches");
  if (op.ids.size() != op.patches.size() - 1)
    throw ValidationError("merge needs one outcome id per fusion");
}

inline bool merge_has_unknown(const SurgeryOp& op, const SlotMap& sm) {
  for (const auto& pid : op.patches)
    if (!sm.has(pid)) return true;
  return false;
}

// Stabilizer replay of a schedule up to the injection waves: conditional
// ops, injections, measurements, corrections, and any merge touching an
// ancilla-descended patch are skipped.
struct TableauReplay {
  StabilizerMatrix state;
  SlotMap slots;
  std::map<std::string, int> outcomes;  // merge outcome id -> eigenvalue
};

inline void replay_merge(TableauReplay& r, const SurgeryOp& op,
                         OutcomeSource& src) {
  check_merge_shape(op);
  int k = (int)op.patches.size();
  if (op.rough) {
    const std::string& acc = op.patches[0];
    for (int i = 1; i < k; ++i) {
      auto out = rough_merge(r.state, r.slots.at(op.patches[i]),
                             r.slots.at(acc), src, op.ids[i - 1]);
      r.outcomes[op.ids[i - 1]] = out.eigenvalue;
      r.slots.drop(op.patches[i]);
    }
    r.slots.rename(acc, op.patch);
  } else {
    std::string cur = op.patches[0];
    for (int i = 1; i < k; ++i) {
      auto out = smooth_merge(r.state, r.slots.at(cur),
                              r.slots.at(op.patches[i]), src, op.ids[i - 1]);
      r.outcomes[op.ids[i - 1]] = out.eigenvalue;
      r.slots.drop(cur);
      cur = op.patches[i];
    }
    r.slots.rename(cur, op.patch);
  }
}

inline TableauReplay replay_pre_injection(const SurgerySchedule& s,
                                          OutcomeSource& src) {
  TableauReplay r;
  for (const auto& wave : s.steps) {
    for (const auto& op : wave) {
      if (!op.condition.empty()) continue;
      switch (op.kind) {
        case OpKind::INIT:
          if (op.state == "plus")
            add_plus_qubit(r.state);
          else if (op.state == "zero")
            add_zero_qubit(r.state);
          else
            throw ValidationError("unknown init state: " + op.state);
          r.slots.append(op.patch);
          break;
        case OpKind::SPLIT: {
          if (op.pieces.size() < 2)
            throw ValidationError("split needs at least two pieces");
          int ps = r.slots.at(op.patch);
          r.slots.split(op.patch, op.pieces);
          for (size_t i = 1; i < op.pieces.size(); ++i)
            op.rough ? rough_split(r.state, ps) : smooth_split(r.state, ps);
          break;
        }
        case OpKind::MERGE:
          if (merge_has_unknown(op, r.slots)) break;
          replay_merge(r, op, src);
          break;
        default:
          break;  // move/shrink/grow are geometry; inject/measure/correct
                  // belong to the realization layer
      }
    }
  }
  return r;
}

}  // namespace detail

// Replays the schedule's surgery algebra for one outcome branch and returns
// the resulting stabilizer state with fired frame corrections applied,
// columns ordered by the qubit map (raw engine order when the map is
// absent).
inline StabilizerMatrix interpret_schedule(const SurgerySchedule& s,
                                           OutcomeSource& src) {
  detail::TableauReplay r = detail::replay_pre_injection(s, src);
  for (const auto& rule : s.corrections) {
    int prod = 1;
    bool resolved = true;
    for (const auto& t : rule.triggers) {
      auto it = r.outcomes.find(t);
      if (it == r.outcomes.end()) {
        resolved = false;
        break;
      }
      prod *= it->second;
    }
    if (!resolved || prod > 0) continue;
    auto qit = s.qubit_map.find(rule.qubit);
    if (qit == s.qubit_map.end())
      throw ValidationError("correction targets unmapped qubit " +
                            std::to_string(rule.qubit + s.base));
    int slot = r.slots.at(qit->second);
    switch (rule.action) {
      case Action::TRACK_X: apply_x(r.state, slot); break;
      case Action::TRACK_Z: apply_z(r.state, slot); break;
      case Action::APPLY_P: apply_s_gate(r.state, slot); break;
    }
  }
  if (s.qubit_map.empty()) return r.state;
  if (r.slots.count() != (int)s.qubit_map.size())
    throw ValidationError("qubit map does not cover the surviving patches");
  std::vector<int> perm;
  perm.reserve(s.qubit_map.size());
  for (const auto& [q, pid] : s.qubit_map) perm.push_back(r.slots.at(pid));
  return permute_columns(r.state, perm);
}

inline StabilizerMatrix interpret_schedule(
    const SurgerySchedule& s, const std::map<std::string, int>& branch,
    int fallback = +1) {
  MapOutcomeSource src(branch, fallback);
  return interpret_schedule(s, src);
}

struct VerifyReport {
  bool pass = false;
  std::string expected;  // canonical stabilizers of the source program
  std::string forced;    // all-plus replay, canonical form
  std::string sampled;   // seeded replay with corrections, canonical form
  std::string message;
};

// Checks the schedule against its embedded source program: the all-plus
// branch and a seeded random branch must both reproduce the program's
// pre-measurement stabilizer state once fired corrections are applied.
inline VerifyReport verify_schedule(const SurgerySchedule& s,
                                    uint64_t seed = 1) {
  if (s.circuit_text.empty())
    throw ValidationError("schedule carries no source program to verify");
  Circuit c = parse_circuit(s.circuit_text);
  StabilizerMatrix want = canonical_form(circuit_prep_tableau(c));

  VerifyReport rep;
  rep.expected = want.to_grid_string();
  ForcedOutcomeSource plus(+1);
  StabilizerMatrix f = canonical_form(interpret_schedule(s, plus));
  rep.forced = f.to_grid_string();
  RngOutcomeSource rng(seed);
  StabilizerMatrix r = canonical_form(interpret_schedule(s, rng));
  rep.sampled = r.to_grid_string();

  bool okf = f.n == want.n && f.rows == want.rows;
  bool okr = r.n == want.n && r.rows == want.rows;
  rep.pass = okf && okr;
  if (!okf)
    rep.message = "all-plus replay disagrees with the source program";
  else if (!okr)
    rep.message = "sampled replay disagrees with the source program";
  return rep;
}

struct ScheduleStats {
  int peak_slots = 0;      // worst-case simultaneous logical patches
  int outcome_points = 0;  // merge fusions plus measurements
};

// Worst-case counts assuming every conditional op executes.
inline ScheduleStats schedule_stats(const SurgerySchedule& s) {
  ScheduleStats st;
  int cur = 0;
  for (const auto& wave : s.steps)
    for (const auto& op : wave) {
      switch (op.kind) {
        case OpKind::INIT:
        case OpKind::INJECT: cur += 1; break;
        case OpKind::SPLIT: cur += (int)op.pieces.size() - 1; break;
        case OpKind::MERGE:
          st.outcome_points += (int)op.ids.size();
          cur -= (int)op.patches.size() - 1;
          break;
        case OpKind::MEASURE:
          st.outcome_points += 1;
          cur -= 1;
          break;
        default: break;
      }
      st.peak_slots = std::max(st.peak_slots, cur);
    }
  return st;
}

namespace detail {

// One branch of a dense schedule replay.
struct DensePartial {
  StateVector state;
  SlotMap slots;
  std::map<std::string, int> outcomes;
  std::map<std::string, std::string> succ;  // merged patch -> result id
  double prob = 1.0;
};

// Chooses an outcome given its id and the +1 branch probability.
using DensePick = std::function<int(const std::string&, double)>;

// Runs `fn(partial, eta)` as a two-way outcome point labelled `id`. With no
// pick both branches are kept (zero-probability ones pruned); with a pick
// only the chosen branch survives and a zero-probability choice is an error.
template <typename Fn>
inline void dense_branch(std::vector<DensePartial>& parts,
                         const std::string& id, const DensePick* pick,
                         double prune, Fn&& fn) {
  std::vector<DensePartial> next;
  next.reserve(parts.size() * (pick ? 1 : 2));
  for (auto& p : parts) {
    if (pick) {
      DensePartial probe = p;
      double f_plus = fn(probe, +1);
      int eta = (*pick)(id, f_plus);
      DensePartial& chosen = eta > 0 ? probe : p;
      double f = eta > 0 ? f_plus : fn(p, -1);
      if (f <= prune)
        throw ValidationError("branch " + id + " has zero probability");
      chosen.prob *= f;
      chosen.state.normalize();
      chosen.outcomes[id] = eta;
      next.push_back(std::move(chosen));
    } else {
      for (int eta : {+1, -1}) {
        DensePartial b = p;
        double f = fn(b, eta);
        if (f <= prune) continue;
        b.prob *= f;
        b.state.normalize();
        b.outcomes[id] = eta;
        next.push_back(std::move(b));
      }
    }
  }
  parts = std::move(next);
}

inline void dense_apply_op(const SurgeryOp& op,
                           std::vector<DensePartial>& parts,
                           const DensePick* pick, double prune) {
  if (parts.empty()) return;
  std::vector<DensePartial> run, skip;
  for (auto& p : parts) {
    bool fire = true;
    if (!op.condition.empty()) {
      int prod = 1;
      bool resolved = true;
      for (const auto& t : op.condition.triggers) {
        auto it = p.outcomes.find(t);
        if (it == p.outcomes.end()) {
          resolved = false;
          break;
        }
        prod *= it->second;
      }
      fire = resolved && prod == op.condition.outcome;
    }
    (fire ? run : skip).push_back(std::move(p));
  }

  switch (op.kind) {
    case OpKind::INIT:
    case OpKind::INJECT: {
      std::array<cplx, 2> amp;
      if (op.kind == OpKind::INIT) {
        if (op.state == "plus")
          amp = init_amplitudes(InitState::PLUS);
        else if (op.state == "zero")
          amp = init_amplitudes(InitState::ZERO);
        else
          throw ValidationError("unknown init state: " + op.state);
      } else {
        if (op.state == "Y")
          amp = init_amplitudes(InitState::Y);
        else if (op.state == "A")
          amp = init_amplitudes(InitState::A);
        else
          throw ValidationError("unknown injection state: " + op.state);
      }
      for (auto& p : run) {
        dense::push_qubit(p.state, amp[0], amp[1]);
        p.slots.append(op.patch);
      }
      break;
    }
    case OpKind::SPLIT: {
      if (op.pieces.size() < 2)
        throw ValidationError("split needs at least two pieces");
      for (auto& p : run) {
        int ps = p.slots.at(op.patch);
        p.slots.split(op.patch, op.pieces);
        for (size_t i = 1; i < op.pieces.size(); ++i)
          op.rough ? dense::rough_split(p.state, ps)
                   : dense::smooth_split(p.state, ps);
      }
      break;
    }
    case OpKind::MERGE: {
      check_merge_shape(op);
      int k = (int)op.patches.size();
      if (op.rough) {
        const std::string& acc = op.patches[0];
        for (int i = 1; i < k; ++i) {
          const std::string& absorbed = op.patches[i];
          dense_branch(run, op.ids[i - 1], pick, prune,
                       [&](DensePartial& p, int eta) {
                         double n2 = dense::rough_merge(
                             p.state, p.slots.at(absorbed), p.slots.at(acc),
                             eta);
                         p.slots.drop(absorbed);
                         p.succ[absorbed] = op.patch;
                         return n2 / 2.0;
                       });
        }
        for (auto& p : run) {
          p.slots.rename(acc, op.patch);
          if (acc != op.patch) p.succ[acc] = op.patch;
        }
      } else {
        std::string cur = op.patches[0];
        for (int i = 1; i < k; ++i) {
          const std::string& nxt = op.patches[i];
          dense_branch(run, op.ids[i - 1], pick, prune,
                       [&](DensePartial& p, int eta) {
                         double n2 = dense::smooth_merge(
                             p.state, p.slots.at(cur), p.slots.at(nxt), eta);
                         p.slots.drop(cur);
                         p.succ[cur] = op.patch;
                         return n2;
                       });
          cur = nxt;
        }
        for (auto& p : run) {
          p.slots.rename(cur, op.patch);
          if (cur != op.patch) p.succ[cur] = op.patch;
        }
      }
      break;
    }
    case OpKind::MEASURE: {
      dense_branch(run, op.id, pick, prune, [&](DensePartial& p, int eta) {
        int slot = p.slots.at(op.patch);
        std::array<cplx, 2> bra;
        if (op.basis == 'Z') {
          bra = eta > 0 ? std::array<cplx, 2>{1.0, 0.0}
                        : std::array<cplx, 2>{0.0, 1.0};
        } else {
          double r = 1.0 / std::sqrt(2.0);
          bra = {cplx{r, 0.0}, cplx{eta * r, 0.0}};
        }
        double pr = dense::project_out(p.state, slot, bra[0], bra[1]);
        p.slots.drop(op.patch);
        return pr;
      });
      break;
    }
    default:
      break;  // move/shrink/grow are geometry; corrections are carried by
              // the schedule's rule list, not replayed as gates
  }

  parts = std::move(run);
  for (auto& p : skip) parts.push_back(std::move(p));
}

inline StateVector reorder_state(const StateVector& v,
                                 const std::vector<int>& perm) {
  StateVector out;
  out.n = v.n;
  out.amps.assign(v.amps.size(), cplx{});
  for (size_t i = 0; i < v.amps.size(); ++i) {
    size_t j = 0;
    for (int k = 0; k < v.n; ++k)
      if ((i >> perm[k]) & 1) j |= size_t{1} << k;
    out.amps[j] = v.amps[i];
  }
  return out;
}

// Folds a finished dense replay into a branch record comparable with the
// source program's: frame rules collapse raw outcomes onto the per-qubit
// labels and repair the surviving state, which is reordered qubit-ascending.
inline CircuitBranch fold_dense_partial(DensePartial&& p,
                                        const SurgerySchedule& s,
                                        const Circuit& c,
                                        const std::map<int, MeasBasis>& measured) {
  std::map<int, int> out_slot;
  for (int q : c.output_qubits()) {
    auto it = s.qubit_map.find(q);
    if (it == s.qubit_map.end())
      throw ValidationError("qubit map misses output qubit " +
                            std::to_string(q + c.base));
    std::string pid = it->second;
    while (true) {
      auto sit = p.succ.find(pid);
      if (sit == p.succ.end() || sit->second == pid) break;
      pid = sit->second;
    }
    out_slot[q] = p.slots.at(pid);
  }
  if ((int)out_slot.size() != p.state.n)
    throw ValidationError("schedule leaves unexpected patches alive");
  apply_rules(s.corrections, p.outcomes, measured, out_slot, p.state, c.base);
  std::vector<int> perm;
  perm.reserve(out_slot.size());
  for (const auto& [q, slot] : out_slot) perm.push_back(slot);
  CircuitBranch br;
  br.prob = p.prob;
  br.state = reorder_state(p.state, perm);
  for (const auto& [q, b] : measured) {
    auto it = p.outcomes.find(trig_m(q, c.base));
    if (it == p.outcomes.end())
      throw ValidationError("schedule never measures qubit " +
                            std::to_string(q + c.base));
    br.outcomes.push_back({q, it->second});
  }
  return br;
}

}  // namespace detail

// Enumerates every outcome branch of the schedule densely and folds each
// into per-qubit outcome labels plus the corrected output state. Returns
// nothing when the replay would exceed the dense capacity or the outcome
// point budget.
inline std::optional<std::vector<CircuitBranch>> enumerate_schedule_branches(
    const SurgerySchedule& s, int max_outcome_points = 16,
    double prune = 1e-15) {
  ScheduleStats st = schedule_stats(s);
  if (st.peak_slots > kDenseQubitCap || st.outcome_points > max_outcome_points)
    return std::nullopt;
  Circuit c = parse_circuit(s.circuit_text);
  std::map<int, MeasBasis> measured;
  for (const auto& m : c.measures) measured[m.qubit] = m.basis;
  std::vector<detail::DensePartial> parts(1);
  for (const auto& wave : s.steps)
    for (const auto& op : wave)
      detail::dense_apply_op(op, parts, nullptr, prune);
  std::vector<CircuitBranch> out;
  out.reserve(parts.size());
  for (auto& p : parts)
    out.push_back(detail::fold_dense_partial(std::move(p), s, c, measured));
  return out;
}

// Samples one outcome branch of the schedule with physical probabilities.
inline CircuitBranch sample_schedule_branch(const SurgerySchedule& s, Rng& rng,
                                            double prune = 1e-15) {
  Circuit c = parse_circuit(s.circuit_text);
  std::map<int, MeasBasis> measured;
  for (const auto& m : c.measures) measured[m.qubit] = m.basis;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  detail::DensePick pick = [&](const std::string&, double p_plus) {
    return unif(rng) < p_plus ? +1 : -1;
  };
  std::vector<detail::DensePartial> parts(1);
  for (const auto& wave : s.steps)
    for (const auto& op : wave) detail::dense_apply_op(op, parts, &pick, prune);
  if (parts.size() != 1) throw EngineBug("sampling must keep one branch");
  return detail::fold_dense_partial(std::move(parts[0]), s, c, measured);
}

// Raw dense replay of the schedule along one explicitly assigned outcome
// branch: no frame rules are folded, the state keeps engine slot order.
// Requesting a zero-probability outcome is an error.
inline StateVector simulate_statevector(const SurgerySchedule& s,
                                        const std::map<std::string, int>& branch,
                                        double* prob = nullptr) {
  detail::DensePick pick = [&](const std::string& id, double) {
    auto it = branch.find(id);
    if (it == branch.end())
      throw ValidationError("branch assignment misses outcome " + id);
    if (it->second != +1 && it->second != -1)
      throw ValidationError("outcome " + id + " must be +1 or -1");
    return it->second;
  };
  std::vector<detail::DensePartial> parts(1);
  for (const auto& wave : s.steps)
    for (const auto& op : wave)
      detail::dense_apply_op(op, parts, &pick, 1e-15);
  if (parts.size() != 1) throw EngineBug("assignment walk must keep one branch");
  if (prob) *prob = parts[0].prob;
  return std::move(parts[0].state);
}

// Raw dense run of a circuit along one assigned measurement branch, outputs
// in qubit order. Uninitialized qubits draw their input from `inputs`.
inline StateVector simulate_statevector(
    const Circuit& c, const std::map<std::string, int>& branch,
    const std::map<int, std::array<cplx, 2>>& inputs = {},
    double* prob = nullptr) {
  dense::check_cap(c.n_qubits);
  StateVector v;
  std::vector<int> slot(c.n_qubits);
  for (int q = 0; q < c.n_qubits; ++q) {
    auto st = c.init_of(q);
    std::array<cplx, 2> amp;
    if (st) {
      amp = init_amplitudes(*st);
    } else {
      auto it = inputs.find(q);
      if (it == inputs.end())
        throw ValidationError("no input state for qubit " +
                              std::to_string(q + c.base));
      amp = it->second;
    }
    dense::push_qubit(v, amp[0], amp[1]);
    slot[q] = q;
  }
  for (const auto& g : c.cnots)
    for (int t : g.targets) dense::apply_cnot(v, g.control, t);
  double pr = 1.0;
  for (const auto& m : c.measures) {
    std::string id = trig_m(m.qubit, c.base);
    auto it = branch.find(id);
    if (it == branch.end())
      throw ValidationError("branch assignment misses outcome " + id);
    auto bra = measure_bra(m.basis, it->second);
    int sl = slot[m.qubit];
    double p = dense::project_out(v, sl, bra[0], bra[1]);
    if (p <= 1e-15)
      throw ValidationError("branch " + id + " has zero probability");
    pr *= p;
    v.normalize();
    slot[m.qubit] = -1;
    for (int q = 0; q < c.n_qubits; ++q)
      if (slot[q] > sl) slot[q] -= 1;
  }
  if (prob) *prob = pr;
  return v;
}

struct ScheduleEquivOptions {
  double tol = 1e-9;
  int max_outcome_points = 16;  // exhaustive enumeration budget
  int samples = 24;             // sampled fallback above that budget
  uint64_t seed = 99;
  double prune = 1e-15;
};

struct ScheduleEquivResult {
  bool ok = true;
  bool checked = false;     // false when the dense capacity rules it out
  bool exhaustive = false;  // full branch ensemble vs sampled paths
  std::string detail;
};

// Dense equivalence of a schedule against its source program under the
// given frame rules: branch keys, probabilities, and corrected output
// states must agree. Falls back to sampled branches when the full ensemble
// is too large, and reports unchecked when dense capacity is exceeded.
inline ScheduleEquivResult check_schedule_equivalence(
    const Circuit& c, const std::vector<CorrectionRule>& rules,
    const SurgerySchedule& s, const ScheduleEquivOptions& opts = {}) {
  ScheduleEquivResult res;
  ScheduleStats st = schedule_stats(s);
  if (st.peak_slots > kDenseQubitCap || c.n_qubits > kDenseQubitCap) {
    res.detail = "dense capacity exceeded; tableau checks only";
    return res;
  }
  auto circuit_branches = enumerate_branches(c, rules, {});
  std::map<std::vector<std::pair<int, int>>, detail::BranchGroup> gc;
  std::string err;
  res.checked = true;
  if (!detail::group_branches(circuit_branches, opts.tol, gc, err)) {
    res.ok = false;
    res.detail = "program: " + err;
    return res;
  }
  if (st.outcome_points <= opts.max_outcome_points) {
    res.exhaustive = true;
    auto sched = enumerate_schedule_branches(s, opts.max_outcome_points,
                                             opts.prune);
    std::map<std::vector<std::pair<int, int>>, detail::BranchGroup> gs;
    if (!detail::group_branches(*sched, opts.tol, gs, err)) {
      res.ok = false;
      res.detail = "schedule: " + err;
      return res;
    }
    if (!detail::compare_groups(gc, gs, opts.tol, c.base, err)) {
      res.ok = false;
      res.detail = err;
      return res;
    }
  } else {
    Rng rng(opts.seed);
    for (int i = 0; i < opts.samples; ++i) {
      CircuitBranch br = sample_schedule_branch(s, rng, opts.prune);
      auto it = gc.find(br.outcomes);
      if (it == gc.end()) {
        res.ok = false;
        res.detail = "sampled branch " + detail::key_string(br.outcomes, c.base) +
                     " missing from the program ensemble";
        return res;
      }
      if (!states_equal_up_to_phase(it->second.state, br.state, opts.tol)) {
        res.ok = false;
        res.detail = "sampled branch " + detail::key_string(br.outcomes, c.base) +
                     " output state mismatch";
        return res;
      }
    }
  }
  return res;
}

namespace detail {

inline void check_cnot_expansion_args(int n, int control,
                                      const std::vector<int>& targets) {
  if (control < 0 || control >= n)
    throw ValidationError("cnot control out of range");
  if (targets.empty()) throw ValidationError("cnot needs at least one target");
  std::set<int> seen;
  for (int t : targets) {
    if (t < 0 || t >= n) throw ValidationError("cnot target out of range");
    if (t == control) throw ValidationError("cnot control equals target");
    if (!seen.insert(t).second)
      throw ValidationError("cnot targets must be distinct");
  }
}

}  // namespace detail

// Surgery expansion of a multi-target cnot on a dense state: one ancilla
// smooth-merged with the control, one Z-copy split per target, one rough
// merge per target; eta = -1 rough outcomes are repaired by Z on the
// control. `outcomes` lists the control merge first, then one per target.
inline void expand_general_cnot(StateVector& v, int control,
                                const std::vector<int>& targets,
                                const std::vector<int>& outcomes) {
  detail::check_cnot_expansion_args(v.n, control, targets);
  if (outcomes.size() != targets.size() + 1)
    throw ValidationError("need one outcome per fusion");
  for (int o : outcomes)
    if (o != +1 && o != -1)
      throw ValidationError("outcomes must be +1 or -1");
  int anc = v.n;
  double r = 1.0 / std::sqrt(2.0);
  dense::push_qubit(v, cplx{r, 0.0}, cplx{r, 0.0});
  double n2 = dense::smooth_merge(v, anc, control, outcomes[0]);
  if (n2 <= 1e-12) throw EngineBug("impossible control merge branch");
  v.normalize();
  int k = (int)targets.size();
  for (int i = 0; i < k; ++i) dense::smooth_split(v, control);
  for (int i = 0; i < k; ++i) {
    int shift = k - i;  // copies still waiting above the control
    int t = targets[i];
    int tslot = t < control ? t : t + shift;
    double m2 = dense::rough_merge(v, control + 1, tslot, outcomes[1 + i]);
    if (m2 <= 1e-12) throw EngineBug("impossible target merge branch");
    v.normalize();
    if (outcomes[1 + i] < 0) dense::apply_z(v, control);
  }
}

// The same expansion on a stabilizer tableau; indeterminate merge outcomes
// are drawn from `src`.
inline void expand_general_cnot(StabilizerMatrix& m, int control,
                                const std::vector<int>& targets,
                                OutcomeSource& src) {
  detail::check_cnot_expansion_args(m.n, control, targets);
  int anc = m.n;
  add_plus_qubit(m);
  smooth_merge(m, anc, control, src, "S0");
  int k = (int)targets.size();
  for (int i = 0; i < k; ++i) smooth_split(m, control);
  for (int i = 0; i < k; ++i) {
    int shift = k - i;
    int t = targets[i];
    int tslot = t < control ? t : t + shift;
    auto out = rough_merge(m, control + 1, tslot, src,
                           "R" + std::to_string(i + 1));
    if (out.eigenvalue < 0) apply_z(m, control);
  }
}

}  // namespace lsc
