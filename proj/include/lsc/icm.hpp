#pragma once

#include <array>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "lsc/circuit.hpp"
#include "lsc/statevector.hpp"

namespace lsc {

// A correction rule fires when the product of the listed trigger outcomes
// is -1. Trigger ids: "M<q>" is the logical measurement outcome of qubit q
// (frame-folded), "PM<q>" the phase-merge outcome when a rotated
// measurement is realized by injection, "PC<q>" the corrective-merge
// outcome, "R<k>"/"S<k>" rough/smooth gadget merges. Rules are applied in
// list order; a rule whose trigger is not produced by the executing side
// is inert. A rule targeting a measured qubit folds into its reported
// outcome: track_z flips an X-line outcome, track_x flips a Z-line one.
struct CorrectionRule {
  std::vector<std::string> triggers;
  Action action = Action::TRACK_Z;
  int qubit = 0;
};

inline std::string action_name(Action a) {
  switch (a) {
    case Action::TRACK_X: return "track_x";
    case Action::TRACK_Z: return "track_z";
    case Action::APPLY_P: return "apply_p";
  }
  throw EngineBug("bad action");
}

inline std::string trig_m(int q, int base) {
  return "M" + std::to_string(q + base);
}
inline std::string trig_pm(int q, int base) {
  return "PM" + std::to_string(q + base);
}
inline std::string trig_pc(int q, int base) {
  return "PC" + std::to_string(q + base);
}

inline std::array<cplx, 2> init_amplitudes(InitState s) {
  double r = 1.0 / std::sqrt(2.0);
  switch (s) {
    case InitState::ZERO: return {cplx{1, 0}, cplx{0, 0}};
    case InitState::PLUS: return {cplx{r, 0}, cplx{r, 0}};
    case InitState::Y: return {cplx{r, 0}, r * phase_y()};
    case InitState::A: return {cplx{r, 0}, r * phase_a()};
  }
  throw EngineBug("bad init state");
}

// Row vector applied directly to (a0, a1) when projecting out a
// measurement branch with outcome eta.
inline std::array<cplx, 2> measure_bra(MeasBasis b, int eta) {
  double r = 1.0 / std::sqrt(2.0);
  cplx e{static_cast<double>(eta), 0};
  switch (b) {
    case MeasBasis::X: return {cplx{r, 0}, e * r};
    case MeasBasis::Z:
      return eta > 0 ? std::array<cplx, 2>{cplx{1, 0}, cplx{0, 0}}
                     : std::array<cplx, 2>{cplx{0, 0}, cplx{1, 0}};
    case MeasBasis::Y: return {cplx{r, 0}, e * r * phase_y()};
    case MeasBasis::A: return {cplx{r, 0}, e * r * phase_a()};
  }
  throw EngineBug("bad basis");
}

struct InvertResult {
  Circuit circuit;
  std::vector<CorrectionRule> rules;
};

// Frame discipline for realizing each rotated-basis measurement by
// ancilla injection and a phase merge: on PM<q> = -1 the patch carries an
// extra X and Z, and the pi/4 case additionally needs a phase correction
// (realized by a conditional corrective merge).
inline std::vector<CorrectionRule> realization_rules(const Circuit& c) {
  std::vector<CorrectionRule> rules;
  for (const auto& m : c.measures) {
    if (!rotated_basis(m.basis)) continue;
    int q = m.qubit;
    rules.push_back({{trig_pm(q, c.base)}, Action::TRACK_X, q});
    rules.push_back({{trig_pm(q, c.base)}, Action::TRACK_Z, q});
    if (m.basis == MeasBasis::A)
      rules.push_back({{trig_pm(q, c.base)}, Action::APPLY_P, q});
  }
  return rules;
}

// Rewrites a circuit with rotated initializations into one with only
// |0>/|+> initializations and rotated-basis measurements. Two shapes are
// supported per rotated qubit s:
//  - s is X-measured and never a cnot target: its init becomes |+> and its
//    measurement becomes the rotated basis; no correction is needed.
//  - s is unmeasured, controls exactly one single-target cnot s->d where d
//    is Z-measured and unused afterwards: s becomes |0>, the cnot is
//    reversed, d's measurement becomes the rotated basis, and M<d> = -1
//    requires a Z frame update on s.
// Every rotated measurement of the result carries realization rules on its
// phase-merge outcome PM<q>: a Pauli frame update for both bases plus a
// phase correction for the pi/4 case.
inline InvertResult invert_icm(const Circuit& icm) {
  validate_or_throw(icm, Form::ICM);
  InvertResult out;
  out.circuit = icm;
  Circuit& c = out.circuit;
  std::vector<CorrectionRule> gadget_rules;

  std::vector<int> targeted(c.n_qubits, 0);
  std::vector<std::vector<int>> controls_stmts(c.n_qubits);
  for (size_t gi = 0; gi < c.cnots.size(); ++gi) {
    controls_stmts[c.cnots[gi].control].push_back(static_cast<int>(gi));
    for (int t : c.cnots[gi].targets) targeted[t] += 1;
  }

  for (auto& init : c.inits) {
    if (!rotated_init(init.state)) continue;
    int s = init.qubit;
    InitState rot = init.state;
    MeasBasis rb = rot == InitState::Y ? MeasBasis::Y : MeasBasis::A;
    MeasureOp* ms = nullptr;
    for (auto& m : c.measures)
      if (m.qubit == s) ms = &m;
    if (ms != nullptr) {
      if (ms->basis != MeasBasis::X)
        throw ValidationError(
            "rotated qubit " + std::to_string(s + c.base) +
            " must be X-measured to invert in place");
      if (targeted[s] != 0)
        throw ValidationError("rotated qubit " + std::to_string(s + c.base) +
                              " may not be a cnot target");
      init.state = InitState::PLUS;
      ms->basis = rb;
      continue;
    }
    if (controls_stmts[s].size() != 1 || targeted[s] != 0)
      throw ValidationError(
          "unmeasured rotated qubit " + std::to_string(s + c.base) +
          " must control exactly one cnot");
    CnotOp& g = c.cnots[controls_stmts[s][0]];
    if (g.targets.size() != 1)
      throw ValidationError(
          "rotated qubit " + std::to_string(s + c.base) +
          " must control a single-target cnot");
    int d = g.targets[0];
    for (size_t gi = controls_stmts[s][0] + 1; gi < c.cnots.size(); ++gi) {
      const CnotOp& later = c.cnots[gi];
      bool uses_d = later.control == d;
      for (int t : later.targets) uses_d = uses_d || t == d;
      if (uses_d)
        throw ValidationError("teleport target " + std::to_string(d + c.base) +
                              " is reused after the gadget cnot");
    }
    MeasureOp* md = nullptr;
    for (auto& m : c.measures)
      if (m.qubit == d) md = &m;
    if (md == nullptr || md->basis != MeasBasis::Z)
      throw ValidationError("teleport target " + std::to_string(d + c.base) +
                            " must be Z-measured");
    init.state = InitState::ZERO;
    g.control = d;
    g.targets = {s};
    md->basis = rb;
    gadget_rules.push_back({{trig_m(d, c.base)}, Action::TRACK_Z, s});
  }

  out.rules = realization_rules(c);
  out.rules.insert(out.rules.end(), gadget_rules.begin(), gadget_rules.end());
  validate_or_throw(c, Form::INVERTED);
  return out;
}

// Accepts either form: a circuit with rotated initializations is inverted;
// one already in inverted form only needs its realization rules.
inline InvertResult to_inverted(const Circuit& c) {
  for (const auto& i : c.inits)
    if (rotated_init(i.state)) return invert_icm(c);
  validate_or_throw(c, Form::INVERTED);
  return {c, realization_rules(c)};
}

// Correction discipline for a teleport gadget left in rotated-init form:
// on M<d> = -1 the surviving qubit s needs X then Z (pi/2 ancilla) or X
// then P (pi/4 ancilla) to match the branch with outcome +1 up to phase.
inline std::vector<CorrectionRule> icm_gadget_rules(const Circuit& icm) {
  std::vector<CorrectionRule> rules;
  std::vector<int> targeted(icm.n_qubits, 0);
  for (const auto& g : icm.cnots)
    for (int t : g.targets) targeted[t] += 1;
  for (const auto& init : icm.inits) {
    if (!rotated_init(init.state)) continue;
    int s = init.qubit;
    if (icm.measure_of(s) != nullptr) continue;  // in-place shape, no rules
    for (const auto& g : icm.cnots) {
      if (g.control != s || g.targets.size() != 1) continue;
      int d = g.targets[0];
      const MeasureOp* md = icm.measure_of(d);
      if (md == nullptr || md->basis != MeasBasis::Z) continue;
      rules.push_back({{trig_m(d, icm.base)}, Action::TRACK_X, s});
      rules.push_back({{trig_m(d, icm.base)},
                       init.state == InitState::A ? Action::APPLY_P
                                                  : Action::TRACK_Z,
                       s});
    }
  }
  return rules;
}

// One measurement branch of a dense circuit run: outcomes are folded
// (frame rules applied), the state covers the unmeasured qubits in
// ascending id order with corrections applied, prob is the branch weight.
struct CircuitBranch {
  std::vector<std::pair<int, int>> outcomes;
  double prob = 0;
  StateVector state;
};

namespace detail {

inline bool x_line_basis(MeasBasis b) { return b != MeasBasis::Z; }

// Applies frame rules to raw outcomes and the surviving state.
// `raw` maps trigger id -> +-1; entries for measured qubits are updated in
// place by folding rules. Returns the folded per-qubit outcomes.
inline void apply_rules(const std::vector<CorrectionRule>& rules,
                        std::map<std::string, int>& outcomes,
                        const std::map<int, MeasBasis>& measured,
                        const std::map<int, int>& out_slot, StateVector& state,
                        int base) {
  for (const auto& rule : rules) {
    int prod = 1;
    bool resolved = true;
    for (const auto& t : rule.triggers) {
      auto it = outcomes.find(t);
      if (it == outcomes.end()) {
        resolved = false;
        break;
      }
      prod *= it->second;
    }
    if (!resolved || prod > 0) continue;
    auto mit = measured.find(rule.qubit);
    if (mit != measured.end()) {
      bool xline = x_line_basis(mit->second);
      bool flips = (rule.action == Action::TRACK_Z && xline) ||
                   (rule.action == Action::TRACK_X && !xline);
      // apply_p on a measured qubit is realized by conditional waves
      // before the measurement, so it folds to nothing here.
      if (flips) {
        auto& v = outcomes[trig_m(rule.qubit, base)];
        v = -v;
      }
      continue;
    }
    auto sit = out_slot.find(rule.qubit);
    if (sit == out_slot.end())
      throw EngineBug("correction rule targets an unknown qubit");
    switch (rule.action) {
      case Action::TRACK_X: dense::apply_x(state, sit->second); break;
      case Action::TRACK_Z: dense::apply_z(state, sit->second); break;
      case Action::APPLY_P:
        dense::apply_phase(state, sit->second, phase_y());
        break;
    }
  }
}

}  // namespace detail

// Runs the circuit densely, enumerating every measurement branch in
// statement order. `inputs` must provide single-qubit amplitudes for each
// uninitialized qubit.
inline std::vector<CircuitBranch> enumerate_branches(
    const Circuit& c, const std::vector<CorrectionRule>& rules,
    const std::map<int, std::array<cplx, 2>>& inputs) {
  dense::check_cap(c.n_qubits);
  StateVector init;
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
    dense::push_qubit(init, amp[0], amp[1]);
  }
  for (const auto& g : c.cnots)
    for (int t : g.targets) dense::apply_cnot(init, g.control, t);

  struct Partial {
    StateVector state;
    std::vector<int> slot;  // qubit -> slot, -1 once measured
    std::vector<std::pair<int, int>> raw;
    double prob = 1.0;
  };
  Partial seed;
  seed.state = std::move(init);
  seed.slot.resize(c.n_qubits);
  for (int q = 0; q < c.n_qubits; ++q) seed.slot[q] = q;
  std::vector<Partial> frontier{std::move(seed)};

  for (const auto& m : c.measures) {
    std::vector<Partial> next;
    for (const auto& part : frontier) {
      for (int eta : {+1, -1}) {
        Partial b = part;
        auto bra = measure_bra(m.basis, eta);
        int slot = b.slot[m.qubit];
        double p = dense::project_out(b.state, slot, bra[0], bra[1]);
        if (p < 1e-15) continue;
        b.state.normalize();
        b.prob *= p;
        b.slot[m.qubit] = -1;
        for (int q = 0; q < c.n_qubits; ++q)
          if (b.slot[q] > slot) b.slot[q] -= 1;
        b.raw.push_back({m.qubit, eta});
        next.push_back(std::move(b));
      }
    }
    frontier = std::move(next);
  }

  std::map<int, MeasBasis> measured;
  for (const auto& m : c.measures) measured[m.qubit] = m.basis;

  std::vector<CircuitBranch> out;
  for (auto& part : frontier) {
    std::map<std::string, int> outcomes;
    for (const auto& [q, eta] : part.raw) outcomes[trig_m(q, c.base)] = eta;
    std::map<int, int> out_slot;
    for (int q = 0; q < c.n_qubits; ++q)
      if (part.slot[q] >= 0) out_slot[q] = part.slot[q];
    detail::apply_rules(rules, outcomes, measured, out_slot, part.state,
                        c.base);
    CircuitBranch br;
    br.prob = part.prob;
    br.state = std::move(part.state);
    for (const auto& [q, b] : measured)
      br.outcomes.push_back({q, outcomes.at(trig_m(q, c.base))});
    out.push_back(std::move(br));
  }
  return out;
}

struct EquivOptions {
  double tol = 1e-9;
  int random_inputs = 3;
  uint64_t seed = 12345;
  bool basis_sweep = true;
};

struct EquivResult {
  bool ok = true;
  std::string detail;
};

namespace detail {

struct BranchGroup {
  double prob = 0;
  StateVector state;
  bool has_state = false;
};

inline bool group_branches(const std::vector<CircuitBranch>& branches,
                           double tol,
                           std::map<std::vector<std::pair<int, int>>,
                                    BranchGroup>& groups,
                           std::string& err) {
  for (const auto& br : branches) {
    auto& g = groups[br.outcomes];
    if (g.has_state) {
      if (!states_equal_up_to_phase(g.state, br.state, tol)) {
        err = "branches with equal folded outcomes disagree in state";
        return false;
      }
    } else {
      g.state = br.state;
      g.has_state = true;
    }
    g.prob += br.prob;
  }
  return true;
}

inline std::string key_string(const std::vector<std::pair<int, int>>& key,
                              int base) {
  std::string s;
  for (const auto& [q, eta] : key) {
    if (!s.empty()) s += " ";
    s += "M" + std::to_string(q + base) + (eta > 0 ? "=+1" : "=-1");
  }
  return s.empty() ? "(none)" : s;
}

inline bool compare_groups(
    const std::map<std::vector<std::pair<int, int>>, BranchGroup>& ga,
    const std::map<std::vector<std::pair<int, int>>, BranchGroup>& gb,
    double tol, int base, std::string& err) {
  for (const auto& [key, a] : ga) {
    auto it = gb.find(key);
    if (it == gb.end()) {
      if (a.prob > tol) {
        err = "branch " + key_string(key, base) + " missing on one side";
        return false;
      }
      continue;
    }
    const auto& b = it->second;
    if (std::abs(a.prob - b.prob) > tol) {
      err = "branch " + key_string(key, base) + " probability mismatch";
      return false;
    }
    if (a.prob > tol && !states_equal_up_to_phase(a.state, b.state, tol)) {
      err = "branch " + key_string(key, base) + " output state mismatch";
      return false;
    }
  }
  for (const auto& [key, b] : gb)
    if (ga.find(key) == ga.end() && b.prob > tol) {
      err = "branch " + key_string(key, base) + " missing on one side";
      return false;
    }
  return true;
}

}  // namespace detail

// Dense equivalence of two measured circuits over every computational
// input and a few random product inputs: branch keys, probabilities, and
// corrected output states must all agree.
inline EquivResult check_circuit_equivalence(
    const Circuit& a, const std::vector<CorrectionRule>& ra, const Circuit& b,
    const std::vector<CorrectionRule>& rb, const EquivOptions& opts = {}) {
  EquivResult res;
  auto ia = a.input_qubits(), ib = b.input_qubits();
  if (ia != ib || a.n_qubits != b.n_qubits) {
    res.ok = false;
    res.detail = "circuits differ in qubit count or input set";
    return res;
  }
  std::vector<std::map<int, std::array<cplx, 2>>> assignments;
  size_t k = ia.size();
  if (opts.basis_sweep && k <= 4) {
    for (size_t bits = 0; bits < (size_t{1} << k); ++bits) {
      std::map<int, std::array<cplx, 2>> asg;
      for (size_t i = 0; i < k; ++i)
        asg[ia[i]] = (bits >> i) & 1
                         ? std::array<cplx, 2>{cplx{0, 0}, cplx{1, 0}}
                         : std::array<cplx, 2>{cplx{1, 0}, cplx{0, 0}};
      assignments.push_back(std::move(asg));
    }
  }
  Rng rng(opts.seed);
  std::normal_distribution<double> dist;
  for (int r = 0; r < opts.random_inputs; ++r) {
    std::map<int, std::array<cplx, 2>> asg;
    for (int q : ia) {
      cplx a0{dist(rng), dist(rng)}, a1{dist(rng), dist(rng)};
      double n = std::sqrt(std::norm(a0) + std::norm(a1));
      asg[q] = {a0 / n, a1 / n};
    }
    assignments.push_back(std::move(asg));
  }
  if (assignments.empty()) assignments.push_back({});

  for (const auto& asg : assignments) {
    auto ba = enumerate_branches(a, ra, asg);
    auto bb = enumerate_branches(b, rb, asg);
    std::map<std::vector<std::pair<int, int>>, detail::BranchGroup> ga, gb;
    std::string err;
    if (!detail::group_branches(ba, opts.tol, ga, err) ||
        !detail::group_branches(bb, opts.tol, gb, err) ||
        !detail::compare_groups(ga, gb, opts.tol, a.base, err)) {
      res.ok = false;
      res.detail = err;
      return res;
    }
  }
  return res;
}

// Size-capped boolean form of the dense comparison.
inline bool check_equivalence_small(const Circuit& a,
                                    const std::vector<CorrectionRule>& ra,
                                    const Circuit& b,
                                    const std::vector<CorrectionRule>& rb,
                                    int max_qubits = kDenseQubitCap) {
  if (a.n_qubits > max_qubits || b.n_qubits > max_qubits)
    throw ValidationError("circuit exceeds the dense comparison cap");
  return check_circuit_equivalence(a, ra, b, rb).ok;
}

}  // namespace lsc
