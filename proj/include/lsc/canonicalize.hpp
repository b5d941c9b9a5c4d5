#pragma once

#include <bit>
#include <map>
#include <vector>

#include "lsc/circuit.hpp"
#include "lsc/stabilizer.hpp"

namespace lsc {

// Stabilizer tableau of the pre-measurement state of a fully initialized
// circuit with |0>/|+> inits (one row per qubit, cnots applied in order).
inline StabilizerMatrix circuit_prep_tableau(const Circuit& c) {
  if (!c.input_qubits().empty())
    throw ValidationError("cannot build a tableau for a circuit with inputs");
  StabilizerMatrix s;
  s.n = c.n_qubits;
  std::vector<InitState> st(c.n_qubits, InitState::ZERO);
  for (const auto& i : c.inits) st[i.qubit] = i.state;
  for (int q = 0; q < c.n_qubits; ++q) {
    if (rotated_init(st[q]))
      throw ValidationError("tableau replay requires |0>/|+> inits only");
    s.rows.push_back(st[q] == InitState::PLUS ? PauliRow::pauli_x(q)
                                              : PauliRow::pauli_z(q));
  }
  for (const auto& g : c.cnots)
    for (int t : g.targets) apply_cnot(s, g.control, t);
  return s;
}

struct CanonicalProgram {
  Circuit circuit;
  bool used_synthesis = false;
};

namespace detail {

struct Gate {
  int c, t;
  bool operator==(const Gate&) const = default;
};

enum class Hop { SWAP, EXTRA, BLOCKED };

struct HopResult {
  Hop kind;
  Gate extra{};
};

// Exchange of adjacent cnots [h, g] -> [g, h(, extra)] preserving the
// circuit. Crosswise pairs admit no such exchange.
inline HopResult hop(const Gate& h, const Gate& g) {
  if (g.c == h.t && g.t == h.c) return {Hop::BLOCKED};
  if (g.c == h.t) return {Hop::EXTRA, {h.c, g.t}};
  if (g.t == h.c) return {Hop::EXTRA, {g.c, h.t}};
  return {Hop::SWAP};
}

}  // namespace detail

// Rewrites an inverted-form circuit so that every cnot runs from a
// |+>-initialized control to a |0>-initialized target, then groups the
// cnots into fans per control. The rewrite bubbles removable gates to the
// front where they act on fresh |+>/|0> states and vanish; when the gate
// algebra blocks that (or the hop budget runs out), the state is
// resynthesized from its tableau instead. Measurements pass through
// untouched and the prepared state is verified to be identical.
inline CanonicalProgram canonicalize(const Circuit& in) {
  validate_or_throw(in, Form::INVERTED);
  if (!in.input_qubits().empty())
    throw ValidationError("canonicalization requires a fully initialized circuit");

  std::vector<InitState> st(in.n_qubits, InitState::ZERO);
  for (const auto& i : in.inits) st[i.qubit] = i.state;

  std::vector<detail::Gate> gs;
  for (const auto& g : in.cnots)
    for (int t : g.targets) gs.push_back({g.control, t});

  size_t cap = 4 * gs.size() * gs.size() + 64;
  size_t hops = 0;
  bool gave_up = false;

  // Moves gs[idx] to the front one exchange at a time; deletes it there.
  auto bubble_out = [&](size_t idx) -> bool {
    size_t i = idx;
    while (i > 0) {
      if (hops >= cap) {
        gave_up = true;
        return false;
      }
      auto hr = detail::hop(gs[i - 1], gs[i]);
      if (hr.kind == detail::Hop::BLOCKED) return false;
      ++hops;
      std::swap(gs[i - 1], gs[i]);
      if (hr.kind == detail::Hop::EXTRA)
        gs.insert(gs.begin() + i + 1, hr.extra);
      --i;
    }
    gs.erase(gs.begin());
    return true;
  };

  bool progressed = true;
  while (progressed && !gave_up) {
    progressed = false;
    // Pass 1: gates targeting a |+> qubit vanish at the front.
    for (size_t i = 0; i < gs.size(); ++i) {
      if (st[gs[i].t] != InitState::PLUS) continue;
      if (bubble_out(i)) {
        progressed = true;
        break;
      }
      if (gave_up) break;
    }
    if (progressed || gave_up) continue;
    // Pass 2: gates controlled by a |0> qubit vanish at the front.
    for (size_t i = 0; i < gs.size(); ++i) {
      if (st[gs[i].c] != InitState::ZERO) continue;
      if (bubble_out(i)) {
        progressed = true;
        break;
      }
      if (gave_up) break;
    }
    if (progressed || gave_up) continue;
    // Pass 3: identical pairs cancel when everything between commutes.
    for (size_t i = 0; i + 1 < gs.size() && !progressed; ++i) {
      for (size_t j = i + 1; j < gs.size(); ++j) {
        if (!(gs[i] == gs[j])) continue;
        bool clean = true;
        for (size_t k = i + 1; k < j && clean; ++k)
          clean = detail::hop(gs[k], gs[i]).kind == detail::Hop::SWAP;
        if (!clean) continue;
        gs.erase(gs.begin() + j);
        gs.erase(gs.begin() + i);
        progressed = true;
        break;
      }
    }
  }

  bool valid_form = !gave_up;
  for (const auto& g : gs)
    valid_form = valid_form && st[g.c] == InitState::PLUS &&
                 st[g.t] == InitState::ZERO;

  CanonicalProgram out;
  Circuit& c = out.circuit;
  c.n_qubits = in.n_qubits;
  c.base = in.base;
  c.measures = in.measures;

  auto finish = [&](const std::vector<InitState>& init_states,
                    const std::vector<CnotOp>& fans) {
    c.inits.clear();
    c.cnots = fans;
    for (int q = 0; q < c.n_qubits; ++q)
      c.inits.push_back({q, init_states[q], 0});
    c.order.clear();
    for (size_t i = 0; i < c.inits.size(); ++i)
      c.order.push_back({'i', static_cast<int>(i)});
    for (size_t i = 0; i < c.cnots.size(); ++i)
      c.order.push_back({'c', static_cast<int>(i)});
    for (size_t i = 0; i < c.measures.size(); ++i)
      c.order.push_back({'m', static_cast<int>(i)});
  };

  if (valid_form) {
    // Fans per control, first-occurrence order both ways; a repeated
    // target toggles off (all valid-form cnots commute).
    std::vector<CnotOp> fans;
    std::map<int, size_t> fan_of;
    for (const auto& g : gs) {
      auto it = fan_of.find(g.c);
      if (it == fan_of.end()) {
        it = fan_of.emplace(g.c, fans.size()).first;
        fans.push_back({g.c, {}, 0});
      }
      auto& tg = fans[it->second].targets;
      auto pos = std::find(tg.begin(), tg.end(), g.t);
      if (pos == tg.end())
        tg.push_back(g.t);
      else
        tg.erase(pos);
    }
    std::erase_if(fans, [](const CnotOp& f) { return f.targets.empty(); });
    finish(st, fans);
    if (same_state(circuit_prep_tableau(in), circuit_prep_tableau(c)))
      return out;
  }

  // Tableau resynthesis: read fans straight off the canonical X block.
  out.used_synthesis = true;
  auto canon = canonical_form(circuit_prep_tableau(in));
  std::vector<InitState> synth_init(in.n_qubits, InitState::ZERO);
  std::vector<CnotOp> fans;
  for (const auto& row : canon.rows) {
    if (row.x == 0) continue;
    if (row.z != 0 || row.sign != +1)
      throw EngineBug("resynthesis expects a css-form x block");
    int pivot = std::countr_zero(row.x);
    synth_init[pivot] = InitState::PLUS;
    CnotOp fan{pivot, {}, 0};
    uint64_t rest = row.x & ~(uint64_t{1} << pivot);
    while (rest) {
      int t = std::countr_zero(rest);
      fan.targets.push_back(t);
      rest &= rest - 1;
    }
    if (!fan.targets.empty()) fans.push_back(fan);
  }
  finish(synth_init, fans);
  if (!same_state(circuit_prep_tableau(in), circuit_prep_tableau(c)))
    throw EngineBug("resynthesized state disagrees with the source circuit");
  return out;
}

}  // namespace lsc
