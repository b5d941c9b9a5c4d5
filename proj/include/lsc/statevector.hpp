#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "lsc/common.hpp"

namespace lsc {

using cplx = std::complex<double>;

constexpr int kDenseQubitCap = 14;
constexpr double kAmpTol = 1e-9;

// Dense state over n qubits, little-endian: bit q of the amplitude index
// is qubit q's basis value.
struct StateVector {
  int n = 0;
  std::vector<cplx> amps{cplx{1.0, 0.0}};

  static StateVector scalar() { return {}; }

  size_t size() const { return amps.size(); }

  double norm2() const {
    double s = 0;
    for (const auto& a : amps) s += std::norm(a);
    return s;
  }

  void normalize() {
    double n2 = norm2();
    if (n2 <= 0) throw EngineBug("normalizing a zero state");
    double inv = 1.0 / std::sqrt(n2);
    for (auto& a : amps) a *= inv;
  }
};

inline cplx phase_y() { return cplx{0.0, 1.0}; }
inline cplx phase_a() {
  return std::polar(1.0, std::numbers::pi / 4.0);
}

namespace dense {

inline void check_cap(int n) {
  if (n > kDenseQubitCap)
    throw ValidationError("dense oracle capacity (14 qubits) exceeded");
}

// Appends a fresh qubit in state a0|0> + a1|1> as the highest slot.
inline void push_qubit(StateVector& v, cplx a0, cplx a1) {
  check_cap(v.n + 1);
  size_t old = v.amps.size();
  v.amps.resize(old * 2);
  for (size_t i = 0; i < old; ++i) {
    v.amps[old + i] = v.amps[i] * a1;
    v.amps[i] *= a0;
  }
  v.n += 1;
}

// Inserts a fresh |0> slot at position pos (existing slots >= pos shift up).
inline void insert_slot(StateVector& v, int pos) {
  check_cap(v.n + 1);
  std::vector<cplx> out(v.amps.size() * 2, cplx{});
  size_t low_mask = (size_t{1} << pos) - 1;
  for (size_t i = 0; i < v.amps.size(); ++i) {
    size_t j = (i & low_mask) | ((i & ~low_mask) << 1);
    out[j] = v.amps[i];
  }
  v.amps = std::move(out);
  v.n += 1;
}

inline void remove_slot_zero(StateVector& v, int pos) {
  // The slot must be in state |0> exactly (used after projections).
  std::vector<cplx> out(v.amps.size() / 2, cplx{});
  size_t low_mask = (size_t{1} << pos) - 1;
  for (size_t j = 0; j < out.size(); ++j) {
    size_t i = (j & low_mask) | ((j & ~low_mask) << 1);
    out[j] = v.amps[i];
    size_t hi = i | (size_t{1} << pos);
    if (std::abs(v.amps[hi]) > kAmpTol)
      throw EngineBug("removing a slot with |1> support");
  }
  v.amps = std::move(out);
  v.n -= 1;
}

inline void apply_cnot(StateVector& v, int c, int t) {
  if (c == t) throw ValidationError("cnot control equals target");
  size_t cb = size_t{1} << c, tb = size_t{1} << t;
  for (size_t i = 0; i < v.amps.size(); ++i)
    if ((i & cb) && !(i & tb)) std::swap(v.amps[i], v.amps[i | tb]);
}

inline void apply_x(StateVector& v, int q) {
  size_t qb = size_t{1} << q;
  for (size_t i = 0; i < v.amps.size(); ++i)
    if (!(i & qb)) std::swap(v.amps[i], v.amps[i | qb]);
}

inline void apply_z(StateVector& v, int q) {
  size_t qb = size_t{1} << q;
  for (size_t i = 0; i < v.amps.size(); ++i)
    if (i & qb) v.amps[i] = -v.amps[i];
}

// diag(1, p) on qubit q.
inline void apply_phase(StateVector& v, int q, cplx p) {
  size_t qb = size_t{1} << q;
  for (size_t i = 0; i < v.amps.size(); ++i)
    if (i & qb) v.amps[i] *= p;
}

// Projects qubit q onto the bra (b0, b1) and removes the slot.
// Returns the branch probability (squared norm before renormalizing);
// the state is left unnormalized.
inline double project_out(StateVector& v, int q, cplx b0, cplx b1) {
  std::vector<cplx> out(v.amps.size() / 2, cplx{});
  size_t low_mask = (size_t{1} << q) - 1;
  for (size_t j = 0; j < out.size(); ++j) {
    size_t i = (j & low_mask) | ((j & ~low_mask) << 1);
    out[j] = b0 * v.amps[i] + b1 * v.amps[i | (size_t{1} << q)];
  }
  v.amps = std::move(out);
  v.n -= 1;
  return v.norm2();
}

// Smooth split at q: Z-basis copy onto a new slot at q+1
// (|0> -> |00>, |1> -> |11>).
inline void smooth_split(StateVector& v, int q) {
  insert_slot(v, q + 1);
  size_t qb = size_t{1} << q, nb = size_t{1} << (q + 1);
  for (size_t i = 0; i < v.amps.size(); ++i) {
    if ((i & qb) && !(i & nb)) {
      v.amps[i | nb] = v.amps[i];
      v.amps[i] = cplx{};
    }
  }
}

// Rough split at q: X-basis copy, |b> -> sum_j |b^j, j> / sqrt(2).
inline void rough_split(StateVector& v, int q) {
  insert_slot(v, q + 1);
  size_t qb = size_t{1} << q, nb = size_t{1} << (q + 1);
  double inv = 1.0 / std::sqrt(2.0);
  for (size_t i = 0; i < v.amps.size(); ++i) {
    if (i & nb) continue;
    cplx a = v.amps[i];
    if (a == cplx{}) continue;
    // Source bit b sits at qb; outputs (b, 0) and (b^1, 1).
    v.amps[i] = a * inv;
    v.amps[(i ^ qb) | nb] = a * inv;
  }
}

// Rough merge with outcome eta: K = sum_{ij} eta^i |i^j><ij|, survivor at
// q2's slot, q1 removed. Leaves the state unnormalized; returns norm^2.
inline double rough_merge(StateVector& v, int q1, int q2, int eta) {
  std::vector<cplx> out(v.amps.size() / 2, cplx{});
  size_t b1 = size_t{1} << q1, b2 = size_t{1} << q2;
  size_t low_mask = b1 - 1;
  for (size_t i = 0; i < v.amps.size(); ++i) {
    cplx a = v.amps[i];
    if (a == cplx{}) continue;
    int bi = (i & b1) ? 1 : 0;
    if (eta < 0 && bi) a = -a;
    size_t merged = (i & ~b1 & ~b2) | ((i & b2) ^ (bi ? b2 : 0));
    size_t j = (merged & low_mask) | ((merged >> 1) & ~low_mask);
    out[j] += a;
  }
  v.amps = std::move(out);
  v.n -= 1;
  return v.norm2();
}

// Smooth merge with outcome eta: keeps terms with q1==q2 (eta=+1) or
// q1!=q2 (eta=-1); the survivor keeps q2's bit; q1 removed. Returns norm^2
// of the unnormalized result.
inline double smooth_merge(StateVector& v, int q1, int q2, int eta) {
  std::vector<cplx> out(v.amps.size() / 2, cplx{});
  size_t b1 = size_t{1} << q1, b2 = size_t{1} << q2;
  size_t low_mask = b1 - 1;
  for (size_t i = 0; i < v.amps.size(); ++i) {
    cplx a = v.amps[i];
    if (a == cplx{}) continue;
    int bi = (i & b1) ? 1 : 0;
    int bj = (i & b2) ? 1 : 0;
    bool keep = (eta > 0) ? (bi == bj) : (bi != bj);
    if (!keep) continue;
    size_t base = i & ~b1;
    size_t j = (base & low_mask) | ((base >> 1) & ~low_mask);
    out[j] += a;
  }
  v.amps = std::move(out);
  v.n -= 1;
  return v.norm2();
}

}  // namespace dense

// Correction actions attached to rules and phase-merge descriptors.
enum class Action { TRACK_X, TRACK_Z, APPLY_P };

// Phase-state merge on a standalone state: outcome +1 applies diag(1,p) at
// target; outcome -1 additionally applies X (the displayed merge branch
// beta|0> + p alpha|1>). Returns the required correction sequence.
inline std::vector<Action> phase_merge(StateVector& v, int target, cplx p,
                                       int outcome) {
  if (std::abs(std::abs(p) - 1.0) > kAmpTol)
    throw ValidationError("phase factor must have unit modulus");
  if (outcome >= 0) {
    dense::apply_phase(v, target, p);
    return {};
  }
  dense::apply_x(v, target);
  dense::apply_phase(v, target, p);
  bool is_y = std::abs(p - phase_y()) < kAmpTol;
  if (is_y) return {Action::TRACK_X, Action::TRACK_Z};
  return {Action::TRACK_X, Action::APPLY_P};
}

// Equality up to global phase.
inline bool states_equal_up_to_phase(const StateVector& a,
                                     const StateVector& b,
                                     double tol = kAmpTol) {
  if (a.n != b.n || a.amps.size() != b.amps.size()) return false;
  size_t ref = 0;
  double best = 0;
  for (size_t i = 0; i < a.amps.size(); ++i) {
    if (std::abs(a.amps[i]) > best) {
      best = std::abs(a.amps[i]);
      ref = i;
    }
  }
  if (best < tol) return b.norm2() < tol * tol;
  if (std::abs(b.amps[ref]) < tol) return false;
  cplx phase = b.amps[ref] / a.amps[ref];
  if (std::abs(std::abs(phase) - 1.0) > 1e-6) return false;
  for (size_t i = 0; i < a.amps.size(); ++i)
    if (std::abs(a.amps[i] * phase - b.amps[i]) > tol) return false;
  return true;
}

}  // namespace lsc
