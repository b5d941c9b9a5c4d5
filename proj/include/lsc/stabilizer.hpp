#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lsc/common.hpp"
#include "lsc/pauli.hpp"

namespace lsc {

// Signed stabilizer matrix over n logical qubits. Rows are generators of
// the stabilizer group of a pure state, so a fully specified state has
// exactly n pairwise-commuting independent rows.
struct StabilizerMatrix {
  int n = 0;
  std::vector<PauliRow> rows;

  static StabilizerMatrix empty() { return {}; }

  std::string to_grid_string() const {
    std::string out;
    for (const auto& r : rows) {
      out += r.to_string(n);
      out += '\n';
    }
    return out;
  }
};

struct MergeOutcome {
  int eigenvalue = +1;
  bool deterministic = false;
};

// Supplies outcomes for indeterminate measurements: either forced values
// (branch enumeration / verification) or a seeded RNG.
struct OutcomeSource {
  virtual ~OutcomeSource() = default;
  virtual int draw(const std::string& id) = 0;
};

struct RngOutcomeSource : OutcomeSource {
  Rng rng;
  explicit RngOutcomeSource(uint64_t seed = 0) : rng(seed) {}
  int draw(const std::string&) override {
    return (rng() & 1) ? -1 : +1;
  }
};

struct ForcedOutcomeSource : OutcomeSource {
  int value;
  explicit ForcedOutcomeSource(int v = +1) : value(v) {}
  int draw(const std::string&) override { return value; }
};

// Explicit branch assignment by outcome id; unlisted ids take `fallback`.
struct MapOutcomeSource : OutcomeSource {
  std::map<std::string, int> values;
  int fallback = +1;
  explicit MapOutcomeSource(std::map<std::string, int> v, int fb = +1)
      : values(std::move(v)), fallback(fb) {}
  int draw(const std::string& id) override {
    auto it = values.find(id);
    return it == values.end() ? fallback : it->second;
  }
};

namespace detail {

inline void check_qubit(const StabilizerMatrix& s, int q) {
  if (q < 0 || q >= s.n) throw ValidationError("qubit index out of range");
}

// Inserts a fresh (all-identity) column at position pos.
inline void insert_column(StabilizerMatrix& s, int pos) {
  if (s.n + 1 > PauliRow::kMaxQubits)
    throw ValidationError("qubit capacity (64) exceeded");
  uint64_t low = (uint64_t{1} << pos) - 1;
  for (auto& r : s.rows) {
    r.x = (r.x & low) | ((r.x & ~low) << 1);
    r.z = (r.z & low) | ((r.z & ~low) << 1);
  }
  s.n += 1;
}

// Removes column pos; every row must already be identity there.
inline void remove_column(StabilizerMatrix& s, int pos) {
  uint64_t low = (uint64_t{1} << pos) - 1;
  for (auto& r : s.rows) {
    if (((r.x | r.z) >> pos) & 1)
      throw EngineBug("removing a column with support");
    r.x = (r.x & low) | ((r.x >> 1) & ~low);
    r.z = (r.z & low) | ((r.z >> 1) & ~low);
  }
  s.n -= 1;
}

}  // namespace detail

inline void add_zero_qubit(StabilizerMatrix& s) {
  detail::insert_column(s, s.n);
  s.rows.push_back(PauliRow::pauli_z(s.n - 1));
}

inline void add_plus_qubit(StabilizerMatrix& s) {
  detail::insert_column(s, s.n);
  s.rows.push_back(PauliRow::pauli_x(s.n - 1));
}

inline void add_y_qubit(StabilizerMatrix& s) {
  detail::insert_column(s, s.n);
  s.rows.push_back(PauliRow::pauli_y(s.n - 1));
}

inline void apply_cnot(StabilizerMatrix& s, int c, int t) {
  detail::check_qubit(s, c);
  detail::check_qubit(s, t);
  if (c == t) throw ValidationError("cnot control equals target");
  for (auto& r : s.rows) {
    int xc = (r.x >> c) & 1, zt = (r.z >> t) & 1;
    int xt = (r.x >> t) & 1, zc = (r.z >> c) & 1;
    if (xc && zt && (xt ^ zc ^ 1)) r.sign = -r.sign;
    r.x ^= uint64_t(xc) << t;
    r.z ^= uint64_t(zt) << c;
  }
}

inline void apply_x(StabilizerMatrix& s, int q) {
  detail::check_qubit(s, q);
  for (auto& r : s.rows)
    if ((r.z >> q) & 1) r.sign = -r.sign;
}

inline void apply_z(StabilizerMatrix& s, int q) {
  detail::check_qubit(s, q);
  for (auto& r : s.rows)
    if ((r.x >> q) & 1) r.sign = -r.sign;
}

inline void apply_s_gate(StabilizerMatrix& s, int q) {
  detail::check_qubit(s, q);
  for (auto& r : s.rows) {
    int xb = (r.x >> q) & 1, zb = (r.z >> q) & 1;
    if (xb && zb) r.sign = -r.sign;
    r.z ^= uint64_t(xb) << q;
  }
}

inline void apply_h(StabilizerMatrix& s, int q) {
  detail::check_qubit(s, q);
  for (auto& r : s.rows) {
    int xb = (r.x >> q) & 1, zb = (r.z >> q) & 1;
    if (xb && zb) r.sign = -r.sign;
    r.x ^= uint64_t(xb ^ zb) << q;
    r.z ^= uint64_t(xb ^ zb) << q;
  }
}

// Expresses p (up to sign) as a product of rows, if possible.
// Returns the row index set and the sign of the product.
inline std::optional<std::pair<std::vector<int>, int>> span_solve(
    const StabilizerMatrix& s, const PauliRow& p) {
  struct Work {
    PauliRow row;
    std::vector<int> members;
  };
  std::vector<Work> work;
  work.reserve(s.rows.size());
  for (int i = 0; i < (int)s.rows.size(); ++i) work.push_back({s.rows[i], {i}});

  PauliRow acc = p;
  std::vector<int> members;
  // Forward elimination of acc against a row-echelon basis of the rows.
  for (int col = 0; col < 2 * s.n; ++col) {
    int q = col % s.n;
    bool use_x = col < s.n;
    auto bit = [&](const PauliRow& r) {
      return int(((use_x ? r.x : r.z) >> q) & 1);
    };
    int pivot = -1;
    for (int i = 0; i < (int)work.size(); ++i) {
      if (bit(work[i].row)) {
        pivot = i;
        break;
      }
    }
    if (pivot < 0) continue;
    Work pw = work[pivot];
    work.erase(work.begin() + pivot);
    for (auto& w : work) {
      if (bit(w.row)) {
        w.row = pauli_mul(w.row, pw.row);
        for (int m : pw.members) w.members.push_back(m);
      }
    }
    if (bit(acc)) {
      acc = pauli_mul(acc, pw.row);
      for (int m : pw.members) members.push_back(m);
    }
  }
  if (acc.x != 0 || acc.z != 0) return std::nullopt;
  // acc.sign = sign(p * combo): p = combo * acc.sign.
  std::sort(members.begin(), members.end());
  // Members appearing an even number of times cancel over GF(2), but sign
  // bookkeeping above already used true Pauli products, so keep parity only.
  std::vector<int> reduced;
  for (size_t i = 0; i < members.size();) {
    size_t j = i;
    while (j < members.size() && members[j] == members[i]) ++j;
    if ((j - i) & 1) reduced.push_back(members[i]);
    i = j;
  }
  return std::make_pair(reduced, acc.sign);
}

// Measures the Pauli operator p on the state. Deterministic outcomes are
// read from the row span; indeterminate outcomes are drawn from src and
// the tableau is updated in the standard way.
inline MergeOutcome measure_pauli(StabilizerMatrix& s, const PauliRow& p,
                                  OutcomeSource& src,
                                  const std::string& id = "") {
  int anti = -1;
  for (int i = 0; i < (int)s.rows.size(); ++i) {
    if (!s.rows[i].commutes_with(p)) {
      anti = i;
      break;
    }
  }
  if (anti < 0) {
    auto combo = span_solve(s, p);
    if (!combo) throw EngineBug("commuting operator outside row span");
    // p = (product of rows) * sign, so measuring p yields that sign.
    return {combo->second, true};
  }
  int outcome = src.draw(id);
  for (int i = 0; i < (int)s.rows.size(); ++i) {
    if (i != anti && !s.rows[i].commutes_with(p))
      s.rows[i] = pauli_mul(s.rows[i], s.rows[anti]);
  }
  s.rows[anti] = p;
  s.rows[anti].sign = outcome;
  return {outcome, false};
}

namespace detail {

// After `target_row` (= sign*P with support only on q) is in the span,
// rewrites the generating set so one row is exactly sign*P, eliminates
// q-support from all other rows with it, then deletes that row and the
// column q.
inline void eliminate_and_drop(StabilizerMatrix& s, const PauliRow& target) {
  auto combo = span_solve(s, target);
  if (!combo) throw EngineBug("contraction operator not in span");
  auto [members, sign] = *combo;
  if (sign != +1) throw EngineBug("span sign mismatch in contraction");
  if (members.empty()) throw EngineBug("empty contraction combination");
  int keep = members[0];
  PauliRow prod = s.rows[members[0]];
  for (size_t i = 1; i < members.size(); ++i)
    prod = pauli_mul(prod, s.rows[members[i]]);
  if (!(prod == target)) throw EngineBug("contraction product mismatch");
  // Replacing one member row by the full product keeps the group: the
  // other members are retained, so the original row is recoverable.
  s.rows[keep] = prod;
  int q = std::countr_zero(target.x | target.z);
  for (int i = 0; i < (int)s.rows.size(); ++i) {
    if (i == keep) continue;
    if (((s.rows[i].x | s.rows[i].z) >> q) & 1)
      s.rows[i] = pauli_mul(s.rows[i], s.rows[keep]);
  }
  for (int i = 0; i < (int)s.rows.size(); ++i) {
    if (i == keep) continue;
    if (((s.rows[i].x | s.rows[i].z) >> q) & 1)
      throw EngineBug("residual support on contracted qubit");
  }
  s.rows.erase(s.rows.begin() + keep);
  remove_column(s, q);
}

}  // namespace detail

// Smooth split: cuts qubit q along a rough boundary, adding a new qubit at
// q+1. Row rules: Z -> Z I, X -> X X, plus a new Z Z row.
inline void smooth_split(StabilizerMatrix& s, int q) {
  detail::check_qubit(s, q);
  detail::insert_column(s, q + 1);
  for (auto& r : s.rows) {
    if ((r.x >> q) & 1) r.x |= uint64_t{1} << (q + 1);
  }
  PauliRow zz;
  zz.z = (uint64_t{1} << q) | (uint64_t{1} << (q + 1));
  s.rows.push_back(zz);
}

// Rough split: the X<->Z dual. Row rules: X -> X I, Z -> Z Z, new X X row.
inline void rough_split(StabilizerMatrix& s, int q) {
  detail::check_qubit(s, q);
  detail::insert_column(s, q + 1);
  for (auto& r : s.rows) {
    if ((r.z >> q) & 1) r.z |= uint64_t{1} << (q + 1);
  }
  PauliRow xx;
  xx.x = (uint64_t{1} << q) | (uint64_t{1} << (q + 1));
  s.rows.push_back(xx);
}

// Rough merge: joint X(q1)X(q2) measurement followed by contraction onto
// q2 (the survivor holds i XOR j). Returns the measurement outcome.
inline MergeOutcome rough_merge(StabilizerMatrix& s, int q1, int q2,
                                OutcomeSource& src,
                                const std::string& id = "") {
  detail::check_qubit(s, q1);
  detail::check_qubit(s, q2);
  if (q1 == q2) throw ValidationError("merge qubits must differ");
  PauliRow xx = pauli_mul(PauliRow::pauli_x(q1), PauliRow::pauli_x(q2));
  MergeOutcome out = measure_pauli(s, xx, src, id);
  apply_cnot(s, q1, q2);
  PauliRow target = PauliRow::pauli_x(q1);
  target.sign = out.eigenvalue;
  detail::eliminate_and_drop(s, target);
  return out;
}

// Smooth merge: joint Z(q1)Z(q2) measurement, contraction onto q2 (the
// survivor keeps q2's Z-basis value).
inline MergeOutcome smooth_merge(StabilizerMatrix& s, int q1, int q2,
                                 OutcomeSource& src,
                                 const std::string& id = "") {
  detail::check_qubit(s, q1);
  detail::check_qubit(s, q2);
  if (q1 == q2) throw ValidationError("merge qubits must differ");
  PauliRow zz = pauli_mul(PauliRow::pauli_z(q1), PauliRow::pauli_z(q2));
  MergeOutcome out = measure_pauli(s, zz, src, id);
  apply_cnot(s, q2, q1);
  PauliRow target = PauliRow::pauli_z(q1);
  target.sign = out.eigenvalue;
  detail::eliminate_and_drop(s, target);
  return out;
}

// Single-qubit logical measurement in the X or Z basis. If discard is set,
// the measured qubit's column is removed afterwards.
inline MergeOutcome measure_logical(StabilizerMatrix& s, int q, char basis,
                                    OutcomeSource& src,
                                    const std::string& id = "",
                                    bool discard = false) {
  detail::check_qubit(s, q);
  PauliRow p = basis == 'X' ? PauliRow::pauli_x(q) : PauliRow::pauli_z(q);
  MergeOutcome out = measure_pauli(s, p, src, id);
  if (discard) {
    PauliRow target = p;
    target.sign = out.eigenvalue;
    detail::eliminate_and_drop(s, target);
  }
  return out;
}

// Unique reduced row-echelon form: X-pivot pass over qubit columns in
// order, then Z-pivot pass over the X-free remainder; full back
// elimination; rows sorted by pivot. Signs follow true Pauli products.
inline StabilizerMatrix canonical_form(const StabilizerMatrix& s) {
  StabilizerMatrix m = s;
  for (size_t i = 0; i < m.rows.size(); ++i)
    for (size_t j = i + 1; j < m.rows.size(); ++j)
      if (!m.rows[i].commutes_with(m.rows[j]))
        throw EngineBug("anticommuting stabilizer rows");
  std::vector<PauliRow> done;
  std::vector<PauliRow> rest = m.rows;
  auto run_pass = [&](bool use_x) {
    for (int q = 0; q < m.n; ++q) {
      auto bit = [&](const PauliRow& r) {
        return int(((use_x ? r.x : r.z) >> q) & 1);
      };
      int pivot = -1;
      for (int i = 0; i < (int)rest.size(); ++i) {
        if (use_x ? bit(rest[i]) : (bit(rest[i]) && rest[i].x == 0)) {
          pivot = i;
          break;
        }
      }
      if (pivot < 0) continue;
      PauliRow pr = rest[pivot];
      rest.erase(rest.begin() + pivot);
      for (auto& r : rest)
        if (bit(r)) r = pauli_mul(r, pr);
      for (auto& r : done)
        if (bit(r)) r = pauli_mul(r, pr);
      done.push_back(pr);
    }
  };
  run_pass(true);
  run_pass(false);
  for (const auto& r : rest) {
    if (r.is_identity()) {
      if (r.sign < 0) throw EngineBug("minus-identity stabilizer row");
      continue;
    }
    throw EngineBug("canonicalization left an unpivoted row");
  }
  // Sort: X-pivot rows by pivot column, then Z-pivot rows by pivot column.
  std::stable_sort(done.begin(), done.end(),
                   [](const PauliRow& a, const PauliRow& b) {
                     bool ax = a.x != 0, bx = b.x != 0;
                     if (ax != bx) return ax;
                     uint64_t ap = ax ? a.x : a.z;
                     uint64_t bp = bx ? b.x : b.z;
                     return std::countr_zero(ap) < std::countr_zero(bp);
                   });
  m.rows = done;
  return m;
}

inline bool same_state(const StabilizerMatrix& a, const StabilizerMatrix& b) {
  if (a.n != b.n || a.rows.size() != b.rows.size()) return false;
  auto ca = canonical_form(a), cb = canonical_form(b);
  return ca.rows == cb.rows;
}

// Reorders columns so column i becomes old column perm[i].
inline StabilizerMatrix permute_columns(const StabilizerMatrix& s,
                                        const std::vector<int>& perm) {
  if ((int)perm.size() != s.n) throw EngineBug("bad permutation size");
  StabilizerMatrix out;
  out.n = s.n;
  for (const auto& r : s.rows) {
    PauliRow nr;
    nr.sign = r.sign;
    for (int i = 0; i < s.n; ++i) {
      nr.x |= uint64_t((r.x >> perm[i]) & 1) << i;
      nr.z |= uint64_t((r.z >> perm[i]) & 1) << i;
    }
    out.rows.push_back(nr);
  }
  return out;
}

// Swaps X and Z parts of every row (the rough/smooth duality).
inline StabilizerMatrix dualize(const StabilizerMatrix& s) {
  StabilizerMatrix out = s;
  for (auto& r : out.rows) std::swap(r.x, r.z);
  return out;
}

}  // namespace lsc
