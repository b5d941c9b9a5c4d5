#pragma once

#include <bit>
#include <cstdint>
#include <string>

#include "lsc/common.hpp"

namespace lsc {

// A signed n-qubit Pauli string, n <= 64. Bit q of `x`/`z` gives the
// X/Z component on qubit q: (0,0)=I, (1,0)=X, (0,1)=Z, (1,1)=Y.
// `sign` is +1 or -1; products with an imaginary residual phase are
// rejected as internal errors.
struct PauliRow {
  uint64_t x = 0;
  uint64_t z = 0;
  int sign = +1;

  static constexpr int kMaxQubits = 64;

  static PauliRow identity() { return {}; }
  static PauliRow pauli_x(int q) { return {uint64_t{1} << q, 0, +1}; }
  static PauliRow pauli_z(int q) { return {0, uint64_t{1} << q, +1}; }
  static PauliRow pauli_y(int q) {
    return {uint64_t{1} << q, uint64_t{1} << q, +1};
  }

  bool is_identity() const { return x == 0 && z == 0; }

  bool commutes_with(const PauliRow& o) const {
    int parity = (std::popcount(x & o.z) + std::popcount(z & o.x)) & 1;
    return parity == 0;
  }

  bool operator==(const PauliRow& o) const = default;

  std::string to_string(int n) const {
    std::string s(sign > 0 ? "+" : "-");
    for (int q = 0; q < n; ++q) {
      int xb = (x >> q) & 1, zb = (z >> q) & 1;
      s += "IXZY"[xb + 2 * zb];
    }
    return s;
  }
};

// Phase exponent of i contributed by one qubit when multiplying
// P1 * P2 (values in {-1, 0, 1}).
inline int phase_g(int x1, int z1, int x2, int z2) {
  if (!x1 && !z1) return 0;
  if (x1 && z1) return z2 - x2;
  if (x1 && !z1) return z2 * (2 * x2 - 1);
  return x2 * (1 - 2 * z2);
}

// Product a*b. The result must be a real-signed Pauli; an odd residual
// i-exponent means the caller multiplied anticommuting rows.
inline PauliRow pauli_mul(const PauliRow& a, const PauliRow& b) {
  int e = 0;
  if (a.sign < 0) e += 2;
  if (b.sign < 0) e += 2;
  uint64_t support = a.x | a.z | b.x | b.z;
  while (support) {
    int q = std::countr_zero(support);
    support &= support - 1;
    e += phase_g((a.x >> q) & 1, (a.z >> q) & 1, (b.x >> q) & 1,
                 (b.z >> q) & 1);
  }
  e = ((e % 4) + 4) % 4;
  if (e & 1) throw EngineBug("pauli product has imaginary phase");
  return {a.x ^ b.x, a.z ^ b.z, e == 0 ? +1 : -1};
}

}  // namespace lsc
