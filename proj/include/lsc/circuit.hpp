#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lsc/common.hpp"

namespace lsc {

enum class InitState { ZERO, PLUS, Y, A };
enum class MeasBasis { X, Z, Y, A };

inline char init_char(InitState s) {
  switch (s) {
    case InitState::ZERO: return '0';
    case InitState::PLUS: return '+';
    case InitState::Y: return 'Y';
    case InitState::A: return 'A';
  }
  throw EngineBug("bad init state");
}

inline char basis_char(MeasBasis b) {
  switch (b) {
    case MeasBasis::X: return 'X';
    case MeasBasis::Z: return 'Z';
    case MeasBasis::Y: return 'Y';
    case MeasBasis::A: return 'A';
  }
  throw EngineBug("bad basis");
}

inline bool rotated_init(InitState s) {
  return s == InitState::Y || s == InitState::A;
}

inline bool rotated_basis(MeasBasis b) {
  return b == MeasBasis::Y || b == MeasBasis::A;
}

struct InitOp {
  int qubit = 0;
  InitState state = InitState::ZERO;
  int line = 0;
};

struct CnotOp {
  int control = 0;
  std::vector<int> targets;
  int line = 0;
};

struct MeasureOp {
  int qubit = 0;
  MeasBasis basis = MeasBasis::Z;
  std::vector<int> conditioned_on;  // earlier measured qubits, metadata only
  int line = 0;
};

// Statement order as written: kind 'i'/'c'/'m' plus index into that list.
struct StmtRef {
  char kind;
  int index;
};

struct Circuit {
  int n_qubits = 0;
  int base = 0;  // display offset for qubit ids in text form
  std::vector<InitOp> inits;
  std::vector<CnotOp> cnots;
  std::vector<MeasureOp> measures;
  std::vector<StmtRef> order;

  std::optional<InitState> init_of(int q) const {
    for (const auto& i : inits)
      if (i.qubit == q) return i.state;
    return std::nullopt;
  }

  const MeasureOp* measure_of(int q) const {
    for (const auto& m : measures)
      if (m.qubit == q) return &m;
    return nullptr;
  }

  // Qubits with no init line act as circuit inputs.
  std::vector<int> input_qubits() const {
    std::vector<bool> has(n_qubits, false);
    for (const auto& i : inits) has[i.qubit] = true;
    std::vector<int> out;
    for (int q = 0; q < n_qubits; ++q)
      if (!has[q]) out.push_back(q);
    return out;
  }

  std::vector<int> output_qubits() const {
    std::vector<bool> measured(n_qubits, false);
    for (const auto& m : measures) measured[m.qubit] = true;
    std::vector<int> out;
    for (int q = 0; q < n_qubits; ++q)
      if (!measured[q]) out.push_back(q);
    return out;
  }
};

enum class Form { ANY, ICM, INVERTED };

namespace detail {

inline std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> toks;
  std::string cur;
  for (char ch : line) {
    if (ch == '#') break;
    if (ch == ',' || std::isspace(static_cast<unsigned char>(ch))) {
      if (!cur.empty()) {
        toks.push_back(cur);
        cur.clear();
      }
      continue;
    }
    cur += ch;
  }
  if (!cur.empty()) toks.push_back(cur);
  return toks;
}

inline int parse_int(const std::string& tok, int line) {
  try {
    size_t pos = 0;
    int v = std::stoi(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError("expected an integer, got '" + tok + "'", line);
  }
}

}  // namespace detail

inline Circuit parse_circuit(const std::string& text) {
  Circuit c;
  bool saw_qubits = false;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  auto to_qubit = [&](const std::string& tok, int line) {
    int v = detail::parse_int(tok, line) - c.base;
    if (v < 0 || v >= c.n_qubits)
      throw ParseError("qubit id out of range: '" + tok + "'", line);
    return v;
  };
  while (std::getline(in, raw)) {
    ++lineno;
    auto toks = detail::tokenize(raw);
    if (toks.empty()) continue;
    const std::string& head = toks[0];
    if (head == "qubits") {
      if (saw_qubits) throw ParseError("duplicate qubits line", lineno);
      if (toks.size() != 2) throw ParseError("usage: qubits <n>", lineno);
      c.n_qubits = detail::parse_int(toks[1], lineno);
      if (c.n_qubits <= 0 || c.n_qubits > 64)
        throw ParseError("qubit count must be in [1, 64]", lineno);
      saw_qubits = true;
      continue;
    }
    if (!saw_qubits)
      throw ParseError("the first statement must be 'qubits <n>'", lineno);
    if (head == "base") {
      if (toks.size() != 2) throw ParseError("usage: base <offset>", lineno);
      if (!c.inits.empty() || !c.cnots.empty() || !c.measures.empty())
        throw ParseError("base must precede all operations", lineno);
      c.base = detail::parse_int(toks[1], lineno);
      continue;
    }
    if (head == "init") {
      if (toks.size() != 3)
        throw ParseError("usage: init <qubit> <0|+|Y|A>", lineno);
      InitOp op;
      op.qubit = to_qubit(toks[1], lineno);
      op.line = lineno;
      if (toks[2] == "0") op.state = InitState::ZERO;
      else if (toks[2] == "+") op.state = InitState::PLUS;
      else if (toks[2] == "Y") op.state = InitState::Y;
      else if (toks[2] == "A") op.state = InitState::A;
      else throw ParseError("unknown init state '" + toks[2] + "'", lineno);
      c.order.push_back({'i', static_cast<int>(c.inits.size())});
      c.inits.push_back(op);
      continue;
    }
    if (head == "cnot") {
      if (toks.size() < 4 || toks[2] != "->")
        throw ParseError("usage: cnot <control> -> <target>...", lineno);
      CnotOp op;
      op.control = to_qubit(toks[1], lineno);
      op.line = lineno;
      for (size_t i = 3; i < toks.size(); ++i)
        op.targets.push_back(to_qubit(toks[i], lineno));
      c.order.push_back({'c', static_cast<int>(c.cnots.size())});
      c.cnots.push_back(op);
      continue;
    }
    if (head == "measure") {
      if (toks.size() < 3)
        throw ParseError("usage: measure <qubit> <X|Z|Y|A> [if q,...]",
                         lineno);
      MeasureOp op;
      op.qubit = to_qubit(toks[1], lineno);
      op.line = lineno;
      if (toks[2] == "X") op.basis = MeasBasis::X;
      else if (toks[2] == "Z") op.basis = MeasBasis::Z;
      else if (toks[2] == "Y") op.basis = MeasBasis::Y;
      else if (toks[2] == "A") op.basis = MeasBasis::A;
      else throw ParseError("unknown basis '" + toks[2] + "'", lineno);
      if (toks.size() > 3) {
        if (toks[3] != "if")
          throw ParseError("expected 'if' before condition list", lineno);
        if (toks.size() == 4)
          throw ParseError("empty condition list after 'if'", lineno);
        for (size_t i = 4; i < toks.size(); ++i)
          op.conditioned_on.push_back(to_qubit(toks[i], lineno));
      }
      c.order.push_back({'m', static_cast<int>(c.measures.size())});
      c.measures.push_back(op);
      continue;
    }
    throw ParseError("unknown statement '" + head + "'", lineno);
  }
  if (!saw_qubits) throw ParseError("empty circuit: missing qubits line", 1);
  return c;
}

// Canonical text form: qubits, base, inits ascending by qubit, cnots in
// original order, measures ascending by qubit.
inline std::string serialize_circuit(const Circuit& c) {
  std::ostringstream out;
  out << "qubits " << c.n_qubits << "\n";
  if (c.base != 0) out << "base " << c.base << "\n";
  auto inits = c.inits;
  std::sort(inits.begin(), inits.end(),
            [](const InitOp& a, const InitOp& b) { return a.qubit < b.qubit; });
  for (const auto& i : inits)
    out << "init " << (i.qubit + c.base) << " " << init_char(i.state) << "\n";
  for (const auto& g : c.cnots) {
    out << "cnot " << (g.control + c.base) << " ->";
    for (int t : g.targets) out << " " << (t + c.base);
    out << "\n";
  }
  auto meas = c.measures;
  std::sort(meas.begin(), meas.end(), [](const MeasureOp& a,
                                         const MeasureOp& b) {
    return a.qubit < b.qubit;
  });
  for (const auto& m : meas) {
    out << "measure " << (m.qubit + c.base) << " " << basis_char(m.basis);
    if (!m.conditioned_on.empty()) {
      out << " if ";
      for (size_t i = 0; i < m.conditioned_on.size(); ++i) {
        if (i) out << ",";
        out << (m.conditioned_on[i] + c.base);
      }
    }
    out << "\n";
  }
  return out.str();
}

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<int> input_qubits;

  bool ok() const { return errors.empty(); }
};

inline ValidationReport validate_circuit(const Circuit& c, Form form) {
  ValidationReport rep;
  auto err = [&](const std::string& msg, int line) {
    rep.errors.push_back("line " + std::to_string(line) + ": " + msg);
  };
  std::vector<int> init_count(c.n_qubits, 0);
  for (const auto& i : c.inits) {
    if (++init_count[i.qubit] > 1)
      err("qubit " + std::to_string(i.qubit + c.base) + " initialized twice",
          i.line);
    if (form == Form::INVERTED && rotated_init(i.state))
      err("rotated init is not allowed in inverted form", i.line);
  }
  std::vector<int> meas_count(c.n_qubits, 0);
  for (const auto& m : c.measures) {
    if (++meas_count[m.qubit] > 1)
      err("qubit " + std::to_string(m.qubit + c.base) + " measured twice",
          m.line);
    if (form == Form::ICM && rotated_basis(m.basis))
      err("rotated-basis measurement is not allowed before inversion",
          m.line);
    for (int dep : m.conditioned_on)
      if (dep == m.qubit)
        err("measurement conditioned on its own qubit", m.line);
  }
  for (const auto& g : c.cnots) {
    std::set<int> seen{g.control};
    for (int t : g.targets)
      if (!seen.insert(t).second)
        err("repeated qubit in cnot statement", g.line);
  }
  if (form != Form::ANY) {
    // Block order: all inits, then all cnots, then all measures.
    int stage = 0;
    for (const auto& s : c.order) {
      int want = s.kind == 'i' ? 0 : s.kind == 'c' ? 1 : 2;
      int line = s.kind == 'i'   ? c.inits[s.index].line
                 : s.kind == 'c' ? c.cnots[s.index].line
                                 : c.measures[s.index].line;
      if (want < stage) err("statement out of init/cnot/measure order", line);
      stage = std::max(stage, want);
    }
    // A measured qubit must not feed later measurement conditions only;
    // cnots already precede measures when the block order holds.
  }
  rep.input_qubits = c.input_qubits();
  return rep;
}

inline void validate_or_throw(const Circuit& c, Form form) {
  auto rep = validate_circuit(c, form);
  if (!rep.ok()) {
    std::string all;
    for (const auto& e : rep.errors) {
      if (!all.empty()) all += "; ";
      all += e;
    }
    throw ValidationError(all);
  }
}

}  // namespace lsc
