#include <gtest/gtest.h>

#include <string>

#include "lsc/circuit.hpp"

namespace {

using lsc::Circuit;
using lsc::Form;

std::string parse_error_of(const std::string& text) {
  try {
    lsc::parse_circuit(text);
  } catch (const lsc::ParseError& e) {
    return e.what();
  }
  return "";
}

TEST(ParseCircuit, FullProgram) {
  Circuit c = lsc::parse_circuit(
      "qubits 3\n"
      "base 1\n"
      "init 1 +   # ancilla\n"
      "init 2 0\n"
      "cnot 1 -> 2, 3\n"
      "measure 1 X\n"
      "measure 2 Z if 1\n");
  EXPECT_EQ(c.n_qubits, 3);
  EXPECT_EQ(c.base, 1);
  ASSERT_EQ(c.inits.size(), 2u);
  EXPECT_EQ(c.inits[0].qubit, 0);
  EXPECT_EQ(c.inits[0].state, lsc::InitState::PLUS);
  ASSERT_EQ(c.cnots.size(), 1u);
  EXPECT_EQ(c.cnots[0].control, 0);
  EXPECT_EQ(c.cnots[0].targets, (std::vector<int>{1, 2}));
  ASSERT_EQ(c.measures.size(), 2u);
  EXPECT_EQ(c.measures[1].basis, lsc::MeasBasis::Z);
  EXPECT_EQ(c.measures[1].conditioned_on, (std::vector<int>{0}));
  ASSERT_EQ(c.order.size(), 5u);
  EXPECT_EQ(c.order[2].kind, 'c');
}

TEST(ParseCircuit, RotatedStatesAndBases) {
  Circuit c = lsc::parse_circuit(
      "qubits 2\n"
      "init 0 Y\n"
      "init 1 A\n"
      "measure 0 Y\n"
      "measure 1 A\n");
  EXPECT_EQ(c.inits[0].state, lsc::InitState::Y);
  EXPECT_EQ(c.inits[1].state, lsc::InitState::A);
  EXPECT_TRUE(lsc::rotated_init(c.inits[1].state));
  EXPECT_TRUE(lsc::rotated_basis(c.measures[0].basis));
  EXPECT_FALSE(lsc::rotated_basis(lsc::MeasBasis::X));
}

TEST(ParseCircuit, ErrorCatalog) {
  EXPECT_EQ(parse_error_of(""), "line 1: empty circuit: missing qubits line");
  EXPECT_EQ(parse_error_of("init 0 +\n"),
            "line 1: the first statement must be 'qubits <n>'");
  EXPECT_EQ(parse_error_of("qubits 1\nqubits 1\n"),
            "line 2: duplicate qubits line");
  EXPECT_EQ(parse_error_of("qubits\n"), "line 1: usage: qubits <n>");
  EXPECT_EQ(parse_error_of("qubits 65\n"),
            "line 1: qubit count must be in [1, 64]");
  EXPECT_EQ(parse_error_of("qubits x\n"),
            "line 1: expected an integer, got 'x'");
  EXPECT_EQ(parse_error_of("qubits 1\ninit 0 +\nbase 1\n"),
            "line 3: base must precede all operations");
  EXPECT_EQ(parse_error_of("qubits 1\ninit 0\n"),
            "line 2: usage: init <qubit> <0|+|Y|A>");
  EXPECT_EQ(parse_error_of("qubits 1\ninit 0 q\n"),
            "line 2: unknown init state 'q'");
  EXPECT_EQ(parse_error_of("qubits 2\ncnot 0 1\n"),
            "line 2: usage: cnot <control> -> <target>...");
  EXPECT_EQ(parse_error_of("qubits 1\nmeasure 0\n"),
            "line 2: usage: measure <qubit> <X|Z|Y|A> [if q,...]");
  EXPECT_EQ(parse_error_of("qubits 1\nmeasure 0 W\n"),
            "line 2: unknown basis 'W'");
  EXPECT_EQ(parse_error_of("qubits 2\nmeasure 0 Z when 1\n"),
            "line 2: expected 'if' before condition list");
  EXPECT_EQ(parse_error_of("qubits 2\nmeasure 0 Z if\n"),
            "line 2: empty condition list after 'if'");
  EXPECT_EQ(parse_error_of("qubits 1\nreset 0\n"),
            "line 2: unknown statement 'reset'");
  EXPECT_EQ(parse_error_of("qubits 2\ninit 2 0\n"),
            "line 2: qubit id out of range: '2'");
  EXPECT_EQ(parse_error_of("qubits 2\nbase 1\ninit 0 0\n"),
            "line 3: qubit id out of range: '0'");
}

TEST(SerializeCircuit, RoundTripAndOrdering) {
  Circuit c = lsc::parse_circuit(
      "qubits 3\n"
      "base 1\n"
      "init 2 0\n"
      "init 1 +\n"
      "cnot 1 -> 3 2\n"
      "measure 2 Z\n"
      "measure 1 X if 2\n");
  std::string text = lsc::serialize_circuit(c);
  EXPECT_EQ(text,
            "qubits 3\n"
            "base 1\n"
            "init 1 +\n"
            "init 2 0\n"
            "cnot 1 -> 3 2\n"
            "measure 1 X if 2\n"
            "measure 2 Z\n");
  EXPECT_EQ(lsc::serialize_circuit(lsc::parse_circuit(text)), text);
}

TEST(CircuitHelpers, InputsOutputsAndLookups) {
  Circuit c = lsc::parse_circuit(
      "qubits 3\n"
      "init 0 +\n"
      "cnot 0 -> 1\n"
      "measure 0 X\n");
  EXPECT_EQ(c.input_qubits(), (std::vector<int>{1, 2}));
  EXPECT_EQ(c.output_qubits(), (std::vector<int>{1, 2}));
  ASSERT_TRUE(c.init_of(0).has_value());
  EXPECT_EQ(*c.init_of(0), lsc::InitState::PLUS);
  EXPECT_FALSE(c.init_of(1).has_value());
  ASSERT_NE(c.measure_of(0), nullptr);
  EXPECT_EQ(c.measure_of(0)->basis, lsc::MeasBasis::X);
  EXPECT_EQ(c.measure_of(2), nullptr);
}

TEST(ValidateCircuit, FormRules) {
  Circuit icm = lsc::parse_circuit(
      "qubits 2\n"
      "init 0 A\n"
      "cnot 0 -> 1\n"
      "measure 0 X\n");
  EXPECT_TRUE(lsc::validate_circuit(icm, Form::ICM).ok());

  Circuit rotated_meas = lsc::parse_circuit(
      "qubits 1\n"
      "init 0 0\n"
      "measure 0 A\n");
  auto rep = lsc::validate_circuit(rotated_meas, Form::ICM);
  ASSERT_EQ(rep.errors.size(), 1u);
  EXPECT_EQ(rep.errors[0],
            "line 3: rotated-basis measurement is not allowed before "
            "inversion");
  EXPECT_TRUE(lsc::validate_circuit(rotated_meas, Form::INVERTED).ok());

  Circuit rotated_init = lsc::parse_circuit(
      "qubits 1\n"
      "init 0 Y\n"
      "measure 0 Z\n");
  rep = lsc::validate_circuit(rotated_init, Form::INVERTED);
  ASSERT_EQ(rep.errors.size(), 1u);
  EXPECT_EQ(rep.errors[0], "line 2: rotated init is not allowed in inverted form");
  EXPECT_TRUE(lsc::validate_circuit(rotated_init, Form::ICM).ok());
}

TEST(ValidateCircuit, StructuralErrors) {
  Circuit c = lsc::parse_circuit(
      "qubits 2\n"
      "base 1\n"
      "init 1 0\n"
      "init 1 +\n"
      "measure 2 Z\n"
      "measure 2 Z\n");
  auto rep = lsc::validate_circuit(c, Form::ANY);
  ASSERT_EQ(rep.errors.size(), 2u);
  EXPECT_EQ(rep.errors[0], "line 4: qubit 1 initialized twice");
  EXPECT_EQ(rep.errors[1], "line 6: qubit 2 measured twice");

  Circuit dup = lsc::parse_circuit("qubits 2\ncnot 0 -> 1 1\n");
  rep = lsc::validate_circuit(dup, Form::ANY);
  ASSERT_EQ(rep.errors.size(), 1u);
  EXPECT_EQ(rep.errors[0], "line 2: repeated qubit in cnot statement");

  Circuit self = lsc::parse_circuit("qubits 2\ncnot 0 -> 0\n");
  EXPECT_FALSE(lsc::validate_circuit(self, Form::ANY).ok());

  Circuit cond = lsc::parse_circuit("qubits 1\nmeasure 0 Z if 0\n");
  rep = lsc::validate_circuit(cond, Form::ANY);
  ASSERT_EQ(rep.errors.size(), 1u);
  EXPECT_EQ(rep.errors[0], "line 2: measurement conditioned on its own qubit");
}

TEST(ValidateCircuit, BlockOrderEnforcedOutsideAnyForm) {
  Circuit c = lsc::parse_circuit(
      "qubits 2\n"
      "init 0 +\n"
      "measure 0 X\n"
      "cnot 1 -> 0\n");
  EXPECT_TRUE(lsc::validate_circuit(c, Form::ANY).ok());
  auto rep = lsc::validate_circuit(c, Form::ICM);
  ASSERT_EQ(rep.errors.size(), 1u);
  EXPECT_EQ(rep.errors[0], "line 4: statement out of init/cnot/measure order");
}

TEST(ValidateCircuit, ThrowJoinsMessages) {
  Circuit c = lsc::parse_circuit(
      "qubits 1\n"
      "init 0 0\n"
      "init 0 0\n"
      "measure 0 Z\n"
      "measure 0 Z\n");
  try {
    lsc::validate_or_throw(c, Form::ANY);
    FAIL() << "expected ValidationError";
  } catch (const lsc::ValidationError& e) {
    EXPECT_EQ(std::string(e.what()),
              "line 3: qubit 0 initialized twice; "
              "line 5: qubit 0 measured twice");
  }
  EXPECT_NO_THROW(lsc::validate_or_throw(
      lsc::parse_circuit("qubits 1\ninit 0 0\nmeasure 0 Z\n"), Form::ICM));
}

TEST(ValidateCircuit, ReportsInputQubits) {
  Circuit c = lsc::parse_circuit("qubits 3\ninit 1 0\n");
  auto rep = lsc::validate_circuit(c, Form::ANY);
  EXPECT_EQ(rep.input_qubits, (std::vector<int>{0, 2}));
}

}  // namespace
