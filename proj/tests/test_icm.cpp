#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "lsc/icm.hpp"

namespace {

using lsc::Action;
using lsc::Circuit;
using lsc::CorrectionRule;

constexpr double kTol = 1e-12;

std::string invert_error_of(const std::string& text) {
  try {
    lsc::invert_icm(lsc::parse_circuit(text));
  } catch (const lsc::ValidationError& e) {
    return e.what();
  }
  return "";
}

TEST(Amplitudes, InitStates) {
  double r = 1.0 / std::sqrt(2.0);
  auto zero = lsc::init_amplitudes(lsc::InitState::ZERO);
  EXPECT_EQ(zero[0], lsc::cplx(1, 0));
  EXPECT_EQ(zero[1], lsc::cplx(0, 0));
  auto y = lsc::init_amplitudes(lsc::InitState::Y);
  EXPECT_NEAR(std::abs(y[1] - r * lsc::phase_y()), 0.0, kTol);
  auto a = lsc::init_amplitudes(lsc::InitState::A);
  EXPECT_NEAR(std::abs(a[0] - lsc::cplx(r, 0)), 0.0, kTol);
  EXPECT_NEAR(std::abs(a[1] - r * lsc::phase_a()), 0.0, kTol);
}

TEST(Amplitudes, MeasureBras) {
  double r = 1.0 / std::sqrt(2.0);
  auto xm = lsc::measure_bra(lsc::MeasBasis::X, -1);
  EXPECT_NEAR(std::abs(xm[1] - lsc::cplx(-r, 0)), 0.0, kTol);
  auto zp = lsc::measure_bra(lsc::MeasBasis::Z, +1);
  EXPECT_EQ(zp[0], lsc::cplx(1, 0));
  EXPECT_EQ(zp[1], lsc::cplx(0, 0));
  auto zm = lsc::measure_bra(lsc::MeasBasis::Z, -1);
  EXPECT_EQ(zm[0], lsc::cplx(0, 0));
  auto am = lsc::measure_bra(lsc::MeasBasis::A, -1);
  EXPECT_NEAR(std::abs(am[1] + r * lsc::phase_a()), 0.0, kTol);
}

TEST(RuleNames, ActionsAndTriggers) {
  EXPECT_EQ(lsc::action_name(Action::TRACK_X), "track_x");
  EXPECT_EQ(lsc::action_name(Action::TRACK_Z), "track_z");
  EXPECT_EQ(lsc::action_name(Action::APPLY_P), "apply_p");
  EXPECT_EQ(lsc::trig_m(0, 1), "M1");
  EXPECT_EQ(lsc::trig_pm(2, 1), "PM3");
  EXPECT_EQ(lsc::trig_pc(2, 0), "PC2");
}

TEST(RealizationRules, PerRotatedMeasurement) {
  Circuit c = lsc::parse_circuit(
      "qubits 3\n"
      "base 1\n"
      "init 1 +\n"
      "init 2 +\n"
      "init 3 +\n"
      "measure 1 Y\n"
      "measure 2 A\n"
      "measure 3 X\n");
  auto rules = lsc::realization_rules(c);
  ASSERT_EQ(rules.size(), 5u);
  EXPECT_EQ(rules[0].triggers, (std::vector<std::string>{"PM1"}));
  EXPECT_EQ(rules[0].action, Action::TRACK_X);
  EXPECT_EQ(rules[1].action, Action::TRACK_Z);
  EXPECT_EQ(rules[1].qubit, 0);
  EXPECT_EQ(rules[2].triggers, (std::vector<std::string>{"PM2"}));
  EXPECT_EQ(rules[4].action, Action::APPLY_P);
  EXPECT_EQ(rules[4].qubit, 1);
}

TEST(InvertIcm, InPlaceShape) {
  Circuit icm = lsc::parse_circuit(
      "qubits 2\n"
      "base 1\n"
      "init 1 Y\n"
      "init 2 0\n"
      "cnot 1 -> 2\n"
      "measure 1 X\n"
      "measure 2 Z\n");
  auto inv = lsc::invert_icm(icm);
  EXPECT_EQ(lsc::serialize_circuit(inv.circuit),
            "qubits 2\n"
            "base 1\n"
            "init 1 +\n"
            "init 2 0\n"
            "cnot 1 -> 2\n"
            "measure 1 Y\n"
            "measure 2 Z\n");
  ASSERT_EQ(inv.rules.size(), 2u);
  EXPECT_EQ(inv.rules[0].triggers, (std::vector<std::string>{"PM1"}));
  EXPECT_EQ(inv.rules[0].action, Action::TRACK_X);
  EXPECT_EQ(inv.rules[1].action, Action::TRACK_Z);
}

TEST(InvertIcm, TeleportShape) {
  Circuit icm = lsc::parse_circuit(
      "qubits 2\n"
      "base 1\n"
      "init 1 A\n"
      "cnot 1 -> 2\n"
      "measure 2 Z\n");
  auto inv = lsc::invert_icm(icm);
  EXPECT_EQ(lsc::serialize_circuit(inv.circuit),
            "qubits 2\n"
            "base 1\n"
            "init 1 0\n"
            "cnot 2 -> 1\n"
            "measure 2 A\n");
  ASSERT_EQ(inv.rules.size(), 4u);
  EXPECT_EQ(inv.rules[0].triggers, (std::vector<std::string>{"PM2"}));
  EXPECT_EQ(inv.rules[2].action, Action::APPLY_P);
  EXPECT_EQ(inv.rules[3].triggers, (std::vector<std::string>{"M2"}));
  EXPECT_EQ(inv.rules[3].action, Action::TRACK_Z);
  EXPECT_EQ(inv.rules[3].qubit, 0);
}

TEST(InvertIcm, ShapeErrors) {
  EXPECT_EQ(invert_error_of("qubits 1\ninit 0 Y\nmeasure 0 Z\n"),
            "rotated qubit 0 must be X-measured to invert in place");
  EXPECT_EQ(invert_error_of(
                "qubits 2\ninit 0 Y\ninit 1 +\ncnot 1 -> 0\nmeasure 0 X\n"),
            "rotated qubit 0 may not be a cnot target");
  EXPECT_EQ(invert_error_of("qubits 1\ninit 0 A\n"),
            "unmeasured rotated qubit 0 must control exactly one cnot");
  EXPECT_EQ(invert_error_of("qubits 3\ninit 0 A\ncnot 0 -> 1\ncnot 0 -> 2\n"
                            "measure 1 Z\nmeasure 2 Z\n"),
            "unmeasured rotated qubit 0 must control exactly one cnot");
  EXPECT_EQ(invert_error_of(
                "qubits 3\ninit 0 A\ncnot 0 -> 1 2\nmeasure 1 Z\nmeasure 2 Z\n"),
            "rotated qubit 0 must control a single-target cnot");
  EXPECT_EQ(invert_error_of("qubits 3\ninit 0 A\ncnot 0 -> 1\ncnot 1 -> 2\n"
                            "measure 1 Z\nmeasure 2 Z\n"),
            "teleport target 1 is reused after the gadget cnot");
  EXPECT_EQ(invert_error_of("qubits 2\ninit 0 A\ncnot 0 -> 1\nmeasure 1 X\n"),
            "teleport target 1 must be Z-measured");
}

TEST(ToInverted, DispatchesOnForm) {
  Circuit already = lsc::parse_circuit(
      "qubits 1\n"
      "init 0 +\n"
      "measure 0 A\n");
  auto inv = lsc::to_inverted(already);
  EXPECT_EQ(lsc::serialize_circuit(inv.circuit),
            lsc::serialize_circuit(already));
  EXPECT_EQ(inv.rules.size(), 3u);

  Circuit rotated = lsc::parse_circuit(
      "qubits 1\n"
      "init 0 Y\n"
      "measure 0 X\n");
  inv = lsc::to_inverted(rotated);
  EXPECT_EQ(inv.circuit.inits[0].state, lsc::InitState::PLUS);
  EXPECT_EQ(inv.circuit.measures[0].basis, lsc::MeasBasis::Y);
}

TEST(GadgetRules, TeleportShapeOnly) {
  Circuit tele = lsc::parse_circuit(
      "qubits 2\n"
      "base 1\n"
      "init 1 A\n"
      "cnot 1 -> 2\n"
      "measure 2 Z\n");
  auto rules = lsc::icm_gadget_rules(tele);
  ASSERT_EQ(rules.size(), 2u);
  EXPECT_EQ(rules[0].triggers, (std::vector<std::string>{"M2"}));
  EXPECT_EQ(rules[0].action, Action::TRACK_X);
  EXPECT_EQ(rules[0].qubit, 0);
  EXPECT_EQ(rules[1].action, Action::APPLY_P);

  Circuit tele_y = lsc::parse_circuit(
      "qubits 2\n"
      "init 0 Y\n"
      "cnot 0 -> 1\n"
      "measure 1 Z\n");
  rules = lsc::icm_gadget_rules(tele_y);
  ASSERT_EQ(rules.size(), 2u);
  EXPECT_EQ(rules[1].action, Action::TRACK_Z);

  Circuit in_place = lsc::parse_circuit(
      "qubits 1\n"
      "init 0 Y\n"
      "measure 0 X\n");
  EXPECT_TRUE(lsc::icm_gadget_rules(in_place).empty());
}

TEST(EnumerateBranches, ProbabilitiesAndPruning) {
  Circuit det = lsc::parse_circuit("qubits 1\ninit 0 0\nmeasure 0 Z\n");
  auto branches = lsc::enumerate_branches(det, {}, {});
  ASSERT_EQ(branches.size(), 1u);
  EXPECT_NEAR(branches[0].prob, 1.0, kTol);
  EXPECT_EQ(branches[0].outcomes,
            (std::vector<std::pair<int, int>>{{0, +1}}));

  Circuit coin = lsc::parse_circuit("qubits 1\ninit 0 +\nmeasure 0 Z\n");
  branches = lsc::enumerate_branches(coin, {}, {});
  ASSERT_EQ(branches.size(), 2u);
  EXPECT_NEAR(branches[0].prob, 0.5, kTol);
  EXPECT_NEAR(branches[1].prob, 0.5, kTol);
}

TEST(EnumerateBranches, RequiresInputs) {
  Circuit c = lsc::parse_circuit("qubits 2\nbase 1\ninit 1 0\nmeasure 1 Z\n");
  EXPECT_THROW(lsc::enumerate_branches(c, {}, {}), lsc::ValidationError);
  std::map<int, std::array<lsc::cplx, 2>> inputs;
  inputs[1] = {lsc::cplx{1, 0}, lsc::cplx{0, 0}};
  EXPECT_EQ(lsc::enumerate_branches(c, {}, inputs).size(), 1u);
}

TEST(EnumerateBranches, RulesCorrectSurvivors) {
  Circuit c = lsc::parse_circuit(
      "qubits 2\n"
      "init 0 +\n"
      "init 1 0\n"
      "measure 0 Z\n");
  std::vector<CorrectionRule> rules{{{"M0"}, Action::TRACK_X, 1}};
  auto branches = lsc::enumerate_branches(c, rules, {});
  ASSERT_EQ(branches.size(), 2u);
  for (const auto& br : branches) {
    ASSERT_EQ(br.state.amps.size(), 2u);
    if (br.outcomes[0].second > 0)
      EXPECT_NEAR(std::abs(br.state.amps[0]), 1.0, kTol);
    else
      EXPECT_NEAR(std::abs(br.state.amps[1]), 1.0, kTol);
  }
}

TEST(EnumerateBranches, RulesFoldIntoMeasuredOutcomes) {
  Circuit c = lsc::parse_circuit(
      "qubits 2\n"
      "init 0 +\n"
      "init 1 +\n"
      "measure 0 Z\n"
      "measure 1 Z\n");
  std::vector<CorrectionRule> rules{{{"M0", "M1"}, Action::TRACK_X, 1}};
  auto branches = lsc::enumerate_branches(c, rules, {});
  ASSERT_EQ(branches.size(), 4u);
  for (const auto& br : branches)
    EXPECT_EQ(br.outcomes[0].second, br.outcomes[1].second);
}

TEST(EnumerateBranches, UnresolvedTriggersAreInert) {
  Circuit c = lsc::parse_circuit("qubits 1\ninit 0 0\nmeasure 0 Z\n");
  std::vector<CorrectionRule> rules{{{"PM9"}, Action::TRACK_X, 0}};
  EXPECT_EQ(lsc::enumerate_branches(c, rules, {}).size(), 1u);
}

TEST(CircuitEquivalence, TeleportGadgetMatchesInvertedForm) {
  Circuit icm = lsc::parse_circuit(
      "qubits 2\n"
      "base 1\n"
      "init 1 A\n"
      "cnot 1 -> 2\n"
      "measure 2 Z\n");
  auto inv = lsc::invert_icm(icm);
  auto res = lsc::check_circuit_equivalence(icm, lsc::icm_gadget_rules(icm),
                                            inv.circuit, inv.rules);
  EXPECT_TRUE(res.ok) << res.detail;
  EXPECT_TRUE(lsc::check_equivalence_small(icm, lsc::icm_gadget_rules(icm),
                                           inv.circuit, inv.rules));
}

TEST(CircuitEquivalence, DroppedRuleIsDetected) {
  Circuit icm = lsc::parse_circuit(
      "qubits 2\n"
      "base 1\n"
      "init 1 A\n"
      "cnot 1 -> 2\n"
      "measure 2 Z\n");
  auto inv = lsc::invert_icm(icm);
  auto broken = inv.rules;
  broken.pop_back();  // drops the M2 frame update on the survivor
  auto res = lsc::check_circuit_equivalence(icm, lsc::icm_gadget_rules(icm),
                                            inv.circuit, broken);
  EXPECT_FALSE(res.ok);
  EXPECT_EQ(res.detail, "branch M2=-1 output state mismatch");
}

TEST(CircuitEquivalence, MismatchedShapesAreRejected) {
  Circuit a = lsc::parse_circuit("qubits 1\ninit 0 0\nmeasure 0 Z\n");
  Circuit b = lsc::parse_circuit("qubits 2\ninit 0 0\nmeasure 0 Z\n");
  auto res = lsc::check_circuit_equivalence(a, {}, b, {});
  EXPECT_FALSE(res.ok);
  EXPECT_EQ(res.detail, "circuits differ in qubit count or input set");
}

TEST(CircuitEquivalence, SmallCheckEnforcesCap) {
  Circuit big = lsc::parse_circuit("qubits 15\ninit 0 0\n");
  EXPECT_THROW(lsc::check_equivalence_small(big, {}, big, {}),
               lsc::ValidationError);
}

}  // namespace
