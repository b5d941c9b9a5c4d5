#include <gtest/gtest.h>

#include <string>

#include "lsc/layout.hpp"

namespace {

using lsc::Cell;
using lsc::Circuit;
using lsc::OpKind;
using lsc::Placement;

Circuit prog(const std::string& text) { return lsc::parse_circuit(text); }

std::string place_error_of(const std::string& text) {
  try {
    lsc::parse_placement(text);
  } catch (const lsc::ParseError& e) {
    return e.what();
  }
  return "";
}

std::string emit_error_of(const Circuit& c,
                          const std::vector<lsc::CorrectionRule>& rules,
                          const std::string& placement) {
  try {
    lsc::emit_schedule(c, rules, lsc::parse_placement(placement));
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

const char* kParity =
    "qubits 3\n"
    "base 1\n"
    "init 1 +\n"
    "init 2 +\n"
    "init 3 0\n"
    "cnot 1 -> 3\n"
    "cnot 2 -> 3\n";

const char* kParityMeasured =
    "qubits 3\n"
    "base 1\n"
    "init 1 +\n"
    "init 2 +\n"
    "init 3 0\n"
    "cnot 1 -> 3\n"
    "cnot 2 -> 3\n"
    "measure 1 X\n"
    "measure 2 X\n"
    "measure 3 Z\n";

TEST(ParsePlacement, GridPhasesAndFreeCells) {
  Placement p = lsc::parse_placement(
      "grid 2 3\n"
      "phase init   # leading wave\n"
      "at 0 0 1\n"
      "at 0 1 free\n"
      "at 1 2 0\n");
  EXPECT_EQ(p.rows, 2);
  EXPECT_EQ(p.cols, 3);
  ASSERT_EQ(p.phases.size(), 1u);
  EXPECT_EQ(p.phases[0].name, "init");
  EXPECT_EQ(p.phases[0].cells.size(), 2u);
  EXPECT_EQ(p.phases[0].cells.at({1, 2}), "0");
}

TEST(ParsePlacement, ErrorCatalog) {
  EXPECT_EQ(place_error_of(""), "line 1: empty placement: missing grid line");
  EXPECT_EQ(place_error_of("grid 2 2\n"), "line 1: placement has no phases");
  EXPECT_EQ(place_error_of("phase a\n"),
            "line 1: the first statement must be 'grid'");
  EXPECT_EQ(place_error_of("grid 2 2\ngrid 2 2\n"),
            "line 2: duplicate grid line");
  EXPECT_EQ(place_error_of("grid 2\n"), "line 1: usage: grid <rows> <cols>");
  EXPECT_EQ(place_error_of("grid 0 2\n"),
            "line 1: grid dimensions must be positive");
  EXPECT_EQ(place_error_of("grid 2 2\nphase\n"), "line 2: usage: phase <name>");
  EXPECT_EQ(place_error_of("grid 2 2\nphase a\nat 0 0\n"),
            "line 3: usage: at <row> <col> <label>");
  EXPECT_EQ(place_error_of("grid 2 2\nat 0 0 1\n"),
            "line 2: cell listing before any phase");
  EXPECT_EQ(place_error_of("grid 2 2\nphase a\nat 2 0 1\n"),
            "line 3: cell outside the grid");
  EXPECT_EQ(place_error_of("grid 2 2\nphase a\nat 0 0 1\nat 0 0 2\n"),
            "line 4: cell listed twice in one phase");
  EXPECT_EQ(place_error_of("grid 2 2\nphase a\nmove 0 0\n"),
            "line 3: unknown statement 'move'");
}

TEST(ParseLabel, KindsAndSuffixes) {
  auto ref = lsc::detail::parse_label("5", 1, 8);
  EXPECT_EQ(ref.kind, 'q');
  EXPECT_EQ(ref.qubit, 4);
  EXPECT_EQ(ref.piece, 0);
  ref = lsc::detail::parse_label("5.2", 1, 8);
  EXPECT_EQ(ref.piece, 2);
  ref = lsc::detail::parse_label("Y3", 1, 8);
  EXPECT_EQ(ref.kind, 'Y');
  EXPECT_EQ(ref.qubit, 2);
  ref = lsc::detail::parse_label("A8", 1, 8);
  EXPECT_EQ(ref.kind, 'A');
  EXPECT_EQ(ref.qubit, 7);
  EXPECT_EQ(lsc::detail::parse_label("0", 1, 8).kind, '0');

  EXPECT_THROW(lsc::detail::parse_label("棋", 1, 8), lsc::PlacementError);
  EXPECT_THROW(lsc::detail::parse_label("9", 1, 8), lsc::PlacementError);
  EXPECT_THROW(lsc::detail::parse_label("3.", 1, 8), lsc::PlacementError);
  EXPECT_THROW(lsc::detail::parse_label("3.0", 1, 8), lsc::PlacementError);
}

TEST(NaiveLayout, StripsPiecesAndChainMerge) {
  Placement p = lsc::naive_layout(prog(kParity));
  EXPECT_EQ(p.rows, 3);
  EXPECT_EQ(p.cols, 2);
  ASSERT_EQ(p.phases.size(), 3u);
  EXPECT_EQ(p.phases[0].name, "init");
  EXPECT_EQ(p.phases[1].name, "split");
  EXPECT_EQ(p.phases[2].name, "merge");
  EXPECT_EQ(p.phases[0].cells.at({0, 0}), "1");
  EXPECT_EQ(p.phases[0].cells.at({2, 0}), "1");
  EXPECT_EQ(p.phases[0].cells.at({1, 1}), "2");
  EXPECT_EQ(p.phases[0].cells.count({0, 1}), 0u);
  EXPECT_EQ(p.phases[1].cells.at({1, 0}), "1");
  EXPECT_EQ(p.phases[1].cells.at({2, 0}), "3");
  EXPECT_EQ(p.phases[1].cells.at({2, 1}), "3");
  EXPECT_EQ(p.phases[2].cells.at({2, 0}), "3");
  EXPECT_EQ(p.phases[2].cells.at({2, 1}), "3");
}

TEST(NaiveLayout, UncoveredQubitGetsExtraColumn) {
  Placement p = lsc::naive_layout(prog(
      "qubits 3\nbase 1\ninit 1 +\ninit 2 0\ninit 3 0\ncnot 1 -> 3\n"));
  EXPECT_EQ(p.cols, 2);
  EXPECT_EQ(p.phases[0].cells.at({1, 1}), "2");
}

TEST(NaiveLayout, NoFansMeansInitOnly) {
  Placement p = lsc::naive_layout(prog(
      "qubits 2\nbase 1\ninit 1 +\ninit 2 0\n"));
  ASSERT_EQ(p.phases.size(), 1u);
  EXPECT_EQ(p.phases[0].cells.at({0, 0}), "1");
  EXPECT_EQ(p.phases[0].cells.at({1, 0}), "2");
}

TEST(NaiveLayout, BlockedRowInsertsShrinkWave) {
  Circuit c = prog(
      "qubits 5\n"
      "base 1\n"
      "init 1 +\n"
      "init 2 +\n"
      "init 3 0\n"
      "init 4 0\n"
      "init 5 +\n"
      "cnot 1 -> 3\n"
      "cnot 2 -> 4\n"
      "cnot 5 -> 3\n");
  Placement p = lsc::naive_layout(c);
  ASSERT_EQ(p.phases.size(), 4u);
  EXPECT_EQ(p.phases[2].name, "shrink");
  EXPECT_EQ(p.phases[3].name, "merge");
  EXPECT_EQ(p.phases[2].cells.at({2, 0}), "3.1");
  EXPECT_EQ(p.phases[2].cells.at({2, 2}), "3.2");
  EXPECT_EQ(p.phases[3].cells.at({2, 1}), "3");
  auto s = lsc::emit_schedule(c, {}, p);
  EXPECT_NO_THROW(lsc::validate_schedule(s));
}

TEST(EmitSchedule, ProgramPrechecks) {
  EXPECT_EQ(emit_error_of(prog("qubits 2\nbase 1\ninit 1 +\n"), {}, "grid 1 1\nphase init\n"),
            "scheduling requires a fully initialized circuit");
  EXPECT_EQ(emit_error_of(prog("qubits 1\ninit 0 +\n"), {}, "grid 1 1\nphase init\n"),
            "scheduling requires base >= 1 so qubit labels stay distinct from "
            "the mediator label 0");
  EXPECT_EQ(emit_error_of(prog("qubits 3\nbase 1\ninit 1 +\ninit 2 0\ninit 3 0\n"
                               "cnot 1 -> 2\ncnot 1 -> 3\n"),
                          {}, "grid 3 2\nphase init\n"),
            "control 1 has more than one fan");
  EXPECT_EQ(emit_error_of(prog("qubits 2\nbase 1\ninit 1 0\ninit 2 0\n"
                               "cnot 1 -> 2\n"),
                          {}, "grid 2 1\nphase init\n"),
            "fan control 1 must be |+> initialized");
  EXPECT_EQ(emit_error_of(prog("qubits 2\nbase 1\ninit 1 +\ninit 2 +\n"
                               "cnot 1 -> 2\n"),
                          {}, "grid 2 1\nphase init\n"),
            "fan target 2 must be |0> initialized");
  EXPECT_EQ(emit_error_of(prog(kParity), {}, "grid 3 2\nphase start\n"),
            "the first phase must be 'init'");
  EXPECT_EQ(emit_error_of(prog(kParity), {},
                          "grid 3 2\nphase init\nat 0 0 1\n"),
            "a program with fans needs a 'split' second phase");
}

TEST(EmitSchedule, InitPhaseErrors) {
  EXPECT_EQ(emit_error_of(prog(kParity), {},
                          "grid 3 2\nphase init\nat 0 0 Y1\nphase split\n"),
            "injection labels are not allowed in 'init'");
  EXPECT_EQ(emit_error_of(prog(kParity), {},
                          "grid 3 2\nphase init\nat 0 0 1.1\nphase split\n"),
            "piece labels are not allowed in 'init'");
  EXPECT_EQ(emit_error_of(prog(kParity), {},
                          "grid 3 2\nphase init\nat 0 0 1\nat 2 0 1\n"
                          "phase split\n"),
            "qubit 1 must start as one connected patch");
  EXPECT_EQ(emit_error_of(prog(kParity), {},
                          "grid 3 2\nphase init\nat 0 1 3\nphase split\n"),
            "fan target 3 emerges from a strip; do not place it");
  EXPECT_EQ(emit_error_of(prog(kParity), {},
                          "grid 3 2\nphase init\n"
                          "at 0 0 1\nat 1 0 1\nat 2 0 1\nphase split\n"),
            "qubit 2 is missing from 'init'");
  EXPECT_EQ(emit_error_of(prog(kParity), {},
                          "grid 3 2\nphase init\n"
                          "at 0 0 1\nat 1 1 2\nat 2 1 2\nphase split\n"),
            "strip of control 1 is too small for its pieces");
}

const char* kParityInit =
    "grid 3 2\n"
    "phase init\n"
    "at 0 0 1\nat 1 0 1\nat 2 0 1\n"
    "at 1 1 2\nat 2 1 2\n";

TEST(EmitSchedule, SplitPhaseErrors) {
  auto with_split = [&](const std::string& split) {
    return emit_error_of(prog(kParity), {},
                         std::string(kParityInit) + "phase split\n" + split);
  };
  EXPECT_EQ(with_split("at 0 0 0\n"), "'split' accepts qubit labels only");
  EXPECT_EQ(with_split("at 0 1 1\n"), "'split' lists a cell outside any strip");
  EXPECT_EQ(with_split("at 0 0 2\nat 1 0 1\nat 2 0 3\n"
                       "at 1 1 2\nat 2 1 3\n"),
            "qubit 2 is not a member of strip s1");
  EXPECT_EQ(with_split("at 0 0 1\nat 1 0 3\nat 2 0 1\n"
                       "at 1 1 2\nat 2 1 3\n"),
            "piece of qubit 1 must be connected");
  EXPECT_EQ(with_split("at 0 0 1\nat 1 0 1\nat 2 0 1\n"
                       "at 1 1 2\nat 2 1 3\n"),
            "strip s1 must split into one piece per member");
  EXPECT_EQ(with_split("at 0 0 1\nat 2 0 3\n"
                       "at 1 1 2\nat 2 1 3\n"),
            "split pieces must cover strip s1");
  EXPECT_EQ(with_split("at 0 0 1\nat 1 0 1\nat 2 0 3\n"),
            "strip s2 is missing from 'split'");
}

const char* kParitySplit =
    "phase split\n"
    "at 0 0 1\nat 1 0 1\nat 2 0 3\n"
    "at 1 1 2\nat 2 1 3\n";

TEST(EmitSchedule, ListingPhaseErrors) {
  auto with_phase = [&](const std::string& listing) {
    return emit_error_of(prog(kParity), {},
                         std::string(kParityInit) + kParitySplit +
                             "phase mid\n" + listing);
  };
  EXPECT_EQ(with_phase("at 0 0 1\nat 2 0 1\nat 1 1 2\nat 2 1 3\n"),
            "phase mid lists qubit 1 as a disconnected extent");
  EXPECT_EQ(with_phase("at 2 1 1.1\nat 0 1 1.2\n"
                       "at 1 1 2\nat 2 0 3\n"),
            "phase mid drops patch p1.1 of qubit 1");
  EXPECT_EQ(with_phase("at 0 0 1.1\nat 1 0 1.2\n"
                       "at 1 1 2\nat 2 0 3\nat 2 1 3\n"),
            "phase mid splits patch p1.1 across extents of qubit 1");
  EXPECT_EQ(with_phase("at 0 0 1.1\nat 0 1 1.2\n"
                       "at 1 0 1.1\nat 1 1 2\nat 2 0 3\nat 2 1 3\n"),
            "phase mid lists an extent of qubit 1 holding no patch");
  EXPECT_EQ(with_phase("at 0 0 1\nat 1 0 1\nat 2 0 3\nat 2 1 3\n"),
            "phase mid omits qubit 2");
}

TEST(EmitSchedule, TransformErrors) {
  Circuit single = prog("qubits 1\nbase 1\ninit 1 +\n");
  auto move_err = [&](const std::string& second) {
    return emit_error_of(single, {},
                         "grid 3 3\nphase init\nat 0 0 1\nphase next\n" +
                             second);
  };
  EXPECT_EQ(move_err("at 0 2 1\n"), "patch of qubit 1 moves more than one cell");
  EXPECT_EQ(move_err("at 1 0 1\nat 1 1 1\n"),
            "unsupported patch transform for qubit 1 in phase next");

  Circuit pair = prog("qubits 2\nbase 1\ninit 1 +\ninit 2 0\n");
  EXPECT_EQ(emit_error_of(pair, {},
                          "grid 3 3\nphase init\nat 0 0 1\nat 0 1 1\n"),
            "qubit 1 must start as one connected patch");
  EXPECT_EQ(emit_error_of(pair, {},
                          "grid 3 3\nphase init\nat 0 0 1\nat 2 2 2\n"
                          "phase next\nat 1 0 1\nat 1 1 1\nat 2 2 2\n"),
            "patch of qubit 1 changes shape while moving");
}

TEST(EmitSchedule, InjectionErrors) {
  Circuit y_meas = prog("qubits 1\nbase 1\ninit 1 +\nmeasure 1 Y\n");
  EXPECT_EQ(emit_error_of(y_meas, {},
                          "grid 2 2\nphase init\nat 0 0 1\n"
                          "phase next\nat 0 0 1\nat 1 0 A1\n"),
            "injection for qubit 1 does not match its measurement basis");

  Circuit a_meas = prog("qubits 1\nbase 1\ninit 1 +\nmeasure 1 A\n");
  EXPECT_EQ(emit_error_of(a_meas, {},
                          "grid 2 2\nphase init\nat 0 0 1\n"
                          "phase two\nat 0 0 1\nat 1 0 A1\n"
                          "phase three\nat 0 0 1\nat 1 1 A1\n"),
            "qubit 1 is injected twice");

  Circuit two_a = prog(
      "qubits 2\nbase 1\ninit 1 +\ninit 2 +\nmeasure 1 A\nmeasure 2 A\n");
  EXPECT_EQ(emit_error_of(two_a, {},
                          "grid 2 2\nphase init\nat 0 0 1\nat 0 1 2\n"
                          "phase two\nat 0 0 1\nat 0 1 2\nat 1 0 A1\n"
                          "phase three\nat 0 0 1\nat 0 1 2\nat 1 0 A2\n"),
            "injection cell for qubit 2 is occupied");

  EXPECT_EQ(emit_error_of(a_meas, {},
                          "grid 3 3\nphase init\nat 0 0 1\n"
                          "phase two\nat 0 0 1\nat 2 2 A1\n"),
            "ancilla of qubit 1 is not adjacent to its patch");

  EXPECT_EQ(emit_error_of(a_meas, {}, "grid 1 1\nphase init\nat 0 0 1\n"),
            "no free cell adjacent to patch q1 for ancilla injection");

  Circuit two_y = prog(
      "qubits 2\nbase 1\ninit 1 +\ninit 2 +\nmeasure 1 Y\nmeasure 2 Y\n");
  EXPECT_EQ(emit_error_of(two_y, {},
                          "grid 1 3\nphase init\nat 0 0 1\nat 0 2 2\n"),
            "ancilla injections cannot all be placed");
}

TEST(EmitSchedule, MediatorErrors) {
  Circuit single = prog("qubits 1\nbase 1\ninit 1 +\n");
  EXPECT_EQ(emit_error_of(single, {},
                          "grid 3 3\nphase init\nat 0 0 1\nat 2 2 0\n"),
            "mediator z1 is never absorbed");
  EXPECT_EQ(emit_error_of(single, {},
                          "grid 3 3\nphase init\nat 0 0 1\nat 2 2 0\n"
                          "phase mid\nat 0 0 1\nat 0 1 0\n"),
            "phase mid relocates a zero mediator");
}

TEST(EmitSchedule, ParityScheduleStructure) {
  Circuit c = prog(kParityMeasured);
  auto inv = lsc::to_inverted(c);
  auto s = lsc::emit_schedule(inv.circuit, inv.rules, lsc::naive_layout(c));
  EXPECT_NO_THROW(lsc::validate_schedule(s));
  ASSERT_EQ(s.steps.size(), 4u);
  EXPECT_EQ(s.steps[0].size(), 2u);  // two strips
  EXPECT_EQ(s.steps[0][0].kind, OpKind::INIT);
  EXPECT_EQ(s.steps[1][0].kind, OpKind::SPLIT);
  ASSERT_EQ(s.steps[2].size(), 1u);
  const auto& merge = s.steps[2][0];
  EXPECT_EQ(merge.kind, OpKind::MERGE);
  EXPECT_EQ(merge.patches, (std::vector<std::string>{"p1.3", "p2.3"}));
  EXPECT_EQ(merge.patch, "q3");
  EXPECT_EQ(merge.ids, (std::vector<std::string>{"R1"}));
  ASSERT_EQ(s.steps[3].size(), 3u);
  EXPECT_EQ(s.steps[3][0].id, "M1");
  EXPECT_EQ(s.steps[3][2].basis, 'Z');
  ASSERT_EQ(s.corrections.size(), 1u);
  EXPECT_EQ(s.corrections[0].triggers, (std::vector<std::string>{"R1"}));
  EXPECT_EQ(s.corrections[0].action, lsc::Action::TRACK_Z);
  EXPECT_EQ(s.corrections[0].qubit, 1);
  EXPECT_EQ(s.qubit_map.at(0), "p1.1");
  EXPECT_EQ(s.qubit_map.at(2), "q3");
}

TEST(EmitSchedule, MediatorAbsorptionJoinsMerge) {
  Circuit c = prog(kParity);
  std::string placement =
      "grid 3 3\n"
      "phase init\n"
      "at 0 0 1\nat 1 0 1\nat 2 0 1\n"
      "at 1 2 2\nat 2 2 2\n"
      "at 2 1 0\n"
      "phase split\n"
      "at 0 0 1\nat 1 0 1\nat 2 0 3\n"
      "at 1 2 2\nat 2 2 3\n"
      "phase join\n"
      "at 0 0 1\nat 1 0 1\nat 1 2 2\n"
      "at 2 0 3\nat 2 1 3\nat 2 2 3\n";
  auto s = lsc::emit_schedule(c, {}, lsc::parse_placement(placement));
  EXPECT_NO_THROW(lsc::validate_schedule(s));
  ASSERT_EQ(s.steps[2].size(), 1u);
  const auto& merge = s.steps[2][0];
  EXPECT_EQ(merge.patches, (std::vector<std::string>{"p1.3", "z1", "p2.3"}));
  EXPECT_EQ(merge.ids, (std::vector<std::string>{"R1", "R2"}));
  EXPECT_TRUE(merge.path.empty());
  ASSERT_EQ(s.corrections.size(), 1u);
  EXPECT_EQ(s.corrections[0].triggers, (std::vector<std::string>{"R2"}));
}

TEST(EmitSchedule, MergePathCannotCrossAncilla) {
  Circuit c = prog(
      "qubits 3\nbase 1\ninit 1 +\ninit 2 +\ninit 3 0\n"
      "cnot 1 -> 3\ncnot 2 -> 3\nmeasure 1 A\n");
  std::string placement =
      "grid 3 3\n"
      "phase init\n"
      "at 0 0 1\nat 1 0 1\nat 2 0 1\n"
      "at 1 2 2\nat 2 2 2\n"
      "phase split\n"
      "at 0 0 1\nat 1 0 1\nat 2 0 3\n"
      "at 1 2 2\nat 2 2 3\n"
      "phase inj\n"
      "at 0 0 1\nat 1 0 1\nat 1 2 2\n"
      "at 2 0 3.1\nat 2 2 3.2\n"
      "at 2 1 A1\n"
      "phase join\n"
      "at 0 0 1\nat 1 0 1\nat 1 2 2\n"
      "at 2 0 3\nat 2 1 3\nat 2 2 3\n";
  EXPECT_EQ(emit_error_of(c, {}, placement),
            "merge path of qubit 3 crosses an occupied cell");
}

TEST(EmitSchedule, RotatedMeasurementPipeline) {
  Circuit c = prog(
      "qubits 2\nbase 1\ninit 1 +\ninit 2 0\ncnot 1 -> 2\n"
      "measure 1 A\nmeasure 2 Z\n");
  auto inv = lsc::to_inverted(c);
  auto s = lsc::emit_schedule(inv.circuit, inv.rules,
                              lsc::parse_placement(
                                  "grid 2 2\n"
                                  "phase init\nat 0 0 1\nat 1 0 1\n"
                                  "phase split\nat 0 0 1\nat 1 0 2\n"));
  EXPECT_NO_THROW(lsc::validate_schedule(s));
  ASSERT_EQ(s.steps.size(), 7u);
  EXPECT_EQ(s.steps[2][0].kind, OpKind::INJECT);  // auto-placed ancilla
  EXPECT_EQ(s.steps[2][0].patch, "a1");
  EXPECT_EQ(s.steps[3][0].kind, OpKind::MERGE);
  EXPECT_EQ(s.steps[3][0].ids, (std::vector<std::string>{"PM1"}));
  EXPECT_EQ(s.steps[4][0].patch, "y1");  // conditional corrective ancilla
  EXPECT_EQ(s.steps[4][0].condition.triggers, (std::vector<std::string>{"PM1"}));
  EXPECT_EQ(s.steps[5][0].ids, (std::vector<std::string>{"PC1"}));
  ASSERT_EQ(s.corrections.size(), 5u);
  EXPECT_EQ(s.corrections[0].triggers, (std::vector<std::string>{"PM1"}));
  EXPECT_EQ(s.corrections[3].triggers, (std::vector<std::string>{"PC1"}));
  EXPECT_EQ(s.qubit_map.at(0), "p1.1");
  EXPECT_EQ(s.qubit_map.at(1), "p1.2");
}

TEST(EmitSchedule, InjectionScansLeftFirst) {
  Circuit c = prog("qubits 1\nbase 1\ninit 1 +\nmeasure 1 Y\n");
  auto inv = lsc::to_inverted(c);
  auto s = lsc::emit_schedule(inv.circuit, inv.rules,
                              lsc::parse_placement(
                                  "grid 3 3\nphase init\nat 1 1 1\n"));
  ASSERT_EQ(s.steps.size(), 4u);
  EXPECT_EQ(s.steps[1][0].cells, (std::vector<Cell>{{1, 0}}));
}

TEST(EmitSchedule, InjectionPlacementBacktracks) {
  Circuit c = prog(
      "qubits 2\nbase 1\ninit 1 +\ninit 2 +\nmeasure 1 Y\nmeasure 2 Y\n");
  auto inv = lsc::to_inverted(c);
  auto s = lsc::emit_schedule(inv.circuit, inv.rules,
                              lsc::parse_placement(
                                  "grid 1 4\nphase init\n"
                                  "at 0 2 1\nat 0 0 2\n"));
  EXPECT_NO_THROW(lsc::validate_schedule(s));
  ASSERT_EQ(s.steps[1].size(), 2u);
  EXPECT_EQ(s.steps[1][0].patch, "a1");
  EXPECT_EQ(s.steps[1][0].cells, (std::vector<Cell>{{0, 3}}));
  EXPECT_EQ(s.steps[1][1].patch, "a2");
  EXPECT_EQ(s.steps[1][1].cells, (std::vector<Cell>{{0, 1}}));
}

}  // namespace
