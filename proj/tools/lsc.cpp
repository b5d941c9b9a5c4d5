#include <cctype>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "lsc/canonicalize.hpp"
#include "lsc/estimate.hpp"
#include "lsc/icm.hpp"
#include "lsc/interpret.hpp"
#include "lsc/layout.hpp"
#include "lsc/render.hpp"
#include "lsc/schedule.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw lsc::ValidationError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& out_path, const std::string& data) {
  if (out_path.empty()) {
    std::cout << data;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw lsc::ValidationError("cannot write " + out_path);
  out << data;
}

bool looks_like_schedule(const std::string& path, const std::string& text) {
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") return true;
  for (char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch))) continue;
    return ch == '{';
  }
  return false;
}

struct Options {
  std::string input;
  std::string placement_file;
  std::string layout = "naive";
  std::string format = "ascii";
  std::string out_path;
  uint64_t seed = 1;
  int distance = 0;
};

lsc::SurgerySchedule compile_circuit(const std::string& text,
                                     const Options& opt) {
  lsc::Circuit icm = lsc::parse_circuit(text);
  lsc::InvertResult inv = lsc::to_inverted(icm);
  lsc::CanonicalProgram can = lsc::canonicalize(inv.circuit);
  lsc::Placement place =
      opt.placement_file.empty()
          ? lsc::naive_layout(can.circuit)
          : lsc::parse_placement(read_file(opt.placement_file));
  return lsc::emit_schedule(can.circuit, inv.rules, place);
}

lsc::SurgerySchedule load_schedule(const Options& opt) {
  std::string text = read_file(opt.input);
  if (looks_like_schedule(opt.input, text)) {
    lsc::ordered_json j;
    try {
      j = lsc::ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw lsc::ParseError(std::string("bad json: ") + e.what(), 0);
    }
    return lsc::schedule_from_json(j);
  }
  return compile_circuit(text, opt);
}

int run_verify(const Options& opt) {
  lsc::SurgerySchedule s = load_schedule(opt);
  lsc::VerifyReport rep;
  try {
    rep = lsc::verify_schedule(s, opt.seed);
  } catch (const lsc::ValidationError& e) {
    // A broken schedule fails verification rather than erroring out.
    std::cout << e.what() << "\nFAIL\n";
    return 4;
  } catch (const lsc::EngineBug& e) {
    std::cout << e.what() << "\nFAIL\n";
    return 4;
  }
  if (rep.pass) {
    std::cout << rep.forced << "PASS\n";
    return 0;
  }
  std::cout << "expected:\n"
            << rep.expected << "replay (all +1):\n"
            << rep.forced << "replay (seeded):\n"
            << rep.sampled << rep.message << "\nFAIL\n";
  return 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lattice-surgery compiler and verifier"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("input", opt.input, "circuit or schedule file")
        ->required();
    sub->add_option("--layout", opt.layout, "placement strategy (naive)")
        ->check(CLI::IsMember({"naive"}));
    sub->add_option("--placement", opt.placement_file,
                    "hand placement file (overrides --layout)");
    sub->add_option("--seed", opt.seed, "outcome sampling seed");
    sub->add_option("--out", opt.out_path, "output path (default stdout)");
  };

  CLI::App* cmd_compile =
      app.add_subcommand("compile", "lower a program to a surgery schedule");
  add_common(cmd_compile);
  CLI::App* cmd_verify =
      app.add_subcommand("verify", "replay a schedule against its program");
  add_common(cmd_verify);
  CLI::App* cmd_estimate =
      app.add_subcommand("estimate", "space-time costs of a schedule");
  add_common(cmd_estimate);
  cmd_estimate->add_option("--distance", opt.distance,
                           "evaluate numerics at code distance d");
  CLI::App* cmd_render =
      app.add_subcommand("render", "draw one frame per timestep");
  add_common(cmd_render);
  cmd_render->add_option("--format", opt.format, "ascii|svg")
      ->check(CLI::IsMember({"ascii", "svg"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_compile->parsed()) {
      std::string text = read_file(opt.input);
      if (looks_like_schedule(opt.input, text))
        throw lsc::ValidationError("input is already a schedule");
      lsc::SurgerySchedule s = compile_circuit(text, opt);
      lsc::validate_schedule(s);
      write_output(opt.out_path, lsc::schedule_to_json(s).dump(2) + "\n");
    } else if (cmd_verify->parsed()) {
      return run_verify(opt);
    } else if (cmd_estimate->parsed()) {
      lsc::SurgerySchedule s = load_schedule(opt);
      lsc::ResourceEstimate est = lsc::estimate(s);
      std::cout << lsc::estimate_text(est, opt.distance);
      if (!opt.out_path.empty())
        write_output(opt.out_path,
                     lsc::estimate_to_json(est, opt.distance).dump(2) + "\n");
    } else if (cmd_render->parsed()) {
      lsc::SurgerySchedule s = load_schedule(opt);
      write_output(opt.out_path, opt.format == "svg" ? lsc::render_svg(s)
                                                     : lsc::render_ascii(s));
    }
  } catch (const lsc::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const lsc::PlacementError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const lsc::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const lsc::EngineBug& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
