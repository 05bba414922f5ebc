// rxfeed-sim: classroom simulation and the haptics recognition quiz.
#include <cstdint>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "common.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;

const char* kKindNames[] = {"HandRaise", "Confused", "Confident"};

std::string describe_haptic(const std::string& haptic_json) {
  const auto seq = json::parse(haptic_json);
  std::ostringstream os;
  for (const auto& p : seq["pattern"]) {
    if (p["delay_ms"].get<int>() > 0) os << "  (" << p["delay_ms"].get<int>() << " ms pause)";
    os << "  buzz " << p["duration_ms"].get<int>() << " ms at " << p["intensity"].get<double>();
  }
  os << "   x" << seq["repeats"].get<int>();
  return os.str();
}

void on_train(void*, int kind, const char* haptic_json) {
  std::cout << "[training] " << kKindNames[kind] << ":" << describe_haptic(haptic_json) << '\n';
}

int on_identify(void*, const char* haptic_json, int trial, int* out_kind) {
  std::cout << "\ntrial " << trial << ":" << describe_haptic(haptic_json) << '\n';
  for (;;) {
    std::cout << "1) HandRaise  2) Confused  3) Confident  q) quit > " << std::flush;
    std::string line;
    if (!std::getline(std::cin, line) || line == "q") return 1;
    if (line == "1" || line == "2" || line == "3") {
      *out_kind = line[0] - '1';
      return 0;
    }
  }
}

int exit_code_for(rxf_status st) {
  switch (st) {
    case RXF_ERR_CONNECTION: return 3;
    case RXF_ERR_ABORTED: return 4;
    case RXF_ERR_PARSE:
    case RXF_ERR_INVALID_ARGUMENT: return 2;
    default: return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Classroom simulator and haptics quiz"};
  app.require_subcommand(1);

  std::string scenario_path, preset, mode = "inprocess", url = "http://127.0.0.1:8080", out;
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "Simulate a lecture and write a JSON report");
  auto* source = run->add_option("--scenario", scenario_path, "Scenario TOML file")->check(CLI::ExistingFile);
  run->add_option("--preset", preset, "Built-in scenario (see `presets`)")->excludes(source);
  run->add_option("--seed", seed, "Overrides the scenario seed");
  run->add_option("--mode", mode, "inprocess or http")->check(CLI::IsMember({"inprocess", "http"}));
  run->add_option("--url", url, "Server base URL for http mode");
  run->add_option("--out", out, "Report path (default stdout)");

  std::uint64_t quiz_seed = 1;
  std::string responder = "interactive";
  std::string quiz_out;
  auto* quiz = app.add_subcommand("quiz", "Haptics recognition quiz");
  quiz->add_option("--seed", quiz_seed, "Trial order seed");
  quiz->add_option("--responder", responder, "Responder TOML script, or `interactive`");
  quiz->add_option("--out", quiz_out, "Result path (default stdout)");

  std::string show;
  auto* presets = app.add_subcommand("presets", "List built-in scenarios, or print one as TOML");
  presets->add_option("name", show, "Preset to print");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      std::string toml;
      if (!scenario_path.empty()) {
        toml = tool::read_file(scenario_path);
      } else if (!preset.empty()) {
        tool::CString text;
        tool::check(rxf_sim_preset_toml(preset.c_str(), &text.p), "preset");
        toml = text.str();
      } else {
        std::cerr << "run: one of --scenario or --preset is required\n";
        return 2;
      }
      tool::CString report;
      tool::check(rxf_sim_run(toml.c_str(), mode.c_str(), url.c_str(), seed ? 1 : 0, seed.value_or(0), &report.p),
                  "run");
      tool::write_output(out, json::parse(report.str()).dump(2));
    } else if (*quiz) {
      tool::CString result;
      rxf_status st;
      if (responder == "interactive") {
        st = rxf_quiz_run(quiz_seed, nullptr, on_train, on_identify, nullptr, &result.p);
      } else {
        const auto script = tool::read_file(responder);
        st = rxf_quiz_run(quiz_seed, script.c_str(), nullptr, nullptr, nullptr, &result.p);
      }
      if (result.p) tool::write_output(quiz_out, json::parse(result.str()).dump(2));
      tool::check(st, "quiz");
    } else if (*presets) {
      tool::CString text;
      if (show.empty()) {
        tool::check(rxf_sim_preset_names(&text.p), "presets");
        for (const auto& name : json::parse(text.str())) std::cout << name.get<std::string>() << '\n';
      } else {
        tool::check(rxf_sim_preset_toml(show.c_str(), &text.p), "presets");
        std::cout << text.str();
      }
    }
  } catch (const tool::Failure& e) {
    std::cerr << e.what() << '\n';
    return exit_code_for(e.status);
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  return 0;
}
