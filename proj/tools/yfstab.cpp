#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "yfstab/runner.hpp"

namespace {

using nlohmann::json;
using namespace yfstab;

struct Flags {
  std::string config;
  std::string preset;
  std::string out;
  std::string format;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
};

void add_flags(CLI::App* cmd, Flags& f, bool run_flags) {
  cmd->add_option("--config", f.config, "Run configuration (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--preset", f.preset, "Named preset")
      ->check(CLI::IsMember({"onshell-nonzero", "onshell-vanishing", "counterexample-default"}));
  if (!run_flags) return;
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--seed", f.seed, "Monte-Carlo seed");
  cmd->add_option("--format", f.format, "csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));
  cmd->add_option("--workers", f.workers, "Worker threads")->check(CLI::Range(1, 256));
}

json load_document(const Flags& f, const std::string& default_preset) {
  if (!f.config.empty() && !f.preset.empty()) {
    throw Error(ErrorCode::ConfigInvalid, "pass either --config or --preset, not both");
  }
  if (f.config.empty()) return preset(f.preset.empty() ? default_preset : f.preset);
  std::ifstream in(f.config, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigInvalid, std::string("config: not a valid JSON document (") + e.what() + ")");
  }
}

RunConfig resolve(const Flags& f, const std::string& default_preset, const char* mode) {
  json doc = load_document(f, default_preset);
  if (!doc.is_object()) throw Error(ErrorCode::ConfigInvalid, "config: expected an object");
  if (mode) doc["mode"] = mode;
  if (!f.out.empty()) doc["output"]["directory"] = f.out;
  if (!f.format.empty()) {
    doc["output"]["formats"] = f.format == "both" ? json{"csv", "json"} : json{f.format};
  }
  if (f.seed) doc["mc"]["seed"] = *f.seed;
  if (f.workers) doc["workers"] = *f.workers;
  return parse_config(doc);
}

void print_summary(const RunResult& r) {
  for (const auto& [k, v] : r.summary.items()) {
    if (k == "config") continue;
    std::cout << k << ": " << v.dump() << "\n";
  }
  for (const auto& file : r.files) std::cout << "wrote " << file << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stability of asymptotic fields: positive-metric contradiction engine and indefinite-metric counterexample"};
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.require_subcommand(1);

  Flags stab, cex, conv, val;
  auto* s = app.add_subcommand("stability-demo", "Pairing lower bound vs collapsing Kallen-Lehmann norm");
  auto* c = app.add_subcommand("counterexample-demo", "Decay amplitude and indefinite Gram matrix");
  auto* r = app.add_subcommand("convergence-report", "Ladder and shell-width convergence tables");
  auto* v = app.add_subcommand("validate-config", "Parse a configuration and print the resolved document");
  add_flags(s, stab, true);
  add_flags(c, cex, true);
  add_flags(r, conv, true);
  add_flags(v, val, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*v) {
      std::cout << resolve(val, "onshell-nonzero", nullptr).to_json().dump(2) << "\n";
      return 0;
    }
    RunResult result;
    if (*s) result = run(resolve(stab, "onshell-nonzero", "stability"));
    if (*c) result = run(resolve(cex, "counterexample-default", "counterexample"));
    if (*r) result = convergence_report(resolve(conv, "onshell-nonzero", nullptr));
    print_summary(result);
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}
