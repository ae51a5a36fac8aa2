#include "fracsource/checks.hpp"
#include "fracsource/config.hpp"
#include "fracsource/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using fracsource::config::ConfigError;
using fracsource::config::KeyValues;

constexpr int kUsage = 2;

// Remaining `--key value` or `--key=value` pairs.
KeyValues overrides(const std::vector<std::string>& extras) {
  KeyValues kv;
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const auto& arg = extras[i];
    if (!arg.starts_with("--") || arg.size() == 2) throw ConfigError("unexpected argument '" + arg + "'");
    const auto eq = arg.find('=');
    if (eq != std::string::npos) {
      kv[arg.substr(2, eq - 2)] = arg.substr(eq + 1);
    } else {
      if (i + 1 >= extras.size()) throw ConfigError("missing value for '" + arg + "'");
      kv[arg.substr(2)] = extras[++i];
    }
  }
  return kv;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional diffusion source reconstruction"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a reconstruction experiment");
  std::string run_config;
  std::string preset_name;
  std::optional<std::uint64_t> seed;
  std::string seeds;
  std::string out_dir;
  run->add_option("--config", run_config, "Config file (key = value)");
  run->add_option("--preset", preset_name, "table1 or table2");
  run->add_option("--seed", seed, "Single noise seed");
  run->add_option("--seeds", seeds, "Comma-separated noise seeds to average over");
  run->add_option("--out", out_dir, "Output directory");
  run->allow_extras();

  auto* check = app.add_subcommand("check", "Run the fast self-checks");
  std::string fault;
  check->add_option("--inject-fault", fault, "Test hook: ml-switch");

  auto* fwd = app.add_subcommand("forward", "Forward solve only, writes field.csv");
  std::string fwd_config;
  std::string fwd_out;
  fwd->add_option("--config", fwd_config, "Config file (key = value)")->required();
  fwd->add_option("--out", fwd_out, "Output directory");
  fwd->allow_extras();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*check) {
      const auto opt = fault.empty() ? fracsource::checks::CheckOptions{} : fracsource::checks::inject_fault(fault);
      return fracsource::checks::report(fracsource::checks::run_checks(opt), std::cout) ? 0 : 1;
    }

    if (*fwd) {
      auto kv = fracsource::config::load(fwd_config);
      for (const auto& [k, v] : overrides(fwd->remaining())) kv[k] = v;
      if (!fwd_out.empty()) kv["output.dir"] = fwd_out;
      const auto path = fracsource::experiment::run_forward(fracsource::experiment::forward_spec(kv));
      std::cout << "wrote " << path.string() << "\n";
      return 0;
    }

    KeyValues kv;
    if (!run_config.empty()) kv = fracsource::config::load(run_config);
    if (!preset_name.empty()) kv["preset"] = preset_name;
    if (kv.find("preset") == kv.end() && run_config.empty())
      throw ConfigError("run needs --config or --preset");
    for (const auto& [k, v] : overrides(run->remaining())) kv[k] = v;
    if (seed && !seeds.empty()) throw ConfigError("--seed and --seeds are exclusive");
    if (seed) kv["noise.seeds"] = std::to_string(*seed);
    if (!seeds.empty()) kv["noise.seeds"] = seeds;
    if (!out_dir.empty()) kv["output.dir"] = out_dir;

    const auto p = kv.find("preset");
    auto spec = fracsource::experiment::preset(p == kv.end() ? "table1" : p->second);
    fracsource::experiment::apply(spec, kv);
    spec.validate();
    fracsource::experiment::run_experiment(spec, std::cout);
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
