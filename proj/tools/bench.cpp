// bench <experiment> [--config path] [--out csv] [--trials N] [--seed S]
//       [--workers W] [--key=value ...]
//
// Exit codes: 0 success, 1 runtime failure, 2 config error, 3 I/O error.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "confomp/bench.hpp"
#include "confomp/errors.hpp"

namespace {

using confomp::bench::ExperimentConfig;

std::string experiment_list() {
  std::string s;
  for (auto e : confomp::bench::all_experiments()) {
    if (!s.empty()) s += ", ";
    s += confomp::bench::to_string(e);
  }
  return s;
}

void apply_overrides(ExperimentConfig& cfg, const std::vector<std::string>& extras) {
  for (const auto& arg : extras) {
    if (arg.rfind("--", 0) != 0 || arg.find('=') == std::string::npos)
      throw confomp::ConfigError("unrecognised argument '" + arg + "' (expected --key=value)");
    const auto eq = arg.find('=');
    cfg.set(std::string_view(arg).substr(2, eq - 2), std::string_view(arg).substr(eq + 1));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte-Carlo sweeps for confined OMP over combinatorial matrices"};
  app.allow_extras();

  std::string name;
  std::string config_path;
  std::string out_path;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;

  app.add_option("experiment", name, "One of: " + experiment_list())->required();
  app.add_option("--config", config_path, "Flat key = value file");
  app.add_option("--out", out_path, "CSV output path (stdout when omitted)");
  app.add_option("--trials", trials, "Trials per sweep point");
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--workers", workers, "Worker threads (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const auto exp = confomp::bench::parse_experiment(name);
    if (!exp) throw confomp::ConfigError("unknown experiment '" + name + "'");
    auto cfg = ExperimentConfig::defaults(*exp);
    if (!config_path.empty()) confomp::bench::apply_config_file(cfg, config_path);
    apply_overrides(cfg, app.remaining());
    cfg.experiment = *exp;
    if (trials) cfg.trials = *trials;
    if (seed) cfg.seed = *seed;
    if (workers) cfg.workers = *workers;
    cfg.validate();

    const auto table = confomp::bench::run_experiment(cfg);
    if (out_path.empty())
      confomp::bench::write_csv(std::cout, table);
    else
      confomp::bench::emit_csv(table, out_path);
  } catch (const confomp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const confomp::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
