#pragma once

// Seeded Monte-Carlo experiment harness. Each experiment sweeps the
// cartesian product of its list-valued parameters and emits one CSV row per
// sweep point, pairing empirical frequencies with the matching theory.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "confomp/combmat.hpp"
#include "confomp/signals.hpp"

namespace confomp::bench {

enum class Experiment {
  nu_vs_K,
  gamma_vs_K,
  recovery_vs_K,
  opcount_vs_K,
  recovery_vs_m,
  opcount_vs_m,
  khat_sensitivity,
  noisy_conf_prob,
  noisy_support,
  d_optimization,
};

std::string_view to_string(Experiment e);
std::optional<Experiment> parse_experiment(std::string_view name);
const std::vector<Experiment>& all_experiments();

enum class SignalKind { gaussian, flat };

struct ExperimentConfig {
  Experiment experiment = Experiment::recovery_vs_K;
  std::vector<Index> m{128};
  std::vector<Index> n{256};
  std::vector<Index> d{10};
  std::vector<Index> k{8};
  SignalKind signal = SignalKind::gaussian;
  std::vector<double> mu{0.0};
  double sigma = 1.0;
  std::vector<double> theta{1.0};
  Index batch = 3;                  // gOMP N
  std::vector<double> eta{0.0};     // noise half-width; eps = eta when eta > 0
  double epsilon = 1e-12;           // confinement threshold for noiseless runs
  double residual_tol = 1e-5;
  Index khat_max = 50;
  Index khat_margin = 2;
  Index trials = 1000;
  std::uint64_t seed = 1;
  unsigned workers = 0;             // 0: hardware concurrency

  /// Full-scale settings for each experiment.
  static ExperimentConfig defaults(Experiment e);

  /// Applies one `key = value` setting; throws ConfigError on unknown keys
  /// or malformed values. List-valued keys accept `a,b,c`, `lo:hi` and
  /// `lo:hi:step` items.
  void set(std::string_view key, std::string_view value);
  void validate() const;
};

/// Parses a flat key-value document: one `key = value` per line, `#` starts
/// a comment, blank lines ignored.
void apply_config_text(ExperimentConfig& cfg, std::string_view text);
void apply_config_file(ExperimentConfig& cfg, const std::string& path);

using Cell = std::variant<std::int64_t, double>;

struct ExperimentRow {
  std::vector<Cell> cells;
};

struct ExperimentTable {
  std::vector<std::string> columns;
  std::vector<ExperimentRow> rows;

  /// Value of `column` in row `row` as a double; throws if absent.
  double value(std::size_t row, std::string_view column) const;
};

ExperimentTable run_experiment(const ExperimentConfig& cfg);

/// Header row, then one line per row; doubles with 10 significant digits,
/// LF line endings.
void write_csv(std::ostream& os, const ExperimentTable& table);
void emit_csv(const ExperimentTable& table, const std::string& path);

}  // namespace confomp::bench
