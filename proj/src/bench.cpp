#include "confomp/bench.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "confomp/confined.hpp"
#include "confomp/errors.hpp"
#include "confomp/greedy.hpp"
#include "confomp/rng.hpp"
#include "confomp/theory.hpp"

namespace confomp::bench {

namespace {

constexpr std::array<std::pair<Experiment, std::string_view>, 10> kNames{{
    {Experiment::nu_vs_K, "nu_vs_K"},
    {Experiment::gamma_vs_K, "gamma_vs_K"},
    {Experiment::recovery_vs_K, "recovery_vs_K"},
    {Experiment::opcount_vs_K, "opcount_vs_K"},
    {Experiment::recovery_vs_m, "recovery_vs_m"},
    {Experiment::opcount_vs_m, "opcount_vs_m"},
    {Experiment::khat_sensitivity, "khat_sensitivity"},
    {Experiment::noisy_conf_prob, "noisy_conf_prob"},
    {Experiment::noisy_support, "noisy_support"},
    {Experiment::d_optimization, "d_optimization"},
}};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class T>
T parse_number(std::string_view key, const std::string& text) {
  T v{};
  const char* first = text.data();
  const char* last = first + text.size();
  std::from_chars_result res;
  if constexpr (std::is_floating_point_v<T>) {
    // from_chars for double is available in libstdc++ >= 11.
    res = std::from_chars(first, last, v);
  } else {
    res = std::from_chars(first, last, v);
  }
  if (text.empty() || res.ec != std::errc() || res.ptr != last)
    throw ConfigError("invalid value '" + text + "' for key '" + std::string(key) + "'");
  return v;
}

template <class T>
std::vector<T> parse_list(std::string_view key, std::string_view value) {
  std::vector<T> out;
  for (const auto& item : split(value, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() == 1) {
      out.push_back(parse_number<T>(key, parts[0]));
      continue;
    }
    if (parts.size() > 3)
      throw ConfigError("malformed range '" + item + "' for key '" + std::string(key) + "'");
    const T lo = parse_number<T>(key, parts[0]);
    const T hi = parse_number<T>(key, parts[1]);
    const T step = parts.size() == 3 ? parse_number<T>(key, parts[2]) : T{1};
    if (!(step > T{0}) || hi < lo)
      throw ConfigError("empty or non-increasing range '" + item + "' for key '" +
                        std::string(key) + "'");
    if constexpr (std::is_floating_point_v<T>) {
      const double slack = 1e-9 * step;
      for (long i = 0;; ++i) {
        const double v = lo + static_cast<double>(i) * step;
        if (v > hi + slack) break;
        out.push_back(v);
      }
    } else {
      for (T v = lo; v <= hi; v += step) out.push_back(v);
    }
  }
  if (out.empty()) throw ConfigError("key '" + std::string(key) + "' has an empty list");
  return out;
}

// ---------------------------------------------------------------------------
// Sweep machinery

struct Point {
  std::size_t index = 0;
  Index m = 0, n = 0, d = 0, k = 0;
  double eta = 0.0;
  double param = 0.0;  // mu for Gaussian signals, theta for flat ones
};

struct Metric {
  std::string name;
  bool rate = false;  // Bernoulli outcome: se = sqrt(p(1-p)/T)
};

struct Column {
  std::string name;
  Cell value;
};

struct Plan {
  std::vector<Metric> metrics;
  std::function<std::vector<double>(const Point&, std::uint64_t trial_seed)> trial;
  std::function<std::vector<Column>(const Point&)> theory;
};

SignalModel model_for(const ExperimentConfig& cfg, const Point& p) {
  return cfg.signal == SignalKind::gaussian ? SignalModel::gaussian(p.param, cfg.sigma)
                                            : SignalModel::flat(p.param);
}

// Everything one trial draws: matrix, signal, noisy measurements, and the
// confinement threshold implied by the noise level.
struct Instance {
  CombMatrix a;
  SparseSignal x;
  std::vector<double> y;
  double epsilon;
};

Instance draw(const ExperimentConfig& cfg, const Point& p, std::uint64_t trial_seed) {
  auto a = gen_comb_matrix(p.m, p.n, p.d, derive_seed({trial_seed, 1}));
  auto x = gen_signal(p.n, p.k, model_for(cfg, p), derive_seed({trial_seed, 2}));
  auto y = matvec(a, x.dense());
  if (p.eta > 0.0) {
    const auto v = gen_noise(p.m, p.eta, derive_seed({trial_seed, 3}));
    for (Index i = 0; i < p.m; ++i) y[i] += v[i];
  }
  const double eps = p.eta > 0.0 ? p.eta : cfg.epsilon;
  return {std::move(a), std::move(x), std::move(y), eps};
}

bool contains_support(const IndexList& gamma, const IndexList& support) {
  return std::includes(gamma.begin(), gamma.end(), support.begin(), support.end());
}

struct SolverRun {
  bool perfect = false;
  bool support_exact = false;
  bool rank_deficient = false;
  OpCounter counters;
};

using Solver = GreedyResult (*)(const CombMatrix&, std::span<const double>, const SolverConfig&);

SolverRun run_solver(Solver solver, const Instance& in, const SolverConfig& sc) {
  SolverRun out;
  try {
    const auto res = solver(in.a, in.y, sc);
    out.perfect = is_perfect(relative_error(in.x, res.x_hat));
    out.support_exact = res.support == in.x.support;
    out.counters = res.counters;
  } catch (const RankDeficient&) {
    out.rank_deficient = true;
  }
  return out;
}

SolverConfig solver_config(const ExperimentConfig& cfg, Index k, double eps) {
  SolverConfig sc;
  sc.k = k;
  sc.epsilon = eps;
  sc.residual_tol = cfg.residual_tol;
  sc.batch = cfg.batch;
  return sc;
}

constexpr std::array<Solver, 4> kSolvers{&omp, &confined_omp, &gomp, &confined_gomp};
constexpr std::array<const char*, 4> kSolverNames{"omp", "comp", "gomp", "cgomp"};

std::vector<Column> bound_columns(const Point& p) {
  const auto nu = theory::nu_distribution(p.m, p.d, p.k);
  const auto pb = theory::pi_bar(p.m, p.n, p.d, p.k);
  return {{"bound_recovery", theory::recovery_prob_lower_bound(nu, p.n).value},
          {"pi_bar", pb.value},
          {"pi_bar_valid", std::int64_t{pb.valid}}};
}

Plan make_plan(const ExperimentConfig& cfg) {
  Plan plan;
  switch (cfg.experiment) {
    case Experiment::nu_vs_K:
      plan.metrics = {{"nu"}};
      plan.trial = [&cfg](const Point& p, std::uint64_t s) {
        const auto in = draw(cfg, p, s);
        Index nonzero = 0;
        for (double v : in.y) nonzero += std::abs(v) > in.epsilon;
        return std::vector<double>{static_cast<double>(nonzero)};
      };
      plan.theory = [](const Point& p) {
        return std::vector<Column>{
            {"expected_nu", theory::expected_nu_closed(p.m, p.d, p.k)},
            {"expected_nu_recursion", theory::nu_distribution(p.m, p.d, p.k).mean()}};
      };
      break;

    case Experiment::gamma_vs_K:
      plan.metrics = {{"gamma"}, {"gamma_eq_K", true}, {"confined", true}};
      plan.trial = [&cfg](const Point& p, std::uint64_t s) {
        const auto in = draw(cfg, p, s);
        const auto cs = compute_confined_set(in.a, in.y, in.epsilon);
        const auto size = static_cast<double>(cs.gamma.size());
        return std::vector<double>{size, size == p.k ? 1.0 : 0.0,
                                   contains_support(cs.gamma, in.x.support) ? 1.0 : 0.0};
      };
      plan.theory = [](const Point& p) {
        return std::vector<Column>{
            {"expected_gamma", theory::expected_gamma_size(p.m, p.n, p.d, p.k)},
            {"sd_gamma_model", std::sqrt(theory::gamma_size_variance(p.m, p.n, p.d, p.k))},
            {"bound_recovery", theory::recovery_prob_lower_bound(p.m, p.n, p.d, p.k).value}};
      };
      break;

    case Experiment::recovery_vs_K:
    case Experiment::recovery_vs_m:
      for (auto name : kSolverNames) plan.metrics.push_back({std::string("rate_") + name, true});
      plan.metrics.push_back({"gamma"});
      plan.metrics.push_back({"rank_deficient", true});
      plan.trial = [&cfg](const Point& p, std::uint64_t s) {
        const auto in = draw(cfg, p, s);
        const auto sc = solver_config(cfg, p.k, in.epsilon);
        std::vector<double> out;
        bool deficient = false;
        for (auto solver : kSolvers) {
          const auto run = run_solver(solver, in, sc);
          out.push_back(run.perfect ? 1.0 : 0.0);
          deficient |= run.rank_deficient;
        }
        out.push_back(static_cast<double>(compute_confined_set(in.a, in.y, in.epsilon).gamma.size()));
        out.push_back(deficient ? 1.0 : 0.0);
        return out;
      };
      plan.theory = bound_columns;
      break;

    case Experiment::opcount_vs_K:
    case Experiment::opcount_vs_m:
      for (auto name : kSolverNames) plan.metrics.push_back({std::string("flops_") + name});
      for (auto name : kSolverNames) plan.metrics.push_back({std::string("inner_products_") + name});
      plan.metrics.push_back({"gamma"});
      plan.trial = [&cfg](const Point& p, std::uint64_t s) {
        const auto in = draw(cfg, p, s);
        const auto sc = solver_config(cfg, p.k, in.epsilon);
        std::vector<double> flops, ips;
        for (auto solver : kSolvers) {
          const auto run = run_solver(solver, in, sc);
          flops.push_back(static_cast<double>(run.counters.total_flops()));
          ips.push_back(static_cast<double>(run.counters.inner_products));
        }
        flops.insert(flops.end(), ips.begin(), ips.end());
        flops.push_back(static_cast<double>(compute_confined_set(in.a, in.y, in.epsilon).gamma.size()));
        return flops;
      };
      plan.theory = [](const Point& p) {
        return std::vector<Column>{
            {"expected_gamma", theory::expected_gamma_size(p.m, p.n, p.d, p.k)},
            {"omp_identification_flops",
             static_cast<std::int64_t>(p.k) * p.n * p.d - p.k}};
      };
      break;

    case Experiment::khat_sensitivity:
      plan.metrics = {{"khat"},
                      {"rate_comp_true_K", true},
                      {"rate_comp_khat", true},
                      {"rate_comp_khat_margin", true},
                      {"rate_cgomp_khat", true},
                      {"rate_cgomp_khat_margin", true}};
      plan.trial = [&cfg](const Point& p, std::uint64_t s) {
        const auto in = draw(cfg, p, s);
        const auto cs = compute_confined_set(in.a, in.y, in.epsilon);
        const Index k_hat =
            estimate_sparsity(cs.nonzero_rows(p.m), p.m, p.d, cfg.khat_max).k_hat;
        auto rate = [&](Solver solver, Index k) {
          const auto sc = solver_config(cfg, std::min(k, p.m), in.epsilon);
          return run_solver(solver, in, sc).perfect ? 1.0 : 0.0;
        };
        return std::vector<double>{static_cast<double>(k_hat),
                                   rate(&confined_omp, p.k),
                                   rate(&confined_omp, k_hat),
                                   rate(&confined_omp, k_hat + cfg.khat_margin),
                                   rate(&confined_gomp, k_hat),
                                   rate(&confined_gomp, k_hat + cfg.khat_margin)};
      };
      plan.theory = [](const Point& p) {
        return std::vector<Column>{{"expected_nu", theory::expected_nu_closed(p.m, p.d, p.k)}};
      };
      break;

    case Experiment::noisy_conf_prob:
      plan.metrics = {{"confined", true}, {"gamma"}};
      plan.trial = [&cfg](const Point& p, std::uint64_t s) {
        const auto in = draw(cfg, p, s);
        const auto cs = compute_confined_set(in.a, in.y, in.epsilon);
        return std::vector<double>{contains_support(cs.gamma, in.x.support) ? 1.0 : 0.0,
                                   static_cast<double>(cs.gamma.size())};
      };
      plan.theory = [&cfg](const Point& p) {
        const double eps = p.eta > 0.0 ? p.eta : cfg.epsilon;
        const auto b = theory::noisy_conf_prob_lower_bound(p.m, p.d, p.k, eps, p.eta,
                                                           model_for(cfg, p));
        return std::vector<Column>{{"bound_noisy_conf", b.value},
                                   {"bound_noisy_conf_clamped", std::int64_t{b.clamped}}};
      };
      break;

    case Experiment::noisy_support:
      plan.metrics = {{"support_comp", true}, {"confined", true}, {"rank_deficient", true}};
      plan.trial = [&cfg](const Point& p, std::uint64_t s) {
        const auto in = draw(cfg, p, s);
        const auto cs = compute_confined_set(in.a, in.y, in.epsilon);
        const auto run = run_solver(&confined_omp, in, solver_config(cfg, p.k, in.epsilon));
        return std::vector<double>{run.support_exact ? 1.0 : 0.0,
                                   contains_support(cs.gamma, in.x.support) ? 1.0 : 0.0,
                                   run.rank_deficient ? 1.0 : 0.0};
      };
      plan.theory = [&cfg](const Point& p) {
        const auto b =
            theory::noisy_support_recovery_bound(p.m, p.n, p.d, p.k, p.eta, model_for(cfg, p));
        return std::vector<Column>{{"bound_support", b.value},
                                   {"bound_support_valid", std::int64_t{b.valid}},
                                   {"bound_support_clamped", std::int64_t{b.clamped}}};
      };
      break;

    case Experiment::d_optimization:
      plan.metrics = {{"rate_comp", true}, {"gamma_eq_K", true}, {"rank_deficient", true}};
      plan.trial = [&cfg](const Point& p, std::uint64_t s) {
        const auto in = draw(cfg, p, s);
        const auto run = run_solver(&confined_omp, in, solver_config(cfg, p.k, in.epsilon));
        const auto cs = compute_confined_set(in.a, in.y, in.epsilon);
        return std::vector<double>{run.perfect ? 1.0 : 0.0,
                                   static_cast<Index>(cs.gamma.size()) == p.k ? 1.0 : 0.0,
                                   run.rank_deficient ? 1.0 : 0.0};
      };
      plan.theory = bound_columns;
      break;
  }
  return plan;
}

std::vector<Point> sweep_points(const ExperimentConfig& cfg) {
  const auto& params = cfg.signal == SignalKind::gaussian ? cfg.mu : cfg.theta;
  std::vector<Point> pts;
  for (double param : params)
    for (Index d : cfg.d)
      for (Index n : cfg.n)
        for (Index m : cfg.m)
          for (double eta : cfg.eta)
            for (Index k : cfg.k) pts.push_back({pts.size(), m, n, d, k, eta, param});
  return pts;
}

// Runs every (point, trial) pair on a bounded pool. Results are stored by
// position, so the aggregation below never depends on scheduling.
std::vector<std::vector<std::vector<double>>> run_trials(const ExperimentConfig& cfg,
                                                         const Plan& plan,
                                                         const std::vector<Point>& pts) {
  const std::size_t trials = static_cast<std::size_t>(cfg.trials);
  const std::size_t total = pts.size() * trials;
  std::vector<std::vector<std::vector<double>>> out(pts.size(),
                                                    std::vector<std::vector<double>>(trials));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t t = next.fetch_add(1); t < total; t = next.fetch_add(1)) {
      const auto& p = pts[t / trials];
      const std::size_t trial = t % trials;
      try {
        out[p.index][trial] = plan.trial(p, derive_seed({cfg.seed, p.index, trial}));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(total);
      }
    }
  };

  unsigned workers = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(total, 1)));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace

std::string_view to_string(Experiment e) {
  for (const auto& [exp, name] : kNames)
    if (exp == e) return name;
  return "unknown";
}

std::optional<Experiment> parse_experiment(std::string_view name) {
  for (const auto& [exp, n] : kNames)
    if (n == name) return exp;
  return std::nullopt;
}

const std::vector<Experiment>& all_experiments() {
  static const std::vector<Experiment> all = [] {
    std::vector<Experiment> v;
    for (const auto& entry : kNames) v.push_back(entry.first);
    return v;
  }();
  return all;
}

ExperimentConfig ExperimentConfig::defaults(Experiment e) {
  ExperimentConfig c;
  c.experiment = e;
  switch (e) {
    case Experiment::nu_vs_K:
    case Experiment::gamma_vs_K:
      c.m = {100};
      c.d = {8, 12, 16};
      c.k = parse_list<Index>("K", "1:20");
      break;
    case Experiment::recovery_vs_K:
    case Experiment::opcount_vs_K:
    case Experiment::khat_sensitivity:
      c.k = parse_list<Index>("K", "2:22");
      break;
    case Experiment::recovery_vs_m:
    case Experiment::opcount_vs_m:
      c.m = parse_list<Index>("m", "60:160:10");
      c.k = {8};
      break;
    case Experiment::noisy_conf_prob:
      c.signal = SignalKind::flat;
      c.theta = {0.4, 0.8, 1.0};
      c.k = {10};
      c.eta = parse_list<double>("eta", "0.05:0.6:0.05");
      break;
    case Experiment::noisy_support:
      c.signal = SignalKind::flat;
      c.k = {8};
      c.eta = parse_list<double>("eta", "0.05:0.6:0.05");
      break;
    case Experiment::d_optimization:
      c.m = {100};
      c.signal = SignalKind::flat;
      c.k = {5};
      c.d = parse_list<Index>("d", "5:50");
      break;
  }
  return c;
}

void ExperimentConfig::set(std::string_view key_in, std::string_view value_in) {
  const std::string key = trim(key_in);
  const std::string value = trim(value_in);
  if (key == "m") m = parse_list<Index>(key, value);
  else if (key == "n") n = parse_list<Index>(key, value);
  else if (key == "d") d = parse_list<Index>(key, value);
  else if (key == "K" || key == "k") k = parse_list<Index>(key, value);
  else if (key == "signal") {
    if (value == "gaussian") signal = SignalKind::gaussian;
    else if (value == "flat") signal = SignalKind::flat;
    else throw ConfigError("signal must be 'gaussian' or 'flat', got '" + value + "'");
  } else if (key == "mu") mu = parse_list<double>(key, value);
  else if (key == "sigma") sigma = parse_number<double>(key, value);
  else if (key == "theta") theta = parse_list<double>(key, value);
  else if (key == "N" || key == "batch") batch = parse_number<Index>(key, value);
  else if (key == "eta") eta = parse_list<double>(key, value);
  else if (key == "epsilon") epsilon = parse_number<double>(key, value);
  else if (key == "residual_tol") residual_tol = parse_number<double>(key, value);
  else if (key == "khat_max") khat_max = parse_number<Index>(key, value);
  else if (key == "khat_margin") khat_margin = parse_number<Index>(key, value);
  else if (key == "trials") trials = parse_number<Index>(key, value);
  else if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
  else if (key == "workers") workers = parse_number<unsigned>(key, value);
  else if (key == "experiment") {
    auto e = parse_experiment(value);
    if (!e) throw ConfigError("unknown experiment '" + value + "'");
    experiment = *e;
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

void ExperimentConfig::validate() const {
  auto positive = [](const std::vector<Index>& v, const char* key) {
    for (Index x : v)
      if (x < 1) throw ConfigError(std::string(key) + " values must be positive");
  };
  positive(m, "m");
  positive(n, "n");
  positive(d, "d");
  positive(k, "K");
  for (Index mm : m)
    for (Index dd : d)
      if (dd > mm) throw ConfigError("degree d exceeds m at m=" + std::to_string(mm));
  for (Index kk : k) {
    for (Index nn : n)
      if (kk > nn) throw ConfigError("K exceeds n at K=" + std::to_string(kk));
    for (Index mm : m)
      if (kk > mm) throw ConfigError("K exceeds m at K=" + std::to_string(kk));
  }
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (batch < 1) throw ConfigError("N must be >= 1");
  if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
  for (double t : theta)
    if (t == 0.0) throw ConfigError("theta must be nonzero");
  for (double e : eta)
    if (!(e >= 0.0)) throw ConfigError("eta must be non-negative");
  if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be non-negative");
  if (!(residual_tol >= 0.0)) throw ConfigError("residual_tol must be non-negative");
  if (khat_max < 1) throw ConfigError("khat_max must be >= 1");
  if (khat_margin < 0) throw ConfigError("khat_margin must be >= 0");
}

void apply_config_text(ExperimentConfig& cfg, std::string_view text) {
  std::size_t line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    cfg.set(std::string_view(line).substr(0, eq), std::string_view(line).substr(eq + 1));
  }
}

void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  apply_config_text(cfg, ss.str());
}

double ExperimentTable::value(std::size_t row, std::string_view column) const {
  const auto it = std::find(columns.begin(), columns.end(), column);
  if (it == columns.end()) throw ParameterError("no column named " + std::string(column));
  const auto& cell = rows.at(row).cells.at(static_cast<std::size_t>(it - columns.begin()));
  return std::visit([](auto v) { return static_cast<double>(v); }, cell);
}

ExperimentTable run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto plan = make_plan(cfg);
  const auto pts = sweep_points(cfg);
  const auto results = run_trials(cfg, plan, pts);

  ExperimentTable table;
  table.columns = {"m", "n", "d", "K", "eta",
                   cfg.signal == SignalKind::gaussian ? "mu" : "theta", "trials"};
  for (const auto& metric : plan.metrics) {
    table.columns.push_back("mean_" + metric.name);
    table.columns.push_back("se_" + metric.name);
  }

  const double trials = static_cast<double>(cfg.trials);
  for (const auto& p : pts) {
    ExperimentRow row;
    row.cells = {std::int64_t{p.m}, std::int64_t{p.n}, std::int64_t{p.d}, std::int64_t{p.k},
                 p.eta, p.param, std::int64_t{cfg.trials}};
    for (std::size_t j = 0; j < plan.metrics.size(); ++j) {
      double sum = 0.0;
      for (const auto& r : results[p.index]) sum += r.at(j);
      const double mean = sum / trials;
      double se = 0.0;
      if (plan.metrics[j].rate) {
        se = std::sqrt(std::max(0.0, mean * (1.0 - mean)) / trials);
      } else if (cfg.trials > 1) {
        double ss = 0.0;
        for (const auto& r : results[p.index]) ss += (r[j] - mean) * (r[j] - mean);
        se = std::sqrt(ss / (trials - 1.0) / trials);
      }
      row.cells.emplace_back(mean);
      row.cells.emplace_back(se);
    }
    const auto theory_cols = plan.theory(p);
    if (table.rows.empty())
      for (const auto& c : theory_cols) table.columns.push_back(c.name);
    for (const auto& c : theory_cols) row.cells.push_back(c.value);
    table.rows.push_back(std::move(row));
  }
  if (pts.empty() || table.rows.empty()) {
    // Keep the header complete even without data.
    Point probe{0, cfg.m.front(), cfg.n.front(), cfg.d.front(), cfg.k.front(), cfg.eta.front(), 1.0};
    for (const auto& c : plan.theory(probe)) table.columns.push_back(c.name);
  }
  return table;
}

void write_csv(std::ostream& os, const ExperimentTable& table) {
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    os << (c ? "," : "") << table.columns[c];
  os << '\n';
  char buf[64];
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.cells.size(); ++c) {
      if (c) os << ',';
      if (const auto* i = std::get_if<std::int64_t>(&row.cells[c])) {
        os << *i;
      } else {
        std::snprintf(buf, sizeof buf, "%.10g", std::get<double>(row.cells[c]));
        os << buf;
      }
    }
    os << '\n';
  }
}

void emit_csv(const ExperimentTable& table, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path + " for writing");
  write_csv(os, table);
  os.flush();
  if (!os) throw IoError("write failed: " + path);
}

}  // namespace confomp::bench
