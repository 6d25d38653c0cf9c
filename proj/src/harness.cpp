#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "spectralht/errors.hpp"
#include "spectralht/harness.hpp"
#include "spectralht/rng.hpp"

namespace stht {

namespace {

using nlohmann::json;

constexpr std::uint64_t kOmegaSalt = 0x6f6d656761696478ull;  // "omegaidx"
constexpr std::uint64_t kCoeffSalt = 0x636f656666736571ull;  // "coeffseq"

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content, bool force) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!force && fs::exists(path, ec))
    raise(ErrorCode::IoError, path + " already exists (pass --force to overwrite)");
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorCode::IoError, "cannot open " + tmp + " for writing");
    out << content;
    out.flush();
    if (!out) raise(ErrorCode::IoError, "write failed: " + tmp);
  }
  fs::rename(tmp, path, ec);
  if (ec) raise(ErrorCode::IoError, "cannot move " + tmp + " to " + path + ": " + ec.message());
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::IoError, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) raise(ErrorCode::IoError, "read failed: " + path);
  return buf.str();
}

/// Index-driven worker pool. Results must be written to preallocated,
/// per-index slots so the thread count never changes the output.
void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, std::max(1, count));
  if (threads == 1 || count <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  const auto worker = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const int i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (std::thread& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

double resolved_separation(const ExperimentConfig& cfg, int n) {
  return cfg.min_separation < 0 ? 1.0 / n : cfg.min_separation;
}

/// Instance + solve for one (n, m, k, trial) cell. Fixed frequencies reuse
/// the trial's coefficient stream; otherwise the whole signal is drawn.
TrialResult execute_trial(const ExperimentConfig& cfg, int n, int m, int k, int trial) {
  const std::uint64_t ts = trial_seed(cfg.seed, m, k, trial);

  SpectralSignal sig;
  if (cfg.freqs.size() > 0) {
    Rng rng(mix64(ts ^ kCoeffSalt));
    sig = generate_signal(n, cfg.freqs, random_coefficients(k, rng));
  } else {
    sig = random_instance(n, k, resolved_separation(cfg, n), mix64(ts ^ kCoeffSalt));
  }
  const ObservationSet omega = sample_observation_set(n, m, mix64(ts ^ kOmegaSalt));
  const ProblemData data = make_problem_data(n, omega, observe(sig.samples, omega), k,
                                             cfg.solver.lambda, cfg.solver.mu_override);

  SolverConfig solver = cfg.solver;
  solver.seed = ts;
  IterationObserver observer;
  if (cfg.stop_on_success) {
    const double threshold = cfg.success_nmse;
    observer = [threshold](const TraceRow& row) { return row.nmse <= threshold; };
  }
  const SolveResult res = run(data, k, solver, &sig.samples, observer);

  TrialResult out;
  out.m = m;
  out.k = k;
  out.trial = trial;
  out.seed = ts;
  out.iterations = static_cast<int>(res.trace.rows.size());
  out.status = res.trace.status;
  if (res.trace.rows.empty()) {
    out.final_nmse = nmse(extract_signal(res.z, n), sig.samples);
    out.best_nmse = out.final_nmse;
    out.wall_ms = 0;
  } else {
    out.final_nmse = res.trace.rows.back().nmse;
    out.best_nmse = std::numeric_limits<double>::infinity();
    for (const TraceRow& row : res.trace.rows) out.best_nmse = std::min(out.best_nmse, row.nmse);
    out.wall_ms = res.trace.rows.back().wall_ms;
  }
  out.success = out.best_nmse <= cfg.success_nmse;
  return out;
}

// ---- config parsing ----------------------------------------------------

[[noreturn]] void bad_config(const std::string& what) { raise(ErrorCode::InvalidConfig, what); }

ExperimentKind kind_from_string(const std::string& s) {
  if (s == "convergence") return ExperimentKind::Convergence;
  if (s == "phase_transition" || s == "phase") return ExperimentKind::PhaseTransition;
  if (s == "timing") return ExperimentKind::Timing;
  if (s == "single_solve" || s == "solve") return ExperimentKind::SingleSolve;
  raise(ErrorCode::ParseError, "unknown experiment '" + s + "'");
}

int get_int(const json& j, const std::string& key) {
  if (!j.at(key).is_number_integer())
    bad_config("'" + key + "' must be an integer");
  return j.at(key).get<int>();
}

double get_number(const json& j, const std::string& key) {
  if (!j.at(key).is_number()) bad_config("'" + key + "' must be a number");
  return j.at(key).get<double>();
}

bool get_bool(const json& j, const std::string& key) {
  if (!j.at(key).is_boolean()) bad_config("'" + key + "' must be a boolean");
  return j.at(key).get<bool>();
}

std::string get_string(const json& j, const std::string& key) {
  if (!j.at(key).is_string()) bad_config("'" + key + "' must be a string");
  return j.at(key).get<std::string>();
}

std::vector<int> get_grid(const json& j, const std::string& key) {
  const json& v = j.at(key);
  std::vector<int> out;
  if (v.is_number_integer()) {
    out.push_back(v.get<int>());
  } else if (v.is_array() && !v.empty()) {
    for (const json& e : v) {
      if (!e.is_number_integer()) bad_config("'" + key + "' entries must be integers");
      out.push_back(e.get<int>());
    }
  } else {
    bad_config("'" + key + "' must be an integer or a nonempty integer array");
  }
  return out;
}

void parse_solver(const json& j, SolverConfig& solver) {
  static const std::set<std::string> allowed = {
      "max_iter",       "grad_tol", "safeguard_c", "rescale_safeguard",
      "armijo_C",       "lambda",   "mu_override", "max_backtracks"};
  if (!j.is_object()) bad_config("'solver' must be an object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) bad_config("unknown solver key '" + item.key() + "'");

  if (j.contains("max_iter")) solver.max_iter = get_int(j, "max_iter");
  if (j.contains("grad_tol")) solver.grad_tol = get_number(j, "grad_tol");
  if (j.contains("safeguard_c")) solver.safeguard_c = get_number(j, "safeguard_c");
  if (j.contains("rescale_safeguard")) solver.rescale_safeguard = get_bool(j, "rescale_safeguard");
  if (j.contains("armijo_C")) solver.armijo_c = get_number(j, "armijo_C");
  if (j.contains("lambda")) solver.lambda = get_number(j, "lambda");
  if (j.contains("mu_override") && !j.at("mu_override").is_null())
    solver.mu_override = get_number(j, "mu_override");
  if (j.contains("max_backtracks")) solver.max_backtracks = get_int(j, "max_backtracks");

  if (solver.max_iter < 0) bad_config("solver.max_iter must be >= 0");
  if (!(solver.grad_tol > 0)) bad_config("solver.grad_tol must be > 0");
  if (!(solver.safeguard_c > 0)) bad_config("solver.safeguard_c must be > 0");
  if (!(solver.armijo_c > 0 && solver.armijo_c < 1)) bad_config("solver.armijo_C must lie in (0, 1)");
  if (solver.lambda < 0) bad_config("solver.lambda must be >= 0");
  if (solver.max_backtracks < 0) bad_config("solver.max_backtracks must be >= 0");
}

const std::set<std::string>& allowed_keys(ExperimentKind kind) {
  static const std::set<std::string> convergence = {
      "experiment", "solver", "output_path", "seed",         "n",
      "m",          "k",      "freqs",       "min_separation", "success_nmse",
      "stop_on_success"};
  static const std::set<std::string> phase = {
      "experiment", "solver",         "output_path",  "seed",
      "n",          "m",              "k",            "trials",
      "min_separation", "success_nmse", "skip_infeasible", "stop_on_success"};
  static const std::set<std::string> timing = {
      "experiment", "solver", "output_path", "seed",          "n",
      "k",          "trials", "min_separation", "success_nmse", "stop_on_success"};
  static const std::set<std::string> single = {"experiment", "solver", "output_path",
                                               "seed", "input_path"};
  switch (kind) {
    case ExperimentKind::Convergence: return convergence;
    case ExperimentKind::PhaseTransition: return phase;
    case ExperimentKind::Timing: return timing;
    case ExperimentKind::SingleSolve: return single;
  }
  return single;
}

void validate_experiment(const ExperimentConfig& cfg) {
  const auto require_scalar = [](const std::vector<int>& grid, const char* name) {
    if (grid.size() != 1) bad_config(std::string(name) + " must be a single integer here");
  };
  if (!(cfg.success_nmse > 0)) bad_config("success_nmse must be > 0");
  if (cfg.trials < 1) bad_config("trials must be >= 1");

  switch (cfg.experiment) {
    case ExperimentKind::Convergence: {
      if (cfg.n_grid.empty() || cfg.m_grid.empty() || cfg.k_grid.empty())
        bad_config("convergence needs n, m and k");
      require_scalar(cfg.n_grid, "n");
      require_scalar(cfg.m_grid, "m");
      require_scalar(cfg.k_grid, "k");
      if (cfg.freqs.size() > 0 && cfg.freqs.size() != cfg.k_grid[0])
        bad_config("freqs length must equal k");
      break;
    }
    case ExperimentKind::PhaseTransition: {
      if (cfg.n_grid.empty() || cfg.m_grid.empty() || cfg.k_grid.empty())
        bad_config("phase_transition needs n plus m and k grids");
      require_scalar(cfg.n_grid, "n");
      break;
    }
    case ExperimentKind::Timing: {
      if (cfg.k_grid.size() != 1) bad_config("timing needs a single k");
      break;
    }
    case ExperimentKind::SingleSolve: {
      if (cfg.input_path.empty()) bad_config("single_solve needs input_path");
      break;
    }
  }
  for (int n : cfg.n_grid)
    if (n < 2) bad_config("n must be >= 2");
  for (int k : cfg.k_grid)
    if (k < 1) bad_config("k must be >= 1");
  if (cfg.experiment != ExperimentKind::Timing && cfg.experiment != ExperimentKind::SingleSolve) {
    const int n = cfg.n_grid.at(0);
    for (int m : cfg.m_grid)
      if (m < 1 || m > n) bad_config("m must lie in [1, n]");
  }
}

// ---- output assembly ----------------------------------------------------

std::string trials_summary(int total, int succeeded) {
  std::ostringstream out;
  out << succeeded << "/" << total << " trials reached the success threshold";
  return out.str();
}

}  // namespace

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Convergence: return "convergence";
    case ExperimentKind::PhaseTransition: return "phase_transition";
    case ExperimentKind::Timing: return "timing";
    case ExperimentKind::SingleSolve: return "single_solve";
  }
  return "unknown";
}

std::uint64_t trial_seed(std::uint64_t master, int m, int k, int trial) {
  std::uint64_t s = mix64(master ^ 0x9e3779b97f4a7c15ull);
  s = mix64(s ^ static_cast<std::uint64_t>(m));
  s = mix64(s ^ static_cast<std::uint64_t>(k));
  s = mix64(s ^ static_cast<std::uint64_t>(trial));
  return s;
}

ExperimentConfig config_from_json(const std::string& text, const std::string& kind_hint) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    raise(ErrorCode::ParseError, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) raise(ErrorCode::ParseError, "config must be a JSON object");

  ExperimentConfig cfg;
  std::string kind_text = kind_hint;
  if (j.contains("experiment")) {
    const std::string from_json = get_string(j, "experiment");
    if (!kind_hint.empty() && kind_from_string(from_json) != kind_from_string(kind_hint))
      bad_config("config experiment '" + from_json + "' conflicts with the subcommand");
    kind_text = from_json;
  }
  if (kind_text.empty())
    raise(ErrorCode::ParseError, "experiment kind missing (config key or subcommand)");
  cfg.experiment = kind_from_string(kind_text);

  const std::set<std::string>& allowed = allowed_keys(cfg.experiment);
  for (const auto& item : j.items())
    if (!allowed.count(item.key()))
      bad_config("unknown key '" + item.key() + "' for experiment " +
                 to_string(cfg.experiment));

  if (j.contains("n")) cfg.n_grid = get_grid(j, "n");
  if (j.contains("m")) cfg.m_grid = get_grid(j, "m");
  if (j.contains("k")) cfg.k_grid = get_grid(j, "k");
  if (j.contains("trials")) cfg.trials = get_int(j, "trials");
  if (j.contains("min_separation")) {
    cfg.min_separation = get_number(j, "min_separation");
    if (cfg.min_separation < 0) bad_config("min_separation must be >= 0");
  }
  if (j.contains("success_nmse")) cfg.success_nmse = get_number(j, "success_nmse");
  if (j.contains("seed")) {
    const json& s = j.at("seed");
    if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() && s.get<long long>() < 0))
      bad_config("'seed' must be a nonnegative integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  if (j.contains("freqs")) {
    const json& f = j.at("freqs");
    if (!f.is_array() || f.empty()) bad_config("'freqs' must be a nonempty array");
    cfg.freqs.resize(static_cast<int>(f.size()));
    for (int i = 0; i < cfg.freqs.size(); ++i) {
      if (!f[i].is_number()) bad_config("'freqs' entries must be numbers");
      cfg.freqs[i] = f[i].get<double>();
    }
  }
  if (j.contains("stop_on_success")) cfg.stop_on_success = get_bool(j, "stop_on_success");
  if (j.contains("skip_infeasible")) cfg.skip_infeasible = get_bool(j, "skip_infeasible");
  if (j.contains("solver")) parse_solver(j.at("solver"), cfg.solver);
  if (j.contains("output_path")) cfg.output_path = get_string(j, "output_path");
  if (j.contains("input_path")) cfg.input_path = get_string(j, "input_path");

  if (cfg.experiment == ExperimentKind::Timing) {
    if (cfg.n_grid.empty()) cfg.n_grid = {64, 256, 1024, 4096};
    if (cfg.k_grid.empty()) cfg.k_grid = {6};
  }
  validate_experiment(cfg);
  return cfg;
}

ExperimentOutcome run_convergence(const ExperimentConfig& cfg) {
  const int n = cfg.n_grid.at(0);
  const int m = cfg.m_grid.at(0);
  const int k = cfg.k_grid.at(0);

  const std::uint64_t ts = trial_seed(cfg.seed, m, k, 0);
  SpectralSignal sig;
  if (cfg.freqs.size() > 0) {
    Rng rng(mix64(ts ^ kCoeffSalt));
    sig = generate_signal(n, cfg.freqs, random_coefficients(k, rng));
  } else {
    sig = random_instance(n, k, resolved_separation(cfg, n), mix64(ts ^ kCoeffSalt));
  }
  const ObservationSet omega = sample_observation_set(n, m, mix64(ts ^ kOmegaSalt));
  const ProblemData data = make_problem_data(n, omega, observe(sig.samples, omega), k,
                                             cfg.solver.lambda, cfg.solver.mu_override);
  SolverConfig solver = cfg.solver;
  solver.seed = ts;
  IterationObserver observer;
  if (cfg.stop_on_success) {
    const double threshold = cfg.success_nmse;
    observer = [threshold](const TraceRow& row) { return row.nmse <= threshold; };
  }
  const SolveResult res = run(data, k, solver, &sig.samples, observer);

  std::string csv = "iter,nmse,hhat,grad_norm_sq\n";
  char buf[160];
  for (const TraceRow& row : res.trace.rows) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", row.iter, row.nmse, row.hhat,
                  row.grad_norm_sq);
    csv += buf;
  }
  write_text_file(cfg.output_path, csv, cfg.force);

  std::ostringstream msg;
  msg << "convergence: " << to_string(res.trace.status) << " after " << res.trace.rows.size()
      << " iterations, final nmse "
      << (res.trace.rows.empty() ? std::numeric_limits<double>::quiet_NaN()
                                 : res.trace.rows.back().nmse)
      << "; wrote " << cfg.output_path;
  return {0, msg.str()};
}

ExperimentOutcome run_phase_transition(const ExperimentConfig& cfg) {
  struct Cell {
    int m = 0, k = 0;
    bool skipped = false;
    std::vector<TrialResult> trials;
  };
  const int n = cfg.n_grid.at(0);
  std::vector<Cell> cells;
  for (int m : cfg.m_grid)
    for (int k : cfg.k_grid) {
      Cell cell;
      cell.m = m;
      cell.k = k;
      cell.skipped = cfg.skip_infeasible && 3 * k >= 2 * m;
      if (!cell.skipped) cell.trials.resize(cfg.trials);
      cells.push_back(std::move(cell));
    }

  struct Task {
    int cell = 0, trial = 0;
  };
  std::vector<Task> tasks;
  for (int c = 0; c < static_cast<int>(cells.size()); ++c)
    if (!cells[c].skipped)
      for (int t = 0; t < cfg.trials; ++t) tasks.push_back({c, t});

  parallel_for(static_cast<int>(tasks.size()), cfg.threads, [&](int i) {
    Cell& cell = cells[tasks[i].cell];
    cell.trials[tasks[i].trial] = execute_trial(cfg, n, cell.m, cell.k, tasks[i].trial);
  });

  std::string csv = "m,k,success_rate,mean_iters,skipped\n";
  int total = 0, succeeded = 0;
  for (const Cell& cell : cells) {
    double rate = 0, mean_iters = cfg.solver.max_iter;
    if (!cell.skipped) {
      double iter_sum = 0;
      int wins = 0;
      for (const TrialResult& tr : cell.trials) {
        iter_sum += tr.iterations;
        wins += tr.success ? 1 : 0;
      }
      rate = static_cast<double>(wins) / cfg.trials;
      mean_iters = iter_sum / cfg.trials;
      total += cfg.trials;
      succeeded += wins;
    }
    csv += std::to_string(cell.m) + "," + std::to_string(cell.k) + "," + fmt(rate) + "," +
           fmt(mean_iters) + "," + (cell.skipped ? "1" : "0") + "\n";
  }
  write_text_file(cfg.output_path, csv, cfg.force);

  std::ostringstream msg;
  msg << "phase_transition: " << cells.size() << " (m,k) cells, "
      << trials_summary(total, succeeded) << "; wrote " << cfg.output_path;
  return {0, msg.str()};
}

ExperimentOutcome run_timing(const ExperimentConfig& cfg) {
  const int k = cfg.k_grid.at(0);
  std::vector<std::vector<TrialResult>> cells(cfg.n_grid.size());
  for (auto& cell : cells) cell.resize(cfg.trials);

  struct Task {
    int cell = 0, trial = 0;
  };
  std::vector<Task> tasks;
  for (int c = 0; c < static_cast<int>(cells.size()); ++c)
    for (int t = 0; t < cfg.trials; ++t) tasks.push_back({c, t});

  parallel_for(static_cast<int>(tasks.size()), cfg.threads, [&](int i) {
    const int c = tasks[i].cell;
    const int n = cfg.n_grid[c];
    const int m = std::max(1, static_cast<int>(std::floor(0.8 * n)));
    cells[c][tasks[i].trial] = execute_trial(cfg, n, m, k, tasks[i].trial);
  });

  std::string csv = "n,mean_wall_ms_per_iter,iters,nmse\n";
  int total = 0, succeeded = 0;
  for (int c = 0; c < static_cast<int>(cells.size()); ++c) {
    double per_iter_sum = 0, iter_sum = 0, nmse_sum = 0;
    int used = 0;
    for (const TrialResult& tr : cells[c]) {
      ++total;
      if (!tr.success || tr.iterations == 0) continue;
      ++succeeded;
      ++used;
      per_iter_sum += tr.wall_ms / tr.iterations;
      iter_sum += tr.iterations;
      nmse_sum += tr.final_nmse;
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    csv += std::to_string(cfg.n_grid[c]) + "," +
           fmt(used ? per_iter_sum / used : nan) + "," + fmt(used ? iter_sum / used : nan) +
           "," + fmt(used ? nmse_sum / used : nan) + "\n";
  }
  write_text_file(cfg.output_path, csv, cfg.force);

  std::ostringstream msg;
  msg << "timing: " << cells.size() << " signal lengths, " << trials_summary(total, succeeded)
      << "; wrote " << cfg.output_path;
  return {0, msg.str()};
}

ExperimentOutcome run_single(const ExperimentConfig& cfg) {
  json j;
  try {
    j = json::parse(read_text_file(cfg.input_path));
  } catch (const json::exception& e) {
    raise(ErrorCode::ParseError, cfg.input_path + " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) raise(ErrorCode::ParseError, cfg.input_path + ": expected a JSON object");
  static const std::set<std::string> allowed = {"n", "omega", "observed", "k"};
  for (const auto& item : j.items())
    if (!allowed.count(item.key()))
      raise(ErrorCode::ParseError, cfg.input_path + ": unknown key '" + item.key() + "'");
  for (const char* key : {"n", "omega", "observed", "k"})
    if (!j.contains(key))
      raise(ErrorCode::ParseError, cfg.input_path + ": missing key '" + std::string(key) + "'");

  const int n = get_int(j, "n");
  const int k = get_int(j, "k");
  if (n < 2) bad_config("n must be >= 2");
  if (k < 1) bad_config("k must be >= 1");
  // The lift is sized by the signal itself; a rank that would force extra
  // padding cannot be recovered from these samples.
  if (k >= dims_for(n, 1).p)
    raise(ErrorCode::SparsityTooLarge, "k = " + std::to_string(k) +
                                           " is too large for n = " + std::to_string(n));

  const json& jo = j.at("omega");
  if (!jo.is_array() || jo.empty())
    raise(ErrorCode::ParseError, cfg.input_path + ": 'omega' must be a nonempty array");
  std::vector<int> indices;
  for (const json& e : jo) {
    if (!e.is_number_integer())
      raise(ErrorCode::ParseError, cfg.input_path + ": 'omega' entries must be integers");
    indices.push_back(e.get<int>());
  }
  const ObservationSet omega = make_observation_set(n, std::move(indices));

  const json& jv = j.at("observed");
  if (!jv.is_array() || jv.size() != static_cast<std::size_t>(omega.m()))
    raise(ErrorCode::ParseError,
          cfg.input_path + ": 'observed' must be an array of [re, im] pairs, one per omega entry");
  VectorXcd observed(omega.m());
  for (int i = 0; i < omega.m(); ++i) {
    const json& e = jv[i];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      raise(ErrorCode::ParseError, cfg.input_path + ": 'observed' entries must be [re, im]");
    observed[i] = Complex(e[0].get<double>(), e[1].get<double>());
  }

  const ProblemData data =
      make_problem_data(n, omega, std::move(observed), k, cfg.solver.lambda, cfg.solver.mu_override);
  SolverConfig solver = cfg.solver;
  solver.seed = cfg.seed;
  const SolveResult res = run(data, k, solver);

  const VectorXcd recovered = extract_signal(res.z, n);
  json out = json::array();
  for (int i = 0; i < n; ++i) out.push_back({recovered[i].real(), recovered[i].imag()});
  const std::string trace_path = cfg.output_path + ".trace.csv";
  write_text_file(cfg.output_path, out.dump() + "\n", cfg.force);
  write_text_file(trace_path, trace_to_csv(res.trace), cfg.force);

  std::ostringstream msg;
  msg << "single_solve: " << to_string(res.trace.status) << " after " << res.trace.rows.size()
      << " iterations; wrote " << cfg.output_path << " and " << trace_path;
  return {static_cast<int>(res.trace.status), msg.str()};
}

ExperimentOutcome run_experiment_json(const std::string& kind_hint,
                                      const std::string& config_json,
                                      const std::string& out_override, bool force,
                                      int threads) {
  try {
    ExperimentConfig cfg = config_from_json(config_json, kind_hint);
    if (!out_override.empty()) cfg.output_path = out_override;
    cfg.force = force;
    if (threads > 0) cfg.threads = threads;
    if (cfg.output_path.empty())
      bad_config("no output path (set output_path in the config or pass --out)");
    switch (cfg.experiment) {
      case ExperimentKind::Convergence: return run_convergence(cfg);
      case ExperimentKind::PhaseTransition: return run_phase_transition(cfg);
      case ExperimentKind::Timing: return run_timing(cfg);
      case ExperimentKind::SingleSolve: return run_single(cfg);
    }
    bad_config("unhandled experiment kind");
  } catch (const Error& e) {
    return {1, e.what()};
  } catch (const std::exception& e) {
    return {1, std::string("error: ") + e.what()};
  }
}

}  // namespace stht
