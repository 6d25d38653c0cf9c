#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spectralht/solver.hpp"

namespace stht {

enum class ExperimentKind { Convergence, PhaseTransition, Timing, SingleSolve };

const char* to_string(ExperimentKind kind);

/// Settings for one experiment run. JSON configs mirror the field names; n,
/// m and k accept either a scalar or an array where a grid makes sense.
/// min_separation -1 selects the default 1/n whenever frequencies are drawn
/// at random.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Convergence;
  std::vector<int> n_grid;
  std::vector<int> m_grid;
  std::vector<int> k_grid;
  int trials = 1;
  double min_separation = -1.0;
  double success_nmse = 1e-6;
  std::uint64_t seed = 0;
  VectorXd freqs;               // fixed frequencies; empty draws them per trial
  bool stop_on_success = false; // end a run once NMSE reaches success_nmse
  bool skip_infeasible = true;  // phase transition: mark k >= 2m/3 pairs, skip runs
  SolverConfig solver;
  std::string output_path;
  std::string input_path;       // single_solve only
  int threads = 0;              // 0 = hardware concurrency
  bool force = false;           // overwrite existing outputs
};

/// Parse and validate a JSON config. kind_hint (from the CLI subcommand) may
/// supply the experiment when the JSON omits it; a conflict is an error.
/// Unknown keys are rejected so typos cannot silently change an experiment.
ExperimentConfig config_from_json(const std::string& text, const std::string& kind_hint = "");

/// Trial seeds are a pure function of (master seed, m, k, trial index) so any
/// single trial can be reproduced in isolation:
///   s = mix64(master ^ 0x9e3779b97f4a7c15); then for v in {m, k, trial}:
///   s = mix64(s ^ v).
std::uint64_t trial_seed(std::uint64_t master, int m, int k, int trial);

/// One solver run inside an experiment.
struct TrialResult {
  int m = 0;
  int k = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  bool success = false;   // best_nmse <= success_nmse
  double best_nmse = 0;
  double final_nmse = 0;
  int iterations = 0;
  double wall_ms = 0;
  SolveStatus status = SolveStatus::MaxIterations;
};

struct ExperimentOutcome {
  int exit_code = 0;
  std::string message;
};

/// Single fixed-or-random instance, full per-iteration trace:
/// iter,nmse,hhat,grad_norm_sq.
ExperimentOutcome run_convergence(const ExperimentConfig& cfg);

/// Success-rate grid over (m, k): m,k,success_rate,mean_iters,skipped.
/// Infeasible pairs (k >= 2m/3) are marked with success rate 0 and the
/// iteration cap instead of being run.
ExperimentOutcome run_phase_transition(const ExperimentConfig& cfg);

/// Per-n mean wall time per iteration over successful trials, m = floor(0.8 n):
/// n,mean_wall_ms_per_iter,iters,nmse.
ExperimentOutcome run_timing(const ExperimentConfig& cfg);

/// Solve one observed instance from a JSON file; writes the recovered signal
/// as JSON plus <output>.trace.csv. Exit code is the terminal status value.
ExperimentOutcome run_single(const ExperimentConfig& cfg);

/// Parse, apply CLI overrides and dispatch. Never throws: failures come back
/// as exit code 1 with the error message.
ExperimentOutcome run_experiment_json(const std::string& kind_hint,
                                      const std::string& config_json,
                                      const std::string& out_override, bool force,
                                      int threads);

}  // namespace stht
