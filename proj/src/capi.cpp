#include "spectral_ht.h"

#include <cstdlib>
#include <cstring>
#include <limits>
#include <string>

#include "spectralht/errors.hpp"
#include "spectralht/harness.hpp"

namespace {

thread_local std::string g_last_error;
thread_local int g_last_code = STHT_ERR_NONE;

int map_code(stht::ErrorCode code) {
  using stht::ErrorCode;
  switch (code) {
    case ErrorCode::DimensionMismatch: return STHT_ERR_DIMENSION_MISMATCH;
    case ErrorCode::BadIndex: return STHT_ERR_BAD_INDEX;
    case ErrorCode::DuplicateFrequency: return STHT_ERR_DUPLICATE_FREQUENCY;
    case ErrorCode::ZeroCoefficient: return STHT_ERR_ZERO_COEFFICIENT;
    case ErrorCode::SeparationInfeasible: return STHT_ERR_SEPARATION_INFEASIBLE;
    case ErrorCode::ZeroReference: return STHT_ERR_ZERO_REFERENCE;
    case ErrorCode::SparsityTooLarge: return STHT_ERR_SPARSITY_TOO_LARGE;
    case ErrorCode::RankDeficient: return STHT_ERR_RANK_DEFICIENT;
    case ErrorCode::NotOrthogonal: return STHT_ERR_NOT_ORTHOGONAL;
    case ErrorCode::NotSymmetric: return STHT_ERR_NOT_SYMMETRIC;
    case ErrorCode::BaseMismatch: return STHT_ERR_BASE_MISMATCH;
    case ErrorCode::InvalidConfig: return STHT_ERR_INVALID_CONFIG;
    case ErrorCode::ParseError: return STHT_ERR_PARSE;
    case ErrorCode::IoError: return STHT_ERR_IO;
  }
  return STHT_ERR_UNKNOWN;
}

void clear_error() {
  g_last_error.clear();
  g_last_code = STHT_ERR_NONE;
}

void set_error(int code, const std::string& message) {
  g_last_code = code;
  g_last_error = message;
}

char* copy_to_c_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

struct stht_result {
  stht::SolverTrace trace;
  stht::VectorXcd signal;
  double best_nmse = std::numeric_limits<double>::quiet_NaN();
};

void stht_solver_config_init(stht_solver_config* cfg) {
  if (cfg == nullptr) return;
  const stht::SolverConfig defaults;
  cfg->max_iter = defaults.max_iter;
  cfg->grad_tol = defaults.grad_tol;
  cfg->safeguard_c = defaults.safeguard_c;
  cfg->rescale_safeguard = defaults.rescale_safeguard ? 1 : 0;
  cfg->armijo_c = defaults.armijo_c;
  cfg->lambda = defaults.lambda;
  cfg->mu_override = defaults.mu_override;
  cfg->max_backtracks = defaults.max_backtracks;
  cfg->seed = defaults.seed;
}

stht_result* stht_solve(int n, const int* omega, int m, const double* observed, int k,
                        const stht_solver_config* cfg, const double* truth) {
  clear_error();
  try {
    if (omega == nullptr || observed == nullptr)
      stht::raise(stht::ErrorCode::InvalidConfig, "omega and observed must be non-null");

    stht::SolverConfig solver;
    if (cfg != nullptr) {
      solver.max_iter = cfg->max_iter;
      solver.grad_tol = cfg->grad_tol;
      solver.safeguard_c = cfg->safeguard_c;
      solver.rescale_safeguard = cfg->rescale_safeguard != 0;
      solver.armijo_c = cfg->armijo_c;
      solver.lambda = cfg->lambda;
      solver.mu_override = cfg->mu_override;
      solver.max_backtracks = cfg->max_backtracks;
      solver.seed = cfg->seed;
    }

    const stht::ObservationSet obs_set =
        stht::make_observation_set(n, std::vector<int>(omega, omega + (m > 0 ? m : 0)));
    stht::VectorXcd samples(obs_set.m());
    for (int i = 0; i < obs_set.m(); ++i)
      samples[i] = stht::Complex(observed[2 * i], observed[2 * i + 1]);

    stht::VectorXcd truth_vec;
    if (truth != nullptr) {
      truth_vec.resize(n);
      for (int i = 0; i < n; ++i)
        truth_vec[i] = stht::Complex(truth[2 * i], truth[2 * i + 1]);
    }

    const stht::ProblemData data = stht::make_problem_data(
        n, obs_set, std::move(samples), k, solver.lambda, solver.mu_override);
    const stht::SolveResult solved =
        stht::run(data, k, solver, truth != nullptr ? &truth_vec : nullptr);

    auto* result = new stht_result;
    result->trace = solved.trace;
    result->signal = stht::extract_signal(solved.z, n);
    if (result->trace.has_nmse) {
      for (const stht::TraceRow& row : result->trace.rows)
        if (!(row.nmse >= result->best_nmse)) result->best_nmse = row.nmse;
    }
    return result;
  } catch (const stht::Error& e) {
    set_error(map_code(e.code()), e.what());
  } catch (const std::exception& e) {
    set_error(STHT_ERR_UNKNOWN, e.what());
  }
  return nullptr;
}

int stht_result_status(const stht_result* result) {
  return result == nullptr ? STHT_STATUS_MAX_ITERATIONS
                           : static_cast<int>(result->trace.status);
}

int stht_result_iterations(const stht_result* result) {
  return result == nullptr ? 0 : static_cast<int>(result->trace.rows.size());
}

int stht_result_signal_len(const stht_result* result) {
  return result == nullptr ? 0 : static_cast<int>(result->signal.size());
}

void stht_result_signal(const stht_result* result, double* out) {
  if (result == nullptr || out == nullptr) return;
  for (int i = 0; i < result->signal.size(); ++i) {
    out[2 * i] = result->signal[i].real();
    out[2 * i + 1] = result->signal[i].imag();
  }
}

double stht_result_final_nmse(const stht_result* result) {
  if (result == nullptr || !result->trace.has_nmse || result->trace.rows.empty())
    return std::numeric_limits<double>::quiet_NaN();
  return result->trace.rows.back().nmse;
}

double stht_result_best_nmse(const stht_result* result) {
  return result == nullptr ? std::numeric_limits<double>::quiet_NaN() : result->best_nmse;
}

char* stht_result_trace_csv(const stht_result* result) {
  if (result == nullptr) return nullptr;
  return copy_to_c_string(stht::trace_to_csv(result->trace));
}

void stht_result_free(stht_result* result) { delete result; }

int stht_run_experiment(const char* kind, const char* config_json,
                        const char* out_override, int force, int threads,
                        char** message_out) {
  clear_error();
  if (message_out != nullptr) *message_out = nullptr;
  if (config_json == nullptr) {
    set_error(STHT_ERR_INVALID_CONFIG, "config_json must be non-null");
    if (message_out != nullptr) *message_out = copy_to_c_string(g_last_error);
    return 1;
  }
  const stht::ExperimentOutcome outcome = stht::run_experiment_json(
      kind != nullptr ? kind : "", config_json,
      out_override != nullptr ? out_override : "", force != 0, threads);
  if (outcome.exit_code == 1) set_error(STHT_ERR_INVALID_CONFIG, outcome.message);
  if (message_out != nullptr) *message_out = copy_to_c_string(outcome.message);
  return outcome.exit_code;
}

unsigned long long stht_trial_seed(unsigned long long master, int m, int k, int trial) {
  return stht::trial_seed(master, m, k, trial);
}

const char* stht_last_error(void) { return g_last_error.c_str(); }

int stht_last_error_code(void) { return g_last_code; }

void stht_string_free(char* s) { std::free(s); }

}  // extern "C"
