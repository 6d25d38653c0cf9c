#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spectralht/objective.hpp"

namespace stht {

/// Terminal states of run(). Values match the CLI exit codes.
enum class SolveStatus {
  GradToleranceMet = 0,
  MaxIterations = 2,
  LineSearchStalled = 3,
  StoppedByObserver = 4,
};

const char* to_string(SolveStatus status);

struct SolverConfig {
  int max_iter = 3000;
  double grad_tol = 1e-6;        // on the squared gradient norm g(grad, grad)
  double safeguard_c = 1e-8;     // descent safeguard threshold
  bool rescale_safeguard = false;  // scale the threshold by g(grad, grad)
  double armijo_c = 1e-5;        // sufficient-decrease constant
  double lambda = 1e-8;          // spectral barrier weight (used when building data)
  double mu_override = -1.0;     // <= 0 selects mu = m/n
  int max_backtracks = 60;
  std::uint64_t seed = 0;        // initialization tie-break perturbation only
};

/// One completed iteration. h/hhat/grad_norm_sq/nmse describe the new iterate;
/// alpha/beta/backtracks/safeguard_used describe the step that reached it.
/// wall_ms is elapsed time since the loop started (excluded from the
/// determinism contract). nmse is NaN when no ground truth was supplied.
struct TraceRow {
  int iter = 0;
  double h = 0, hhat = 0, grad_norm_sq = 0, alpha = 0, beta = 0;
  int backtracks = 0;
  bool safeguard_used = false;
  double nmse = 0;
  double wall_ms = 0;
};

struct SolverTrace {
  std::vector<TraceRow> rows;
  SolveStatus status = SolveStatus::MaxIterations;
  bool has_nmse = false;
};

/// Canonical CSV rendering of a trace. The nmse column is present only when
/// the trace carries it. Numeric fields use %.17g so reruns are byte-stable.
std::string trace_to_csv(const SolverTrace& trace);

/// Takagi factorization A = U diag(sigma) U^T of a complex symmetric matrix;
/// U unitary, sigma nonneg nonincreasing. Built on an SVD with a per-cluster
/// unitary rotation (clusters = singular values within 1e-8 relative gap).
/// NotSymmetric if ||A - A^T|| exceeds 1e-12 ||A||.
struct TakagiResult {
  MatrixXcd u;
  VectorXd sigma;
};

TakagiResult takagi(const MatrixXcd& a);

/// Spectral initialization: Z0 = U sqrt(Sigma) from the rank-k Takagi
/// factorization of the rescaled partial Hankel lift (m/n) H(P*(observed)).
/// Dense SVD for p <= 512, seeded randomized subspace iteration above.
/// A vanishing singular value triggers a 1e-12-scaled random perturbation.
FactorPoint initialize(const ProblemData& data, int k, std::uint64_t seed = 0);

/// Conjugate direction with Polak-Ribiere beta and transported history. When
/// the history is empty the direction is -grad with beta = 0. The safeguard
/// falls back to -grad (flag set) unless g(direction, -grad) > c.
struct CgHistory {
  const MatrixXcd* prev_grad = nullptr;     // gradient at the previous iterate
  const MatrixXcd* prev_dir = nullptr;      // accepted direction there
  double prev_grad_norm_sq = 0;             // g(prev_grad, prev_grad) at its own base
};

struct CgResult {
  HorizontalTangent direction;
  double beta = 0;
  bool safeguard_used = false;
};

CgResult conjugate_direction(const FactorPoint& base, const HorizontalTangent& grad,
                             const CgHistory& history, const SolverConfig& cfg);

/// Smallest strictly positive real root of phi'(alpha); fallback when none
/// exists. Roots with |imag| > 1e-10 (1 + |real|) are discarded.
double initial_step(const LineSearchPoly& poly, double fallback);

struct ArmijoResult {
  bool accepted = false;
  std::optional<FactorPoint> z_next;
  double alpha = 0;
  int backtracks = 0;
  double h_next = 0;
  double hhat_next = 0;
};

/// Backtracking line search on hhat from alpha0, halving up to
/// cfg.max_backtracks times. Rank-deficient trial points count as failures
/// (their hhat is +infinity). accepted == false signals a stall.
ArmijoResult armijo_search(const ProblemData& data, const FactorPoint& z,
                           const HorizontalTangent& xi, const HorizontalTangent& grad,
                           double alpha0, const SolverConfig& cfg);

/// Called after every completed iteration; return true to stop (terminal
/// status StoppedByObserver). The library itself never stops on NMSE.
using IterationObserver = std::function<bool(const TraceRow&)>;

struct SolveResult {
  FactorPoint z;
  SolverTrace trace;
};

/// Full conjugate-gradient descent. truth (length data.n) enables the nmse
/// trace column. initial overrides the spectral initialization (used for
/// orbit-invariance checks). On LineSearchStalled the best iterate so far is
/// returned; hhat decreases monotonically along the trace.
SolveResult run(const ProblemData& data, int k, const SolverConfig& cfg,
                const VectorXcd* truth = nullptr, const IterationObserver& observer = {},
                const FactorPoint* initial = nullptr);

/// Diagonal-rescaled signal readout D^-2 H*(Z Z^T) truncated to length n.
VectorXcd extract_signal(const FactorPoint& z, int n);

}  // namespace stht
