#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>

#include <Eigen/Eigenvalues>

#include "spectralht/errors.hpp"
#include "spectralht/solver.hpp"

namespace stht {

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

void append_csv_row(std::string& out, const TraceRow& r, bool with_nmse) {
  char buf[384];
  if (with_nmse) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d,%.17g,%.17g\n",
                  r.iter, r.h, r.hhat, r.grad_norm_sq, r.alpha, r.beta, r.backtracks,
                  r.safeguard_used ? 1 : 0, r.nmse, r.wall_ms);
  } else {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d,%.17g\n", r.iter,
                  r.h, r.hhat, r.grad_norm_sq, r.alpha, r.beta, r.backtracks,
                  r.safeguard_used ? 1 : 0, r.wall_ms);
  }
  out += buf;
}

void validate_config(const SolverConfig& cfg) {
  if (cfg.max_iter < 0) raise(ErrorCode::InvalidConfig, "max_iter must be >= 0");
  if (!(cfg.grad_tol > 0)) raise(ErrorCode::InvalidConfig, "grad_tol must be > 0");
  if (!(cfg.safeguard_c > 0)) raise(ErrorCode::InvalidConfig, "safeguard_c must be > 0");
  if (!(cfg.armijo_c > 0 && cfg.armijo_c < 1))
    raise(ErrorCode::InvalidConfig, "armijo_C must lie in (0, 1)");
  if (cfg.max_backtracks < 0) raise(ErrorCode::InvalidConfig, "max_backtracks must be >= 0");
}

/// Backtracking core shared by armijo_search and run. base_hhat is the value
/// the sufficient-decrease test subtracts from; run passes the value it
/// recorded for the current iterate so the accepted inequality is exactly the
/// monotonicity the trace promises.
ArmijoResult armijo_impl(const ProblemData& data, const FactorPoint& z,
                         const HorizontalTangent& xi, const LineSearchPoly& poly,
                         const PinvRay& ray, double slope, double alpha0, double base_hhat,
                         const SolverConfig& cfg) {
  const double z_fro = z.z().squaredNorm();
  const double cross = xi.xi().cwiseProduct(z.z().conjugate()).sum().real();
  const double xi_fro = xi.xi().squaredNorm();

  ArmijoResult out;
  double alpha = alpha0;
  for (int q = 0; q <= cfg.max_backtracks; ++q, alpha *= 0.5) {
    double trial;
    try {
      // Rank of the trial point is checked even when lambda == 0: degenerate
      // points are outside the manifold and count as failed trials.
      const double pinv_sq = ray.norm_sq(alpha);
      trial = poly.eval(alpha);
      if (data.lambda > 0) {
        const double fro_sq = z_fro + 2 * alpha * cross + alpha * alpha * xi_fro;
        trial += data.lambda * 0.5 * (fro_sq + pinv_sq);
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::RankDeficient) throw;
      continue;
    }
    if (base_hhat - trial >= -cfg.armijo_c * alpha * slope) {
      try {
        FactorPoint next = retract(z, xi, alpha);
        out.h_next = poly.eval(alpha);
        out.hhat_next =
            out.h_next + (data.lambda > 0 ? data.lambda * eval_psi(next) : 0.0);
        out.z_next = std::move(next);
        out.accepted = true;
        out.alpha = alpha;
        out.backtracks = q;
        return out;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::RankDeficient) throw;
        continue;
      }
    }
  }
  return out;
}

}  // namespace

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::GradToleranceMet: return "GradToleranceMet";
    case SolveStatus::MaxIterations: return "MaxIterations";
    case SolveStatus::LineSearchStalled: return "LineSearchStalled";
    case SolveStatus::StoppedByObserver: return "StoppedByObserver";
  }
  return "Unknown";
}

std::string trace_to_csv(const SolverTrace& trace) {
  std::string out = trace.has_nmse
                        ? "iter,h,hhat,grad_norm_sq,alpha,beta,backtracks,safeguard,"
                          "nmse,wall_ms\n"
                        : "iter,h,hhat,grad_norm_sq,alpha,beta,backtracks,safeguard,"
                          "wall_ms\n";
  for (const TraceRow& r : trace.rows) append_csv_row(out, r, trace.has_nmse);
  return out;
}

CgResult conjugate_direction(const FactorPoint& base, const HorizontalTangent& grad,
                             const CgHistory& history, const SolverConfig& cfg) {
  if (grad.base_id() != base.id())
    raise(ErrorCode::BaseMismatch, "gradient was lifted at a different point");

  if (history.prev_grad == nullptr || history.prev_dir == nullptr)
    return {HorizontalTangent(-grad.xi(), base), 0.0, false};

  // Polak-Ribiere with projection transport; the denominator is the gradient
  // norm measured at its own (previous) base.
  const HorizontalTangent prev_grad_here = project_horizontal(base, *history.prev_grad);
  double beta = 0.0;
  if (history.prev_grad_norm_sq > 0)
    beta = metric(base, grad.xi(), grad.xi() - prev_grad_here.xi()) /
           history.prev_grad_norm_sq;

  const HorizontalTangent prev_dir_here = project_horizontal(base, *history.prev_dir);
  MatrixXcd eta = -grad.xi() + beta * prev_dir_here.xi();

  double threshold = cfg.safeguard_c;
  if (cfg.rescale_safeguard) threshold *= metric(base, grad.xi(), grad.xi());
  if (-metric(base, eta, grad.xi()) > threshold)
    return {HorizontalTangent(std::move(eta), base), beta, false};
  return {HorizontalTangent(-grad.xi(), base), beta, true};
}

double initial_step(const LineSearchPoly& poly, double fallback) {
  const std::array<double, 4> d = poly.derivative();
  double coeff_max = 0;
  for (double c : d) {
    if (!std::isfinite(c)) return fallback;
    coeff_max = std::max(coeff_max, std::abs(c));
  }
  if (coeff_max == 0) return fallback;
  const double degenerate = 1e-14 * coeff_max;

  double best = std::numeric_limits<double>::infinity();
  const auto consider = [&](double re, double im) {
    if (std::abs(im) <= 1e-10 * (1 + std::abs(re)) && re > 0 && re < best) best = re;
  };

  if (std::abs(d[3]) > degenerate) {
    Eigen::Matrix3d companion = Eigen::Matrix3d::Zero();
    companion(1, 0) = 1;
    companion(2, 1) = 1;
    companion(0, 2) = -d[0] / d[3];
    companion(1, 2) = -d[1] / d[3];
    companion(2, 2) = -d[2] / d[3];
    Eigen::EigenSolver<Eigen::Matrix3d> roots(companion, /*computeEigenvectors=*/false);
    for (int i = 0; i < 3; ++i)
      consider(roots.eigenvalues()[i].real(), roots.eigenvalues()[i].imag());
  } else if (std::abs(d[2]) > degenerate) {
    const double disc = d[1] * d[1] - 4 * d[2] * d[0];
    if (disc >= 0) {
      const double sq = std::sqrt(disc);
      consider((-d[1] + sq) / (2 * d[2]), 0);
      consider((-d[1] - sq) / (2 * d[2]), 0);
    }
  } else if (std::abs(d[1]) > degenerate) {
    consider(-d[0] / d[1], 0);
  }
  return std::isfinite(best) ? best : fallback;
}

ArmijoResult armijo_search(const ProblemData& data, const FactorPoint& z,
                           const HorizontalTangent& xi, const HorizontalTangent& grad,
                           double alpha0, const SolverConfig& cfg) {
  if (xi.base_id() != z.id() || grad.base_id() != z.id())
    raise(ErrorCode::BaseMismatch, "line search tangents must live at z");
  const double slope = metric(z, grad, xi);
  if (!(slope < 0))
    raise(ErrorCode::InvalidConfig, "line search requires a descent direction");

  const LineSearchPoly poly = line_search_poly(data, z, xi.xi());
  const PinvRay ray(z, xi.xi());
  const double base_hhat =
      poly.eval(0.0) + (data.lambda > 0 ? data.lambda * eval_psi(z) : 0.0);
  return armijo_impl(data, z, xi, poly, ray, slope, alpha0, base_hhat, cfg);
}

SolveResult run(const ProblemData& data, int k, const SolverConfig& cfg,
                const VectorXcd* truth, const IterationObserver& observer,
                const FactorPoint* initial) {
  validate_config(cfg);
  if (truth != nullptr && truth->size() != data.n)
    raise(ErrorCode::DimensionMismatch, "truth length must equal the signal length");

  FactorPoint z = initial != nullptr ? *initial : initialize(data, k, cfg.seed);
  if (z.p() != data.dims.p || z.k() != k)
    raise(ErrorCode::DimensionMismatch, "initial point does not match the problem shape");

  SolverTrace trace;
  trace.has_nmse = truth != nullptr;
  trace.status = SolveStatus::MaxIterations;

  const auto t0 = std::chrono::steady_clock::now();

  double hhat_cur = eval_h(data, z) + (data.lambda > 0 ? data.lambda * eval_psi(z) : 0.0);
  HorizontalTangent grad = riemannian_gradient(data, z);
  double grad_norm_sq = metric(z, grad, grad);

  MatrixXcd prev_grad, prev_dir;
  double prev_grad_norm_sq = 0;
  bool have_history = false;
  double prev_alpha = 1.0;

  for (int t = 1; t <= cfg.max_iter; ++t) {
    if (grad_norm_sq < cfg.grad_tol) {
      trace.status = SolveStatus::GradToleranceMet;
      break;
    }

    CgHistory history;
    if (have_history) {
      history.prev_grad = &prev_grad;
      history.prev_dir = &prev_dir;
      history.prev_grad_norm_sq = prev_grad_norm_sq;
    }
    const CgResult cg = conjugate_direction(z, grad, history, cfg);

    const LineSearchPoly poly = line_search_poly(data, z, cg.direction.xi());
    const PinvRay ray(z, cg.direction.xi());
    const double slope = metric(z, grad, cg.direction);
    const double alpha0 = initial_step(poly, prev_alpha);
    ArmijoResult step =
        armijo_impl(data, z, cg.direction, poly, ray, slope, alpha0, hhat_cur, cfg);
    if (!step.accepted) {
      trace.status = SolveStatus::LineSearchStalled;
      break;
    }

    prev_grad = grad.xi();
    prev_dir = cg.direction.xi();
    prev_grad_norm_sq = grad_norm_sq;
    have_history = true;
    prev_alpha = step.alpha;

    z = std::move(*step.z_next);
    hhat_cur = step.hhat_next;
    grad = riemannian_gradient(data, z);
    grad_norm_sq = metric(z, grad, grad);

    TraceRow row;
    row.iter = t;
    row.h = step.h_next;
    row.hhat = hhat_cur;
    row.grad_norm_sq = grad_norm_sq;
    row.alpha = step.alpha;
    row.beta = cg.beta;
    row.backtracks = step.backtracks;
    row.safeguard_used = cg.safeguard_used;
    row.nmse = std::numeric_limits<double>::quiet_NaN();
    if (truth != nullptr) row.nmse = nmse(extract_signal(z, data.n), *truth);
    row.wall_ms = elapsed_ms(t0);
    trace.rows.push_back(row);

    if (observer && observer(row)) {
      trace.status = SolveStatus::StoppedByObserver;
      break;
    }
  }

  // The loop-top check never sees the final gradient when the cap is hit; an
  // already-converged last iterate still reports success.
  if (trace.status == SolveStatus::MaxIterations && grad_norm_sq < cfg.grad_tol)
    trace.status = SolveStatus::GradToleranceMet;

  return {std::move(z), std::move(trace)};
}

VectorXcd extract_signal(const FactorPoint& z, int n) {
  const int p = z.p();
  const int len = 2 * p - 1;
  if (n < 1 || n > len)
    raise(ErrorCode::DimensionMismatch, "signal length must lie in [1, 2p-1]");

  VectorXcd diag_sums = VectorXcd::Zero(len);
  for (int j = 0; j < z.k(); ++j)
    diag_sums += fast_hankel_gram(z.z().col(j), z.z().col(j));
  const GramWeights weights = gram_weights(p);
  return (diag_sums.array() / weights.d_squared.array()).matrix().head(n);
}

}  // namespace stht
