#include "spectralht/objective.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "spectralht/errors.hpp"
#include "spectralht/fft.hpp"

namespace stht {

namespace {

// Frequency-domain accumulation of the structured Gram vectors of one or two
// factors. All products of the form sum_k conv(a_k, b_k) share the forward
// transforms of the factor columns, so a full set costs O(k) FFTs.
struct ColumnSpectra {
  MatrixXcd fwd;       // FFT of each column
  MatrixXcd rev_conj;  // FFT of each column reversed and conjugated

  ColumnSpectra(const MatrixXcd& z, FftPlan& plan) {
    const int p = static_cast<int>(z.rows());
    const int k = static_cast<int>(z.cols());
    fwd.resize(plan.size(), k);
    rev_conj.resize(plan.size(), k);
    VectorXcd buf;
    for (int c = 0; c < k; ++c) {
      plan.forward(z.col(c).data(), p, buf);
      fwd.col(c) = buf;
      const VectorXcd rc = z.col(c).reverse().conjugate();
      plan.forward(rc.data(), p, buf);
      rev_conj.col(c) = buf;
    }
  }
};

VectorXcd accumulate_product(const MatrixXcd& fa, const MatrixXcd& fb, FftPlan& plan, int len) {
  VectorXcd acc = VectorXcd::Zero(plan.size());
  for (int c = 0; c < fa.cols(); ++c) acc += fa.col(c).cwiseProduct(fb.col(c));
  VectorXcd full;
  plan.inverse(acc, full);
  return full.head(len);
}

// sum_m Re(conj(a[m]) b[m]) / d^2[m]
double weighted_inner(const VectorXcd& a, const VectorXcd& b, const VectorXd& d_squared) {
  return (a.conjugate().cwiseProduct(b).real().cwiseQuotient(d_squared)).sum();
}

// tr(X conj(Y)) and tr(X Y) for k x k blocks.
Complex trace_conj(const MatrixXcd& x, const MatrixXcd& y) {
  return x.cwiseProduct(y.adjoint()).sum();
}
Complex trace_plain(const MatrixXcd& x, const MatrixXcd& y) {
  return x.cwiseProduct(y.transpose()).sum();
}

// Residual of the weighted data fit on omega given H*(Z Z^T).
VectorXcd omega_residual(const ProblemData& data, const VectorXcd& h_zz) {
  VectorXcd r(data.omega.m());
  for (int i = 0; i < data.omega.m(); ++i) {
    const int idx = data.omega.indices[i] - 1;
    r[i] = h_zz[idx] / data.weights.d[idx] - data.weighted_obs[i];
  }
  return r;
}

// P_omega(D^-1 H*(M)) for a Gram vector of H*(M); no residual subtraction.
VectorXcd omega_scaled(const ProblemData& data, const VectorXcd& gram) {
  VectorXcd r(data.omega.m());
  for (int i = 0; i < data.omega.m(); ++i) {
    const int idx = data.omega.indices[i] - 1;
    r[i] = gram[idx] / data.weights.d[idx];
  }
  return r;
}

void require_problem_shape(const ProblemData& data, const FactorPoint& z) {
  if (z.p() != data.dims.p)
    raise(ErrorCode::DimensionMismatch, "factor row count != problem dimension p");
}

}  // namespace

ProblemData make_problem_data(int n, ObservationSet omega, VectorXcd observed, int k,
                              double lambda, double mu_override) {
  if (omega.n != n) raise(ErrorCode::DimensionMismatch, "observation set is for a different n");
  if (observed.size() != omega.m())
    raise(ErrorCode::DimensionMismatch, "observed value count != |omega|");
  if (lambda < 0.0) raise(ErrorCode::InvalidConfig, "lambda must be >= 0");

  ProblemData data;
  data.dims = dims_for(n, k);
  data.weights = gram_weights(data.dims.p);
  data.n = n;
  data.mu = mu_override > 0.0 ? mu_override : static_cast<double>(omega.m()) / n;
  data.lambda = lambda;
  data.weighted_obs.resize(observed.size());
  for (int i = 0; i < omega.m(); ++i)
    data.weighted_obs[i] = data.weights.d[omega.indices[i] - 1] * observed[i];
  data.omega = std::move(omega);
  data.observed = std::move(observed);
  return data;
}

double eval_h(const ProblemData& data, const FactorPoint& z) {
  require_problem_shape(data, z);
  const int len = data.dims.len;
  FftPlan& plan = plan_for(next_pow2_at_least(len));
  ColumnSpectra zs(z.z(), plan);
  const VectorXcd h_zz = accumulate_product(zs.fwd, zs.fwd, plan, len);
  const VectorXcd t_zz = accumulate_product(zs.fwd, zs.rev_conj, plan, len);

  const double data_term = omega_residual(data, h_zz).squaredNorm();

  const MatrixXcd a = z.z().adjoint() * z.z();
  const double f_hankel = (a.cwiseProduct(a).sum()).real();       // ||Z Z^T||_F^2
  const double f_toeplitz = a.squaredNorm();                      // ||Z Z^H||_F^2
  const double g_hankel = weighted_inner(h_zz, h_zz, data.weights.d_squared);
  const double g_toeplitz = weighted_inner(t_zz, t_zz, data.weights.d_squared);

  return 0.25 * data_term + 0.25 * data.mu * std::max(0.0, f_hankel - g_hankel) +
         0.25 * data.mu * std::max(0.0, f_toeplitz - g_toeplitz);
}

double eval_psi(const FactorPoint& z) {
  if (!z.full_rank()) raise(ErrorCode::RankDeficient, "psi undefined at rank-deficient factor");
  const VectorXd& s = z.singular_values();
  return 0.5 * (s.squaredNorm() + s.cwiseInverse().squaredNorm());
}

double eval_hhat(const ProblemData& data, const FactorPoint& z) {
  if (data.lambda == 0.0) return eval_h(data, z);
  if (!z.full_rank()) return std::numeric_limits<double>::infinity();
  return eval_h(data, z) + data.lambda * eval_psi(z);
}

HorizontalTangent riemannian_gradient(const ProblemData& data, const FactorPoint& z) {
  require_problem_shape(data, z);
  if (!z.full_rank())
    raise(ErrorCode::RankDeficient, "gradient undefined at rank-deficient factor");

  const int p = data.dims.p;
  const int len = data.dims.len;
  const int k = z.k();
  const double mu = data.mu;

  // One transform length serves the Gram vectors (need >= 2p-1) and the
  // structured matvecs (need >= 3p-2).
  FftPlan& plan = plan_for(next_pow2_at_least(3 * p - 2));
  ColumnSpectra zs(z.z(), plan);
  const VectorXcd h_zz = accumulate_product(zs.fwd, zs.fwd, plan, len);
  const VectorXcd t_zz = accumulate_product(zs.fwd, zs.rev_conj, plan, len);

  const VectorXcd residual = omega_residual(data, h_zz);
  const VectorXd& d = data.weights.d;
  const VectorXd& d2 = data.weights.d_squared;

  // w_h = D^-1 P*(residual) - mu D^-2 H*(ZZ^T): the Hankel-side matvec
  // operand for the data term and penalty together. v_t is the Toeplitz side.
  VectorXcd w_h = VectorXcd::Zero(len);
  for (int i = 0; i < data.omega.m(); ++i) {
    const int idx = data.omega.indices[i] - 1;
    w_h[idx] = residual[i] / d[idx];
  }
  w_h -= mu * h_zz.cwiseQuotient(d2.cast<Complex>());
  const VectorXcd v_t = mu * t_zz.cwiseQuotient(d2.cast<Complex>());

  VectorXcd f_wh, f_vt, col;
  plan.forward(w_h.data(), len, f_wh);
  plan.forward(v_t.data(), len, f_vt);

  // H(w_h) conj(Z) - T(v_t) Z, column by column through the shared window.
  MatrixXcd euclid(p, k);
  for (int c = 0; c < k; ++c) {
    plan.inverse(f_wh.cwiseProduct(zs.rev_conj.col(c)), col);
    euclid.col(c) = col.segment(p - 1, p);
    plan.inverse(f_vt.cwiseProduct(zs.fwd.col(c)), col);
    euclid.col(c) -= col.segment(p - 1, p);
  }

  euclid += 2.0 * mu * z.z() * z.gram_re().cast<Complex>();

  if (data.lambda > 0.0) {
    const VectorXd& s = z.singular_values();
    const VectorXcd spec = (s - s.array().pow(-3).matrix()).cast<Complex>();
    euclid += data.lambda *
              (z.svd_u() * spec.asDiagonal() * z.svd_v().adjoint());
  }

  return HorizontalTangent(z.apply_gram_inverse(euclid), z);
}

LineSearchPoly line_search_poly(const ProblemData& data, const FactorPoint& z,
                                const MatrixXcd& xi) {
  require_problem_shape(data, z);
  if (xi.rows() != z.p() || xi.cols() != z.k())
    raise(ErrorCode::DimensionMismatch, "direction shape != factor shape");

  const int len = data.dims.len;
  const double mu = data.mu;
  const VectorXd& d2 = data.weights.d_squared;
  FftPlan& plan = plan_for(next_pow2_at_least(len));
  ColumnSpectra zs(z.z(), plan);
  ColumnSpectra xs(xi, plan);

  // Gram vectors of every bilinear combination along the ray:
  //   H*((Z+a xi)(Z+a xi)^T) = h_zz + 2a h_zx + a^2 h_xx
  //   T*((Z+a xi)(Z+a xi)^H) = t_zz + a (t_zx + t_xz) + a^2 t_xx
  const VectorXcd h_zz = accumulate_product(zs.fwd, zs.fwd, plan, len);
  const VectorXcd h_zx = accumulate_product(zs.fwd, xs.fwd, plan, len);
  const VectorXcd h_xx = accumulate_product(xs.fwd, xs.fwd, plan, len);
  const VectorXcd t_zz = accumulate_product(zs.fwd, zs.rev_conj, plan, len);
  const VectorXcd t_zx = accumulate_product(zs.fwd, xs.rev_conj, plan, len);
  const VectorXcd t_xx = accumulate_product(xs.fwd, xs.rev_conj, plan, len);
  // T*(xi Z^H) is the conjugate reversal of T*(Z xi^H).
  const VectorXcd t_xz = t_zx.reverse().conjugate();

  // Data-fit: quartic in the omega-restricted residual r0 + a r1 + a^2 r2.
  const VectorXcd r0 = omega_residual(data, h_zz);
  const VectorXcd r1 = 2.0 * omega_scaled(data, h_zx);
  const VectorXcd r2 = omega_scaled(data, h_xx);

  const double e0 = r0.squaredNorm();
  const double e1 = 2.0 * r0.dot(r1).real();
  const double e2 = r1.squaredNorm() + 2.0 * r0.dot(r2).real();
  const double e3 = 2.0 * r1.dot(r2).real();
  const double e4 = r2.squaredNorm();

  // Frobenius terms of the two penalties through the small Gram blocks.
  const MatrixXcd a = z.z().adjoint() * z.z();
  const MatrixXcd b = z.z().adjoint() * xi;
  const MatrixXcd cgram = xi.adjoint() * xi;

  const double f00 = trace_conj(a, a).real();
  const double f01 = 2.0 * trace_conj(a, b).real();
  const double f02 = trace_conj(b, b).real();
  const double f11 = 2.0 * trace_conj(a, cgram).real() + 2.0 * b.cwiseProduct(b).sum().real();
  const double f12 = 2.0 * trace_conj(b, cgram).real();
  const double f22 = trace_conj(cgram, cgram).real();

  const double g00 = weighted_inner(h_zz, h_zz, d2);
  const double g01 = 2.0 * weighted_inner(h_zz, h_zx, d2);
  const double g02 = weighted_inner(h_zz, h_xx, d2);
  const double g11 = 4.0 * weighted_inner(h_zx, h_zx, d2);
  const double g12 = 2.0 * weighted_inner(h_zx, h_xx, d2);
  const double g22 = weighted_inner(h_xx, h_xx, d2);

  const VectorXcd ts1 = t_zx + t_xz;
  const double fp00 = trace_plain(a, a).real();
  const double fp01 = 2.0 * a.cwiseProduct(b.conjugate()).sum().real();
  const double fp02 = b.squaredNorm();
  const double fp11 = 2.0 * trace_plain(a, cgram).real() + 2.0 * trace_plain(b, b).real();
  const double fp12 = 2.0 * trace_plain(b, cgram).real();
  const double fp22 = trace_plain(cgram, cgram).real();

  const double gp00 = weighted_inner(t_zz, t_zz, d2);
  const double gp01 = weighted_inner(t_zz, ts1, d2);
  const double gp02 = weighted_inner(t_zz, t_xx, d2);
  const double gp11 = weighted_inner(ts1, ts1, d2);
  const double gp12 = weighted_inner(ts1, t_xx, d2);
  const double gp22 = weighted_inner(t_xx, t_xx, d2);

  // ||(I-G)(S0 + a S1 + a^2 S2)||^2 expands with <(I-G)Si, Sj> = Fij - Gij.
  const double q0 = f00 - g00;
  const double q1 = 2.0 * (f01 - g01);
  const double q2 = (f11 - g11) + 2.0 * (f02 - g02);
  const double q3 = 2.0 * (f12 - g12);
  const double q4 = f22 - g22;

  const double qp0 = fp00 - gp00;
  const double qp1 = 2.0 * (fp01 - gp01);
  const double qp2 = (fp11 - gp11) + 2.0 * (fp02 - gp02);
  const double qp3 = 2.0 * (fp12 - gp12);
  const double qp4 = fp22 - gp22;

  LineSearchPoly poly;
  poly.c[0] = 0.25 * e0 + 0.25 * mu * (q0 + qp0);
  poly.c[1] = 0.25 * e1 + 0.25 * mu * (q1 + qp1);
  poly.c[2] = 0.25 * e2 + 0.25 * mu * (q2 + qp2);
  poly.c[3] = 0.25 * e3 + 0.25 * mu * (q3 + qp3);
  poly.c[4] = 0.25 * e4 + 0.25 * mu * (q4 + qp4);
  return poly;
}

PinvRay::PinvRay(const FactorPoint& z, const MatrixXcd& xi) {
  if (xi.rows() != z.p() || xi.cols() != z.k())
    raise(ErrorCode::DimensionMismatch, "direction shape != factor shape");
  const int p = z.p();
  const int k = z.k();

  Eigen::JacobiSVD<MatrixXcd> svd_xi(xi, Eigen::ComputeThinU | Eigen::ComputeThinV);

  MatrixXcd u_pair(p, 2 * k);
  u_pair << z.svd_u(), svd_xi.matrixU();
  Eigen::JacobiSVD<MatrixXcd> svd_u(u_pair, Eigen::ComputeThinV);

  MatrixXcd v_pair(k, 2 * k);
  v_pair << z.svd_v(), svd_xi.matrixV();
  Eigen::JacobiSVD<MatrixXcd> svd_v(v_pair, Eigen::ComputeThinV);

  // Z + a xi = U3 (M0 + a M1) U4^H with orthonormal U3 and unitary U4, so the
  // pencil M0 + a M1 carries the singular values of the whole ray.
  const MatrixXcd v3h = svd_u.matrixV().adjoint();
  const MatrixXcd a1 = v3h.leftCols(k);
  const MatrixXcd a2 = v3h.rightCols(k);
  const MatrixXcd w1 = svd_v.matrixV().topRows(k);          // 2k x k split
  const MatrixXcd w2 = svd_v.matrixV().bottomRows(k);
  const VectorXd s3 = svd_u.singularValues();
  const VectorXd s4 = svd_v.singularValues();

  m0_ = s3.asDiagonal() * (a1 * z.singular_values().asDiagonal() * w1) * s4.asDiagonal();
  m1_ = s3.asDiagonal() * (a2 * svd_xi.singularValues().asDiagonal() * w2) * s4.asDiagonal();
}

VectorXd PinvRay::singular_values(double alpha) const {
  const MatrixXcd m = m0_ + alpha * m1_;
  Eigen::JacobiSVD<MatrixXcd> svd(m);
  return svd.singularValues();
}

double PinvRay::norm_sq(double alpha) const {
  const VectorXd s = singular_values(alpha);
  const int k = static_cast<int>(s.size());
  // Anchor the rank test to the pencil scale as well: when the ray passes
  // through the zero matrix the computed spectrum is pure rounding noise, and
  // a test relative to s[0] alone cannot see that.
  const double scale = m0_.norm() + std::abs(alpha) * m1_.norm();
  if (!(s[0] > kRankRelTol * scale) || s[k - 1] <= kRankRelTol * s[0])
    raise(ErrorCode::RankDeficient, "ray point is numerically rank-deficient");
  return s.cwiseInverse().squaredNorm();
}

double pinv_norm_along_ray(const FactorPoint& z, const MatrixXcd& xi, double alpha) {
  return PinvRay(z, xi).norm_sq(alpha);
}

}  // namespace stht
