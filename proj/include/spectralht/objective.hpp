#pragma once

#include <array>
#include <cstdint>

#include "spectralht/manifold.hpp"
#include "spectralht/signal.hpp"
#include "spectralht/structured.hpp"
#include "spectralht/types.hpp"

namespace stht {

/// Immutable description of one recovery problem: which samples of a length-n
/// signal were observed, the structured dimensions p / 2p-1 sized for rank k,
/// and the objective weights. weighted_obs caches d[omega]*observed, the
/// target of the weighted data-fit term.
struct ProblemData {
  ObservationSet omega;
  VectorXcd observed;
  StructuredDims dims;
  GramWeights weights;
  double mu = 0.0;
  double lambda = 0.0;
  int n = 0;
  VectorXcd weighted_obs;
};

/// mu_override <= 0 selects the default mu = m/n; lambda < 0 is invalid.
ProblemData make_problem_data(int n, ObservationSet omega, VectorXcd observed, int k,
                              double lambda = 1e-8, double mu_override = -1.0);

/// Data-fit plus structure penalties (no spectral regularizer):
///   h = 1/4 ||P_om(D^-1 H*(ZZ^T)) - P_om(D y)||^2
///     + mu/4 ||(I-G1)(ZZ^T)||^2 + mu/4 ||(I-G2)(ZZ^H)||^2.
/// Computed via FFT Gram vectors; the p x p matrices are never formed.
double eval_h(const ProblemData& data, const FactorPoint& z);

/// Spectral barrier psi = (||Z||_F^2 + ||Z^+||_F^2) / 2. RankDeficient when
/// the smallest singular value is below the relative rank threshold.
double eval_psi(const FactorPoint& z);

/// h + lambda * psi; +infinity for rank-deficient z (step-rejection contract
/// inside the line search). lambda == 0 skips the barrier entirely.
double eval_hhat(const ProblemData& data, const FactorPoint& z);

/// Riemannian gradient of hhat at z (horizontal by construction of the
/// formula; not re-projected). RankDeficient when z is degenerate.
HorizontalTangent riemannian_gradient(const ProblemData& data, const FactorPoint& z);

/// Exact quartic restriction of h along the retraction ray:
///   phi(alpha) = h(Z + alpha xi) = c0 + c1 a + c2 a^2 + c3 a^3 + c4 a^4.
struct LineSearchPoly {
  std::array<double, 5> c{};

  double eval(double alpha) const {
    return c[0] + alpha * (c[1] + alpha * (c[2] + alpha * (c[3] + alpha * c[4])));
  }
  /// Coefficients of phi'(alpha) = d0 + d1 a + d2 a^2 + d3 a^3.
  std::array<double, 4> derivative() const { return {c[1], 2 * c[2], 3 * c[3], 4 * c[4]}; }
};

LineSearchPoly line_search_poly(const ProblemData& data, const FactorPoint& z,
                                const MatrixXcd& xi);

/// ||(Z + alpha xi)^+||_F^2 for many alpha at O(k^3) each: four thin SVDs at
/// construction reduce the ray to a small pencil M0 + alpha M1 with the same
/// singular values as Z + alpha xi.
class PinvRay {
 public:
  PinvRay(const FactorPoint& z, const MatrixXcd& xi);

  /// Singular values of Z + alpha xi (nonincreasing), via the reduced pencil.
  VectorXd singular_values(double alpha) const;

  /// ||(Z + alpha xi)^+||_F^2; RankDeficient when Z + alpha xi is degenerate.
  double norm_sq(double alpha) const;

 private:
  MatrixXcd m0_, m1_;
};

double pinv_norm_along_ray(const FactorPoint& z, const MatrixXcd& xi, double alpha);

}  // namespace stht
