#pragma once

#include <cstdint>

#include <Eigen/Cholesky>

#include "spectralht/types.hpp"

namespace stht {

/// Relative singular-value threshold below which a factor counts as
/// rank-deficient: sigma_min <= kRankRelTol * sigma_max.
inline constexpr double kRankRelTol = 1e-12;

/// A point Z on the quotient of full-column-rank complex p x k matrices by
/// right multiplication with real orthogonal k x k matrices. Immutable; the
/// thin SVD, Re(Z^H Z) and its Cholesky factor are computed once on
/// construction and shared by the metric, projection and gradient code.
///
/// Each constructed point carries a unique id. Tangents remember the id of
/// the point they were projected at, so mixing bases is caught (BaseMismatch)
/// instead of silently producing garbage.
class FactorPoint {
 public:
  explicit FactorPoint(MatrixXcd z);

  const MatrixXcd& z() const { return z_; }
  int p() const { return static_cast<int>(z_.rows()); }
  int k() const { return static_cast<int>(z_.cols()); }
  std::uint64_t id() const { return id_; }

  const MatrixXd& gram_re() const { return gram_re_; }   // Re(Z^H Z)
  const VectorXd& singular_values() const { return sv_; }
  const MatrixXcd& svd_u() const { return svd_u_; }      // thin, p x k
  const MatrixXcd& svd_v() const { return svd_v_; }      // k x k

  /// sigma_min > kRankRelTol * sigma_max (and sigma_max > 0).
  bool full_rank() const { return full_rank_; }

  /// Cholesky of Re(Z^H Z); RankDeficient when the point is degenerate.
  const Eigen::LLT<MatrixXd>& gram_llt() const;

  /// Solve X * Re(Z^H Z)^-1 for complex X (k columns); RankDeficient when
  /// degenerate.
  MatrixXcd apply_gram_inverse(const MatrixXcd& x) const;

 private:
  MatrixXcd z_;
  MatrixXd gram_re_;
  Eigen::LLT<MatrixXd> gram_llt_;
  MatrixXcd svd_u_, svd_v_;
  VectorXd sv_;
  bool full_rank_ = false;
  std::uint64_t id_;
};

/// A horizontal tangent vector bound to the FactorPoint it was created at.
class HorizontalTangent {
 public:
  HorizontalTangent(MatrixXcd xi, const FactorPoint& base)
      : xi_(std::move(xi)), base_id_(base.id()) {}

  const MatrixXcd& xi() const { return xi_; }
  std::uint64_t base_id() const { return base_id_; }

 private:
  MatrixXcd xi_;
  std::uint64_t base_id_;
};

/// Quotient metric g(xi, zeta) = tr(Re(Z^H Z) Re(xi^H zeta)).
double metric(const FactorPoint& base, const MatrixXcd& xi, const MatrixXcd& zeta);
double metric(const FactorPoint& base, const HorizontalTangent& xi,
              const HorizontalTangent& zeta);

/// The skew-symmetric gauge Omega with P(xi) = xi - Z Omega,
///   Omega = (G^-1 S - S^T G^-1) / 2,  G = Re(Z^H Z), S = Re(Z^H xi).
/// Skew-symmetry holds by construction.
MatrixXd projection_gauge(const FactorPoint& base, const MatrixXcd& xi);

/// Orthogonal projection of an ambient perturbation onto the horizontal space
/// at base.
HorizontalTangent project_horizontal(const FactorPoint& base, const MatrixXcd& xi);

/// Z + alpha * xi as a new point; RankDeficient if the result loses rank,
/// BaseMismatch if xi was projected at a different point.
FactorPoint retract(const FactorPoint& base, const HorizontalTangent& xi, double alpha);

/// Move a tangent to new_base by orthogonal projection onto the horizontal
/// space there.
HorizontalTangent transport(const FactorPoint& new_base, const HorizontalTangent& xi);

/// Z * O for real orthogonal O: a different representative of the same orbit.
/// NotOrthogonal if O^T O deviates from identity beyond 1e-12.
FactorPoint orbit_representative_shift(const FactorPoint& z, const MatrixXd& o);

}  // namespace stht
