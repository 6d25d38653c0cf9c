#include "spectralht/manifold.hpp"

#include <atomic>

#include <Eigen/SVD>

#include "spectralht/errors.hpp"

namespace stht {

namespace {

std::uint64_t next_point_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

void require_same_shape(const FactorPoint& base, const MatrixXcd& xi, const char* what) {
  if (xi.rows() != base.p() || xi.cols() != base.k())
    raise(ErrorCode::DimensionMismatch, std::string(what) + ": tangent shape != base shape");
}

void require_bound(const FactorPoint& base, const HorizontalTangent& xi, const char* what) {
  if (xi.base_id() != base.id())
    raise(ErrorCode::BaseMismatch, std::string(what) + ": tangent was projected at a different point");
}

}  // namespace

FactorPoint::FactorPoint(MatrixXcd z) : z_(std::move(z)), id_(next_point_id()) {
  const int p = static_cast<int>(z_.rows());
  const int k = static_cast<int>(z_.cols());
  if (p < 2 || k < 1) raise(ErrorCode::DimensionMismatch, "factor must be p x k, p >= 2, k >= 1");
  if (k >= p) raise(ErrorCode::SparsityTooLarge, "rank k must satisfy k < p");

  // Jacobi rather than divide-and-conquer: the factor routinely has clustered
  // singular values, which Eigen's BDCSVD mishandles at sizes past its Jacobi
  // fallback threshold.
  Eigen::JacobiSVD<MatrixXcd> svd(z_, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd_u_ = svd.matrixU();
  svd_v_ = svd.matrixV();
  sv_ = svd.singularValues();
  full_rank_ = sv_[0] > 0.0 && sv_[k - 1] > kRankRelTol * sv_[0];

  gram_re_ = (z_.adjoint() * z_).real();
  gram_re_ = 0.5 * (gram_re_ + gram_re_.transpose()).eval();  // exact symmetry
  if (full_rank_) {
    gram_llt_.compute(gram_re_);
    if (gram_llt_.info() != Eigen::Success) full_rank_ = false;
  }
}

const Eigen::LLT<MatrixXd>& FactorPoint::gram_llt() const {
  if (!full_rank_) raise(ErrorCode::RankDeficient, "factor is numerically rank-deficient");
  return gram_llt_;
}

MatrixXcd FactorPoint::apply_gram_inverse(const MatrixXcd& x) const {
  const auto& llt = gram_llt();
  // X G^-1 = (G^-1 X^T)^T with G symmetric; solve real and imaginary parts.
  MatrixXd re = llt.solve(x.real().transpose()).transpose();
  MatrixXd im = llt.solve(x.imag().transpose()).transpose();
  return re.cast<Complex>() + Complex(0, 1) * im.cast<Complex>();
}

double metric(const FactorPoint& base, const MatrixXcd& xi, const MatrixXcd& zeta) {
  require_same_shape(base, xi, "metric");
  require_same_shape(base, zeta, "metric");
  const MatrixXd cross = (xi.adjoint() * zeta).real();
  return (base.gram_re().array() * cross.transpose().array()).sum();
}

double metric(const FactorPoint& base, const HorizontalTangent& xi,
              const HorizontalTangent& zeta) {
  require_bound(base, xi, "metric");
  require_bound(base, zeta, "metric");
  return metric(base, xi.xi(), zeta.xi());
}

MatrixXd projection_gauge(const FactorPoint& base, const MatrixXcd& xi) {
  require_same_shape(base, xi, "projection");
  const MatrixXd s = (base.z().adjoint() * xi).real();
  const auto& llt = base.gram_llt();
  const MatrixXd gi_s = llt.solve(s);
  return 0.5 * (gi_s - gi_s.transpose());
}

HorizontalTangent project_horizontal(const FactorPoint& base, const MatrixXcd& xi) {
  const MatrixXd omega = projection_gauge(base, xi);
  return HorizontalTangent(xi - base.z() * omega.cast<Complex>(), base);
}

FactorPoint retract(const FactorPoint& base, const HorizontalTangent& xi, double alpha) {
  require_bound(base, xi, "retract");
  FactorPoint moved(base.z() + alpha * xi.xi());
  if (!moved.full_rank())
    raise(ErrorCode::RankDeficient, "retraction left the full-rank manifold; reject the step");
  return moved;
}

HorizontalTangent transport(const FactorPoint& new_base, const HorizontalTangent& xi) {
  return project_horizontal(new_base, xi.xi());
}

FactorPoint orbit_representative_shift(const FactorPoint& z, const MatrixXd& o) {
  if (o.rows() != z.k() || o.cols() != z.k())
    raise(ErrorCode::DimensionMismatch, "shift matrix must be k x k");
  const MatrixXd defect = o.transpose() * o - MatrixXd::Identity(z.k(), z.k());
  if (defect.cwiseAbs().maxCoeff() > 1e-12)
    raise(ErrorCode::NotOrthogonal, "shift matrix is not orthogonal to 1e-12");
  return FactorPoint(z.z() * o.cast<Complex>());
}

}  // namespace stht
