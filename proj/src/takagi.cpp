#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "spectralht/errors.hpp"
#include "spectralht/rng.hpp"
#include "spectralht/solver.hpp"

namespace stht {

namespace {

constexpr double kClusterRelGap = 1e-8;

// Given the unitary coupling C = W^H conj(V) of an SVD A = W S V^H of a
// complex symmetric A, together with the singular values used to cluster it,
// build the block-diagonal unitary P with P P^T = C blockwise. Then W P is a
// Takagi factor of A.
//
// Within a cluster C is (numerically) unitary and symmetric, so C = X + iY
// with commuting real symmetric X, Y. A simultaneous real diagonalization
// Q^T C Q = diag(e^{i theta}) yields P = Q diag(e^{i theta / 2}).
MatrixXcd coupling_phase_factor(const MatrixXcd& coupling, const VectorXd& sigma) {
  const int n = static_cast<int>(sigma.size());
  const double sigma_max = n > 0 ? sigma[0] : 0.0;
  MatrixXcd p = MatrixXcd::Identity(n, n);

  int start = 0;
  while (start < n) {
    int stop = start + 1;
    while (stop < n && sigma[stop - 1] - sigma[stop] <= kClusterRelGap * sigma_max) ++stop;
    const int size = stop - start;

    // Zero clusters keep P = I: any orthonormal basis works there.
    if (sigma[start] > kRankRelTol * sigma_max && sigma_max > 0.0) {
      MatrixXcd c = coupling.block(start, start, size, size);
      c = 0.5 * (c + c.transpose()).eval();

      MatrixXd q;
      if (size == 1) {
        q = MatrixXd::Identity(1, 1);
      } else {
        const MatrixXd x = c.real();
        const MatrixXd y = c.imag();
        Eigen::SelfAdjointEigenSolver<MatrixXd> ex(x);
        q = ex.eigenvectors();
        const VectorXd ev = ex.eigenvalues();  // ascending, in [-1, 1]
        // Rotate within eigenvalue clusters of X so Y becomes diagonal too.
        int a = 0;
        while (a < size) {
          int b = a + 1;
          while (b < size && ev[b] - ev[b - 1] <= kClusterRelGap) ++b;
          if (b - a > 1) {
            const MatrixXd qa = q.middleCols(a, b - a);
            Eigen::SelfAdjointEigenSolver<MatrixXd> ey(qa.transpose() * y * qa);
            q.middleCols(a, b - a) = qa * ey.eigenvectors();
          }
          a = b;
        }
      }

      const MatrixXcd diag = q.transpose().cast<Complex>() * c * q.cast<Complex>();
      VectorXcd half_phase(size);
      for (int j = 0; j < size; ++j)
        half_phase[j] = std::polar(1.0, 0.5 * std::arg(diag(j, j)));
      p.block(start, start, size, size) = q.cast<Complex>() * half_phase.asDiagonal();
    }
    start = stop;
  }
  return p;
}

struct CompressedSvd {
  MatrixXcd w;  // p x r left singular vectors
  MatrixXcd v;  // p x r right singular vectors
  VectorXd sigma;
};

// Top-r singular triplets of the symmetric lift c * H(x) without forming it,
// by randomized subspace iteration on FFT matvecs. Deterministic for a fixed
// seed. For a symmetric matrix A^H w = conj(A conj(w)).
CompressedSvd randomized_hankel_svd(const VectorXcd& x, double scale, int r,
                                    std::uint64_t seed) {
  const int p = static_cast<int>((x.size() + 1) / 2);
  const int cols = std::min(p, r + 10);

  const auto matvec = [&](const MatrixXcd& w) {
    MatrixXcd out(p, w.cols());
    for (int c = 0; c < w.cols(); ++c)
      out.col(c) = scale * hankel_matvec(x, w.col(c));
    return out;
  };
  // The explicit return type materializes the conjugated product; a deduced
  // return would hand back an Eigen expression referencing a dead temporary.
  const auto matvec_adj = [&](const MatrixXcd& w) -> MatrixXcd {
    return matvec(w.conjugate()).conjugate();
  };
  const auto orth = [](const MatrixXcd& w) -> MatrixXcd {
    Eigen::HouseholderQR<MatrixXcd> qr(w);
    return qr.householderQ() * MatrixXcd::Identity(w.rows(), w.cols());
  };

  Rng rng(mix64(seed ^ 0x48414e4b454c5356ull));
  MatrixXcd g(p, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < p; ++i) g(i, j) = Complex(rng.normal(), rng.normal());

  MatrixXcd q = orth(matvec(g));
  for (int it = 0; it < 8; ++it) {
    q = orth(matvec_adj(q));
    q = orth(matvec(q));
  }

  const MatrixXcd b = matvec_adj(q).adjoint();  // (Q^H A), cols x p
  Eigen::JacobiSVD<MatrixXcd> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);

  CompressedSvd out;
  out.w = q * svd.matrixU().leftCols(r);
  out.v = svd.matrixV().leftCols(r);
  out.sigma = svd.singularValues().head(r);
  return out;
}

}  // namespace

TakagiResult takagi(const MatrixXcd& a) {
  if (a.rows() != a.cols() || a.rows() < 1)
    raise(ErrorCode::DimensionMismatch, "Takagi input must be square");
  const double norm = a.norm();
  if ((a - a.transpose()).norm() > 1e-12 * norm)
    raise(ErrorCode::NotSymmetric, "Takagi input must be complex symmetric");

  const int n = static_cast<int>(a.rows());
  if (norm == 0.0) return {MatrixXcd::Identity(n, n), VectorXd::Zero(n)};

  const MatrixXcd sym = 0.5 * (a + a.transpose());
  // Repeated singular values are the normal case here, and Eigen's BDCSVD can
  // return corrupted spectra for clustered inputs once its divide-and-conquer
  // stage engages; Jacobi is exact for these sizes.
  Eigen::JacobiSVD<MatrixXcd> svd(sym, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const MatrixXcd coupling = svd.matrixU().adjoint() * svd.matrixV().conjugate();
  const MatrixXcd p = coupling_phase_factor(coupling, svd.singularValues());
  return {svd.matrixU() * p, svd.singularValues()};
}

FactorPoint initialize(const ProblemData& data, int k, std::uint64_t seed) {
  const int p = data.dims.p;
  const int len = data.dims.len;
  if (k < 1) raise(ErrorCode::InvalidConfig, "rank must be >= 1");
  if (k >= p) raise(ErrorCode::SparsityTooLarge, "rank k must satisfy k < p");

  const double scale = static_cast<double>(data.omega.m()) / data.n;
  const VectorXcd lifted = embed(data.observed, data.omega, len);

  MatrixXcd w_k, v_k;
  VectorXd sigma_k;
  if (p <= 512) {
    const MatrixXcd dense = scale * hankel_from_vector(lifted);
    Eigen::BDCSVD<MatrixXcd> svd(dense, Eigen::ComputeThinU | Eigen::ComputeThinV);
    w_k = svd.matrixU().leftCols(k);
    v_k = svd.matrixV().leftCols(k);
    sigma_k = svd.singularValues().head(k);
    // BDCSVD can silently corrupt clustered spectra. Validate the leading
    // triplets by residual and redo with Jacobi when they do not check out.
    const double residual = (dense * v_k - w_k * sigma_k.asDiagonal()).norm();
    if (!(residual <= 1e-8 * (1.0 + sigma_k[0]) * std::sqrt(double(k)))) {
      Eigen::JacobiSVD<MatrixXcd> exact(dense, Eigen::ComputeThinU | Eigen::ComputeThinV);
      w_k = exact.matrixU().leftCols(k);
      v_k = exact.matrixV().leftCols(k);
      sigma_k = exact.singularValues().head(k);
    }
  } else {
    const CompressedSvd svd = randomized_hankel_svd(lifted, scale, k, seed);
    w_k = svd.w;
    v_k = svd.v;
    sigma_k = svd.sigma;
  }

  // Compressed Takagi: the k x k coupling of the dominant subspace plays the
  // same role as the full coupling above.
  const MatrixXcd coupling = w_k.adjoint() * v_k.conjugate();
  const MatrixXcd u0 = w_k * coupling_phase_factor(coupling, sigma_k);
  MatrixXcd z0 = u0 * sigma_k.cwiseSqrt().asDiagonal();

  // Rank repair: a vanished singular value gets a tiny seeded perturbation.
  Rng rng(mix64(seed ^ 0x494e495450455254ull));
  double bump = 1e-12 * std::max(sigma_k.cwiseSqrt().maxCoeff(), 1.0);
  for (int attempt = 0; attempt < 5; ++attempt) {
    FactorPoint candidate(z0);
    if (candidate.full_rank()) return candidate;
    for (int j = 0; j < z0.cols(); ++j)
      for (int i = 0; i < z0.rows(); ++i)
        z0(i, j) += bump * Complex(rng.normal(), rng.normal());
    bump *= 10.0;
  }
  return FactorPoint(z0);
}

}  // namespace stht
