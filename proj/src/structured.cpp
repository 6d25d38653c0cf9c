#include "spectralht/structured.hpp"

#include "spectralht/errors.hpp"
#include "spectralht/fft.hpp"

namespace stht {

namespace {

// Generating vectors have odd length 2p-1 with p >= 2.
int p_from_generating(const VectorXcd& x, const char* what) {
  const int len = static_cast<int>(x.size());
  if (len < 3 || len % 2 == 0)
    raise(ErrorCode::DimensionMismatch,
          std::string(what) + " length must be odd and >= 3, got " + std::to_string(len));
  return (len + 1) / 2;
}

void require_square(const MatrixXcd& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() < 2)
    raise(ErrorCode::DimensionMismatch, std::string(what) + " must be square with p >= 2");
}

// Shared window extraction: both structured matvecs reduce to a full linear
// convolution of which entries p-1 .. 2p-2 (0-based) are the product.
VectorXcd conv_window(const VectorXcd& a, const VectorXcd& b, int p) {
  return fft_convolve(a, b).segment(p - 1, p);
}

}  // namespace

StructuredDims dims_for(int n, int k) {
  if (n < 2) raise(ErrorCode::InvalidConfig, "signal length must be >= 2");
  if (k < 1) raise(ErrorCode::InvalidConfig, "rank must be >= 1");
  const int p = std::max((n + 2) / 2, k + 1);  // (n+2)/2 == ceil((n+1)/2)
  return StructuredDims{p, 2 * p - 1};
}

GramWeights gram_weights(int p) {
  if (p < 2) raise(ErrorCode::DimensionMismatch, "p must be >= 2");
  const int len = 2 * p - 1;
  GramWeights w;
  w.d_squared.resize(len);
  w.d.resize(len);
  for (int m = 0; m < len; ++m) {
    w.d_squared[m] = std::min({m + 1, p, len - m});
    w.d[m] = std::sqrt(w.d_squared[m]);
  }
  return w;
}

MatrixXcd hankel_from_vector(const VectorXcd& x) {
  const int p = p_from_generating(x, "Hankel generating vector");
  MatrixXcd a(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) a(i, j) = x[i + j];
  return a;
}

VectorXcd hankel_adjoint(const MatrixXcd& a) {
  require_square(a, "Hankel adjoint input");
  const int p = static_cast<int>(a.rows());
  VectorXcd x = VectorXcd::Zero(2 * p - 1);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) x[i + j] += a(i, j);
  return x;
}

MatrixXcd toeplitz_from_vector(const VectorXcd& t) {
  const int p = p_from_generating(t, "Toeplitz generating vector");
  MatrixXcd a(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) a(i, j) = t[i - j + p - 1];
  return a;
}

VectorXcd toeplitz_adjoint(const MatrixXcd& a) {
  require_square(a, "Toeplitz adjoint input");
  const int p = static_cast<int>(a.rows());
  VectorXcd t = VectorXcd::Zero(2 * p - 1);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) t[i - j + p - 1] += a(i, j);
  return t;
}

VectorXcd fast_hankel_gram(const VectorXcd& za, const VectorXcd& zb) {
  if (za.size() != zb.size() || za.size() < 1)
    raise(ErrorCode::DimensionMismatch, "factor columns must have equal positive length");
  return fft_convolve(za, zb);
}

VectorXcd fast_toeplitz_gram(const VectorXcd& za, const VectorXcd& zb) {
  if (za.size() != zb.size() || za.size() < 1)
    raise(ErrorCode::DimensionMismatch, "factor columns must have equal positive length");
  // Cross-correlation as a convolution with the conjugate-reversed column.
  return fft_convolve(za, zb.reverse().conjugate());
}

VectorXcd hankel_matvec(const VectorXcd& x, const VectorXcd& w) {
  const int p = p_from_generating(x, "Hankel generating vector");
  if (w.size() != p) raise(ErrorCode::DimensionMismatch, "matvec operand length != p");
  return conv_window(x, w.reverse(), p);
}

VectorXcd toeplitz_matvec(const VectorXcd& t, const VectorXcd& w) {
  const int p = p_from_generating(t, "Toeplitz generating vector");
  if (w.size() != p) raise(ErrorCode::DimensionMismatch, "matvec operand length != p");
  return conv_window(t, w, p);
}

MatrixXcd g1_residual_product(const MatrixXcd& z) {
  const int p = static_cast<int>(z.rows());
  const int k = static_cast<int>(z.cols());
  if (p < 2 || k < 1) raise(ErrorCode::DimensionMismatch, "factor must be p x k with p >= 2");
  const GramWeights w = gram_weights(p);
  VectorXcd h_zz = VectorXcd::Zero(2 * p - 1);
  for (int c = 0; c < k; ++c) h_zz += fast_hankel_gram(z.col(c), z.col(c));
  const VectorXcd v = h_zz.cwiseQuotient(w.d_squared.cast<Complex>());
  // (Z Z^T) conj(Z) = Z conj(Z^H Z), then subtract H(D^-2 H*(Z Z^T)) conj(Z).
  MatrixXcd out = z * (z.adjoint() * z).conjugate();
  for (int c = 0; c < k; ++c) out.col(c) -= hankel_matvec(v, z.col(c).conjugate());
  return out;
}

MatrixXcd g2_residual_product(const MatrixXcd& z) {
  const int p = static_cast<int>(z.rows());
  const int k = static_cast<int>(z.cols());
  if (p < 2 || k < 1) raise(ErrorCode::DimensionMismatch, "factor must be p x k with p >= 2");
  const GramWeights w = gram_weights(p);
  VectorXcd t_zz = VectorXcd::Zero(2 * p - 1);
  for (int c = 0; c < k; ++c) t_zz += fast_toeplitz_gram(z.col(c), z.col(c));
  const VectorXcd v = t_zz.cwiseQuotient(w.d_squared.cast<Complex>());
  MatrixXcd out = z * (z.adjoint() * z);
  for (int c = 0; c < k; ++c) out.col(c) -= toeplitz_matvec(v, z.col(c));
  return out;
}

}  // namespace stht
