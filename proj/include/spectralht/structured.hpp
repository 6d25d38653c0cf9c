#pragma once

#include "spectralht/types.hpp"

namespace stht {

/// Dimensions of the structured lifting. A length-n signal is generated by a
/// length len = 2p-1 vector whose trailing len-n entries are never observed;
/// p = max(ceil((n+1)/2), k+1) so the p x p factor matrices can reach rank k.
struct StructuredDims {
  int p = 0;
  int len = 0;
};

StructuredDims dims_for(int n, int k);

/// Anti-diagonal (= diagonal) multiplicity weights of the p x p Hankel and
/// Toeplitz maps: d_squared[m] = min(m+1, p, 2p-1-m) for m = 0..2p-2, and
/// d = sqrt(d_squared). H*H = T*T = diag(d_squared) on generating vectors.
struct GramWeights {
  VectorXd d;
  VectorXd d_squared;
};

GramWeights gram_weights(int p);

/// Hankel lift: x (length 2p-1, odd) to the p x p matrix A(i1,i2) = x[i1+i2-1]
/// in 1-based terms, i.e. A(i,j) = x[i+j] 0-based.
MatrixXcd hankel_from_vector(const VectorXcd& x);

/// Adjoint of the Hankel lift: anti-diagonal sums, length 2p-1.
VectorXcd hankel_adjoint(const MatrixXcd& a);

/// Toeplitz lift: t (length 2p-1, odd) to A(i1,i2) = t[i1-i2+p] 1-based,
/// i.e. A(i,j) = t[i-j+p-1] 0-based.
MatrixXcd toeplitz_from_vector(const VectorXcd& t);

/// Adjoint of the Toeplitz lift: diagonal sums, length 2p-1.
VectorXcd toeplitz_adjoint(const MatrixXcd& a);

/// H*(za zb^T) without forming the outer product: the full linear convolution
/// of za and zb (length 2p-1), via FFT.
VectorXcd fast_hankel_gram(const VectorXcd& za, const VectorXcd& zb);

/// T*(za zb^H) without forming the outer product: the cross-correlation
/// out[m] = sum_i za[i] conj(zb[i-(m-p)]) (1-based), via FFT. Length 2p-1.
VectorXcd fast_toeplitz_gram(const VectorXcd& za, const VectorXcd& zb);

/// H(x) w via circulant-embedded FFT convolution; never materializes H(x).
VectorXcd hankel_matvec(const VectorXcd& x, const VectorXcd& w);

/// T(t) w via circulant-embedded FFT convolution; never materializes T(t).
VectorXcd toeplitz_matvec(const VectorXcd& t, const VectorXcd& w);

/// (I - G1)(Z Z^T) conj(Z) where G1 = H D^-2 H* projects onto the Hankel
/// subspace; computed column-wise with FFTs, O(p K log p + p K^2).
MatrixXcd g1_residual_product(const MatrixXcd& z);

/// (I - G2)(Z Z^H) Z where G2 = T D^-2 T* projects onto the Toeplitz subspace.
MatrixXcd g2_residual_product(const MatrixXcd& z);

}  // namespace stht
