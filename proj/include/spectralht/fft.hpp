#pragma once

#include "spectralht/types.hpp"

namespace stht {

/// Smallest power of two >= n.
int next_pow2_at_least(int n);

/// A pair of out-of-place complex DFT plans (forward / inverse) of fixed
/// length with their own aligned buffers. Instances are not shareable across
/// threads; use plan_for() which hands out thread-local cached plans.
class FftPlan {
 public:
  explicit FftPlan(int n);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  int size() const { return n_; }

  /// dst = DFT of src zero-padded to the plan length. dst is resized to n.
  void forward(const Complex* src, int len, VectorXcd& dst);

  /// dst = inverse DFT of freq (length n), scaled by 1/n.
  void inverse(const VectorXcd& freq, VectorXcd& dst);

 private:
  int n_;
  Complex* in_;
  Complex* out_;
  void* fwd_;  // fftw_plan, kept as void* so fftw3.h stays out of this header
  void* inv_;
};

/// Thread-local cached plan of the given length.
FftPlan& plan_for(int n);

/// Full linear convolution of a and b (length a.size()+b.size()-1).
VectorXcd fft_convolve(const VectorXcd& a, const VectorXcd& b);

}  // namespace stht
