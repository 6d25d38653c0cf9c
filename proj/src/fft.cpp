#include "spectralht/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "spectralht/errors.hpp"

namespace stht {

namespace {

// The FFTW planner is not thread-safe; plan creation/destruction is
// serialized globally. Execution on distinct plans is safe concurrently.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

int next_pow2_at_least(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

FftPlan::FftPlan(int n) : n_(n) {
  if (n < 1) raise(ErrorCode::DimensionMismatch, "FFT length must be positive");
  in_ = static_cast<Complex*>(fftw_malloc(sizeof(fftw_complex) * n));
  out_ = static_cast<Complex*>(fftw_malloc(sizeof(fftw_complex) * n));
  std::lock_guard<std::mutex> lock(planner_mutex());
  // FFTW_ESTIMATE keeps planning deterministic (no runtime measurement).
  fwd_ = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(in_),
                          reinterpret_cast<fftw_complex*>(out_), FFTW_FORWARD, FFTW_ESTIMATE);
  inv_ = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(in_),
                          reinterpret_cast<fftw_complex*>(out_), FFTW_BACKWARD, FFTW_ESTIMATE);
}

FftPlan::~FftPlan() {
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(inv_));
  }
  fftw_free(in_);
  fftw_free(out_);
}

void FftPlan::forward(const Complex* src, int len, VectorXcd& dst) {
  if (len > n_) raise(ErrorCode::DimensionMismatch, "input longer than FFT plan");
  std::memcpy(in_, src, sizeof(Complex) * len);
  std::memset(in_ + len, 0, sizeof(Complex) * (n_ - len));
  fftw_execute(static_cast<fftw_plan>(fwd_));
  dst.resize(n_);
  std::memcpy(dst.data(), out_, sizeof(Complex) * n_);
}

void FftPlan::inverse(const VectorXcd& freq, VectorXcd& dst) {
  if (freq.size() != n_) raise(ErrorCode::DimensionMismatch, "frequency buffer length mismatch");
  std::memcpy(in_, freq.data(), sizeof(Complex) * n_);
  fftw_execute(static_cast<fftw_plan>(inv_));
  dst.resize(n_);
  const double scale = 1.0 / n_;
  for (int i = 0; i < n_; ++i) dst[i] = out_[i] * scale;
}

FftPlan& plan_for(int n) {
  thread_local std::unordered_map<int, std::unique_ptr<FftPlan>> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, std::make_unique<FftPlan>(n)).first;
  return *it->second;
}

VectorXcd fft_convolve(const VectorXcd& a, const VectorXcd& b) {
  const int out_len = static_cast<int>(a.size() + b.size()) - 1;
  FftPlan& plan = plan_for(next_pow2_at_least(out_len));
  VectorXcd fa, fb, full;
  plan.forward(a.data(), static_cast<int>(a.size()), fa);
  plan.forward(b.data(), static_cast<int>(b.size()), fb);
  fa.array() *= fb.array();
  plan.inverse(fa, full);
  return full.head(out_len);
}

}  // namespace stht
