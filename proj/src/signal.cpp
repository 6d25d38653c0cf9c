#include "spectralht/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "spectralht/errors.hpp"
#include "spectralht/rng.hpp"

namespace stht {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr int kSeparationAttemptCap = 10000;

double reduce_mod1(double f) {
  double r = f - std::floor(f);
  if (r >= 1.0) r = 0.0;  // guards the f = -1e-18 style edge where r rounds to 1
  return r;
}

VectorXcd synthesize(int n, const VectorXd& freqs, const VectorXcd& coeffs) {
  VectorXcd y = VectorXcd::Zero(n);
  for (int k = 0; k < freqs.size(); ++k) {
    const double w = kTwoPi * freqs[k];
    for (int i = 0; i < n; ++i) y[i] += coeffs[k] * std::polar(1.0, w * i);
  }
  return y;
}

}  // namespace

SpectralSignal generate_signal(int n, const VectorXd& freqs, const VectorXcd& coeffs) {
  if (n < 1) raise(ErrorCode::InvalidConfig, "signal length must be >= 1");
  if (freqs.size() != coeffs.size())
    raise(ErrorCode::DimensionMismatch, "frequency and coefficient counts differ");
  if (freqs.size() < 1) raise(ErrorCode::DimensionMismatch, "need at least one mode");

  SpectralSignal sig;
  sig.n = n;
  sig.freqs.resize(freqs.size());
  for (int k = 0; k < freqs.size(); ++k) sig.freqs[k] = reduce_mod1(freqs[k]);
  for (int a = 0; a < sig.freqs.size(); ++a)
    for (int b = a + 1; b < sig.freqs.size(); ++b)
      if (sig.freqs[a] == sig.freqs[b])
        raise(ErrorCode::DuplicateFrequency,
              "frequencies coincide mod 1 at positions " + std::to_string(a) + " and " +
                  std::to_string(b));
  for (int k = 0; k < coeffs.size(); ++k)
    if (coeffs[k] == Complex(0.0, 0.0))
      raise(ErrorCode::ZeroCoefficient, "coefficient " + std::to_string(k) + " is zero");
  sig.coeffs = coeffs;
  sig.samples = synthesize(n, sig.freqs, sig.coeffs);
  return sig;
}

double wrap_distance(double f1, double f2) {
  const double d = std::abs(reduce_mod1(f1) - reduce_mod1(f2));
  return std::min(d, 1.0 - d);
}

VectorXcd random_coefficients(int k, Rng& rng) {
  VectorXcd c(k);
  for (int i = 0; i < k; ++i) {
    const double amplitude = 1.0 + std::abs(rng.normal());
    const double phase = kTwoPi * rng.uniform01();
    c[i] = std::polar(amplitude, phase);
  }
  return c;
}

SpectralSignal random_instance(int n, int k, double min_separation, std::uint64_t seed) {
  if (n < 1) raise(ErrorCode::InvalidConfig, "signal length must be >= 1");
  if (k < 1) raise(ErrorCode::InvalidConfig, "mode count must be >= 1");
  if (min_separation > 0.0 && static_cast<double>(k) * min_separation >= 1.0)
    raise(ErrorCode::SeparationInfeasible,
          "cannot place " + std::to_string(k) + " frequencies with pairwise separation " +
              std::to_string(min_separation) + " on the unit circle");

  Rng rng(seed);
  VectorXd freqs(k);
  bool ok = false;
  for (int attempt = 0; attempt < kSeparationAttemptCap && !ok; ++attempt) {
    for (int i = 0; i < k; ++i) freqs[i] = rng.uniform01();
    ok = true;
    for (int a = 0; a < k && ok; ++a)
      for (int b = a + 1; b < k && ok; ++b)
        if (wrap_distance(freqs[a], freqs[b]) < min_separation) ok = false;
    // min_separation == 0 still rejects exact collisions via DuplicateFrequency
    // semantics below; probability zero but cheap to guard.
    for (int a = 0; a < k && ok; ++a)
      for (int b = a + 1; b < k && ok; ++b)
        if (freqs[a] == freqs[b]) ok = false;
  }
  if (!ok)
    raise(ErrorCode::SeparationInfeasible,
          "rejection sampling failed after " + std::to_string(kSeparationAttemptCap) +
              " attempts");

  SpectralSignal sig = generate_signal(n, freqs, random_coefficients(k, rng));
  sig.seed = seed;
  return sig;
}

std::string signal_to_json(const SpectralSignal& sig) {
  nlohmann::json j;
  j["n"] = sig.n;
  j["freqs"] = std::vector<double>(sig.freqs.data(), sig.freqs.data() + sig.freqs.size());
  auto& coeffs = j["coeffs"] = nlohmann::json::array();
  for (int k = 0; k < sig.coeffs.size(); ++k)
    coeffs.push_back({sig.coeffs[k].real(), sig.coeffs[k].imag()});
  if (sig.seed)
    j["seed"] = *sig.seed;
  else
    j["seed"] = nullptr;
  return j.dump();
}

SpectralSignal signal_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    raise(ErrorCode::ParseError, e.what());
  }
  try {
    const int n = j.at("n").get<int>();
    const auto fv = j.at("freqs").get<std::vector<double>>();
    VectorXd freqs = Eigen::Map<const VectorXd>(fv.data(), fv.size());
    const auto& cj = j.at("coeffs");
    VectorXcd coeffs(cj.size());
    for (std::size_t k = 0; k < cj.size(); ++k)
      coeffs[k] = Complex(cj[k].at(0).get<double>(), cj[k].at(1).get<double>());
    SpectralSignal sig = generate_signal(n, freqs, coeffs);
    if (j.contains("seed") && !j["seed"].is_null()) sig.seed = j["seed"].get<std::uint64_t>();
    return sig;
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::ParseError, std::string("signal JSON: ") + e.what());
  }
}

ObservationSet make_observation_set(int n, std::vector<int> indices) {
  if (n < 1) raise(ErrorCode::InvalidConfig, "signal length must be >= 1");
  if (indices.empty()) raise(ErrorCode::BadIndex, "observation set is empty");
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 1 || indices[i] > n)
      raise(ErrorCode::BadIndex,
            "index " + std::to_string(indices[i]) + " outside 1.." + std::to_string(n));
    if (i > 0 && indices[i] <= indices[i - 1])
      raise(ErrorCode::BadIndex, "indices must be strictly increasing");
  }
  return ObservationSet{n, std::move(indices)};
}

ObservationSet sample_observation_set(int n, int m, std::uint64_t seed) {
  if (m < 1 || m > n)
    raise(ErrorCode::BadIndex, "sample count " + std::to_string(m) + " outside 1.." +
                                   std::to_string(n));
  // Partial Fisher-Yates over 1..n, then sort the chosen prefix.
  std::vector<int> pool(n);
  std::iota(pool.begin(), pool.end(), 1);
  Rng rng(seed);
  for (int i = 0; i < m; ++i) {
    const auto j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(pool[i], pool[j]);
  }
  std::vector<int> chosen(pool.begin(), pool.begin() + m);
  std::sort(chosen.begin(), chosen.end());
  return ObservationSet{n, std::move(chosen)};
}

VectorXcd observe(const VectorXcd& y, const ObservationSet& omega) {
  if (y.size() != omega.n) raise(ErrorCode::DimensionMismatch, "signal length != omega.n");
  VectorXcd v(omega.m());
  for (int i = 0; i < omega.m(); ++i) v[i] = y[omega.indices[i] - 1];
  return v;
}

VectorXcd embed(const VectorXcd& v, const ObservationSet& omega, int len) {
  if (len < 0) len = omega.n;
  if (len < omega.n) raise(ErrorCode::DimensionMismatch, "embedding length < omega.n");
  if (v.size() != omega.m()) raise(ErrorCode::DimensionMismatch, "value count != |omega|");
  VectorXcd y = VectorXcd::Zero(len);
  for (int i = 0; i < omega.m(); ++i) y[omega.indices[i] - 1] = v[i];
  return y;
}

double nmse(const VectorXcd& estimate, const VectorXcd& reference) {
  if (estimate.size() != reference.size())
    raise(ErrorCode::DimensionMismatch, "estimate and reference lengths differ");
  const double ref = reference.squaredNorm();
  if (ref == 0.0) raise(ErrorCode::ZeroReference, "reference signal is identically zero");
  return (estimate - reference).squaredNorm() / ref;
}

std::pair<double, double> identifiability_bounds(int m) {
  if (m < 1) raise(ErrorCode::BadIndex, "sample count must be >= 1");
  return {(m + 1) / 2.0, 2.0 * m / 3.0};
}

}  // namespace stht
