#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spectralht/types.hpp"

namespace stht {

class Rng;

/// A length-n superposition of K complex sinusoids,
///   y[i] = sum_k coeffs[k] * exp(j*2*pi*(i-1)*freqs[k]),  i = 1..n  (1-based).
/// Frequencies live on the unit circle [0,1) and are pairwise distinct;
/// coefficients are nonzero.
struct SpectralSignal {
  int n = 0;
  VectorXd freqs;
  VectorXcd coeffs;
  VectorXcd samples;
  std::optional<std::uint64_t> seed;  // set when drawn by random_instance
};

SpectralSignal generate_signal(int n, const VectorXd& freqs, const VectorXcd& coeffs);

/// Distance between frequencies with wrap-around, min(|f1-f2|, 1-|f1-f2|).
double wrap_distance(double f1, double f2);

/// Draw k coefficients with amplitude 1+|N(0,1)| and phase U[0,2pi).
VectorXcd random_coefficients(int k, Rng& rng);

/// Random instance: frequencies uniform on [0,1) rejection-sampled until all
/// pairwise wrap-around distances reach min_separation (10000-attempt cap),
/// coefficients from random_coefficients.
SpectralSignal random_instance(int n, int k, double min_separation, std::uint64_t seed);

std::string signal_to_json(const SpectralSignal& sig);
SpectralSignal signal_from_json(const std::string& text);

/// Sample positions: a strictly increasing subset of {1, ..., n} (1-based,
/// matching the sample indexing above).
struct ObservationSet {
  int n = 0;
  std::vector<int> indices;
  int m() const { return static_cast<int>(indices.size()); }
};

ObservationSet make_observation_set(int n, std::vector<int> indices);

/// m indices drawn uniformly without replacement from {1..n}, sorted.
ObservationSet sample_observation_set(int n, int m, std::uint64_t seed);

/// Restrict y (length omega.n) to the observed positions.
VectorXcd observe(const VectorXcd& y, const ObservationSet& omega);

/// Scatter v back onto a length-len vector (len >= omega.n, default omega.n),
/// zero off omega.
VectorXcd embed(const VectorXcd& v, const ObservationSet& omega, int len = -1);

/// ||estimate - reference||^2 / ||reference||^2.
double nmse(const VectorXcd& estimate, const VectorXcd& reference);

/// Sparsity levels K below which recovery is information-theoretically
/// plausible from m samples: returns ((m+1)/2, 2m/3). The first is the
/// deterministic uniqueness bound, the second the phase-transition bound.
std::pair<double, double> identifiability_bounds(int m);

}  // namespace stht
