#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <set>

#include "spectralht/errors.hpp"
#include "spectralht/rng.hpp"
#include "spectralht/signal.hpp"
#include "support/test_util.hpp"

using namespace stht;
using namespace stht::testing;
using Catch::Approx;

namespace {
const std::complex<double> kI(0.0, 1.0);
}  // namespace

TEST_CASE("generate_signal matches hand-computed samples") {
  SECTION("constant mode at f = 0") {
    VectorXd f(1);
    f << 0.0;
    VectorXcd s(1);
    s << 1.0;
    const SpectralSignal sig = generate_signal(3, f, s);
    VectorXcd want(3);
    want << 1.0, 1.0, 1.0;
    REQUIRE(max_abs_diff(sig.samples, want) < 1e-15);
  }
  SECTION("alternating mode at f = 0.5") {
    VectorXd f(1);
    f << 0.5;
    VectorXcd s(1);
    s << 1.0;
    const SpectralSignal sig = generate_signal(3, f, s);
    VectorXcd want(3);
    want << 1.0, -1.0, 1.0;
    REQUIRE(max_abs_diff(sig.samples, want) < 1e-12);
  }
  SECTION("two conjugate modes sum to a real sequence") {
    VectorXd f(2);
    f << 0.25, 0.75;
    VectorXcd s(2);
    s << 1.0, 1.0;
    const SpectralSignal sig = generate_signal(4, f, s);
    VectorXcd want(4);
    want << 2.0, 0.0, -2.0, 0.0;
    REQUIRE(max_abs_diff(sig.samples, want) < 1e-12);
  }
}

TEST_CASE("generate_signal is linear in the coefficients") {
  Rng rng(11);
  VectorXd f(3);
  f << 0.12, 0.45, 0.83;
  VectorXcd s1 = random_coefficients(3, rng);
  VectorXcd s2 = random_coefficients(3, rng);
  const VectorXcd sum = generate_signal(16, f, s1 + s2).samples;
  const VectorXcd parts =
      generate_signal(16, f, s1).samples + generate_signal(16, f, s2).samples;
  REQUIRE(max_abs_diff(sum, parts) < 1e-12);
}

TEST_CASE("generate_signal validates its inputs") {
  VectorXd f(2);
  VectorXcd s(2);
  s << 1.0, 1.0;

  f << 0.3, 0.3;
  REQUIRE(raises(ErrorCode::DuplicateFrequency, [&] { generate_signal(4, f, s); }));

  f << 0.25, 1.25;  // same point on the circle
  REQUIRE(raises(ErrorCode::DuplicateFrequency, [&] { generate_signal(4, f, s); }));

  f << 0.1, 0.2;
  s << 1.0, 0.0;
  REQUIRE(raises(ErrorCode::ZeroCoefficient, [&] { generate_signal(4, f, s); }));

  VectorXd f1(1);
  f1 << 0.1;
  VectorXcd s1(1);
  s1 << 1.0;
  REQUIRE(raises(ErrorCode::InvalidConfig, [&] { generate_signal(0, f1, s1); }));
  REQUIRE(raises(ErrorCode::DimensionMismatch, [&] { generate_signal(4, f1, s); }));
}

TEST_CASE("frequencies wrap around the unit circle") {
  VectorXd f(1);
  f << 1.25;
  VectorXcd s(1);
  s << 1.0;
  const SpectralSignal hi = generate_signal(8, f, s);
  f << 0.25;
  const SpectralSignal lo = generate_signal(8, f, s);
  REQUIRE(max_abs_diff(hi.samples, lo.samples) < 1e-12);
}

TEST_CASE("wrap_distance folds across 1") {
  REQUIRE(wrap_distance(0.1, 0.9) == Approx(0.2));
  REQUIRE(wrap_distance(0.0, 0.5) == Approx(0.5));
  REQUIRE(wrap_distance(0.3, 0.3) == Approx(0.0));
  REQUIRE(wrap_distance(0.95, 0.05) == Approx(0.1));
}

TEST_CASE("random_instance honors the separation and amplitude laws") {
  const SpectralSignal sig = random_instance(70, 6, 1.5 / 70, 1);
  REQUIRE(sig.freqs.size() == 6);
  for (int a = 0; a < 6; ++a) {
    REQUIRE(sig.freqs(a) >= 0.0);
    REQUIRE(sig.freqs(a) < 1.0);
    for (int b = a + 1; b < 6; ++b)
      REQUIRE(wrap_distance(sig.freqs(a), sig.freqs(b)) >= 1.5 / 70);
  }
  for (int a = 0; a < 6; ++a) REQUIRE(std::abs(sig.coeffs(a)) >= 1.0);
  REQUIRE(sig.seed.has_value());

  const SpectralSignal single = random_instance(70, 1, 0.0, 7);
  REQUIRE(std::abs(single.coeffs(0)) >= 1.0);
}

TEST_CASE("random_instance is deterministic in the seed") {
  const SpectralSignal a = random_instance(32, 4, 1.0 / 32, 99);
  const SpectralSignal b = random_instance(32, 4, 1.0 / 32, 99);
  const SpectralSignal c = random_instance(32, 4, 1.0 / 32, 100);
  REQUIRE(max_abs_diff(a.samples, b.samples) == 0.0);
  REQUIRE(max_abs_diff(a.samples, c.samples) > 0.0);
}

TEST_CASE("random_instance rejects infeasible separation") {
  REQUIRE(raises(ErrorCode::SeparationInfeasible,
                 [] { random_instance(16, 40, 0.05, 3); }));
}

TEST_CASE("observation sets restrict and embed consistently") {
  ObservationSet omega = make_observation_set(3, {1, 3});
  VectorXcd y(3);
  y << 1.0, 2.0, 3.0;
  const VectorXcd v = observe(y, omega);
  VectorXcd want(2);
  want << 1.0, 3.0;
  REQUIRE(max_abs_diff(v, want) == 0.0);

  const VectorXcd back = embed(v, omega, 3);
  VectorXcd lift(3);
  lift << 1.0, 0.0, 3.0;
  REQUIRE(max_abs_diff(back, lift) == 0.0);

  SECTION("embed extends with zeros past n") {
    const VectorXcd wide = embed(v, omega, 5);
    REQUIRE(wide.size() == 5);
    REQUIRE(max_abs_diff(wide.head(3), lift) == 0.0);
    REQUIRE(wide.tail(2).cwiseAbs().maxCoeff() == 0.0);
  }

  SECTION("observe after embed is the identity on observed values") {
    REQUIRE(max_abs_diff(observe(embed(v, omega), omega), v) == 0.0);
  }

  SECTION("adjoint identity <P(y), v> = <y, P*(v)>") {
    Rng rng(5);
    ObservationSet om = sample_observation_set(24, 13, 77);
    VectorXcd full(24), obs(13);
    for (int i = 0; i < 24; ++i) full(i) = {rng.normal(), rng.normal()};
    for (int i = 0; i < 13; ++i) obs(i) = {rng.normal(), rng.normal()};
    const std::complex<double> lhs = observe(full, om).dot(obs);
    const std::complex<double> rhs = full.dot(embed(obs, om, 24));
    REQUIRE(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("observation set construction validates indices") {
  REQUIRE(raises(ErrorCode::BadIndex, [] { make_observation_set(4, {0, 2}); }));
  REQUIRE(raises(ErrorCode::BadIndex, [] { make_observation_set(4, {1, 5}); }));
  REQUIRE(raises(ErrorCode::BadIndex, [] { make_observation_set(4, {2, 2}); }));
  REQUIRE(raises(ErrorCode::BadIndex, [] { make_observation_set(4, {3, 1}); }));
  REQUIRE(raises(ErrorCode::BadIndex, [] { make_observation_set(4, {}); }));
  const ObservationSet ok = make_observation_set(4, {1, 4});
  REQUIRE(ok.m() == 2);
}

TEST_CASE("sample_observation_set draws sorted subsets reproducibly") {
  const ObservationSet a = sample_observation_set(40, 17, 3);
  const ObservationSet b = sample_observation_set(40, 17, 3);
  REQUIRE(a.indices == b.indices);
  REQUIRE(a.m() == 17);
  std::set<int> seen;
  int prev = 0;
  for (int idx : a.indices) {
    REQUIRE(idx > prev);
    REQUIRE(idx >= 1);
    REQUIRE(idx <= 40);
    prev = idx;
    seen.insert(idx);
  }
  REQUIRE(static_cast<int>(seen.size()) == 17);

  const ObservationSet full = sample_observation_set(6, 6, 9);
  REQUIRE(full.indices == std::vector<int>{1, 2, 3, 4, 5, 6});

  REQUIRE(raises(ErrorCode::BadIndex, [] { sample_observation_set(6, 0, 1); }));
  REQUIRE(raises(ErrorCode::BadIndex, [] { sample_observation_set(6, 7, 1); }));
}

TEST_CASE("nmse matches its defining ratio") {
  VectorXcd truth(3);
  truth << 1.0, kI, -1.0;
  REQUIRE(nmse(truth, truth) == Approx(0.0));
  REQUIRE(nmse(2.0 * truth, truth) == Approx(1.0));
  REQUIRE(nmse(VectorXcd::Zero(3), truth) == Approx(1.0));
  REQUIRE(raises(ErrorCode::ZeroReference,
                 [&] { nmse(truth, VectorXcd::Zero(3)); }));
  REQUIRE(raises(ErrorCode::DimensionMismatch,
                 [&] { nmse(VectorXcd::Zero(2), truth); }));
}

TEST_CASE("identifiability_bounds returns the two sparsity thresholds") {
  auto [unique40, phase40] = identifiability_bounds(40);
  REQUIRE(unique40 == Approx(20.5));
  REQUIRE(phase40 == Approx(80.0 / 3.0));
  auto [unique1, phase1] = identifiability_bounds(1);
  REQUIRE(unique1 == Approx(1.0));
  REQUIRE(phase1 == Approx(2.0 / 3.0));
  auto [unique3, phase3] = identifiability_bounds(3);
  REQUIRE(unique3 == Approx(2.0));
  REQUIRE(phase3 == Approx(2.0));
  REQUIRE(raises(ErrorCode::BadIndex, [] { identifiability_bounds(0); }));
}

TEST_CASE("signal JSON serialization round-trips") {
  const SpectralSignal sig = random_instance(24, 3, 1.0 / 24, 42);
  const SpectralSignal back = signal_from_json(signal_to_json(sig));
  REQUIRE(back.n == sig.n);
  REQUIRE((back.freqs - sig.freqs).cwiseAbs().maxCoeff() < 1e-15);
  REQUIRE(max_abs_diff(back.coeffs, sig.coeffs) < 1e-15);
  REQUIRE(max_abs_diff(back.samples, sig.samples) < 1e-12);
  REQUIRE(back.seed == sig.seed);

  SECTION("seed may be null") {
    VectorXd f(1);
    f << 0.25;
    VectorXcd s(1);
    s << kI;
    SpectralSignal manual = generate_signal(4, f, s);
    REQUIRE_FALSE(manual.seed.has_value());
    const SpectralSignal redo = signal_from_json(signal_to_json(manual));
    REQUIRE_FALSE(redo.seed.has_value());
    REQUIRE(max_abs_diff(redo.samples, manual.samples) < 1e-12);
  }

  SECTION("malformed text is a parse error") {
    REQUIRE(raises(ErrorCode::ParseError, [] { signal_from_json("{ nope"); }));
    REQUIRE(raises(ErrorCode::ParseError, [] { signal_from_json("{\"n\": 4}"); }));
  }

  SECTION("semantic validation still applies") {
    REQUIRE(raises(ErrorCode::DuplicateFrequency, [] {
      signal_from_json(
          "{\"n\":4,\"freqs\":[0.2,0.2],\"coeffs\":[[1,0],[1,0]],\"seed\":null}");
    }));
  }
}
