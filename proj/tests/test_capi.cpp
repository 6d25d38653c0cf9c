#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "spectral_ht.h"

// This binary deliberately includes only the C header and links only the
// shared library, exercising the interface an external caller sees.

using Catch::Approx;
namespace fs = std::filesystem;

namespace {

/* The n = 8 single-mode instance at f = 0.25: samples are powers of i. */
struct Instance {
  int n = 8;
  int k = 1;
  std::vector<int> omega;
  std::vector<double> observed;  // interleaved
  std::vector<double> truth;     // interleaved
};

Instance full_instance() {
  Instance inst;
  const std::complex<double> i_unit(0.0, 1.0);
  std::complex<double> v(1.0, 0.0);
  for (int i = 1; i <= inst.n; ++i) {
    inst.omega.push_back(i);
    inst.observed.push_back(v.real());
    inst.observed.push_back(v.imag());
    inst.truth.push_back(v.real());
    inst.truth.push_back(v.imag());
    v *= i_unit;
  }
  return inst;
}

double interleaved_nmse(const std::vector<double>& est, const std::vector<double>& ref) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double d = est[i] - ref[i];
    num += d * d;
    den += ref[i] * ref[i];
  }
  return num / den;
}

std::uint64_t splitmix_fin(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "stht_capi_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

}  // namespace

TEST_CASE("stht_solver_config_init fills the documented defaults") {
  stht_solver_config cfg;
  stht_solver_config_init(&cfg);
  REQUIRE(cfg.max_iter == 3000);
  REQUIRE(cfg.grad_tol == Approx(1e-6));
  REQUIRE(cfg.safeguard_c == Approx(1e-8));
  REQUIRE(cfg.rescale_safeguard == 0);
  REQUIRE(cfg.armijo_c == Approx(1e-5));
  REQUIRE(cfg.lambda == Approx(1e-8));
  REQUIRE(cfg.mu_override <= 0.0);
  REQUIRE(cfg.max_backtracks == 60);
  REQUIRE(cfg.seed == 0);
}

TEST_CASE("stht_solve recovers a fully observed single mode") {
  const Instance inst = full_instance();
  stht_result* result =
      stht_solve(inst.n, inst.omega.data(), static_cast<int>(inst.omega.size()),
                 inst.observed.data(), inst.k, nullptr, inst.truth.data());
  REQUIRE(result != nullptr);
  REQUIRE(stht_result_status(result) == STHT_STATUS_GRAD_TOLERANCE_MET);
  REQUIRE(stht_result_iterations(result) > 0);
  REQUIRE(stht_result_signal_len(result) == inst.n);

  std::vector<double> signal(2 * inst.n);
  stht_result_signal(result, signal.data());
  REQUIRE(interleaved_nmse(signal, inst.truth) < 1e-6);

  REQUIRE(stht_result_final_nmse(result) < 1e-6);
  REQUIRE(stht_result_best_nmse(result) <= stht_result_final_nmse(result));

  char* csv = stht_result_trace_csv(result);
  REQUIRE(csv != nullptr);
  REQUIRE(std::string(csv).rfind("iter,", 0) == 0);
  REQUIRE(std::string(csv).find("nmse") != std::string::npos);
  stht_string_free(csv);

  stht_result_free(result);
}

TEST_CASE("stht_solve without truth reports NaN NMSE") {
  const Instance inst = full_instance();
  stht_result* result =
      stht_solve(inst.n, inst.omega.data(), static_cast<int>(inst.omega.size()),
                 inst.observed.data(), inst.k, nullptr, nullptr);
  REQUIRE(result != nullptr);
  REQUIRE(std::isnan(stht_result_final_nmse(result)));
  REQUIRE(std::isnan(stht_result_best_nmse(result)));

  char* csv = stht_result_trace_csv(result);
  REQUIRE(std::string(csv).find("nmse") == std::string::npos);
  stht_string_free(csv);
  stht_result_free(result);
}

TEST_CASE("stht_solve reports failures through the error channel") {
  const Instance inst = full_instance();
  std::vector<int> bad = inst.omega;
  bad[0] = 0;  // indices are 1-based

  stht_result* result =
      stht_solve(inst.n, bad.data(), static_cast<int>(bad.size()),
                 inst.observed.data(), inst.k, nullptr, nullptr);
  REQUIRE(result == nullptr);
  REQUIRE(stht_last_error_code() == STHT_ERR_BAD_INDEX);
  REQUIRE(stht_last_error() != nullptr);
  REQUIRE(std::string(stht_last_error()).size() > 0);

  SECTION("config validation surfaces as INVALID_CONFIG") {
    stht_solver_config cfg;
    stht_solver_config_init(&cfg);
    cfg.armijo_c = 2.0;
    stht_result* none =
        stht_solve(inst.n, inst.omega.data(), static_cast<int>(inst.omega.size()),
                   inst.observed.data(), inst.k, &cfg, nullptr);
    REQUIRE(none == nullptr);
    REQUIRE(stht_last_error_code() == STHT_ERR_INVALID_CONFIG);
  }
}

TEST_CASE("stht_trial_seed matches the documented chain") {
  std::uint64_t s = splitmix_fin(905ull ^ 0x9e3779b97f4a7c15ull);
  s = splitmix_fin(s ^ 24ull);
  s = splitmix_fin(s ^ 4ull);
  s = splitmix_fin(s ^ 9ull);
  REQUIRE(stht_trial_seed(905, 24, 4, 9) == s);
}

TEST_CASE("stht_run_experiment dispatches a convergence run") {
  const fs::path out = work_dir() / "capi_convergence.csv";
  const std::string config =
      std::string(R"({"n": 16, "m": 16, "k": 1, "seed": 4, "solver": {"max_iter": 200},)") +
      R"( "output_path": ")" + out.string() + R"("})";

  char* message = nullptr;
  const int code = stht_run_experiment("convergence", config.c_str(), nullptr, 0, 1,
                                       &message);
  REQUIRE(code == 0);
  REQUIRE(message != nullptr);
  REQUIRE(std::string(message).find("convergence") != std::string::npos);
  stht_string_free(message);
  REQUIRE(fs::exists(out));

  SECTION("failures return exit code 1 and set the error") {
    char* msg2 = nullptr;
    const int bad = stht_run_experiment("convergence", "{ nope", nullptr, 0, 1, &msg2);
    REQUIRE(bad == 1);
    REQUIRE(msg2 != nullptr);
    stht_string_free(msg2);
    REQUIRE(stht_last_error_code() != STHT_ERR_NONE);
  }
}
