#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spectralht/harness.hpp"
#include "spectralht/rng.hpp"
#include "spectralht/signal.hpp"
#include "spectralht/solver.hpp"
#include "support/test_util.hpp"

using namespace stht;
using namespace stht::testing;
using Catch::Approx;

namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "stht_harness_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Parse a CSV body into rows of strings; keeps the header separate.
struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Csv parse_csv(const std::string& text) {
  Csv out;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (first) {
      out.header = cells;
      first = false;
    } else {
      out.rows.push_back(cells);
    }
  }
  return out;
}

int column(const Csv& csv, const std::string& name) {
  for (std::size_t i = 0; i < csv.header.size(); ++i)
    if (csv.header[i] == name) return static_cast<int>(i);
  return -1;
}

}  // namespace

TEST_CASE("trial_seed follows the documented mixing chain") {
  const std::uint64_t master = 42;
  std::uint64_t s = mix64(master ^ 0x9e3779b97f4a7c15ull);
  s = mix64(s ^ 16ull);
  s = mix64(s ^ 3ull);
  s = mix64(s ^ 7ull);
  REQUIRE(trial_seed(42, 16, 3, 7) == s);

  SECTION("distinct trials get distinct seeds") {
    REQUIRE(trial_seed(1, 8, 2, 0) != trial_seed(1, 8, 2, 1));
    REQUIRE(trial_seed(1, 8, 2, 0) != trial_seed(1, 8, 3, 0));
    REQUIRE(trial_seed(1, 8, 2, 0) != trial_seed(2, 8, 2, 0));
  }
}

TEST_CASE("config_from_json parses a convergence experiment") {
  const std::string text = R"({
    "experiment": "convergence",
    "n": 70, "m": 40, "k": 6,
    "freqs": [0.0573, 0.1382, 0.7245, 0.7561, 0.8846, 0.9954],
    "seed": 5,
    "output_path": "out.csv",
    "solver": {"max_iter": 500, "grad_tol": 1e-7, "lambda": 1e-9}
  })";
  const ExperimentConfig cfg = config_from_json(text);
  REQUIRE(cfg.experiment == ExperimentKind::Convergence);
  REQUIRE(cfg.n_grid == std::vector<int>{70});
  REQUIRE(cfg.m_grid == std::vector<int>{40});
  REQUIRE(cfg.k_grid == std::vector<int>{6});
  REQUIRE(cfg.freqs.size() == 6);
  REQUIRE(cfg.freqs(0) == Approx(0.0573));
  REQUIRE(cfg.seed == 5);
  REQUIRE(cfg.output_path == "out.csv");
  REQUIRE(cfg.solver.max_iter == 500);
  REQUIRE(cfg.solver.grad_tol == Approx(1e-7));
  REQUIRE(cfg.solver.lambda == Approx(1e-9));
}

TEST_CASE("config_from_json rejects malformed input") {
  REQUIRE(raises(ErrorCode::ParseError, [] { config_from_json("{ nope"); }));
  REQUIRE(raises(ErrorCode::ParseError, [] {
    config_from_json(R"({"n": 4, "m": 4, "k": 1, "output_path": "x"})");
  }));
  // Unknown keys, wrong types and bad ranges are configuration errors.
  REQUIRE(raises(ErrorCode::InvalidConfig, [] {
    config_from_json(R"({"experiment": "convergence", "n": 8, "m": 8, "k": 1,
                         "output_path": "x", "typo_key": 1})");
  }));
  REQUIRE(raises(ErrorCode::InvalidConfig, [] {
    config_from_json(R"({"experiment": "convergence", "n": "eight", "m": 8,
                         "k": 1, "output_path": "x"})");
  }));
  REQUIRE(raises(ErrorCode::InvalidConfig, [] {
    config_from_json(R"({"experiment": "convergence", "n": 8, "m": 9, "k": 1,
                         "output_path": "x"})");
  }));
  REQUIRE(raises(ErrorCode::InvalidConfig, [] {
    config_from_json(R"({"experiment": "convergence", "n": 8, "m": 8, "k": 1,
                         "output_path": "x", "solver": {"armijo_C": 1.0}})");
  }));
  REQUIRE(raises(ErrorCode::InvalidConfig, [] {
    config_from_json(R"({"experiment": "phase_transition", "n": 8, "m": [],
                         "k": 1, "output_path": "x"})");
  }));
  REQUIRE(raises(ErrorCode::InvalidConfig, [] {
    config_from_json(R"({"experiment": "convergence", "n": 8, "m": 8, "k": 2,
                         "freqs": [0.1], "output_path": "x"})");
  }));
}

TEST_CASE("config_from_json reconciles the subcommand hint") {
  const std::string no_kind = R"({"n": 8, "m": 8, "k": 1, "output_path": "x"})";
  const ExperimentConfig cfg = config_from_json(no_kind, "convergence");
  REQUIRE(cfg.experiment == ExperimentKind::Convergence);

  REQUIRE(raises(ErrorCode::InvalidConfig, [&] {
    config_from_json(R"({"experiment": "timing", "n": 8, "k": 1,
                         "output_path": "x"})",
                     "convergence");
  }));

  SECTION("aliases are accepted") {
    const ExperimentConfig phase = config_from_json(
        R"({"experiment": "phase", "n": 8, "m": [4, 8], "k": [1],
            "output_path": "x"})");
    REQUIRE(phase.experiment == ExperimentKind::PhaseTransition);
  }
}

TEST_CASE("timing configs fill their grids and refuse explicit m") {
  const ExperimentConfig cfg = config_from_json(
      R"({"experiment": "timing", "output_path": "x"})");
  REQUIRE(cfg.n_grid == std::vector<int>{64, 256, 1024, 4096});
  REQUIRE(cfg.k_grid == std::vector<int>{6});

  REQUIRE(raises(ErrorCode::InvalidConfig, [] {
    config_from_json(R"({"experiment": "timing", "m": 32, "output_path": "x"})");
  }));
}

TEST_CASE("run_convergence writes a deterministic trace") {
  const fs::path out = work_dir() / "convergence.csv";
  fs::remove(out);  // the body reruns once per section
  std::ostringstream cfg_text;
  cfg_text << R"({"experiment": "convergence", "n": 16, "m": 16, "k": 1,)"
           << R"( "seed": 3, "solver": {"max_iter": 200},)"
           << R"( "output_path": ")" << out.string() << R"("})";

  const ExperimentConfig cfg = config_from_json(cfg_text.str());
  const ExperimentOutcome first = run_convergence(cfg);
  REQUIRE(first.exit_code == 0);
  const std::string once = read_file(out);

  const Csv csv = parse_csv(once);
  REQUIRE(csv.header == std::vector<std::string>{"iter", "nmse", "hhat", "grad_norm_sq"});
  REQUIRE_FALSE(csv.rows.empty());
  const int nmse_col = column(csv, "nmse");
  REQUIRE(std::stod(csv.rows.back()[nmse_col]) < 1e-6);
  REQUIRE(csv.rows.size() <= 50);  // full observation converges fast

  SECTION("existing outputs are refused without force") {
    REQUIRE(raises(ErrorCode::IoError, [&] { run_convergence(cfg); }));
    REQUIRE(read_file(out) == once);

    // The dispatch wrapper reports the refusal as an exit code instead.
    const ExperimentOutcome blocked =
        run_experiment_json("convergence", cfg_text.str(), "", false, 1);
    REQUIRE(blocked.exit_code == 1);
    REQUIRE(blocked.message.find("IoError") != std::string::npos);
  }

  SECTION("reruns are byte-identical") {
    ExperimentConfig redo = cfg;
    redo.force = true;
    REQUIRE(run_convergence(redo).exit_code == 0);
    REQUIRE(read_file(out) == once);
  }
}

TEST_CASE("run_phase_transition sweeps the grid") {
  const fs::path out = work_dir() / "phase.csv";
  std::ostringstream cfg_text;
  cfg_text << R"({"experiment": "phase_transition", "n": 16, "m": [8, 16],)"
           << R"( "k": [1, 6], "trials": 2, "seed": 7, "stop_on_success": true,)"
           << R"( "solver": {"max_iter": 150},)"
           << R"( "output_path": ")" << out.string() << R"("})";
  ExperimentConfig cfg = config_from_json(cfg_text.str());

  REQUIRE(run_phase_transition(cfg).exit_code == 0);
  const Csv csv = parse_csv(read_file(out));
  REQUIRE(csv.header ==
          std::vector<std::string>{"m", "k", "success_rate", "mean_iters", "skipped"});
  REQUIRE(csv.rows.size() == 4);

  std::map<std::pair<int, int>, std::vector<std::string>> by_cell;
  for (const auto& row : csv.rows)
    by_cell[{std::stoi(row[0]), std::stoi(row[1])}] = row;

  // 3k >= 2m marks the cell as skipped with zero successes.
  const auto& skipped = by_cell[{8, 6}];
  REQUIRE(skipped[2] == "0");
  REQUIRE(std::stoi(skipped[4]) == 1);
  REQUIRE(std::stoi(skipped[3]) == 150);

  // Full observation with one mode always succeeds.
  const auto& easy = by_cell[{16, 1}];
  REQUIRE(std::stod(easy[2]) == Approx(1.0));
  REQUIRE(std::stoi(easy[4]) == 0);

  for (const auto& row : csv.rows) {
    const double rate = std::stod(row[2]);
    REQUIRE(rate >= 0.0);
    REQUIRE(rate <= 1.0);
  }

  SECTION("thread count does not change the bytes") {
    const std::string serial = read_file(out);
    ExperimentConfig redo = cfg;
    redo.force = true;
    redo.threads = 4;
    REQUIRE(run_phase_transition(redo).exit_code == 0);
    REQUIRE(read_file(out) == serial);
  }
}

TEST_CASE("run_timing derives m and reports per-iteration cost") {
  const fs::path out = work_dir() / "timing.csv";
  std::ostringstream cfg_text;
  cfg_text << R"({"experiment": "timing", "n": [16, 32], "k": 2, "trials": 1,)"
           << R"( "seed": 11, "success_nmse": 1e30,)"
           << R"( "solver": {"max_iter": 10, "grad_tol": 1e-300},)"
           << R"( "output_path": ")" << out.string() << R"("})";
  ExperimentConfig cfg = config_from_json(cfg_text.str());

  REQUIRE(run_timing(cfg).exit_code == 0);
  const Csv csv = parse_csv(read_file(out));
  REQUIRE(csv.header ==
          std::vector<std::string>{"n", "mean_wall_ms_per_iter", "iters", "nmse"});
  REQUIRE(csv.rows.size() == 2);
  REQUIRE(std::stoi(csv.rows[0][0]) == 16);
  REQUIRE(std::stoi(csv.rows[1][0]) == 32);
  for (const auto& row : csv.rows) {
    REQUIRE(std::stod(row[1]) > 0.0);
    REQUIRE(std::stoi(row[2]) == 10);
  }

  SECTION("wall-independent columns are deterministic") {
    const Csv before = csv;
    ExperimentConfig redo = cfg;
    redo.force = true;
    REQUIRE(run_timing(redo).exit_code == 0);
    const Csv after = parse_csv(read_file(out));
    REQUIRE(after.rows.size() == before.rows.size());
    for (std::size_t i = 0; i < before.rows.size(); ++i) {
      REQUIRE(after.rows[i][0] == before.rows[i][0]);
      REQUIRE(after.rows[i][2] == before.rows[i][2]);
      REQUIRE(after.rows[i][3] == before.rows[i][3]);
    }
  }
}

TEST_CASE("run_single solves an instance file end to end") {
  // Stage the instance: a 1-mode signal observed everywhere.
  const SpectralSignal sig = random_instance(16, 1, 0.0, 2024);
  const ObservationSet omega = sample_observation_set(16, 16, 1);
  const VectorXcd obs = observe(sig.samples, omega);

  std::ostringstream instance;
  instance << R"({"n": 16, "k": 1, "omega": [)";
  for (int i = 0; i < omega.m(); ++i) instance << (i ? "," : "") << omega.indices[i];
  instance << R"(], "observed": [)";
  for (int i = 0; i < obs.size(); ++i)
    instance << (i ? "," : "") << "[" << obs(i).real() << "," << obs(i).imag() << "]";
  instance << "]}";

  const fs::path in_path = work_dir() / "single_in.json";
  {
    std::ofstream out(in_path);
    out << instance.str();
  }
  const fs::path out_path = work_dir() / "single_out.json";

  std::ostringstream cfg_text;
  cfg_text << R"({"experiment": "single_solve", "seed": 5,)"
           << R"( "input_path": ")" << in_path.string() << R"(",)"
           << R"( "output_path": ")" << out_path.string() << R"("})";
  const ExperimentConfig cfg = config_from_json(cfg_text.str());

  fs::remove(out_path);  // the body reruns once per section
  fs::remove(out_path.string() + ".trace.csv");
  const ExperimentOutcome outcome = run_single(cfg);
  REQUIRE(outcome.exit_code == 0);  // gradient tolerance met

  // The recovered signal is a JSON array of [re, im] samples.
  const nlohmann::json arr = nlohmann::json::parse(read_file(out_path));
  REQUIRE(arr.is_array());
  REQUIRE(arr.size() == 16);
  VectorXcd recovered(16);
  for (int i = 0; i < 16; ++i)
    recovered(i) = std::complex<double>(arr[i][0].get<double>(), arr[i][1].get<double>());
  REQUIRE(nmse(recovered, sig.samples) < 1e-6);

  const Csv trace = parse_csv(read_file(out_path.string() + ".trace.csv"));
  REQUIRE(trace.header.front() == "iter");
  REQUIRE_FALSE(trace.rows.empty());

  SECTION("bad instances exit with code 1 and a reason") {
    const fs::path bad_path = work_dir() / "single_bad.json";
    {
      std::ofstream out(bad_path);
      out << R"({"n": 8, "k": 1, "omega": [0, 2], "observed": [[1,0],[1,0]]})";
    }
    std::ostringstream bad_cfg;
    bad_cfg << R"({"experiment": "single_solve", "input_path": ")"
            << bad_path.string() << R"(", "output_path": ")"
            << (work_dir() / "single_bad_out.json").string() << R"("})";
    const ExperimentOutcome bad = run_experiment_json(
        "", bad_cfg.str(), "", false, 1);
    REQUIRE(bad.exit_code == 1);
    REQUIRE(bad.message.find("BadIndex") != std::string::npos);
  }

  SECTION("rank requests beyond the lift are rejected") {
    const fs::path big_path = work_dir() / "single_bigk.json";
    {
      std::ofstream out(big_path);
      out << R"({"n": 8, "k": 5, "omega": [1, 2], "observed": [[1,0],[1,0]]})";
    }
    std::ostringstream big_cfg;
    big_cfg << R"({"experiment": "single_solve", "input_path": ")"
            << big_path.string() << R"(", "output_path": ")"
            << (work_dir() / "single_bigk_out.json").string() << R"("})";
    const ExperimentOutcome big = run_experiment_json("", big_cfg.str(), "", false, 1);
    REQUIRE(big.exit_code == 1);
    REQUIRE(big.message.find("SparsityTooLarge") != std::string::npos);
  }
}

TEST_CASE("run_experiment_json surfaces errors instead of throwing") {
  const ExperimentOutcome bad_json = run_experiment_json("", "{ nope", "", false, 1);
  REQUIRE(bad_json.exit_code == 1);
  REQUIRE_FALSE(bad_json.message.empty());

  const ExperimentOutcome no_out = run_experiment_json(
      "convergence", R"({"n": 8, "m": 8, "k": 1})", "", false, 1);
  REQUIRE(no_out.exit_code == 1);

  SECTION("the out override replaces the configured path") {
    const fs::path out = work_dir() / "override.csv";
    const ExperimentOutcome ok = run_experiment_json(
        "convergence",
        R"({"n": 8, "m": 8, "k": 1, "seed": 2, "solver": {"max_iter": 120}})",
        out.string(), false, 1);
    REQUIRE(ok.exit_code == 0);
    REQUIRE(fs::exists(out));
  }
}
