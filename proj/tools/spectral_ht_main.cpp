#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "spectral_ht.h"

namespace {

int usage(std::ostream& out, int code) {
  out << "usage: spectral-ht <convergence|phase|timing|solve> --config <path.json>\n"
         "                   [--out <path>] [--force] [--threads <n>]\n"
         "\n"
         "Runs the experiment described by the JSON config (schema in README.md).\n"
         "--out overrides the config's output path; --force overwrites existing\n"
         "outputs; --threads caps trial parallelism.\n"
         "Exit codes: 0 success, 1 bad config/input or I/O failure. The solve\n"
         "subcommand exits with the solver's terminal status instead\n"
         "(0 converged, 2 iteration cap, 3 line-search stall).\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) return usage(std::cerr, 1);
  const std::string kind = argv[1];
  if (kind == "--help" || kind == "-h" || kind == "help") return usage(std::cout, 0);

  std::string config_path;
  std::string out_override;
  bool force = false;
  int threads = 0;
  for (int i = 2; i < argc; ++i) {
    const std::string arg = argv[i];
    const auto value = [&](const char* flag) -> std::string {
      if (i + 1 >= argc) {
        std::cerr << "spectral-ht: " << flag << " needs a value\n";
        std::exit(1);
      }
      return argv[++i];
    };
    if (arg == "--config") {
      config_path = value("--config");
    } else if (arg == "--out") {
      out_override = value("--out");
    } else if (arg == "--force") {
      force = true;
    } else if (arg == "--threads") {
      try {
        threads = std::stoi(value("--threads"));
      } catch (const std::exception&) {
        std::cerr << "spectral-ht: --threads needs an integer\n";
        return 1;
      }
    } else if (arg == "--help" || arg == "-h") {
      return usage(std::cout, 0);
    } else {
      std::cerr << "spectral-ht: unknown argument '" << arg << "'\n";
      return usage(std::cerr, 1);
    }
  }
  if (config_path.empty()) {
    std::cerr << "spectral-ht: --config is required\n";
    return usage(std::cerr, 1);
  }

  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "spectral-ht: cannot read " << config_path << "\n";
    return 1;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string config_json = buf.str();

  char* message = nullptr;
  const int code = stht_run_experiment(kind.c_str(), config_json.c_str(),
                                       out_override.empty() ? nullptr : out_override.c_str(),
                                       force ? 1 : 0, threads, &message);
  if (message != nullptr && message[0] != '\0')
    (code == 1 ? std::cerr : std::cout) << message << "\n";
  stht_string_free(message);
  return code;
}
