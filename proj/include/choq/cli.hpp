#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace choq {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown by parse_config when --help is requested; carries the help text.
struct HelpRequested {
  std::string text;
};

struct RunConfig {
  std::string command;
  // model
  std::string model = "exp-critical";  // exp-critical | power | exp-power
  double alpha = 1.0;
  double gamma0 = 1.0;
  double beta0 = 1.0;
  double sigma = 4.0;
  double p = 4.0;
  double q = 2.0;
  double s0 = 2.0;
  double mass = 1.0;
  // grid
  int grid_n = 512;
  double grid_r = 12.0;
  std::string grid_scheme = "graded";
  bool grid_explicit = false;
  // solver
  double tol_grad = 1e-5;
  double tol_pohozaev = 1e-4;
  int max_iter = 5000;
  double step = 0.5;
  std::string profile = "gaussian";
  // moser scan
  std::vector<int> moser_n = {4, 8, 16, 32, 64, 128, 256, 512, 1024};
  // io
  std::string out_dir = "out";
  std::string kernel_cache;  // from CHOQUARD_KERNEL_CACHE
};

/// Parse argv-style arguments (without the program name).  Flag values
/// override config-file values; unknown flags or file keys and
/// out-of-domain values raise UsageError naming the offender.
RunConfig parse_config(const std::vector<std::string>& args);

/// Execute the configured pipeline.  Exit statuses: 0 success, 1
/// verification failure, 2 numerical failure, 3 usage error.
int run(const RunConfig& config);

}  // namespace choq
