#pragma once

#include <cstddef>
#include <string>

namespace convolab {

// Process exit codes for the command-line driver.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;   // bad flags / malformed config
inline constexpr int kExitNumeric = 3;  // quadrature or overflow failure
inline constexpr int kExitVerify = 4;   // a verification residual broke its threshold

// Effective run settings after merging (flags beat the config file, the
// config file beats defaults).
struct RunSettings {
  std::string command;
  std::string config_path;
  std::string out_dir = "convolab-out";
  double t_max = 1.0;
  std::size_t steps = 256;
  double tolerance = 1e-6;
};

// Entry point behind main(): parses argv, dispatches the subcommand, and
// maps exceptions onto the exit codes above.
int run_cli(int argc, char** argv);

}  // namespace convolab
