#pragma once

#include <string>

namespace qcsd {

struct CliConfig {
  std::string command;  // compile | verify | rand
  std::string in;
  std::string out;
  std::string mode = "nr";  // nr | r
  double tol = 1e-8;
  int max_sweeps = 20;
  long seed = 0;
  int nb = 0;
  bool verify = false;
  bool stats = false;
};

// Exit codes: 0 success, 2 parse/usage error, 3 verification failure.
int cmd_compile(const CliConfig& cfg);
int cmd_verify(const CliConfig& cfg);
int cmd_rand(const CliConfig& cfg);

// Parses argv and dispatches to the selected command.
int run_cli(int argc, const char* const* argv);

}  // namespace qcsd
