#pragma once

#include <string>

namespace shufflelab {

inline constexpr const char* kToolVersion = "1.0.0";

// Commands return process exit codes: 0 success, 2 usage/config error,
// 3 numerical failure (NonFinite), 4 bound violation.
int cmd_run(const std::string& config_path);
int cmd_verify(const std::string& suite, const std::string& config_path,
               bool eta_beyond_threshold);
int cmd_sweep(const std::string& config_path);
int cmd_fit(const std::string& config_path);
int cmd_report(const std::string& config_path);

// Argument parsing + dispatch + exception-to-exit-code mapping.
int run_cli(int argc, char** argv);

}  // namespace shufflelab
