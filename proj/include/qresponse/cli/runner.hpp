#pragma once

#include <string>

namespace qresponse::cli {

// Exit codes of the qresponse tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitIo = 4;

// Runs one experiment family: parse + validate the config, compute, then
// write results CSV, summary, and the optional chart into out_dir. No output
// file is touched before the computation has fully succeeded.
int run_experiment(const std::string& kind, const std::string& config_path,
                   const std::string& out_dir, int threads);

}  // namespace qresponse::cli
