#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "config.hpp"

namespace torusflow::cli {

enum ExitCode : int { kPass = 0, kConfigError = 1, kRuntimeAbort = 2, kToleranceFailure = 3 };

struct RunContext {
  RunConfig config;
  std::filesystem::path out_dir;
  int threads = 1;
  std::ostream* log = nullptr;
};

int run_simulate(const RunContext& ctx);
int run_geodesic(const RunContext& ctx);
int run_curvature(const RunContext& ctx);
int run_verify(const RunContext& ctx);
int run_reduce1d(const RunContext& ctx);

/// Parses the command line, runs the subcommand and maps failures to exit
/// codes. Diagnostics go to `err`, progress to `out`.
int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace torusflow::cli
