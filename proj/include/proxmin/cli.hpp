#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace proxmin::cli {

struct Overrides {
  std::optional<std::string> scheme;
  std::vector<std::string> checks;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
};

// Exit codes: 0 run + checks passed, 1 a requested check failed,
// 2 bad config, 3 solver failure (partial trace persisted).
int run_solve(const std::string& config_path, const Overrides& ov);
int run_verify(const std::string& trace_path, const std::string& config_path,
               const std::vector<std::string>& checks);
// Runs every *.json config in dir concurrently; worst exit code wins.
int run_batch(const std::string& dir, const Overrides& ov);

}  // namespace proxmin::cli
