#pragma once

// Run configuration: flat `key = value` text with `#` comments. Keys left
// out take their defaults; thresholds left out scale with b.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "neckflow/evolution.hpp"

namespace neckflow {

struct RunConfig {
  std::optional<double> lambda;
  double b = 1.0;
  std::size_t n = 400;
  double safety = 0.1;
  std::optional<double> eps_pinch;    // default 1e-3 b
  std::optional<double> eps_extinct;  // default 1e-2 b
  std::optional<double> a2_cap;       // default 1e8 / b^2
  std::optional<double> dt_min;       // default 1e-20 b^2
  std::int64_t max_steps = 200'000'000;
  double snapshot_dt = 0.0;           // time cadence, 0 disables
  double snapshot_h_growth = 0.0;     // curvature-growth cadence, 0 disables
  int trace_every = 200;
  // Stop at convexity or an opened neck. Unset: evolve runs to the end,
  // search and sweep stop early.
  std::optional<bool> stop_early;
  std::string output_dir;             // empty: $NECKFLOW_OUT, then "."

  bool operator==(const RunConfig&) const = default;
};

/// Throws ErrorKind::Usage naming the offending key.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Every set field, one `key = value` line each, in a fixed order.
std::string to_text(const RunConfig& config);

/// Range checks of every field; throws ErrorKind::Usage naming the field.
void validate(const RunConfig& config, bool require_lambda);

StepControl step_control(const RunConfig& config, bool early_by_default = false);

/// Applies one `key = value` assignment; used for files and CLI overrides.
void assign(RunConfig& config, std::string_view key, std::string_view value);

}  // namespace neckflow
