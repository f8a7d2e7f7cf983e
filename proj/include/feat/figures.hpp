#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "feat/config.hpp"

namespace feat {

struct FigureOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> draws;
  std::optional<double> delta;
  std::optional<double> beta;
  std::optional<int> jobs;
};

/// Preset ids of the figure families the runner can reproduce.
std::vector<std::string> figure_ids();

/// The sweep behind a preset; throws ConfigError for unknown ids.
SweepConfig figure_config(const std::string& id);

struct FigureResult {
  std::string csv_path;
  std::string summary;  // strategy ordering at the extreme axis values
};

/// Runs one preset, writes <out_dir>/<id>.csv and returns a summary line.
FigureResult run_figure(const std::string& id, const std::string& out_dir,
                        const FigureOverrides& overrides = {});

}  // namespace feat
