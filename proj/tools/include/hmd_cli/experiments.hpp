#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hmd/disclosure.hpp"
#include "hmd/joint_model.hpp"
#include "hmd_cli/config.hpp"

namespace hmd::cli {

struct RunOptions {
  std::filesystem::path out_dir;
  int threads = 1;
};

struct RunSummary {
  std::vector<std::string> lines;
  std::vector<std::filesystem::path> artifacts;
  std::vector<std::string> warnings;
};

/// Runs one experiment and writes its artifacts into opts.out_dir.
RunSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& opts);

/// Disclosure matrix for plotting: 0 = conceal, 1 = disclose.
void emit_rule_heatmap_data(std::ostream& os, const JointModel& m, const TabularRule& rule);

/// Shortest round-trip decimal form.
std::string format_number(double v);

}  // namespace hmd::cli
