#pragma once

#include <iosfwd>
#include <string>

#include "hmd/disclosure.hpp"

namespace hmd {

/// Matrix CSV: header "y\x,<x_1>,...,<x_n>", then one line per profitability
/// "<y_j>,<d_j1>,...,<d_jn>". Values use 17 significant digits so the
/// round trip is exact.
void write_rule_csv(std::ostream& os, const JointModel& m, const TabularRule& d);
TabularRule read_rule_csv(std::istream& is);

/// Compact threshold record {"x_bar": ..., "y_bar_samples": [[x, y_bar(x)], ...]}
/// sampled at the model's value grid with y_bar clamped to the support.
std::string threshold_rule_to_json(const ThresholdRule& t, const JointModel& m);
/// Inverse of threshold_rule_to_json; y_bar interpolates linearly between samples.
ThresholdRule threshold_rule_from_json(const std::string& json);

}  // namespace hmd
