#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hmd/demand.hpp"
#include "hmd/grid.hpp"
#include "hmd/joint_model.hpp"
#include "hmd/signal_family.hpp"
#include "hmd/solver.hpp"

namespace hmd::cli {

/// Config document does not match the schema; path names the offending field.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct DistSpec {
  std::string kind = "uniform";  // uniform | beta | triangular | tabulated | point
  double lo = 0.0;
  double hi = 1.0;
  double a = 1.0;
  double b = 1.0;
  double mode = 0.5;
  double at = 0.0;
  std::size_t cells = 200;
  std::vector<double> points;
  std::vector<double> weights;
};

struct ModelSpec {
  DistSpec x;
  DistSpec y;
  std::optional<double> fgm_rho;
};

struct DemandSpec {
  std::string kind = "affine";  // affine | power | logistic
  double a = 0.0;
  double b = 1.0;
  double k = 1.0;
  double scale = 1.0;
  double shift = 0.0;
  double center = 0.5;
  double slope = 10.0;
};

struct CostSpec {
  std::string kind = "power";  // power | tabulated
  double k = 1.0;
  double q = 2.0;
  std::vector<double> thetas;
  std::vector<double> costs;
};

struct OracleSpec {
  OracleFamily family = OracleFamily::kThresholdAnchors;
  int n = 25;
};

struct ExperimentConfig {
  std::string experiment;  // solve | oracle | transparency | acquire | equilibrium | sweep
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  ModelSpec model;
  DemandSpec demand;
  std::size_t family_cells = 200;
  CostSpec cost;
  SolverSettings solver;
  OracleSpec oracle;
  double tau = 0.0;
  std::vector<double> taus{0.0, 0.25, 0.5, 0.75, 1.0};
};

/// Parses and validates a YAML experiment document. Unknown keys are errors.
ExperimentConfig parse_config(const std::string& yaml_text);
ExperimentConfig load_config(const std::string& path);

Grid1D build_grid(const DistSpec& spec);
JointModel build_model(const ModelSpec& spec);
DemandCurve build_demand(const DemandSpec& spec);
CostFunction build_cost(const CostSpec& spec);
/// Uniform replacement family over the configured profitability law.
SignalFamily build_family(const ExperimentConfig& cfg);

}  // namespace hmd::cli
