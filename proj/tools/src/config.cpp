#include "hmd_cli/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace hmd::cli {

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void allow_only(const YAML::Node& node, const std::string& path, const std::set<std::string>& keys) {
  if (!node.IsMap()) throw SchemaError(path.empty() ? "<root>" : path, "expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!keys.count(key)) throw SchemaError(join(path, key), "unknown field");
  }
}

template <class T>
T scalar(const YAML::Node& node, const std::string& path) {
  if (!node.IsScalar()) throw SchemaError(path, "expected a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw SchemaError(path, "cannot convert '" + node.Scalar() + "'");
  }
}

template <class T>
void read(const YAML::Node& parent, const std::string& path, const std::string& key, T& out) {
  const YAML::Node n = parent[key];
  if (n) out = scalar<T>(n, join(path, key));
}

template <class T>
T require(const YAML::Node& parent, const std::string& path, const std::string& key) {
  const YAML::Node n = parent[key];
  if (!n) throw SchemaError(join(path, key), "missing required field");
  return scalar<T>(n, join(path, key));
}

std::vector<double> number_list(const YAML::Node& node, const std::string& path) {
  if (!node.IsSequence()) throw SchemaError(path, "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    out.push_back(scalar<double>(node[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

void positive_cells(std::size_t cells, const std::string& path) {
  if (cells < 1) throw SchemaError(path, "must be at least 1");
}

DistSpec parse_dist(const YAML::Node& node, const std::string& path) {
  if (!node) throw SchemaError(path, "missing required field");
  allow_only(node, path, {"kind", "lo", "hi", "a", "b", "mode", "at", "cells", "points", "weights"});
  DistSpec d;
  d.kind = require<std::string>(node, path, "kind");
  if (d.kind == "uniform" || d.kind == "beta" || d.kind == "triangular") {
    d.lo = require<double>(node, path, "lo");
    d.hi = require<double>(node, path, "hi");
    read(node, path, "cells", d.cells);
    positive_cells(d.cells, join(path, "cells"));
    if (!(d.hi > d.lo)) throw SchemaError(join(path, "hi"), "must exceed lo");
    if (d.kind == "beta") {
      d.a = require<double>(node, path, "a");
      d.b = require<double>(node, path, "b");
    }
    if (d.kind == "triangular") d.mode = require<double>(node, path, "mode");
  } else if (d.kind == "tabulated") {
    if (!node["points"]) throw SchemaError(join(path, "points"), "missing required field");
    if (!node["weights"]) throw SchemaError(join(path, "weights"), "missing required field");
    d.points = number_list(node["points"], join(path, "points"));
    d.weights = number_list(node["weights"], join(path, "weights"));
    if (d.points.size() != d.weights.size() || d.points.empty()) {
      throw SchemaError(join(path, "weights"), "must match points in length");
    }
  } else if (d.kind == "point") {
    d.at = require<double>(node, path, "at");
  } else {
    throw SchemaError(join(path, "kind"), "unknown distribution '" + d.kind + "'");
  }
  return d;
}

DemandSpec parse_demand(const YAML::Node& node, const std::string& path) {
  if (!node) throw SchemaError(path, "missing required field");
  allow_only(node, path, {"kind", "a", "b", "k", "scale", "shift", "center", "slope"});
  DemandSpec d;
  d.kind = require<std::string>(node, path, "kind");
  if (d.kind == "affine") {
    d.a = require<double>(node, path, "a");
    d.b = require<double>(node, path, "b");
    if (!(d.b > 0.0)) throw SchemaError(join(path, "b"), "slope must be positive");
  } else if (d.kind == "power") {
    d.k = require<double>(node, path, "k");
    read(node, path, "scale", d.scale);
    read(node, path, "shift", d.shift);
    if (!(d.k > 0.0)) throw SchemaError(join(path, "k"), "must be positive");
  } else if (d.kind == "logistic") {
    d.center = require<double>(node, path, "center");
    d.slope = require<double>(node, path, "slope");
  } else {
    throw SchemaError(join(path, "kind"), "unknown demand '" + d.kind + "'");
  }
  return d;
}

CostSpec parse_cost(const YAML::Node& node, const std::string& path) {
  allow_only(node, path, {"kind", "k", "q", "thetas", "costs"});
  CostSpec c;
  c.kind = require<std::string>(node, path, "kind");
  if (c.kind == "power") {
    c.k = require<double>(node, path, "k");
    c.q = require<double>(node, path, "q");
    if (!(c.k > 0.0)) throw SchemaError(join(path, "k"), "must be positive");
    if (!(c.q >= 1.0)) throw SchemaError(join(path, "q"), "must be at least 1");
  } else if (c.kind == "tabulated") {
    if (!node["thetas"]) throw SchemaError(join(path, "thetas"), "missing required field");
    if (!node["costs"]) throw SchemaError(join(path, "costs"), "missing required field");
    c.thetas = number_list(node["thetas"], join(path, "thetas"));
    c.costs = number_list(node["costs"], join(path, "costs"));
    if (c.thetas.size() != c.costs.size() || c.thetas.size() < 2) {
      throw SchemaError(join(path, "costs"), "need at least two knots matching thetas");
    }
  } else {
    throw SchemaError(join(path, "kind"), "unknown cost '" + c.kind + "'");
  }
  return c;
}

double unit_interval(double v, const std::string& path) {
  if (!(v >= 0.0 && v <= 1.0)) throw SchemaError(path, "must lie in [0,1]");
  return v;
}

}  // namespace

ExperimentConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw SchemaError("<document>", e.what());
  }
  if (!root || root.IsNull()) throw SchemaError("<root>", "empty document");
  allow_only(root, "", {"experiment", "seed", "output", "model", "demand", "family", "cost",
                        "solver", "oracle", "acquire", "sweep"});
  ExperimentConfig cfg;
  cfg.experiment = require<std::string>(root, "", "experiment");
  static const std::set<std::string> kinds{"solve",   "oracle",      "transparency",
                                           "acquire", "equilibrium", "sweep"};
  if (!kinds.count(cfg.experiment)) {
    throw SchemaError("experiment", "unknown experiment '" + cfg.experiment + "'");
  }
  read(root, "", "seed", cfg.seed);
  if (const auto out = root["output"]) {
    allow_only(out, "output", {"dir"});
    read(out, "output", "dir", cfg.output_dir);
  }

  const bool uses_family = cfg.experiment == "acquire" || cfg.experiment == "sweep";
  const YAML::Node model = root["model"];
  if (!model) throw SchemaError("model", "missing required field");
  allow_only(model, "model", {"x", "y", "fgm_rho"});
  if (!uses_family || model["x"]) cfg.model.x = parse_dist(model["x"], "model.x");
  cfg.model.y = parse_dist(model["y"], "model.y");
  if (model["fgm_rho"]) {
    const double rho = scalar<double>(model["fgm_rho"], "model.fgm_rho");
    if (!(rho >= -1.0 && rho <= 1.0)) throw SchemaError("model.fgm_rho", "must lie in [-1,1]");
    cfg.model.fgm_rho = rho;
  }

  cfg.demand = parse_demand(root["demand"], "demand");

  if (const auto fam = root["family"]) {
    allow_only(fam, "family", {"kind", "cells"});
    std::string kind = "uniform_replacement";
    read(fam, "family", "kind", kind);
    if (kind != "uniform_replacement") {
      throw SchemaError("family.kind", "unknown family '" + kind + "'");
    }
    read(fam, "family", "cells", cfg.family_cells);
    if (cfg.family_cells < 2) throw SchemaError("family.cells", "must be at least 2");
  } else if (uses_family) {
    throw SchemaError("family", "missing required field");
  }
  if (const auto cost = root["cost"]) {
    cfg.cost = parse_cost(cost, "cost");
  } else if (uses_family) {
    throw SchemaError("cost", "missing required field");
  }

  if (const auto s = root["solver"]) {
    allow_only(s, "solver", {"tol", "max_iter", "anchor_grid", "damping", "seed_jitter",
                             "accept_cell_flip"});
    read(s, "solver", "tol", cfg.solver.tol);
    read(s, "solver", "max_iter", cfg.solver.max_iter);
    read(s, "solver", "anchor_grid", cfg.solver.anchor_grid);
    read(s, "solver", "damping", cfg.solver.damping);
    read(s, "solver", "seed_jitter", cfg.solver.seed_jitter);
    read(s, "solver", "accept_cell_flip", cfg.solver.accept_cell_flip);
    if (!(cfg.solver.tol > 0.0)) throw SchemaError("solver.tol", "must be positive");
    if (cfg.solver.max_iter < 1) throw SchemaError("solver.max_iter", "must be positive");
    if (cfg.solver.anchor_grid < 1) throw SchemaError("solver.anchor_grid", "must be positive");
    if (!(cfg.solver.damping > 0.0 && cfg.solver.damping <= 1.0)) {
      throw SchemaError("solver.damping", "must lie in (0,1]");
    }
    if (!(cfg.solver.seed_jitter >= 0.0)) throw SchemaError("solver.seed_jitter", "must be >= 0");
  }
  cfg.solver.seed = cfg.seed;

  if (const auto o = root["oracle"]) {
    allow_only(o, "oracle", {"family", "n"});
    std::string fam = "threshold_anchors";
    read(o, "oracle", "family", fam);
    if (fam == "threshold_anchors") {
      cfg.oracle.family = OracleFamily::kThresholdAnchors;
    } else if (fam == "monotone_tabular" || fam == "tabular") {
      cfg.oracle.family = OracleFamily::kExhaustiveTabular;
    } else {
      throw SchemaError("oracle.family", "unknown oracle family '" + fam + "'");
    }
    read(o, "oracle", "n", cfg.oracle.n);
    const int limit = cfg.oracle.family == OracleFamily::kThresholdAnchors ? 30 : 4;
    if (cfg.oracle.n < 1 || cfg.oracle.n > limit) {
      throw SchemaError("oracle.n", "must lie in [1," + std::to_string(limit) + "]");
    }
  }
  if (const auto a = root["acquire"]) {
    allow_only(a, "acquire", {"tau"});
    read(a, "acquire", "tau", cfg.tau);
    unit_interval(cfg.tau, "acquire.tau");
  }
  if (const auto s = root["sweep"]) {
    allow_only(s, "sweep", {"taus"});
    if (s["taus"]) cfg.taus = number_list(s["taus"], "sweep.taus");
    for (std::size_t i = 0; i < cfg.taus.size(); ++i) {
      unit_interval(cfg.taus[i], "sweep.taus[" + std::to_string(i) + "]");
    }
    if (cfg.taus.empty()) throw SchemaError("sweep.taus", "must not be empty");
  }
  if (uses_family && cfg.demand.kind != "affine" &&
      !(cfg.demand.kind == "power" && cfg.demand.k == 1.0)) {
    throw SchemaError("demand.kind", "precision choice requires affine demand");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("<file>", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

Grid1D build_grid(const DistSpec& spec) {
  if (spec.kind == "uniform") return Grid1D::uniform(spec.lo, spec.hi, spec.cells);
  if (spec.kind == "beta") return Grid1D::beta(spec.a, spec.b, spec.lo, spec.hi, spec.cells);
  if (spec.kind == "triangular") return Grid1D::triangular(spec.lo, spec.mode, spec.hi, spec.cells);
  if (spec.kind == "point") return Grid1D::point_mass(spec.at);
  return Grid1D(spec.points, spec.weights);
}

JointModel build_model(const ModelSpec& spec) {
  const Grid1D x = build_grid(spec.x);
  const Grid1D y = build_grid(spec.y);
  if (spec.fgm_rho) return build_fgm_model(x, y, *spec.fgm_rho);
  return build_product_model(x, y);
}

DemandCurve build_demand(const DemandSpec& spec) {
  if (spec.kind == "affine") return DemandCurve::affine(spec.a, spec.b);
  if (spec.kind == "power") return DemandCurve::power(spec.k, spec.scale, spec.shift);
  return DemandCurve::logistic(spec.center, spec.slope);
}

CostFunction build_cost(const CostSpec& spec) {
  if (spec.kind == "power") return CostFunction::power(spec.k, spec.q);
  return CostFunction::tabulated(spec.thetas, spec.costs);
}

SignalFamily build_family(const ExperimentConfig& cfg) {
  return uniform_replacement_family(cfg.family_cells, build_grid(cfg.model.y), build_cost(cfg.cost));
}

}  // namespace hmd::cli
