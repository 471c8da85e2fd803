#include "hmd_cli/experiments.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hmd/acquisition.hpp"
#include "hmd/equilibrium.hpp"
#include "hmd/errors.hpp"
#include "hmd/rule_io.hpp"
#include "hmd/transparency.hpp"

namespace hmd::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

// Core validation failures while building inputs are config problems.
template <class F>
auto as_schema(const std::string& path, F&& build) -> decltype(build()) {
  try {
    return build();
  } catch (const ModelError& e) {
    throw SchemaError(path, e.what());
  } catch (const InputError& e) {
    throw SchemaError(path, e.what());
  } catch (const DomainError& e) {
    throw SchemaError(path, e.what());
  }
}

class Writer {
 public:
  Writer(const fs::path& dir, RunSummary& summary) : dir_(dir), summary_(summary) {
    fs::create_directories(dir_);
  }

  void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    body(out);
    summary_.artifacts.push_back(path);
  }

  void write_json(const std::string& name, const json& j) {
    write(name, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  }

 private:
  fs::path dir_;
  RunSummary& summary_;
};

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string s;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) s += ',';
    s += c;
    first = false;
  }
  return s + '\n';
}

std::string num(double v) { return format_number(v); }

json candidate_json(const FixedPointCandidate& c) {
  return {{"x_nd", c.anchors.x_nd},   {"y_nd", c.anchors.y_nd},
          {"payoff", c.payoff},       {"residual", c.residual},
          {"iterations", c.iterations}, {"grid_limited", c.grid_limited}};
}

struct Inputs {
  JointModel model;
  DemandCurve demand;
};

Inputs build_inputs(const ExperimentConfig& cfg) {
  JointModel m = as_schema("model", [&] { return build_model(cfg.model); });
  DemandCurve p = as_schema("demand", [&] { return build_demand(cfg.demand); });
  as_schema("demand", [&] {
    p.validate(m.x_marginal());
    return 0;
  });
  return {std::move(m), std::move(p)};
}

SolverSettings solver_settings(const ExperimentConfig& cfg, const RunOptions& opts) {
  SolverSettings s = cfg.solver;
  s.threads = opts.threads;
  return s;
}

void run_solve(const ExperimentConfig& cfg, const RunOptions& opts, Writer& w, RunSummary& sum) {
  const Inputs in = build_inputs(cfg);
  const SolveResult res = solve_commitment(in.model, in.demand, solver_settings(cfg, opts));
  const TabularRule rule = rasterize(res.rule, in.model);
  const PayoffDecomposition pay = seller_payoff(in.model, rule, in.demand);
  const FocReport foc = foc_residual(in.model, rule, in.demand);
  const double y_bar = res.rule.threshold_at(res.rule.x_bar, in.model.y_support());

  json j;
  j["schema"] = 1;
  j["experiment"] = "solve";
  j["x_bar"] = res.rule.x_bar;
  j["y_bar_at_x_bar"] = y_bar;
  j["x_nd"] = res.nd.x_nd;
  j["y_nd"] = res.nd.y_nd;
  j["nd_mass"] = res.nd.nd_mass;
  j["payoff"] = res.payoff;
  j["mean_term"] = pay.mean_term;
  j["cov_term"] = pay.cov_term;
  j["expected_sale_prob"] = pay.expected_sale_prob;
  j["iterations"] = res.iterations;
  j["residual"] = res.residual;
  j["grid_limited"] = res.grid_limited;
  j["foc_violations"] = foc.violations;
  j["foc_interior_violations"] = foc.interior_violations;
  j["curvature"] = to_string(in.demand.curvature());
  j["candidates"] = json::array();
  for (const auto& c : res.candidates) j["candidates"].push_back(candidate_json(c));
  w.write_json("solve.json", j);
  w.write("solve_threshold.json",
          [&](std::ostream& os) { os << threshold_rule_to_json(res.rule, in.model) << '\n'; });
  w.write("solve_rule.csv", [&](std::ostream& os) { emit_rule_heatmap_data(os, in.model, rule); });

  sum.lines.push_back("x_bar=" + num(res.rule.x_bar) + " y_bar=" + num(y_bar) +
                      " payoff=" + num(res.payoff) + " residual=" + num(res.residual));
  if (res.grid_limited) {
    sum.warnings.push_back("fixed point accepted at grid resolution (residual " +
                           num(res.residual) + ")");
  }
}

void run_oracle(const ExperimentConfig& cfg, const RunOptions& opts, Writer& w, RunSummary& sum) {
  const Inputs in = build_inputs(cfg);
  const SolveResult res = solve_commitment(in.model, in.demand, solver_settings(cfg, opts));
  const OracleResult orc =
      brute_force_oracle(in.model, in.demand, cfg.oracle.n, cfg.oracle.family, opts.threads);
  const double gap = orc.payoff - res.payoff;
  const double rel = gap / std::max(std::abs(res.payoff), 1e-300);
  const std::string family =
      cfg.oracle.family == OracleFamily::kThresholdAnchors ? "threshold_anchors" : "monotone_tabular";
  w.write("oracle.csv", [&](std::ostream& os) {
    os << "family,n,evaluated,solver_payoff,oracle_payoff,payoff_gap,relative_gap\n";
    os << csv_row({family, std::to_string(cfg.oracle.n), std::to_string(orc.evaluated),
                   num(res.payoff), num(orc.payoff), num(gap), num(rel)});
  });
  w.write("oracle_rule.csv",
          [&](std::ostream& os) { emit_rule_heatmap_data(os, in.model, orc.rule); });
  std::string line = "oracle=" + family + " n=" + std::to_string(cfg.oracle.n) +
                     " solver_payoff=" + num(res.payoff) + " oracle_payoff=" + num(orc.payoff) +
                     " gap=" + num(gap);
  if (orc.anchors) {
    line += " oracle_anchor=(" + num(orc.anchors->x_nd) + "," + num(orc.anchors->y_nd) + ")";
  }
  sum.lines.push_back(line);
}

void run_transparency(const ExperimentConfig& cfg, const RunOptions& opts, Writer& w,
                      RunSummary& sum) {
  const Inputs in = build_inputs(cfg);
  const SolveResult hidden = solve_commitment(in.model, in.demand, solver_settings(cfg, opts));
  const TransparentSolution tr = solve_transparent(in.model, in.demand);
  const auto rows = transparency_report(in.model, in.demand, hidden, tr);
  w.write("transparency.csv", [&](std::ostream& os) {
    os << "regime,expected_sale_prob,payoff,fb_variance,verdict\n";
    for (const auto& r : rows) {
      os << csv_row({r.regime, num(r.expected_sale_prob), num(r.payoff), num(r.fb_variance),
                     r.verdict});
    }
  });
  w.write("hidden_rule.csv", [&](std::ostream& os) {
    emit_rule_heatmap_data(os, in.model, rasterize(hidden.rule, in.model));
  });
  w.write("transparent_rule.csv",
          [&](std::ostream& os) { emit_rule_heatmap_data(os, in.model, tr.rule); });
  for (const auto& r : rows) {
    sum.lines.push_back(r.regime + ": E[P]=" + num(r.expected_sale_prob) + " payoff=" +
                        num(r.payoff) + " var=" + num(r.fb_variance) + " verdict=" + r.verdict);
  }
  sum.lines.push_back("transparent convention: " + tr.convention);
}

void run_acquire(const ExperimentConfig& cfg, const RunOptions& opts, Writer& w, RunSummary& sum) {
  const SignalFamily fam = as_schema("family", [&] { return build_family(cfg); });
  const DemandCurve p = as_schema("demand", [&] { return build_demand(cfg.demand); });
  PrecisionEvaluator eval(fam, p, solver_settings(cfg, opts));
  const AcquisitionResult r = optimize_precision(eval, cfg.tau);
  const PosteriorDistribution fb = optimal_buyer_distribution(eval, r.theta_star);
  json j;
  j["schema"] = 1;
  j["experiment"] = "acquire";
  j["tau"] = r.tau;
  j["theta_star"] = r.theta_star;
  j["x_bar"] = r.rule.x_bar;
  j["y_nd"] = r.nd.y_nd;
  j["gross_value"] = r.gross_value;
  j["net_value"] = r.net_value;
  j["fb_variance"] = fb.variance();
  j["fallback_used"] = r.fallback_used;
  j["cost"] = fam.cost_function().description();
  w.write_json("acquire.json", j);
  w.write("value_curve.csv", [&](std::ostream& os) {
    os << "theta,pi0,pi1,mixed,cost,net\n";
    for (const auto& v : r.value_curve) {
      const double c = fam.cost(v.theta);
      os << csv_row({num(v.theta), num(v.pi0), num(v.pi1), num(v.mixed), num(c), num(v.mixed - c)});
    }
  });
  sum.lines.push_back("tau=" + num(r.tau) + " theta_star=" + num(r.theta_star) +
                      " net_value=" + num(r.net_value));
  if (!r.warning.empty()) sum.warnings.push_back(r.warning);
}

void run_sweep(const ExperimentConfig& cfg, const RunOptions& opts, Writer& w, RunSummary& sum) {
  const SignalFamily fam = as_schema("family", [&] { return build_family(cfg); });
  const DemandCurve p = as_schema("demand", [&] { return build_demand(cfg.demand); });
  PrecisionEvaluator eval(fam, p, solver_settings(cfg, opts));
  std::ostringstream body;
  body << "tau,theta_star,pi0,pi1,net_value,fb_variance\n";
  for (double tau : cfg.taus) {
    const AcquisitionResult r = optimize_precision(eval, tau);
    const PrecisionValue v = eval.value(r.theta_star, tau);
    const double var = optimal_buyer_distribution(eval, r.theta_star).variance();
    body << csv_row({num(tau), num(r.theta_star), num(v.pi0), num(v.pi1), num(r.net_value),
                     num(var)});
    sum.lines.push_back("tau=" + num(tau) + " theta_star=" + num(r.theta_star));
    if (!r.warning.empty()) sum.warnings.push_back("tau=" + num(tau) + ": " + r.warning);
  }
  w.write("sweep.csv", [&](std::ostream& os) { os << body.str(); });
}

void run_equilibrium(const ExperimentConfig& cfg, const RunOptions&, Writer& w, RunSummary& sum) {
  const JointModel m = as_schema("model", [&] { return build_model(cfg.model); });
  const EquilibriumResult res = solve_no_commitment(m);
  const TransparentEquilibrium te = solve_no_commitment_transparent(m);
  json j;
  j["schema"] = 1;
  j["regime"] = to_string(res.regime);
  j["roots"] = json::array();
  for (const auto& r : res.roots) {
    j["roots"].push_back({{"x_hat", r.x_hat}, {"residual", r.residual}, {"nd_mass", r.nd_mass}});
  }
  j["selected"] = res.x_hat;
  j["nd_mass"] = res.nd_mass;
  j["rejected_crossings"] = res.rejected_crossings;
  j["transparent_certificate"] = {{"passed", te.certificate.passed},
                                  {"vacuous", te.certificate.vacuous},
                                  {"checked", te.certificate.checked}};
  w.write_json("equilibrium.json", j);
  w.write("equilibrium_rule.csv",
          [&](std::ostream& os) { emit_rule_heatmap_data(os, m, equilibrium_rule(res, m)); });
  sum.lines.push_back("regime=" + std::string(to_string(res.regime)) + " x_hat=" + num(res.x_hat) +
                      " roots=" + std::to_string(res.roots.size()) +
                      " nd_mass=" + num(res.nd_mass));
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

void emit_rule_heatmap_data(std::ostream& os, const JointModel& m, const TabularRule& rule) {
  write_rule_csv(os, m, rule);
}

RunSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  RunSummary sum;
  Writer w(opts.out_dir, sum);
  if (cfg.experiment == "solve") {
    run_solve(cfg, opts, w, sum);
  } else if (cfg.experiment == "oracle") {
    run_oracle(cfg, opts, w, sum);
  } else if (cfg.experiment == "transparency") {
    run_transparency(cfg, opts, w, sum);
  } else if (cfg.experiment == "acquire") {
    run_acquire(cfg, opts, w, sum);
  } else if (cfg.experiment == "sweep") {
    run_sweep(cfg, opts, w, sum);
  } else if (cfg.experiment == "equilibrium") {
    run_equilibrium(cfg, opts, w, sum);
  } else {
    throw SchemaError("experiment", "unknown experiment '" + cfg.experiment + "'");
  }
  return sum;
}

}  // namespace hmd::cli
