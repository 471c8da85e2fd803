#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>
#include <yaml-cpp/exceptions.h>

#include "hmd/errors.hpp"
#include "hmd/solver.hpp"
#include "hmd_cli/config.hpp"
#include "hmd_cli/experiments.hpp"

namespace {

constexpr int kSchemaExit = 2;
constexpr int kNumericalExit = 3;

int run(const std::string& config_path, const std::string& out_dir, int threads) {
  const hmd::cli::ExperimentConfig cfg = hmd::cli::load_config(config_path);
  hmd::cli::RunOptions opts;
  opts.out_dir = out_dir.empty() ? cfg.output_dir : out_dir;
  opts.threads = threads;
  spdlog::info("running '{}' from {} into {}", cfg.experiment, config_path, opts.out_dir.string());
  const auto summary = hmd::cli::run_experiment(cfg, opts);
  for (const auto& w : summary.warnings) spdlog::warn("{}", w);
  for (const auto& line : summary.lines) std::cout << line << '\n';
  for (const auto& a : summary.artifacts) spdlog::debug("wrote {}", a.string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Disclosure rules of an advisor with hidden motives"};
  app.require_subcommand(1);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  auto* run_cmd = app.add_subcommand("run", "Run the experiment described by a YAML config");
  std::string config_path;
  std::string out_dir;
  int threads = 1;
  run_cmd->add_option("config", config_path, "Experiment config")->required();
  run_cmd->add_option("--out-dir", out_dir, "Artifact directory (overrides output.dir)");
  run_cmd->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1, 256));
  run_cmd->add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  CLI11_PARSE(app, argc, argv);

  auto logger = spdlog::stderr_color_mt("hmd");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    return run(config_path, out_dir, threads);
  } catch (const hmd::cli::SchemaError& e) {
    spdlog::error("config error at {}", e.what());
    std::cerr << "schema error: " << e.what() << '\n';
    return kSchemaExit;
  } catch (const YAML::Exception& e) {
    std::cerr << "schema error: " << e.what() << '\n';
    return kSchemaExit;
  } catch (const hmd::SolverError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    if (e.incumbent()) {
      std::cerr << "best incumbent: x_nd=" << e.incumbent()->anchors.x_nd
                << " y_nd=" << e.incumbent()->anchors.y_nd
                << " residual=" << e.incumbent()->residual << '\n';
    }
    return kNumericalExit;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalExit;
  }
}
