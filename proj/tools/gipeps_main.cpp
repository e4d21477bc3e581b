#include <CLI11.hpp>
#include <iostream>
#include <optional>

#include "gipeps/io.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> tolerance;
  std::vector<std::string> suites;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_suites) {
  cmd->add_option("--config", o.config_path, "JSON configuration file")->required();
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--seed", o.seed, "override the configured seed");
  cmd->add_option("--tolerance", o.tolerance, "override the configured tolerance");
  if (with_suites) cmd->add_option("--suite", o.suites, "check suites to run (repeatable)");
}

int load_and_run(const CommonOpts& o,
                 int (*run)(const gipeps::RunConfig&, const std::string&)) {
  gipeps::RunConfig config;
  try {
    config = gipeps::load_config(o.config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (o.seed) config.seed = *o.seed;
  if (o.tolerance) config.tolerance = *o.tolerance;
  if (!o.suites.empty()) config.suites = o.suites;
  return run(config, o.out_dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gauge-invariant tensor network construction and certification"};
  app.require_subcommand(1);

  CommonOpts build_o, check_o, contract_o;
  std::string report_path;

  auto* build = app.add_subcommand("build", "construct and archive the local tensors");
  add_common(build, build_o, false);
  auto* check = app.add_subcommand("check", "run symmetry check suites and write a report");
  add_common(check, check_o, true);
  auto* contract = app.add_subcommand("contract", "contract a lattice state and verify invariance");
  add_common(contract, contract_o, false);
  auto* report = app.add_subcommand("report", "summarize an existing report file");
  report->add_option("path", report_path, "report.json to summarize")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (build->parsed()) return load_and_run(build_o, gipeps::cmd_build);
  if (check->parsed()) return load_and_run(check_o, gipeps::cmd_check);
  if (contract->parsed()) return load_and_run(contract_o, gipeps::cmd_contract);
  return gipeps::cmd_report(report_path);
}
