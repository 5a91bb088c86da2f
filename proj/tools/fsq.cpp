#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fibersqueeze/io.hpp"
#include "fibersqueeze/scenario.hpp"
#include "fibersqueeze/selftest.hpp"

namespace {

enum Exit { kOk = 0, kValidation = 1, kRuntime = 2 };

std::filesystem::path output_root(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("FSQ_OUTPUT_ROOT"); env && *env) return env;
  return "fsq_output";
}

int report_error(const std::exception& e) {
  std::cerr << fsq::error_record(e).dump(2) << "\n";
  if (dynamic_cast<const fsq::ConfigurationError*>(&e)) return kValidation;
  return kRuntime;
}

int run(const fsq::ScenarioConfig& cfg, const std::string& root_flag) {
  const auto violations = fsq::validate(cfg);
  if (!violations.empty()) {
    for (const auto& v : violations) std::cerr << "violation: " << v << "\n";
    return kValidation;
  }
  try {
    const auto root = output_root(root_flag);
    const fsq::json summary = fsq::run_scenario(cfg, root);
    std::cout << summary.dump(2) << "\n";
    std::cerr << "results in " << fsq::resolve_output_dir(root, cfg.output.directory).string() << "\n";
    return kOk;
  } catch (const std::exception& e) {
    return report_error(e);
  }
}

std::vector<double> parse_edges(const std::string& text) {
  std::vector<double> edges;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size())
      throw fsq::ConfigurationError("scenarios_cli", "sweep", "cannot read edge '" + item + "'");
    edges.push_back(v);
  }
  return edges;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fsq: pulse propagation, linearized quantum noise and photon-number squeezing"};
  app.set_version_flag("--version", fsq::version_string());
  app.require_subcommand(1);
  std::string root_flag;
  app.add_option("--output-root", root_flag, "Output root (default: $FSQ_OUTPUT_ROOT or ./fsq_output)");

  std::string target;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario (config file or built-in name)");
  run_cmd->add_option("config", target, "Config file or one of: default, fig1, fig2a, fig2b, fig3")->required();

  std::string validate_target;
  auto* validate_cmd = app.add_subcommand("validate", "List every violated precondition of a config");
  validate_cmd->add_option("config", validate_target)->required();

  std::string mutation = "none";
  auto* selftest_cmd = app.add_subcommand("selftest", "Run the fast property suite");
  selftest_cmd->add_option("--mutation", mutation, "Inject a defect: none, flip-dispersion-sign, drop-nu-conjugation");

  std::string edges_text, kind = "both", sweep_config = "default";
  auto* sweep_cmd = app.add_subcommand("sweep", "Filter-edge sweep over the given edges");
  sweep_cmd->add_option("--edges", edges_text, "Comma-separated edge wavelengths in nm")->required();
  sweep_cmd->add_option("--kind", kind, "low_pass, high_pass or both")->check(CLI::IsMember({"low_pass", "high_pass", "both"}));
  sweep_cmd->add_option("--config", sweep_config, "Base config file or built-in name");

  std::string show_target;
  auto* show_cmd = app.add_subcommand("show", "Print a resolved config as JSON");
  show_cmd->add_option("config", show_target)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return run(fsq::resolve_config(target), root_flag);

    if (*validate_cmd) {
      const auto violations = fsq::validate(fsq::resolve_config(validate_target));
      for (const auto& v : violations) std::cout << "violation: " << v << "\n";
      if (violations.empty()) std::cout << "ok\n";
      return violations.empty() ? kOk : kValidation;
    }

    if (*selftest_cmd) {
      const auto results = fsq::run_selftest(fsq::fault_from_string(mutation));
      bool all = true;
      double total = 0.0;
      for (const auto& r : results) {
        std::printf("%s %-28s err=%.3e tol=%.1e %6.2fs  %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.value,
                    r.tolerance, r.seconds, r.detail.c_str());
        all = all && r.pass;
        total += r.seconds;
      }
      std::printf("%s selftest (%zu checks, %.1fs, mutation %s)\n", all ? "PASS" : "FAIL", results.size(), total,
                  mutation.c_str());
      return all ? kOk : kRuntime;
    }

    if (*sweep_cmd) {
      fsq::ScenarioConfig cfg = fsq::resolve_config(sweep_config);
      const auto edges = parse_edges(edges_text);
      cfg.quantum.enabled = true;
      cfg.measurement.sweeps.clear();
      cfg.measurement.coarse_bins = 0;
      if (kind != "high_pass") cfg.measurement.sweeps.push_back({fsq::FilterKind::LowPass, edges});
      if (kind != "low_pass") cfg.measurement.sweeps.push_back({fsq::FilterKind::HighPass, edges});
      cfg.output.directory = cfg.output.directory + "_sweep";
      return run(cfg, root_flag);
    }

    if (*show_cmd) {
      std::cout << fsq::to_json(fsq::resolve_config(show_target)).dump(2) << "\n";
      return kOk;
    }
  } catch (const std::exception& e) {
    return report_error(e);
  }
  return kOk;
}
