// tdeuler: run scenarios, sweeps and report re-rendering from the shell.
//
//   tdeuler run nonlinear-decay --set solver.t_final=200
//   tdeuler sweep linear-decay --axis lambda=0.2,0.5,0.8
//   tdeuler report runs/nonlinear-decay-<hash>
//
// Exit status: 0 all verdicts pass, 1 some verdict fails, 2 execution error.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "tdeuler/config.hpp"
#include "tdeuler/harness.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kError = 2;

nlohmann::json effective_config(const std::string& source, const std::vector<std::string>& sets,
                                 const std::string& out) {
  nlohmann::json cfg = tdeuler::load_config(source);
  for (const auto& s : sets) tdeuler::apply_override(cfg, s);
  if (!out.empty()) tdeuler::set_path(cfg, "output.dir", out);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Damped compressible Euler decay lab"};
  app.require_subcommand(1);

  std::string source, out, dir;
  std::vector<std::string> sets, axes;
  bool dry = false;
  int jobs = 0;

  auto* run = app.add_subcommand("run", "Run one scenario from a preset name or a JSON config");
  run->add_option("config", source, "Preset name or config file")->required();
  run->add_option("--set", sets, "Override a config key, e.g. --set damping.mu=2");
  run->add_option("--out", out, "Output root directory (default: output.dir)");
  run->add_flag("--dry-run", dry, "Compute verdicts without writing files");

  auto* sw = app.add_subcommand("sweep", "Cartesian sweep over lambda, mu, eps, N or delta");
  sw->add_option("config", source, "Preset name or config file")->required();
  sw->add_option("--axis", axes, "Axis as key=v1,v2,...")->required();
  sw->add_option("--set", sets, "Override a config key before sweeping");
  sw->add_option("--out", out, "Output root directory");
  sw->add_option("-j,--jobs", jobs, "Worker threads (0: hardware concurrency)");

  auto* lp = app.add_subcommand("list-presets", "List registered scenarios");

  auto* rep = app.add_subcommand("report", "Re-render summary.txt from a run directory");
  rep->add_option("dir", dir, "Run directory")->required()->check(CLI::ExistingDirectory);

  auto* show = app.add_subcommand("show", "Print the effective config of a preset or file");
  show->add_option("config", source, "Preset name or config file")->required();
  show->add_option("--set", sets, "Override a config key");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kError;
  }

  try {
    if (*lp) {
      for (const auto& p : tdeuler::presets()) std::cout << p.name << "  " << p.description << '\n';
      return kPass;
    }
    if (*show) {
      std::cout << effective_config(source, sets, "").dump(2) << '\n';
      return kPass;
    }
    if (*rep) {
      const tdeuler::Report r = tdeuler::rerender_report(dir);
      std::cout << tdeuler::render_summary(r);
      return r.all_pass() ? kPass : kFail;
    }
    if (*run) {
      const nlohmann::json cfg = effective_config(source, sets, out);
      tdeuler::RunOptions opt;
      opt.write_files = !dry;
      const tdeuler::Report r = tdeuler::run_scenario(cfg, opt);
      std::cout << tdeuler::render_summary(r);
      if (!dry) std::cout << "output: " << tdeuler::run_directory(cfg).string() << '\n';
      return r.all_pass() ? kPass : kFail;
    }
    if (*sw) {
      const nlohmann::json cfg = effective_config(source, sets, out);
      std::vector<tdeuler::SweepAxis> parsed;
      for (const auto& a : axes) parsed.push_back(tdeuler::parse_axis(a));
      const tdeuler::SweepResult res = tdeuler::sweep(cfg, parsed, jobs);

      std::string tag = cfg.at("scenario").get<std::string>();
      for (const auto& a : axes) tag += "|" + a;
      const std::filesystem::path root = cfg["output"].value("dir", std::string("runs"));
      std::filesystem::create_directories(root);
      const auto csv = root / ("sweep-" + cfg.at("scenario").get<std::string>() + "-" +
                               tdeuler::config_hash(nlohmann::json{{"config", cfg}, {"axes", tag}}) + ".csv");
      std::ofstream os(csv);
      tdeuler::write_sweep_csv(os, res);
      for (const auto& r : res.runs) {
        std::cout << "--";
        for (std::size_t k = 0; k < parsed.size(); ++k) std::cout << ' ' << parsed[k].key << '=' << r.point[k].dump();
        std::cout << '\n';
        if (r.ok)
          std::cout << tdeuler::render_summary(r.report);
        else
          std::cout << "error: " << r.error << '\n';
      }
      std::cout << "aggregate: " << csv.string() << '\n';
      if (res.any_error()) return kError;
      return res.all_pass() ? kPass : kFail;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  }
  return kError;
}
