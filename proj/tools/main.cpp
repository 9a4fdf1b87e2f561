#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ntklab/harness.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config_path, "JSON config file");
  sub->add_option("--seed", args.seed, "root seed")->each([&](const std::string&) {
    args.seed_set = true;
  });
  sub->add_option("--out", args.out_dir, "output directory");
  sub->add_option("--override", args.overrides, "key=value overrides (flags > file > defaults)");
}

int run(const CommonArgs& args,
        const std::function<ntklab::RunReport(const ntklab::ExperimentConfig&)>& cmd) {
  try {
    ntklab::ExperimentConfig cfg =
        ntklab::ExperimentConfig::from_file(args.config_path, args.overrides);
    if (args.seed_set) cfg.seed = args.seed;
    if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;
    const ntklab::RunReport report = cmd(cfg);
    std::printf("%s\n", report.to_json().dump(2).c_str());
    if (report.pass.has_value() && !*report.pass) return 1;
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ntklab: NTK / benign-overfitting experiment harness"};
  app.require_subcommand(1);

  std::map<std::string, std::function<ntklab::RunReport(const ntklab::ExperimentConfig&)>> cmds =
      {
          {"benign-class", ntklab::cmd_benign_class},
          {"min-eig-sweep", ntklab::cmd_min_eig_sweep},
          {"ntk-converge", ntklab::cmd_ntk_converge},
          {"assumption-check", ntklab::cmd_assumption_check},
          {"excess-risk-sweep", ntklab::cmd_excess_risk_sweep},
      };
  const std::map<std::string, std::string> descriptions = {
      {"benign-class", "end-to-end noisy-label classification run"},
      {"min-eig-sweep", "NTK minimum-eigenvalue bound sweep + trend table"},
      {"ntk-converge", "empirical vs limiting NTK deviation across widths"},
      {"assumption-check", "class-pair mean kernel values (synthetic or IDX data)"},
      {"excess-risk-sweep", "ridgeless kernel-regression excess risk across n"},
  };

  std::map<std::string, CommonArgs> args;
  for (const auto& [name, fn] : cmds) {
    CLI::App* sub = app.add_subcommand(name, descriptions.at(name));
    add_common(sub, args[name]);
  }

  CLI11_PARSE(app, argc, argv);

  for (const auto& [name, fn] : cmds) {
    if (app.got_subcommand(name)) {
      return run(args[name], fn);
    }
  }
  return 2;
}
