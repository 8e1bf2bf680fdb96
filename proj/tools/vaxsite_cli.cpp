// Command-line front end over the vaxsite C interface.
//
//   vaxsite <command> --config run.cfg [--out dir] [--plan file] [overrides]
//
// Exit codes: 0 success, 2 infeasible, 3 input error, 4 internal error.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vaxsite/vaxsite.h"

namespace {

struct Options {
  std::string config;
  std::string out = "out";
  std::string plan;
  std::vector<std::string> sets;
  bool write_mps = false;
  bool synthetic_observed = false;
  bool acceptance = false;
  bool strict = false;
  std::vector<std::pair<std::string, std::string>> overrides;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("-c,--config", o.config, "run configuration file")->required();
  cmd->add_option("-o,--out", o.out, "output directory")->capture_default_str();
  cmd->add_option("--set", o.sets, "override a config key (key=value), repeatable");
  cmd->add_flag("--strict", o.strict, "fail on zero-capacity or infeasible-by-construction");
  const auto forward = [&o, cmd](const char* flag, const char* key, const char* help) {
    cmd->add_option_function<std::string>(
        flag, [&o, key](const std::string& v) { o.overrides.emplace_back(key, v); }, help);
  };
  forward("--formulation", "formulation", "p0, p1, p2 or p2-fixed");
  forward("--lambda", "lambda", "weight of the health term");
  forward("--lambda-eq", "lambda_eq", "weight of the equity term");
  forward("--max-sites", "max_sites", "site limit K");
  forward("--backend", "backend", "exhaustive or external");
  forward("--solution", "solution", "solution file for the external backend");
  forward("--jobs", "jobs", "parallel scenarios for sweep");
  forward("--seed", "seed", "random seed");
}

int fail_with(vxs_status status) {
  std::fprintf(stderr, "vaxsite: %s\n", vxs_last_error());
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"vaxsite: mass-vaccination site planning"};
  cli.require_subcommand(1);
  cli.set_version_flag("--version", vxs_version());

  Options o;
  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {"ingest-check", "load and validate the inputs"},
      {"build", "build the configured formulation and describe it"},
      {"solve", "solve the configured formulation; writes plan.sol and metrics.csv"},
      {"export-mps", "write the model as free MPS"},
      {"import-solution", "read an external solver's solution; writes plan.sol and metrics.csv"},
      {"validate", "check a solution file against the model"},
      {"simulate", "run the compartmental model; writes trajectory.csv"},
      {"calibrate", "fit the compartmental model to observed.csv"},
      {"evaluate", "travel, equity and infections averted of a plan"},
      {"sweep", "P2 over the lambda and lambda_eq grids"},
      {"report", "P0 / P1 / P2 / P2-fixed comparison"},
  };
  for (const auto& s : subs) {
    auto* cmd = cli.add_subcommand(s.name, s.help);
    add_common(cmd, o);
    const std::string name = s.name;
    if (name == "build" || name == "solve") {
      cmd->add_flag("--mps", o.write_mps, "also write model.mps");
    }
    if (name == "simulate") {
      cmd->add_flag("--synthetic-observed", o.synthetic_observed,
                    "also write the trajectory as observed.csv");
    }
    if (name == "simulate" || name == "evaluate" || name == "validate" ||
        name == "import-solution" || name == "solve") {
      cmd->add_option("-p,--plan", o.plan, "plan or solution file");
    }
    if (name == "simulate" || name == "evaluate" || name == "solve" || name == "sweep" ||
        name == "report") {
      cmd->add_flag("--acceptance", o.acceptance, "scale doses by acceptance likelihood");
    }
  }

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : 3;
  }
  const auto* sub = cli.get_subcommands().front();

  vxs_config* config = nullptr;
  if (const auto s = vxs_config_load(o.config.c_str(), &config); s != VXS_OK) return fail_with(s);
  const auto set = [&](const std::string& key, const std::string& value) {
    return vxs_config_set(config, key.c_str(), value.c_str());
  };
  vxs_status status = VXS_OK;
  for (const auto& [k, v] : o.overrides) {
    if (status == VXS_OK) status = set(k, v);
  }
  for (const auto& kv : o.sets) {
    if (status != VXS_OK) break;
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "vaxsite: --set expects key=value, got '%s'\n", kv.c_str());
      vxs_config_free(config);
      return VXS_INPUT_ERROR;
    }
    status = set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (status == VXS_OK && o.acceptance) status = set("acceptance", "true");
  if (status == VXS_OK && o.strict) status = set("strict", "true");
  if (status != VXS_OK) {
    vxs_config_free(config);
    return fail_with(status);
  }

  unsigned flags = 0;
  if (o.write_mps) flags |= VXS_RUN_WRITE_MPS;
  if (o.synthetic_observed) flags |= VXS_RUN_SYNTHETIC_OBSERVED;
  vxs_result* result = nullptr;
  status = vxs_run(config, sub->get_name().c_str(), o.out.c_str(),
                   o.plan.empty() ? nullptr : o.plan.c_str(), flags, &result);
  vxs_config_free(config);
  if (!result) return fail_with(status);
  if (status == VXS_OK) {
    std::cout << vxs_result_summary(result);
  } else {
    std::cerr << "vaxsite: " << vxs_result_summary(result);
    // Infeasibility is an answer, not a malfunction: report it on stdout too.
    if (status == VXS_INFEASIBLE) std::cout << "status=infeasible\n";
  }
  vxs_result_free(result);
  return status;
}
