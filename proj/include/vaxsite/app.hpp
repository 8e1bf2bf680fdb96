#pragma once

// Run configuration and the command pipeline behind the command-line tool:
// load inputs, build/solve/export models, simulate, calibrate, sweep, report.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vaxsite/evaluate.hpp"
#include "vaxsite/ingest.hpp"
#include "vaxsite/plan.hpp"
#include "vaxsite/solve.hpp"

namespace vaxsite::app {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitInfeasible = 2,
  kExitInput = 3,
  kExitInternal = 4,
};

int exit_code_for(ErrorCode code);

struct EpiSettings {
  double beta_u_scale = 1.4;  // beta_U = scale * beta_I
  double delta_I = 0.1, delta_U = 0.15;
  double gamma_I = 0.1, gamma_U = 0.12, gamma_H = 0.08;
  double mu_I = 0.002, mu_U = 0.001, mu_H = 0.02;
  double eta = 0.02, theta = 0.01;
  double seed_fraction = 0.001;  // initially infectious share of each district
  std::size_t days = 300;
  std::size_t vaccination_lead = 180;  // vaccination starts this many days before the end
  std::string start_date = "2020-03-01";
  std::string calibrated;  // optional calibrated.csv from `calibrate`
  std::vector<evaluate::CalibrationInterval> intervals = evaluate::default_intervals();
  double w_D = 1.0, w_C = 1.0, w_I = 1.0, w_H = 1.0;
  std::size_t evaluations = 2000;
  std::size_t restarts = 3;
};

struct RunConfig {
  std::filesystem::path base_dir;  // relative input paths resolve against this
  std::string districts, commuters, travel, supply, beta, observed, prevalence;
  std::size_t max_sites = plan::kDefaultMaxSites;
  std::size_t horizon = 6;
  std::size_t equity_horizon = 2;
  Count capacity = ingest::kDefaultSiteCapacity;
  double lambda = plan::kDefaultLambda;
  double lambda_eq = plan::kDefaultLambdaEq;
  double decay = 0.9;
  double gamma = 0.1;  // clearance rate behind the herd-immunity targets
  double dt = 0.1;
  double occupancy_scale = ingest::kDefaultOccupancyScale;
  plan::Formulation formulation = plan::Formulation::kP2;
  std::vector<std::string> fixed_sites;
  std::string backend = "exhaustive";  // or "external"
  std::string solution;                // solution file for the external backend
  std::vector<double> sweep_lambda{0.0, 5.0, 10.0};
  std::vector<double> sweep_lambda_eq{0.0, 150.0, 1000.0};
  std::size_t jobs = 1;
  bool strict = false;
  bool acceptance = false;
  std::size_t max_subsets = 100000;
  double time_budget = 0.0;  // seconds, 0 = none
  std::uint64_t seed = 20200301;
  EpiSettings epi;
};

// Throws ConfigError for an unknown key or a value that does not parse.
void set_option(RunConfig& config, const std::string& key, const std::string& value);
// `key = value` lines, `#` comments. Relative paths resolve against the
// file's directory.
RunConfig load_config(const std::filesystem::path& path);
// Every key with its current value, in a fixed order; the manifest hashes this.
std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& config);
std::string config_text(const RunConfig& config);

std::uint64_t fnv1a(std::string_view bytes);

struct Inputs {
  ingest::DistrictTable districts;
  ingest::CommuterMatrix commuters;
  travel::TravelMatrix travel;
  ingest::SupplySchedule supply;
  Matrix<double> beta;  // empty when no beta file is configured
  std::vector<std::string> files;  // resolved paths that were read
};

// Throws on the first missing or malformed file, naming it.
Inputs load_inputs(const RunConfig& config);

// Herd-immunity fractions from the beta matrix, gamma and (when given) the
// prevalence snapshot; equal prevalence otherwise. Throws ConfigError without beta.
std::vector<double> herd_targets(const RunConfig& config, const Inputs& inputs);
plan::PlanModel build_model(const RunConfig& config, const Inputs& inputs,
                            plan::Formulation formulation, double lambda, double lambda_eq);
plan::PlanModel build_model(const RunConfig& config, const Inputs& inputs);

// Compartmental-model parameters from the config (or its calibrated file).
evaluate::ParamTimeline epi_params(const RunConfig& config, const Inputs& inputs);
evaluate::EvaluationSetup evaluation_setup(const RunConfig& config, const Inputs& inputs);

struct Outcome {
  plan::Formulation formulation = plan::Formulation::kP2;
  double lambda = 0.0, lambda_eq = 0.0;
  solve::SolveReport report;
  plan::Metrics metrics;
  double commuter_travel = 0.0;  // travel minutes under commuter-aware costs
  plan::AllocationPlan scored;   // the plan in commuter-aware form (P0 plans lifted)
  std::optional<evaluate::AvertedInfections> averted;
};

// Solves one formulation with the exhaustive backend and scores the plan.
// Throws Infeasible when no plan exists.
Outcome solve_scenario(const RunConfig& config, const Inputs& inputs, plan::Formulation formulation,
                       double lambda, double lambda_eq, bool simulate_epidemic);

struct SweepRow {
  std::string axis;  // "lambda" or "lambda_eq"
  double lambda = 0.0, lambda_eq = 0.0;
  double travel = 0.0, averted = 0.0, inequity = 0.0, composite = 0.0;
};

// One P2 solve plus simulation per grid value, up to config.jobs at a time.
// Rows come back in grid order, lambda axis first.
std::vector<SweepRow> run_sweep(const RunConfig& config, const Inputs& inputs);

struct CommandArgs {
  std::filesystem::path out_dir = "out";
  std::string plan;      // plan/solution file for evaluate, validate, import-solution
  bool write_mps = false;
  bool synthetic_observed = false;  // simulate: also write observed.csv
};

struct CommandResult {
  int exit_code = kExitOk;
  std::string summary;  // human-readable lines for stdout
  std::vector<std::string> outputs;  // files written, relative to out_dir
};

std::vector<std::string> command_names();
// Runs one subcommand; errors come back as exit codes with the message in
// `summary` rather than as exceptions.
CommandResult run_command(const std::string& name, const RunConfig& config,
                          const CommandArgs& args);

}  // namespace vaxsite::app
