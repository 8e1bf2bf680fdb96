#include <atomic>
#include <exception>
#include <fstream>
#include <thread>

#include "csv.hpp"
#include "vaxsite/app.hpp"
#include "vaxsite/epi.hpp"

namespace vaxsite::app {

namespace {

const std::string& require(const std::string& path, const char* key) {
  if (path.empty()) {
    throw Error(ErrorCode::kConfigError, std::string("no '") + key + "' file configured");
  }
  return path;
}

std::vector<std::size_t> fixed_indices(const RunConfig& config, const Inputs& inputs) {
  if (config.fixed_sites.empty()) {
    throw Error(ErrorCode::kConfigError, "p2-fixed needs 'fixed_sites'");
  }
  std::vector<std::size_t> out;
  for (const auto& id : config.fixed_sites) out.push_back(inputs.districts.index_of(id));
  return out;
}

const std::vector<std::string> kCalibratedColumns{
    "interval", "start_day", "beta_I",  "beta_U", "delta_I", "delta_U",
    "gamma_I",  "gamma_U",   "gamma_H", "mu_I",   "mu_U",    "mu_H"};

evaluate::ParamTimeline load_calibrated(const std::string& path,
                                        const evaluate::EpiParams& base) {
  auto in = detail::open_input(path);
  detail::CsvReader reader(in, path, kCalibratedColumns);
  const auto pattern = evaluate::contact_pattern(base);
  evaluate::ParamTimeline timeline;
  detail::CsvRow row;
  while (reader.next(row)) {
    const auto start = detail::parse_int(row.fields[1]);
    if (!start || *start < 0) reader.fail(ErrorCode::kMalformedRow, row, "bad start_day");
    const auto day = static_cast<std::size_t>(*start);
    if (timeline.starts.empty() ? day != 0 : day <= timeline.starts.back()) {
      reader.fail(ErrorCode::kMalformedRow, row, "start days must begin at 0 and increase");
    }
    std::vector<double> p;
    for (std::size_t k = 2; k < row.fields.size(); ++k) {
      const auto v = detail::parse_double(row.fields[k]);
      if (!v || *v < 0.0) reader.fail(ErrorCode::kMalformedRow, row, "bad rate '" + row.fields[k] + "'");
      p.push_back(*v);
    }
    timeline.starts.push_back(day);
    timeline.pieces.push_back(evaluate::unpack(p, base, pattern));
  }
  if (timeline.pieces.empty()) throw Error(ErrorCode::kEmptyFile, path + ": no intervals");
  return timeline;
}

}  // namespace

Inputs load_inputs(const RunConfig& config) {
  Inputs in;
  const auto& districts = require(config.districts, "districts");
  in.districts = ingest::load_districts(districts);
  in.files.push_back(districts);
  if (config.commuters.empty()) {
    in.commuters = ingest::no_commuters(in.districts);
  } else {
    in.commuters = ingest::load_commuters(config.commuters, in.districts, config.occupancy_scale);
    in.files.push_back(config.commuters);
  }
  const auto& travel = require(config.travel, "travel");
  in.travel = ingest::load_travel_matrix(travel, in.districts);
  in.files.push_back(travel);
  if (config.supply.empty()) {
    in.supply = ingest::uniform_supply(in.districts, config.horizon, config.equity_horizon,
                                       config.capacity);
  } else {
    in.supply = ingest::load_supply(config.supply, in.districts, config.horizon,
                                    config.equity_horizon, config.capacity);
    in.files.push_back(config.supply);
  }
  if (!config.beta.empty()) {
    in.beta = ingest::load_pair_matrix(config.beta, in.districts, "rate", 0.0, false);
    in.files.push_back(config.beta);
  }
  if (!config.prevalence.empty()) in.files.push_back(config.prevalence);
  if (!config.epi.calibrated.empty()) in.files.push_back(config.epi.calibrated);
  return in;
}

std::vector<double> herd_targets(const RunConfig& config, const Inputs& inputs) {
  if (inputs.beta.empty()) {
    throw Error(ErrorCode::kConfigError, "health terms need a 'beta' file");
  }
  const auto n = inputs.districts.size();
  epi::SirParams params;
  params.beta = inputs.beta;
  params.gamma = config.gamma;
  if (config.prevalence.empty()) {
    params.kappa = Matrix<double>(n, n, 1.0);
  } else {
    params.kappa = epi::estimate_kappa(
        ingest::load_district_values(config.prevalence, inputs.districts, "prevalence"));
  }
  return epi::herd_immunity_targets(params);
}

plan::PlanModel build_model(const RunConfig& config, const Inputs& inputs,
                            plan::Formulation formulation, double lambda, double lambda_eq) {
  const travel::TravelModel travel(inputs.travel);
  const plan::BuildOptions options{config.strict};
  using plan::Formulation;
  switch (formulation) {
    case Formulation::kP0:
    case Formulation::kP1:
      return plan::build_p1(inputs.districts, inputs.commuters, travel, inputs.supply,
                            config.max_sites, formulation == Formulation::kP1, options);
    case Formulation::kP2:
    case Formulation::kP2Fixed: {
      const auto targets = herd_targets(config, inputs);
      const auto scores = epi::priority_scores(inputs.commuters, config.horizon, config.decay);
      if (formulation == Formulation::kP2) {
        return plan::build_p2(inputs.districts, inputs.commuters, travel, inputs.supply,
                              config.max_sites, targets, scores, lambda, lambda_eq, options);
      }
      return plan::build_p2_fixed(inputs.districts, inputs.commuters, travel, inputs.supply,
                                  config.max_sites, targets, scores, lambda, lambda_eq,
                                  fixed_indices(config, inputs), options);
    }
  }
  throw Error(ErrorCode::kInvariantBreach, "unhandled formulation");
}

plan::PlanModel build_model(const RunConfig& config, const Inputs& inputs) {
  return build_model(config, inputs, config.formulation, config.lambda, config.lambda_eq);
}

evaluate::ParamTimeline epi_params(const RunConfig& config, const Inputs& inputs) {
  if (inputs.beta.empty()) {
    throw Error(ErrorCode::kConfigError, "the epidemic model needs a 'beta' file");
  }
  const auto& e = config.epi;
  evaluate::EpiParams p;
  p.beta_I = inputs.beta;
  p.beta_U = inputs.beta;
  for (auto& b : p.beta_U.data()) b *= e.beta_u_scale;
  p.delta_I = e.delta_I;
  p.delta_U = e.delta_U;
  p.gamma_I = e.gamma_I;
  p.gamma_U = e.gamma_U;
  p.gamma_H = e.gamma_H;
  p.mu_I = e.mu_I;
  p.mu_U = e.mu_U;
  p.mu_H = e.mu_H;
  p.eta = e.eta;
  p.theta = e.theta;
  evaluate::check_params(p, inputs.districts.size());
  if (e.calibrated.empty()) return evaluate::ParamTimeline(std::move(p));
  return load_calibrated(e.calibrated, p);
}

evaluate::EvaluationSetup evaluation_setup(const RunConfig& config, const Inputs& inputs) {
  const auto& e = config.epi;
  if (e.vaccination_lead > e.days) {
    throw Error(ErrorCode::kConfigError, "'vaccination_lead' exceeds 'eval_days'");
  }
  if (e.seed_fraction > 1.0) {
    throw Error(ErrorCode::kConfigError, "'seed_fraction' must be at most 1");
  }
  evaluate::EvaluationSetup setup;
  setup.params = epi_params(config, inputs);
  std::vector<Count> population;
  std::vector<double> infected;
  for (const auto& d : inputs.districts.districts()) {
    population.push_back(d.population);
    infected.push_back(e.seed_fraction * static_cast<double>(d.population));
  }
  setup.initial = evaluate::seed_state(population, infected);
  setup.days = e.days;
  setup.vaccination_start = e.days - e.vaccination_lead;
  setup.dt = config.dt;
  return setup;
}

Outcome solve_scenario(const RunConfig& config, const Inputs& inputs,
                       plan::Formulation formulation, double lambda, double lambda_eq,
                       bool simulate_epidemic) {
  Outcome out;
  out.formulation = formulation;
  out.lambda = lambda;
  out.lambda_eq = lambda_eq;
  const auto model = build_model(config, inputs, formulation, lambda, lambda_eq);
  solve::Limits limits;
  limits.max_subsets = config.max_subsets;
  limits.time_budget = std::chrono::duration<double>(config.time_budget);
  out.report = solve::solve_exhaustive(model, limits);
  if (!out.report.plan) throw Error(ErrorCode::kInfeasible, "no feasible plan");
  out.metrics = plan::evaluate_plan(model, *out.report.plan);

  // P0 ignores commuting when choosing; its plan is then costed for everyone.
  auto& scored = out.scored;
  scored = *out.report.plan;
  out.commuter_travel = out.metrics.travel_minutes;
  if (formulation == plan::Formulation::kP0) {
    const auto p1 = build_model(config, inputs, plan::Formulation::kP1, 0.0, 0.0);
    scored = plan::lift_to_commuters(scored, p1.instance());
    out.commuter_travel = plan::evaluate_plan(p1, scored).travel_minutes;
  }
  if (simulate_epidemic) {
    const auto setup = evaluation_setup(config, inputs);
    out.averted = evaluate::infections_averted(
        setup, scored, config.acceptance ? &model.instance().travel : nullptr);
  }
  return out;
}

std::vector<SweepRow> run_sweep(const RunConfig& config, const Inputs& inputs) {
  std::vector<SweepRow> rows;
  for (const double l : config.sweep_lambda) rows.push_back({"lambda", l, config.lambda_eq});
  for (const double l : config.sweep_lambda_eq) rows.push_back({"lambda_eq", config.lambda, l});

  std::vector<std::exception_ptr> errors(rows.size());
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      try {
        auto& r = rows[i];
        const auto o = solve_scenario(config, inputs, plan::Formulation::kP2, r.lambda,
                                      r.lambda_eq, true);
        r.travel = o.metrics.travel_minutes;
        r.averted = o.averted->averted;
        r.inequity = o.metrics.inequity;
        r.composite = o.metrics.composite;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto workers = std::min(config.jobs, rows.size());
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < workers; ++k) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

}  // namespace vaxsite::app
