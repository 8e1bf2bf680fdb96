#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "csv.hpp"
#include "svg.hpp"
#include "vaxsite/app.hpp"

namespace vaxsite::app {

namespace {

using detail::format_double;
namespace fs = std::filesystem;

std::string hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Run {
 public:
  Run(std::string command, const RunConfig& config, const CommandArgs& args)
      : command_(std::move(command)), config_(config), args_(args) {}

  const RunConfig& config() const { return config_; }
  const CommandArgs& args() const { return args_; }

  void note_input(const std::string& path) { inputs_.push_back(path); }
  void say(const std::string& line) { summary_ += line + '\n'; }

  void write(const std::string& name, const std::string& content) {
    fs::create_directories(args_.out_dir);
    const auto path = args_.out_dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw Error(ErrorCode::kIoError, "write failed for '" + path.string() + "'");
    outputs_.emplace_back(name, fnv1a(content));
  }

  CommandResult finish() {
    std::ostringstream m;
    m << "vaxsite " << kVersion << '\n';
    m << "command " << command_ << '\n';
    m << "seed " << config_.seed << '\n';
    m << "config " << hex(fnv1a(config_text(config_))) << '\n';
    for (const auto& path : inputs_) m << "input " << path << ' ' << hex(fnv1a(read_bytes(path))) << '\n';
    for (const auto& [name, h] : outputs_) m << "output " << name << ' ' << hex(h) << '\n';
    write("manifest.txt", m.str());
    CommandResult r;
    r.summary = summary_;
    for (const auto& o : outputs_) r.outputs.push_back(o.first);
    return r;
  }

 private:
  std::string command_;
  const RunConfig& config_;
  const CommandArgs& args_;
  std::vector<std::string> inputs_;
  std::vector<std::pair<std::string, std::uint64_t>> outputs_;
  std::string summary_;
};

Inputs load(Run& run) {
  auto inputs = load_inputs(run.config());
  for (const auto& f : inputs.files) run.note_input(f);
  return inputs;
}

std::string site_list(const Inputs& inputs, const plan::AllocationPlan& p) {
  std::string out;
  for (const auto w : p.open_sites()) out += (out.empty() ? "" : ";") + inputs.districts.id(w);
  return out;
}

const std::string& plan_path(const Run& run) {
  if (!run.args().plan.empty()) return run.args().plan;
  if (!run.config().solution.empty()) return run.config().solution;
  throw Error(ErrorCode::kConfigError, "no plan file given");
}

// A written plan names its formulation in a leading comment.
plan::Formulation plan_formulation(const std::string& path, plan::Formulation fallback) {
  auto in = detail::open_input(path);
  std::string line;
  while (std::getline(in, line)) {
    const auto text = detail::trim(line);
    if (text.empty()) continue;
    if (text.front() != '#') break;
    std::istringstream words{std::string(text.substr(1))};
    std::string key, value;
    if (words >> key >> value && key == "formulation") return plan::parse_formulation(value);
  }
  return fallback;
}

plan::PlanModel plan_model(Run& run, const Inputs& inputs, const std::string& path) {
  const auto f = plan_formulation(path, run.config().formulation);
  return build_model(run.config(), inputs, f, run.config().lambda, run.config().lambda_eq);
}

// Commuter-aware form of a plan, for travel and acceptance accounting.
plan::AllocationPlan commuter_form(const RunConfig& config, const Inputs& inputs,
                                   const plan::PlanModel& model, const plan::AllocationPlan& p) {
  if (model.formulation() != plan::Formulation::kP0) return p;
  const auto p1 = build_model(config, inputs, plan::Formulation::kP1, 0.0, 0.0);
  return plan::lift_to_commuters(p, p1.instance());
}

std::string metrics_csv(const plan::PlanModel& model, const Inputs& inputs,
                        const plan::AllocationPlan& p, const plan::Metrics& m,
                        const std::string& status, const solve::SolveReport* report) {
  std::ostringstream out;
  out << "metric,value\n";
  out << "formulation," << plan::formulation_name(model.formulation()) << '\n';
  out << "status," << status << '\n';
  out << "objective," << format_double(model.objective_value(plan::to_assignment(model, p)))
      << '\n';
  out << "travel_minutes," << format_double(m.travel_minutes) << '\n';
  out << "health_term," << format_double(m.health_term) << '\n';
  out << "inequity," << format_double(m.inequity) << '\n';
  out << "composite," << format_double(m.composite) << '\n';
  out << "lambda," << format_double(model.instance().health.lambda) << '\n';
  out << "lambda_eq," << format_double(model.instance().health.lambda_eq) << '\n';
  out << "open_sites," << site_list(inputs, p) << '\n';
  if (report) {
    out << "subsets," << report->nodes_or_subsets << '\n';
    out << "subsets_pruned," << report->subsets_pruned << '\n';
    out << "bb_nodes," << report->bb_nodes << '\n';
  }
  for (std::size_t t = 0; t < m.vaccinated.rows(); ++t) {
    for (std::size_t u = 0; u < m.vaccinated.cols(); ++u) {
      out << "vaccinated_" << (t + 1) << '_' << inputs.districts.id(u) << ','
          << m.vaccinated(t, u) << '\n';
    }
  }
  return out.str();
}

void write_plan(Run& run, const Inputs& inputs, const plan::PlanModel& model,
                const plan::AllocationPlan& p, const std::string& status,
                const solve::SolveReport* report) {
  std::ostringstream sol;
  solve::write_solution(model, p, sol);
  run.write("plan.sol", sol.str());
  const auto m = plan::evaluate_plan(model, p);
  run.write("metrics.csv", metrics_csv(model, inputs, p, m, status, report));
  run.say("status=" + status);
  run.say("formulation " + std::string(plan::formulation_name(model.formulation())));
  run.say("open sites " + site_list(inputs, p));
  run.say("travel_minutes " + format_double(m.travel_minutes));
  run.say("inequity " + format_double(m.inequity));
  run.say("composite " + format_double(m.composite));
}

// --- commands ---------------------------------------------------------------

void cmd_ingest_check(Run& run) {
  const auto in = load(run);
  const auto n = in.districts.size();
  Count commuting = 0;
  for (std::size_t u = 0; u < n; ++u) commuting += in.commuters.outflow(u);
  double longest = 0.0;
  for (const double m : in.travel.minutes.data()) longest = std::max(longest, m);
  run.say("districts " + std::to_string(n));
  run.say("population " + std::to_string(in.districts.total_population()));
  run.say("commuters " + std::to_string(commuting));
  run.say("longest_trip_minutes " + format_double(longest));
  run.say("periods " + std::to_string(in.supply.horizon()));
  run.say("equity_periods " + std::to_string(in.supply.equity_horizon));
  run.say("supply " + std::to_string(in.supply.total()));
  run.say("beta " + std::string(in.beta.empty() ? "absent" : "present"));
  if (in.supply.total() < in.districts.total_population()) {
    run.say("warning: total supply is below total population");
  }
}

void describe_model(Run& run, const plan::PlanModel& model) {
  std::size_t binary = 0, integer = 0, continuous = 0;
  for (const auto& v : model.variables()) {
    (v.kind == plan::VarKind::kBinary    ? binary
     : v.kind == plan::VarKind::kInteger ? integer
                                         : continuous)++;
  }
  run.say("formulation " + std::string(plan::formulation_name(model.formulation())));
  run.say("variables " + std::to_string(model.variables().size()) + " (binary " +
          std::to_string(binary) + ", integer " + std::to_string(integer) + ", continuous " +
          std::to_string(continuous) + ")");
  run.say("constraints " + std::to_string(model.constraints().size()));
  using plan::Family;
  for (const auto f : {Family::k1a, Family::k1b, Family::k1c, Family::k1d, Family::k1e,
                       Family::k1f, Family::k2g, Family::k2h}) {
    const auto count = model.count_constraints(f);
    if (count) run.say("  " + std::string(plan::family_label(f)) + " " + std::to_string(count));
  }
  run.say("lambda " + format_double(model.instance().health.lambda));
  run.say("lambda_eq " + format_double(model.instance().health.lambda_eq));
  for (const auto& w : model.warnings()) run.say("warning: " + w);
}

void cmd_build(Run& run) {
  const auto in = load(run);
  const auto model = build_model(run.config(), in);
  describe_model(run, model);
  if (run.args().write_mps) {
    std::ostringstream mps;
    solve::export_mps(model, mps);
    run.write("model.mps", mps.str());
  }
}

void cmd_export_mps(Run& run) {
  const auto in = load(run);
  const auto model = build_model(run.config(), in);
  std::ostringstream mps;
  solve::export_mps(model, mps);
  run.write("model.mps", mps.str());
  describe_model(run, model);
}

void import_plan(Run& run, const Inputs& in, const std::string& path) {
  run.note_input(path);
  const auto model = plan_model(run, in, path);
  const auto p = solve::import_solution(model, fs::path(path));
  write_plan(run, in, model, p, "imported", nullptr);
}

void cmd_solve(Run& run) {
  const auto in = load(run);
  if (run.config().backend == "external") {
    import_plan(run, in, plan_path(run));
    return;
  }
  const auto model = build_model(run.config(), in);
  for (const auto& w : model.warnings()) run.say("warning: " + w);
  solve::Limits limits;
  limits.max_subsets = run.config().max_subsets;
  limits.time_budget = std::chrono::duration<double>(run.config().time_budget);
  const auto report = solve::solve_exhaustive(model, limits);
  if (!report.plan) throw Error(ErrorCode::kInfeasible, "no feasible plan");
  write_plan(run, in, model, *report.plan, std::string(solve::status_name(report.status)),
             &report);
  if (run.args().write_mps) {
    std::ostringstream mps;
    solve::export_mps(model, mps);
    run.write("model.mps", mps.str());
  }
}

void cmd_import_solution(Run& run) {
  const auto in = load(run);
  import_plan(run, in, plan_path(run));
}

void cmd_validate(Run& run) {
  const auto in = load(run);
  const auto& path = plan_path(run);
  run.note_input(path);
  const auto model = plan_model(run, in, path);
  auto file = detail::open_input(path);
  const auto values = solve::read_solution(model, file);
  const auto violations = solve::validate_assignment(model, values);
  if (!violations.empty()) throw Error(ErrorCode::kInfeasiblePlan, plan::describe(violations));
  run.say("valid " + std::string(plan::formulation_name(model.formulation())) + " objective " +
          format_double(model.objective_value(values)));
}

void cmd_simulate(Run& run) {
  const auto in = load(run);
  const auto setup = evaluation_setup(run.config(), in);
  evaluate::VaccinationSchedule schedule;
  if (!run.args().plan.empty()) {
    run.note_input(run.args().plan);
    const auto model = plan_model(run, in, run.args().plan);
    const auto p = commuter_form(run.config(), in, model,
                                 solve::import_solution(model, fs::path(run.args().plan)));
    schedule = evaluate::VaccinationSchedule::from_plan(
        p, static_cast<double>(setup.vaccination_start),
        run.config().acceptance ? &model.instance().travel : nullptr);
  }
  const auto traj = evaluate::simulate(setup.initial, setup.params, schedule, setup.days, setup.dt);
  std::ostringstream out;
  evaluate::write_trajectory(out, traj, in.districts);
  run.write("trajectory.csv", out.str());
  if (run.args().synthetic_observed) {
    std::ostringstream obs;
    evaluate::write_observed(obs, evaluate::observe(traj), in.districts,
                             run.config().epi.start_date);
    run.write("observed.csv", obs.str());
  }
  const auto& last = traj.back();
  double deaths = 0.0;
  for (const double d : last.D) deaths += d;
  run.say("days " + std::to_string(setup.days));
  run.say("doses " + format_double(schedule.total_doses()));
  run.say("cumulative_cases " + format_double(last.cumulative_cases()));
  run.say("deaths " + format_double(deaths));
}

void cmd_calibrate(Run& run) {
  auto config = run.config();
  config.epi.calibrated.clear();  // always start from the configured rates
  const auto in = load(run);
  const auto& path = config.observed;
  if (path.empty()) throw Error(ErrorCode::kConfigError, "no 'observed' file configured");
  run.note_input(path);
  const auto observed = evaluate::load_observed(fs::path(path), in.districts);
  const auto setup = evaluation_setup(config, in);

  std::vector<Count> population;
  for (const auto& d : in.districts.districts()) population.push_back(d.population);
  auto spec = evaluate::make_calibration_spec(population);
  spec.intervals = config.epi.intervals;
  spec.w_D = config.epi.w_D;
  spec.w_C = config.epi.w_C;
  spec.w_I = config.epi.w_I;
  spec.w_H = config.epi.w_H;

  evaluate::OptimizerConfig opt;
  opt.max_evaluations = config.epi.evaluations;
  opt.restarts = config.epi.restarts;
  opt.seed = config.seed;
  opt.dt = config.dt;
  const auto result = evaluate::calibrate(setup.initial, setup.params.pieces.front(), observed,
                                          spec, opt);

  std::ostringstream params, trace;
  params << "interval,start_day,beta_I,beta_U,delta_I,delta_U,gamma_I,gamma_U,gamma_H,mu_I,mu_U,"
            "mu_H\n";
  trace << "interval,start_day,days,initial_loss,final_loss,evaluations\n";
  for (std::size_t k = 0; k < result.trace.size(); ++k) {
    const auto& t = result.trace[k];
    const auto start = result.timeline.starts[k];
    params << t.name << ',' << start;
    for (const double v : evaluate::pack(result.timeline.pieces[k])) {
      params << ',' << format_double(v);
    }
    params << '\n';
    trace << t.name << ',' << start << ',' << spec.intervals[k].days << ','
          << format_double(t.initial_loss) << ',' << format_double(t.final_loss) << ','
          << t.evaluations << '\n';
    run.say(t.name + ": loss " + format_double(t.initial_loss) + " -> " +
            format_double(t.final_loss) + " in " + std::to_string(t.evaluations) +
            " evaluations");
  }
  run.write("calibrated.csv", params.str());
  run.write("calibration.csv", trace.str());
}

void cmd_evaluate(Run& run) {
  const auto in = load(run);
  const auto& path = plan_path(run);
  run.note_input(path);
  const auto model = plan_model(run, in, path);
  const auto p = solve::import_solution(model, fs::path(path));
  const auto m = plan::evaluate_plan(model, p);
  const auto scored = commuter_form(run.config(), in, model, p);
  double commuter_travel = m.travel_minutes;
  if (model.formulation() == plan::Formulation::kP0) {
    const auto p1 = build_model(run.config(), in, plan::Formulation::kP1, 0.0, 0.0);
    commuter_travel = plan::evaluate_plan(p1, scored).travel_minutes;
  }
  const auto setup = evaluation_setup(run.config(), in);

  std::ostringstream out;
  out << "scenario,formulation,travel_minutes,commuter_travel_minutes,health_term,inequity,"
         "composite,baseline_cases,policy_cases,averted\n";
  const auto row = [&](const std::string& scenario, const evaluate::AvertedInfections& a) {
    out << scenario << ',' << plan::formulation_name(model.formulation()) << ','
        << format_double(m.travel_minutes) << ',' << format_double(commuter_travel) << ','
        << format_double(m.health_term) << ',' << format_double(m.inequity) << ','
        << format_double(m.composite) << ',' << format_double(a.baseline) << ','
        << format_double(a.policy) << ',' << format_double(a.averted) << '\n';
    run.say(scenario + ": averted " + format_double(a.averted) + " of " +
            format_double(a.baseline));
  };
  row("plain", evaluate::infections_averted(setup, scored));
  if (run.config().acceptance) {
    row("acceptance", evaluate::infections_averted(setup, scored, &model.instance().travel));
  }
  run.write("evaluation.csv", out.str());
}

void cmd_sweep(Run& run) {
  const auto in = load(run);
  const auto rows = run_sweep(run.config(), in);
  std::ostringstream out;
  out << "axis,lambda,lambda_eq,travel_minutes,averted,inequity,composite\n";
  for (const auto& r : rows) {
    out << r.axis << ',' << format_double(r.lambda) << ',' << format_double(r.lambda_eq) << ','
        << format_double(r.travel) << ',' << format_double(r.averted) << ','
        << format_double(r.inequity) << ',' << format_double(r.composite) << '\n';
  }
  run.write("sweep.csv", out.str());
  for (const std::string axis : {"lambda", "lambda_eq"}) {
    std::vector<double> x;
    std::vector<detail::ChartPanel> panels{{"travel minutes", {}}, {"infections averted", {}},
                                           {"inequity", {}}};
    for (const auto& r : rows) {
      if (r.axis != axis) continue;
      x.push_back(axis == "lambda" ? r.lambda : r.lambda_eq);
      panels[0].y.push_back(r.travel);
      panels[1].y.push_back(r.averted);
      panels[2].y.push_back(r.inequity);
    }
    run.write("sweep_" + axis + ".svg",
              detail::line_chart("P2 outcomes over " + axis, axis, x, panels));
  }
  run.say("scenarios " + std::to_string(rows.size()));
}

void cmd_report(Run& run) {
  const auto& config = run.config();
  const auto in = load(run);
  using plan::Formulation;
  std::vector<Formulation> list{Formulation::kP0, Formulation::kP1, Formulation::kP2};
  if (!config.fixed_sites.empty()) list.push_back(Formulation::kP2Fixed);
  // Health and equity of every plan are scored under the P2 weights.
  const auto p2 = build_model(config, in, Formulation::kP2, config.lambda, config.lambda_eq);
  const auto& weights = p2.instance().health;

  std::ostringstream csv, md;
  csv << "formulation,open_sites,objective,travel_minutes,health_term,inequity,composite,"
         "averted\n";
  md << "# Plan comparison\n\n"
     << "lambda = " << format_double(config.lambda)
     << ", lambda_eq = " << format_double(config.lambda_eq)
     << ". Travel is costed for commuters in every row; health and equity use the P2 "
        "weights.\n\n"
     << "| formulation | open sites | objective | travel minutes | health term | inequity | "
        "composite | infections averted |\n"
     << "|---|---|---|---:|---:|---:|---:|---:|\n";
  for (const auto f : list) {
    const auto o = solve_scenario(config, in, f, config.lambda, config.lambda_eq, true);
    const auto m = plan::evaluate_plan(p2.instance(), o.scored, weights, f);
    const std::string name(plan::formulation_name(f));
    const auto sites = site_list(in, o.scored);
    csv << name << ',' << sites << ',' << format_double(o.report.objective) << ','
        << format_double(m.travel_minutes) << ',' << format_double(m.health_term) << ','
        << format_double(m.inequity) << ',' << format_double(m.composite) << ','
        << format_double(o.averted->averted) << '\n';
    md << "| " << name << " | " << sites << " | " << format_double(o.report.objective) << " | "
       << format_double(m.travel_minutes) << " | " << format_double(m.health_term) << " | "
       << format_double(m.inequity) << " | " << format_double(m.composite) << " | "
       << format_double(o.averted->averted) << " |\n";
    run.say(name + ": travel " + format_double(m.travel_minutes) + ", inequity " +
            format_double(m.inequity) + ", averted " + format_double(o.averted->averted));
  }
  run.write("report.csv", csv.str());
  run.write("report.md", md.str());
}

using Handler = std::function<void(Run&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> table{
      {"ingest-check", cmd_ingest_check}, {"build", cmd_build},
      {"solve", cmd_solve},               {"export-mps", cmd_export_mps},
      {"import-solution", cmd_import_solution}, {"validate", cmd_validate},
      {"simulate", cmd_simulate},         {"calibrate", cmd_calibrate},
      {"evaluate", cmd_evaluate},         {"sweep", cmd_sweep},
      {"report", cmd_report},
  };
  return table;
}

}  // namespace

std::vector<std::string> command_names() {
  return {"ingest-check", "build",    "solve",    "export-mps", "import-solution", "validate",
          "simulate",     "calibrate", "evaluate", "sweep",      "report"};
}

CommandResult run_command(const std::string& name, const RunConfig& config,
                          const CommandArgs& args) {
  const auto it = handlers().find(name);
  if (it == handlers().end()) return {kExitInput, "unknown command '" + name + "'\n", {}};
  try {
    Run run(name, config, args);
    it->second(run);
    return run.finish();
  } catch (const Error& e) {
    const auto code = exit_code_for(e.code());
    std::string prefix = code == kExitInfeasible ? "status=infeasible\n" : "";
    return {code, prefix + e.what() + '\n', {}};
  } catch (const fs::filesystem_error& e) {
    return {kExitInput, std::string("IoError: ") + e.what() + '\n', {}};
  } catch (const std::exception& e) {
    return {kExitInternal, std::string("internal error: ") + e.what() + '\n', {}};
  }
}

}  // namespace vaxsite::app
