#pragma once

// Detailed compartmental model (S, V, E, I, U, H, R, D per district), its
// calibration against surveillance series, and infections-averted accounting
// for an allocation plan.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vaxsite/common.hpp"
#include "vaxsite/ingest.hpp"
#include "vaxsite/plan.hpp"
#include "vaxsite/travel.hpp"

namespace vaxsite::evaluate {

struct EpiParams {
  Matrix<double> beta_I;  // beta_I(u, v): identified infectious in u onto susceptibles in v
  Matrix<double> beta_U;
  double delta_I = 0.0, delta_U = 0.0;  // E -> I, E -> U
  double gamma_I = 0.0, gamma_U = 0.0, gamma_H = 0.0;
  double mu_I = 0.0, mu_U = 0.0, mu_H = 0.0;
  double eta = 0.0;    // I -> H
  double theta = 0.0;  // U -> H
  // When false, new infections enter I directly and E stays empty.
  bool exposed_stage = true;

  std::size_t size() const noexcept { return beta_I.rows(); }
};

// Throws InvalidArgument on a negative or non-finite rate or a shape mismatch.
void check_params(const EpiParams& params, std::size_t n);

// Piecewise-constant parameters: pieces[k] applies from starts[k] (a day
// number) until the next start.
struct ParamTimeline {
  std::vector<std::size_t> starts;
  std::vector<EpiParams> pieces;

  ParamTimeline() = default;
  explicit ParamTimeline(EpiParams constant) : starts{0}, pieces{std::move(constant)} {}

  const EpiParams& at(std::size_t day) const;
};

struct EpiState {
  std::vector<double> S, V, E, I, U, H, R, D;

  EpiState() = default;
  explicit EpiState(std::size_t n);

  std::size_t size() const noexcept { return S.size(); }
  double living(std::size_t u) const { return S[u] + V[u] + E[u] + I[u] + U[u] + H[u] + R[u]; }
  double total(std::size_t u) const { return living(u) + D[u]; }
  // Cumulative cases as D + H + R + I.
  double cumulative_cases(std::size_t u) const { return D[u] + H[u] + R[u] + I[u]; }
  double cumulative_cases() const;
};

// Everyone susceptible except `infected[u]` persons placed in I.
EpiState seed_state(const std::vector<Count>& population, const std::vector<double>& infected);

using Trajectory = std::vector<EpiState>;  // daily snapshots, day 0 first

inline constexpr double kPeriodDays = 30.0;

// Doses delivered to each district's residents, as a constant daily flow
// within each plan period. Period t covers days [start + t*len, start + (t+1)*len).
class VaccinationSchedule {
 public:
  VaccinationSchedule() = default;
  VaccinationSchedule(Matrix<double> doses, double start_day, double period_days = kPeriodDays);

  // Doses come from the plan's vaccinated counts; with an acceptance model
  // every (u, v, w) flow is scaled by its likelihood first.
  static VaccinationSchedule from_plan(const plan::AllocationPlan& plan, double start_day,
                                       const travel::TravelModel* acceptance_travel = nullptr,
                                       double period_days = kPeriodDays);

  bool empty() const noexcept { return doses_.empty(); }
  const Matrix<double>& doses() const noexcept { return doses_; }
  double start_day() const noexcept { return start_; }
  double period_days() const noexcept { return length_; }
  double end_day() const noexcept { return start_ + length_ * doses_.rows(); }
  double total_doses() const;

  // Period active at `time`, if any.
  std::optional<std::size_t> period_at(double time) const;
  // Planned daily flow into V at district v (0 outside the window).
  double rate(double time, std::size_t v) const;
  // Equivalent per-capita rate xi = rate / S (0 when S is empty).
  double xi(double time, std::size_t v, double susceptible) const;

  VaccinationSchedule scaled(double factor) const;

 private:
  Matrix<double> doses_;  // periods x districts
  double start_ = 0.0;
  double length_ = kPeriodDays;
};

// RK4 integration with daily snapshots. The vaccination flow is held
// constant within each step and capped by the susceptibles at the step start
// and by the doses left in the current period. `dt` must divide one day.
Trajectory simulate(const EpiState& initial, const ParamTimeline& params,
                    const VaccinationSchedule& schedule, std::size_t days, double dt,
                    std::size_t start_day = 0);
Trajectory simulate(const EpiState& initial, const EpiParams& params,
                    const VaccinationSchedule& schedule, std::size_t days, double dt);

// Time derivative without vaccination.
EpiState derivative(const EpiState& state, const EpiParams& params);

struct Surveillance {
  double cumulative_cases = 0.0;
  double cases = 0.0;
  double cumulative_deaths = 0.0;
  double hospitalizations = 0.0;

  bool operator==(const Surveillance&) const = default;
};

using ObservedSeries = std::vector<std::vector<Surveillance>>;  // [day][district]

struct CalibrationInterval {
  std::string name;
  std::size_t days = 0;
};

struct CalibrationSpec {
  std::vector<CalibrationInterval> intervals;
  double w_D = 1.0, w_C = 1.0, w_I = 1.0, w_H = 1.0;
  std::vector<double> district_weights;

  std::size_t total_days() const;
};

std::vector<CalibrationInterval> default_intervals();
// Default intervals and unit weights; district weights p_u / sum p.
CalibrationSpec make_calibration_spec(const std::vector<Count>& population);
void check_spec(const CalibrationSpec& spec, std::size_t n);

// Simulated snapshot k is compared with observed day k. Throws LengthMismatch.
double calibration_loss(const Trajectory& trajectory, const ObservedSeries& observed,
                        const CalibrationSpec& spec);

// What observing `trajectory` perfectly would report, one entry per snapshot.
ObservedSeries observe(const Trajectory& trajectory);

inline constexpr std::size_t kCalibratedCount = 10;

// Order: beta_I scale, beta_U scale, delta_I, delta_U, gamma_I, gamma_U,
// gamma_H, mu_I, mu_U, mu_H. The beta scales multiply fixed contact patterns.
struct ContactPattern {
  Matrix<double> beta_I, beta_U;  // each normalized to a largest entry of 1
};

ContactPattern contact_pattern(const EpiParams& params);
// The beta entries are read as the largest entry of each matrix.
std::vector<double> pack(const EpiParams& params);
EpiParams unpack(const std::vector<double>& p, const EpiParams& base,
                 const ContactPattern& pattern);

struct OptimizerConfig {
  std::size_t max_evaluations = 2000;  // per interval, restarts included
  std::size_t restarts = 3;
  std::uint64_t seed = 20200301;
  double initial_step = 0.25;  // simplex size in log-parameter units
  double stop_ratio = 1e-9;    // stop once the loss is this fraction of its start
  double dt = 0.1;
  std::vector<double> lower = std::vector<double>(kCalibratedCount, 0.0);
  std::vector<double> upper{10.0, 10.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
};

struct IntervalTrace {
  std::string name;
  std::vector<double> start;  // parameter vector the search began from
  std::vector<double> best;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::size_t evaluations = 0;
};

struct CalibrationResult {
  ParamTimeline timeline;
  std::vector<IntervalTrace> trace;
};

// Sequential Nelder-Mead fit, warm-started interval to interval. Throws
// InsufficientData when `observed` is shorter than the intervals, and
// OptimizerDiverged when no finite loss is found.
CalibrationResult calibrate(const EpiState& initial, const EpiParams& guess,
                            const ObservedSeries& observed, const CalibrationSpec& spec,
                            const OptimizerConfig& config = {});

struct AvertedInfections {
  double baseline = 0.0;  // cumulative cases with no vaccination
  double policy = 0.0;    // cumulative cases under the plan
  double averted = 0.0;
};

struct EvaluationSetup {
  ParamTimeline params;
  EpiState initial;
  std::size_t days = 300;
  std::size_t vaccination_start = 120;
  double dt = 0.1;
};

AvertedInfections infections_averted(const EvaluationSetup& setup,
                                     const VaccinationSchedule& schedule);
AvertedInfections infections_averted(const EvaluationSetup& setup,
                                     const plan::AllocationPlan& plan,
                                     const travel::TravelModel* acceptance_travel = nullptr);

// date,district_id,cumulative_cases,cases,cumulative_deaths,hospitalizations.
// Dates are ISO (YYYY-MM-DD), must be consecutive days and list every district.
ObservedSeries load_observed(std::istream& in, const std::string& label,
                             const ingest::DistrictTable& districts);
ObservedSeries load_observed(const std::filesystem::path& path,
                             const ingest::DistrictTable& districts);
void write_observed(std::ostream& out, const ObservedSeries& observed,
                    const ingest::DistrictTable& districts, const std::string& first_date);

// day,district_id,S,V,E,I,U,H,R,D.
void write_trajectory(std::ostream& out, const Trajectory& trajectory,
                      const ingest::DistrictTable& districts);

}  // namespace vaxsite::evaluate
