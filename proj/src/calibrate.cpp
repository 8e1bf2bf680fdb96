#include <gsl/gsl_errno.h>
#include <gsl/gsl_multifit_nlinear.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "nelder_mead.hpp"
#include "vaxsite/evaluate.hpp"

namespace vaxsite::evaluate {

namespace {

constexpr double kPenalty = 1e100;

double max_entry(const Matrix<double>& m) {
  double best = 0.0;
  for (double x : m.data()) best = std::max(best, x);
  return best;
}

Matrix<double> normalized(const Matrix<double>& m) {
  const double top = max_entry(m);
  Matrix<double> out(m.rows(), m.cols(), 1.0);
  if (top > 0.0) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
      for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j) / top;
    }
  }
  return out;
}

Matrix<double> scaled(const Matrix<double>& pattern, double s) {
  auto out = pattern;
  for (auto& x : out.data()) x *= s;
  return out;
}

struct WorkspaceDeleter {
  void operator()(gsl_multifit_nlinear_workspace* w) const { gsl_multifit_nlinear_free(w); }
};

struct Objective {
  const EpiState* start = nullptr;
  const EpiParams* base = nullptr;
  const ContactPattern* pattern = nullptr;
  const ObservedSeries* observed = nullptr;  // slice for the interval, day 0 = start
  const CalibrationSpec* spec = nullptr;
  const OptimizerConfig* config = nullptr;
  std::size_t days = 0;
  std::size_t evaluations = 0;
  double target = 0.0;  // good enough to stop searching
  double best_loss = kPenalty;
  std::vector<double> best;

  std::size_t residual_count() const { return observed->size() * start->size() * 4; }

  // Both searches move in log space; rates span several orders of magnitude.
  std::vector<double> project(const double* q) const {
    std::vector<double> p(kCalibratedCount);
    for (std::size_t i = 0; i < kCalibratedCount; ++i) {
      p[i] = std::clamp(std::exp(q[i]), config->lower[i], config->upper[i]);
    }
    return p;
  }

  // Loss at p; also fills the weighted residuals when asked.
  double loss(const std::vector<double>& p, gsl_vector* residuals = nullptr) {
    ++evaluations;
    double value = kPenalty;
    try {
      const auto traj = simulate(*start, unpack(p, *base, *pattern), {}, days, config->dt);
      value = calibration_loss(traj, *observed, *spec);
      if (!std::isfinite(value)) value = kPenalty;
      if (residuals != nullptr) fill(traj, residuals);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kStateOutOfRange && e.code() != ErrorCode::kNonFiniteState) throw;
      if (residuals != nullptr) gsl_vector_set_all(residuals, 1e50);
    }
    if (value < best_loss) {
      best_loss = value;
      best = p;
    }
    return value;
  }

  void fill(const Trajectory& traj, gsl_vector* r) const {
    std::size_t k = 0;
    for (std::size_t d = 0; d < traj.size(); ++d) {
      const auto& s = traj[d];
      for (std::size_t u = 0; u < s.size(); ++u) {
        const auto& o = (*observed)[d][u];
        const double w = spec->district_weights[u];
        gsl_vector_set(r, k++, w * spec->w_D * (s.D[u] - o.cumulative_deaths));
        gsl_vector_set(r, k++, w * spec->w_C * (s.cumulative_cases(u) - o.cumulative_cases));
        gsl_vector_set(r, k++, w * spec->w_I * (s.I[u] - o.cases));
        gsl_vector_set(r, k++, w * spec->w_H * (s.H[u] - o.hospitalizations));
      }
    }
  }
};

// One simplex run from `from` using what is left of the budget.
void run_simplex(Objective& obj, const std::vector<double>& from, const std::vector<double>& step,
                 std::size_t budget) {
  if (obj.evaluations >= budget) return;
  detail::SimplexOptions options;
  options.max_evaluations = budget - obj.evaluations;
  options.target = obj.target;
  detail::nelder_mead(
      [&](const std::vector<double>& q) { return obj.loss(obj.project(q.data())); }, from, step,
      options);
}

int residual_callback(const gsl_vector* x, void* data, gsl_vector* f) {
  auto* obj = static_cast<Objective*>(data);
  obj->loss(obj->project(x->data), f);
  return GSL_SUCCESS;
}

// Least-squares polish of the same residuals: trust-region Levenberg-Marquardt
// with a forward-difference Jacobian, stopped before the budget runs out.
void run_least_squares(Objective& obj, const std::vector<double>& from, std::size_t budget) {
  constexpr std::size_t p = kCalibratedCount;
  const std::size_t per_iteration = p + 2;
  if (obj.evaluations + per_iteration + 1 > budget) return;
  gsl_multifit_nlinear_fdf fdf{};
  fdf.f = &residual_callback;
  fdf.df = nullptr;
  fdf.fvv = nullptr;
  fdf.n = obj.residual_count();
  fdf.p = p;
  fdf.params = &obj;
  auto params = gsl_multifit_nlinear_default_parameters();
  std::unique_ptr<gsl_multifit_nlinear_workspace, WorkspaceDeleter> w(
      gsl_multifit_nlinear_alloc(gsl_multifit_nlinear_trust, &params, fdf.n, p));
  gsl_vector_const_view x0 = gsl_vector_const_view_array(from.data(), p);
  if (gsl_multifit_nlinear_init(&x0.vector, &fdf, w.get()) != GSL_SUCCESS) return;
  while (obj.evaluations + per_iteration <= budget) {
    if (gsl_multifit_nlinear_iterate(w.get()) != GSL_SUCCESS) break;
    int info = 0;
    if (gsl_multifit_nlinear_test(1e-12, 1e-12, 1e-14, &info, w.get()) == GSL_SUCCESS) break;
    if (obj.best_loss <= obj.target) break;
  }
}

std::vector<double> to_log(const std::vector<double>& p, const OptimizerConfig& config) {
  std::vector<double> q(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    q[i] = std::log(std::max(p[i], 1e-9 * (config.upper[i] - config.lower[i])));
  }
  return q;
}

}  // namespace

std::size_t CalibrationSpec::total_days() const {
  std::size_t total = 0;
  for (const auto& i : intervals) total += i.days;
  return total;
}

std::vector<CalibrationInterval> default_intervals() {
  return {{"lockdown", 45}, {"social", 45}, {"reopen", 45}, {"second_wave", 75}, {"holiday", 90}};
}

CalibrationSpec make_calibration_spec(const std::vector<Count>& population) {
  CalibrationSpec spec;
  spec.intervals = default_intervals();
  double total = 0.0;
  for (Count p : population) total += static_cast<double>(p);
  if (!(total > 0.0)) throw Error(ErrorCode::kInvalidArgument, "total population must be > 0");
  for (Count p : population) spec.district_weights.push_back(static_cast<double>(p) / total);
  return spec;
}

void check_spec(const CalibrationSpec& spec, std::size_t n) {
  for (const auto& i : spec.intervals) {
    if (i.days == 0) {
      throw Error(ErrorCode::kInvalidArgument, "calibration interval '" + i.name + "' is empty");
    }
  }
  for (double w : {spec.w_D, spec.w_C, spec.w_I, spec.w_H}) {
    if (!(w >= 0.0)) throw Error(ErrorCode::kNegativeWeight, "loss weights must be >= 0");
  }
  if (spec.district_weights.size() != n) {
    throw Error(ErrorCode::kLengthMismatch, "district weights differ from district count");
  }
  double sum = 0.0;
  for (double w : spec.district_weights) {
    if (!(w >= 0.0)) throw Error(ErrorCode::kNegativeWeight, "district weights must be >= 0");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "district weights must sum to 1");
  }
}

double calibration_loss(const Trajectory& trajectory, const ObservedSeries& observed,
                        const CalibrationSpec& spec) {
  if (trajectory.size() != observed.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "trajectory has " + std::to_string(trajectory.size()) + " days, observed has " +
                    std::to_string(observed.size()));
  }
  const auto& wbar = spec.district_weights;
  double loss = 0.0;
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    const auto& s = trajectory[k];
    const auto& o = observed[k];
    if (s.size() != wbar.size() || o.size() != wbar.size()) {
      throw Error(ErrorCode::kLengthMismatch, "district count differs on day " + std::to_string(k));
    }
    for (std::size_t u = 0; u < s.size(); ++u) {
      loss += wbar[u] * (spec.w_D * std::abs(s.D[u] - o[u].cumulative_deaths) +
                         spec.w_C * std::abs(s.cumulative_cases(u) - o[u].cumulative_cases) +
                         spec.w_I * std::abs(s.I[u] - o[u].cases) +
                         spec.w_H * std::abs(s.H[u] - o[u].hospitalizations));
    }
  }
  return loss;
}

ObservedSeries observe(const Trajectory& trajectory) {
  ObservedSeries out;
  out.reserve(trajectory.size());
  for (const auto& s : trajectory) {
    std::vector<Surveillance> day(s.size());
    for (std::size_t u = 0; u < s.size(); ++u) {
      day[u] = {s.cumulative_cases(u), s.I[u], s.D[u], s.H[u]};
    }
    out.push_back(std::move(day));
  }
  return out;
}

ContactPattern contact_pattern(const EpiParams& params) {
  return {normalized(params.beta_I), normalized(params.beta_U)};
}

std::vector<double> pack(const EpiParams& p) {
  return {max_entry(p.beta_I), max_entry(p.beta_U), p.delta_I, p.delta_U, p.gamma_I,
          p.gamma_U,           p.gamma_H,           p.mu_I,    p.mu_U,    p.mu_H};
}

EpiParams unpack(const std::vector<double>& p, const EpiParams& base,
                 const ContactPattern& pattern) {
  if (p.size() != kCalibratedCount) {
    throw Error(ErrorCode::kInvalidArgument, "calibrated vector must have 10 entries");
  }
  EpiParams out = base;
  out.beta_I = scaled(pattern.beta_I, p[0]);
  out.beta_U = scaled(pattern.beta_U, p[1]);
  out.delta_I = p[2];
  out.delta_U = p[3];
  out.gamma_I = p[4];
  out.gamma_U = p[5];
  out.gamma_H = p[6];
  out.mu_I = p[7];
  out.mu_U = p[8];
  out.mu_H = p[9];
  return out;
}

CalibrationResult calibrate(const EpiState& initial, const EpiParams& guess,
                            const ObservedSeries& observed, const CalibrationSpec& spec,
                            const OptimizerConfig& config) {
  const auto n = initial.size();
  check_spec(spec, n);
  check_params(guess, n);
  if (config.lower.size() != kCalibratedCount || config.upper.size() != kCalibratedCount) {
    throw Error(ErrorCode::kInvalidArgument, "optimizer bounds must have 10 entries");
  }
  if (spec.intervals.empty() || observed.empty() || observed.size() < spec.total_days() + 1) {
    throw Error(ErrorCode::kInsufficientData,
                "observed series has " + std::to_string(observed.size()) + " days, need " +
                    std::to_string(spec.total_days() + 1));
  }
  gsl_set_error_handler_off();
  const auto pattern = contact_pattern(guess);
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> jitter(0.5, 1.5);

  CalibrationResult result;
  EpiState start = initial;
  auto current = pack(guess);
  for (std::size_t i = 0; i < current.size(); ++i) {
    current[i] = std::clamp(current[i], config.lower[i], config.upper[i]);
  }
  std::size_t day = 0;
  for (const auto& interval : spec.intervals) {
    const ObservedSeries slice(observed.begin() + static_cast<std::ptrdiff_t>(day),
                               observed.begin() + static_cast<std::ptrdiff_t>(day + interval.days + 1));
    Objective obj;
    obj.start = &start;
    obj.base = &guess;
    obj.pattern = &pattern;
    obj.observed = &slice;
    obj.spec = &spec;
    obj.config = &config;
    obj.days = interval.days;

    IntervalTrace trace;
    trace.name = interval.name;
    trace.start = current;
    trace.initial_loss = obj.loss(current);
    obj.target = config.stop_ratio * trace.initial_loss;

    const auto budget = config.max_evaluations;
    run_simplex(obj, to_log(current, config),
                std::vector<double>(kCalibratedCount, config.initial_step), budget / 4);
    if (obj.best_loss > obj.target) run_least_squares(obj, to_log(obj.best, config), 3 * budget / 4);
    for (std::size_t r = 0; r < config.restarts && obj.best_loss > obj.target; ++r) {
      std::vector<double> step(kCalibratedCount);
      for (auto& s : step) s = config.initial_step * jitter(rng);
      run_simplex(obj, to_log(obj.best, config), step, budget);
    }
    if (!(obj.best_loss < kPenalty)) {
      throw Error(ErrorCode::kOptimizerDiverged,
                  "no finite loss found in interval '" + interval.name + "'");
    }
    trace.best = obj.best;
    trace.final_loss = obj.best_loss;
    trace.evaluations = obj.evaluations;

    const auto fitted = unpack(obj.best, guess, pattern);
    result.timeline.starts.push_back(day);
    result.timeline.pieces.push_back(fitted);
    start = simulate(start, fitted, {}, interval.days, config.dt).back();
    current = obj.best;
    result.trace.push_back(std::move(trace));
    day += interval.days;
  }
  return result;
}

}  // namespace vaxsite::evaluate
