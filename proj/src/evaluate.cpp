#include "vaxsite/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace vaxsite::evaluate {

namespace {

constexpr double kDayTolerance = 1e-9;

EpiState axpy(const EpiState& x, double a, const EpiState& k) {
  EpiState out = x;
  auto add = [a](std::vector<double>& dst, const std::vector<double>& src) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += a * src[i];
  };
  add(out.S, k.S);
  add(out.V, k.V);
  add(out.E, k.E);
  add(out.I, k.I);
  add(out.U, k.U);
  add(out.H, k.H);
  add(out.R, k.R);
  add(out.D, k.D);
  return out;
}

EpiState derivative_with(const EpiState& s, const EpiParams& p, const std::vector<double>& flow) {
  const auto n = s.size();
  EpiState d(n);
  std::vector<double> ratio_I(n, 0.0), ratio_U(n, 0.0);
  for (std::size_t u = 0; u < n; ++u) {
    const double alive = s.living(u);
    if (alive > 0.0) {
      ratio_I[u] = s.I[u] / alive;
      ratio_U[u] = s.U[u] / alive;
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    double force = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      force += p.beta_I(u, v) * ratio_I[u] + p.beta_U(u, v) * ratio_U[u];
    }
    const double incidence = force * s.S[v];
    const double vax = flow.empty() ? 0.0 : flow[v];
    const double progress = (p.delta_I + p.delta_U) * s.E[v];
    d.S[v] = -incidence - vax;
    d.V[v] = vax;
    if (p.exposed_stage) {
      d.E[v] = incidence - progress;
      d.I[v] = p.delta_I * s.E[v];
    } else {
      d.E[v] = -progress;
      d.I[v] = incidence + p.delta_I * s.E[v];
    }
    d.I[v] -= (p.gamma_I + p.mu_I + p.eta) * s.I[v];
    d.U[v] = p.delta_U * s.E[v] - (p.gamma_U + p.mu_U + p.theta) * s.U[v];
    d.H[v] = p.eta * s.I[v] + p.theta * s.U[v] - (p.gamma_H + p.mu_H) * s.H[v];
    d.R[v] = p.gamma_I * s.I[v] + p.gamma_U * s.U[v] + p.gamma_H * s.H[v];
    d.D[v] = p.mu_I * s.I[v] + p.mu_U * s.U[v] + p.mu_H * s.H[v];
  }
  return d;
}

void check_state(const EpiState& s, double time) {
  const auto n = s.size();
  const auto where = [&](std::size_t u) {
    return "district " + std::to_string(u) + " at day " + std::to_string(time);
  };
  for (std::size_t u = 0; u < n; ++u) {
    for (const auto* vec : {&s.S, &s.V, &s.E, &s.I, &s.U, &s.H, &s.R, &s.D}) {
      if (!std::isfinite((*vec)[u])) {
        throw Error(ErrorCode::kNonFiniteState, "non-finite compartment in " + where(u));
      }
    }
  }
  for (std::size_t u = 0; u < n; ++u) {
    const double scale = std::max(1.0, std::abs(s.total(u)));
    for (const auto* vec : {&s.S, &s.V, &s.E, &s.I, &s.U, &s.H, &s.R, &s.D}) {
      if ((*vec)[u] < -1e-9 * scale) {
        throw Error(ErrorCode::kStateOutOfRange,
                    "negative compartment in " + where(u) + "; reduce dt");
      }
    }
  }
}

std::size_t steps_per_day(double dt) {
  if (!(dt > 0.0) || dt > 1.0) throw Error(ErrorCode::kInvalidArgument, "dt must be in (0, 1]");
  const double steps = std::round(1.0 / dt);
  if (std::abs(steps * dt - 1.0) > kDayTolerance) {
    throw Error(ErrorCode::kInvalidArgument, "dt must divide one day");
  }
  return static_cast<std::size_t>(steps);
}

}  // namespace

void check_params(const EpiParams& p, std::size_t n) {
  for (const auto* m : {&p.beta_I, &p.beta_U}) {
    if (m->rows() != n || m->cols() != n) {
      throw Error(ErrorCode::kInvalidArgument, "transmission matrices must be n x n");
    }
    for (double b : m->data()) {
      if (!(b >= 0.0) || !std::isfinite(b)) {
        throw Error(ErrorCode::kInvalidArgument, "transmission rates must be finite and >= 0");
      }
    }
  }
  for (double r : {p.delta_I, p.delta_U, p.gamma_I, p.gamma_U, p.gamma_H, p.mu_I, p.mu_U, p.mu_H,
                   p.eta, p.theta}) {
    if (!(r >= 0.0) || !std::isfinite(r)) {
      throw Error(ErrorCode::kInvalidArgument, "rates must be finite and >= 0");
    }
  }
}

const EpiParams& ParamTimeline::at(std::size_t day) const {
  if (pieces.empty() || pieces.size() != starts.size()) {
    throw Error(ErrorCode::kInvalidArgument, "empty or inconsistent parameter timeline");
  }
  std::size_t k = 0;
  while (k + 1 < starts.size() && starts[k + 1] <= day) ++k;
  return pieces[k];
}

EpiState::EpiState(std::size_t n)
    : S(n, 0.0), V(n, 0.0), E(n, 0.0), I(n, 0.0), U(n, 0.0), H(n, 0.0), R(n, 0.0), D(n, 0.0) {}

double EpiState::cumulative_cases() const {
  double total = 0.0;
  for (std::size_t u = 0; u < size(); ++u) total += cumulative_cases(u);
  return total;
}

EpiState seed_state(const std::vector<Count>& population, const std::vector<double>& infected) {
  if (population.size() != infected.size()) {
    throw Error(ErrorCode::kInvalidArgument, "seed vector length differs from districts");
  }
  EpiState s(population.size());
  for (std::size_t u = 0; u < population.size(); ++u) {
    const auto p = static_cast<double>(population[u]);
    if (!(infected[u] >= 0.0) || infected[u] > p) {
      throw Error(ErrorCode::kInvalidArgument,
                  "seed infections must lie in [0, population] for district " +
                      std::to_string(u));
    }
    s.I[u] = infected[u];
    s.S[u] = p - infected[u];
  }
  return s;
}

VaccinationSchedule::VaccinationSchedule(Matrix<double> doses, double start_day,
                                         double period_days)
    : doses_(std::move(doses)), start_(start_day), length_(period_days) {
  if (!(period_days > 0.0)) throw Error(ErrorCode::kInvalidArgument, "period length must be > 0");
  if (!(start_day >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "start day must be >= 0");
  for (double d : doses_.data()) {
    if (!(d >= 0.0) || !std::isfinite(d)) {
      throw Error(ErrorCode::kNegativeDoses, "scheduled doses must be finite and >= 0");
    }
  }
}

VaccinationSchedule VaccinationSchedule::from_plan(const plan::AllocationPlan& plan,
                                                   double start_day,
                                                   const travel::TravelModel* acceptance_travel,
                                                   double period_days) {
  const auto n = plan.n();
  Matrix<double> doses(plan.periods(), n, 0.0);
  if (acceptance_travel == nullptr) {
    for (std::size_t t = 0; t < plan.periods(); ++t) {
      for (std::size_t u = 0; u < n; ++u) doses(t, u) = static_cast<double>(plan.vaccinated(t, u));
    }
    return VaccinationSchedule(std::move(doses), start_day, period_days);
  }
  if (acceptance_travel->size() != n) {
    throw Error(ErrorCode::kInvalidArgument, "travel model size differs from plan");
  }
  const travel::AcceptanceModel acceptance(*acceptance_travel, plan.open_sites());
  for (std::size_t t = 0; t < plan.periods(); ++t) {
    for (std::size_t u = 0; u < n; ++u) {
      double effective = 0.0;
      for (std::size_t w = 0; w < n; ++w) {
        if (const auto y = plan.y(t, u, w); y != 0) {
          effective += static_cast<double>(y) * acceptance.likelihood(u, u, w);
        }
        if (!plan.has_commuters()) continue;
        for (std::size_t v = 0; v < n; ++v) {
          if (const auto z = plan.z(t, u, v, w); z != 0) {
            effective += static_cast<double>(z) * acceptance.likelihood(u, v, w);
          }
        }
      }
      doses(t, u) = effective;
    }
  }
  return VaccinationSchedule(std::move(doses), start_day, period_days);
}

double VaccinationSchedule::total_doses() const {
  const auto d = doses_.data();
  return std::accumulate(d.begin(), d.end(), 0.0);
}

std::optional<std::size_t> VaccinationSchedule::period_at(double time) const {
  if (empty() || time < start_) return std::nullopt;
  const auto k = static_cast<std::size_t>(std::floor((time - start_) / length_));
  if (k >= doses_.rows()) return std::nullopt;
  return k;
}

double VaccinationSchedule::rate(double time, std::size_t v) const {
  const auto k = period_at(time);
  return k ? doses_(*k, v) / length_ : 0.0;
}

double VaccinationSchedule::xi(double time, std::size_t v, double susceptible) const {
  return susceptible > 0.0 ? rate(time, v) / susceptible : 0.0;
}

VaccinationSchedule VaccinationSchedule::scaled(double factor) const {
  auto doses = doses_;
  for (auto& d : doses.data()) d *= factor;
  return VaccinationSchedule(std::move(doses), start_, length_);
}

EpiState derivative(const EpiState& state, const EpiParams& params) {
  return derivative_with(state, params, {});
}

Trajectory simulate(const EpiState& initial, const ParamTimeline& params,
                    const VaccinationSchedule& schedule, std::size_t days, double dt,
                    std::size_t start_day) {
  const auto n = initial.size();
  for (const auto* v : {&initial.V, &initial.E, &initial.I, &initial.U, &initial.H, &initial.R,
                        &initial.D}) {
    if (v->size() != n) throw Error(ErrorCode::kInvalidArgument, "state vectors differ in length");
  }
  if (!schedule.empty() && schedule.doses().cols() != n) {
    throw Error(ErrorCode::kInvalidArgument, "schedule size differs from state");
  }
  for (const auto& p : params.pieces) check_params(p, n);
  check_state(initial, static_cast<double>(start_day));
  const auto steps = steps_per_day(dt);

  Trajectory out;
  out.reserve(days + 1);
  out.push_back(initial);
  EpiState s = initial;
  // Doses delivered so far in the active period, per district.
  std::optional<std::size_t> period;
  std::vector<double> delivered(n, 0.0);
  std::vector<double> flow(n, 0.0);

  for (std::size_t day = 0; day < days; ++day) {
    const auto absolute = start_day + day;
    const EpiParams& p = params.at(absolute);
    for (std::size_t k = 0; k < steps; ++k) {
      const double time = static_cast<double>(absolute) + (static_cast<double>(k) + 0.5) * dt;
      const auto now = schedule.period_at(time);
      if (now != period) {
        period = now;
        std::fill(delivered.begin(), delivered.end(), 0.0);
      }
      for (std::size_t v = 0; v < n; ++v) {
        if (!now) {
          flow[v] = 0.0;
          continue;
        }
        const double left = std::max(0.0, schedule.doses()(*now, v) - delivered[v]);
        flow[v] = std::min({schedule.rate(time, v), left / dt, 0.5 * s.S[v] / dt});
        flow[v] = std::max(0.0, flow[v]);
        delivered[v] += flow[v] * dt;
      }
      const auto k1 = derivative_with(s, p, flow);
      const auto k2 = derivative_with(axpy(s, dt / 2, k1), p, flow);
      const auto k3 = derivative_with(axpy(s, dt / 2, k2), p, flow);
      const auto k4 = derivative_with(axpy(s, dt, k3), p, flow);
      s = axpy(s, dt / 6, k1);
      s = axpy(s, dt / 3, k2);
      s = axpy(s, dt / 3, k3);
      s = axpy(s, dt / 6, k4);
    }
    check_state(s, static_cast<double>(absolute + 1));
    out.push_back(s);
  }
  return out;
}

Trajectory simulate(const EpiState& initial, const EpiParams& params,
                    const VaccinationSchedule& schedule, std::size_t days, double dt) {
  return simulate(initial, ParamTimeline(params), schedule, days, dt, 0);
}

AvertedInfections infections_averted(const EvaluationSetup& setup,
                                     const VaccinationSchedule& schedule) {
  if (!schedule.empty() && schedule.end_day() > static_cast<double>(setup.days) + kDayTolerance) {
    throw Error(ErrorCode::kInvalidArgument,
                "vaccination window ends after the simulated horizon");
  }
  const auto base = simulate(setup.initial, setup.params, {}, setup.days, setup.dt);
  const auto with = simulate(setup.initial, setup.params, schedule, setup.days, setup.dt);
  AvertedInfections out;
  out.baseline = base.back().cumulative_cases();
  out.policy = with.back().cumulative_cases();
  out.averted = out.baseline - out.policy;
  return out;
}

AvertedInfections infections_averted(const EvaluationSetup& setup,
                                     const plan::AllocationPlan& plan,
                                     const travel::TravelModel* acceptance_travel) {
  return infections_averted(
      setup, VaccinationSchedule::from_plan(plan, static_cast<double>(setup.vaccination_start),
                                            acceptance_travel));
}

}  // namespace vaxsite::evaluate
