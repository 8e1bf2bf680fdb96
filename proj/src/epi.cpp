#include "vaxsite/epi.hpp"

#include <algorithm>
#include <cmath>

namespace vaxsite::epi {

namespace {

void check_params(const SirParams& params, std::size_t n) {
  if (params.beta.rows() != n || params.beta.cols() != n) {
    throw Error(ErrorCode::kInvalidArgument, "beta must be n x n");
  }
  if (!(params.gamma > 0.0)) throw Error(ErrorCode::kInvalidArgument, "gamma must be positive");
  for (double b : params.beta.data()) {
    if (!(b >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "beta must be non-negative");
  }
}

SirState axpy(const SirState& x, double a, const SirState& k) {
  SirState out = x;
  for (std::size_t v = 0; v < x.size(); ++v) {
    out.s[v] += a * k.s[v];
    out.i[v] += a * k.i[v];
    out.r[v] += a * k.r[v];
  }
  return out;
}

}  // namespace

SirState sir_derivative(const SirState& state, const SirParams& params) {
  const auto n = state.size();
  SirState d{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t v = 0; v < n; ++v) {
    double force = 0.0;
    for (std::size_t u = 0; u < n; ++u) force += params.beta(u, v) * state.i[u];
    const double incidence = force * state.s[v];
    const double clearance = params.gamma * state.i[v];
    d.s[v] = -incidence;
    d.i[v] = incidence - clearance;
    d.r[v] = clearance;
  }
  return d;
}

SirState sir_step(const SirState& state, const SirParams& params, double dt) {
  const auto n = state.size();
  if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "dt must be positive");
  if (state.i.size() != n || state.r.size() != n) {
    throw Error(ErrorCode::kInvalidArgument, "state vectors differ in length");
  }
  check_params(params, n);

  const auto k1 = sir_derivative(state, params);
  const auto k2 = sir_derivative(axpy(state, dt / 2, k1), params);
  const auto k3 = sir_derivative(axpy(state, dt / 2, k2), params);
  const auto k4 = sir_derivative(axpy(state, dt, k3), params);

  SirState next = state;
  for (std::size_t v = 0; v < n; ++v) {
    next.s[v] += dt / 6 * (k1.s[v] + 2 * k2.s[v] + 2 * k3.s[v] + k4.s[v]);
    next.i[v] += dt / 6 * (k1.i[v] + 2 * k2.i[v] + 2 * k3.i[v] + k4.i[v]);
    next.r[v] += dt / 6 * (k1.r[v] + 2 * k2.r[v] + 2 * k3.r[v] + k4.r[v]);
  }
  constexpr double kSlack = 1e-9;
  for (std::size_t v = 0; v < n; ++v) {
    for (double x : {next.s[v], next.i[v], next.r[v]}) {
      if (!(x >= -kSlack && x <= 1.0 + kSlack)) {
        throw Error(ErrorCode::kStateOutOfRange,
                    "SIR state left [0, 1] in district " + std::to_string(v) +
                        "; reduce dt");
      }
    }
  }
  return next;
}

std::vector<double> herd_immunity_targets(const SirParams& params) {
  const auto n = params.size();
  check_params(params, n);
  if (params.kappa.rows() != n || params.kappa.cols() != n) {
    throw Error(ErrorCode::kInvalidArgument, "kappa must be n x n");
  }
  std::vector<double> targets(n);
  for (std::size_t u = 0; u < n; ++u) {
    double force = 0.0;
    for (std::size_t v = 0; v < n; ++v) force += params.beta(v, u) * params.kappa(v, u);
    if (!(force > 0.0)) {
      throw Error(ErrorCode::kDegenerateForce,
                  "no force of infection reaches district " + std::to_string(u));
    }
    targets[u] = std::clamp((force - params.gamma) / force, 0.0, 1.0);
  }
  return targets;
}

Matrix<double> estimate_kappa(const std::vector<double>& prevalence) {
  const auto n = prevalence.size();
  for (std::size_t u = 0; u < n; ++u) {
    if (!(prevalence[u] > 0.0)) {
      throw Error(ErrorCode::kZeroPrevalence,
                  "prevalence must be positive (district " + std::to_string(u) + ")");
    }
  }
  Matrix<double> kappa(n, n);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      kappa(u, v) = u == v ? 1.0 : prevalence[u] / prevalence[v];
    }
  }
  return kappa;
}

bool is_consistent_kappa(const Matrix<double>& kappa, double tolerance) {
  const auto n = kappa.rows();
  if (kappa.cols() != n) return false;
  for (std::size_t u = 0; u < n; ++u) {
    if (std::fabs(kappa(u, u) - 1.0) > tolerance) return false;
    for (std::size_t v = 0; v < n; ++v) {
      if (!(kappa(u, v) > 0.0)) return false;
      if (std::fabs(kappa(u, v) * kappa(v, u) - 1.0) > tolerance) return false;
      for (std::size_t x = 0; x < n; ++x) {
        if (std::fabs(kappa(u, v) - kappa(u, x) * kappa(x, v)) > tolerance) return false;
      }
    }
  }
  return true;
}

PriorityScores priority_scores(const ingest::CommuterMatrix& commuters, std::size_t horizon,
                               double decay) {
  if (!(decay > 0.0 && decay <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "decay must lie in (0, 1]");
  }
  const auto n = commuters.e.rows();
  Count total = 0;
  for (std::size_t u = 0; u < n; ++u) total += commuters.outflow(u);
  if (total <= 0) throw Error(ErrorCode::kZeroFlow, "no commuter flow to derive scores from");

  PriorityScores scores;
  scores.decay = decay;
  scores.base.resize(n);
  for (std::size_t u = 0; u < n; ++u) {
    scores.base[u] = static_cast<double>(commuters.outflow(u)) / static_cast<double>(total);
  }
  scores.delta = Matrix<double>(horizon, n);
  for (std::size_t t = 0; t < horizon; ++t) {
    for (std::size_t u = 0; u < n; ++u) {
      scores.delta(t, u) = t == 0 ? scores.base[u] : scores.delta(t - 1, u) * decay;
    }
  }
  return scores;
}

}  // namespace vaxsite::epi
