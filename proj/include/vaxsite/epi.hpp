#pragma once

// Simplified multi-district SIR dynamics used to set vaccination targets:
// herd-immunity thresholds under a constant prevalence-ratio assumption and
// the commuter-flow prioritization scores.

#include <vector>

#include "vaxsite/common.hpp"
#include "vaxsite/ingest.hpp"

namespace vaxsite::epi {

struct SirParams {
  Matrix<double> beta;   // beta(u, v): from u's infectious onto v's susceptibles
  double gamma = 0.0;    // clearance rate
  Matrix<double> kappa;  // kappa(u, v) = i_u / i_v

  std::size_t size() const noexcept { return beta.rows(); }
};

struct SirState {
  std::vector<double> s, i, r;

  std::size_t size() const noexcept { return s.size(); }
};

struct PriorityScores {
  Matrix<double> delta;  // periods x districts
  std::vector<double> base;
  double decay = 1.0;
};

inline constexpr double kDefaultDecay = 0.9;

// Time derivative of the SIR system at `state`.
SirState sir_derivative(const SirState& state, const SirParams& params);

// One classical RK4 step. Throws StateOutOfRange if any proportion leaves
// [-1e-9, 1 + 1e-9].
SirState sir_step(const SirState& state, const SirParams& params, double dt);

// Per-district vaccination fraction at which prevalence stops growing,
// clamped to [0, 1]. Throws DegenerateForce when a district receives no
// force of infection at all.
std::vector<double> herd_immunity_targets(const SirParams& params);

// kappa(u, v) = prevalence[u] / prevalence[v]. Throws ZeroPrevalence.
Matrix<double> estimate_kappa(const std::vector<double>& prevalence);

// Checks the ratio-matrix identities (unit diagonal, reciprocity,
// transitivity) within `tolerance`.
bool is_consistent_kappa(const Matrix<double>& kappa, double tolerance = 1e-9);

// Outflow share of every district, decayed geometrically by period:
// delta(t, u) = base[u] * decay^t with t = 0 the first period.
PriorityScores priority_scores(const ingest::CommuterMatrix& commuters, std::size_t horizon,
                               double decay = kDefaultDecay);

}  // namespace vaxsite::epi
