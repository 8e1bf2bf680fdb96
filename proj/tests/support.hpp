#pragma once

// Shared fixtures for the test binaries: hand-rolled random instance
// generator and the independent enumeration oracle for the location MILPs.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "vaxsite/plan.hpp"

namespace vaxsite::testing {

// Raw instance data, independent of the library's domain types.
struct RawInstance {
  std::size_t n = 0, periods = 0, equity_periods = 0, max_sites = 1;
  std::vector<Count> population;
  Matrix<Count> commuters;       // n x n
  Matrix<double> minutes;        // n x n one-way
  Matrix<Count> supply;          // periods x n
  bool include_commuters = true;
  bool health = false;
  std::vector<double> targets;   // per district
  Matrix<double> delta;          // periods x n
  double lambda = 0.0, lambda_eq = 0.0;
  std::vector<std::size_t> fixed_sites;  // used when `pinned`
  bool pinned = false;
};

struct GeneratorOptions {
  std::size_t max_n = 4;
  std::size_t max_periods = 2;
  Count max_population = 6;
  Count max_supply = 9;
  int max_minutes = 20;
};

RawInstance random_instance(std::mt19937_64& rng, const GeneratorOptions& options = {});

// Library model for a raw instance (P0 / P1 / P2 / P2-fixed by flags).
plan::PlanModel build_model(const RawInstance& raw);

// Optimal composite objective by enumerating every integer allocation, with
// identical partial states merged. nullopt when infeasible.
std::optional<double> oracle_optimum(const RawInstance& raw);

// Person-by-person enumeration, for tiny instances only.
std::optional<double> naive_optimum(const RawInstance& raw);

// Districts named D0, D1, ... with the given populations.
ingest::DistrictTable make_districts(const std::vector<Count>& population);

bool close_relative(double a, double b, double rel = 1e-9);

}  // namespace vaxsite::testing
