#pragma once

// Exact small-scale solving of PlanModels, plus the MPS / solution-file bridge
// to external MILP solvers and model-level validation.

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vaxsite/plan.hpp"

namespace vaxsite::solve {

enum class Status { kOptimal, kFeasible, kInfeasible, kUnbounded, kExported };

std::string_view status_name(Status s);

struct SolveReport {
  Status status = Status::kInfeasible;
  std::optional<plan::AllocationPlan> plan;
  double objective = 0.0;
  double gap = 0.0;
  std::size_t nodes_or_subsets = 0;  // site subsets examined
  std::size_t subsets_pruned = 0;    // skipped by the travel-only bound
  std::size_t bb_nodes = 0;          // LP nodes over all subsets
  double wall_time = 0.0;            // seconds
};

struct Limits {
  std::size_t max_subsets = 100000;
  // Zero means no budget.
  std::chrono::duration<double> time_budget{0.0};
  // Branch-and-bound nodes per site subset.
  std::size_t max_nodes_per_subset = 200000;
};

// Enumerates every K-subset of sites (or only the pinned set) and solves the
// fixed-site allocation exactly. Ties go to the lexicographically smallest
// subset. Throws TooLarge when C(n, K) exceeds max_subsets, Infeasible when no
// subset admits a feasible allocation.
SolveReport solve_exhaustive(const plan::PlanModel& model, const Limits& limits = {});

// Optimal allocation with exactly `sites` available. nullopt when infeasible
// or when nothing better than `cutoff` exists.
struct SubsetResult {
  std::optional<plan::AllocationPlan> plan;
  double objective = 0.0;
  bool feasible = false;
  bool pruned = false;         // travel-only bound already >= cutoff
  double travel_bound = 0.0;   // travel-only optimum, a lower bound
  double open_bound = 0.0;     // best bound of unexplored nodes (+inf if none)
  std::size_t nodes = 0;
};

SubsetResult solve_subset(const plan::PlanModel& model, const std::vector<std::size_t>& sites,
                          double cutoff, const Limits& limits = {});

// --- validation -------------------------------------------------------------

// Every plan-level invariant of the model's instance (families 1a-1f, pinned
// sites). Empty iff the plan is feasible for the model.
std::vector<plan::Violation> validate(const plan::PlanModel& model,
                                      const plan::AllocationPlan& plan);

// Row-by-row check of a full variable assignment, including bounds.
std::vector<plan::Violation> validate_assignment(const plan::PlanModel& model,
                                                 std::span<const double> values,
                                                 double tolerance = 1e-6);

// --- MPS --------------------------------------------------------------------

void export_mps(const plan::PlanModel& model, std::ostream& out);
void export_mps(const plan::PlanModel& model, const std::filesystem::path& path);

struct MpsColumn {
  std::string name;
  bool integer = false;
  double lower = 0.0;
  double upper = plan::kInfinity;
  double cost = 0.0;
  std::vector<std::pair<std::size_t, double>> entries;  // (row index, coef)
};

struct MpsRow {
  std::string name;
  char type = 'L';  // 'L', 'G', 'E'
  double rhs = 0.0;
};

struct MpsModel {
  std::string name;
  bool minimize = true;
  std::string objective_name;
  std::vector<MpsRow> rows;
  std::vector<MpsColumn> columns;
};

// Parses free-format MPS (the subset written by export_mps plus RANGES-free
// standard files). Throws MalformedRow on syntax errors.
MpsModel read_mps(std::istream& in);
MpsModel read_mps(const std::filesystem::path& path);

// Structural differences between a model and a parsed MPS file; empty when
// names, kinds, bounds, coefficients, senses and right-hand sides agree.
std::vector<std::string> compare_structure(const plan::PlanModel& model, const MpsModel& mps);

// --- solution files -------------------------------------------------------

// Reads "name value" lines ('#' starts a comment). Unlisted variables are 0,
// except zeta/tau, which take their smallest feasible value for the plan.
// Throws UnknownVariable or NonIntegralValue.
std::vector<double> read_solution(const plan::PlanModel& model, std::istream& in);

// read_solution + plan assembly + full validation (throws InfeasiblePlan).
plan::AllocationPlan import_solution(const plan::PlanModel& model, std::istream& in);
plan::AllocationPlan import_solution(const plan::PlanModel& model,
                                     const std::filesystem::path& path);

// Writes the nonzero entries of the plan's assignment.
void write_solution(const plan::PlanModel& model, const plan::AllocationPlan& plan,
                    std::ostream& out);

}  // namespace vaxsite::solve
