#pragma once

// Mega-site location / allocation MILPs.
//
//   P1        minimize travel inconvenience of non-commuters (round trips) and
//             commuters (best detour around the commute), at most K sites,
//             everyone vaccinated within the horizon, per-site period supply.
//   P0        P1 with every resident treated as a non-commuter.
//   P2        P1 plus lambda * prioritized shortfall below the herd-immunity
//             target and lambda_eq * per-period spread of vaccinations across
//             districts over the equity horizon.
//   P2-fixed  P2 with the site-open variables pinned by bounds.
//
// A PlanModel is an explicit, immutable list of variables, linear constraints
// and a linear objective, together with the instance data it was built from.

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vaxsite/common.hpp"
#include "vaxsite/epi.hpp"
#include "vaxsite/ingest.hpp"
#include "vaxsite/travel.hpp"

namespace vaxsite::plan {

enum class Formulation { kP0, kP1, kP2, kP2Fixed };

std::string_view formulation_name(Formulation f);
// Accepts p0, p1, p2, p2-fixed (any case). Throws InvalidArgument.
Formulation parse_formulation(std::string_view text);

enum class VarKind { kBinary, kInteger, kContinuous };

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Variable {
  std::string name;
  VarKind kind = VarKind::kContinuous;
  double lower = 0.0;
  double upper = kInfinity;
};

enum class Sense { kLessEqual, kEqual, kGreaterEqual };

// Constraint families, labelled as in the formulation: 1a site limit,
// 1b/1c everyone vaccinated, 1d/1e open-site linking, 1f supply,
// 2g target shortfall, 2h per-period spread.
enum class Family { k1a, k1b, k1c, k1d, k1e, k1f, k2g, k2h };

std::string_view family_label(Family f);

struct Term {
  std::size_t var = 0;
  double coef = 0.0;
};

struct Constraint {
  std::string name;
  Family family = Family::k1a;
  std::vector<Term> terms;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
};

// Health/equity inputs of P2. Empty targets means "not available".
struct HealthWeights {
  std::vector<double> targets;  // herd-immunity fraction per district
  Matrix<double> delta;         // periods x districts prioritization
  double lambda = 0.0;
  double lambda_eq = 0.0;

  bool has_targets() const noexcept { return !targets.empty(); }
};

inline constexpr double kDefaultLambda = 10.0;
inline constexpr double kDefaultLambdaEq = 150.0;
inline constexpr std::size_t kDefaultMaxSites = 6;

// Everything a formulation was built from. Commuters are all zero when the
// model treats everyone as a non-commuter (P0).
struct Instance {
  ingest::DistrictTable districts;
  ingest::CommuterMatrix commuters;
  travel::TravelModel travel;
  ingest::SupplySchedule supply;
  std::size_t max_sites = 0;
  bool include_commuters = true;
  HealthWeights health;
  std::vector<bool> fixed_open;  // empty unless sites are pinned

  std::size_t size() const noexcept { return districts.size(); }
  std::size_t periods() const noexcept { return supply.horizon(); }
  std::size_t equity_periods() const noexcept { return supply.equity_horizon; }
  Count non_commuters(std::size_t u) const { return commuters.non_commuters(districts, u); }
};

// Index arithmetic for the variable ordering x, y(t,u,w), z(t,u,v,w),
// zeta(t,u), tau(t in equity horizon).
class Layout {
 public:
  Layout() = default;
  Layout(std::size_t n, std::size_t periods, std::size_t equity_periods, bool has_z,
         bool has_health);

  std::size_t n() const noexcept { return n_; }
  std::size_t periods() const noexcept { return periods_; }
  std::size_t equity_periods() const noexcept { return equity_; }
  bool has_z() const noexcept { return has_z_; }
  bool has_health() const noexcept { return has_health_; }

  std::size_t x(std::size_t u) const { return u; }
  std::size_t y(std::size_t t, std::size_t u, std::size_t w) const {
    return y0_ + (t * n_ + u) * n_ + w;
  }
  std::size_t z(std::size_t t, std::size_t u, std::size_t v, std::size_t w) const {
    return z0_ + ((t * n_ + u) * n_ + v) * n_ + w;
  }
  std::size_t zeta(std::size_t t, std::size_t u) const { return zeta0_ + t * n_ + u; }
  std::size_t tau(std::size_t t) const { return tau0_ + t; }

  std::size_t x_count() const noexcept { return n_; }
  std::size_t y_count() const noexcept { return periods_ * n_ * n_; }
  std::size_t z_count() const noexcept { return has_z_ ? periods_ * n_ * n_ * n_ : 0; }
  std::size_t zeta_count() const noexcept { return has_health_ ? periods_ * n_ : 0; }
  std::size_t tau_count() const noexcept { return has_health_ ? equity_ : 0; }
  std::size_t total() const noexcept { return tau0_ + tau_count(); }

 private:
  std::size_t n_ = 0, periods_ = 0, equity_ = 0;
  bool has_z_ = false, has_health_ = false;
  std::size_t y0_ = 0, z0_ = 0, zeta0_ = 0, tau0_ = 0;
};

class PlanModel {
 public:
  Formulation formulation() const noexcept { return formulation_; }
  const Instance& instance() const noexcept { return *instance_; }
  std::shared_ptr<const Instance> shared_instance() const noexcept { return instance_; }
  const Layout& layout() const noexcept { return layout_; }

  const std::vector<Variable>& variables() const noexcept { return variables_; }
  const std::vector<Constraint>& constraints() const noexcept { return constraints_; }
  // Dense objective coefficients, one per variable (minimize).
  const std::vector<double>& objective() const noexcept { return objective_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  std::optional<std::size_t> find_variable(std::string_view name) const;
  double objective_value(std::span<const double> values) const;
  std::size_t count_constraints(Family f) const;

 private:
  friend class ModelBuilder;

  Formulation formulation_ = Formulation::kP1;
  std::shared_ptr<const Instance> instance_;
  Layout layout_;
  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  std::vector<double> objective_;
  std::vector<std::string> warnings_;
  std::unordered_map<std::string, std::size_t> by_name_;
};

struct BuildOptions {
  // Raise ZeroCapacity / InfeasibleByConstruction instead of recording a
  // warning on the model.
  bool strict = false;
};

PlanModel build_p1(const ingest::DistrictTable& districts,
                   const ingest::CommuterMatrix& commuters, const travel::TravelModel& travel,
                   const ingest::SupplySchedule& supply, std::size_t max_sites,
                   bool include_commuters, const BuildOptions& options = {});

PlanModel build_p2(const ingest::DistrictTable& districts,
                   const ingest::CommuterMatrix& commuters, const travel::TravelModel& travel,
                   const ingest::SupplySchedule& supply, std::size_t max_sites,
                   const std::vector<double>& targets, const epi::PriorityScores& scores,
                   double lambda, double lambda_eq, const BuildOptions& options = {});

PlanModel build_p2_fixed(const ingest::DistrictTable& districts,
                         const ingest::CommuterMatrix& commuters,
                         const travel::TravelModel& travel,
                         const ingest::SupplySchedule& supply, std::size_t max_sites,
                         const std::vector<double>& targets, const epi::PriorityScores& scores,
                         double lambda, double lambda_eq,
                         const std::vector<std::size_t>& fixed_sites,
                         const BuildOptions& options = {});

// Variable name helpers (the MPS/solution-file naming scheme).
std::string x_name(const Layout& l, std::size_t u);
std::string y_name(const Layout& l, std::size_t t, std::size_t u, std::size_t w);
std::string z_name(const Layout& l, std::size_t t, std::size_t u, std::size_t v, std::size_t w);
std::string zeta_name(const Layout& l, std::size_t t, std::size_t u);
std::string tau_name(const Layout& l, std::size_t t);

// A candidate location/allocation. z is empty when commuters are excluded.
class AllocationPlan {
 public:
  AllocationPlan() = default;
  AllocationPlan(std::size_t n, std::size_t periods, bool with_commuters);

  std::size_t n() const noexcept { return n_; }
  std::size_t periods() const noexcept { return periods_; }
  bool has_commuters() const noexcept { return with_z_; }

  std::vector<bool>& open() noexcept { return open_; }
  const std::vector<bool>& open() const noexcept { return open_; }
  std::vector<std::size_t> open_sites() const;

  Count& y(std::size_t t, std::size_t u, std::size_t w) { return y_[(t * n_ + u) * n_ + w]; }
  Count y(std::size_t t, std::size_t u, std::size_t w) const {
    return y_[(t * n_ + u) * n_ + w];
  }
  Count& z(std::size_t t, std::size_t u, std::size_t v, std::size_t w) {
    return z_[((t * n_ + u) * n_ + v) * n_ + w];
  }
  Count z(std::size_t t, std::size_t u, std::size_t v, std::size_t w) const {
    return with_z_ ? z_[((t * n_ + u) * n_ + v) * n_ + w] : 0;
  }

  // Residents of u vaccinated in period t (all sites, commuters included).
  Count vaccinated(std::size_t t, std::size_t u) const;
  // Persons vaccinated at site w in period t.
  Count site_load(std::size_t t, std::size_t w) const;

  bool operator==(const AllocationPlan&) const = default;

 private:
  std::size_t n_ = 0, periods_ = 0;
  bool with_z_ = false;
  std::vector<bool> open_;
  std::vector<Count> y_, z_;
};

struct Violation {
  Family family = Family::k1a;
  std::string where;  // indices, e.g. "u=A" or "t=0,w=B"
  double amount = 0.0;  // how far the constraint is violated (> 0)

  std::string describe() const;
};

std::string describe(const std::vector<Violation>& violations, std::size_t limit = 10);

// Direct check of the plan invariants (site limit, allocations only at open
// sites, everyone vaccinated exactly once, supply, pinned sites).
std::vector<Violation> check_plan(const Instance& instance, const AllocationPlan& plan);

struct Metrics {
  Formulation formulation = Formulation::kP1;
  double travel_minutes = 0.0;
  double health_term = 0.0;  // sum_t sum_u delta * shortfall (unweighted)
  double inequity = 0.0;     // sum over equity periods of max - min vaccinated
  double composite = 0.0;    // travel + lambda * health + lambda_eq * inequity
  Matrix<double> shortfall;  // periods x districts
  Matrix<Count> vaccinated;  // periods x districts
  std::vector<double> period_inequity;
};

// Throws InfeasiblePlan listing violations.
Metrics evaluate_plan(const Instance& instance, const AllocationPlan& plan,
                      const HealthWeights& health, Formulation formulation);
Metrics evaluate_plan(const PlanModel& model, const AllocationPlan& plan);

// Full variable assignment for `plan`, with zeta and tau at their smallest
// feasible values.
std::vector<double> to_assignment(const PlanModel& model, const AllocationPlan& plan);
// Reads x/y/z back out of an assignment; values must already be integral.
AllocationPlan from_assignment(const PlanModel& model, std::span<const double> values);

// Re-expresses a plan that treated everyone as a non-commuter in the
// commuter-aware space: each district keeps its per-(period, site) counts and
// its commuter groups are spread over those slots at least travel cost.
AllocationPlan lift_to_commuters(const AllocationPlan& noncommuter_plan,
                                 const Instance& commuter_instance);

}  // namespace vaxsite::plan
