#include "vaxsite/plan.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "vaxsite/mcf.hpp"

namespace vaxsite::plan {

std::string_view formulation_name(Formulation f) {
  switch (f) {
    case Formulation::kP0: return "P0";
    case Formulation::kP1: return "P1";
    case Formulation::kP2: return "P2";
    case Formulation::kP2Fixed: return "P2-fixed";
  }
  return "?";
}

Formulation parse_formulation(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "p0") return Formulation::kP0;
  if (lower == "p1") return Formulation::kP1;
  if (lower == "p2") return Formulation::kP2;
  if (lower == "p2-fixed" || lower == "p2_fixed" || lower == "p2fixed") {
    return Formulation::kP2Fixed;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown formulation '" + std::string(text) + "'");
}

std::string_view family_label(Family f) {
  switch (f) {
    case Family::k1a: return "1a";
    case Family::k1b: return "1b";
    case Family::k1c: return "1c";
    case Family::k1d: return "1d";
    case Family::k1e: return "1e";
    case Family::k1f: return "1f";
    case Family::k2g: return "2g";
    case Family::k2h: return "2h";
  }
  return "?";
}

Layout::Layout(std::size_t n, std::size_t periods, std::size_t equity_periods, bool has_z,
               bool has_health)
    : n_(n), periods_(periods), equity_(equity_periods), has_z_(has_z), has_health_(has_health) {
  y0_ = n_;
  z0_ = y0_ + y_count();
  zeta0_ = z0_ + z_count();
  tau0_ = zeta0_ + zeta_count();
}

namespace {

std::size_t index_width(const Layout& l) {
  std::size_t largest = std::max<std::size_t>({l.n(), l.periods(), 1}) - 1;
  std::size_t digits = 1;
  while (largest >= 10) {
    largest /= 10;
    ++digits;
  }
  return std::max<std::size_t>(digits, 2);
}

std::string padded(std::size_t value, std::size_t width) {
  auto s = std::to_string(value);
  if (s.size() < width) s.insert(0, width - s.size(), '0');
  return s;
}

std::string join_name(const char* prefix, std::initializer_list<std::size_t> idx,
                      std::size_t width) {
  std::string name = prefix;
  for (auto i : idx) {
    name += '_';
    name += padded(i, width);
  }
  return name;
}

}  // namespace

std::string x_name(const Layout& l, std::size_t u) { return join_name("X", {u}, index_width(l)); }
std::string y_name(const Layout& l, std::size_t t, std::size_t u, std::size_t w) {
  return join_name("Y", {t, u, w}, index_width(l));
}
std::string z_name(const Layout& l, std::size_t t, std::size_t u, std::size_t v, std::size_t w) {
  return join_name("Z", {t, u, v, w}, index_width(l));
}
std::string zeta_name(const Layout& l, std::size_t t, std::size_t u) {
  return join_name("ZETA", {t, u}, index_width(l));
}
std::string tau_name(const Layout& l, std::size_t t) {
  return join_name("TAU", {t}, index_width(l));
}

std::optional<std::size_t> PlanModel::find_variable(std::string_view name) const {
  const auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

double PlanModel::objective_value(std::span<const double> values) const {
  if (values.size() != variables_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "assignment size does not match the model");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) total += objective_[j] * values[j];
  return total;
}

std::size_t PlanModel::count_constraints(Family f) const {
  return static_cast<std::size_t>(std::count_if(
      constraints_.begin(), constraints_.end(), [f](const Constraint& c) { return c.family == f; }));
}

class ModelBuilder {
 public:
  ModelBuilder(Formulation formulation, std::shared_ptr<const Instance> instance)
      : inst_(*instance) {
    model_.formulation_ = formulation;
    model_.instance_ = std::move(instance);
    const bool has_health = formulation == Formulation::kP2 || formulation == Formulation::kP2Fixed;
    model_.layout_ = Layout(inst_.size(), inst_.periods(), inst_.equity_periods(),
                            inst_.include_commuters, has_health);
  }

  PlanModel build(const BuildOptions& options) {
    check_supply(options);
    add_variables();
    add_constraints();
    return std::move(model_);
  }

 private:
  const Layout& layout() const { return model_.layout_; }

  void warn_or_throw(const BuildOptions& options, ErrorCode code, const std::string& msg) {
    if (options.strict) throw Error(code, msg);
    model_.warnings_.push_back(std::string(error_code_name(code)) + ": " + msg);
  }

  void check_supply(const BuildOptions& options) {
    const auto n = inst_.size();
    if (inst_.supply.total() == 0) {
      warn_or_throw(options, ErrorCode::kZeroCapacity, "every site has zero supply");
    }
    std::vector<Count> per_site(n, 0);
    for (std::size_t t = 0; t < inst_.periods(); ++t) {
      for (std::size_t w = 0; w < n; ++w) per_site[w] += inst_.supply(t, w);
    }
    std::sort(per_site.begin(), per_site.end(), std::greater<>());
    const auto k = std::min(inst_.max_sites, n);
    const Count best = std::accumulate(per_site.begin(), per_site.begin() + k, Count{0});
    const Count demand = inst_.districts.total_population();
    if (best < demand) {
      warn_or_throw(options, ErrorCode::kInfeasibleByConstruction,
                    "the " + std::to_string(k) + " largest sites supply " + std::to_string(best) +
                        " doses for a population of " + std::to_string(demand));
    }
  }

  void add_var(std::string name, VarKind kind, double lower, double upper, double cost) {
    model_.by_name_.emplace(name, model_.variables_.size());
    model_.variables_.push_back({std::move(name), kind, lower, upper});
    model_.objective_.push_back(cost);
  }

  void add_variables() {
    const auto& l = layout();
    const auto n = l.n();
    const auto periods = l.periods();
    model_.variables_.reserve(l.total());
    model_.objective_.reserve(l.total());
    for (std::size_t u = 0; u < n; ++u) {
      double lo = 0.0, hi = 1.0;
      if (!inst_.fixed_open.empty()) lo = hi = inst_.fixed_open[u] ? 1.0 : 0.0;
      add_var(x_name(l, u), VarKind::kBinary, lo, hi, 0.0);
    }
    for (std::size_t t = 0; t < periods; ++t) {
      for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t w = 0; w < n; ++w) {
          add_var(y_name(l, t, u, w), VarKind::kInteger, 0.0, kInfinity,
                  inst_.travel.roundtrip(u, w));
        }
      }
    }
    if (l.has_z()) {
      for (std::size_t t = 0; t < periods; ++t) {
        for (std::size_t u = 0; u < n; ++u) {
          for (std::size_t v = 0; v < n; ++v) {
            for (std::size_t w = 0; w < n; ++w) {
              add_var(z_name(l, t, u, v, w), VarKind::kInteger, 0.0, kInfinity,
                      inst_.travel.d(u, v, w));
            }
          }
        }
      }
    }
    if (l.has_health()) {
      const auto& h = inst_.health;
      for (std::size_t t = 0; t < periods; ++t) {
        for (std::size_t u = 0; u < n; ++u) {
          add_var(zeta_name(l, t, u), VarKind::kContinuous, 0.0, kInfinity,
                  h.lambda * h.delta(t, u));
        }
      }
      for (std::size_t t = 0; t < l.equity_periods(); ++t) {
        add_var(tau_name(l, t), VarKind::kContinuous, 0.0, kInfinity, h.lambda_eq);
      }
    }
  }

  std::size_t width() const { return index_width(layout()); }

  void add_row(Family f, std::string name, std::vector<Term> terms, Sense sense, double rhs) {
    model_.constraints_.push_back({std::move(name), f, std::move(terms), sense, rhs});
  }

  // Terms for "residents of u vaccinated in period t", scaled by `sign`.
  void vaccinated_terms(std::vector<Term>& terms, std::size_t t, std::size_t u,
                        double sign) const {
    const auto& l = layout();
    for (std::size_t w = 0; w < l.n(); ++w) terms.push_back({l.y(t, u, w), sign});
    if (l.has_z()) {
      for (std::size_t v = 0; v < l.n(); ++v) {
        for (std::size_t w = 0; w < l.n(); ++w) terms.push_back({l.z(t, u, v, w), sign});
      }
    }
  }

  void add_constraints() {
    const auto& l = layout();
    const auto n = l.n();
    const auto periods = l.periods();
    const auto wd = width();
    const auto& e = inst_.commuters.e;

    {  // 1a
      std::vector<Term> terms;
      for (std::size_t u = 0; u < n; ++u) terms.push_back({l.x(u), 1.0});
      add_row(Family::k1a, "C1A", std::move(terms), Sense::kLessEqual,
              static_cast<double>(inst_.max_sites));
    }
    for (std::size_t u = 0; u < n; ++u) {  // 1b
      std::vector<Term> terms;
      for (std::size_t t = 0; t < periods; ++t) {
        for (std::size_t w = 0; w < n; ++w) terms.push_back({l.y(t, u, w), 1.0});
      }
      add_row(Family::k1b, join_name("C1B", {u}, wd), std::move(terms), Sense::kEqual,
              static_cast<double>(inst_.non_commuters(u)));
    }
    if (l.has_z()) {  // 1c
      for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = 0; v < n; ++v) {
          std::vector<Term> terms;
          for (std::size_t t = 0; t < periods; ++t) {
            for (std::size_t w = 0; w < n; ++w) terms.push_back({l.z(t, u, v, w), 1.0});
          }
          add_row(Family::k1c, join_name("C1C", {u, v}, wd), std::move(terms), Sense::kEqual,
                  static_cast<double>(e(u, v)));
        }
      }
    }
    for (std::size_t t = 0; t < periods; ++t) {  // 1d, big-M = site-period supply
      for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t w = 0; w < n; ++w) {
          const auto m = static_cast<double>(inst_.supply(t, w));
          add_row(Family::k1d, join_name("C1D", {t, u, w}, wd),
                  {{l.y(t, u, w), 1.0}, {l.x(w), -m}}, Sense::kLessEqual, 0.0);
        }
      }
    }
    if (l.has_z()) {  // 1e
      for (std::size_t t = 0; t < periods; ++t) {
        for (std::size_t u = 0; u < n; ++u) {
          for (std::size_t v = 0; v < n; ++v) {
            for (std::size_t w = 0; w < n; ++w) {
              const auto m = static_cast<double>(inst_.supply(t, w));
              add_row(Family::k1e, join_name("C1E", {t, u, v, w}, wd),
                      {{l.z(t, u, v, w), 1.0}, {l.x(w), -m}}, Sense::kLessEqual, 0.0);
            }
          }
        }
      }
    }
    for (std::size_t t = 0; t < periods; ++t) {  // 1f
      for (std::size_t w = 0; w < n; ++w) {
        std::vector<Term> terms;
        for (std::size_t u = 0; u < n; ++u) terms.push_back({l.y(t, u, w), 1.0});
        if (l.has_z()) {
          for (std::size_t u = 0; u < n; ++u) {
            for (std::size_t v = 0; v < n; ++v) terms.push_back({l.z(t, u, v, w), 1.0});
          }
        }
        add_row(Family::k1f, join_name("C1F", {t, w}, wd), std::move(terms), Sense::kLessEqual,
                static_cast<double>(inst_.supply(t, w)));
      }
    }
    if (!l.has_health()) return;

    const auto& h = inst_.health;
    for (std::size_t t = 0; t < periods; ++t) {  // 2g
      for (std::size_t u = 0; u < n; ++u) {
        std::vector<Term> terms{{l.zeta(t, u), 1.0}};
        for (std::size_t s = 0; s <= t; ++s) vaccinated_terms(terms, s, u, 1.0);
        add_row(Family::k2g, join_name("C2G", {t, u}, wd), std::move(terms),
                Sense::kGreaterEqual,
                static_cast<double>(inst_.districts.population(u)) * h.targets[u]);
      }
    }
    for (std::size_t t = 0; t < l.equity_periods(); ++t) {  // 2h, ordered distinct pairs
      for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t u2 = 0; u2 < n; ++u2) {
          if (u == u2) continue;
          std::vector<Term> terms{{l.tau(t), 1.0}};
          vaccinated_terms(terms, t, u, -1.0);
          vaccinated_terms(terms, t, u2, 1.0);
          add_row(Family::k2h, join_name("C2H", {t, u, u2}, wd), std::move(terms),
                  Sense::kGreaterEqual, 0.0);
        }
      }
    }
  }

  const Instance& inst_;
  PlanModel model_;
};

namespace {

void check_common(const ingest::DistrictTable& districts, const ingest::CommuterMatrix& commuters,
                  const travel::TravelModel& travel, const ingest::SupplySchedule& supply,
                  std::size_t max_sites) {
  const auto n = districts.size();
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "no districts");
  if (max_sites == 0 || max_sites > n) {
    throw Error(ErrorCode::kBadK, "site limit K=" + std::to_string(max_sites) +
                                      " must lie in 1.." + std::to_string(n));
  }
  if (commuters.e.rows() != n || commuters.e.cols() != n || travel.size() != n ||
      supply.doses.cols() != n) {
    throw Error(ErrorCode::kInvalidArgument, "input dimensions disagree with the district table");
  }
  if (supply.horizon() == 0) throw Error(ErrorCode::kInvalidArgument, "empty horizon");
}

std::shared_ptr<Instance> make_instance(const ingest::DistrictTable& districts,
                                        const ingest::CommuterMatrix& commuters,
                                        const travel::TravelModel& travel,
                                        const ingest::SupplySchedule& supply,
                                        std::size_t max_sites, bool include_commuters) {
  check_common(districts, commuters, travel, supply, max_sites);
  return std::make_shared<Instance>(Instance{
      districts, include_commuters ? commuters : ingest::no_commuters(districts), travel,
      supply, max_sites, include_commuters, {}, {}});
}

HealthWeights make_health(const Instance& inst, const std::vector<double>& targets,
                          const epi::PriorityScores& scores, double lambda, double lambda_eq) {
  const auto n = inst.size();
  if (!(lambda >= 0.0) || !(lambda_eq >= 0.0)) {
    throw Error(ErrorCode::kNegativeWeight, "lambda and lambda_eq must be non-negative");
  }
  if (targets.size() != n) throw Error(ErrorCode::kInvalidArgument, "one target per district");
  for (double t : targets) {
    if (!(t >= 0.0 && t <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "targets must lie in [0, 1]");
    }
  }
  if (scores.delta.cols() != n || scores.delta.rows() < inst.periods()) {
    throw Error(ErrorCode::kInvalidArgument, "priority scores must cover every period");
  }
  HealthWeights h{targets, Matrix<double>(inst.periods(), n), lambda, lambda_eq};
  for (std::size_t t = 0; t < inst.periods(); ++t) {
    for (std::size_t u = 0; u < n; ++u) h.delta(t, u) = scores.delta(t, u);
  }
  return h;
}

}  // namespace

PlanModel build_p1(const ingest::DistrictTable& districts,
                   const ingest::CommuterMatrix& commuters, const travel::TravelModel& travel,
                   const ingest::SupplySchedule& supply, std::size_t max_sites,
                   bool include_commuters, const BuildOptions& options) {
  auto inst = make_instance(districts, commuters, travel, supply, max_sites, include_commuters);
  return ModelBuilder(include_commuters ? Formulation::kP1 : Formulation::kP0, std::move(inst))
      .build(options);
}

PlanModel build_p2(const ingest::DistrictTable& districts,
                   const ingest::CommuterMatrix& commuters, const travel::TravelModel& travel,
                   const ingest::SupplySchedule& supply, std::size_t max_sites,
                   const std::vector<double>& targets, const epi::PriorityScores& scores,
                   double lambda, double lambda_eq, const BuildOptions& options) {
  auto inst = make_instance(districts, commuters, travel, supply, max_sites, true);
  inst->health = make_health(*inst, targets, scores, lambda, lambda_eq);
  return ModelBuilder(Formulation::kP2, std::move(inst)).build(options);
}

PlanModel build_p2_fixed(const ingest::DistrictTable& districts,
                         const ingest::CommuterMatrix& commuters,
                         const travel::TravelModel& travel, const ingest::SupplySchedule& supply,
                         std::size_t max_sites, const std::vector<double>& targets,
                         const epi::PriorityScores& scores, double lambda, double lambda_eq,
                         const std::vector<std::size_t>& fixed_sites,
                         const BuildOptions& options) {
  auto inst = make_instance(districts, commuters, travel, supply, max_sites, true);
  inst->health = make_health(*inst, targets, scores, lambda, lambda_eq);
  inst->fixed_open.assign(inst->size(), false);
  for (auto w : fixed_sites) {
    if (w >= inst->size()) throw Error(ErrorCode::kInvalidArgument, "fixed site out of range");
    inst->fixed_open[w] = true;
  }
  const auto pinned = std::count(inst->fixed_open.begin(), inst->fixed_open.end(), true);
  if (static_cast<std::size_t>(pinned) > max_sites) {
    throw Error(ErrorCode::kTooManySites, std::to_string(pinned) + " fixed sites exceed K=" +
                                              std::to_string(max_sites));
  }
  return ModelBuilder(Formulation::kP2Fixed, std::move(inst)).build(options);
}

// --- AllocationPlan --------------------------------------------------------

AllocationPlan::AllocationPlan(std::size_t n, std::size_t periods, bool with_commuters)
    : n_(n),
      periods_(periods),
      with_z_(with_commuters),
      open_(n, false),
      y_(periods * n * n, 0),
      z_(with_commuters ? periods * n * n * n : 0, 0) {}

std::vector<std::size_t> AllocationPlan::open_sites() const {
  std::vector<std::size_t> out;
  for (std::size_t w = 0; w < n_; ++w) {
    if (open_[w]) out.push_back(w);
  }
  return out;
}

Count AllocationPlan::vaccinated(std::size_t t, std::size_t u) const {
  Count total = 0;
  for (std::size_t w = 0; w < n_; ++w) total += y(t, u, w);
  if (with_z_) {
    for (std::size_t v = 0; v < n_; ++v) {
      for (std::size_t w = 0; w < n_; ++w) total += z(t, u, v, w);
    }
  }
  return total;
}

Count AllocationPlan::site_load(std::size_t t, std::size_t w) const {
  Count total = 0;
  for (std::size_t u = 0; u < n_; ++u) {
    total += y(t, u, w);
    if (with_z_) {
      for (std::size_t v = 0; v < n_; ++v) total += z(t, u, v, w);
    }
  }
  return total;
}

std::string Violation::describe() const {
  std::ostringstream os;
  os << "constraint " << family_label(family) << " at " << where << " violated by " << amount;
  return os.str();
}

std::string describe(const std::vector<Violation>& violations, std::size_t limit) {
  std::string out;
  for (std::size_t i = 0; i < violations.size() && i < limit; ++i) {
    if (!out.empty()) out += "; ";
    out += violations[i].describe();
  }
  if (violations.size() > limit) {
    out += "; ... (" + std::to_string(violations.size() - limit) + " more)";
  }
  return out;
}

std::vector<Violation> check_plan(const Instance& inst, const AllocationPlan& plan) {
  std::vector<Violation> out;
  const auto n = inst.size();
  const auto periods = inst.periods();
  const auto& ids = inst.districts;
  if (plan.n() != n || plan.periods() != periods) {
    out.push_back({Family::k1a, "dimensions", 1.0});
    return out;
  }
  const auto open_count = std::count(plan.open().begin(), plan.open().end(), true);
  if (static_cast<std::size_t>(open_count) > inst.max_sites) {
    out.push_back({Family::k1a, "sites",
                   static_cast<double>(open_count) - static_cast<double>(inst.max_sites)});
  }
  if (!inst.fixed_open.empty()) {
    for (std::size_t w = 0; w < n; ++w) {
      if (plan.open()[w] != inst.fixed_open[w]) {
        out.push_back({Family::k1a, "pinned x at w=" + ids.id(w), 1.0});
      }
    }
  }
  for (std::size_t u = 0; u < n; ++u) {
    Count total = 0;
    for (std::size_t t = 0; t < periods; ++t) {
      for (std::size_t w = 0; w < n; ++w) {
        const auto y = plan.y(t, u, w);
        if (y < 0) {
          out.push_back({Family::k1b, "negative y t=" + std::to_string(t) + ",u=" + ids.id(u) +
                                          ",w=" + ids.id(w),
                         static_cast<double>(-y)});
        }
        if (y != 0 && !plan.open()[w]) {
          out.push_back({Family::k1d, "t=" + std::to_string(t) + ",u=" + ids.id(u) +
                                          ",w=" + ids.id(w),
                         static_cast<double>(std::abs(y))});
        }
        total += y;
      }
    }
    if (total != inst.non_commuters(u)) {
      out.push_back({Family::k1b, "u=" + ids.id(u),
                     static_cast<double>(std::abs(total - inst.non_commuters(u)))});
    }
  }
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      Count total = 0;
      for (std::size_t t = 0; t < periods; ++t) {
        for (std::size_t w = 0; w < n; ++w) {
          const auto z = plan.z(t, u, v, w);
          if (z < 0) {
            out.push_back({Family::k1c, "negative z t=" + std::to_string(t) + ",u=" + ids.id(u) +
                                            ",v=" + ids.id(v) + ",w=" + ids.id(w),
                           static_cast<double>(-z)});
          }
          if (z != 0 && !plan.open()[w]) {
            out.push_back({Family::k1e, "t=" + std::to_string(t) + ",u=" + ids.id(u) +
                                            ",v=" + ids.id(v) + ",w=" + ids.id(w),
                           static_cast<double>(std::abs(z))});
          }
          total += z;
        }
      }
      const auto want = inst.commuters.e(u, v);
      if (total != want) {
        out.push_back({Family::k1c, "u=" + ids.id(u) + ",v=" + ids.id(v),
                       static_cast<double>(std::abs(total - want))});
      }
    }
  }
  for (std::size_t t = 0; t < periods; ++t) {
    for (std::size_t w = 0; w < n; ++w) {
      const auto load = plan.site_load(t, w);
      if (load > inst.supply(t, w)) {
        out.push_back({Family::k1f, "t=" + std::to_string(t) + ",w=" + ids.id(w),
                       static_cast<double>(load - inst.supply(t, w))});
      }
    }
  }
  return out;
}

Metrics evaluate_plan(const Instance& inst, const AllocationPlan& plan,
                      const HealthWeights& health, Formulation formulation) {
  const auto violations = check_plan(inst, plan);
  if (!violations.empty()) {
    throw Error(ErrorCode::kInfeasiblePlan, describe(violations));
  }
  const auto n = inst.size();
  const auto periods = inst.periods();
  Metrics m;
  m.formulation = formulation;
  for (std::size_t t = 0; t < periods; ++t) {
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t w = 0; w < n; ++w) {
        m.travel_minutes += static_cast<double>(plan.y(t, u, w)) * inst.travel.roundtrip(u, w);
        if (plan.has_commuters()) {
          for (std::size_t v = 0; v < n; ++v) {
            m.travel_minutes += static_cast<double>(plan.z(t, u, v, w)) * inst.travel.d(u, v, w);
          }
        }
      }
    }
  }
  m.vaccinated = Matrix<Count>(periods, n);
  for (std::size_t t = 0; t < periods; ++t) {
    for (std::size_t u = 0; u < n; ++u) m.vaccinated(t, u) = plan.vaccinated(t, u);
  }
  m.shortfall = Matrix<double>(periods, n, 0.0);
  if (health.has_targets()) {
    for (std::size_t u = 0; u < n; ++u) {
      const double target = static_cast<double>(inst.districts.population(u)) * health.targets[u];
      Count cumulative = 0;
      for (std::size_t t = 0; t < periods; ++t) {
        cumulative += m.vaccinated(t, u);
        m.shortfall(t, u) = std::max(0.0, target - static_cast<double>(cumulative));
        if (t < health.delta.rows()) m.health_term += health.delta(t, u) * m.shortfall(t, u);
      }
    }
  }
  for (std::size_t t = 0; t < inst.equity_periods(); ++t) {
    const auto row = m.vaccinated.row(t);
    const auto [lo, hi] = std::minmax_element(row.begin(), row.end());
    const double spread = n > 0 ? static_cast<double>(*hi - *lo) : 0.0;
    m.period_inequity.push_back(spread);
    m.inequity += spread;
  }
  m.composite = m.travel_minutes + health.lambda * m.health_term + health.lambda_eq * m.inequity;
  return m;
}

Metrics evaluate_plan(const PlanModel& model, const AllocationPlan& plan) {
  return evaluate_plan(model.instance(), plan, model.instance().health, model.formulation());
}

std::vector<double> to_assignment(const PlanModel& model, const AllocationPlan& plan) {
  const auto& l = model.layout();
  const auto& inst = model.instance();
  const auto n = l.n();
  if (plan.n() != n || plan.periods() != l.periods()) {
    throw Error(ErrorCode::kInvalidArgument, "plan dimensions do not match the model");
  }
  std::vector<double> values(l.total(), 0.0);
  for (std::size_t u = 0; u < n; ++u) values[l.x(u)] = plan.open()[u] ? 1.0 : 0.0;
  for (std::size_t t = 0; t < l.periods(); ++t) {
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t w = 0; w < n; ++w) {
        values[l.y(t, u, w)] = static_cast<double>(plan.y(t, u, w));
        if (l.has_z()) {
          for (std::size_t v = 0; v < n; ++v) {
            values[l.z(t, u, v, w)] = static_cast<double>(plan.z(t, u, v, w));
          }
        }
      }
    }
  }
  if (!l.has_health()) return values;
  const auto& h = inst.health;
  for (std::size_t u = 0; u < n; ++u) {
    const double target = static_cast<double>(inst.districts.population(u)) * h.targets[u];
    Count cumulative = 0;
    for (std::size_t t = 0; t < l.periods(); ++t) {
      cumulative += plan.vaccinated(t, u);
      values[l.zeta(t, u)] = std::max(0.0, target - static_cast<double>(cumulative));
    }
  }
  for (std::size_t t = 0; t < l.equity_periods(); ++t) {
    Count lo = 0, hi = 0;
    for (std::size_t u = 0; u < n; ++u) {
      const auto v = plan.vaccinated(t, u);
      if (u == 0 || v < lo) lo = v;
      if (u == 0 || v > hi) hi = v;
    }
    values[l.tau(t)] = static_cast<double>(hi - lo);
  }
  return values;
}

AllocationPlan from_assignment(const PlanModel& model, std::span<const double> values) {
  const auto& l = model.layout();
  if (values.size() != l.total()) {
    throw Error(ErrorCode::kInvalidArgument, "assignment size does not match the model");
  }
  const auto n = l.n();
  const auto as_count = [](double v) { return static_cast<Count>(std::llround(v)); };
  AllocationPlan plan(n, l.periods(), l.has_z());
  for (std::size_t u = 0; u < n; ++u) plan.open()[u] = as_count(values[l.x(u)]) != 0;
  for (std::size_t t = 0; t < l.periods(); ++t) {
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t w = 0; w < n; ++w) {
        plan.y(t, u, w) = as_count(values[l.y(t, u, w)]);
        if (l.has_z()) {
          for (std::size_t v = 0; v < n; ++v) plan.z(t, u, v, w) = as_count(values[l.z(t, u, v, w)]);
        }
      }
    }
  }
  return plan;
}

AllocationPlan lift_to_commuters(const AllocationPlan& p0, const Instance& inst) {
  const auto n = inst.size();
  const auto periods = inst.periods();
  if (p0.n() != n || p0.periods() != periods) {
    throw Error(ErrorCode::kInvalidArgument, "plan dimensions do not match the instance");
  }
  AllocationPlan out(n, periods, true);
  out.open() = p0.open();
  for (std::size_t u = 0; u < n; ++u) {
    // groups: 0 = non-commuters, 1 + v = commuters to v; slots: (t, w)
    const std::size_t groups = n + 1;
    const std::size_t slots = periods * n;
    const std::size_t source = 0, sink = 1 + groups + slots;
    flow::MinCostFlow mcf(sink + 1);
    Count demand = 0;
    std::vector<std::vector<std::size_t>> arcs(groups, std::vector<std::size_t>(slots));
    for (std::size_t g = 0; g < groups; ++g) {
      const Count size = g == 0 ? inst.non_commuters(u) : inst.commuters.e(u, g - 1);
      demand += size;
      mcf.add_arc(source, 1 + g, size, 0.0);
      for (std::size_t t = 0; t < periods; ++t) {
        for (std::size_t w = 0; w < n; ++w) {
          const double cost = g == 0 ? inst.travel.roundtrip(u, w) : inst.travel.d(u, g - 1, w);
          arcs[g][t * n + w] = mcf.add_arc(1 + g, 1 + groups + t * n + w, size, cost);
        }
      }
    }
    Count slots_total = 0;
    for (std::size_t t = 0; t < periods; ++t) {
      for (std::size_t w = 0; w < n; ++w) {
        mcf.add_arc(1 + groups + t * n + w, sink, p0.y(t, u, w), 0.0);
        slots_total += p0.y(t, u, w);
      }
    }
    if (slots_total != demand) {
      throw Error(ErrorCode::kInfeasiblePlan,
                  "district " + inst.districts.id(u) + " has " + std::to_string(slots_total) +
                      " assigned slots for " + std::to_string(demand) + " residents");
    }
    const auto result = mcf.solve(source, sink);
    if (result.flow != demand) {
      throw Error(ErrorCode::kInvariantBreach, "lifting did not place every resident");
    }
    for (std::size_t t = 0; t < periods; ++t) {
      for (std::size_t w = 0; w < n; ++w) {
        out.y(t, u, w) = mcf.flow(arcs[0][t * n + w]);
        for (std::size_t v = 0; v < n; ++v) out.z(t, u, v, w) = mcf.flow(arcs[1 + v][t * n + w]);
      }
    }
  }
  return out;
}

}  // namespace vaxsite::plan
