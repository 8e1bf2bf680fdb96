#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

namespace vaxsite::testing {

namespace {

std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

}  // namespace

RawInstance random_instance(std::mt19937_64& rng, const GeneratorOptions& options) {
  RawInstance r;
  r.n = uniform(rng, 1, options.max_n);
  r.periods = uniform(rng, 1, options.max_periods);
  r.equity_periods = uniform(rng, 0, r.periods);
  r.max_sites = uniform(rng, 1, r.n);
  r.population.resize(r.n);
  for (auto& p : r.population) p = static_cast<Count>(uniform(rng, 0, options.max_population));

  r.commuters = Matrix<Count>(r.n, r.n, 0);
  for (std::size_t u = 0; u < r.n; ++u) {
    Count left = r.population[u];
    for (std::size_t v = 0; v < r.n; ++v) {
      if (v == u || left == 0 || uniform(rng, 0, 1) == 0) continue;
      const auto e = static_cast<Count>(uniform(rng, 0, static_cast<std::size_t>(left)));
      r.commuters(u, v) = e;
      left -= e;
    }
  }
  r.minutes = Matrix<double>(r.n, r.n, 0.0);
  for (std::size_t u = 0; u < r.n; ++u) {
    for (std::size_t v = 0; v < r.n; ++v) {
      if (u != v) r.minutes(u, v) = static_cast<double>(uniform(rng, 0, options.max_minutes));
    }
  }
  r.supply = Matrix<Count>(r.periods, r.n, 0);
  for (auto& s : r.supply.data()) s = static_cast<Count>(uniform(rng, 0, options.max_supply));

  const auto kind = uniform(rng, 0, 3);  // P0, P1, P2, P2-fixed
  r.include_commuters = kind != 0;
  r.health = kind >= 2;
  if (r.health) {
    r.lambda = uniform(rng, 0, 1) ? 10.0 : 0.0;
    r.lambda_eq = uniform(rng, 0, 1) ? 150.0 : 0.0;
    r.targets.resize(r.n);
    for (auto& t : r.targets) t = static_cast<double>(uniform(rng, 0, 20)) / 20.0;
    r.delta = Matrix<double>(r.periods, r.n);
    for (std::size_t u = 0; u < r.n; ++u) {
      const double base = static_cast<double>(uniform(rng, 0, 10)) / 10.0;
      for (std::size_t t = 0; t < r.periods; ++t) {
        r.delta(t, u) = t == 0 ? base : r.delta(t - 1, u) * 0.9;
      }
    }
  }
  if (kind == 3) {
    r.pinned = true;
    std::vector<std::size_t> all(r.n);
    for (std::size_t i = 0; i < r.n; ++i) all[i] = i;
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(uniform(rng, 1, r.max_sites));
    std::sort(all.begin(), all.end());
    r.fixed_sites = all;
  }
  return r;
}

ingest::DistrictTable make_districts(const std::vector<Count>& population) {
  std::vector<ingest::District> rows;
  for (std::size_t i = 0; i < population.size(); ++i) {
    rows.push_back({"D" + std::to_string(i), population[i]});
  }
  return ingest::DistrictTable(std::move(rows));
}

plan::PlanModel build_model(const RawInstance& raw) {
  const auto table = make_districts(raw.population);
  const ingest::CommuterMatrix commuters{raw.commuters};
  const travel::TravelModel travel(ingest::TravelMatrix{raw.minutes});
  const ingest::SupplySchedule supply{raw.supply, raw.equity_periods};
  if (!raw.health) {
    return plan::build_p1(table, commuters, travel, supply, raw.max_sites,
                          raw.include_commuters);
  }
  epi::PriorityScores scores{raw.delta, {}, 0.9};
  if (raw.pinned) {
    return plan::build_p2_fixed(table, commuters, travel, supply, raw.max_sites, raw.targets,
                                scores, raw.lambda, raw.lambda_eq, raw.fixed_sites);
  }
  return plan::build_p2(table, commuters, travel, supply, raw.max_sites, raw.targets, scores,
                        raw.lambda, raw.lambda_eq);
}

namespace {

struct Block {
  std::size_t home;
  Count size;
  std::vector<double> cost;  // per site
};

std::vector<Block> blocks(const RawInstance& r) {
  const auto& c = r.minutes;
  std::vector<Block> out;
  for (std::size_t u = 0; u < r.n; ++u) {
    Count commuting = 0;
    if (r.include_commuters) {
      for (std::size_t v = 0; v < r.n; ++v) {
        const Count e = r.commuters(u, v);
        if (e == 0) continue;
        commuting += e;
        Block b{u, e, {}};
        for (std::size_t w = 0; w < r.n; ++w) {
          b.cost.push_back(std::min({c(u, w) + c(w, u), c(v, w) + c(w, v),
                                     c(v, w) + c(w, u) - c(v, u),
                                     c(u, w) + c(w, v) - c(u, v)}));
        }
        out.push_back(std::move(b));
      }
    }
    Block b{u, r.population[u] - commuting, {}};
    for (std::size_t w = 0; w < r.n; ++w) b.cost.push_back(c(u, w) + c(w, u));
    if (b.size > 0) out.push_back(std::move(b));
  }
  return out;
}

std::vector<char> allowed_sites(const RawInstance& r) {
  std::vector<char> ok(r.n, r.pinned ? 0 : 1);
  for (auto w : r.fixed_sites) ok[w] = 1;
  return ok;
}

// Health and equity part of the objective for per-(t, u) vaccination counts.
double penalty(const RawInstance& r, const std::vector<Count>& vax) {
  if (!r.health) return 0.0;
  double health = 0.0, spread = 0.0;
  for (std::size_t u = 0; u < r.n; ++u) {
    Count cumulative = 0;
    for (std::size_t t = 0; t < r.periods; ++t) {
      cumulative += vax[t * r.n + u];
      const double target = static_cast<double>(r.population[u]) * r.targets[u];
      health += r.delta(t, u) * std::max(0.0, target - static_cast<double>(cumulative));
    }
  }
  for (std::size_t t = 0; t < r.equity_periods; ++t) {
    Count hi = std::numeric_limits<Count>::min(), lo = std::numeric_limits<Count>::max();
    for (std::size_t u = 0; u < r.n; ++u) {
      hi = std::max(hi, vax[t * r.n + u]);
      lo = std::min(lo, vax[t * r.n + u]);
    }
    spread += static_cast<double>(hi - lo);
  }
  return r.lambda * health + r.lambda_eq * spread;
}

int popcount(unsigned mask) { return __builtin_popcount(mask); }

}  // namespace

std::optional<double> oracle_optimum(const RawInstance& r) {
  const auto groups = blocks(r);
  const auto ok = allowed_sites(r);
  const std::size_t cells = r.periods * r.n;
  // key: loads per (t, w), vaccinations per (t, u), used-site mask
  using Key = std::vector<Count>;
  std::map<Key, double> states;
  states[Key(2 * cells + 1, 0)] = 0.0;

  for (const auto& g : groups) {
    std::map<Key, double> next;
    for (const auto& [key, travel] : states) {
      // Distribute g.size persons over the (t, w) cells recursively.
      Key current = key;
      std::function<void(std::size_t, Count, double)> place = [&](std::size_t cell, Count left,
                                                                   double cost) {
        if (cell == cells) {
          if (left != 0) return;
          auto mask = static_cast<unsigned>(current[2 * cells]);
          if (!r.pinned && static_cast<std::size_t>(popcount(mask)) > r.max_sites) return;
          auto it = next.find(current);
          if (it == next.end() || cost < it->second) next[current] = cost;
          return;
        }
        const std::size_t t = cell / r.n, w = cell % r.n;
        const Count room = r.supply(t, w) - current[cell];
        const Count most = ok[w] ? std::min(left, room) : 0;
        for (Count k = 0; k <= most; ++k) {
          const auto saved_mask = current[2 * cells];
          current[cell] += k;
          current[cells + t * r.n + g.home] += k;
          if (k > 0) current[2 * cells] |= (Count{1} << w);
          place(cell + 1, left - k, cost + static_cast<double>(k) * g.cost[w]);
          current[cell] -= k;
          current[cells + t * r.n + g.home] -= k;
          current[2 * cells] = saved_mask;
        }
      };
      place(0, g.size, travel);
    }
    states = std::move(next);
    if (states.empty()) return std::nullopt;
  }

  std::optional<double> best;
  for (const auto& [key, travel] : states) {
    const std::vector<Count> vax(key.begin() + static_cast<std::ptrdiff_t>(cells),
                                 key.begin() + static_cast<std::ptrdiff_t>(2 * cells));
    const double total = travel + penalty(r, vax);
    if (!best || total < *best) best = total;
  }
  return best;
}

std::optional<double> naive_optimum(const RawInstance& r) {
  const auto groups = blocks(r);
  const auto ok = allowed_sites(r);
  std::vector<std::size_t> person_group;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (Count i = 0; i < groups[g].size; ++i) person_group.push_back(g);
  }
  const std::size_t cells = r.periods * r.n;
  std::vector<std::size_t> choice(person_group.size(), 0);
  std::optional<double> best;
  while (true) {
    std::vector<Count> load(cells, 0), vax(cells, 0);
    unsigned mask = 0;
    double travel = 0.0;
    bool feasible = true;
    for (std::size_t p = 0; p < person_group.size(); ++p) {
      const auto& g = groups[person_group[p]];
      const std::size_t t = choice[p] / r.n, w = choice[p] % r.n;
      if (!ok[w]) feasible = false;
      ++load[choice[p]];
      ++vax[t * r.n + g.home];
      mask |= 1u << w;
      travel += g.cost[w];
    }
    for (std::size_t cell = 0; cell < cells; ++cell) {
      if (load[cell] > r.supply(cell / r.n, cell % r.n)) feasible = false;
    }
    if (!r.pinned && static_cast<std::size_t>(popcount(mask)) > r.max_sites) feasible = false;
    if (feasible) {
      const double total = travel + penalty(r, vax);
      if (!best || total < *best) best = total;
    }
    std::size_t p = 0;
    while (p < choice.size() && ++choice[p] == cells) choice[p++] = 0;
    if (p == choice.size()) break;
  }
  return best;
}

bool close_relative(double a, double b, double rel) {
  return std::fabs(a - b) <= rel * std::max(1.0, std::max(std::fabs(a), std::fabs(b)));
}

}  // namespace vaxsite::testing
