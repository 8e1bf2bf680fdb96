#pragma once

// Loading and validation of the district-level inputs: populations, commuter
// flows, the travel-time matrix and the per-site supply schedule.
//
// Every loader accepts either a path or an already-open stream; the stream
// overloads take a `source` label that is used in error messages. Districts
// are always re-ordered lexicographically by id, so any tensor built on top of
// a DistrictTable shares one index space no matter how the input rows were
// ordered.

#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vaxsite/common.hpp"

namespace vaxsite::ingest {

struct District {
  std::string id;
  Count population = 0;

  bool operator==(const District&) const = default;
};

class DistrictTable {
 public:
  DistrictTable() = default;
  // Sorts by id; throws DuplicateDistrict / MalformedRow on bad input.
  explicit DistrictTable(std::vector<District> districts);

  std::size_t size() const noexcept { return districts_.size(); }
  const District& operator[](std::size_t i) const { return districts_[i]; }
  const std::vector<District>& districts() const noexcept { return districts_; }

  const std::string& id(std::size_t i) const { return districts_[i].id; }
  Count population(std::size_t i) const { return districts_[i].population; }
  Count total_population() const;

  std::optional<std::size_t> find(const std::string& id) const;
  // Throws UnknownDistrict.
  std::size_t index_of(const std::string& id) const;

  bool operator==(const DistrictTable& other) const {
    return districts_ == other.districts_;
  }

 private:
  std::vector<District> districts_;
  std::map<std::string, std::size_t> index_;
};

// e(u, v): persons living in u and working in v.
struct CommuterMatrix {
  Matrix<Count> e;

  Count outflow(std::size_t u) const;
  // p_u - sum_v e(u, v); never stored separately.
  Count non_commuters(const DistrictTable& table, std::size_t u) const;

  bool operator==(const CommuterMatrix&) const = default;
};

// One-way travel minutes; zero diagonal, non-negative, not necessarily
// symmetric or metric.
struct TravelMatrix {
  Matrix<double> minutes;

  std::size_t size() const noexcept { return minutes.rows(); }
  double operator()(std::size_t from, std::size_t to) const {
    return minutes(from, to);
  }

  bool operator==(const TravelMatrix&) const = default;
};

struct SupplySchedule {
  Matrix<Count> doses;  // periods x districts
  std::size_t equity_horizon = 0;

  std::size_t horizon() const noexcept { return doses.rows(); }
  Count operator()(std::size_t t, std::size_t w) const { return doses(t, w); }
  Count total() const;

  bool operator==(const SupplySchedule&) const = default;
};

inline constexpr double kDefaultOccupancyScale = 1.53;
inline constexpr Count kDefaultSiteCapacity = 400000;

DistrictTable load_districts(std::istream& in, const std::string& source);
DistrictTable load_districts(const std::string& path);

CommuterMatrix load_commuters(std::istream& in, const std::string& source,
                              const DistrictTable& table,
                              double occupancy_scale = kDefaultOccupancyScale);
CommuterMatrix load_commuters(const std::string& path, const DistrictTable& table,
                              double occupancy_scale = kDefaultOccupancyScale);

// A commuter matrix with no flows at all (every resident is a non-commuter).
CommuterMatrix no_commuters(const DistrictTable& table);

TravelMatrix load_travel_matrix(std::istream& in, const std::string& source,
                                const DistrictTable& table);
TravelMatrix load_travel_matrix(const std::string& path, const DistrictTable& table);

// Uniform schedule, every cell set to `capacity`.
SupplySchedule uniform_supply(const DistrictTable& table, std::size_t horizon,
                              std::size_t equity_horizon, Count capacity);
// Rows `period,district_id,doses` (period 1-based) override the uniform
// default `capacity` cell by cell.
SupplySchedule load_supply(std::istream& in, const std::string& source,
                           const DistrictTable& table, std::size_t horizon,
                           std::size_t equity_horizon, Count capacity);
SupplySchedule load_supply(const std::string& path, const DistrictTable& table,
                           std::size_t horizon, std::size_t equity_horizon,
                           Count capacity);

// Generic `origin_id,dest_id,<value_column>` pair files (beta.csv, kappa.csv).
// Missing pairs take `missing_value` unless `require_complete` is set, in
// which case they raise MissingPair.
Matrix<double> load_pair_matrix(std::istream& in, const std::string& source,
                                const DistrictTable& table,
                                const std::string& value_column,
                                double missing_value, bool require_complete);
Matrix<double> load_pair_matrix(const std::string& path, const DistrictTable& table,
                                const std::string& value_column,
                                double missing_value, bool require_complete);

// `district_id,<value_column>` files (e.g. a prevalence snapshot).
std::vector<double> load_district_values(const std::string& path,
                                         const DistrictTable& table,
                                         const std::string& value_column);

}  // namespace vaxsite::ingest
