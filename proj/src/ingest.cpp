#include "vaxsite/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "csv.hpp"

namespace vaxsite::ingest {

using detail::CsvReader;
using detail::CsvRow;

DistrictTable::DistrictTable(std::vector<District> districts)
    : districts_(std::move(districts)) {
  std::sort(districts_.begin(), districts_.end(),
            [](const District& a, const District& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < districts_.size(); ++i) {
    const auto& d = districts_[i];
    if (d.id.empty()) throw Error(ErrorCode::kMalformedRow, "empty district id");
    if (d.population < 0) {
      throw Error(ErrorCode::kMalformedRow, "negative population for '" + d.id + "'");
    }
    if (!index_.emplace(d.id, i).second) {
      throw Error(ErrorCode::kDuplicateDistrict, "district '" + d.id + "' listed twice");
    }
  }
}

Count DistrictTable::total_population() const {
  Count total = 0;
  for (const auto& d : districts_) total += d.population;
  return total;
}

std::optional<std::size_t> DistrictTable::find(const std::string& id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t DistrictTable::index_of(const std::string& id) const {
  if (auto i = find(id)) return *i;
  throw Error(ErrorCode::kUnknownDistrict, "unknown district '" + id + "'");
}

Count CommuterMatrix::outflow(std::size_t u) const {
  const auto r = e.row(u);
  return std::accumulate(r.begin(), r.end(), Count{0});
}

Count CommuterMatrix::non_commuters(const DistrictTable& table, std::size_t u) const {
  return table.population(u) - outflow(u);
}

Count SupplySchedule::total() const {
  const auto d = doses.data();
  return std::accumulate(d.begin(), d.end(), Count{0});
}

DistrictTable load_districts(std::istream& in, const std::string& source) {
  CsvReader reader(in, source, {"district_id", "population"});
  std::vector<District> rows;
  std::set<std::string> seen;
  CsvRow row;
  while (reader.next(row)) {
    const auto& id = row.fields[0];
    if (id.empty()) reader.fail(ErrorCode::kMalformedRow, row, "empty district id");
    const auto pop = detail::parse_count(row.fields[1]);
    if (!pop) {
      reader.fail(ErrorCode::kMalformedRow, row,
                  "population '" + row.fields[1] + "' is not a whole number");
    }
    if (*pop < 0) reader.fail(ErrorCode::kMalformedRow, row, "negative population");
    if (!seen.insert(id).second) {
      reader.fail(ErrorCode::kDuplicateDistrict, row, "district '" + id + "' listed twice");
    }
    rows.push_back({id, *pop});
  }
  if (rows.empty()) throw Error(ErrorCode::kEmptyFile, source + ": no districts");
  return DistrictTable(std::move(rows));
}

DistrictTable load_districts(const std::string& path) {
  auto in = detail::open_input(path);
  return load_districts(in, path);
}

namespace {

std::size_t lookup(const CsvReader& reader, const CsvRow& row,
                   const DistrictTable& table, const std::string& id) {
  if (auto i = table.find(id)) return *i;
  reader.fail(ErrorCode::kUnknownDistrict, row, "unknown district '" + id + "'");
}

}  // namespace

CommuterMatrix load_commuters(std::istream& in, const std::string& source,
                              const DistrictTable& table, double occupancy_scale) {
  if (!(occupancy_scale > 0.0) || !std::isfinite(occupancy_scale)) {
    throw Error(ErrorCode::kInvalidArgument, "occupancy scale must be positive");
  }
  const auto n = table.size();
  CsvReader reader(in, source, {"origin_id", "dest_id", "vehicles"});
  CommuterMatrix out{Matrix<Count>(n, n, 0)};
  Matrix<char> seen(n, n, 0);
  CsvRow row;
  while (reader.next(row)) {
    const auto u = lookup(reader, row, table, row.fields[0]);
    const auto v = lookup(reader, row, table, row.fields[1]);
    const auto vehicles = detail::parse_double(row.fields[2]);
    if (!vehicles) {
      reader.fail(ErrorCode::kMalformedRow, row, "vehicles '" + row.fields[2] + "' is not a number");
    }
    if (*vehicles < 0.0) reader.fail(ErrorCode::kNegativeCount, row, "negative vehicle count");
    if (seen(u, v)) reader.fail(ErrorCode::kMalformedRow, row, "pair listed twice");
    seen(u, v) = true;
    // llround rounds half away from zero.
    out.e(u, v) = static_cast<Count>(std::llround(*vehicles * occupancy_scale));
  }
  for (std::size_t u = 0; u < n; ++u) {
    if (out.outflow(u) > table.population(u)) {
      throw Error(ErrorCode::kCommutersExceedPopulation,
                  source + ": district '" + table.id(u) + "' has " +
                      std::to_string(out.outflow(u)) + " commuters but population " +
                      std::to_string(table.population(u)));
    }
  }
  return out;
}

CommuterMatrix load_commuters(const std::string& path, const DistrictTable& table,
                              double occupancy_scale) {
  auto in = detail::open_input(path);
  return load_commuters(in, path, table, occupancy_scale);
}

CommuterMatrix no_commuters(const DistrictTable& table) {
  return CommuterMatrix{Matrix<Count>(table.size(), table.size(), 0)};
}

TravelMatrix load_travel_matrix(std::istream& in, const std::string& source,
                                const DistrictTable& table) {
  const auto n = table.size();
  CsvReader reader(in, source, {"origin_id", "dest_id", "minutes"});
  TravelMatrix out{Matrix<double>(n, n, 0.0)};
  Matrix<char> seen(n, n, 0);
  CsvRow row;
  while (reader.next(row)) {
    const auto u = lookup(reader, row, table, row.fields[0]);
    const auto v = lookup(reader, row, table, row.fields[1]);
    const auto minutes = detail::parse_double(row.fields[2]);
    if (!minutes) {
      reader.fail(ErrorCode::kMalformedRow, row, "minutes '" + row.fields[2] + "' is not a number");
    }
    if (*minutes < 0.0) reader.fail(ErrorCode::kNegativeTime, row, "negative travel time");
    if (u == v && *minutes != 0.0) {
      reader.fail(ErrorCode::kNonZeroDiagonal, row,
                  "travel time from '" + row.fields[0] + "' to itself must be 0");
    }
    if (seen(u, v)) reader.fail(ErrorCode::kMalformedRow, row, "pair listed twice");
    seen(u, v) = true;
    out.minutes(u, v) = *minutes;
  }
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      if (u != v && !seen(u, v)) {
        throw Error(ErrorCode::kMissingPair, source + ": no travel time for " +
                                                 table.id(u) + " -> " + table.id(v));
      }
    }
  }
  return out;
}

TravelMatrix load_travel_matrix(const std::string& path, const DistrictTable& table) {
  auto in = detail::open_input(path);
  return load_travel_matrix(in, path, table);
}

SupplySchedule uniform_supply(const DistrictTable& table, std::size_t horizon,
                              std::size_t equity_horizon, Count capacity) {
  if (horizon == 0) throw Error(ErrorCode::kInvalidArgument, "horizon must be at least 1");
  if (equity_horizon > horizon) {
    throw Error(ErrorCode::kInvalidArgument, "equity horizon exceeds horizon");
  }
  if (capacity < 0) throw Error(ErrorCode::kNegativeDoses, "negative default capacity");
  return SupplySchedule{Matrix<Count>(horizon, table.size(), capacity), equity_horizon};
}

SupplySchedule load_supply(std::istream& in, const std::string& source,
                           const DistrictTable& table, std::size_t horizon,
                           std::size_t equity_horizon, Count capacity) {
  auto out = uniform_supply(table, horizon, equity_horizon, capacity);
  CsvReader reader(in, source, {"period", "district_id", "doses"});
  CsvRow row;
  while (reader.next(row)) {
    const auto period = detail::parse_int(row.fields[0]);
    if (!period) reader.fail(ErrorCode::kMalformedRow, row, "period is not an integer");
    if (*period < 1 || static_cast<unsigned long long>(*period) > horizon) {
      reader.fail(ErrorCode::kPeriodOutOfRange, row,
                  "period " + row.fields[0] + " outside 1.." + std::to_string(horizon));
    }
    const auto w = lookup(reader, row, table, row.fields[1]);
    const auto doses = detail::parse_count(row.fields[2]);
    if (!doses) reader.fail(ErrorCode::kMalformedRow, row, "doses is not a whole number");
    if (*doses < 0) reader.fail(ErrorCode::kNegativeDoses, row, "negative dose count");
    out.doses(static_cast<std::size_t>(*period - 1), w) = *doses;
  }
  return out;
}

SupplySchedule load_supply(const std::string& path, const DistrictTable& table,
                           std::size_t horizon, std::size_t equity_horizon, Count capacity) {
  auto in = detail::open_input(path);
  return load_supply(in, path, table, horizon, equity_horizon, capacity);
}

Matrix<double> load_pair_matrix(std::istream& in, const std::string& source,
                                const DistrictTable& table, const std::string& value_column,
                                double missing_value, bool require_complete) {
  const auto n = table.size();
  CsvReader reader(in, source, {"origin_id", "dest_id", value_column});
  Matrix<double> out(n, n, missing_value);
  Matrix<char> seen(n, n, 0);
  CsvRow row;
  while (reader.next(row)) {
    const auto u = lookup(reader, row, table, row.fields[0]);
    const auto v = lookup(reader, row, table, row.fields[1]);
    const auto value = detail::parse_double(row.fields[2]);
    if (!value) reader.fail(ErrorCode::kMalformedRow, row, value_column + " is not a number");
    if (*value < 0.0) reader.fail(ErrorCode::kMalformedRow, row, "negative " + value_column);
    if (seen(u, v)) reader.fail(ErrorCode::kMalformedRow, row, "pair listed twice");
    seen(u, v) = true;
    out(u, v) = *value;
  }
  if (require_complete) {
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v = 0; v < n; ++v) {
        if (!seen(u, v)) {
          throw Error(ErrorCode::kMissingPair, source + ": no " + value_column + " for " +
                                                   table.id(u) + " -> " + table.id(v));
        }
      }
    }
  }
  return out;
}

Matrix<double> load_pair_matrix(const std::string& path, const DistrictTable& table,
                                const std::string& value_column, double missing_value,
                                bool require_complete) {
  auto in = detail::open_input(path);
  return load_pair_matrix(in, path, table, value_column, missing_value, require_complete);
}

std::vector<double> load_district_values(const std::string& path, const DistrictTable& table,
                                         const std::string& value_column) {
  auto in = detail::open_input(path);
  CsvReader reader(in, path, {"district_id", value_column});
  std::vector<double> out(table.size(), 0.0);
  std::vector<bool> seen(table.size(), false);
  CsvRow row;
  while (reader.next(row)) {
    const auto u = lookup(reader, row, table, row.fields[0]);
    const auto value = detail::parse_double(row.fields[1]);
    if (!value) reader.fail(ErrorCode::kMalformedRow, row, value_column + " is not a number");
    if (seen[u]) reader.fail(ErrorCode::kMalformedRow, row, "district listed twice");
    seen[u] = true;
    out[u] = *value;
  }
  for (std::size_t u = 0; u < table.size(); ++u) {
    if (!seen[u]) {
      throw Error(ErrorCode::kMissingPair, path + ": no " + value_column + " for " + table.id(u));
    }
  }
  return out;
}

}  // namespace vaxsite::ingest
