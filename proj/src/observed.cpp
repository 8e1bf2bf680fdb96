#include <chrono>
#include <cstdio>
#include <map>
#include <ostream>

#include "csv.hpp"
#include "vaxsite/evaluate.hpp"

namespace vaxsite::evaluate {

namespace {

using std::chrono::day;
using std::chrono::month;
using std::chrono::sys_days;
using std::chrono::year;
using std::chrono::year_month_day;

std::optional<sys_days> parse_date(std::string_view text) {
  const auto parts = detail::split(text, '-');
  if (parts.size() != 3 || parts[0].size() != 4 || parts[1].size() != 2 || parts[2].size() != 2) {
    return std::nullopt;
  }
  const auto y = detail::parse_int(parts[0]);
  const auto m = detail::parse_int(parts[1]);
  const auto d = detail::parse_int(parts[2]);
  if (!y || !m || !d || *m < 1 || *d < 1) return std::nullopt;
  const year_month_day ymd{year(static_cast<int>(*y)), month(static_cast<unsigned>(*m)),
                           day(static_cast<unsigned>(*d))};
  if (!ymd.ok()) return std::nullopt;
  return sys_days(ymd);
}

std::string format_date(sys_days date) {
  const year_month_day ymd(date);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

}  // namespace

ObservedSeries load_observed(std::istream& in, const std::string& label,
                             const ingest::DistrictTable& districts) {
  detail::CsvReader reader(in, label,
                           {"date", "district_id", "cumulative_cases", "cases",
                            "cumulative_deaths", "hospitalizations"});
  const auto n = districts.size();
  std::map<sys_days, std::vector<std::optional<Surveillance>>> rows;
  detail::CsvRow row;
  while (reader.next(row)) {
    const auto date = parse_date(row.fields[0]);
    if (!date) reader.fail(ErrorCode::kMalformedRow, row, "bad date '" + row.fields[0] + "'");
    const auto u = districts.find(row.fields[1]);
    if (!u) {
      reader.fail(ErrorCode::kUnknownDistrict, row, "unknown district '" + row.fields[1] + "'");
    }
    double values[4];
    for (std::size_t k = 0; k < 4; ++k) {
      const auto v = detail::parse_double(row.fields[2 + k]);
      if (!v) reader.fail(ErrorCode::kMalformedRow, row, "bad number '" + row.fields[2 + k] + "'");
      if (*v < 0.0) reader.fail(ErrorCode::kNegativeCount, row, "negative count");
      values[k] = *v;
    }
    auto& day_rows = rows[*date];
    day_rows.resize(n);
    if (day_rows[*u]) {
      reader.fail(ErrorCode::kMalformedRow, row,
                  "district '" + row.fields[1] + "' listed twice on " + row.fields[0]);
    }
    day_rows[*u] = Surveillance{values[0], values[1], values[2], values[3]};
  }
  if (rows.empty()) throw Error(ErrorCode::kEmptyFile, label + ": no observations");

  ObservedSeries out;
  auto expected = rows.begin()->first;
  for (const auto& [date, day_rows] : rows) {
    if (date != expected) {
      throw Error(ErrorCode::kMissingPair, label + ": no observations on " + format_date(expected));
    }
    std::vector<Surveillance> values(n);
    for (std::size_t u = 0; u < n; ++u) {
      if (!day_rows[u]) {
        throw Error(ErrorCode::kMissingPair, label + ": district '" + districts.id(u) +
                                                 "' missing on " + format_date(date));
      }
      values[u] = *day_rows[u];
    }
    out.push_back(std::move(values));
    expected = date + std::chrono::days(1);
  }
  return out;
}

ObservedSeries load_observed(const std::filesystem::path& path,
                             const ingest::DistrictTable& districts) {
  auto in = detail::open_input(path.string());
  return load_observed(in, path.string(), districts);
}

void write_observed(std::ostream& out, const ObservedSeries& observed,
                    const ingest::DistrictTable& districts, const std::string& first_date) {
  const auto start = parse_date(first_date);
  if (!start) throw Error(ErrorCode::kInvalidArgument, "bad date '" + first_date + "'");
  out << "date,district_id,cumulative_cases,cases,cumulative_deaths,hospitalizations\n";
  for (std::size_t k = 0; k < observed.size(); ++k) {
    const auto date = format_date(*start + std::chrono::days(static_cast<long>(k)));
    for (std::size_t u = 0; u < observed[k].size(); ++u) {
      const auto& o = observed[k][u];
      out << date << ',' << districts.id(u) << ',' << detail::format_double(o.cumulative_cases)
          << ',' << detail::format_double(o.cases) << ','
          << detail::format_double(o.cumulative_deaths) << ','
          << detail::format_double(o.hospitalizations) << '\n';
    }
  }
}

void write_trajectory(std::ostream& out, const Trajectory& trajectory,
                      const ingest::DistrictTable& districts) {
  out << "day,district_id,S,V,E,I,U,H,R,D\n";
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    const auto& s = trajectory[k];
    for (std::size_t u = 0; u < s.size(); ++u) {
      out << k << ',' << districts.id(u);
      for (const auto* v : {&s.S, &s.V, &s.E, &s.I, &s.U, &s.H, &s.R, &s.D}) {
        out << ',' << detail::format_double((*v)[u]);
      }
      out << '\n';
    }
  }
}

}  // namespace vaxsite::evaluate
