#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "csv.hpp"
#include "vaxsite/solve.hpp"

namespace vaxsite::solve {

using plan::AllocationPlan;
using plan::PlanModel;

namespace {
constexpr double kRoundingTolerance = 1e-6;
}

std::vector<double> read_solution(const PlanModel& model, std::istream& in) {
  const auto& vars = model.variables();
  std::vector<double> values(vars.size(), 0.0);
  std::vector<char> listed(vars.size(), 0);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto where = "solution line " + std::to_string(line_no);
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string name, value_text, extra;
    if (!(fields >> name)) continue;
    if (!(fields >> value_text) || (fields >> extra)) {
      throw Error(ErrorCode::kMalformedRow, where + ": expected 'name value'");
    }
    const auto j = model.find_variable(name);
    if (!j) throw Error(ErrorCode::kUnknownVariable, where + ": '" + name + "'");
    const auto value = detail::parse_double(value_text);
    if (!value || !std::isfinite(*value)) {
      throw Error(ErrorCode::kMalformedRow, where + ": bad value '" + value_text + "'");
    }
    if (listed[*j]) throw Error(ErrorCode::kMalformedRow, where + ": '" + name + "' repeated");
    listed[*j] = 1;
    double v = *value;
    if (vars[*j].kind != plan::VarKind::kContinuous) {
      const double rounded = std::round(v);
      if (std::fabs(v - rounded) > kRoundingTolerance) {
        throw Error(ErrorCode::kNonIntegralValue,
                    where + ": " + name + " = " + value_text + " is not integral");
      }
      v = rounded;
    }
    values[*j] = v;
  }

  const auto& l = model.layout();
  const auto first_continuous = l.x_count() + l.y_count() + l.z_count();
  bool missing_auxiliary = false;
  for (std::size_t j = first_continuous; j < vars.size(); ++j) {
    missing_auxiliary = missing_auxiliary || !listed[j];
  }
  if (missing_auxiliary) {
    const auto derived = plan::to_assignment(model, plan::from_assignment(model, values));
    for (std::size_t j = first_continuous; j < vars.size(); ++j) {
      if (!listed[j]) values[j] = derived[j];
    }
  }
  return values;
}

AllocationPlan import_solution(const PlanModel& model, std::istream& in) {
  const auto values = read_solution(model, in);
  auto plan = plan::from_assignment(model, values);
  auto violations = validate(model, plan);
  for (auto& v : validate_assignment(model, values)) {
    const bool seen = std::any_of(violations.begin(), violations.end(), [&](const auto& w) {
      return w.family == v.family;
    });
    if (!seen || v.family == plan::Family::k2g || v.family == plan::Family::k2h) {
      violations.push_back(std::move(v));
    }
  }
  if (!violations.empty()) {
    throw Error(ErrorCode::kInfeasiblePlan, plan::describe(violations));
  }
  return plan;
}

AllocationPlan import_solution(const PlanModel& model, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return import_solution(model, in);
}

void write_solution(const PlanModel& model, const AllocationPlan& plan, std::ostream& out) {
  const auto values = plan::to_assignment(model, plan);
  out << "# formulation " << plan::formulation_name(model.formulation()) << '\n';
  out << "# objective " << detail::format_double(model.objective_value(values)) << '\n';
  const auto& vars = model.variables();
  for (std::size_t j = 0; j < vars.size(); ++j) {
    if (values[j] != 0.0) out << vars[j].name << ' ' << detail::format_double(values[j]) << '\n';
  }
}

}  // namespace vaxsite::solve
