#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>

#include "csv.hpp"
#include "vaxsite/app.hpp"

namespace vaxsite::app {

namespace {

using detail::format_double;

struct Option {
  std::string key;
  bool is_path = false;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* want) {
  throw Error(ErrorCode::kConfigError, "'" + key + "': expected " + want + ", got '" + value + "'");
}

double to_double(const std::string& key, const std::string& value) {
  const auto v = detail::parse_double(value);
  if (!v) bad_value(key, value, "a number");
  return *v;
}

double to_nonneg(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  if (v < 0.0) bad_value(key, value, "a non-negative number");
  return v;
}

std::size_t to_size(const std::string& key, const std::string& value) {
  const auto v = detail::parse_int(value);
  if (!v || *v < 0) bad_value(key, value, "a non-negative integer");
  return static_cast<std::size_t>(*v);
}

bool to_bool(const std::string& key, const std::string& value) {
  std::string s = value;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  bad_value(key, value, "true or false");
}

std::vector<std::string> to_list(const std::string& value) {
  std::vector<std::string> out;
  for (const auto& item : detail::split(value, ',')) {
    const auto t = detail::trim(item);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

std::vector<double> to_doubles(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const auto& item : to_list(value)) out.push_back(to_nonneg(key, item));
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
  return out;
}

std::string join(const std::vector<double>& items) {
  std::vector<std::string> text;
  for (const double v : items) text.push_back(format_double(v));
  return join(text);
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

std::vector<evaluate::CalibrationInterval> to_intervals(const std::string& key,
                                                        const std::string& value) {
  std::vector<evaluate::CalibrationInterval> out;
  for (const auto& item : to_list(value)) {
    const auto parts = detail::split(item, ':');
    if (parts.size() != 2 || detail::trim(parts[0]).empty()) bad_value(key, item, "name:days");
    const auto days = to_size(key, std::string(detail::trim(parts[1])));
    if (days == 0) bad_value(key, item, "a positive day count");
    out.push_back({std::string(detail::trim(parts[0])), days});
  }
  if (out.empty()) bad_value(key, value, "at least one interval");
  return out;
}

template <typename Field>
Option path_option(const std::string& key, Field field) {
  return {key, true, [field](RunConfig& c, const std::string& v) { c.*field = v; },
          [field](const RunConfig& c) { return c.*field; }};
}

template <typename Field>
Option number_option(const std::string& key, Field field) {
  return {key, false,
          [key, field](RunConfig& c, const std::string& v) { c.*field = to_nonneg(key, v); },
          [field](const RunConfig& c) { return format_double(c.*field); }};
}

template <typename Field>
Option size_option(const std::string& key, Field field) {
  return {key, false,
          [key, field](RunConfig& c, const std::string& v) { c.*field = to_size(key, v); },
          [field](const RunConfig& c) { return std::to_string(c.*field); }};
}

template <typename Field>
Option epi_number(const std::string& key, Field field) {
  return {key, false,
          [key, field](RunConfig& c, const std::string& v) { c.epi.*field = to_nonneg(key, v); },
          [field](const RunConfig& c) { return format_double(c.epi.*field); }};
}

template <typename Field>
Option epi_size(const std::string& key, Field field) {
  return {key, false,
          [key, field](RunConfig& c, const std::string& v) { c.epi.*field = to_size(key, v); },
          [field](const RunConfig& c) { return std::to_string(c.epi.*field); }};
}

const std::vector<Option>& options() {
  static const std::vector<Option> table = [] {
    std::vector<Option> t;
    t.push_back(path_option("districts", &RunConfig::districts));
    t.push_back(path_option("commuters", &RunConfig::commuters));
    t.push_back(path_option("travel", &RunConfig::travel));
    t.push_back(path_option("supply", &RunConfig::supply));
    t.push_back(path_option("beta", &RunConfig::beta));
    t.push_back(path_option("observed", &RunConfig::observed));
    t.push_back(path_option("prevalence", &RunConfig::prevalence));
    t.push_back(size_option("max_sites", &RunConfig::max_sites));
    t.push_back(size_option("horizon", &RunConfig::horizon));
    t.push_back(size_option("equity_horizon", &RunConfig::equity_horizon));
    t.push_back({"capacity", false,
                 [](RunConfig& c, const std::string& v) {
                   const auto n = detail::parse_count(v);
                   if (!n || *n < 0) bad_value("capacity", v, "a non-negative integer");
                   c.capacity = *n;
                 },
                 [](const RunConfig& c) { return std::to_string(c.capacity); }});
    t.push_back(number_option("lambda", &RunConfig::lambda));
    t.push_back(number_option("lambda_eq", &RunConfig::lambda_eq));
    t.push_back(number_option("decay", &RunConfig::decay));
    t.push_back(number_option("gamma", &RunConfig::gamma));
    t.push_back(number_option("dt", &RunConfig::dt));
    t.push_back(number_option("occupancy_scale", &RunConfig::occupancy_scale));
    t.push_back({"formulation", false,
                 [](RunConfig& c, const std::string& v) {
                   try {
                     c.formulation = plan::parse_formulation(v);
                   } catch (const Error&) {
                     bad_value("formulation", v, "p0, p1, p2 or p2-fixed");
                   }
                 },
                 [](const RunConfig& c) {
                   return std::string(plan::formulation_name(c.formulation));
                 }});
    t.push_back({"fixed_sites", false,
                 [](RunConfig& c, const std::string& v) { c.fixed_sites = to_list(v); },
                 [](const RunConfig& c) { return join(c.fixed_sites); }});
    t.push_back({"backend", false,
                 [](RunConfig& c, const std::string& v) {
                   if (v != "exhaustive" && v != "external") {
                     bad_value("backend", v, "exhaustive or external");
                   }
                   c.backend = v;
                 },
                 [](const RunConfig& c) { return c.backend; }});
    t.push_back(path_option("solution", &RunConfig::solution));
    t.push_back({"sweep_lambda", false,
                 [](RunConfig& c, const std::string& v) {
                   c.sweep_lambda = to_doubles("sweep_lambda", v);
                 },
                 [](const RunConfig& c) { return join(c.sweep_lambda); }});
    t.push_back({"sweep_lambda_eq", false,
                 [](RunConfig& c, const std::string& v) {
                   c.sweep_lambda_eq = to_doubles("sweep_lambda_eq", v);
                 },
                 [](const RunConfig& c) { return join(c.sweep_lambda_eq); }});
    t.push_back({"jobs", false,
                 [](RunConfig& c, const std::string& v) {
                   c.jobs = to_size("jobs", v);
                   if (c.jobs == 0) bad_value("jobs", v, "at least 1");
                 },
                 [](const RunConfig& c) { return std::to_string(c.jobs); }});
    t.push_back({"strict", false,
                 [](RunConfig& c, const std::string& v) { c.strict = to_bool("strict", v); },
                 [](const RunConfig& c) { return bool_text(c.strict); }});
    t.push_back({"acceptance", false,
                 [](RunConfig& c, const std::string& v) {
                   c.acceptance = to_bool("acceptance", v);
                 },
                 [](const RunConfig& c) { return bool_text(c.acceptance); }});
    t.push_back(size_option("max_subsets", &RunConfig::max_subsets));
    t.push_back(number_option("time_budget", &RunConfig::time_budget));
    t.push_back({"seed", false,
                 [](RunConfig& c, const std::string& v) { c.seed = to_size("seed", v); },
                 [](const RunConfig& c) { return std::to_string(c.seed); }});
    t.push_back(epi_number("beta_u_scale", &EpiSettings::beta_u_scale));
    t.push_back(epi_number("delta_I", &EpiSettings::delta_I));
    t.push_back(epi_number("delta_U", &EpiSettings::delta_U));
    t.push_back(epi_number("gamma_I", &EpiSettings::gamma_I));
    t.push_back(epi_number("gamma_U", &EpiSettings::gamma_U));
    t.push_back(epi_number("gamma_H", &EpiSettings::gamma_H));
    t.push_back(epi_number("mu_I", &EpiSettings::mu_I));
    t.push_back(epi_number("mu_U", &EpiSettings::mu_U));
    t.push_back(epi_number("mu_H", &EpiSettings::mu_H));
    t.push_back(epi_number("eta", &EpiSettings::eta));
    t.push_back(epi_number("theta", &EpiSettings::theta));
    t.push_back(epi_number("seed_fraction", &EpiSettings::seed_fraction));
    t.push_back(epi_size("eval_days", &EpiSettings::days));
    t.push_back(epi_size("vaccination_lead", &EpiSettings::vaccination_lead));
    t.push_back({"start_date", false,
                 [](RunConfig& c, const std::string& v) { c.epi.start_date = v; },
                 [](const RunConfig& c) { return c.epi.start_date; }});
    t.push_back({"calibrated", true,
                 [](RunConfig& c, const std::string& v) { c.epi.calibrated = v; },
                 [](const RunConfig& c) { return c.epi.calibrated; }});
    t.push_back({"intervals", false,
                 [](RunConfig& c, const std::string& v) {
                   c.epi.intervals = to_intervals("intervals", v);
                 },
                 [](const RunConfig& c) {
                   std::vector<std::string> items;
                   for (const auto& i : c.epi.intervals) {
                     items.push_back(i.name + ":" + std::to_string(i.days));
                   }
                   return join(items);
                 }});
    t.push_back(epi_number("w_D", &EpiSettings::w_D));
    t.push_back(epi_number("w_C", &EpiSettings::w_C));
    t.push_back(epi_number("w_I", &EpiSettings::w_I));
    t.push_back(epi_number("w_H", &EpiSettings::w_H));
    t.push_back(epi_size("calibration_evaluations", &EpiSettings::evaluations));
    t.push_back(epi_size("calibration_restarts", &EpiSettings::restarts));
    return t;
  }();
  return table;
}

const Option& find_option(const std::string& key) {
  for (const auto& o : options()) {
    if (o.key == key) return o;
  }
  throw Error(ErrorCode::kConfigError, "unknown key '" + key + "'");
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInfeasible:
    case ErrorCode::kInfeasiblePlan:
    case ErrorCode::kInfeasibleByConstruction:
    case ErrorCode::kZeroCapacity:
      return kExitInfeasible;
    case ErrorCode::kInvariantBreach:
      return kExitInternal;
    default:
      return kExitInput;
  }
}

void set_option(RunConfig& config, const std::string& key, const std::string& value) {
  find_option(key).set(config, std::string(detail::trim(value)));
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open config '" + path.string() + "'");
  RunConfig config;
  config.base_dir = path.parent_path();
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto text = detail::trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    const auto where = path.string() + ":" + std::to_string(number) + ": ";
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kConfigError, where + "expected key = value");
    }
    const std::string key(detail::trim(text.substr(0, eq)));
    std::string value(detail::trim(text.substr(eq + 1)));
    try {
      const auto& option = find_option(key);
      if (option.is_path && !value.empty() && std::filesystem::path(value).is_relative()) {
        value = (config.base_dir / value).lexically_normal().string();
      }
      option.set(config, value);
    } catch (const Error& e) {
      const std::string what = e.what();
      throw Error(ErrorCode::kConfigError, where + what.substr(what.find(": ") + 2));
    }
  }
  return config;
}

std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& config) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& o : options()) out.emplace_back(o.key, o.get(config));
  return out;
}

std::string config_text(const RunConfig& config) {
  std::ostringstream out;
  for (const auto& [key, value] : config_entries(config)) out << key << " = " << value << '\n';
  return out.str();
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace vaxsite::app
