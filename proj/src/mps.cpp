#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "csv.hpp"
#include "vaxsite/solve.hpp"

namespace vaxsite::solve {

using plan::PlanModel;

namespace {

constexpr const char* kObjectiveRow = "OBJ";
constexpr const char* kRhsSet = "RHS";
constexpr const char* kBoundSet = "BND";

char sense_code(plan::Sense s) {
  switch (s) {
    case plan::Sense::kLessEqual: return 'L';
    case plan::Sense::kEqual: return 'E';
    case plan::Sense::kGreaterEqual: return 'G';
  }
  return '?';
}

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const auto start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::string unquote(std::string_view s) {
  if (s.size() >= 2 && s.front() == '\'' && s.back() == '\'') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

}  // namespace

void export_mps(const PlanModel& model, std::ostream& out) {
  const auto& vars = model.variables();
  const auto& rows = model.constraints();
  const auto& cost = model.objective();
  const auto fmt = detail::format_double;

  // Column-major view of the constraint matrix, rows in model order.
  std::vector<std::vector<std::pair<std::size_t, double>>> by_column(vars.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& t : rows[i].terms) by_column[t.var].emplace_back(i, t.coef);
  }

  out << "NAME " << "VAXSITE_" << plan::formulation_name(model.formulation()) << '\n';
  out << "OBJSENSE\n    MIN\n";
  out << "ROWS\n";
  out << " N  " << kObjectiveRow << '\n';
  for (const auto& r : rows) out << ' ' << sense_code(r.sense) << "  " << r.name << '\n';

  out << "COLUMNS\n";
  bool in_integer_block = false;
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const bool integer = vars[j].kind != plan::VarKind::kContinuous;
    if (integer != in_integer_block) {
      out << "    MARKER    'MARKER'    " << (integer ? "'INTORG'" : "'INTEND'") << '\n';
      in_integer_block = integer;
    }
    const auto& name = vars[j].name;
    if (cost[j] != 0.0) out << "    " << name << "  " << kObjectiveRow << "  " << fmt(cost[j]) << '\n';
    for (const auto& [i, a] : by_column[j]) {
      out << "    " << name << "  " << rows[i].name << "  " << fmt(a) << '\n';
    }
    if (cost[j] == 0.0 && by_column[j].empty()) {
      out << "    " << name << "  " << kObjectiveRow << "  0\n";
    }
  }
  if (in_integer_block) out << "    MARKER    'MARKER'    'INTEND'\n";

  out << "RHS\n";
  for (const auto& r : rows) {
    if (r.rhs != 0.0) out << "    " << kRhsSet << "  " << r.name << "  " << fmt(r.rhs) << '\n';
  }

  out << "BOUNDS\n";
  for (const auto& v : vars) {
    const bool integer = v.kind != plan::VarKind::kContinuous;
    if (v.lower == v.upper) {
      out << " FX " << kBoundSet << "  " << v.name << "  " << fmt(v.lower) << '\n';
      continue;
    }
    if (v.lower != 0.0) out << " LO " << kBoundSet << "  " << v.name << "  " << fmt(v.lower) << '\n';
    if (std::isfinite(v.upper)) {
      out << " UP " << kBoundSet << "  " << v.name << "  " << fmt(v.upper) << '\n';
    } else if (integer) {
      // Some readers give bare integer columns an upper bound of 1.
      out << " PL " << kBoundSet << "  " << v.name << '\n';
    }
  }
  out << "ENDATA\n";
}

void export_mps(const PlanModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  export_mps(model, out);
  out.flush();
  if (!out) throw Error(ErrorCode::kIoError, "failed writing " + path.string());
}

MpsModel read_mps(std::istream& in) {
  MpsModel m;
  std::unordered_map<std::string, std::size_t> row_index, col_index;
  std::string section;
  bool integer_block = false;
  std::string line;
  std::size_t line_no = 0;

  const auto fail = [&](const std::string& what) -> void {
    throw Error(ErrorCode::kMalformedRow, "MPS line " + std::to_string(line_no) + ": " + what);
  };
  const auto number = [&](std::string_view text) {
    const auto v = detail::parse_double(text);
    if (!v) fail("bad number '" + std::string(text) + "'");
    return *v;
  };
  const auto row_of = [&](std::string_view name) -> std::size_t {
    const auto it = row_index.find(std::string(name));
    if (it == row_index.end()) fail("unknown row '" + std::string(name) + "'");
    return it->second;
  };
  const auto column_of = [&](std::string_view name) -> std::size_t {
    const auto it = col_index.find(std::string(name));
    if (it == col_index.end()) fail("unknown column '" + std::string(name) + "'");
    return it->second;
  };
  const auto add_entry = [&](std::size_t j, std::string_view row, std::string_view value) {
    const double a = number(value);
    if (row == m.objective_name) {
      m.columns[j].cost += a;
    } else {
      m.columns[j].entries.emplace_back(row_of(row), a);
    }
  };
  const auto add_rhs = [&](std::string_view row, std::string_view value) {
    if (row == m.objective_name) return;  // objective constant, not used
    m.rows[row_of(row)].rhs = number(value);
  };

  bool ended = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '*') continue;
    const auto tok = tokens(line);
    if (tok.empty()) continue;
    const bool header = !std::isspace(static_cast<unsigned char>(line[0]));
    if (header) {
      section = std::string(tok[0]);
      if (section == "NAME") {
        if (tok.size() > 1) m.name = std::string(tok[1]);
      } else if (section == "OBJSENSE") {
        if (tok.size() > 1) m.minimize = tok[1] != "MAX" && tok[1] != "MAXIMIZE";
      } else if (section == "ENDATA") {
        ended = true;
        break;
      } else if (section != "ROWS" && section != "COLUMNS" && section != "RHS" &&
                 section != "BOUNDS") {
        fail("unsupported section '" + section + "'");
      }
      continue;
    }
    if (section == "OBJSENSE") {
      m.minimize = tok[0] != "MAX" && tok[0] != "MAXIMIZE";
    } else if (section == "ROWS") {
      if (tok.size() != 2) fail("ROWS entries need a type and a name");
      const std::string type(tok[0]);
      if (type == "N") {
        if (m.objective_name.empty()) m.objective_name = std::string(tok[1]);
        continue;
      }
      if (type != "L" && type != "G" && type != "E") fail("unknown row type '" + type + "'");
      if (!row_index.emplace(std::string(tok[1]), m.rows.size()).second) fail("duplicate row");
      m.rows.push_back({std::string(tok[1]), type[0], 0.0});
    } else if (section == "COLUMNS") {
      if (tok.size() >= 3 && unquote(tok[1]) == "MARKER") {
        const auto kind = unquote(tok[2]);
        if (kind == "INTORG") {
          integer_block = true;
        } else if (kind == "INTEND") {
          integer_block = false;
        } else {
          fail("unknown marker");
        }
        continue;
      }
      if (tok.size() != 3 && tok.size() != 5) fail("COLUMNS entries need 3 or 5 fields");
      const std::string name(tok[0]);
      auto it = col_index.find(name);
      if (it == col_index.end()) {
        it = col_index.emplace(name, m.columns.size()).first;
        MpsColumn c;
        c.name = name;
        c.integer = integer_block;
        m.columns.push_back(std::move(c));
      } else if (it->second + 1 != m.columns.size()) {
        fail("column '" + name + "' is not contiguous");
      }
      add_entry(it->second, tok[1], tok[2]);
      if (tok.size() == 5) add_entry(it->second, tok[3], tok[4]);
    } else if (section == "RHS") {
      // Optional set name: either "set row value [row value]" or "row value".
      if (tok.size() == 2) {
        add_rhs(tok[0], tok[1]);
      } else if (tok.size() == 3 || tok.size() == 5) {
        add_rhs(tok[1], tok[2]);
        if (tok.size() == 5) add_rhs(tok[3], tok[4]);
      } else {
        fail("RHS entries need 2, 3 or 5 fields");
      }
    } else if (section == "BOUNDS") {
      if (tok.size() < 3) fail("BOUNDS entries need a type, a set and a column");
      const std::string type(tok[0]);
      auto& c = m.columns[column_of(tok[2])];
      const bool has_value = tok.size() >= 4;
      const auto value = [&] {
        if (!has_value) fail("bound '" + type + "' needs a value");
        return number(tok[3]);
      };
      if (type == "UP") {
        c.upper = value();
      } else if (type == "LO") {
        c.lower = value();
      } else if (type == "FX") {
        c.lower = c.upper = value();
      } else if (type == "PL") {
        c.upper = plan::kInfinity;
      } else if (type == "MI") {
        c.lower = -plan::kInfinity;
      } else if (type == "BV") {
        c.integer = true;
        c.lower = 0.0;
        c.upper = 1.0;
      } else if (type == "LI") {
        c.integer = true;
        c.lower = value();
      } else if (type == "UI") {
        c.integer = true;
        c.upper = value();
      } else if (type == "FR") {
        c.lower = -plan::kInfinity;
        c.upper = plan::kInfinity;
      } else {
        fail("unknown bound type '" + type + "'");
      }
    } else {
      fail("data outside a section");
    }
  }
  if (!ended) throw Error(ErrorCode::kMalformedRow, "MPS file has no ENDATA");
  return m;
}

MpsModel read_mps(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return read_mps(in);
}

std::vector<std::string> compare_structure(const PlanModel& model, const MpsModel& mps) {
  std::vector<std::string> diff;
  const auto& vars = model.variables();
  const auto& rows = model.constraints();
  if (!mps.minimize) diff.push_back("objective sense is not MIN");
  if (mps.columns.size() != vars.size()) {
    diff.push_back("column count " + std::to_string(mps.columns.size()) + " vs " +
                   std::to_string(vars.size()));
  }
  if (mps.rows.size() != rows.size()) {
    diff.push_back("row count " + std::to_string(mps.rows.size()) + " vs " +
                   std::to_string(rows.size()));
  }
  if (!diff.empty()) return diff;

  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const auto& p = mps.rows[i];
    if (p.name != r.name) diff.push_back("row " + std::to_string(i) + " named " + p.name);
    if (p.type != sense_code(r.sense)) diff.push_back("row " + r.name + " sense");
    if (p.rhs != r.rhs) diff.push_back("row " + r.name + " rhs");
  }
  // Expected entries per column, in row order.
  std::vector<std::vector<std::pair<std::size_t, double>>> by_column(vars.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& t : rows[i].terms) by_column[t.var].emplace_back(i, t.coef);
  }
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const auto& v = vars[j];
    const auto& c = mps.columns[j];
    if (c.name != v.name) diff.push_back("column " + std::to_string(j) + " named " + c.name);
    if (c.integer != (v.kind != plan::VarKind::kContinuous)) {
      diff.push_back("column " + v.name + " integrality");
    }
    if (c.lower != v.lower || c.upper != v.upper) diff.push_back("column " + v.name + " bounds");
    if (c.cost != model.objective()[j]) diff.push_back("column " + v.name + " cost");
    if (c.entries != by_column[j]) diff.push_back("column " + v.name + " coefficients");
  }
  return diff;
}

}  // namespace vaxsite::solve
