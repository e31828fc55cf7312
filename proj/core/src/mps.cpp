#include "gridflex/mps.hpp"

#include <cstdio>
#include <map>
#include <sstream>
#include <vector>

#include "gridflex/network.hpp"

namespace gridflex {
namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string f;
  while (in >> f) out.push_back(std::move(f));
  return out;
}

double parse_number(const std::string& s, int line_no) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ParseError("mps line " + std::to_string(line_no) + ": '" + s + "' is not a number");
  }
}

}  // namespace

std::string to_mps(const MilpProblem& prob, const std::string& name) {
  prob.check_consistent();
  std::ostringstream out;
  out << "NAME " << name << "\n";
  out << "ROWS\n";
  out << " N obj\n";
  for (std::size_t i = 0; i < prob.cons.size(); ++i) {
    const char rel = prob.cons[i].rel == Relation::Le   ? 'L'
                     : prob.cons[i].rel == Relation::Ge ? 'G'
                                                        : 'E';
    out << ' ' << rel << " r" << i << "\n";
  }

  // column-major view, duplicates combined
  std::vector<std::map<int, double>> col_rows(prob.vars.size());
  for (std::size_t i = 0; i < prob.cons.size(); ++i) {
    for (const LinearTerm& t : prob.cons[i].terms) {
      col_rows[t.var][static_cast<int>(i)] += t.coeff;
    }
  }

  out << "COLUMNS\n";
  bool in_integer = false;
  int marker = 0;
  for (std::size_t j = 0; j < prob.vars.size(); ++j) {
    if (prob.vars[j].integral != in_integer) {
      out << "    M" << marker++ << " 'MARKER' " << (in_integer ? "'INTEND'" : "'INTORG'")
          << "\n";
      in_integer = prob.vars[j].integral;
    }
    const std::string col = prob.vars[j].name();
    bool wrote = false;
    if (prob.objective[j] != 0.0) {
      out << "    " << col << " obj " << fmt(prob.objective[j]) << "\n";
      wrote = true;
    }
    for (const auto& [row, coeff] : col_rows[j]) {
      if (coeff == 0.0) continue;
      out << "    " << col << " r" << row << ' ' << fmt(coeff) << "\n";
      wrote = true;
    }
    if (!wrote) out << "    " << col << " obj 0\n";  // keep empty columns alive
  }
  if (in_integer) out << "    M" << marker++ << " 'MARKER' 'INTEND'\n";

  out << "RHS\n";
  for (std::size_t i = 0; i < prob.cons.size(); ++i) {
    if (prob.cons[i].rhs != 0.0) out << "    rhs r" << i << ' ' << fmt(prob.cons[i].rhs) << "\n";
  }

  out << "BOUNDS\n";
  for (std::size_t j = 0; j < prob.vars.size(); ++j) {
    const VariableDef& v = prob.vars[j];
    const std::string col = v.name();
    if (v.lb == v.ub) {
      out << " FX bnd " << col << ' ' << fmt(v.lb) << "\n";
      continue;
    }
    if (std::isinf(v.lb) && std::isinf(v.ub)) {
      out << " FR bnd " << col << "\n";
      continue;
    }
    if (std::isinf(v.lb)) {
      out << " MI bnd " << col << "\n";
    } else {
      out << " LO bnd " << col << ' ' << fmt(v.lb) << "\n";
    }
    if (!std::isinf(v.ub)) out << " UP bnd " << col << ' ' << fmt(v.ub) << "\n";
  }
  out << "ENDATA\n";
  return out.str();
}

MilpProblem parse_mps(const std::string& text) {
  MilpProblem prob;
  std::map<std::string, int> row_index;   // constraint rows only
  std::string obj_row;
  std::map<std::string, int> var_index;
  bool in_integer = false;
  enum class Section { None, Rows, Columns, Rhs, Bounds, Done };
  Section section = Section::None;

  auto var_of = [&](const std::string& name) {
    auto it = var_index.find(name);
    if (it != var_index.end()) return it->second;
    VariableDef v;
    v.raw_name = name;
    v.integral = in_integer;
    v.lb = 0.0;
    v.ub = kInf;
    const int id = prob.add_var(std::move(v));
    var_index.emplace(name, id);
    return id;
  };

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '*') continue;
    const auto f = fields(line);
    if (f.empty()) continue;

    if (line[0] != ' ' && line[0] != '\t') {
      const std::string& kw = f[0];
      if (kw == "NAME") {
        continue;
      } else if (kw == "ROWS") {
        section = Section::Rows;
      } else if (kw == "COLUMNS") {
        section = Section::Columns;
      } else if (kw == "RHS") {
        section = Section::Rhs;
      } else if (kw == "RANGES") {
        throw ParseError("mps line " + std::to_string(line_no) + ": RANGES is not supported");
      } else if (kw == "BOUNDS") {
        section = Section::Bounds;
      } else if (kw == "ENDATA") {
        section = Section::Done;
        break;
      } else {
        throw ParseError("mps line " + std::to_string(line_no) + ": unknown section '" + kw +
                         "'");
      }
      continue;
    }

    switch (section) {
      case Section::Rows: {
        if (f.size() != 2) {
          throw ParseError("mps line " + std::to_string(line_no) + ": expected 'TYPE name'");
        }
        const std::string& type = f[0];
        if (type == "N") {
          if (obj_row.empty()) obj_row = f[1];  // extra N rows are ignored
          continue;
        }
        Relation rel;
        if (type == "L") rel = Relation::Le;
        else if (type == "G") rel = Relation::Ge;
        else if (type == "E") rel = Relation::Eq;
        else
          throw ParseError("mps line " + std::to_string(line_no) + ": unknown row type '" +
                           type + "'");
        LinearConstraint c;
        c.rel = rel;
        c.tag = f[1];
        row_index.emplace(f[1], static_cast<int>(prob.cons.size()));
        prob.cons.push_back(std::move(c));
        break;
      }
      case Section::Columns: {
        if (f.size() >= 3 && f[1] == "'MARKER'") {
          if (f[2] == "'INTORG'") in_integer = true;
          else if (f[2] == "'INTEND'") in_integer = false;
          else
            throw ParseError("mps line " + std::to_string(line_no) + ": unknown marker");
          continue;
        }
        if (f.size() != 3 && f.size() != 5) {
          throw ParseError("mps line " + std::to_string(line_no) +
                           ": expected 'col row value [row value]'");
        }
        const int var = var_of(f[0]);
        for (std::size_t k = 1; k + 1 < f.size(); k += 2) {
          const double coeff = parse_number(f[k + 1], line_no);
          if (f[k] == obj_row) {
            prob.objective[var] += coeff;
            continue;
          }
          auto it = row_index.find(f[k]);
          if (it == row_index.end()) {
            throw ParseError("mps line " + std::to_string(line_no) + ": unknown row '" + f[k] +
                             "'");
          }
          prob.cons[it->second].terms.push_back({var, coeff});
        }
        break;
      }
      case Section::Rhs: {
        if (f.size() != 3 && f.size() != 5) {
          throw ParseError("mps line " + std::to_string(line_no) +
                           ": expected 'set row value [row value]'");
        }
        for (std::size_t k = 1; k + 1 < f.size(); k += 2) {
          if (f[k] == obj_row) continue;  // objective offsets are not used
          auto it = row_index.find(f[k]);
          if (it == row_index.end()) {
            throw ParseError("mps line " + std::to_string(line_no) + ": unknown row '" + f[k] +
                             "'");
          }
          prob.cons[it->second].rhs = parse_number(f[k + 1], line_no);
        }
        break;
      }
      case Section::Bounds: {
        if (f.size() < 3) {
          throw ParseError("mps line " + std::to_string(line_no) +
                           ": expected 'TYPE set col [value]'");
        }
        const std::string& type = f[0];
        const int var = var_of(f[2]);
        VariableDef& v = prob.vars[var];
        auto value = [&]() {
          if (f.size() < 4) {
            throw ParseError("mps line " + std::to_string(line_no) + ": bound needs a value");
          }
          return parse_number(f[3], line_no);
        };
        if (type == "LO") v.lb = value();
        else if (type == "UP") v.ub = value();
        else if (type == "FX") v.lb = v.ub = value();
        else if (type == "FR") { v.lb = -kInf; v.ub = kInf; }
        else if (type == "MI") v.lb = -kInf;
        else if (type == "PL") v.ub = kInf;
        else if (type == "BV") { v.lb = 0.0; v.ub = 1.0; v.integral = true; }
        else
          throw ParseError("mps line " + std::to_string(line_no) + ": unknown bound type '" +
                           type + "'");
        break;
      }
      case Section::None:
      case Section::Done: {
        throw ParseError("mps line " + std::to_string(line_no) + ": data outside any section");
      }
    }
  }
  if (section != Section::Done) throw ParseError("mps: missing ENDATA");
  prob.check_consistent();
  return prob;
}

}  // namespace gridflex
