#include "gridflex/lp.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace gridflex {

const char* var_kind_prefix(VarKind kind) {
  switch (kind) {
    case VarKind::Angle: return "ang";
    case VarKind::Flow: return "flow";
    case VarKind::SubImport: return "sub";
    case VarKind::Gen: return "gen";
    case VarKind::PvCurt: return "curt";
    case VarKind::Charge: return "chg";
    case VarKind::Discharge: return "dchg";
    case VarKind::Soc: return "soc";
    case VarKind::Switch: return "sw";
    case VarKind::ChargeOn: return "con";
    case VarKind::DischargeOn: return "don";
    case VarKind::PatternWeight: return "mix";
    case VarKind::Generic: return "x";
  }
  return "x";
}

std::string VariableDef::name() const {
  if (!raw_name.empty()) return raw_name;
  std::string n = var_kind_prefix(kind);
  n += '_';
  n += std::to_string(entity);
  n += '_';
  n += std::to_string(hour);
  return n;
}

int MilpProblem::add_var(VariableDef v) {
  vars.push_back(std::move(v));
  objective.push_back(0.0);
  return static_cast<int>(vars.size()) - 1;
}

void MilpProblem::add_constraint(LinearConstraint c) { cons.push_back(std::move(c)); }

std::vector<int> MilpProblem::integral_vars() const {
  std::vector<int> out;
  for (std::size_t j = 0; j < vars.size(); ++j) {
    if (vars[j].integral) out.push_back(static_cast<int>(j));
  }
  return out;
}

void MilpProblem::check_consistent() const {
  if (objective.size() != vars.size()) {
    throw std::logic_error("problem: objective size differs from variable count");
  }
  const int n = static_cast<int>(vars.size());
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const VariableDef& v = vars[j];
    if (std::isnan(v.lb) || std::isnan(v.ub) || v.lb > v.ub) {
      throw std::logic_error("variable " + v.name() + ": bad bounds");
    }
    if (v.integral && (!std::isfinite(v.lb) || !std::isfinite(v.ub))) {
      throw std::logic_error("variable " + v.name() + ": integral variables need finite bounds");
    }
    if (!std::isfinite(objective[j])) {
      throw std::logic_error("variable " + v.name() + ": objective coefficient is not finite");
    }
  }
  for (const LinearConstraint& c : cons) {
    if (!std::isfinite(c.rhs)) throw std::logic_error("constraint " + c.tag + ": rhs not finite");
    for (const LinearTerm& t : c.terms) {
      if (t.var < 0 || t.var >= n) {
        throw std::logic_error("constraint " + c.tag + ": variable index out of range");
      }
      if (!std::isfinite(t.coeff)) {
        throw std::logic_error("constraint " + c.tag + ": coefficient not finite");
      }
    }
  }
}

namespace {

std::map<int, double> combined_terms(const LinearConstraint& c) {
  std::map<int, double> m;
  for (const LinearTerm& t : c.terms) m[t.var] += t.coeff;
  for (auto it = m.begin(); it != m.end();) {
    it = (it->second == 0.0) ? m.erase(it) : std::next(it);
  }
  return m;
}

bool close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

bool problems_equal(const MilpProblem& a, const MilpProblem& b, double tol) {
  if (a.vars.size() != b.vars.size() || a.cons.size() != b.cons.size()) return false;
  for (std::size_t j = 0; j < a.vars.size(); ++j) {
    const VariableDef& va = a.vars[j];
    const VariableDef& vb = b.vars[j];
    if (va.name() != vb.name() || va.integral != vb.integral) return false;
    // Infinite bounds must match by sign; finite ones within tol.
    auto bounds_match = [&](double x, double y) {
      if (std::isinf(x) || std::isinf(y)) return x == y;
      return close(x, y, tol);
    };
    if (!bounds_match(va.lb, vb.lb) || !bounds_match(va.ub, vb.ub)) return false;
    if (!close(a.objective[j], b.objective[j], tol)) return false;
  }
  for (std::size_t i = 0; i < a.cons.size(); ++i) {
    const LinearConstraint& ca = a.cons[i];
    const LinearConstraint& cb = b.cons[i];
    if (ca.rel != cb.rel || !close(ca.rhs, cb.rhs, tol)) return false;
    auto ma = combined_terms(ca);
    auto mb = combined_terms(cb);
    if (ma.size() != mb.size()) return false;
    for (const auto& [var, coeff] : ma) {
      auto it = mb.find(var);
      if (it == mb.end() || !close(coeff, it->second, tol)) return false;
    }
  }
  return true;
}

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration_limit";
    case LpStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

}  // namespace gridflex
