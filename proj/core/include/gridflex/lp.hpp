// Problem containers shared by the model builder, the simplex core, the
// branch-and-bound driver, and the MPS round-trip.
//
// Conventions: minimize c'x subject to row relations, with explicit finite
// or infinite variable bounds. Binary variables are modelled as integral
// variables with bounds inside [0,1].
#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace gridflex {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind {
  Angle,
  Flow,
  SubImport,
  Gen,
  PvCurt,
  Charge,
  Discharge,
  Soc,
  Switch,       // line closed indicator
  ChargeOn,     // BESS charging indicator
  DischargeOn,
  PatternWeight,  // convex weight of one radial switch pattern
  Generic,
};

const char* var_kind_prefix(VarKind kind);

struct VariableDef {
  VarKind kind = VarKind::Generic;
  int entity = 0;  // bus/line/unit id, 0 when not applicable
  int hour = 0;    // 1-based, 0 when not applicable
  double lb = 0.0;
  double ub = kInf;
  bool integral = false;
  std::string raw_name;  // overrides the derived name when nonempty

  std::string name() const;
};

enum class Relation { Le, Eq, Ge };

struct LinearTerm {
  int var = 0;  // index into MilpProblem::vars
  double coeff = 0.0;
};

struct LinearConstraint {
  std::vector<LinearTerm> terms;
  Relation rel = Relation::Eq;
  double rhs = 0.0;
  std::string tag;  // diagnostic label, e.g. "balance[n3,t12]"
};

struct MilpProblem {
  std::vector<VariableDef> vars;
  std::vector<LinearConstraint> cons;
  std::vector<double> objective;  // aligned with vars
  double big_m = 0.0;             // informational; encoded in constraint data

  int add_var(VariableDef v);
  void add_constraint(LinearConstraint c);
  std::size_t num_vars() const { return vars.size(); }
  std::size_t num_cons() const { return cons.size(); }
  std::vector<int> integral_vars() const;

  // Structural sanity: objective aligned, term indices in range, bounds
  // ordered, integral bounds inside a finite window. Throws
  // std::logic_error on the first failure.
  void check_consistent() const;
};

// True when a and b describe the same optimisation problem: same variables
// (name, bounds, integrality), same objective, and the same constraints up
// to term order. big_m metadata is ignored.
bool problems_equal(const MilpProblem& a, const MilpProblem& b, double tol = 1e-9);

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit, NumericalFailure };

const char* to_string(LpStatus s);

struct LpSolution {
  LpStatus status = LpStatus::NumericalFailure;
  double objective = 0.0;
  std::vector<double> x;
  long iterations = 0;
};

enum class BessBinaryMode { Exact, Relaxed };
enum class BranchingRule { MostFractional };
enum class SolverBackend { BranchAndBound, Enumeration };

struct SolverConfig {
  double big_m_override = 0.0;  // 0 keeps the model-derived value
  double feas_tol = 1e-7;
  double int_tol = 1e-6;
  BessBinaryMode bess_binaries = BessBinaryMode::Exact;
  long node_limit = 2'000'000;
  long iteration_limit = 50'000'000;
  BranchingRule branching = BranchingRule::MostFractional;
  double time_limit_s = 0.0;  // 0 means no limit
  SolverBackend solver = SolverBackend::BranchAndBound;
  int hours = 0;  // 0: keep the instance horizon; 1..24: solve that many leading hours
  int enumeration_cap = 12;
};

}  // namespace gridflex
