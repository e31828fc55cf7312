// Bounded-variable primal simplex with an explicit dense basis inverse,
// plus a block-decomposing engine that keeps per-block bases alive across
// repeated solves with changed bounds (the branch-and-bound warm start).
//
// The core solves  min c'x  s.t. row relations, lb <= x <= ub  after adding
// one slack per row. Phase 1 is composite: infeasible basic variables get
// unit penalty costs and the ratio test stops at the first kink, so the
// all-slack start never needs a full factorization on the normal path.
#pragma once

#include <map>
#include <memory>
#include <vector>

#include "gridflex/lp.hpp"

namespace gridflex {

class BoundedSimplex {
 public:
  // Captures structure (rows, coefficients, relations, rhs, objective).
  // Bounds are supplied per solve via set_bounds and may change freely; the
  // basis from the previous solve is reused when still well defined.
  BoundedSimplex(int num_structural, const std::vector<LinearConstraint>& cons,
                 std::vector<double> objective, double feas_tol = 1e-7);

  void set_bounds(std::vector<double> lb, std::vector<double> ub);

  // iteration_limit caps pivots for this call only.
  LpSolution solve(long iteration_limit);

  void reset_basis();  // back to the all-slack cold start

  int rows() const { return m_; }
  int structural_columns() const { return n_; }

 private:
  enum class VStat : unsigned char { Basic, AtLower, AtUpper, FreeZero };

  double nonbasic_value(int j) const;
  void ensure_basis();
  void compute_xb();
  bool reinvert();  // false when the stored basis was singular (then reset)
  double bound_tol(double bound) const;
  void classify_phase();
  void build_duals();
  int price(double* best_d, int* direction) const;
  double* binv_row(int p) { return binv_.data() + static_cast<std::size_t>(p) * m_; }
  const double* binv_row(int p) const { return binv_.data() + static_cast<std::size_t>(p) * m_; }

  // structure
  int n_ = 0;
  int m_ = 0;
  std::vector<std::vector<LinearTerm>> cols_;  // structural sparse columns
  std::vector<double> rhs_;
  std::vector<double> obj_;
  double feas_tol_ = 1e-7;
  double rhs_scale_ = 1.0;

  // bounds over structural + slack columns
  std::vector<double> lb_, ub_;

  // basis state
  std::vector<int> basis_;       // column basic in each row position
  std::vector<int> pos_;         // row position per column, -1 when nonbasic
  std::vector<VStat> vstat_;
  std::vector<double> binv_;     // row-major m_ x m_
  std::vector<double> xb_;
  bool state_valid_ = false;

  // scratch reused across iterations
  std::vector<double> y_;
  std::vector<double> w_;
  std::vector<double> cb_;
  bool phase1_ = false;
  bool bland_ = false;
  double infeasibility_ = 0.0;
};

// Splits a problem into independent blocks (variables linked by shared
// constraints), keeps one BoundedSimplex per block, and caches block
// solutions by their exact bound vectors. The problem must outlive the
// engine.
class LpEngine {
 public:
  LpEngine(const MilpProblem& prob, SolverConfig cfg);

  LpEngine(const LpEngine&) = delete;
  LpEngine& operator=(const LpEngine&) = delete;

  // lb/ub are full-length bound vectors aligned with prob.vars.
  LpSolution solve(const std::vector<double>& lb, const std::vector<double>& ub);

  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  long total_iterations() const { return total_iterations_; }

 private:
  struct BlockSolution {
    LpStatus status = LpStatus::NumericalFailure;
    double objective = 0.0;
    std::vector<double> x;
  };
  struct Block {
    std::vector<int> vars;  // global variable indices, ascending
    std::vector<int> cons;  // global constraint indices, ascending
    std::unique_ptr<BoundedSimplex> simplex;
    bool cache_enabled = false;
    std::map<std::vector<double>, BlockSolution> cache;
  };

  const MilpProblem& prob_;
  SolverConfig cfg_;
  std::vector<Block> blocks_;
  std::vector<int> pseudo_;        // variables in no constraint
  std::vector<int> trivial_cons_;  // constraints with no terms
  long total_iterations_ = 0;
};

// One-shot convenience: engine + solve at the problem's own bounds.
LpSolution solve_lp(const MilpProblem& prob, const SolverConfig& cfg = {});

}  // namespace gridflex
