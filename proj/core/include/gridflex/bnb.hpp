// Best-first branch and bound over the LP relaxation solved by LpEngine.
//
// Branching is most-fractional with smallest-index tie break. Children carry
// the parent LP objective as their queue priority, and among equal bounds the
// deeper, then smaller-id node pops first, so fresh children are explored in
// a plunging order that keeps the warm basis close.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gridflex/lp.hpp"

namespace gridflex {

enum class BnbStatus { Optimal, Infeasible, LimitReached, Error };
const char* to_string(BnbStatus s);

// Called on an integral candidate before it may become the incumbent. Return
// false to refuse it (constraints kept out of the LP, e.g. radiality). A
// refused candidate's node is branched on *suggested_branch when set to an
// unfixed integral variable, else on the smallest-index unfixed one; with
// every integral variable fixed the node is discarded.
using IncumbentFilter = std::function<bool(const std::vector<double>& x,
                                           const std::vector<double>& lb,
                                           const std::vector<double>& ub,
                                           int* suggested_branch)>;

// May adjust an LP-optimal point in place before the integrality test, e.g.
// snapping zero-cost indicator variables. Must preserve the objective value
// and LP feasibility under the given node bounds.
using IncumbentPolish = std::function<void(std::vector<double>& x,
                                           const std::vector<double>& lb,
                                           const std::vector<double>& ub)>;

// Orders incumbents whose objectives tie within tolerance; smaller key wins.
using TieBreakKey = std::function<std::vector<int>(const std::vector<double>& x)>;

// Proposes bounds that pin the integral structure to a candidate near the
// given relaxation point, e.g. a fractional switch pattern repaired into a
// radial one. lb and ub arrive as the root bounds; tighten them in place and
// return true to have the proposal solved as a side LP and offered to the
// incumbent test. A proposal never prunes anything by itself: the side
// solution still has to pass the integrality test and the incumbent filter.
// Until a first incumbent exists the cutoff prunes nothing, so the search
// invokes this at every node to buy an early bound.
using IncumbentHeuristic = std::function<bool(const std::vector<double>& x,
                                              std::vector<double>& lb,
                                              std::vector<double>& ub)>;

// One bound pin a custom branch applies on top of its parent node.
struct BranchPin {
  int var = -1;
  double lo = 0.0;
  double hi = 0.0;
};

// Splits a fractional node into caller-defined children, each a set of pins
// applied together (e.g. one whole switch pattern for one hour). Children
// must partition the node's integral solutions or the search turns into a
// heuristic. Return std::nullopt to decline and fall back to single-variable
// branching; an empty list prunes the node as having no completion. Children
// are explored in the returned order when bounds tie, so put the relaxation's
// preferred candidate first.
using CustomBranch = std::function<std::optional<std::vector<std::vector<BranchPin>>>(
    const std::vector<double>& x, const std::vector<double>& lb,
    const std::vector<double>& ub)>;

struct BnbCallbacks {
  IncumbentFilter incumbent_filter;
  IncumbentPolish incumbent_polish;
  TieBreakKey tie_break_key;
  IncumbentHeuristic incumbent_heuristic;
  CustomBranch custom_branch;
  // Branch order. When sized to the variable count, the branch variable is
  // the fractional integral with the smallest rank, index breaking ties.
  // When the objective is (nearly) separable over hours, hour-major ranks fix
  // early hours first and keep the prefix of the bound exact. Empty falls
  // back to most-fractional.
  std::vector<int> branch_priority;
};

struct BnbResult {
  BnbStatus status = BnbStatus::Error;
  bool has_solution = false;
  std::vector<double> x;  // incumbent with integral variables snapped exactly
  double objective = 0.0;
  double best_bound = -kInf;
  double gap_open = 0.0;  // objective minus best_bound when stopped early
  long nodes = 0;
  long lp_iterations = 0;
  std::string message;
};

BnbResult branch_and_bound(const MilpProblem& prob, const SolverConfig& cfg,
                           const BnbCallbacks& callbacks = {});

}  // namespace gridflex
