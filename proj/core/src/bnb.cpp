#include "gridflex/bnb.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <optional>
#include <queue>

#include "gridflex/simplex.hpp"

namespace gridflex {
namespace {

struct Decision {
  int var;
  double lo, hi;
  std::shared_ptr<const Decision> parent;
};

struct Node {
  double bound = -kInf;
  int depth = 0;
  long id = 0;
  std::shared_ptr<const Decision> decisions;
};

struct NodeOrder {
  // std::priority_queue pops the "largest"; make that the node with the
  // smallest bound, then the greatest depth, then the smallest id.
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id > b.id;
  }
};

}  // namespace

const char* to_string(BnbStatus s) {
  switch (s) {
    case BnbStatus::Optimal: return "optimal";
    case BnbStatus::Infeasible: return "infeasible";
    case BnbStatus::LimitReached: return "limit_reached";
    case BnbStatus::Error: return "error";
  }
  return "unknown";
}

BnbResult branch_and_bound(const MilpProblem& prob, const SolverConfig& cfg,
                           const BnbCallbacks& callbacks) {
  BnbResult res;
  const std::size_t n = prob.vars.size();
  const std::vector<int> integrals = prob.integral_vars();

  LpEngine engine(prob, cfg);
  // heuristic side solves run on their own engine: pinning a whole proposal
  // would trash the node engine's warm basis both ways
  std::optional<LpEngine> side_engine;
  std::vector<double> root_lb(n), root_ub(n);
  for (std::size_t j = 0; j < n; ++j) {
    root_lb[j] = prob.vars[j].lb;
    root_ub[j] = prob.vars[j].ub;
  }

  std::priority_queue<Node, std::vector<Node>, NodeOrder> queue;
  long next_id = 0;
  queue.push(Node{-kInf, 0, next_id++, nullptr});

  bool have_incumbent = false;
  double inc_obj = kInf;
  std::vector<double> inc_x;
  std::vector<int> inc_key;

  auto tie_tol = [&]() { return 1e-9 * (1.0 + std::abs(inc_obj)); };
  auto cutoff = [&]() { return have_incumbent ? inc_obj - tie_tol() : kInf; };

  auto accept_incumbent = [&](double obj, std::vector<double> snapped) {
    bool take = false;
    if (!have_incumbent || obj < inc_obj - tie_tol()) {
      take = true;
    } else if (obj <= inc_obj + tie_tol() && callbacks.tie_break_key) {
      std::vector<int> key = callbacks.tie_break_key(snapped);
      if (key < inc_key) take = true;
    }
    if (!take) return;
    have_incumbent = true;
    inc_obj = std::min(inc_obj, obj);
    inc_x = std::move(snapped);
    inc_key = callbacks.tie_break_key ? callbacks.tie_break_key(inc_x) : std::vector<int>{};
  };

  std::vector<double> lb(n), ub(n);
  std::vector<double> heur_lb, heur_ub;
  std::vector<long> stamp(n, -1);

  const auto started = std::chrono::steady_clock::now();
  auto out_of_time = [&]() {
    if (cfg.time_limit_s <= 0.0) return false;
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
    return elapsed.count() >= cfg.time_limit_s;
  };

  auto finish = [&](BnbStatus status, std::string message, double open_bound) {
    res.status = status;
    res.message = std::move(message);
    res.has_solution = have_incumbent;
    if (have_incumbent) {
      res.x = inc_x;
      res.objective = inc_obj;
    }
    res.best_bound = have_incumbent ? std::min(inc_obj, open_bound) : open_bound;
    if (status == BnbStatus::Optimal) res.best_bound = inc_obj;
    res.gap_open = have_incumbent && status == BnbStatus::LimitReached
                       ? inc_obj - res.best_bound
                       : 0.0;
    return res;
  };

  auto open_bound = [&](const Node& current) {
    // smallest bound still outstanding, including the node in hand
    double b = current.bound;
    if (!queue.empty()) b = std::min(b, queue.top().bound);
    return b;
  };

  while (!queue.empty()) {
    Node node = queue.top();
    queue.pop();
    if (node.bound >= cutoff()) continue;

    if (res.nodes >= cfg.node_limit || res.lp_iterations >= cfg.iteration_limit ||
        out_of_time()) {
      return finish(BnbStatus::LimitReached, "search stopped at configured limit",
                    open_bound(node));
    }

    // materialize this node's bounds: root bounds plus its decision chain,
    // leafmost decision winning per variable
    lb = root_lb;
    ub = root_ub;
    for (const Decision* d = node.decisions.get(); d; d = d->parent.get()) {
      if (stamp[d->var] == node.id) continue;
      stamp[d->var] = node.id;
      lb[d->var] = d->lo;
      ub[d->var] = d->hi;
    }

    LpSolution sol = engine.solve(lb, ub);
    ++res.nodes;
    res.lp_iterations += sol.iterations;

    if (sol.status == LpStatus::Infeasible) continue;
    if (sol.status == LpStatus::Unbounded) {
      return finish(BnbStatus::Error, "relaxation is unbounded", -kInf);
    }
    if (sol.status == LpStatus::IterationLimit) {
      return finish(BnbStatus::LimitReached, "simplex iteration limit reached",
                    open_bound(node));
    }
    if (sol.status != LpStatus::Optimal) {
      return finish(BnbStatus::Error, "relaxation failed numerically", open_bound(node));
    }
    if (sol.objective >= cutoff()) continue;

    if (callbacks.incumbent_polish) callbacks.incumbent_polish(sol.x, lb, ub);

    if ((!have_incumbent || (res.nodes & 15) == 0) && callbacks.incumbent_heuristic) {
      heur_lb = root_lb;
      heur_ub = root_ub;
      if (callbacks.incumbent_heuristic(sol.x, heur_lb, heur_ub)) {
        if (!side_engine) side_engine.emplace(prob, cfg);
        LpSolution side = side_engine->solve(heur_lb, heur_ub);
        res.lp_iterations += side.iterations;
        if (std::getenv("GF_DBG_HEUR")) {
          std::fprintf(stderr, "[heur] node %ld side status=%s obj=%.6f iters=%ld\n", res.nodes,
                       to_string(side.status), side.objective, side.iterations);
        }
        if (side.status == LpStatus::Optimal) {
          if (callbacks.incumbent_polish) callbacks.incumbent_polish(side.x, heur_lb, heur_ub);
          bool integral = true;
          std::vector<double> snapped = side.x;
          for (int j : integrals) {
            const double r = std::round(snapped[j]);
            if (std::abs(snapped[j] - r) > cfg.int_tol) {
              if (std::getenv("GF_DBG_HEUR")) {
                std::fprintf(stderr, "[heur]   fractional integral var %d = %.9f (%s)\n", j,
                             snapped[j], prob.vars[j].name().c_str());
              }
              integral = false;
              break;
            }
            snapped[j] = std::min(heur_ub[j], std::max(heur_lb[j], r));
          }
          int ignore = -1;
          if (integral && (!callbacks.incumbent_filter ||
                           callbacks.incumbent_filter(snapped, heur_lb, heur_ub, &ignore))) {
            accept_incumbent(side.objective, std::move(snapped));
            if (std::getenv("GF_DBG_HEUR")) std::fprintf(stderr, "[heur]   accepted\n");
          } else if (std::getenv("GF_DBG_HEUR")) {
            std::fprintf(stderr, "[heur]   rejected (integral=%d)\n", integral ? 1 : 0);
          }
        }
      }
      // a fresh incumbent may already cover the node in hand
      if (sol.objective >= cutoff()) continue;
    }

    // branch choice: smallest caller rank first, then the variable the
    // relaxation pushes hardest above its floor, index breaking ties; without
    // ranks plain most-fractional
    const bool ranked = callbacks.branch_priority.size() == n;
    int branch_var = -1;
    int best_rank = 0;
    double best_score = -kInf;
    for (int j : integrals) {
      const double v = sol.x[j];
      if (std::abs(v - std::round(v)) <= cfg.int_tol) continue;
      const int rank = ranked ? callbacks.branch_priority[j] : 0;
      const double score = ranked ? v - std::floor(v) : std::abs(v - std::round(v));
      if (branch_var >= 0 && (rank > best_rank ||
                              (rank == best_rank && score <= best_score + 1e-12))) {
        continue;
      }
      best_rank = rank;
      best_score = score;
      branch_var = j;
    }

    if (branch_var < 0) {
      // integral candidate
      if (callbacks.incumbent_filter) {
        int suggested = -1;
        if (!callbacks.incumbent_filter(sol.x, lb, ub, &suggested)) {
          int bv = -1;
          if (suggested >= 0 && suggested < static_cast<int>(n) &&
              prob.vars[suggested].integral && lb[suggested] < ub[suggested]) {
            bv = suggested;
          } else {
            for (int j : integrals) {
              if (lb[j] < ub[j]) {
                bv = j;
                break;
              }
            }
          }
          if (bv < 0) continue;  // everything fixed, nothing to split
          // split [lb, ub] into [lb, lb] and [lb+1, ub]; for a binary this
          // is the plain 0/1 dichotomy, and either way one child pins bv
          auto fix_lo =
              std::make_shared<Decision>(Decision{bv, lb[bv], lb[bv], node.decisions});
          auto fix_hi =
              std::make_shared<Decision>(Decision{bv, lb[bv] + 1.0, ub[bv], node.decisions});
          queue.push(Node{sol.objective, node.depth + 1, next_id++, fix_lo});
          queue.push(Node{sol.objective, node.depth + 1, next_id++, fix_hi});
          continue;
        }
      }
      std::vector<double> snapped = sol.x;
      for (int j : integrals) {
        snapped[j] = std::min(ub[j], std::max(lb[j], std::round(snapped[j])));
      }
      accept_incumbent(sol.objective, std::move(snapped));
      continue;
    }

    if (callbacks.custom_branch) {
      const auto kids = callbacks.custom_branch(sol.x, lb, ub);
      if (kids) {
        // an empty list prunes: the callback certified no completion exists
        for (const std::vector<BranchPin>& pins : *kids) {
          std::shared_ptr<Decision> chain = node.decisions;
          for (const BranchPin& p : pins) {
            chain = std::make_shared<Decision>(Decision{p.var, p.lo, p.hi, chain});
          }
          queue.push(Node{sol.objective, node.depth + 1, next_id++, chain});
        }
        continue;
      }
    }

    const double v = sol.x[branch_var];
    auto down = std::make_shared<Decision>(
        Decision{branch_var, lb[branch_var], std::floor(v), node.decisions});
    auto up = std::make_shared<Decision>(
        Decision{branch_var, std::ceil(v), ub[branch_var], node.decisions});
    // the child on the relaxation's side of the split gets the smaller id, so
    // equal bounds break toward it and dives follow the relaxation
    if (v - std::floor(v) >= 0.5) {
      queue.push(Node{sol.objective, node.depth + 1, next_id++, up});
      queue.push(Node{sol.objective, node.depth + 1, next_id++, down});
    } else {
      queue.push(Node{sol.objective, node.depth + 1, next_id++, down});
      queue.push(Node{sol.objective, node.depth + 1, next_id++, up});
    }
  }

  if (have_incumbent) return finish(BnbStatus::Optimal, "", inc_obj);
  return finish(BnbStatus::Infeasible, "no feasible assignment of the binaries", kInf);
}

}  // namespace gridflex
