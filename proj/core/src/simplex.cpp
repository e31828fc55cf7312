#include "gridflex/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>

namespace gridflex {
namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kDegenerateStep = 1e-10;
constexpr int kBlandTrigger = 64;
constexpr long kRefreshInterval = 256;

void axpy(double* dst, double f, const double* src, int len) {
  for (int i = 0; i < len; ++i) dst[i] += f * src[i];
}

}  // namespace

BoundedSimplex::BoundedSimplex(int num_structural, const std::vector<LinearConstraint>& cons,
                               std::vector<double> objective, double feas_tol)
    : n_(num_structural),
      m_(static_cast<int>(cons.size())),
      obj_(std::move(objective)),
      feas_tol_(feas_tol) {
  if (static_cast<int>(obj_.size()) != n_) {
    throw std::logic_error("simplex: objective length differs from column count");
  }
  cols_.assign(n_, {});
  rhs_.resize(m_);
  lb_.assign(n_ + m_, 0.0);
  ub_.assign(n_ + m_, 0.0);
  for (int i = 0; i < m_; ++i) {
    const LinearConstraint& c = cons[i];
    rhs_[i] = c.rhs;
    rhs_scale_ = std::max(rhs_scale_, std::abs(c.rhs));
    for (const LinearTerm& t : c.terms) {
      if (t.var < 0 || t.var >= n_) throw std::logic_error("simplex: term index out of range");
      if (t.coeff != 0.0) cols_[t.var].push_back({i, t.coeff});
    }
    switch (c.rel) {
      case Relation::Le:
        lb_[n_ + i] = 0.0;
        ub_[n_ + i] = kInf;
        break;
      case Relation::Ge:
        lb_[n_ + i] = -kInf;
        ub_[n_ + i] = 0.0;
        break;
      case Relation::Eq:
        lb_[n_ + i] = 0.0;
        ub_[n_ + i] = 0.0;
        break;
    }
  }
}

void BoundedSimplex::set_bounds(std::vector<double> lb, std::vector<double> ub) {
  if (static_cast<int>(lb.size()) != n_ || static_cast<int>(ub.size()) != n_) {
    throw std::logic_error("simplex: bound vectors must cover the structural columns");
  }
  std::copy(lb.begin(), lb.end(), lb_.begin());
  std::copy(ub.begin(), ub.end(), ub_.begin());
}

double BoundedSimplex::nonbasic_value(int j) const {
  switch (vstat_[j]) {
    case VStat::AtLower: return lb_[j];
    case VStat::AtUpper: return ub_[j];
    case VStat::FreeZero: return 0.0;
    case VStat::Basic: return xb_[pos_[j]];
  }
  return 0.0;
}

void BoundedSimplex::reset_basis() {
  basis_.resize(m_);
  pos_.assign(n_ + m_, -1);
  vstat_.assign(n_ + m_, VStat::AtLower);
  for (int i = 0; i < m_; ++i) {
    basis_[i] = n_ + i;
    pos_[n_ + i] = i;
    vstat_[n_ + i] = VStat::Basic;
  }
  for (int j = 0; j < n_; ++j) {
    if (std::isfinite(lb_[j])) {
      vstat_[j] = VStat::AtLower;
    } else if (std::isfinite(ub_[j])) {
      vstat_[j] = VStat::AtUpper;
    } else {
      vstat_[j] = VStat::FreeZero;
    }
  }
  binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
  for (int i = 0; i < m_; ++i) binv_row(i)[i] = 1.0;
  xb_.assign(m_, 0.0);
  state_valid_ = true;
}

void BoundedSimplex::ensure_basis() {
  if (!state_valid_) {
    reset_basis();
    return;
  }
  // Bounds may have moved since the last solve; repair nonbasic statuses
  // that no longer reference a finite bound.
  for (int j = 0; j < n_ + m_; ++j) {
    switch (vstat_[j]) {
      case VStat::Basic:
        break;
      case VStat::AtLower:
        if (!std::isfinite(lb_[j])) {
          vstat_[j] = std::isfinite(ub_[j]) ? VStat::AtUpper : VStat::FreeZero;
        }
        break;
      case VStat::AtUpper:
        if (!std::isfinite(ub_[j])) {
          vstat_[j] = std::isfinite(lb_[j]) ? VStat::AtLower : VStat::FreeZero;
        }
        break;
      case VStat::FreeZero:
        if (std::isfinite(lb_[j])) {
          vstat_[j] = VStat::AtLower;
        } else if (std::isfinite(ub_[j])) {
          vstat_[j] = VStat::AtUpper;
        }
        break;
    }
  }
}

void BoundedSimplex::compute_xb() {
  std::vector<double> rhs_eff = rhs_;
  for (int j = 0; j < n_; ++j) {
    if (vstat_[j] == VStat::Basic) continue;
    const double v = nonbasic_value(j);
    if (v == 0.0) continue;
    for (const LinearTerm& t : cols_[j]) rhs_eff[t.var] -= t.coeff * v;
  }
  for (int i = 0; i < m_; ++i) {
    const int j = n_ + i;
    if (vstat_[j] == VStat::Basic) continue;
    const double v = nonbasic_value(j);
    if (v != 0.0) rhs_eff[i] -= v;
  }
  xb_.assign(m_, 0.0);
  for (int p = 0; p < m_; ++p) {
    const double* row = binv_row(p);
    double acc = 0.0;
    for (int i = 0; i < m_; ++i) acc += row[i] * rhs_eff[i];
    xb_[p] = acc;
  }
}

bool BoundedSimplex::reinvert() {
  // Rebuild the inverse of the stored basis by Gauss-Jordan with partial
  // pivoting. A singular basis falls back to the all-slack start.
  std::vector<double> b(static_cast<std::size_t>(m_) * m_, 0.0);
  for (int p = 0; p < m_; ++p) {
    const int j = basis_[p];
    if (j < n_) {
      for (const LinearTerm& t : cols_[j]) b[static_cast<std::size_t>(t.var) * m_ + p] += t.coeff;
    } else {
      b[static_cast<std::size_t>(j - n_) * m_ + p] += 1.0;
    }
  }
  binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
  for (int i = 0; i < m_; ++i) binv_row(i)[i] = 1.0;
  for (int k = 0; k < m_; ++k) {
    int pivot_row = -1;
    double best = 1e-11;
    for (int r = k; r < m_; ++r) {
      const double v = std::abs(b[static_cast<std::size_t>(r) * m_ + k]);
      if (v > best) {
        best = v;
        pivot_row = r;
      }
    }
    if (pivot_row < 0) {
      reset_basis();
      return false;
    }
    if (pivot_row != k) {
      for (int c = 0; c < m_; ++c) {
        std::swap(b[static_cast<std::size_t>(k) * m_ + c],
                  b[static_cast<std::size_t>(pivot_row) * m_ + c]);
      }
      for (int c = 0; c < m_; ++c) std::swap(binv_row(k)[c], binv_row(pivot_row)[c]);
    }
    const double inv = 1.0 / b[static_cast<std::size_t>(k) * m_ + k];
    for (int c = 0; c < m_; ++c) b[static_cast<std::size_t>(k) * m_ + c] *= inv;
    for (int c = 0; c < m_; ++c) binv_row(k)[c] *= inv;
    for (int r = 0; r < m_; ++r) {
      if (r == k) continue;
      const double f = b[static_cast<std::size_t>(r) * m_ + k];
      if (f == 0.0) continue;
      axpy(&b[static_cast<std::size_t>(r) * m_], -f, &b[static_cast<std::size_t>(k) * m_], m_);
      axpy(binv_row(r), -f, binv_row(k), m_);
    }
  }
  return true;
}

double BoundedSimplex::bound_tol(double bound) const {
  return feas_tol_ * (1.0 + std::abs(bound));
}

void BoundedSimplex::classify_phase() {
  cb_.assign(m_, 0.0);
  infeasibility_ = 0.0;
  for (int p = 0; p < m_; ++p) {
    const int j = basis_[p];
    const double v = xb_[p];
    if (std::isfinite(lb_[j]) && v < lb_[j] - bound_tol(lb_[j])) {
      cb_[p] = -1.0;
      infeasibility_ += lb_[j] - v;
    } else if (std::isfinite(ub_[j]) && v > ub_[j] + bound_tol(ub_[j])) {
      cb_[p] = 1.0;
      infeasibility_ += v - ub_[j];
    }
  }
  phase1_ = infeasibility_ > 0.0;
}

void BoundedSimplex::build_duals() {
  y_.assign(m_, 0.0);
  if (phase1_) {
    for (int p = 0; p < m_; ++p) {
      if (cb_[p] != 0.0) axpy(y_.data(), cb_[p], binv_row(p), m_);
    }
  } else {
    for (int p = 0; p < m_; ++p) {
      const int j = basis_[p];
      const double c = j < n_ ? obj_[j] : 0.0;
      if (c != 0.0) axpy(y_.data(), c, binv_row(p), m_);
    }
  }
}

int BoundedSimplex::price(double* best_d, int* direction) const {
  int chosen = -1;
  double chosen_mag = kDualTol;
  for (int j = 0; j < n_ + m_; ++j) {
    if (vstat_[j] == VStat::Basic) continue;
    if (lb_[j] == ub_[j] && vstat_[j] != VStat::FreeZero) continue;  // fixed, nothing to gain
    double d;
    if (j < n_) {
      d = phase1_ ? 0.0 : obj_[j];
      for (const LinearTerm& t : cols_[j]) d -= y_[t.var] * t.coeff;
    } else {
      d = -y_[j - n_];
    }
    int dir = 0;
    switch (vstat_[j]) {
      case VStat::AtLower:
        if (d < -kDualTol) dir = 1;
        break;
      case VStat::AtUpper:
        if (d > kDualTol) dir = -1;
        break;
      case VStat::FreeZero:
        if (d < -kDualTol) dir = 1;
        else if (d > kDualTol) dir = -1;
        break;
      case VStat::Basic:
        break;
    }
    if (dir == 0) continue;
    if (bland_) {
      *best_d = d;
      *direction = dir;
      return j;  // smallest improving index
    }
    if (std::abs(d) > chosen_mag) {
      chosen_mag = std::abs(d);
      chosen = j;
      *best_d = d;
      *direction = dir;
    }
  }
  return chosen;
}

LpSolution BoundedSimplex::solve(long iteration_limit) {
  LpSolution out;
  ensure_basis();
  for (int j = 0; j < n_; ++j) {
    if (lb_[j] > ub_[j]) {
      out.status = LpStatus::Infeasible;
      return out;
    }
  }
  compute_xb();

  bland_ = false;
  int degenerate_streak = 0;
  bool reinverted = false;
  long iters = 0;

  auto finish = [&](LpStatus status) {
    out.status = status;
    out.iterations = iters;
    out.x.resize(n_);
    double obj = 0.0;
    for (int j = 0; j < n_; ++j) {
      const double v = vstat_[j] == VStat::Basic ? xb_[pos_[j]] : nonbasic_value(j);
      out.x[j] = v;
      obj += obj_[j] * v;
    }
    out.objective = obj;
    return out;
  };

  auto residual_ok = [&]() {
    std::vector<double> act(m_, 0.0);
    for (int j = 0; j < n_; ++j) {
      const double v = vstat_[j] == VStat::Basic ? xb_[pos_[j]] : nonbasic_value(j);
      if (v == 0.0) continue;
      for (const LinearTerm& t : cols_[j]) act[t.var] += t.coeff * v;
    }
    double worst = 0.0;
    for (int i = 0; i < m_; ++i) {
      const int j = n_ + i;
      const double slack = vstat_[j] == VStat::Basic ? xb_[pos_[j]] : nonbasic_value(j);
      worst = std::max(worst, std::abs(act[i] + slack - rhs_[i]));
    }
    return worst <= feas_tol_ * (1.0 + rhs_scale_);
  };

  while (true) {
    if (iters >= iteration_limit) return finish(LpStatus::IterationLimit);
    classify_phase();
    build_duals();
    double d = 0.0;
    int dir = 0;
    const int enter = price(&d, &dir);
    if (enter < 0) {
      if (phase1_) {
        // Phase-1 optimum with violations left: infeasible, unless the
        // inverse has drifted. One refactorization gets the benefit of the
        // doubt.
        if (!reinverted) {
          reinverted = true;
          reinvert();
          compute_xb();
          continue;
        }
        return finish(LpStatus::Infeasible);
      }
      if (residual_ok()) return finish(LpStatus::Optimal);
      if (!reinverted) {
        reinverted = true;
        reinvert();
        compute_xb();
        continue;
      }
      return finish(LpStatus::NumericalFailure);
    }

    // column of the entering variable through the inverse
    w_.assign(m_, 0.0);
    if (enter < n_) {
      const auto& col = cols_[enter];
      for (int r = 0; r < m_; ++r) {
        const double* row = binv_row(r);
        double acc = 0.0;
        for (const LinearTerm& t : col) acc += row[t.var] * t.coeff;
        w_[r] = acc;
      }
    } else {
      const int i = enter - n_;
      for (int r = 0; r < m_; ++r) w_[r] = binv_row(r)[i];
    }

    // ratio test: the entering variable moves by delta in direction dir
    const double s = static_cast<double>(dir);
    double limit = kInf;
    int limit_row = -1;       // -1 none, -2 bound flip
    bool leave_at_upper = false;
    if (std::isfinite(lb_[enter]) && std::isfinite(ub_[enter])) {
      limit = ub_[enter] - lb_[enter];
      limit_row = -2;
    }
    for (int p = 0; p < m_; ++p) {
      const double wp = w_[p];
      if (std::abs(wp) <= kPivotTol) continue;
      const double g = -s * wp;  // basic value change per unit step
      const int jb = basis_[p];
      const double v = xb_[p];
      const double lo = lb_[jb];
      const double hi = ub_[jb];
      double cand;
      bool at_upper;
      if (phase1_ && cb_[p] < 0.0) {
        // below its lower bound; the first kink is reaching that bound
        if (g <= 0.0) continue;
        cand = (lo - v) / g;
        at_upper = false;
      } else if (phase1_ && cb_[p] > 0.0) {
        if (g >= 0.0) continue;
        cand = (hi - v) / g;
        at_upper = true;
      } else if (g > 0.0) {
        if (!std::isfinite(hi)) continue;
        cand = (hi - v) / g;
        at_upper = true;
      } else {
        if (!std::isfinite(lo)) continue;
        cand = (lo - v) / g;
        at_upper = false;
      }
      if (cand < 0.0) cand = 0.0;  // roundoff already past the bound
      const double tie = 1e-9 * (1.0 + std::min(limit, cand));
      if (cand < limit - tie) {
        limit = cand;
        limit_row = p;
        leave_at_upper = at_upper;
      } else if (cand <= limit + tie && limit_row >= 0) {
        // tie: prefer the stabler (larger) pivot, or Bland's smallest index
        const bool better = bland_ ? jb < basis_[limit_row]
                                   : std::abs(wp) > std::abs(w_[limit_row]);
        if (better) {
          limit = std::min(limit, cand);
          limit_row = p;
          leave_at_upper = at_upper;
        }
      }
    }

    if (!std::isfinite(limit)) {
      if (!phase1_) return finish(LpStatus::Unbounded);
      if (!reinverted) {
        reinverted = true;
        reinvert();
        compute_xb();
        continue;
      }
      return finish(LpStatus::NumericalFailure);
    }

    ++iters;
    const double delta = limit;
    if (delta < kDegenerateStep) {
      if (++degenerate_streak >= kBlandTrigger) bland_ = true;
    } else {
      degenerate_streak = 0;
      bland_ = false;
    }

    if (limit_row == -2) {
      // bound flip, basis unchanged
      for (int p = 0; p < m_; ++p) xb_[p] -= s * delta * w_[p];
      vstat_[enter] = vstat_[enter] == VStat::AtUpper ? VStat::AtLower : VStat::AtUpper;
    } else {
      const int p = limit_row;
      const int leave = basis_[p];
      const double enter_value = nonbasic_value(enter) + s * delta;
      for (int r = 0; r < m_; ++r) {
        if (r != p) xb_[r] -= s * delta * w_[r];
      }
      xb_[p] = enter_value;
      vstat_[leave] = leave_at_upper ? VStat::AtUpper : VStat::AtLower;
      pos_[leave] = -1;
      basis_[p] = enter;
      pos_[enter] = p;
      vstat_[enter] = VStat::Basic;

      const double pivot = w_[p];
      double* rp = binv_row(p);
      const double inv = 1.0 / pivot;
      for (int c = 0; c < m_; ++c) rp[c] *= inv;
      for (int r = 0; r < m_; ++r) {
        if (r == p) continue;
        const double f = w_[r];
        if (f != 0.0) axpy(binv_row(r), -f, rp, m_);
      }
    }

    if (iters % kRefreshInterval == 0) compute_xb();
  }
}

LpEngine::LpEngine(const MilpProblem& prob, SolverConfig cfg) : prob_(prob), cfg_(cfg) {
  prob.check_consistent();
  const int n = static_cast<int>(prob.vars.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<int> scratch;
  auto find = [&parent, &scratch](int a) {
    scratch.clear();
    while (parent[a] != a) {
      scratch.push_back(a);
      a = parent[a];
    }
    for (int v : scratch) parent[v] = a;
    return a;
  };

  std::vector<char> in_constraint(n, 0);
  for (std::size_t i = 0; i < prob.cons.size(); ++i) {
    const auto& terms = prob.cons[i].terms;
    if (terms.empty()) {
      trivial_cons_.push_back(static_cast<int>(i));
      continue;
    }
    const int first = terms.front().var;
    in_constraint[first] = 1;
    for (const LinearTerm& t : terms) {
      in_constraint[t.var] = 1;
      const int ra = find(first);
      const int rb = find(t.var);
      if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
    }
  }

  std::map<int, int> root_to_block;
  for (std::size_t i = 0; i < prob.cons.size(); ++i) {
    if (prob.cons[i].terms.empty()) continue;
    const int root = find(prob.cons[i].terms.front().var);
    auto [it, fresh] = root_to_block.try_emplace(root, static_cast<int>(blocks_.size()));
    if (fresh) blocks_.emplace_back();
    blocks_[it->second].cons.push_back(static_cast<int>(i));
  }
  for (int j = 0; j < n; ++j) {
    if (!in_constraint[j]) {
      pseudo_.push_back(j);
    } else {
      blocks_[root_to_block.at(find(j))].vars.push_back(j);
    }
  }

  std::vector<int> global_to_local(n, -1);
  for (Block& block : blocks_) {
    for (std::size_t k = 0; k < block.vars.size(); ++k) global_to_local[block.vars[k]] = static_cast<int>(k);
    std::vector<LinearConstraint> local_cons;
    local_cons.reserve(block.cons.size());
    for (int ci : block.cons) {
      LinearConstraint c = prob.cons[ci];
      for (LinearTerm& t : c.terms) t.var = global_to_local[t.var];
      local_cons.push_back(std::move(c));
    }
    std::vector<double> local_obj(block.vars.size());
    for (std::size_t k = 0; k < block.vars.size(); ++k) local_obj[k] = prob.objective[block.vars[k]];
    block.simplex = std::make_unique<BoundedSimplex>(static_cast<int>(block.vars.size()),
                                                     local_cons, std::move(local_obj),
                                                     cfg_.feas_tol);
    block.cache_enabled = block.vars.size() <= 256;
  }
}

LpSolution LpEngine::solve(const std::vector<double>& lb, const std::vector<double>& ub) {
  const std::size_t n = prob_.vars.size();
  if (lb.size() != n || ub.size() != n) {
    throw std::logic_error("engine: bound vectors must cover all variables");
  }
  LpSolution out;
  out.status = LpStatus::Optimal;
  out.x.assign(n, 0.0);

  for (std::size_t j = 0; j < n; ++j) {
    if (lb[j] > ub[j]) {
      out.status = LpStatus::Infeasible;
      return out;
    }
  }
  for (int ci : trivial_cons_) {
    const LinearConstraint& c = prob_.cons[ci];
    const double tol = cfg_.feas_tol * (1.0 + std::abs(c.rhs));
    const bool ok = c.rel == Relation::Le   ? 0.0 <= c.rhs + tol
                    : c.rel == Relation::Ge ? 0.0 >= c.rhs - tol
                                            : std::abs(c.rhs) <= tol;
    if (!ok) {
      out.status = LpStatus::Infeasible;
      return out;
    }
  }

  for (int j : pseudo_) {
    const double c = prob_.objective[j];
    double v;
    if (c > 0.0) {
      if (!std::isfinite(lb[j])) {
        out.status = LpStatus::Unbounded;
        return out;
      }
      v = lb[j];
    } else if (c < 0.0) {
      if (!std::isfinite(ub[j])) {
        out.status = LpStatus::Unbounded;
        return out;
      }
      v = ub[j];
    } else {
      v = std::min(std::max(0.0, lb[j]), ub[j]);
    }
    out.x[j] = v;
    out.objective += c * v;
  }

  for (Block& block : blocks_) {
    std::vector<double> key;
    if (block.cache_enabled) {
      key.reserve(block.vars.size() * 2);
      for (int g : block.vars) key.push_back(lb[g]);
      for (int g : block.vars) key.push_back(ub[g]);
      auto it = block.cache.find(key);
      if (it != block.cache.end()) {
        const BlockSolution& cached = it->second;
        if (cached.status != LpStatus::Optimal) {
          out.status = cached.status;
          return out;
        }
        for (std::size_t k = 0; k < block.vars.size(); ++k) out.x[block.vars[k]] = cached.x[k];
        out.objective += cached.objective;
        continue;
      }
    }

    std::vector<double> llb(block.vars.size()), lub(block.vars.size());
    for (std::size_t k = 0; k < block.vars.size(); ++k) {
      llb[k] = lb[block.vars[k]];
      lub[k] = ub[block.vars[k]];
    }
    block.simplex->set_bounds(std::move(llb), std::move(lub));
    LpSolution sol = block.simplex->solve(cfg_.iteration_limit);
    out.iterations += sol.iterations;
    total_iterations_ += sol.iterations;

    if (block.cache_enabled &&
        (sol.status == LpStatus::Optimal || sol.status == LpStatus::Infeasible)) {
      BlockSolution entry;
      entry.status = sol.status;
      entry.objective = sol.objective;
      if (sol.status == LpStatus::Optimal) entry.x = sol.x;
      if (block.cache.size() >= 200000) block.cache.clear();
      block.cache.emplace(std::move(key), std::move(entry));
    }

    if (sol.status != LpStatus::Optimal) {
      out.status = sol.status;
      return out;
    }
    for (std::size_t k = 0; k < block.vars.size(); ++k) out.x[block.vars[k]] = sol.x[k];
    out.objective += sol.objective;
  }
  return out;
}

LpSolution solve_lp(const MilpProblem& prob, const SolverConfig& cfg) {
  LpEngine engine(prob, cfg);
  std::vector<double> lb(prob.vars.size()), ub(prob.vars.size());
  for (std::size_t j = 0; j < prob.vars.size(); ++j) {
    lb[j] = prob.vars[j].lb;
    ub[j] = prob.vars[j].ub;
  }
  return engine.solve(lb, ub);
}

}  // namespace gridflex
