#include "lp.hpp"

#include <algorithm>
#include <cmath>

namespace cutlab {

const char* basis_status_name(BasisStatus s) {
  switch (s) {
    case BasisStatus::Basic: return "basic";
    case BasisStatus::AtLower: return "at_lower";
    case BasisStatus::AtUpper: return "at_upper";
    case BasisStatus::NonbasicFree: return "free";
  }
  return "?";
}

namespace {
constexpr int kRefactorInterval = 100;
constexpr int kDegenerateLimit = 200;
// Hard cap so numerical cycling surfaces as an error instead of a hang.
int iteration_cap(int n_cols) { return 20000 + 200 * n_cols; }
}  // namespace

SimplexSolver::SimplexSolver(const LpRelaxation& relax) : relax_(&relax) {
  reset_from_relaxation();
}

void SimplexSolver::reset_from_relaxation() {
  n_ = relax_->n_vars();
  m_ = relax_->n_rows();
  n_art_ = 0;
  rows_.clear();
  stack_.clear();

  cols_.assign(size_t(n_ + m_), {});
  b_.resize(size_t(m_));
  for (int i = 0; i < m_; ++i) {
    const Row& r = relax_->row(i);
    if (r.relation != Relation::LE)
      throw InvalidInstance("relaxation row not in \"<=\" form");
    b_[size_t(i)] = r.rhs;
    for (const auto& [j, v] : r.coeffs) cols_[size_t(j)].emplace_back(i, v);
    cols_[size_t(n_ + i)].emplace_back(i, 1.0);  // slack
    rows_.push_back(r);
  }

  const MilpInstance& inst = *relax_->base;
  lower_.assign(size_t(n_ + m_), 0.0);
  upper_.assign(size_t(n_ + m_), kInf);
  obj_struct_ = inst.objective;
  for (int j = 0; j < n_; ++j) {
    const double lo = inst.var_lower[size_t(j)];
    const double hi = inst.var_upper[size_t(j)];
    lower_[size_t(j)] = lo <= -kBoundInf ? -kInf : lo;
    upper_[size_t(j)] = hi >= kBoundInf ? kInf : hi;
  }
  ++stamp_;
}

void SimplexSolver::install_start_basis() {
  // Place structural nonbasics on their preferred bound and measure the
  // slack-basis residual of every row; rows starting negative get an
  // artificial column (coefficient -1) that carries the infeasibility into
  // phase 1.
  std::vector<double> xs(size_t(n_), 0.0);
  std::vector<BasisStatus> sts(size_t(n_), BasisStatus::AtLower);
  for (int j = 0; j < n_; ++j) {
    if (finite_lo(j)) {
      sts[size_t(j)] = BasisStatus::AtLower;
      xs[size_t(j)] = lower_[size_t(j)];
    } else if (finite_up(j)) {
      sts[size_t(j)] = BasisStatus::AtUpper;
      xs[size_t(j)] = upper_[size_t(j)];
    } else {
      sts[size_t(j)] = BasisStatus::NonbasicFree;
      xs[size_t(j)] = 0.0;
    }
  }
  std::vector<double> resid = b_;
  for (int j = 0; j < n_; ++j) {
    const double xv = xs[size_t(j)];
    if (xv == 0.0) continue;
    for (const auto& [i, v] : cols_[size_t(j)]) resid[size_t(i)] -= v * xv;
  }
  std::vector<bool> violated(size_t(m_), false);
  n_art_ = 0;
  for (int i = 0; i < m_; ++i)
    if (resid[size_t(i)] < -Tols::feas) {
      violated[size_t(i)] = true;
      ++n_art_;
    }

  // Rebuild the column blocks as [structural | artificial | slack] so that
  // later cut rows can append slacks at the end without renumbering.
  std::vector<std::vector<std::pair<int, double>>> cols(
      static_cast<size_t>(n_cols()));
  for (int j = 0; j < n_; ++j) cols[size_t(j)] = std::move(cols_[size_t(j)]);
  {
    int a = 0;
    for (int i = 0; i < m_; ++i)
      if (violated[size_t(i)]) cols[size_t(n_ + a++)] = {{i, -1.0}};
  }
  for (int i = 0; i < m_; ++i) cols[size_t(slack_col(i))] = {{i, 1.0}};
  cols_ = std::move(cols);

  std::vector<double> lower(size_t(n_cols()), 0.0), upper(size_t(n_cols()), kInf);
  std::vector<double> xfull(size_t(n_cols()), 0.0);
  std::vector<BasisStatus> status(size_t(n_cols()), BasisStatus::AtLower);
  for (int j = 0; j < n_; ++j) {
    lower[size_t(j)] = lower_[size_t(j)];
    upper[size_t(j)] = upper_[size_t(j)];
    xfull[size_t(j)] = xs[size_t(j)];
    status[size_t(j)] = sts[size_t(j)];
  }

  basic_index_.assign(size_t(m_), -1);
  basic_pos_.assign(size_t(n_cols()), -1);
  binv_.assign(size_t(m_) * size_t(m_), 0.0);
  {
    int a = 0;
    for (int i = 0; i < m_; ++i) {
      int bc;
      if (violated[size_t(i)]) {
        bc = n_ + a++;
        xfull[size_t(bc)] = -resid[size_t(i)];
        binv_[size_t(i) * size_t(m_) + size_t(i)] = -1.0;
      } else {
        bc = slack_col(i);
        xfull[size_t(bc)] = resid[size_t(i)];
        binv_[size_t(i) * size_t(m_) + size_t(i)] = 1.0;
      }
      status[size_t(bc)] = BasisStatus::Basic;
      basic_index_[size_t(i)] = bc;
      basic_pos_[size_t(bc)] = i;
    }
  }
  lower_ = std::move(lower);
  upper_ = std::move(upper);
  x_ = std::move(xfull);
  status_ = std::move(status);
  pivots_since_refactor_ = 0;
  degenerate_streak_ = 0;
  bland_mode_ = false;
}

void SimplexSolver::rebuild_phase_costs(bool phase1) {
  cost_.assign(size_t(n_cols()), 0.0);
  if (phase1) {
    for (int a = 0; a < n_art_; ++a) cost_[size_t(n_ + a)] = 1.0;
  } else {
    for (int j = 0; j < n_; ++j) cost_[size_t(j)] = obj_struct_[size_t(j)];
  }
  phase1_costs_ = phase1;
}

void SimplexSolver::refactorize() {
  // Dense Gauss-Jordan inversion of the basis matrix with partial pivoting.
  if (m_ == 0) {
    pivots_since_refactor_ = 0;
    return;
  }
  const size_t m = size_t(m_);
  std::vector<double> aug(m * 2 * m, 0.0);
  for (size_t k = 0; k < m; ++k) {
    for (const auto& [i, v] : cols_[size_t(basic_index_[k])])
      aug[size_t(i) * 2 * m + k] = v;
  }
  for (size_t r = 0; r < m; ++r) aug[r * 2 * m + m + r] = 1.0;
  for (size_t k = 0; k < m; ++k) {
    size_t p = k;
    double best = std::fabs(aug[k * 2 * m + k]);
    for (size_t r = k + 1; r < m; ++r) {
      const double a = std::fabs(aug[r * 2 * m + k]);
      if (a > best) {
        best = a;
        p = r;
      }
    }
    if (best < 1e-12)
      throw NumericalBreakdown("singular basis at refactorization");
    if (p != k)
      for (size_t c = 0; c < 2 * m; ++c)
        std::swap(aug[p * 2 * m + c], aug[k * 2 * m + c]);
    const double inv = 1.0 / aug[k * 2 * m + k];
    for (size_t c = 0; c < 2 * m; ++c) aug[k * 2 * m + c] *= inv;
    for (size_t r = 0; r < m; ++r) {
      if (r == k) continue;
      const double f = aug[r * 2 * m + k];
      if (f == 0.0) continue;
      for (size_t c = 0; c < 2 * m; ++c)
        aug[r * 2 * m + c] -= f * aug[k * 2 * m + c];
    }
  }
  // Left half reduced to the identity, so the right half is exactly B^-1
  // (row swaps are part of the accumulated left-multiplication).
  for (size_t r = 0; r < m; ++r)
    for (size_t c = 0; c < m; ++c) binv_[r * m + c] = aug[r * 2 * m + m + c];
  pivots_since_refactor_ = 0;
}

void SimplexSolver::compute_basic_values() {
  std::vector<double> resid = b_;
  for (int j = 0; j < n_cols(); ++j) {
    if (basic_pos_[size_t(j)] >= 0) continue;
    const double xv = x_[size_t(j)];
    if (xv == 0.0) continue;
    for (const auto& [i, v] : cols_[size_t(j)]) resid[size_t(i)] -= v * xv;
  }
  const size_t m = size_t(m_);
  for (size_t k = 0; k < m; ++k) {
    double acc = 0.0;
    const double* row = binv_.data() + k * m;
    for (size_t i = 0; i < m; ++i) acc += row[i] * resid[i];
    x_[size_t(basic_index_[k])] = acc;
  }
}

void SimplexSolver::price(std::vector<double>& y) const {
  const size_t m = size_t(m_);
  y.assign(m, 0.0);
  for (size_t k = 0; k < m; ++k) {
    const double cb = cost_[size_t(basic_index_[k])];
    if (cb == 0.0) continue;
    const double* row = binv_.data() + k * m;
    for (size_t i = 0; i < m; ++i) y[i] += cb * row[i];
  }
}

double SimplexSolver::reduced_cost(const std::vector<double>& y, int col) const {
  double d = cost_[size_t(col)];
  for (const auto& [i, v] : cols_[size_t(col)]) d -= y[size_t(i)] * v;
  return d;
}

void SimplexSolver::ftran(int col, std::vector<double>& w) const {
  const size_t m = size_t(m_);
  w.assign(m, 0.0);
  for (const auto& [r, v] : cols_[size_t(col)]) {
    const size_t rr = size_t(r);
    for (size_t i = 0; i < m; ++i) w[i] += binv_[i * m + rr] * v;
  }
}

void SimplexSolver::pivot_update(int leave_pos, const std::vector<double>& w) {
  const size_t m = size_t(m_);
  const size_t r = size_t(leave_pos);
  double* prow = binv_.data() + r * m;
  const double inv = 1.0 / w[r];
  for (size_t c = 0; c < m; ++c) prow[c] *= inv;
  for (size_t k = 0; k < m; ++k) {
    if (k == r) continue;
    const double f = w[k];
    if (f == 0.0) continue;
    double* krow = binv_.data() + k * m;
    for (size_t c = 0; c < m; ++c) krow[c] -= f * prow[c];
  }
  ++pivots_since_refactor_;
}

double SimplexSolver::bound_violation(int col) const {
  const double x = x_[size_t(col)];
  double v = 0.0;
  if (finite_lo(col)) v = std::max(v, lower_[size_t(col)] - x);
  if (finite_up(col)) v = std::max(v, x - upper_[size_t(col)]);
  return v;
}

LpStatus SimplexSolver::primal_loop(bool phase1) {
  std::vector<double> y, w;
  int accuracy_retries = 0;
  pending_ray_.clear();
  for (;;) {
    if (++total_iterations_ > iteration_cap(n_cols()))
      throw NumericalBreakdown("primal simplex iteration cap exceeded");
    if (pivots_since_refactor_ >= kRefactorInterval) {
      refactorize();
      compute_basic_values();
    }
    price(y);

    // Entering column: largest reduced-cost violation (Dantzig) with
    // smallest-index ties; pure Bland under prolonged degeneracy.
    int enter = -1;
    double enter_d = 0.0;
    double best_viol = Tols::dual;
    for (int j = 0; j < n_cols(); ++j) {
      if (basic_pos_[size_t(j)] >= 0 || is_fixed(j)) continue;
      if (is_artificial(j)) continue;  // never re-enters
      const double d = reduced_cost(y, j);
      double viol = 0.0;
      switch (status_[size_t(j)]) {
        case BasisStatus::AtLower: viol = -d; break;
        case BasisStatus::AtUpper: viol = d; break;
        case BasisStatus::NonbasicFree: viol = std::fabs(d); break;
        case BasisStatus::Basic: break;
      }
      if (viol <= Tols::dual) continue;
      if (bland_mode_) {
        enter = j;
        enter_d = d;
        break;
      }
      if (viol > best_viol) {
        best_viol = viol;
        enter = j;
        enter_d = d;
      }
    }
    if (enter < 0) {
      // Claimed optimal; verify primal feasibility against update drift.
      double worst = 0.0;
      for (int k = 0; k < m_; ++k)
        worst = std::max(worst, bound_violation(basic_index_[size_t(k)]));
      if (worst > 10 * Tols::feas && accuracy_retries < 3) {
        ++accuracy_retries;
        refactorize();
        compute_basic_values();
        if (dual_loop() == LpStatus::Infeasible)
          throw NumericalBreakdown("feasibility lost after refactorization");
        continue;
      }
      return LpStatus::Optimal;
    }

    const double sigma =
        (status_[size_t(enter)] == BasisStatus::AtUpper ||
         (status_[size_t(enter)] == BasisStatus::NonbasicFree && enter_d > 0))
            ? -1.0
            : 1.0;
    ftran(enter, w);

    // Ratio test: the entering column either flips to its opposite bound or
    // is blocked by the first basic column hitting one of its own.
    double t_flip = kInf;
    if (finite_lo(enter) && finite_up(enter))
      t_flip = upper_[size_t(enter)] - lower_[size_t(enter)];
    double t_ratio = kInf;
    int leave = -1;
    bool leave_to_upper = false;
    for (int k = 0; k < m_; ++k) {
      const double wk = sigma * w[size_t(k)];
      if (std::fabs(wk) <= Tols::pivot) continue;
      const int bc = basic_index_[size_t(k)];
      double tk;
      bool to_upper;
      if (wk > 0) {  // this basic value decreases
        if (!finite_lo(bc)) continue;
        tk = (x_[size_t(bc)] - lower_[size_t(bc)]) / wk;
        to_upper = false;
      } else {  // this basic value increases
        if (!finite_up(bc)) continue;
        tk = (upper_[size_t(bc)] - x_[size_t(bc)]) / (-wk);
        to_upper = true;
      }
      if (tk < 0) tk = 0;
      bool take;
      if (leave < 0 || tk < t_ratio - 1e-9) {
        take = true;
      } else if (tk > t_ratio + 1e-9) {
        take = false;
      } else if (bland_mode_) {
        take = bc < basic_index_[size_t(leave)];
      } else {
        take = std::fabs(w[size_t(k)]) > std::fabs(w[size_t(leave)]);
      }
      if (take) {
        leave = k;
        leave_to_upper = to_upper;
      }
      if (tk < t_ratio) t_ratio = tk;
    }

    if (t_flip >= kInf && t_ratio >= kInf) {
      if (phase1) throw NumericalBreakdown("phase-1 objective unbounded");
      pending_ray_.assign(size_t(n_), 0.0);
      if (enter < n_) pending_ray_[size_t(enter)] = sigma;
      for (int k = 0; k < m_; ++k) {
        const int bc = basic_index_[size_t(k)];
        if (bc < n_) pending_ray_[size_t(bc)] = -sigma * w[size_t(k)];
      }
      return LpStatus::Unbounded;
    }

    const double t = std::min(t_flip, t_ratio);
    if (t <= 1e-9) {
      if (++degenerate_streak_ > kDegenerateLimit) bland_mode_ = true;
    } else {
      degenerate_streak_ = 0;
      bland_mode_ = false;
    }

    if (t_flip <= t_ratio) {
      // Bound flip: no basis change.
      for (int k = 0; k < m_; ++k) {
        const double wk = w[size_t(k)];
        if (wk != 0.0) x_[size_t(basic_index_[size_t(k)])] -= sigma * t_flip * wk;
      }
      x_[size_t(enter)] =
          sigma > 0 ? upper_[size_t(enter)] : lower_[size_t(enter)];
      status_[size_t(enter)] =
          sigma > 0 ? BasisStatus::AtUpper : BasisStatus::AtLower;
      continue;
    }

    const double delta = sigma * t_ratio;
    for (int k = 0; k < m_; ++k) {
      const double wk = w[size_t(k)];
      if (wk != 0.0) x_[size_t(basic_index_[size_t(k)])] -= delta * wk;
    }
    const int lv = basic_index_[size_t(leave)];
    x_[size_t(lv)] = leave_to_upper ? upper_[size_t(lv)] : lower_[size_t(lv)];
    status_[size_t(lv)] =
        leave_to_upper ? BasisStatus::AtUpper : BasisStatus::AtLower;
    x_[size_t(enter)] += delta;
    status_[size_t(enter)] = BasisStatus::Basic;
    basic_index_[size_t(leave)] = enter;
    basic_pos_[size_t(enter)] = leave;
    basic_pos_[size_t(lv)] = -1;
    pivot_update(leave, w);
  }
}

LpStatus SimplexSolver::dual_loop() {
  std::vector<double> y, w, rho;
  int ftran_retries = 0;
  for (;;) {
    if (++total_iterations_ > iteration_cap(n_cols()))
      throw NumericalBreakdown("dual simplex iteration cap exceeded");
    if (pivots_since_refactor_ >= kRefactorInterval) {
      refactorize();
      compute_basic_values();
    }

    // Leaving: most violated basic bound (smallest position on ties).
    int leave = -1;
    double worst = Tols::feas;
    for (int k = 0; k < m_; ++k) {
      const double v = bound_violation(basic_index_[size_t(k)]);
      if (v > worst) {
        worst = v;
        leave = k;
      }
    }
    if (leave < 0) return LpStatus::Optimal;

    const int bc = basic_index_[size_t(leave)];
    const bool below = x_[size_t(bc)] < lower_[size_t(bc)];
    const size_t m = size_t(m_);
    rho.assign(binv_.begin() + long(size_t(leave) * m),
               binv_.begin() + long((size_t(leave) + 1) * m));
    price(y);

    // Entering: minimum dual ratio |d_j| / |alpha_j| over sign-compatible
    // nonbasics; ties prefer the larger pivot, then the smaller index.
    int enter = -1;
    double best_theta = kInf, best_alpha = 0.0;
    for (int j = 0; j < n_cols(); ++j) {
      if (basic_pos_[size_t(j)] >= 0 || is_fixed(j) || is_artificial(j))
        continue;
      double alpha = 0.0;
      for (const auto& [i, v] : cols_[size_t(j)]) alpha += rho[size_t(i)] * v;
      if (std::fabs(alpha) <= Tols::pivot) continue;
      const BasisStatus st = status_[size_t(j)];
      bool eligible = false;
      if (st == BasisStatus::NonbasicFree)
        eligible = true;
      else if (below)
        eligible = (st == BasisStatus::AtLower && alpha < 0) ||
                   (st == BasisStatus::AtUpper && alpha > 0);
      else
        eligible = (st == BasisStatus::AtLower && alpha > 0) ||
                   (st == BasisStatus::AtUpper && alpha < 0);
      if (!eligible) continue;
      double d = reduced_cost(y, j);
      if (st == BasisStatus::AtLower)
        d = std::max(d, 0.0);
      else if (st == BasisStatus::AtUpper)
        d = std::min(d, 0.0);
      const double theta = std::fabs(d) / std::fabs(alpha);
      bool take;
      if (enter < 0 || theta < best_theta - 1e-12) {
        take = true;
      } else if (theta > best_theta + 1e-12) {
        take = false;
      } else if (bland_mode_) {
        take = j < enter;
      } else {
        take = std::fabs(alpha) > std::fabs(best_alpha);
      }
      if (take) {
        enter = j;
        best_alpha = alpha;
      }
      if (theta < best_theta) best_theta = theta;
    }
    if (enter < 0) return LpStatus::Infeasible;

    ftran(enter, w);
    if (std::fabs(w[size_t(leave)]) <= Tols::pivot) {
      // The updated inverse disagrees with a fresh FTRAN: refresh and retry.
      if (++ftran_retries > 3)
        throw NumericalBreakdown("dual pivot vanished after refactorization");
      refactorize();
      compute_basic_values();
      continue;
    }
    ftran_retries = 0;

    const double target = below ? lower_[size_t(bc)] : upper_[size_t(bc)];
    const double delta_e = (x_[size_t(bc)] - target) / w[size_t(leave)];
    if (std::fabs(delta_e) <= 1e-9) {
      if (++degenerate_streak_ > kDegenerateLimit) bland_mode_ = true;
    } else {
      degenerate_streak_ = 0;
      bland_mode_ = false;
    }
    for (int k = 0; k < m_; ++k) {
      const double wk = w[size_t(k)];
      if (wk != 0.0) x_[size_t(basic_index_[size_t(k)])] -= delta_e * wk;
    }
    x_[size_t(bc)] = target;
    status_[size_t(bc)] = below ? BasisStatus::AtLower : BasisStatus::AtUpper;
    x_[size_t(enter)] += delta_e;
    status_[size_t(enter)] = BasisStatus::Basic;
    basic_index_[size_t(leave)] = enter;
    basic_pos_[size_t(enter)] = leave;
    basic_pos_[size_t(bc)] = -1;
    pivot_update(leave, w);
  }
}

LpSolution SimplexSolver::extract(LpStatus status) {
  LpSolution sol;
  sol.status = status;
  sol.iterations = total_iterations_;
  sol.stamp = stamp_;
  price(last_y_);
  sol.duals = last_y_;
  sol.primal.assign(x_.begin(), x_.begin() + n_);
  sol.var_status.assign(status_.begin(), status_.begin() + n_);
  sol.row_status.resize(size_t(m_));
  for (int i = 0; i < m_; ++i)
    sol.row_status[size_t(i)] = status_[size_t(slack_col(i))];
  sol.reduced_costs.resize(size_t(n_));
  for (int j = 0; j < n_; ++j)
    sol.reduced_costs[size_t(j)] = reduced_cost(last_y_, j);
  if (status == LpStatus::Optimal) {
    double z = 0.0;
    for (int j = 0; j < n_; ++j) z += obj_struct_[size_t(j)] * x_[size_t(j)];
    sol.objective = z;
  } else if (status == LpStatus::Unbounded) {
    sol.objective = -kInf;
    sol.ray = pending_ray_;
  } else {
    sol.objective = kInf;
  }
  return sol;
}

LpSolution SimplexSolver::solve() {
  reset_from_relaxation();
  return two_phase_from_start_basis();
}

LpSolution SimplexSolver::recover() {
  ++stamp_;  // the basis is rebuilt, so previously issued solutions go stale
  return two_phase_from_start_basis();
}

LpSolution SimplexSolver::two_phase_from_start_basis() {
  total_iterations_ = 0;
  install_start_basis();
  if (n_art_ > 0) {
    rebuild_phase_costs(true);
    (void)primal_loop(true);  // cannot be unbounded; breakdown throws
    double art_sum = 0.0;
    for (int a = 0; a < n_art_; ++a) art_sum += std::fabs(x_[size_t(n_ + a)]);
    double bscale = 1.0;
    for (double bi : b_) bscale = std::max(bscale, std::fabs(bi));
    if (art_sum > Tols::feas * bscale) return extract(LpStatus::Infeasible);

    // Degenerate basic artificials get pivoted out where possible; stuck ones
    // (dependent rows) stay basic but fixed at zero.
    std::vector<double> w;
    for (int a = 0; a < n_art_; ++a) {
      const int acol = n_ + a;
      const int pos = basic_pos_[size_t(acol)];
      if (pos < 0) continue;
      const size_t m = size_t(m_);
      const double* rho = binv_.data() + size_t(pos) * m;
      int best_j = -1;
      double best_alpha = 1e-7;
      for (int j = 0; j < n_cols(); ++j) {
        if (basic_pos_[size_t(j)] >= 0 || is_artificial(j)) continue;
        double alpha = 0.0;
        for (const auto& [i, v] : cols_[size_t(j)]) alpha += rho[size_t(i)] * v;
        if (std::fabs(alpha) > best_alpha) {
          best_alpha = std::fabs(alpha);
          best_j = j;
        }
      }
      if (best_j < 0) continue;
      ftran(best_j, w);
      if (std::fabs(w[size_t(pos)]) <= Tols::pivot) continue;
      x_[size_t(acol)] = 0.0;
      status_[size_t(acol)] = BasisStatus::AtLower;
      status_[size_t(best_j)] = BasisStatus::Basic;
      basic_index_[size_t(pos)] = best_j;
      basic_pos_[size_t(best_j)] = pos;
      basic_pos_[size_t(acol)] = -1;
      pivot_update(pos, w);
    }
    for (int a = 0; a < n_art_; ++a) {
      lower_[size_t(n_ + a)] = 0.0;
      upper_[size_t(n_ + a)] = 0.0;
    }
  }
  rebuild_phase_costs(false);
  const LpStatus st = primal_loop(false);
  return extract(st);
}

LpSolution SimplexSolver::resolve() {
  // Phase-1 costs still loaded means the last solve ended before reaching
  // phase 2 (infeasible, or an exception unwound through it); the warm basis
  // may hold positive artificials, so restart cleanly instead of engraving
  // that state into a dual iteration. recover() keeps rows, bounds, and the
  // snapshot stack, unlike solve().
  if (phase1_costs_) return recover();
  total_iterations_ = 0;
  LpStatus st = dual_loop();
  if (st == LpStatus::Optimal) st = primal_loop(false);
  return extract(st);
}

void SimplexSolver::add_cut_row(const Row& cut) {
  if (cut.relation != Relation::LE)
    throw InvalidCutIndices("cut row not in \"<=\" form");
  const size_t m_old = size_t(m_);
  const int new_row = m_;

  for (const auto& [j, v] : cut.coeffs) {
    if (j < 0 || j >= n_) throw InvalidCutIndices("cut references bad column");
    cols_[size_t(j)].emplace_back(new_row, v);
  }
  cols_.push_back({{new_row, 1.0}});  // new slack, appended last
  b_.push_back(cut.rhs);
  lower_.push_back(0.0);
  upper_.push_back(kInf);
  cost_.push_back(0.0);
  rows_.push_back(cut);
  m_ += 1;

  // B_new^-1 = [[B^-1, 0], [-g B^-1, 1]] with g the new row restricted to the
  // old basic columns (cuts are structural-only, so slack positions are 0).
  const size_t m_new = size_t(m_);
  std::vector<double> binv(m_new * m_new, 0.0);
  for (size_t r = 0; r < m_old; ++r)
    for (size_t c = 0; c < m_old; ++c)
      binv[r * m_new + c] = binv_[r * m_old + c];
  std::vector<double> g(m_old, 0.0);
  bool any_basic = false;
  for (const auto& [j, v] : cut.coeffs) {
    const int pos = basic_pos_[size_t(j)];
    if (pos >= 0) {
      g[size_t(pos)] = v;
      any_basic = true;
    }
  }
  if (any_basic) {
    for (size_t c = 0; c < m_old; ++c) {
      double acc = 0.0;
      for (size_t k = 0; k < m_old; ++k) acc += g[k] * binv_[k * m_old + c];
      binv[m_old * m_new + c] = -acc;
    }
  }
  binv[m_old * m_new + m_old] = 1.0;
  binv_ = std::move(binv);

  double slack_val = cut.rhs;
  for (const auto& [j, v] : cut.coeffs) slack_val -= v * x_[size_t(j)];
  const int scol = slack_col(new_row);
  x_.push_back(slack_val);
  status_.push_back(BasisStatus::Basic);
  basic_index_.push_back(scol);
  basic_pos_.push_back(new_row);
  ++stamp_;
}

void SimplexSolver::set_var_bounds(int var, double lo, double hi) {
  if (var < 0 || var >= n_) throw CutlabError("bound change on bad column");
  lower_[size_t(var)] = lo <= -kBoundInf ? -kInf : lo;
  upper_[size_t(var)] = hi >= kBoundInf ? kInf : hi;
  if (basic_pos_[size_t(var)] < 0) {
    // Re-seat the nonbasic variable on a consistent bound.
    const double x_old = x_[size_t(var)];
    if (status_[size_t(var)] == BasisStatus::AtUpper && finite_up(var)) {
      x_[size_t(var)] = upper_[size_t(var)];
    } else if (finite_lo(var)) {
      status_[size_t(var)] = BasisStatus::AtLower;
      x_[size_t(var)] = lower_[size_t(var)];
    } else if (finite_up(var)) {
      status_[size_t(var)] = BasisStatus::AtUpper;
      x_[size_t(var)] = upper_[size_t(var)];
    } else {
      status_[size_t(var)] = BasisStatus::NonbasicFree;
      x_[size_t(var)] = 0.0;
    }
    // Tightening the opposite bound leaves the point (and so every basic
    // value) where it was; only an actual move forces the recompute.
    if (x_[size_t(var)] != x_old) compute_basic_values();
  }
  ++stamp_;
}

void SimplexSolver::push_state() {
  Snapshot s;
  s.m = m_;
  s.n_art = n_art_;
  s.n_rows_kept = rows_.size();
  s.b = b_;
  s.lower = lower_;
  s.upper = upper_;
  s.x = x_;
  s.binv = binv_;
  s.status = status_;
  s.basic_index = basic_index_;
  s.basic_pos = basic_pos_;
  s.pivots_since_refactor = pivots_since_refactor_;
  s.degenerate_streak = degenerate_streak_;
  s.bland_mode = bland_mode_;
  stack_.push_back(std::move(s));
}

void SimplexSolver::pop_state() {
  if (stack_.empty()) throw CutlabError("pop_state on empty stack");
  Snapshot s = std::move(stack_.back());
  stack_.pop_back();
  // Remove matrix entries of rows added after the snapshot.
  for (size_t r = rows_.size(); r > s.n_rows_kept; --r) {
    const Row& cut = rows_[r - 1];
    for (auto it = cut.coeffs.rbegin(); it != cut.coeffs.rend(); ++it)
      cols_[size_t(it->first)].pop_back();
    cols_.pop_back();  // that row's slack column
  }
  rows_.resize(s.n_rows_kept);
  m_ = s.m;
  n_art_ = s.n_art;
  b_ = std::move(s.b);
  lower_ = std::move(s.lower);
  upper_ = std::move(s.upper);
  x_ = std::move(s.x);
  binv_ = std::move(s.binv);
  status_ = std::move(s.status);
  basic_index_ = std::move(s.basic_index);
  basic_pos_ = std::move(s.basic_pos);
  // A recover() between push and pop may have left phase-1 costs loaded.
  rebuild_phase_costs(false);
  pivots_since_refactor_ = s.pivots_since_refactor;
  degenerate_streak_ = s.degenerate_streak;
  bland_mode_ = s.bland_mode;
  ++stamp_;
}

TableauRow SimplexSolver::tableau_row(const LpSolution& sol, int col) const {
  if (sol.stamp != stamp_)
    throw StaleSolution("solution predates the current solver state");
  if (col < 0 || col >= n_cols() || is_artificial(col))
    throw NotBasic("column out of range");
  if (basic_pos_[size_t(col)] < 0) throw NotBasic("column is nonbasic");
  const size_t m = size_t(m_);
  const double* rho = binv_.data() + size_t(basic_pos_[size_t(col)]) * m;
  TableauRow out;
  out.basic_col = col;
  out.value = x_[size_t(col)];
  out.coef.assign(size_t(n_) + m, 0.0);
  for (int j = 0; j < n_; ++j) {
    double acc = 0.0;
    for (const auto& [i, v] : cols_[size_t(j)]) acc += rho[size_t(i)] * v;
    out.coef[size_t(j)] = acc;
  }
  for (int i = 0; i < m_; ++i) out.coef[size_t(n_ + i)] = rho[size_t(i)];
  return out;
}

LpSolution solve_lp(const LpRelaxation& relax) {
  SimplexSolver solver(relax);
  return solver.solve();
}

LpSolution resolve_or_recover(SimplexSolver& solver) {
  try {
    return solver.resolve();
  } catch (const NumericalBreakdown&) {
    return solver.recover();
  }
}

}  // namespace cutlab
