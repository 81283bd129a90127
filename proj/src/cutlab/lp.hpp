#pragma once

#include <cstdint>
#include <vector>

#include "common.hpp"
#include "milp.hpp"

namespace cutlab {

enum class LpStatus { Optimal, Infeasible, Unbounded };

enum class BasisStatus : uint8_t { Basic, AtLower, AtUpper, NonbasicFree };

const char* basis_status_name(BasisStatus s);

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  double objective = kInf;
  std::vector<double> primal;         // structural variable values
  std::vector<double> duals;          // one per row (<= 0 at optimality)
  std::vector<double> reduced_costs;  // structural variables
  std::vector<BasisStatus> var_status;
  std::vector<BasisStatus> row_status;  // slack status: Basic = loose row
  std::vector<double> ray;              // unbounded direction (structural)
  int iterations = 0;
  uint64_t stamp = 0;  // solver state version this solution belongs to
};

// One dense simplex tableau row B^-1 [A|I] for a basic column, expressed over
// structural columns [0, n) and row slacks [n, n+m).
struct TableauRow {
  int basic_col = -1;
  double value = 0.0;         // current value of the basic variable
  std::vector<double> coef;   // size n + m
};

struct NotBasic : CutlabError {
  using CutlabError::CutlabError;
};
struct StaleSolution : CutlabError {
  using CutlabError::CutlabError;
};
struct UnboundedRelaxation : CutlabError {
  using CutlabError::CutlabError;
};
struct MilpInfeasible : CutlabError {
  using CutlabError::CutlabError;
};

// Bounded revised simplex over the "<="-form relaxation:
//   min c'x  s.t.  Ax + s = b,  l <= x <= u,  s >= 0.
// The basis inverse is kept as a dense matrix updated per pivot and rebuilt
// periodically. Cold solves run a phase-1 with artificial columns when the
// all-slack start is infeasible; warm restarts after cut or bound changes run
// the dual simplex from the previous basis.
class SimplexSolver {
 public:
  explicit SimplexSolver(const LpRelaxation& relax);

  // Deterministic from-scratch solve (resets any warm state).
  LpSolution solve();
  // Warm restart from the current basis (after add_cut_row/set_var_bounds).
  LpSolution resolve();
  // Two-phase restart from a fresh slack basis against the *current* rows and
  // bounds; unlike solve() it keeps appended cuts, branching bounds, and the
  // saved-state stack. Escape hatch when a warm basis breaks down numerically.
  LpSolution recover();

  // Appends one "<="-form structural-variable row; the new slack enters the
  // basis, typically primal-infeasible until the next resolve().
  void add_cut_row(const Row& cut);
  // Tightens/changes bounds of a structural variable (branching).
  void set_var_bounds(int var, double lo, double hi);

  void push_state();
  void pop_state();

  int n_structural() const { return n_; }
  int n_rows() const { return m_; }
  int slack_col(int row) const { return n_ + n_art_ + row; }
  bool is_artificial(int col) const { return col >= n_ && col < n_ + n_art_; }

  BasisStatus col_status(int col) const { return status_[size_t(col)]; }
  double col_value(int col) const { return x_[size_t(col)]; }
  double col_lower(int col) const { return lower_[size_t(col)]; }
  double col_upper(int col) const { return upper_[size_t(col)]; }
  double row_rhs(int row) const { return b_[size_t(row)]; }
  uint64_t stamp() const { return stamp_; }

  // Tableau row of a basic column over [structural | slack] columns.
  // Throws StaleSolution if the solver moved on since `sol`, NotBasic if the
  // column is nonbasic.
  TableauRow tableau_row(const LpSolution& sol, int col) const;

 private:
  struct Snapshot {
    int m = 0;
    int n_art = 0;
    size_t n_rows_kept = 0;
    std::vector<double> b, lower, upper, x, binv;
    std::vector<BasisStatus> status;
    std::vector<int> basic_index, basic_pos;
    int pivots_since_refactor = 0;
    int degenerate_streak = 0;
    bool bland_mode = false;
  };

  void reset_from_relaxation();
  void install_start_basis();
  LpSolution two_phase_from_start_basis();
  void rebuild_phase_costs(bool phase1);
  void refactorize();
  void compute_basic_values();
  void price(std::vector<double>& y) const;
  double reduced_cost(const std::vector<double>& y, int col) const;
  void ftran(int col, std::vector<double>& w) const;
  void pivot_update(int leave_pos, const std::vector<double>& w);
  LpStatus primal_loop(bool phase1);
  LpStatus dual_loop();
  LpSolution extract(LpStatus status);
  double bound_violation(int col) const;
  bool finite_lo(int col) const { return lower_[size_t(col)] > -kBoundInf; }
  bool finite_up(int col) const { return upper_[size_t(col)] < kBoundInf; }
  bool is_fixed(int col) const {
    return upper_[size_t(col)] - lower_[size_t(col)] <= 1e-12;
  }
  int n_cols() const { return n_ + n_art_ + m_; }

  const LpRelaxation* relax_ = nullptr;
  int n_ = 0;      // structural columns
  int m_ = 0;      // rows (grows with cuts)
  int n_art_ = 0;  // artificial columns from the last cold solve

  // Column-wise matrix over [structural | artificial | slack] columns.
  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<Row> rows_;  // all rows, for snapshot bookkeeping
  std::vector<double> b_;
  std::vector<double> lower_, upper_;
  std::vector<double> cost_;        // active objective (phase-dependent)
  std::vector<double> obj_struct_;  // phase-2 structural costs
  bool phase1_costs_ = false;

  std::vector<BasisStatus> status_;
  std::vector<int> basic_index_;  // basis position -> column
  std::vector<int> basic_pos_;    // column -> basis position or -1
  std::vector<double> x_;         // all column values
  std::vector<double> binv_;      // dense m_ x m_, row-major
  std::vector<double> last_y_;    // duals at last extract
  std::vector<double> pending_ray_;

  int pivots_since_refactor_ = 0;
  int degenerate_streak_ = 0;
  bool bland_mode_ = false;
  int total_iterations_ = 0;
  uint64_t stamp_ = 0;
  std::vector<Snapshot> stack_;
};

// Convenience wrappers matching the module-level operations.
LpSolution solve_lp(const LpRelaxation& relax);

// resolve(), falling back to recover() when the warm basis breaks down. A
// long accumulation of pivots (deep trees, many appended cut rows) can leave
// the updated inverse too stale to refactorize; the fallback rebuilds the
// basis from the current problem data, so one retry covers every such state.
LpSolution resolve_or_recover(SimplexSolver& solver);

struct MilpBound {
  double z_opt = kInf;
  std::vector<double> incumbent;
  long nodes_explored = 0;
  bool proved_optimal = false;
};

// Depth-first branch-and-bound on the most-fractional variable, warm-started
// via bound changes; used as the z^OPT oracle. Starts with rounding dives for
// a first incumbent and, when root_cut_rounds > 0, tightens the root with up
// to 10 separated cuts per round first (exactness is unaffected). Throws
// MilpInfeasible when no integer-feasible point exists (and the tree was
// exhausted or a root cut emptied the relaxation).
MilpBound solve_milp_bnb(const MilpInstance& instance, long node_limit = 100000,
                         int root_cut_rounds = 0);

}  // namespace cutlab
