#include <doctest.h>

#include <cmath>
#include <vector>

#include "cutlab/lp.hpp"
#include "cutlab/milp.hpp"
#include "cutlab/rng.hpp"
#include "oracles.hpp"

using namespace cutlab;

namespace {

Row le(std::vector<std::pair<int, double>> coeffs, double rhs) {
  Row r;
  r.coeffs = std::move(coeffs);
  r.rhs = rhs;
  return r;
}

MilpInstance box_lp(std::vector<double> c, std::vector<double> lo,
                    std::vector<double> up, std::vector<Row> rows) {
  MilpInstance inst;
  inst.name = "lp_fixture";
  inst.n_vars = int(c.size());
  inst.objective = std::move(c);
  inst.var_lower = std::move(lo);
  inst.var_upper = std::move(up);
  inst.rows = std::move(rows);
  return normalize(inst);
}

// Structural feasibility of x against the instance, with absolute slop `tol`.
void check_feasible(const MilpInstance& inst, const std::vector<double>& x,
                    double tol) {
  for (int j = 0; j < inst.n_vars; ++j) {
    CHECK(x[size_t(j)] >= inst.var_lower[size_t(j)] - tol);
    CHECK(x[size_t(j)] <= inst.var_upper[size_t(j)] + tol);
  }
  for (const Row& r : inst.rows) CHECK(r.activity(x) <= r.rhs + tol);
}

}  // namespace

TEST_CASE("bounded two-variable LP reaches the known optimum") {
  const MilpInstance inst =
      box_lp({-3.0, -2.0}, {0.0, 0.0}, {kInf, kInf},
             {le({{0, 1.0}, {1, 1.0}}, 4.0), le({{0, 1.0}}, 2.0),
              le({{1, 1.0}}, 3.0)});
  const LpRelaxation relax(inst);
  const LpSolution sol = solve_lp(relax);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(-10.0).epsilon(1e-9));
  CHECK(sol.primal[0] == doctest::Approx(2.0));
  CHECK(sol.primal[1] == doctest::Approx(2.0));
  CHECK(sol.iterations >= 1);
  // Both structurals sit strictly inside their bounds, hence are basic; the
  // third row is loose so its slack is the remaining basic column.
  CHECK(sol.var_status[0] == BasisStatus::Basic);
  CHECK(sol.var_status[1] == BasisStatus::Basic);
  CHECK(sol.row_status[0] == BasisStatus::AtLower);
  CHECK(sol.row_status[1] == BasisStatus::AtLower);
  CHECK(sol.row_status[2] == BasisStatus::Basic);
  CHECK(sol.duals[0] == doctest::Approx(-2.0).epsilon(1e-9));
  CHECK(sol.duals[1] == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(sol.duals[2] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(std::fabs(sol.reduced_costs[0]) <= 1e-9);
  CHECK(std::fabs(sol.reduced_costs[1]) <= 1e-9);
}

TEST_CASE("contradiction between a row and a bound is infeasible") {
  const MilpInstance inst =
      box_lp({1.0}, {0.0}, {kInf}, {le({{0, 1.0}}, -1.0)});
  const LpRelaxation relax(inst);
  const LpSolution sol = solve_lp(relax);
  CHECK(sol.status == LpStatus::Infeasible);
  CHECK(sol.objective == kInf);
}

TEST_CASE("missing upper bound on an improving variable is unbounded") {
  const MilpInstance inst = box_lp({-1.0}, {0.0}, {kInf}, {});
  const LpRelaxation relax(inst);
  const LpSolution sol = solve_lp(relax);
  REQUIRE(sol.status == LpStatus::Unbounded);
  REQUIRE(sol.ray.size() == 1);
  CHECK(sol.ray[0] > 0.0);  // direction of cost decrease
}

TEST_CASE("row-free boxes solve by bound selection alone") {
  SUBCASE("minimize picks the lower bound") {
    const MilpInstance inst = box_lp({1.0}, {-3.0}, {5.0}, {});
    const LpRelaxation relax(inst);
    const LpSolution sol = solve_lp(relax);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(-3.0));
    CHECK(sol.var_status[0] == BasisStatus::AtLower);
  }
  SUBCASE("negated cost flips to the upper bound") {
    const MilpInstance inst = box_lp({-1.0}, {-3.0}, {5.0}, {});
    const LpRelaxation relax(inst);
    const LpSolution sol = solve_lp(relax);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(-5.0));
    CHECK(sol.var_status[0] == BasisStatus::AtUpper);
  }
}

TEST_CASE("infeasible all-slack start goes through auxiliary columns") {
  SUBCASE("feasible case lands on the forced minimum") {
    // min x subject to x >= 2, stated as -x <= -2.
    const MilpInstance inst =
        box_lp({1.0}, {0.0}, {10.0}, {le({{0, -1.0}}, -2.0)});
    const LpRelaxation relax(inst);
    const LpSolution sol = solve_lp(relax);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(sol.primal[0] == doctest::Approx(2.0));
  }
  SUBCASE("contradicting rows are reported infeasible") {
    const MilpInstance inst = box_lp(
        {0.0}, {-5.0}, {5.0}, {le({{0, 1.0}}, 1.0), le({{0, -1.0}}, -2.0)});
    const LpRelaxation relax(inst);
    CHECK(solve_lp(relax).status == LpStatus::Infeasible);
  }
}

TEST_CASE("random boxes match vertex enumeration and satisfy duality") {
  Rng rng(derive_seed(7, "lp-vertex"));
  int optimal_seen = 0, infeasible_seen = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const int n = 2 + int(rng.below(4));  // 2..5
    const int m = 1 + int(rng.below(8));  // 1..8
    const MilpInstance inst = oracle::random_box_lp(rng, n, m);
    const oracle::LpRef ref = oracle::lp_by_vertex_enumeration(inst);
    const LpRelaxation relax(inst);
    const LpSolution sol = solve_lp(relax);
    CAPTURE(trial);
    if (!ref.feasible) {
      CHECK(sol.status == LpStatus::Infeasible);
      ++infeasible_seen;
      continue;
    }
    REQUIRE(sol.status == LpStatus::Optimal);
    ++optimal_seen;
    const double scale = 1.0 + std::fabs(ref.objective);
    CHECK(std::fabs(sol.objective - ref.objective) <= 1e-6 * scale);
    check_feasible(inst, sol.primal, 1e-7);

    // Duality identity for bounded columns: c'x = y'b + sum_j d_j x_j.
    double dual_obj = 0.0;
    for (size_t i = 0; i < inst.rows.size(); ++i) {
      dual_obj += sol.duals[i] * inst.rows[i].rhs;
      CHECK(sol.duals[i] <= 1e-7);  // "<=" rows price nonpositively
    }
    for (int j = 0; j < n; ++j)
      dual_obj += sol.reduced_costs[size_t(j)] * sol.primal[size_t(j)];
    CHECK(std::fabs(sol.objective - dual_obj) <= 1e-6 * scale);

    // Reduced-cost signs consistent with the basis statuses.
    for (int j = 0; j < n; ++j) {
      const double d = sol.reduced_costs[size_t(j)];
      switch (sol.var_status[size_t(j)]) {
        case BasisStatus::Basic: CHECK(std::fabs(d) <= 1e-7); break;
        case BasisStatus::AtLower: CHECK(d >= -1e-7); break;
        case BasisStatus::AtUpper: CHECK(d <= 1e-7); break;
        case BasisStatus::NonbasicFree: CHECK(std::fabs(d) <= 1e-7); break;
      }
    }
  }
  // The draw mix must actually exercise both outcomes.
  CHECK(optimal_seen >= 60);
  CHECK(infeasible_seen >= 5);
}

TEST_CASE("repeated solves are bit-identical") {
  Rng rng(derive_seed(7, "lp-determinism"));
  const MilpInstance inst = oracle::random_box_lp(rng, 6, 7);
  const LpRelaxation relax(inst);
  SimplexSolver a(relax), b(relax);
  const LpSolution s1 = a.solve();
  const LpSolution s2 = b.solve();
  const LpSolution s3 = a.solve();  // re-solve resets and repeats
  REQUIRE(s1.status == s2.status);
  REQUIRE(s1.status == s3.status);
  CHECK(s1.objective == s2.objective);
  CHECK(s1.objective == s3.objective);
  CHECK(s1.iterations == s2.iterations);
  CHECK(s1.primal == s2.primal);
  CHECK(s1.duals == s2.duals);
  CHECK(s1.var_status == s2.var_status);
  CHECK(s1.row_status == s2.row_status);
}

TEST_CASE("tableau row with the all-slack basis is the original row") {
  const MilpInstance inst =
      box_lp({1.0, 1.0}, {0.0, 0.0}, {3.0, 3.0}, {le({{0, 1.0}, {1, 1.0}}, 4.0)});
  const LpRelaxation relax(inst);
  SimplexSolver solver(relax);
  const LpSolution sol = solver.solve();
  REQUIRE(sol.status == LpStatus::Optimal);
  REQUIRE(sol.row_status[0] == BasisStatus::Basic);
  const TableauRow t = solver.tableau_row(sol, solver.slack_col(0));
  CHECK(t.value == doctest::Approx(4.0));
  REQUIRE(t.coef.size() == 3);
  CHECK(t.coef[0] == doctest::Approx(1.0));
  CHECK(t.coef[1] == doctest::Approx(1.0));
  CHECK(t.coef[2] == doctest::Approx(1.0));
  // Nonbasic columns have no tableau row.
  CHECK_THROWS_AS(solver.tableau_row(sol, 0), NotBasic);
}

TEST_CASE("tableau rows of a 2x2 basis match the hand-computed inverse") {
  // Optimum x = y = 4/3 with both structurals basic; the basis matrix is
  // [[2,1],[1,2]], whose inverse is (1/3)[[2,-1],[-1,2]].
  const MilpInstance inst =
      box_lp({-1.0, -1.0}, {0.0, 0.0}, {kInf, kInf},
             {le({{0, 2.0}, {1, 1.0}}, 4.0), le({{0, 1.0}, {1, 2.0}}, 4.0)});
  const LpRelaxation relax(inst);
  SimplexSolver solver(relax);
  const LpSolution sol = solver.solve();
  REQUIRE(sol.status == LpStatus::Optimal);
  REQUIRE(sol.var_status[0] == BasisStatus::Basic);
  REQUIRE(sol.var_status[1] == BasisStatus::Basic);

  const TableauRow tx = solver.tableau_row(sol, 0);
  CHECK(tx.value == doctest::Approx(4.0 / 3.0).epsilon(1e-9));
  CHECK(tx.coef[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(tx.coef[1] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(tx.coef[2] == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(tx.coef[3] == doctest::Approx(-1.0 / 3.0).epsilon(1e-9));

  const TableauRow ty = solver.tableau_row(sol, 1);
  CHECK(ty.value == doctest::Approx(4.0 / 3.0).epsilon(1e-9));
  CHECK(ty.coef[0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(ty.coef[1] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(ty.coef[2] == doctest::Approx(-1.0 / 3.0).epsilon(1e-9));
  CHECK(ty.coef[3] == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("tableau rows reconstruct from the row weights on random LPs") {
  // Every tableau row is a weight vector over the original rows (the weights
  // are its slack entries, since slack columns form the identity). Check that
  // applying those weights to the raw data reproduces the structural entries,
  // that basic columns carry unit vectors, and that values match the primal.
  Rng rng(derive_seed(7, "lp-tableau"));
  int rows_checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const MilpInstance inst = oracle::random_box_lp(rng, 10, 10);
    const LpRelaxation relax(inst);
    SimplexSolver solver(relax);
    const LpSolution sol = solver.solve();
    if (sol.status != LpStatus::Optimal) continue;
    const int n = inst.n_vars;
    const int m = int(inst.rows.size());
    std::vector<std::vector<double>> dense(size_t(m),
                                           std::vector<double>(size_t(n), 0.0));
    for (int i = 0; i < m; ++i)
      for (const auto& [j, v] : inst.rows[size_t(i)].coeffs)
        dense[size_t(i)][size_t(j)] = v;

    std::vector<int> basic_cols;
    for (int j = 0; j < n; ++j)
      if (sol.var_status[size_t(j)] == BasisStatus::Basic)
        basic_cols.push_back(j);
    for (int i = 0; i < m; ++i)
      if (sol.row_status[size_t(i)] == BasisStatus::Basic)
        basic_cols.push_back(solver.slack_col(i));

    for (const int col : basic_cols) {
      const TableauRow t = solver.tableau_row(sol, col);
      REQUIRE(t.coef.size() == size_t(n + m));
      for (int j = 0; j < n; ++j) {
        double from_weights = 0.0;
        for (int i = 0; i < m; ++i)
          from_weights += t.coef[size_t(n + i)] * dense[size_t(i)][size_t(j)];
        CHECK(std::fabs(t.coef[size_t(j)] - from_weights) <= 1e-7);
      }
      for (const int other : basic_cols) {
        const int idx = other < n ? other : n + (other - solver.slack_col(0));
        const double expect = other == col ? 1.0 : 0.0;
        CHECK(std::fabs(t.coef[size_t(idx)] - expect) <= 1e-7);
      }
      if (col < n) {
        CHECK(std::fabs(t.value - sol.primal[size_t(col)]) <= 1e-7);
      } else {
        const int i = col - solver.slack_col(0);
        const Row& r = inst.rows[size_t(i)];
        CHECK(std::fabs(t.value - (r.rhs - r.activity(sol.primal))) <= 1e-7);
      }
      ++rows_checked;
    }
  }
  CHECK(rows_checked >= 50);
}

TEST_CASE("warm restarts agree with cold solves after cuts and bound changes") {
  Rng rng(derive_seed(7, "lp-warm"));
  int cut_compared = 0, bound_compared = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + int(rng.below(5));  // 2..6
    const int m = 1 + int(rng.below(6));  // 1..6
    const MilpInstance inst = oracle::random_box_lp(rng, n, m);
    const LpRelaxation relax(inst);
    SimplexSolver solver(relax);
    const LpSolution sol = solver.solve();
    if (sol.status != LpStatus::Optimal) continue;
    CAPTURE(trial);

    // (a) A random plane just below the optimum, so the cut always bites.
    Row cut;
    for (int j = 0; j < n; ++j) {
      const double v = double(rng.uniform_int(-3, 3));
      if (v != 0.0) cut.coeffs.emplace_back(j, v);
    }
    if (cut.coeffs.empty()) cut.coeffs.emplace_back(0, 1.0);
    cut.rhs = cut.activity(sol.primal) - 1.0;

    solver.push_state();
    solver.add_cut_row(cut);
    const LpSolution warm = solver.resolve();
    solver.pop_state();

    LpRelaxation with_cut(inst);
    with_cut.append_cut(cut);
    const LpSolution cold = solve_lp(with_cut);
    REQUIRE(warm.status == cold.status);
    if (warm.status == LpStatus::Optimal) {
      const double scale = 1.0 + std::fabs(cold.objective);
      CHECK(std::fabs(warm.objective - cold.objective) <= 1e-8 * scale);
      // Shrinking the feasible region cannot improve a minimum.
      CHECK(warm.objective >= sol.objective - 1e-9);
      check_feasible(inst, warm.primal, 1e-7);
      ++cut_compared;
    }

    // (b) Branching-style upper-bound tightening on one variable.
    const int j = int(rng.below(uint64_t(n)));
    const double floored = std::floor(sol.primal[size_t(j)] - 1e-9);
    if (floored < inst.var_lower[size_t(j)]) continue;
    solver.push_state();
    solver.set_var_bounds(j, inst.var_lower[size_t(j)], floored);
    const LpSolution warm_b = solver.resolve();
    solver.pop_state();

    MilpInstance tightened = inst;
    tightened.var_upper[size_t(j)] = floored;
    const LpRelaxation relax_b(tightened);
    const LpSolution cold_b = solve_lp(relax_b);
    REQUIRE(warm_b.status == cold_b.status);
    if (warm_b.status == LpStatus::Optimal) {
      const double scale = 1.0 + std::fabs(cold_b.objective);
      CHECK(std::fabs(warm_b.objective - cold_b.objective) <= 1e-8 * scale);
      CHECK(warm_b.objective >= sol.objective - 1e-9);
      ++bound_compared;
    }
  }
  CHECK(cut_compared >= 20);
  CHECK(bound_compared >= 20);
}

TEST_CASE("push and pop restore the solver exactly") {
  Rng rng(derive_seed(7, "lp-pushpop"));
  MilpInstance inst;
  // Draw until feasible so the body below always runs.
  do {
    inst = oracle::random_box_lp(rng, 5, 5);
  } while (!oracle::lp_by_vertex_enumeration(inst).feasible);
  const LpRelaxation relax(inst);
  SimplexSolver solver(relax);
  const LpSolution sol = solver.solve();
  REQUIRE(sol.status == LpStatus::Optimal);

  std::vector<double> values;
  std::vector<BasisStatus> statuses;
  for (int j = 0; j < solver.n_structural(); ++j) {
    values.push_back(solver.col_value(j));
    statuses.push_back(solver.col_status(j));
  }
  for (int i = 0; i < solver.n_rows(); ++i) {
    values.push_back(solver.col_value(solver.slack_col(i)));
    statuses.push_back(solver.col_status(solver.slack_col(i)));
  }

  solver.push_state();
  Row cut = le({{0, 1.0}, {1, 1.0}}, sol.primal[0] + sol.primal[1] - 0.5);
  solver.add_cut_row(cut);
  solver.set_var_bounds(2, inst.var_lower[2], inst.var_upper[2] - 0.5);
  (void)solver.resolve();

  solver.push_state();
  solver.set_var_bounds(0, inst.var_lower[0], inst.var_lower[0]);
  (void)solver.resolve();
  solver.pop_state();
  solver.pop_state();

  REQUIRE(solver.n_rows() == int(inst.rows.size()));
  size_t k = 0;
  for (int j = 0; j < solver.n_structural(); ++j, ++k) {
    CHECK(solver.col_value(j) == values[k]);
    CHECK(solver.col_status(j) == statuses[k]);
  }
  for (int i = 0; i < solver.n_rows(); ++i, ++k) {
    CHECK(solver.col_value(solver.slack_col(i)) == values[k]);
    CHECK(solver.col_status(solver.slack_col(i)) == statuses[k]);
  }
  // The old solution belongs to a dead state generation.
  CHECK_THROWS_AS(solver.tableau_row(sol, 0), StaleSolution);
  // Re-solving from the restored basis reproduces the objective bit-for-bit.
  const LpSolution again = solver.resolve();
  CHECK(again.objective == sol.objective);
}

TEST_CASE("branch and bound on hand-checkable instances") {
  SUBCASE("fractional LP apex rounds down to the lattice optimum") {
    MilpInstance inst =
        box_lp({0.0, -1.0}, {0.0, 0.0}, {kInf, kInf},
               {le({{0, 3.0}, {1, 2.0}}, 6.0), le({{0, -3.0}, {1, 2.0}}, 0.0)});
    inst.integrality = {0, 1};
    const MilpBound bound = solve_milp_bnb(inst);
    CHECK(bound.z_opt == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(bound.proved_optimal);
    // Apex (1, 1.5) is fractional, but the floor dive lands exactly on the
    // lattice optimum (1, 1) and the unit cutoff -2 already exceeds the root
    // bound -1.5, so the whole tree prunes at the root.
    CHECK(bound.nodes_explored == 1);
    CHECK(std::fabs(bound.incumbent[1] - 1.0) <= 1e-6);
  }
  SUBCASE("integral relaxation finishes at the root") {
    MilpInstance inst = box_lp({-1.0, -1.0}, {0.0, 0.0}, {1.0, 1.0},
                               {le({{0, 1.0}, {1, 1.0}}, 2.0)});
    inst.integrality = {0, 1};
    const MilpBound bound = solve_milp_bnb(inst);
    CHECK(bound.z_opt == doctest::Approx(-2.0));
    CHECK(bound.nodes_explored == 1);
    CHECK(bound.proved_optimal);
  }
  SUBCASE("LP-feasible but lattice-empty instances throw") {
    MilpInstance inst = box_lp({1.0}, {0.0}, {1.0},
                               {le({{0, 2.0}}, 1.0), le({{0, -2.0}}, -1.0)});
    inst.integrality = {0};
    CHECK_THROWS_AS(solve_milp_bnb(inst), MilpInfeasible);
  }
}

TEST_CASE("branch and bound equals exhaustive enumeration on small binaries") {
  Rng rng(derive_seed(7, "bnb-enum"));
  int feasible_seen = 0, infeasible_seen = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 3 + trial % 6;  // 3..8 binary variables
    const int m = 2 + trial % 4;
    const MilpInstance inst = oracle::random_binary_milp(rng, n, m);
    const oracle::MilpRef ref = oracle::milp_by_enumeration(inst);
    CAPTURE(trial);
    if (!ref.feasible) {
      CHECK_THROWS_AS(solve_milp_bnb(inst), MilpInfeasible);
      ++infeasible_seen;
      continue;
    }
    const MilpBound bound = solve_milp_bnb(inst);
    ++feasible_seen;
    CHECK(bound.proved_optimal);
    CHECK(bound.z_opt == ref.objective);  // integer data: exact agreement
    check_feasible(inst, bound.incumbent, 1e-9);
    for (int j : inst.integrality)
      CHECK(std::fabs(bound.incumbent[size_t(j)] -
                      std::round(bound.incumbent[size_t(j)])) <= 1e-6);
  }
  CHECK(feasible_seen >= 60);
  CHECK(infeasible_seen >= 5);
}
