#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "lp.hpp"
#include "separate.hpp"

namespace cutlab {

namespace {

bool near_integer(double v) {
  return std::fabs(v - std::round(v)) <= Tols::integrality;
}

// Most-fractional integral variable (closest to .5), smallest index on ties;
// -1 when the point is integer-feasible.
int pick_branch_var(const MilpInstance& inst, const std::vector<double>& x) {
  int best = -1;
  double best_dist = kInf;
  for (int j : inst.integrality) {
    const double f = x[size_t(j)] - std::floor(x[size_t(j)]);
    if (std::min(f, 1.0 - f) <= Tols::integrality) continue;
    const double dist = std::fabs(f - 0.5);
    if (dist < best_dist - 1e-12) {
      best_dist = dist;
      best = j;
    }
  }
  return best;
}

}  // namespace

MilpBound solve_milp_bnb(const MilpInstance& instance, long node_limit,
                         int root_cut_rounds) {
  LpRelaxation relax(instance);
  SimplexSolver solver(relax);
  LpSolution root = solver.solve();
  if (root.status == LpStatus::Infeasible)
    throw MilpInfeasible("relaxation infeasible: " + instance.name);
  if (root.status == LpStatus::Unbounded)
    throw UnboundedRelaxation("relaxation unbounded: " + instance.name);

  // With an all-integer objective over all-integer variables, any improving
  // point must beat the incumbent by a full unit, which sharpens pruning.
  bool integral_obj = true;
  {
    std::vector<bool> is_int(size_t(instance.n_vars), false);
    for (int j : instance.integrality) is_int[size_t(j)] = true;
    for (int j = 0; j < instance.n_vars; ++j) {
      const double c = instance.objective[size_t(j)];
      if (is_int[size_t(j)] ? !near_integer(c) : c != 0.0) {
        integral_obj = false;
        break;
      }
    }
  }

  MilpBound out;
  out.z_opt = kInf;
  long nodes = 1;  // the root
  bool limit_hit = false;

  // Column -> (row, coefficient) incidence for the integral variables, used
  // by the unit-move polish below.
  std::vector<std::vector<std::pair<int, double>>> var_rows(
      size_t(instance.n_vars));
  for (size_t i = 0; i < instance.rows.size(); ++i)
    for (const auto& [j, v] : instance.rows[i].coeffs)
      var_rows[size_t(j)].push_back({int(i), v});

  // Integral variables by ascending cost: the refill order that adds the
  // most valuable units first.
  std::vector<int> add_order = instance.integrality;
  std::stable_sort(add_order.begin(), add_order.end(), [&](int a, int b) {
    return instance.objective[size_t(a)] < instance.objective[size_t(b)];
  });

  // Greedy local search on the integral coordinates: step any variable by
  // +-1 in its improving direction, then trade a unit between two variables
  // when the exchange pays, while the point stays inside its original box and
  // every row. Plateaus of near-ties (many columns with similar payoff) leave
  // the LP leaves a few units short; this closes most of that gap.
  const auto polish = [&](std::vector<double>& x) {
    std::vector<double> act(instance.rows.size());
    for (size_t i = 0; i < instance.rows.size(); ++i)
      act[i] = instance.rows[i].activity(x);
    const auto fits = [&](int j, double dir) {
      const double v = x[size_t(j)] + dir;
      if (v < instance.var_lower[size_t(j)] - 1e-9 ||
          v > instance.var_upper[size_t(j)] + 1e-9)
        return false;
      for (const auto& [i, a] : var_rows[size_t(j)]) {
        const Row& row = instance.rows[size_t(i)];
        const double na = act[size_t(i)] + a * dir;
        const bool ok = row.relation == Relation::LE ? na <= row.rhs + 1e-9
                        : row.relation == Relation::GE
                            ? na >= row.rhs - 1e-9
                            : std::fabs(na - row.rhs) <= 1e-9;
        if (!ok) return false;
      }
      return true;
    };
    const auto apply = [&](int j, double dir) {
      x[size_t(j)] += dir;
      for (const auto& [i, a] : var_rows[size_t(j)]) act[size_t(i)] += a * dir;
    };
    const auto try_step = [&](int j, double dir) {
      if (!fits(j, dir)) return false;
      apply(j, dir);
      return true;
    };
    // One unit j -> k: release j first, then see whether k fits in the freed
    // room, rolling back otherwise. Swaps whose intermediate state is
    // infeasible (equality ties between j and k) are conservatively skipped.
    const auto try_swap = [&](int j, int k) {
      if (!fits(j, -1.0)) return false;
      apply(j, -1.0);
      if (try_step(k, 1.0)) return true;
      apply(j, 1.0);
      return false;
    };
    for (int sweep = 0, moved = 1; moved && sweep < 200; ++sweep) {
      moved = 0;
      for (const int j : instance.integrality) {
        const double c = instance.objective[size_t(j)];
        if (c == 0.0) continue;
        const double dir = c < 0.0 ? 1.0 : -1.0;
        while (try_step(j, dir)) moved = 1;
      }
      if (moved) continue;
      for (const int j : instance.integrality) {
        for (const int k : instance.integrality) {
          // Trading a unit of j for a unit of k improves by c_k - c_j.
          if (instance.objective[size_t(k)] <
              instance.objective[size_t(j)] - 1e-12) {
            while (try_swap(j, k)) moved = 1;
          }
        }
      }
      if (moved) continue;
      // Eject one unit to free row room, refill greedily with the best units
      // that now fit, and keep the trade only on a net gain. Reaches the
      // one-for-many exchanges the pairwise swaps cannot express.
      for (const int j : instance.integrality) {
        while (fits(j, -1.0)) {
          const std::vector<double> x_keep = x;
          const std::vector<double> act_keep = act;
          apply(j, -1.0);
          double delta = -instance.objective[size_t(j)];
          for (const int k : add_order) {
            if (k == j) continue;
            const double ck = instance.objective[size_t(k)];
            if (ck >= 0.0) break;  // sorted: no improving adds remain
            while (fits(k, 1.0)) {
              apply(k, 1.0);
              delta += ck;
            }
          }
          if (delta < -1e-9) {
            moved = 1;
            continue;
          }
          x = x_keep;
          act = act_keep;
          break;
        }
      }
    }
  };

  // Snap integral coordinates so the candidate is the exact lattice point the
  // LP landed on, polish it, then keep it if it beats the incumbent.
  const auto consider = [&](const std::vector<double>& primal) {
    std::vector<double> x = primal;
    for (int k : instance.integrality) x[size_t(k)] = std::round(x[size_t(k)]);
    polish(x);
    double z = 0.0;
    for (int k = 0; k < instance.n_vars; ++k)
      z += instance.objective[size_t(k)] * x[size_t(k)];
    if (z < out.z_opt - 1e-9) {
      out.z_opt = z;
      out.incumbent = std::move(x);
    }
  };

  // The cutoff any improving point must beat. With an integral objective a
  // strict improvement means a full unit; otherwise an epsilon.
  const auto cutoff = [&] {
    return integral_obj ? out.z_opt - 1.0 + Tols::integrality
                        : out.z_opt - 1e-9;
  };

  // Cheap dives: fix every integral variable to a rounding of an LP point,
  // re-solve the continuous rest, and use any feasible result as an early
  // incumbent. Pruning starts at node one instead of after the first leaf.
  const auto dive = [&](const std::vector<double>& src, double (*rnd)(double)) {
    solver.push_state();
    bool integral_fix = true;
    for (const int j : instance.integrality) {
      const double r = std::clamp(rnd(src[size_t(j)]), solver.col_lower(j),
                                  solver.col_upper(j));
      if (!near_integer(r)) {
        integral_fix = false;  // clamped onto a fractional bound
        break;
      }
      solver.set_var_bounds(j, r, r);
    }
    if (integral_fix) {
      try {
        const LpSolution fixed = resolve_or_recover(solver);
        if (fixed.status == LpStatus::Optimal) consider(fixed.primal);
      } catch (const NumericalBreakdown&) {
        // Dives only prime the incumbent; a basis even recover() cannot
        // repair just forfeits that head start.
      }
    }
    solver.pop_state();
  };
  const auto dive_all = [&](const std::vector<double>& src) {
    dive(src, [](double v) { return std::round(v); });
    dive(src, [](double v) { return std::floor(v); });
    dive(src, [](double v) { return std::ceil(v); });
  };

  // Optional cut-and-branch: tighten the root with our own separator before
  // any branching. Cuts are valid for every integral point of the current
  // boxes, so the search stays exact; weak big-M relaxations shrink from
  // hopeless to tractable. Stops when the bound stalls or the budget is out.
  int rounds_left = root_cut_rounds;
  const auto cut_rounds = [&] {
    int flat = 0;
    while (rounds_left > 0 && flat < 2) {
      --rounds_left;
      const CutPool pool = separate(root, relax, solver);
      if (pool.empty()) break;
      std::vector<int> order(pool.cuts.size());
      std::iota(order.begin(), order.end(), 0);
      const auto efficacy = [&](int k) {
        double n2 = 0.0;
        for (const auto& [j, v] : pool.cuts[size_t(k)].row.coeffs) n2 += v * v;
        return pool.cuts[size_t(k)].violation / std::sqrt(n2);
      };
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double ea = efficacy(a), eb = efficacy(b);
        return ea != eb ? ea > eb : a < b;
      });
      const int take = std::min<int>(10, int(order.size()));
      for (int t = 0; t < take; ++t) {
        Row r = pool.cuts[size_t(order[size_t(t)])].row;
        relax.append_cut(r);
        solver.add_cut_row(r);
      }
      const double z_before = root.objective;
      root = resolve_or_recover(solver);
      if (root.status == LpStatus::Infeasible) {
        // Cuts never exclude integral points, so infeasibility means there
        // are none -- unless an incumbent in hand proves it is numerics.
        if (out.z_opt < kInf)
          throw NumericalBreakdown("root cut loop cut off the incumbent: " +
                                   instance.name);
        throw MilpInfeasible("no integer-feasible point: " + instance.name);
      }
      if (root.status != LpStatus::Optimal)
        throw NumericalBreakdown("root cut loop lost optimality: " +
                                 instance.name);
      const double gain = root.objective - z_before;
      flat = gain <= 1e-6 * (1.0 + std::fabs(z_before)) ? flat + 1 : 0;
    }
  };

  // Reduced-cost tightening: moving a nonbasic integral variable t units off
  // its bound costs at least |d_j| t, so any point better than the incumbent
  // keeps x_j within slack/|d_j| of that bound. Shrinking the boxes is exact;
  // tightening only the opposite bound also leaves the present basis optimal,
  // so no re-solve is owed. Returns whether any box shrank.
  const auto tighten_boxes = [&](const LpSolution& sol) -> bool {
    if (out.z_opt >= kInf || sol.status != LpStatus::Optimal) return false;
    const double slack = cutoff() - sol.objective;
    if (slack < 0.0 || slack >= kInf) return false;
    bool changed = false;
    for (const int j : instance.integrality) {
      const double d = sol.reduced_costs[size_t(j)];
      const double lo = solver.col_lower(j), hi = solver.col_upper(j);
      if (sol.var_status[size_t(j)] == BasisStatus::AtLower && d > 1e-9) {
        const double new_hi = lo + std::floor(slack / d + Tols::integrality);
        if (new_hi < hi - 0.5) {
          solver.set_var_bounds(j, lo, new_hi);
          changed = true;
        }
      } else if (sol.var_status[size_t(j)] == BasisStatus::AtUpper &&
                 d < -1e-9) {
        const double new_lo = hi - std::floor(slack / -d + Tols::integrality);
        if (new_lo > lo + 0.5) {
          solver.set_var_bounds(j, new_lo, hi);
          changed = true;
        }
      }
    }
    return changed;
  };

  // At the root the boxes collapse the wide plateaus of near-ties the dives
  // exposed; re-solving can then prove infeasibility of improving on the
  // incumbent, which certifies it outright (the `true` return).
  const auto rc_tighten = [&]() -> bool {
    if (!tighten_boxes(root)) return false;
    root = resolve_or_recover(solver);
    if (root.status == LpStatus::Infeasible) return true;
    if (root.status != LpStatus::Optimal)
      throw NumericalBreakdown("root tightening lost optimality: " +
                               instance.name);
    return false;
  };

  // Cuts raise the bound, the dives supply an incumbent, and the incumbent
  // powers the box tightening; `rc_tighten` alone can finish the proof.
  // Returns true when the proof is already complete at the root.
  const auto strengthen_root = [&]() -> bool {
    // Any pushes/pops since the last solve retired the stamp on `root`;
    // re-issue it from the current (still optimal) basis first.
    root = resolve_or_recover(solver);
    if (root.status != LpStatus::Optimal)
      throw NumericalBreakdown("root basis lost optimality: " + instance.name);
    cut_rounds();
    dive_all(root.primal);
    root = resolve_or_recover(solver);
    if (root.status != LpStatus::Optimal)
      throw NumericalBreakdown("root basis lost optimality: " + instance.name);
    return rc_tighten();
  };

  std::function<void(const LpSolution&)> dfs = [&](const LpSolution& sol) {
    if (out.z_opt < kInf && sol.objective > cutoff()) return;
    const int j = pick_branch_var(instance, sol.primal);
    if (j < 0) {
      consider(sol.primal);
      return;
    }
    // Node-local box shrinking; the changes sit inside the parent's snapshot
    // and vanish with the node. Fractional (hence basic) variables, the
    // branch variable included, are never touched.
    tighten_boxes(sol);
    // Deep-node LPs land in different basins than the root's, so rounding
    // them every few thousand nodes diversifies the incumbent hunt cheaply.
    if (nodes % 5000 == 0) dive_all(sol.primal);

    const double xj = sol.primal[size_t(j)];
    const double fl = std::floor(xj);
    const double lo = solver.col_lower(j), hi = solver.col_upper(j);
    struct Child {
      double lo, hi;
    };
    const Child down{lo, fl}, up{fl + 1.0, hi};
    const bool down_first = (xj - fl) <= 0.5;
    const Child order[2] = {down_first ? down : up, down_first ? up : down};
    for (const Child& child : order) {
      if (limit_hit) return;
      if (nodes >= node_limit) {
        limit_hit = true;
        return;
      }
      ++nodes;
      solver.push_state();
      solver.set_var_bounds(j, child.lo, child.hi);
      const LpSolution csol = resolve_or_recover(solver);
      if (csol.status == LpStatus::Optimal) dfs(csol);
      solver.pop_state();
    }
  };

  if (strengthen_root()) {
    out.nodes_explored = nodes;
    out.proved_optimal = true;
    return out;
  }

  dfs(root);
  out.nodes_explored = nodes;
  out.proved_optimal = !limit_hit;
  if (!limit_hit && out.z_opt >= kInf)
    throw MilpInfeasible("no integer-feasible point: " + instance.name);
  return out;
}

}  // namespace cutlab
