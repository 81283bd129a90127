#pragma once

// Independent reference implementations used to check the solver stack:
// brute-force vertex enumeration for small box-bounded LPs and integer-grid
// enumeration for small all-integer MILPs. Deliberately simple and slow.

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "cutlab/lp.hpp"
#include "cutlab/milp.hpp"
#include "cutlab/rng.hpp"

namespace oracle {

struct LpRef {
  bool feasible = false;
  double objective = 0.0;
  std::vector<double> argmin;
};

// Solves M x = rhs by Gaussian elimination; nullopt when (near-)singular.
inline std::optional<std::vector<double>> dense_solve(
    std::vector<std::vector<double>> M, std::vector<double> rhs) {
  const size_t n = rhs.size();
  for (size_t k = 0; k < n; ++k) {
    size_t p = k;
    for (size_t r = k + 1; r < n; ++r)
      if (std::fabs(M[r][k]) > std::fabs(M[p][k])) p = r;
    if (std::fabs(M[p][k]) < 1e-9) return std::nullopt;
    std::swap(M[p], M[k]);
    std::swap(rhs[p], rhs[k]);
    for (size_t r = 0; r < n; ++r) {
      if (r == k) continue;
      const double f = M[r][k] / M[k][k];
      if (f == 0.0) continue;
      for (size_t c = k; c < n; ++c) M[r][c] -= f * M[k][c];
      rhs[r] -= f * rhs[k];
    }
  }
  std::vector<double> x(n);
  for (size_t k = 0; k < n; ++k) x[k] = rhs[k] / M[k][k];
  return x;
}

// Minimum of c'x over {Ax <= b, l <= x <= u} (all bounds finite) by
// enumerating every basic point: each choice of n active planes from
// rows + lower bounds + upper bounds.
inline LpRef lp_by_vertex_enumeration(const cutlab::MilpInstance& inst) {
  const int n = inst.n_vars;
  struct Plane {
    std::vector<double> a;
    double rhs;
  };
  std::vector<Plane> planes;
  for (const auto& row : inst.rows) {
    Plane p{std::vector<double>(size_t(n), 0.0), row.rhs};
    for (const auto& [j, v] : row.coeffs) p.a[size_t(j)] = v;
    planes.push_back(std::move(p));
  }
  for (int j = 0; j < n; ++j) {
    Plane lo{std::vector<double>(size_t(n), 0.0), inst.var_lower[size_t(j)]};
    lo.a[size_t(j)] = 1.0;
    planes.push_back(lo);
    Plane up{std::vector<double>(size_t(n), 0.0), inst.var_upper[size_t(j)]};
    up.a[size_t(j)] = 1.0;
    planes.push_back(up);
  }

  LpRef best;
  std::vector<int> pick(static_cast<size_t>(n));
  const int P = int(planes.size());

  auto feasible_at = [&](const std::vector<double>& x) {
    for (int j = 0; j < n; ++j) {
      if (x[size_t(j)] < inst.var_lower[size_t(j)] - 1e-7) return false;
      if (x[size_t(j)] > inst.var_upper[size_t(j)] + 1e-7) return false;
    }
    for (const auto& row : inst.rows) {
      double act = 0.0;
      for (const auto& [j, v] : row.coeffs) act += v * x[size_t(j)];
      if (act > row.rhs + 1e-7 * (1.0 + std::fabs(row.rhs))) return false;
    }
    return true;
  };

  std::function<void(int, int)> choose = [&](int next, int depth) {
    if (depth == n) {
      std::vector<std::vector<double>> M;
      std::vector<double> rhs;
      for (int d = 0; d < n; ++d) {
        M.push_back(planes[size_t(pick[size_t(d)])].a);
        rhs.push_back(planes[size_t(pick[size_t(d)])].rhs);
      }
      auto x = dense_solve(std::move(M), std::move(rhs));
      if (!x || !feasible_at(*x)) return;
      double z = 0.0;
      for (int j = 0; j < n; ++j) z += inst.objective[size_t(j)] * (*x)[size_t(j)];
      if (!best.feasible || z < best.objective) {
        best.feasible = true;
        best.objective = z;
        best.argmin = *x;
      }
      return;
    }
    for (int p = next; p <= P - (n - depth); ++p) {
      pick[size_t(depth)] = p;
      choose(p + 1, depth + 1);
    }
  };
  choose(0, 0);
  return best;
}

struct MilpRef {
  bool feasible = false;
  double objective = 0.0;
  std::vector<double> argmin;
};

// Visits every integer-feasible point of an all-integer, finite-box instance.
inline void for_each_lattice_point(
    const cutlab::MilpInstance& inst,
    const std::function<void(const std::vector<double>&)>& fn) {
  const int n = inst.n_vars;
  std::vector<double> x(size_t(n), 0.0);
  std::function<void(int)> walk = [&](int j) {
    if (j == n) {
      for (const auto& row : inst.rows) {
        double act = 0.0;
        for (const auto& [k, v] : row.coeffs) act += v * x[size_t(k)];
        if (act > row.rhs + 1e-9) return;
      }
      fn(x);
      return;
    }
    const long lo = long(std::ceil(inst.var_lower[size_t(j)] - 1e-9));
    const long hi = long(std::floor(inst.var_upper[size_t(j)] + 1e-9));
    for (long v = lo; v <= hi; ++v) {
      x[size_t(j)] = double(v);
      walk(j + 1);
    }
  };
  walk(0);
}

// Minimum over the full integer grid of an all-integer, finite-box instance.
inline MilpRef milp_by_enumeration(const cutlab::MilpInstance& inst) {
  const int n = inst.n_vars;
  MilpRef best;
  for_each_lattice_point(inst, [&](const std::vector<double>& x) {
    double z = 0.0;
    for (int k = 0; k < n; ++k) z += inst.objective[size_t(k)] * x[size_t(k)];
    if (!best.feasible || z < best.objective) {
      best.feasible = true;
      best.objective = z;
      best.argmin = x;
    }
  });
  return best;
}

// Random box-bounded LP with small integer data; roughly one in five draws
// comes out infeasible, exercising both statuses.
inline cutlab::MilpInstance random_box_lp(cutlab::Rng& rng, int n, int m) {
  cutlab::MilpInstance inst;
  inst.name = "random_lp";
  inst.n_vars = n;
  inst.sense = cutlab::Sense::Minimize;
  for (int j = 0; j < n; ++j) {
    inst.objective.push_back(double(rng.uniform_int(-5, 5)));
    const double lo = double(rng.uniform_int(-2, 0));
    inst.var_lower.push_back(lo);
    inst.var_upper.push_back(lo + double(rng.uniform_int(1, 4)));
  }
  for (int i = 0; i < m; ++i) {
    cutlab::Row row;
    for (int j = 0; j < n; ++j) {
      if (rng.uniform() < 0.7) {
        const double v = double(rng.uniform_int(-4, 4));
        if (v != 0.0) row.coeffs.emplace_back(j, v);
      }
    }
    if (row.coeffs.empty())
      row.coeffs.emplace_back(int(rng.below(uint64_t(n))), 1.0);
    row.rhs = double(rng.uniform_int(-3, 10));
    inst.rows.push_back(std::move(row));
  }
  return normalize(inst);
}

// Random all-binary MILP with small integer data.
// Like random_binary_milp but with wider integer boxes so upper-bound shifts
// and floor arithmetic get exercised, not just the 0/1 corner cases.
inline cutlab::MilpInstance random_int_box_milp(cutlab::Rng& rng, int n, int m) {
  cutlab::MilpInstance inst;
  inst.name = "random_int_box";
  inst.n_vars = n;
  inst.sense = cutlab::Sense::Minimize;
  for (int j = 0; j < n; ++j) {
    inst.objective.push_back(double(rng.uniform_int(-6, 6)));
    inst.var_lower.push_back(0.0);
    inst.var_upper.push_back(double(rng.uniform_int(1, 3)));
    inst.integrality.push_back(j);
  }
  for (int i = 0; i < m; ++i) {
    cutlab::Row row;
    for (int j = 0; j < n; ++j) {
      if (rng.uniform() < 0.6) {
        const double v = double(rng.uniform_int(-3, 3));
        if (v != 0.0) row.coeffs.emplace_back(j, v);
      }
    }
    if (row.coeffs.empty())
      row.coeffs.emplace_back(int(rng.below(uint64_t(n))), 1.0);
    row.rhs = double(rng.uniform_int(-2, 9));
    inst.rows.push_back(std::move(row));
  }
  return normalize(inst);
}

inline cutlab::MilpInstance random_binary_milp(cutlab::Rng& rng, int n, int m) {
  cutlab::MilpInstance inst;
  inst.name = "random_binary";
  inst.n_vars = n;
  inst.sense = cutlab::Sense::Minimize;
  for (int j = 0; j < n; ++j) {
    inst.objective.push_back(double(rng.uniform_int(-6, 6)));
    inst.var_lower.push_back(0.0);
    inst.var_upper.push_back(1.0);
    inst.integrality.push_back(j);
  }
  for (int i = 0; i < m; ++i) {
    cutlab::Row row;
    for (int j = 0; j < n; ++j) {
      if (rng.uniform() < 0.6) {
        const double v = double(rng.uniform_int(-4, 4));
        if (v != 0.0) row.coeffs.emplace_back(j, v);
      }
    }
    if (row.coeffs.empty())
      row.coeffs.emplace_back(int(rng.below(uint64_t(n))), 1.0);
    // Keep most instances feasible but the rows binding.
    row.rhs = double(rng.uniform_int(-2, 8));
    inst.rows.push_back(std::move(row));
  }
  return normalize(inst);
}

}  // namespace oracle
