#include "cutlab/generate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "cutlab/rng.hpp"

namespace cutlab {

namespace {

Row le_row(std::vector<std::pair<int, double>> coeffs, double rhs) {
  Row r;
  r.coeffs = std::move(coeffs);
  r.rhs = rhs;
  return r;
}

// Random simple graph with exactly n_edges edges: partial Fisher-Yates over
// the full pair list, then lexicographic order for a stable variable layout.
std::vector<std::pair<int, int>> random_edges(Rng& rng, int n_vertices,
                                              int n_edges) {
  std::vector<std::pair<int, int>> pairs;
  for (int u = 0; u < n_vertices; ++u)
    for (int v = u + 1; v < n_vertices; ++v) pairs.emplace_back(u, v);
  for (int i = 0; i < n_edges; ++i) {
    const size_t j = size_t(i) + size_t(rng.below(uint64_t(pairs.size() - size_t(i))));
    std::swap(pairs[size_t(i)], pairs[j]);
  }
  pairs.resize(size_t(n_edges));
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

MilpInstance gen_maxcut(Rng& rng, const GenSpec& spec) {
  const int nv = spec.maxcut_vertices;
  const int ne = spec.maxcut_edges;
  if (nv < 2 || ne < 1 || ne > nv * (nv - 1) / 2)
    throw InvalidGenSpec("maxcut needs 2 <= |V| and 1 <= |E| <= |V|(|V|-1)/2");

  const auto edges = random_edges(rng, nv, ne);
  MilpInstance inst;
  inst.n_vars = nv + ne;
  inst.sense = Sense::Maximize;
  inst.objective.assign(size_t(inst.n_vars), 0.0);
  inst.var_lower.assign(size_t(inst.n_vars), 0.0);
  inst.var_upper.assign(size_t(inst.n_vars), 1.0);
  for (int j = 0; j < inst.n_vars; ++j) inst.integrality.push_back(j);

  for (int k = 0; k < ne; ++k) {
    const auto [u, v] = edges[size_t(k)];
    const int e = nv + k;
    inst.objective[size_t(e)] = double(rng.uniform_int(1, 10));
    // An edge is cut only if its endpoints land on different sides.
    inst.rows.push_back(le_row({{u, -1.0}, {v, -1.0}, {e, 1.0}}, 0.0));
    inst.rows.push_back(le_row({{u, 1.0}, {v, 1.0}, {e, 1.0}}, 2.0));
  }
  return inst;
}

MilpInstance gen_packing(Rng& rng, int m, int n, bool binary) {
  if (m < 1 || n < 1) throw InvalidGenSpec("packing needs m, n >= 1");

  std::vector<std::vector<double>> a(size_t(m), std::vector<double>(size_t(n), 0.0));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      if (rng.uniform() < 0.3) a[size_t(i)][size_t(j)] = double(rng.uniform_int(0, 5));

  // A column with no positive entry would make the maximization unbounded.
  for (int j = 0; j < n; ++j) {
    bool covered = false;
    for (int i = 0; i < m; ++i) covered = covered || a[size_t(i)][size_t(j)] > 0.0;
    if (!covered)
      a[size_t(rng.below(uint64_t(m)))][size_t(j)] = double(rng.uniform_int(1, 5));
  }

  MilpInstance inst;
  inst.n_vars = n;
  inst.sense = Sense::Maximize;
  for (int j = 0; j < n; ++j) {
    inst.objective.push_back(double(rng.uniform_int(1, 10)));
    inst.var_lower.push_back(0.0);
    inst.var_upper.push_back(kInf);  // tightened below for the integer case
    inst.integrality.push_back(j);
  }

  std::vector<double> b(size_t(m), 0.0);
  for (int i = 0; i < m; ++i) {
    if (binary) {
      // Capacities must bite well below the all-ones activity, or the LP
      // optimum is integral and the instance useless for cut selection.
      const double row_sum =
          std::accumulate(a[size_t(i)].begin(), a[size_t(i)].end(), 0.0);
      const int lo = std::max(1, int(row_sum) / 4);
      const int hi = std::max(lo, 3 * int(row_sum) / 4);
      b[size_t(i)] = double(rng.uniform_int(lo, hi));
    } else {
      b[size_t(i)] = double(rng.uniform_int(9 * n / 10, 10 * n));
    }
  }

  for (int i = 0; i < m; ++i) {
    Row r;
    for (int j = 0; j < n; ++j)
      if (a[size_t(i)][size_t(j)] != 0.0) r.coeffs.emplace_back(j, a[size_t(i)][size_t(j)]);
    r.rhs = b[size_t(i)];
    inst.rows.push_back(std::move(r));
  }

  if (binary) {
    // Unit capacities enter as rows, not just variable bounds, so their
    // slacks take part in tableau-based separation.
    for (int j = 0; j < n; ++j) {
      inst.var_upper[size_t(j)] = 1.0;
      inst.rows.push_back(le_row({{j, 1.0}}, 1.0));
    }
  } else {
    for (int j = 0; j < n; ++j) {
      double ub = kInf;
      for (int i = 0; i < m; ++i)
        if (a[size_t(i)][size_t(j)] > 0.0)
          ub = std::min(ub, std::floor(b[size_t(i)] / a[size_t(i)][size_t(j)]));
      inst.var_upper[size_t(j)] = ub;
    }
  }
  return inst;
}

MilpInstance gen_planning(Rng& rng, int periods) {
  if (periods < 1) throw InvalidGenSpec("planning needs at least one period");
  const int T = periods;

  std::vector<double> demand(size_t(T), 0.0);
  for (int t = 0; t < T; ++t) demand[size_t(t)] = double(rng.uniform_int(1, 10));
  const double setup_cost = double(rng.uniform_int(10, 50));
  const double holding_cost = double(rng.uniform_int(1, 5));
  const double unit_cost = double(rng.uniform_int(1, 5));

  // Variable layout: production p_t, then setup y_t, then stock s_t.
  const auto p = [&](int t) { return t; };
  const auto y = [&](int t) { return T + t; };
  const auto s = [&](int t) { return 2 * T + t; };

  MilpInstance inst;
  inst.n_vars = 3 * T;
  inst.sense = Sense::Minimize;
  inst.objective.assign(size_t(inst.n_vars), 0.0);
  inst.var_lower.assign(size_t(inst.n_vars), 0.0);
  inst.var_upper.assign(size_t(inst.n_vars), kInf);
  for (int t = 0; t < T; ++t) {
    inst.objective[size_t(p(t))] = unit_cost;
    inst.objective[size_t(y(t))] = setup_cost;
    inst.objective[size_t(s(t))] = holding_cost;
    inst.var_upper[size_t(y(t))] = 1.0;
    inst.integrality.push_back(y(t));
  }

  // Producing in t can never usefully exceed the demand still ahead, so the
  // setup link uses the remaining demand as its big-M.
  double remaining = std::accumulate(demand.begin(), demand.end(), 0.0);
  for (int t = 0; t < T; ++t) {
    inst.rows.push_back(le_row({{p(t), 1.0}, {y(t), -remaining}}, 0.0));
    remaining -= demand[size_t(t)];
  }
  for (int t = 0; t < T; ++t) {
    Row balance;  // s_t - s_{t-1} - p_t = -d_t, with s_{-1} = 0
    balance.relation = Relation::EQ;
    balance.rhs = -demand[size_t(t)];
    if (t > 0) balance.coeffs.emplace_back(s(t - 1), -1.0);
    balance.coeffs.emplace_back(p(t), -1.0);
    balance.coeffs.emplace_back(s(t), 1.0);
    inst.rows.push_back(std::move(balance));
  }
  return inst;
}

}  // namespace

const char* family_name(Family f) {
  switch (f) {
    case Family::MaxCut: return "maxcut";
    case Family::Packing: return "packing";
    case Family::BinPacking: return "binpacking";
    case Family::Planning: return "planning";
  }
  return "?";
}

Family family_from_name(const std::string& name) {
  for (const Family f : {Family::MaxCut, Family::Packing, Family::BinPacking,
                         Family::Planning})
    if (name == family_name(f)) return f;
  throw UnknownFamily("unknown instance family: " + name);
}

MilpInstance generate_one(const GenSpec& spec, int index) {
  Rng rng(derive_seed(derive_seed(spec.seed, family_name(spec.family)),
                      uint64_t(index)));
  MilpInstance inst;
  switch (spec.family) {
    case Family::MaxCut:
      inst = gen_maxcut(rng, spec);
      break;
    case Family::Packing:
      inst = gen_packing(rng, spec.packing_rows, spec.packing_vars, false);
      break;
    case Family::BinPacking:
      inst = gen_packing(rng, spec.binpacking_rows, spec.binpacking_vars, true);
      break;
    case Family::Planning:
      inst = gen_planning(rng, spec.planning_periods);
      break;
  }
  inst.name = std::string(family_name(spec.family)) + "_" +
              std::to_string(spec.seed) + "_" + std::to_string(index);
  inst.family_tag = family_name(spec.family);
  inst.generator_version = 1;
  return normalize(inst);
}

std::vector<MilpInstance> generate(const GenSpec& spec) {
  if (spec.count < 0) throw InvalidGenSpec("count must be nonnegative");
  std::vector<MilpInstance> out;
  out.reserve(size_t(spec.count));
  for (int i = 0; i < spec.count; ++i) out.push_back(generate_one(spec, i));
  return out;
}

}  // namespace cutlab
