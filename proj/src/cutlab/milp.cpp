#include "milp.hpp"

#include <algorithm>
#include <cmath>

namespace cutlab {

const char* separator_name(SeparatorKind k) {
  switch (k) {
    case SeparatorKind::GomoryFractional: return "gomoryfrac";
    case SeparatorKind::GomoryMixedInteger: return "gmi";
  }
  return "?";
}

double Row::norm2() const {
  double s = 0.0;
  for (const auto& [j, v] : coeffs) s += v * v;
  return std::sqrt(s);
}

double Row::norm_inf() const {
  double s = 0.0;
  for (const auto& [j, v] : coeffs) s = std::max(s, std::fabs(v));
  return s;
}

namespace {

// Sorts, validates indices, drops explicit zeros. Throws on duplicates or
// out-of-range references.
Row clean_row(Row r, int n_vars) {
  std::sort(r.coeffs.begin(), r.coeffs.end());
  std::vector<std::pair<int, double>> kept;
  kept.reserve(r.coeffs.size());
  int prev = -1;
  for (const auto& [j, v] : r.coeffs) {
    if (j < 0 || j >= n_vars)
      throw IndexOutOfRange("row references variable " + std::to_string(j) +
                            " outside [0, " + std::to_string(n_vars) + ")");
    if (j == prev)
      throw DuplicateCoefficient("row has two coefficients for variable " +
                                 std::to_string(j));
    prev = j;
    if (v != 0.0) kept.emplace_back(j, v);
  }
  r.coeffs = std::move(kept);
  return r;
}

Row negated(const Row& r) {
  Row out = r;
  for (auto& [j, v] : out.coeffs) v = -v;
  out.rhs = -r.rhs;
  out.relation = Relation::LE;
  return out;
}

}  // namespace

MilpInstance normalize(const MilpInstance& instance) {
  MilpInstance out = instance;
  if (out.objective.empty()) throw EmptyObjective("objective vector is empty");
  out.n_vars = int(out.objective.size());
  if (int(out.var_lower.size()) != out.n_vars ||
      int(out.var_upper.size()) != out.n_vars)
    throw InvalidInstance("bound vectors disagree with objective length");
  for (int j = 0; j < out.n_vars; ++j)
    if (out.var_lower[j] > out.var_upper[j])
      throw InvalidInstance("lower bound exceeds upper bound on variable " +
                            std::to_string(j));
  for (int j : out.integrality)
    if (j < 0 || j >= out.n_vars)
      throw IndexOutOfRange("integrality index " + std::to_string(j) +
                            " outside [0, " + std::to_string(out.n_vars) + ")");
  std::sort(out.integrality.begin(), out.integrality.end());
  out.integrality.erase(
      std::unique(out.integrality.begin(), out.integrality.end()),
      out.integrality.end());

  if (out.sense == Sense::Maximize) {
    for (double& c : out.objective) c = (c == 0.0) ? 0.0 : -c;
    out.sense = Sense::Minimize;
    out.flipped_from_max = true;
  }

  std::vector<Row> rows;
  rows.reserve(out.rows.size());
  for (const Row& raw : out.rows) {
    Row r = clean_row(raw, out.n_vars);
    if (r.coeffs.empty()) {
      // Constant row: either vacuous or a contradiction.
      const bool sat = (r.relation == Relation::LE && r.rhs >= 0.0) ||
                       (r.relation == Relation::GE && r.rhs <= 0.0) ||
                       (r.relation == Relation::EQ && r.rhs == 0.0);
      if (!sat) throw InvalidInstance("constant row is infeasible");
      continue;
    }
    switch (r.relation) {
      case Relation::LE: rows.push_back(std::move(r)); break;
      case Relation::GE: rows.push_back(negated(r)); break;
      case Relation::EQ: {
        Row le = r;
        le.relation = Relation::LE;
        rows.push_back(le);
        rows.push_back(negated(r));
        break;
      }
    }
  }
  out.rows = std::move(rows);
  return out;
}

LpRelaxation::LpRelaxation(const MilpInstance& instance) : base(&instance) {
  var_zero_streak.assign(size_t(instance.n_vars), 0);
  row_loose_streak.assign(instance.rows.size(), 0);
  row_created_at.assign(instance.rows.size(), 0);
}

void LpRelaxation::append_cut(Row cut) {
  if (cut.relation != Relation::LE)
    throw InvalidCutIndices("cuts must be in \"<=\" form");
  if (cut.coeffs.empty()) throw InvalidCutIndices("cut row is empty");
  int prev = -1;
  for (const auto& [j, v] : cut.coeffs) {
    if (j < 0 || j >= n_vars() || j <= prev)
      throw InvalidCutIndices("cut row has invalid or unsorted indices");
    prev = j;
    if (v == 0.0) throw InvalidCutIndices("cut row stores an explicit zero");
  }
  cut.origin = RowOrigin::Cut;
  appended_cuts.push_back(std::move(cut));
  row_loose_streak.push_back(0);
  row_created_at.push_back(lp_solve_count);
}

void LpRelaxation::note_solution(const std::vector<double>& x) {
  ++lp_solve_count;
  for (int j = 0; j < n_vars(); ++j)
    var_zero_streak[size_t(j)] =
        std::fabs(x[size_t(j)]) <= Tols::integrality
            ? var_zero_streak[size_t(j)] + 1
            : 0;
  for (int i = 0; i < n_rows(); ++i) {
    const Row& r = row(i);
    const double slack = r.rhs - r.activity(x);
    row_loose_streak[size_t(i)] =
        slack > Tols::feas ? row_loose_streak[size_t(i)] + 1 : 0;
  }
}

}  // namespace cutlab
