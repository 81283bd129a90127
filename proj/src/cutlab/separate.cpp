#include "separate.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace cutlab {

double parallelism(const Row& a, const Row& b) {
  double dot = 0.0;
  size_t ia = 0, ib = 0;
  while (ia < a.coeffs.size() && ib < b.coeffs.size()) {
    const int ja = a.coeffs[ia].first, jb = b.coeffs[ib].first;
    if (ja < jb) {
      ++ia;
    } else if (jb < ja) {
      ++ib;
    } else {
      dot += a.coeffs[ia].second * b.coeffs[ib].second;
      ++ia;
      ++ib;
    }
  }
  const double na = a.norm2(), nb = b.norm2();
  if (na < 1e-12 || nb < 1e-12) return 0.0;
  return std::min(std::fabs(dot) / (na * nb), 1.0);
}

namespace {

// Coefficients below this in the tableau are treated as update noise; the
// resulting validity error is far below the 1e-6 cut-validity tolerance for
// the bound ranges this project works with.
constexpr double kCoefZero = 1e-11;
constexpr double kDropTiny = 1e-12;
constexpr double kMaxNormInf = 1e6;
constexpr double kMinNormInf = 1e-9;
constexpr double kMaxDynamism = 1e8;

double frac(double v) { return v - std::floor(v); }

bool value_integral(double v) { return std::fabs(v - std::round(v)) <= 1e-9; }

// A slack is integer-valued over the lattice iff its row has integer
// coefficients on integer variables only and an integer right-hand side.
bool row_is_integral(const Row& r, const MilpInstance& base) {
  if (!value_integral(r.rhs)) return false;
  for (const auto& [j, v] : r.coeffs)
    if (!value_integral(v) || !base.is_integer(j)) return false;
  return true;
}

// One nonbasic column of a tableau row, re-expressed over the shifted
// variable x~ = x - lower (or upper - x), so that x~ >= 0 at the basis.
struct ShiftedTerm {
  int col;          // structural j in [0,n); slack of row i at n+i
  double coef;      // coefficient on x~
  bool integer;     // x~ takes integer values over the lattice
  bool at_upper;    // which bound the shift used (structural only)
};

// Collects the shifted tableau row. Returns false when a free nonbasic
// participates: no shift exists, so the row cannot produce a cut.
bool shift_row(const TableauRow& t, const LpRelaxation& relax,
               const SimplexSolver& solver, std::vector<ShiftedTerm>& terms) {
  const MilpInstance& base = *relax.base;
  const int n = solver.n_structural();
  const int m = solver.n_rows();
  terms.clear();
  for (int j = 0; j < n; ++j) {
    if (j == t.basic_col) continue;
    const double c = t.coef[size_t(j)];
    if (std::fabs(c) <= kCoefZero) continue;
    // Fixed column: the shifted variable is identically zero.
    if (solver.col_lower(j) == solver.col_upper(j)) continue;
    switch (solver.col_status(j)) {
      case BasisStatus::Basic:
        continue;  // residue of the unit vector on other basics
      case BasisStatus::NonbasicFree:
        return false;
      case BasisStatus::AtLower:
        terms.push_back({j, c, base.is_integer(j), false});
        break;
      case BasisStatus::AtUpper:
        terms.push_back({j, -c, base.is_integer(j), true});
        break;
    }
  }
  for (int i = 0; i < m; ++i) {
    const double c = t.coef[size_t(n + i)];
    if (std::fabs(c) <= kCoefZero) continue;
    if (solver.col_status(solver.slack_col(i)) == BasisStatus::Basic) continue;
    // Slack lower bound is zero, so the shift is the identity.
    terms.push_back({n + i, c, row_is_integral(relax.row(i), base), false});
  }
  return true;
}

// Substitutes the shifted >=-form cut sum gamma_c x~_c >= f0 back into
// structural space and flips it to <= form.
Row substitute(const std::vector<ShiftedTerm>& terms,
               const std::vector<double>& gamma, double f0,
               const LpRelaxation& relax, const SimplexSolver& solver,
               int& max_used_rank) {
  const int n = solver.n_structural();
  std::vector<double> alpha(size_t(n), 0.0);
  double constant = 0.0;
  max_used_rank = 0;
  for (size_t k = 0; k < terms.size(); ++k) {
    const double g = gamma[k];
    if (g <= kCoefZero) continue;
    const ShiftedTerm& tm = terms[k];
    if (tm.col < n) {
      if (tm.at_upper) {
        alpha[size_t(tm.col)] -= g;
        constant += g * solver.col_upper(tm.col);
      } else {
        alpha[size_t(tm.col)] += g;
        constant -= g * solver.col_lower(tm.col);
      }
    } else {
      const Row& r = relax.row(tm.col - n);
      for (const auto& [j, v] : r.coeffs) alpha[size_t(j)] -= g * v;
      constant += g * r.rhs;
      max_used_rank = std::max(max_used_rank, r.rank);
    }
  }
  // sum alpha'x >= f0 - constant  ==>  -alpha'x <= constant - f0.
  Row cut;
  for (int j = 0; j < n; ++j) {
    const double pj = -alpha[size_t(j)];
    if (std::fabs(pj) > kDropTiny) cut.coeffs.emplace_back(j, pj);
  }
  cut.rhs = constant - f0;
  cut.relation = Relation::LE;
  cut.origin = RowOrigin::Cut;
  return cut;
}

bool passes_filters(const Row& cut, const std::vector<double>& x_star,
                    double& violation) {
  if (cut.coeffs.empty()) return false;
  const double ninf = cut.norm_inf();
  if (ninf > kMaxNormInf || ninf < kMinNormInf) return false;
  double min_abs = ninf;
  for (const auto& [j, v] : cut.coeffs) min_abs = std::min(min_abs, std::fabs(v));
  if (ninf / min_abs > kMaxDynamism) return false;
  violation = cut.activity(x_star) - cut.rhs;
  return violation > Tols::violation;
}

// Dedup key: coefficients and rhs scaled to unit 2-norm, quantized.
std::vector<long long> dedup_key(const Row& cut) {
  const double scale = 1.0 / cut.norm2();
  std::vector<long long> key;
  key.reserve(2 * cut.coeffs.size() + 1);
  for (const auto& [j, v] : cut.coeffs) {
    key.push_back(j);
    key.push_back(llround(v * scale * 1e9));
  }
  key.push_back(llround(cut.rhs * scale * 1e9));
  return key;
}

}  // namespace

CutPool separate(const LpSolution& sol, const LpRelaxation& relax,
                 const SimplexSolver& solver) {
  if (sol.status != LpStatus::Optimal)
    throw CutlabError("separation requires an optimal LP solution");
  if (solver.n_rows() != relax.n_rows())
    throw CutlabError("relaxation and solver row counts diverge");
  const MilpInstance& base = *relax.base;
  CutPool pool;
  std::set<std::vector<long long>> seen;
  std::vector<ShiftedTerm> terms;

  for (const int j : base.integrality) {
    if (sol.var_status[size_t(j)] != BasisStatus::Basic) continue;
    const double f0 = frac(sol.primal[size_t(j)]);
    if (f0 <= Tols::integrality || f0 >= 1.0 - Tols::integrality) continue;
    const TableauRow t = solver.tableau_row(sol, j);
    if (!shift_row(t, relax, solver, terms)) continue;

    bool pure_integer = true;
    for (const ShiftedTerm& tm : terms) pure_integer = pure_integer && tm.integer;

    std::vector<double> gamma(terms.size(), 0.0);
    const auto emit = [&](SeparatorKind kind) {
      int used_rank = 0;
      Cut cut;
      cut.row = substitute(terms, gamma, f0, relax, solver, used_rank);
      if (!passes_filters(cut.row, sol.primal, cut.violation)) return;
      const auto key = dedup_key(cut.row);
      if (!seen.insert(key).second) return;
      cut.row.separator = kind;
      cut.row.source_var = j;
      cut.row.rank = used_rank + 1;
      pool.cuts.push_back(std::move(cut));
    };

    if (pure_integer) {
      // Fractional cut: sum frac(a_c) x~_c >= frac(a_0).
      for (size_t k = 0; k < terms.size(); ++k) gamma[k] = frac(terms[k].coef);
      emit(SeparatorKind::GomoryFractional);
    }

    // Mixed-integer cut: integer columns contribute min(f_c, f0(1-f_c)/(1-f0)),
    // continuous ones a_c (positive) or f0 (-a_c)/(1-f0) (negative).
    for (size_t k = 0; k < terms.size(); ++k) {
      const ShiftedTerm& tm = terms[k];
      if (tm.integer) {
        const double fc = frac(tm.coef);
        gamma[k] = fc <= f0 ? fc : f0 * (1.0 - fc) / (1.0 - f0);
      } else {
        gamma[k] = tm.coef > 0 ? tm.coef : f0 * (-tm.coef) / (1.0 - f0);
      }
    }
    emit(SeparatorKind::GomoryMixedInteger);
  }
  return pool;
}

}  // namespace cutlab
