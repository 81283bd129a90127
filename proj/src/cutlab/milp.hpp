#pragma once

#include <string>
#include <utility>
#include <vector>

#include "common.hpp"

namespace cutlab {

enum class Relation { LE, GE, EQ };
enum class Sense { Minimize, Maximize };
enum class RowOrigin { Original, Cut };
enum class SeparatorKind { GomoryFractional, GomoryMixedInteger };

const char* separator_name(SeparatorKind k);

// One linear row a'x (rel) rhs. After normalization every row is in "<=" form.
// Cut rows carry provenance used by the feature encoder.
struct Row {
  std::vector<std::pair<int, double>> coeffs;  // sorted by index, no zeros
  double rhs = 0.0;
  Relation relation = Relation::LE;

  RowOrigin origin = RowOrigin::Original;
  SeparatorKind separator = SeparatorKind::GomoryFractional;  // cuts only
  int source_var = -1;                                        // cuts only
  int round_created = 0;  // separation round (cuts), 0 for originals
  int rank = 0;           // 0 for originals, >=1 for cuts

  double activity(const std::vector<double>& x) const {
    double a = 0.0;
    for (const auto& [j, v] : coeffs) a += v * x[j];
    return a;
  }
  double norm2() const;
  double norm_inf() const;

  bool operator==(const Row& o) const {
    return coeffs == o.coeffs && rhs == o.rhs && relation == o.relation;
  }
};

// The (c, A, b, I) description of a mixed-integer linear program.
struct MilpInstance {
  std::string name;
  int n_vars = 0;
  Sense sense = Sense::Minimize;
  std::vector<double> objective;
  std::vector<Row> rows;
  std::vector<double> var_lower;  // -inf allowed
  std::vector<double> var_upper;  // +inf allowed
  std::vector<int> integrality;   // sorted variable indices
  std::string family_tag;
  int generator_version = 0;  // 0 = not produced by a generator

  // Set by normalize() when the input objective was a maximization; kept for
  // reporting only and deliberately not serialized.
  bool flipped_from_max = false;

  bool is_integer(int j) const {
    for (int i : integrality)
      if (i == j) return true;
    return false;
  }

  bool operator==(const MilpInstance& o) const {
    return name == o.name && n_vars == o.n_vars && sense == o.sense &&
           objective == o.objective && rows == o.rows &&
           var_lower == o.var_lower && var_upper == o.var_upper &&
           integrality == o.integrality && family_tag == o.family_tag &&
           generator_version == o.generator_version;
  }
};

struct DuplicateCoefficient : InvalidInstance {
  using InvalidInstance::InvalidInstance;
};
struct IndexOutOfRange : InvalidInstance {
  using InvalidInstance::InvalidInstance;
};
struct EmptyObjective : InvalidInstance {
  using InvalidInstance::InvalidInstance;
};
struct InvalidCutIndices : InvalidInstance {
  using InvalidInstance::InvalidInstance;
};

// Canonicalize: sense -> minimize (objective negated, flag retained), ">="
// rows negated into "<=", equalities split into two "<=" rows, coefficients
// sorted with explicit zeros dropped. Idempotent.
MilpInstance normalize(const MilpInstance& instance);

// A relaxation is the base instance plus an ordered list of appended cut
// rows. It also owns the activity counters behind the age features: how many
// LPs were solved on it, per-variable streaks of solutions at zero, and
// per-row streaks of slack rows.
struct LpRelaxation {
  const MilpInstance* base = nullptr;
  std::vector<Row> appended_cuts;

  int lp_solve_count = 0;
  std::vector<int> var_zero_streak;   // consecutive solves with x_j ~ 0
  std::vector<int> row_loose_streak;  // consecutive solves with slack > tol
  std::vector<int> row_created_at;    // lp_solve_count when the row appeared

  LpRelaxation() = default;
  explicit LpRelaxation(const MilpInstance& instance);
  // The relaxation only borrows the instance; forbid binding a temporary.
  explicit LpRelaxation(MilpInstance&&) = delete;

  int n_vars() const { return base->n_vars; }
  int n_rows() const { return int(base->rows.size() + appended_cuts.size()); }
  const Row& row(int i) const {
    const int nb = int(base->rows.size());
    return i < nb ? base->rows[i] : appended_cuts[i - nb];
  }

  // Appends one cut row ("<=" form, valid indices required); provenance on
  // the row is the caller's responsibility except origin, which is forced.
  void append_cut(Row cut);

  // Feeds one solved LP's primal point into the age counters.
  void note_solution(const std::vector<double>& x);
};

}  // namespace cutlab
