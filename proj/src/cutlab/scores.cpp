#include "cutlab/scores.hpp"

#include <algorithm>
#include <cmath>

namespace cutlab {

namespace {

double norm2(const Row& r) {
  double s = 0.0;
  for (const auto& [j, v] : r.coeffs) s += v * v;
  return std::sqrt(s);
}

double checked_norm(const Row& r) {
  const double n = norm2(r);
  if (n <= 0.0) throw ZeroNormCut("cut row has zero norm");
  return n;
}

double objective_norm(const std::vector<double>& c) {
  double s = 0.0;
  for (const double v : c) s += v * v;
  return std::sqrt(s);
}

double violation_of(const Row& r, const std::vector<double>& x) {
  return r.activity(x) - r.rhs;
}

// |pi'c| / (|pi| |c|); zero objective makes the angle undefined, scored 0.
double obj_parallelism(const Row& r, const std::vector<double>& c,
                       double c_norm) {
  if (c_norm <= 0.0) return 0.0;
  double dot = 0.0;
  for (const auto& [j, v] : r.coeffs) dot += v * c[size_t(j)];
  return std::abs(dot) / (checked_norm(r) * c_norm);
}

double int_support(const Row& r, const std::vector<char>& is_int) {
  if (r.coeffs.empty()) throw ZeroNormCut("cut row has no support");
  int on_int = 0;
  for (const auto& [j, v] : r.coeffs)
    if (is_int[size_t(j)]) ++on_int;
  return double(on_int) / double(r.coeffs.size());
}

}  // namespace

std::vector<double> score_pool(ScorerKind kind, const CutPool& pool,
                               const ScoreContext& ctx) {
  if (ctx.lp == nullptr || ctx.relax == nullptr)
    throw CutlabError("score context is missing the LP state");
  if (ctx.lp->status != LpStatus::Optimal)
    throw CutlabError("scoring requires an optimal LP solution");

  const std::vector<double>& x = ctx.lp->primal;
  const std::vector<double>& c = ctx.relax->base->objective;
  const double c_norm = objective_norm(c);

  std::vector<char> is_int(size_t(ctx.relax->n_vars()), 0);
  for (const int j : ctx.relax->base->integrality) is_int[size_t(j)] = 1;

  std::vector<double> scores;
  scores.reserve(pool.cuts.size());

  Rng rng(derive_seed(ctx.rng_seed, "random-scorer"));
  for (const Cut& cut : pool.cuts) {
    const Row& r = cut.row;
    double s = 0.0;
    switch (kind) {
      case ScorerKind::Random:
        s = rng.uniform();
        break;
      case ScorerKind::Violation:
        s = violation_of(r, x);
        break;
      case ScorerKind::RelViolation: {
        const double v = violation_of(r, x);
        const double denom =
            std::max(std::min(std::abs(r.rhs), std::abs(r.activity(x))), 1e-9);
        s = v / denom;
        break;
      }
      case ScorerKind::Efficacy:
        s = violation_of(r, x) / checked_norm(r);
        break;
      case ScorerKind::ObjParallelism:
        s = obj_parallelism(r, c, c_norm);
        break;
      case ScorerKind::ExpImprovement:
        s = c_norm * c_norm * obj_parallelism(r, c, c_norm) *
            (violation_of(r, x) / checked_norm(r));
        break;
      case ScorerKind::Support:
        s = -double(r.coeffs.size()) / double(ctx.relax->n_vars());
        break;
      case ScorerKind::IntSupport:
        s = int_support(r, is_int);
        break;
      case ScorerKind::DefaultScore:
        s = ctx.weights.efficacy * (violation_of(r, x) / checked_norm(r)) +
            ctx.weights.obj_parallelism * obj_parallelism(r, c, c_norm) +
            ctx.weights.int_support * int_support(r, is_int);
        break;
      case ScorerKind::Lookahead:
      case ScorerKind::Policy:
        throw CutlabError(
            "scorer needs a solver or model; dispatch it at the episode "
            "level");
    }
    if (!std::isfinite(s)) throw CutlabError("non-finite cut score");
    scores.push_back(s);
  }
  return scores;
}

double lookahead_score(const Cut& cut, SimplexSolver& solver, double z_base,
                       double infeasible_sentinel) {
  solver.push_state();
  solver.add_cut_row(cut.row);
  LpSolution after;
  try {
    after = solver.resolve();
  } catch (...) {
    solver.pop_state();
    throw;
  }
  solver.pop_state();
  if (after.status == LpStatus::Infeasible) return infeasible_sentinel;
  if (after.status != LpStatus::Optimal)
    throw NumericalBreakdown("augmented LP is neither optimal nor infeasible");
  return std::max(after.objective - z_base, 0.0);
}

std::vector<double> lookahead_scores(const CutPool& pool,
                                     SimplexSolver& solver, double z_base,
                                     double infeasible_sentinel) {
  std::vector<double> scores;
  scores.reserve(pool.cuts.size());
  for (const Cut& cut : pool.cuts)
    scores.push_back(
        lookahead_score(cut, solver, z_base, infeasible_sentinel));
  return scores;
}

int select(const CutPool& pool, const std::vector<double>& scores, Rng& rng,
           double tie_tol) {
  if (pool.cuts.empty()) throw EmptyPool("cannot select from an empty pool");
  if (scores.size() != pool.cuts.size())
    throw CutlabError("score vector does not match the pool size");
  for (const double s : scores)
    if (!std::isfinite(s)) throw CutlabError("non-finite cut score");

  const double best = *std::max_element(scores.begin(), scores.end());
  std::vector<int> tied;
  for (size_t i = 0; i < scores.size(); ++i)
    if (scores[i] >= best - tie_tol) tied.push_back(int(i));
  if (tied.size() == 1) return tied.front();
  return tied[size_t(rng.below(uint64_t(tied.size())))];
}

const char* scorer_cli_name(ScorerKind kind) {
  switch (kind) {
    case ScorerKind::Random: return "random";
    case ScorerKind::Violation: return "violation";
    case ScorerKind::RelViolation: return "relviolation";
    case ScorerKind::Efficacy: return "efficacy";
    case ScorerKind::ObjParallelism: return "objparallelism";
    case ScorerKind::ExpImprovement: return "expimprovement";
    case ScorerKind::Support: return "support";
    case ScorerKind::IntSupport: return "intsupport";
    case ScorerKind::DefaultScore: return "default";
    case ScorerKind::Lookahead: return "lookahead";
    case ScorerKind::Policy: return "policy";
  }
  return "?";
}

ScorerSpec parse_scorer(const std::string& name) {
  if (name.rfind("policy:", 0) == 0) {
    ScorerSpec spec{ScorerKind::Policy, name.substr(7)};
    if (spec.policy_path.empty())
      throw UnknownScorer("policy scorer needs a model path: " + name);
    return spec;
  }
  for (const ScorerKind k :
       {ScorerKind::Random, ScorerKind::Violation, ScorerKind::RelViolation,
        ScorerKind::Efficacy, ScorerKind::ObjParallelism,
        ScorerKind::ExpImprovement, ScorerKind::Support,
        ScorerKind::IntSupport, ScorerKind::DefaultScore,
        ScorerKind::Lookahead}) {
    if (name == scorer_cli_name(k)) return ScorerSpec{k, ""};
  }
  throw UnknownScorer("unknown scorer: " + name);
}

}  // namespace cutlab
