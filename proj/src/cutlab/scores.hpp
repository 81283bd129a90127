#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cutlab/common.hpp"
#include "cutlab/lp.hpp"
#include "cutlab/milp.hpp"
#include "cutlab/rng.hpp"
#include "cutlab/separate.hpp"

namespace cutlab {

// Cut-scoring criteria. The heuristics are closed-form functions of one cut
// and the current LP state; Lookahead re-solves the LP per cut; Policy defers
// to a learnt model and is dispatched by the episode layer.
enum class ScorerKind {
  Random,
  Violation,
  RelViolation,
  Efficacy,
  ObjParallelism,
  ExpImprovement,
  Support,
  IntSupport,
  DefaultScore,
  Lookahead,
  Policy,
};

struct ZeroNormCut : CutlabError {
  using CutlabError::CutlabError;
};
struct EmptyPool : CutlabError {
  using CutlabError::CutlabError;
};
struct UnknownScorer : CutlabError {
  using CutlabError::CutlabError;
};

// Weighted blend mirroring a solver's built-in cut quality measure; weights
// are configuration, not ground truth.
struct DefaultScoreWeights {
  double efficacy = 1.0;
  double obj_parallelism = 0.1;
  double int_support = 0.1;
};

// Everything the closed-form heuristics may look at: the solved LP, the
// relaxation it solved (for the objective and integrality sets), a seed for
// the Random scorer, and the default-score weights.
struct ScoreContext {
  const LpSolution* lp = nullptr;
  const LpRelaxation* relax = nullptr;
  uint64_t rng_seed = 0;
  DefaultScoreWeights weights;
};

// One finite score per pool cut, higher is better. Handles every closed-form
// kind plus Random; throws on Lookahead/Policy, which need a solver or model.
std::vector<double> score_pool(ScorerKind kind, const CutPool& pool,
                               const ScoreContext& ctx);

// Exact dual-bound gain of one cut: append it, re-solve warm-started, undo.
// An infeasible augmented LP means the cut proves infeasibility; that beats
// any finite gain and earns the sentinel score.
double lookahead_score(const Cut& cut, SimplexSolver& solver, double z_base,
                       double infeasible_sentinel = 1e12);

// Lookahead for a whole pool, gathered by cut index.
std::vector<double> lookahead_scores(const CutPool& pool,
                                     SimplexSolver& solver, double z_base,
                                     double infeasible_sentinel = 1e12);

// Argmax with uniform random tie-breaking among scores within tie_tol of the
// maximum. Scores must be finite and match the pool size.
int select(const CutPool& pool, const std::vector<double>& scores, Rng& rng,
           double tie_tol = Tols::tie);

// CLI spelling of a scorer, e.g. "relviolation" or "policy:<path>".
struct ScorerSpec {
  ScorerKind kind = ScorerKind::Random;
  std::string policy_path;  // nonempty only for Policy
};

const char* scorer_cli_name(ScorerKind kind);
ScorerSpec parse_scorer(const std::string& name);

}  // namespace cutlab
