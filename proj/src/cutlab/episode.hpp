#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cutlab/lp.hpp"
#include "cutlab/milp.hpp"
#include "cutlab/scores.hpp"
#include "cutlab/separate.hpp"

namespace cutlab {

// Raised when a rollout needs the exact MILP optimum and none was supplied.
struct OracleUnavailable : CutlabError {
  using CutlabError::CutlabError;
};

enum class StopReason { RoundLimit, EmptyPool, Stalled, IntegralLp };

const char* stop_reason_name(StopReason r);

// Fraction of the root integrality gap closed by a bound of zk: clamped
// (zk - z0) / (z_opt - z0). A root that already matches z_opt has no gap to
// close and is defined as 1 (such instances are excluded from aggregates).
double igc(double z0, double zk, double z_opt);

// One accepted cut: the pool it came from, the choice, and the bound after
// the re-solve.
struct RoundRecord {
  int round = 0;  // 1-based
  Cut chosen;
  int chosen_index = -1;  // index into that round's pool
  double z = 0.0;         // LP bound after appending the cut
  double igc = 0.0;
  int pool_size = 0;
  ScorerKind scorer = ScorerKind::Random;
};

struct Trajectory {
  const MilpInstance* instance = nullptr;
  double z0 = 0.0;
  double z_opt = 0.0;
  std::vector<RoundRecord> rounds;
  StopReason stop = StopReason::RoundLimit;

  double final_igc() const {
    return rounds.empty() ? igc(z0, z0, z_opt) : rounds.back().igc;
  }
};

// Scores a pool with a learnt model. Injected as a callback so the episode
// loop stays independent of the network code; the CLI wires the two together.
using PolicyFn = std::function<std::vector<double>(
    const CutPool&, const LpRelaxation&, const LpSolution&)>;

struct RolloutConfig {
  int rounds = 30;        // separation rounds, one cut per round
  uint64_t seed = 0;      // drives the Random scorer and tie-breaking
  double z_opt = kInf;    // exact optimum; required (OracleUnavailable)
  double stall_eps = -1.0;  // negative disables the stall rule
  int stall_rounds = 10;    // consecutive sub-eps rounds that count as a stall
  PolicyFn policy;          // required for ScorerKind::Policy
};

// The cut-selection loop: solve the relaxation, separate a fresh pool
// (previous candidates are discarded), score it with `kind`, append the
// selected cut, re-solve, repeat. Stops at the round limit, an empty pool, an
// integral LP, or -- when enabled -- a bound-improvement stall.
Trajectory rollout(const MilpInstance& instance, ScorerKind kind,
                   const RolloutConfig& config);

// rollout with the stall rule active: terminates with StopReason::Stalled
// once the bound improves by less than eps for config.stall_rounds
// consecutive rounds; config.rounds still caps the episode.
Trajectory rollout_stalling(const MilpInstance& instance, ScorerKind kind,
                            double eps, const RolloutConfig& config);

// Plain-vector copy of the LpSolution fields the feature encoder consumes.
struct LpSummary {
  double objective = 0.0;
  std::vector<double> primal;
  std::vector<double> duals;
  std::vector<double> reduced_costs;
  std::vector<BasisStatus> var_status;
  std::vector<BasisStatus> row_status;
};

constexpr int kSampleSchemaVersion = 1;

// One labeled decision point: the LP state as the selector saw it, the fresh
// pool, and the exact bound gain of every pool cut. Self-contained for
// featurization (static variable data is embedded, no instance join needed).
struct Sample {
  int schema_version = kSampleSchemaVersion;
  std::string instance_name;
  std::string family_tag;
  int iteration = 0;  // cuts appended before this state, 0-based
  ScorerKind advanced_by = ScorerKind::Random;  // scorer that then moved on

  std::vector<double> objective;
  std::vector<double> var_lower;
  std::vector<double> var_upper;
  std::vector<int> integrality;

  // Relaxation state: base rows then appended cuts (provenance intact), plus
  // the age counters behind the encoder's activity features.
  std::vector<Row> rows;
  int lp_solve_count = 0;
  std::vector<int> var_zero_streak;
  std::vector<int> row_loose_streak;
  std::vector<int> row_created_at;

  LpSummary lp;
  std::vector<Cut> pool;
  std::vector<double> la_scores;  // one exact gain per pool cut
};

struct CollectConfig {
  int iters = 10;     // decision points recorded per instance (at most)
  uint64_t seed = 0;  // split per instance by name
  // The advancing scorer is drawn uniformly from this set each iteration;
  // labels are exact bound gains for the whole pool regardless of the draw.
  std::vector<ScorerKind> mixture = {ScorerKind::Random,
                                     ScorerKind::DefaultScore,
                                     ScorerKind::Lookahead};
};

struct CollectFailure {
  std::string instance;
  std::string reason;
};

struct CollectResult {
  std::vector<Sample> samples;
  std::vector<CollectFailure> failures;  // logged, never fatal to the batch
};

// Labels decision points across a batch: per instance, up to iters samples,
// fewer when the LP turns integral or the pool empties early. A failing
// instance keeps the samples it produced and is reported in `failures`.
CollectResult collect(const std::vector<MilpInstance>& instances,
                      const CollectConfig& config);

// JSONL: one sample per line. Readers reject unknown schema versions.
std::string write_samples_jsonl(const std::vector<Sample>& samples);
std::vector<Sample> read_samples_jsonl(const std::string& text);

// CSV with header instance,round,z,igc,pool_size,chosen_index,scorer.
std::string trajectory_csv(const std::vector<Trajectory>& trajectories);

}  // namespace cutlab
