#include "episode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <utility>

#include <json.hpp>

#include "cutlab/rng.hpp"

namespace cutlab {

namespace {

using ordered_json = nlohmann::ordered_json;

bool solution_integral(const MilpInstance& inst, const std::vector<double>& x) {
  for (const int j : inst.integrality) {
    const double v = x[size_t(j)];
    if (std::fabs(v - std::round(v)) > Tols::integrality) return false;
  }
  return true;
}

// Root solve shared by rollout and collect; throws on anything but Optimal.
LpSolution solve_root(SimplexSolver& solver, LpRelaxation& relax,
                      const std::string& name) {
  LpSolution sol = solver.solve();
  if (sol.status == LpStatus::Unbounded)
    throw UnboundedRelaxation("relaxation unbounded: " + name);
  if (sol.status != LpStatus::Optimal)
    throw MilpInfeasible("relaxation infeasible: " + name);
  relax.note_solution(sol.primal);
  return sol;
}

// Appends the chosen cut to both views of the relaxation and re-solves.
LpSolution append_and_resolve(Row cut, int round, LpRelaxation& relax,
                              SimplexSolver& solver,
                              const std::string& name) {
  cut.round_created = round;
  relax.append_cut(std::move(cut));
  solver.add_cut_row(relax.appended_cuts.back());
  LpSolution sol = resolve_or_recover(solver);
  if (sol.status != LpStatus::Optimal)
    throw NumericalBreakdown("re-solve after cut lost optimality: " + name);
  relax.note_solution(sol.primal);
  return sol;
}

std::vector<double> heuristic_scores(ScorerKind kind, const CutPool& pool,
                                     const LpSolution& sol,
                                     const LpRelaxation& relax,
                                     uint64_t rng_seed) {
  ScoreContext ctx;
  ctx.lp = &sol;
  ctx.relax = &relax;
  ctx.rng_seed = rng_seed;
  return score_pool(kind, pool, ctx);
}

}  // namespace

const char* stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::RoundLimit: return "round_limit";
    case StopReason::EmptyPool: return "empty_pool";
    case StopReason::Stalled: return "stalled";
    case StopReason::IntegralLp: return "integral_lp";
  }
  return "?";
}

double igc(double z0, double zk, double z_opt) {
  const double gap0 = z_opt - z0;
  if (std::fabs(gap0) <= 1e-9 * (1.0 + std::fabs(z_opt))) return 1.0;
  return std::clamp((zk - z0) / gap0, 0.0, 1.0);
}

Trajectory rollout(const MilpInstance& instance, ScorerKind kind,
                   const RolloutConfig& config) {
  if (!is_finite_bound(config.z_opt))
    throw OracleUnavailable("gap closure needs the exact optimum: " +
                            instance.name);
  if (kind == ScorerKind::Policy && !config.policy)
    throw UnknownScorer("policy scorer called without a model");
  if (config.rounds < 0) throw CutlabError("negative round limit");

  Trajectory traj;
  traj.instance = &instance;
  traj.z_opt = config.z_opt;

  LpRelaxation relax(instance);
  SimplexSolver solver(relax);
  LpSolution sol = solve_root(solver, relax, instance.name);
  traj.z0 = sol.objective;

  Rng tie_rng(derive_seed(config.seed, "tiebreak"));
  int stall_streak = 0;
  for (int k = 1; k <= config.rounds; ++k) {
    if (solution_integral(instance, sol.primal)) {
      traj.stop = StopReason::IntegralLp;
      break;
    }
    CutPool pool = separate(sol, relax, solver);
    pool.generated_at_round = k;
    if (pool.empty()) {
      traj.stop = StopReason::EmptyPool;
      break;
    }

    std::vector<double> scores;
    switch (kind) {
      case ScorerKind::Lookahead:
        scores = lookahead_scores(pool, solver, sol.objective);
        break;
      case ScorerKind::Policy:
        scores = config.policy(pool, relax, sol);
        if (scores.size() != pool.size())
          throw CutlabError("policy scored " + std::to_string(scores.size()) +
                            " cuts for a pool of " +
                            std::to_string(pool.size()));
        break;
      default:
        scores = heuristic_scores(kind, pool, sol, relax,
                                  derive_seed(config.seed, uint64_t(k)));
    }
    const int chosen = select(pool, scores, tie_rng);

    const double z_prev = sol.objective;
    sol = append_and_resolve(pool.cuts[size_t(chosen)].row, k, relax, solver,
                             instance.name);

    RoundRecord rec;
    rec.round = k;
    rec.chosen = pool.cuts[size_t(chosen)];
    rec.chosen_index = chosen;
    rec.z = sol.objective;
    rec.igc = igc(traj.z0, sol.objective, config.z_opt);
    rec.pool_size = int(pool.size());
    rec.scorer = kind;
    traj.rounds.push_back(std::move(rec));

    if (config.stall_eps >= 0.0) {
      stall_streak = sol.objective - z_prev < config.stall_eps
                         ? stall_streak + 1
                         : 0;
      if (stall_streak >= config.stall_rounds) {
        traj.stop = StopReason::Stalled;
        break;
      }
    }
  }
  return traj;
}

Trajectory rollout_stalling(const MilpInstance& instance, ScorerKind kind,
                            double eps, const RolloutConfig& config) {
  if (eps < 0.0) throw CutlabError("stall tolerance must be nonnegative");
  if (config.stall_rounds <= 0) throw CutlabError("stall window must be > 0");
  RolloutConfig stalled = config;
  stalled.stall_eps = eps;
  return rollout(instance, kind, stalled);
}

namespace {

Sample make_sample(const MilpInstance& inst, const LpRelaxation& relax,
                   const LpSolution& sol, const CutPool& pool,
                   std::vector<double> la, int iter, ScorerKind advanced_by) {
  Sample s;
  s.instance_name = inst.name;
  s.family_tag = inst.family_tag;
  s.iteration = iter;
  s.advanced_by = advanced_by;
  s.objective = inst.objective;
  s.var_lower = inst.var_lower;
  s.var_upper = inst.var_upper;
  s.integrality = inst.integrality;
  s.rows.reserve(size_t(relax.n_rows()));
  for (int i = 0; i < relax.n_rows(); ++i) s.rows.push_back(relax.row(i));
  s.lp_solve_count = relax.lp_solve_count;
  s.var_zero_streak = relax.var_zero_streak;
  s.row_loose_streak = relax.row_loose_streak;
  s.row_created_at = relax.row_created_at;
  s.lp.objective = sol.objective;
  s.lp.primal = sol.primal;
  s.lp.duals = sol.duals;
  s.lp.reduced_costs = sol.reduced_costs;
  s.lp.var_status = sol.var_status;
  s.lp.row_status = sol.row_status;
  s.pool = pool.cuts;
  s.la_scores = std::move(la);
  return s;
}

}  // namespace

CollectResult collect(const std::vector<MilpInstance>& instances,
                      const CollectConfig& config) {
  if (config.mixture.empty())
    throw UnknownScorer("collection needs a nonempty scorer mixture");
  for (const ScorerKind k : config.mixture)
    if (k == ScorerKind::Policy)
      throw UnknownScorer("policy cannot advance a collection batch");
  if (config.iters < 0) throw CutlabError("negative iteration budget");

  CollectResult out;
  for (const MilpInstance& inst : instances) {
    const uint64_t base = derive_seed(config.seed, inst.name);
    Rng rng(base);  // mixture draws and tie-breaks, one stream per instance
    try {
      LpRelaxation relax(inst);
      SimplexSolver solver(relax);
      LpSolution sol = solve_root(solver, relax, inst.name);
      for (int iter = 0; iter < config.iters; ++iter) {
        if (solution_integral(inst, sol.primal)) break;
        CutPool pool = separate(sol, relax, solver);
        pool.generated_at_round = iter + 1;
        if (pool.empty()) break;

        // Labels cover the whole pool no matter which scorer advances.
        std::vector<double> la =
            lookahead_scores(pool, solver, sol.objective);
        const ScorerKind kind =
            config.mixture[rng.below(config.mixture.size())];
        out.samples.push_back(
            make_sample(inst, relax, sol, pool, la, iter, kind));

        std::vector<double> scores =
            kind == ScorerKind::Lookahead
                ? std::move(la)
                : heuristic_scores(kind, pool, sol, relax,
                                   derive_seed(base, uint64_t(iter)));
        const int chosen = select(pool, scores, rng);
        sol = append_and_resolve(pool.cuts[size_t(chosen)].row, iter + 1,
                                 relax, solver, inst.name);
      }
    } catch (const CutlabError& e) {
      out.failures.push_back({inst.name, e.what()});
    }
  }
  return out;
}

namespace {

ordered_json row_to_json(const Row& r) {
  ordered_json jr;
  auto& coeffs = jr["coeffs"] = ordered_json::array();
  for (const auto& [j, v] : r.coeffs) coeffs.push_back({j, v});
  jr["rhs"] = r.rhs;
  if (r.origin == RowOrigin::Cut) {
    jr["separator"] = separator_name(r.separator);
    jr["source_var"] = r.source_var;
    jr["round_created"] = r.round_created;
    jr["rank"] = r.rank;
  }
  return jr;
}

Row row_from_json(const ordered_json& jr) {
  Row r;
  for (const auto& c : jr.at("coeffs"))
    r.coeffs.emplace_back(c.at(0).get<int>(), c.at(1).get<double>());
  r.rhs = jr.at("rhs").get<double>();
  if (jr.contains("separator")) {
    r.origin = RowOrigin::Cut;
    const std::string sep = jr.at("separator").get<std::string>();
    if (sep == separator_name(SeparatorKind::GomoryFractional))
      r.separator = SeparatorKind::GomoryFractional;
    else if (sep == separator_name(SeparatorKind::GomoryMixedInteger))
      r.separator = SeparatorKind::GomoryMixedInteger;
    else
      throw CutlabError("unknown separator \"" + sep + "\"");
    r.source_var = jr.at("source_var").get<int>();
    r.round_created = jr.at("round_created").get<int>();
    r.rank = jr.at("rank").get<int>();
  }
  return r;
}

ordered_json statuses_to_json(const std::vector<BasisStatus>& sts) {
  ordered_json arr = ordered_json::array();
  for (const BasisStatus s : sts) arr.push_back(basis_status_name(s));
  return arr;
}

std::vector<BasisStatus> statuses_from_json(const ordered_json& arr) {
  std::vector<BasisStatus> sts;
  for (const auto& v : arr) {
    const std::string name = v.get<std::string>();
    if (name == "basic") sts.push_back(BasisStatus::Basic);
    else if (name == "at_lower") sts.push_back(BasisStatus::AtLower);
    else if (name == "at_upper") sts.push_back(BasisStatus::AtUpper);
    else if (name == "free") sts.push_back(BasisStatus::NonbasicFree);
    else throw CutlabError("unknown basis status \"" + name + "\"");
  }
  return sts;
}

ordered_json bounds_to_json(const std::vector<double>& bounds) {
  ordered_json arr = ordered_json::array();
  for (const double v : bounds)
    arr.push_back(is_finite_bound(v) ? ordered_json(v) : ordered_json(nullptr));
  return arr;
}

std::vector<double> bounds_from_json(const ordered_json& arr, bool lower) {
  std::vector<double> bounds;
  for (const auto& v : arr)
    bounds.push_back(v.is_null() ? (lower ? -kInf : kInf) : v.get<double>());
  return bounds;
}

ordered_json sample_to_json(const Sample& s) {
  ordered_json j;
  j["schema_version"] = s.schema_version;
  j["instance"] = s.instance_name;
  j["family"] = s.family_tag;
  j["iteration"] = s.iteration;
  j["advanced_by"] = scorer_cli_name(s.advanced_by);
  j["objective"] = s.objective;
  j["lower"] = bounds_to_json(s.var_lower);
  j["upper"] = bounds_to_json(s.var_upper);
  j["integrality"] = s.integrality;
  auto& rows = j["rows"] = ordered_json::array();
  for (const Row& r : s.rows) rows.push_back(row_to_json(r));
  j["lp_solve_count"] = s.lp_solve_count;
  j["var_zero_streak"] = s.var_zero_streak;
  j["row_loose_streak"] = s.row_loose_streak;
  j["row_created_at"] = s.row_created_at;
  ordered_json lp;
  lp["objective"] = s.lp.objective;
  lp["primal"] = s.lp.primal;
  lp["duals"] = s.lp.duals;
  lp["reduced_costs"] = s.lp.reduced_costs;
  lp["var_status"] = statuses_to_json(s.lp.var_status);
  lp["row_status"] = statuses_to_json(s.lp.row_status);
  j["lp"] = std::move(lp);
  auto& pool = j["pool"] = ordered_json::array();
  for (const Cut& c : s.pool) {
    ordered_json jc = row_to_json(c.row);
    jc["violation"] = c.violation;
    pool.push_back(std::move(jc));
  }
  j["la_scores"] = s.la_scores;
  return j;
}

Sample sample_from_json(const ordered_json& j, int line) {
  const int version = j.at("schema_version").get<int>();
  if (version != kSampleSchemaVersion)
    throw ParseError(line, "unsupported sample schema version " +
                               std::to_string(version));
  Sample s;
  s.instance_name = j.at("instance").get<std::string>();
  s.family_tag = j.at("family").get<std::string>();
  s.iteration = j.at("iteration").get<int>();
  s.advanced_by = parse_scorer(j.at("advanced_by").get<std::string>()).kind;
  s.objective = j.at("objective").get<std::vector<double>>();
  s.var_lower = bounds_from_json(j.at("lower"), true);
  s.var_upper = bounds_from_json(j.at("upper"), false);
  s.integrality = j.at("integrality").get<std::vector<int>>();
  for (const auto& jr : j.at("rows")) s.rows.push_back(row_from_json(jr));
  s.lp_solve_count = j.at("lp_solve_count").get<int>();
  s.var_zero_streak = j.at("var_zero_streak").get<std::vector<int>>();
  s.row_loose_streak = j.at("row_loose_streak").get<std::vector<int>>();
  s.row_created_at = j.at("row_created_at").get<std::vector<int>>();
  const auto& lp = j.at("lp");
  s.lp.objective = lp.at("objective").get<double>();
  s.lp.primal = lp.at("primal").get<std::vector<double>>();
  s.lp.duals = lp.at("duals").get<std::vector<double>>();
  s.lp.reduced_costs = lp.at("reduced_costs").get<std::vector<double>>();
  s.lp.var_status = statuses_from_json(lp.at("var_status"));
  s.lp.row_status = statuses_from_json(lp.at("row_status"));
  for (const auto& jc : j.at("pool")) {
    Cut c;
    c.row = row_from_json(jc);
    c.violation = jc.at("violation").get<double>();
    s.pool.push_back(std::move(c));
  }
  s.la_scores = j.at("la_scores").get<std::vector<double>>();
  if (s.la_scores.size() != s.pool.size())
    throw ParseError(line, "la_scores/pool size mismatch");
  return s;
}

}  // namespace

std::string write_samples_jsonl(const std::vector<Sample>& samples) {
  std::string out;
  for (const Sample& s : samples) {
    out += sample_to_json(s).dump();
    out += '\n';
  }
  return out;
}

std::vector<Sample> read_samples_jsonl(const std::string& text) {
  std::vector<Sample> samples;
  size_t pos = 0;
  int line = 0;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    ++line;
    if (end > pos) {
      ordered_json j;
      try {
        j = ordered_json::parse(text.substr(pos, end - pos));
      } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(line, e.what());
      }
      try {
        samples.push_back(sample_from_json(j, line));
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(line, e.what());
      }
    }
    pos = end + 1;
  }
  return samples;
}

std::string trajectory_csv(const std::vector<Trajectory>& trajectories) {
  std::string out = "instance,round,z,igc,pool_size,chosen_index,scorer\n";
  char buf[256];
  for (const Trajectory& traj : trajectories) {
    const std::string& name =
        traj.instance != nullptr ? traj.instance->name : std::string("?");
    for (const RoundRecord& rec : traj.rounds) {
      std::snprintf(buf, sizeof buf, "%s,%d,%.17g,%.17g,%d,%d,%s\n",
                    name.c_str(), rec.round, rec.z, rec.igc, rec.pool_size,
                    rec.chosen_index, scorer_cli_name(rec.scorer));
      out += buf;
    }
  }
  return out;
}

}  // namespace cutlab
