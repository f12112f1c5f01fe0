#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dosp/algorithm.hpp"
#include "dosp/config.hpp"
#include "dosp/metrics.hpp"
#include "dosp/saddle.hpp"

#include "json.hpp"

// Experiment orchestration: materializing configs, running seeds, batch
// invariant checking, and persistence (binary trajectories, metric CSVs,
// JSON summaries).

namespace dosp::harness {

struct Check {
  std::string name;
  bool pass = false;
  double margin = 0.0;  // signed; <= 0 means satisfied with room
  std::string detail;
};

struct Materialized {
  geometry::BregmanGeometry geom_x, geom_y;
  geometry::FeasibleSet set_x, set_y;
  network::GraphSchedule schedule;
  network::KSchedule ks;
};

Materialized materialize(const config::RunConfig& c);

algorithm::RunInputs make_inputs(const config::RunConfig& c,
                                 const Materialized& m,
                                 problem::TrackingScenario& scenario,
                                 std::uint64_t seed);

// Everything computed for one seed (no disk I/O).
struct SeedRun {
  std::uint64_t seed = 0;
  algorithm::Trajectory traj;
  saddle::SaddleSequence saddle;
  std::vector<Vec> gaps;  // signed cumulative gap per agent
  metrics::AdsprReport adspr;
  metrics::ConsensusError consensus;
  metrics::BoundConstants constants;
  Vec bound;                     // regret bound series
  Vec lemma_rhs_x, lemma_rhs_y;  // consensus-error bound series
};

SeedRun run_seed(const config::RunConfig& c, std::uint64_t seed);

struct ExecuteResult {
  std::vector<Check> checks;
  bool all_pass = true;
  nlohmann::json summary;
};

// Runs every seed, writes trajectories, per-seed and seed-mean CSVs and
// summary.json under c.out_dir. Prints one line per check unless quiet.
ExecuteResult execute(const config::RunConfig& c, bool quiet = false);

struct VerifyResult {
  std::vector<Check> checks;
  bool all_pass = true;
};

// Batch invariant checker: double stochasticity, weight floor, the
// transition-matrix contraction bounds (single and K-fold), prediction-map
// validation, the divergence lower bound, and a short-run check of the
// displacement and consensus-error bounds.
VerifyResult verify(const config::RunConfig& c, bool quiet = false);

// ---- persistence -----------------------------------------------------------

void write_trajectory(const std::string& path, const algorithm::Trajectory& t,
                      const saddle::SaddleSequence& s,
                      const std::string& fingerprint);

struct LoadedTrajectory {
  algorithm::Trajectory traj;  // states and losses only (no intermediates)
  saddle::SaddleSequence saddle;
  std::string fingerprint;
};

LoadedTrajectory read_trajectory(const std::string& path);

// One row per round:
// t, regret_1..regret_n, adspr_inf, adspr_sup, adspr_global,
// adspr_normalized, consensus_x, consensus_y, bound
void write_metrics_csv(const std::string& path,
                       const std::vector<Vec>& regret_per_agent,
                       const metrics::AdsprReport& adspr,
                       const Vec& consensus_x, const Vec& consensus_y,
                       const Vec& bound);

}  // namespace dosp::harness
