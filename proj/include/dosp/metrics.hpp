#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "dosp/algorithm.hpp"
#include "dosp/network.hpp"
#include "dosp/saddle.hpp"
#include "dosp/vec.hpp"

// Regret and diagnostic metrics over finished trajectories, plus the
// evaluated regret upper bounds for side-by-side comparison. Every series
// is indexed by prefix length: series[T-1] is the value at horizon T.

namespace dosp::metrics {

// signed cumulative gap sum_{t<=T} [f_t(x_{j,t}, y_{j,t}) - f_t(x*_t, y*_t)]
// using the noiseless realized losses
Vec regret_gap_series(const algorithm::Trajectory& traj,
                      const saddle::SaddleSequence& saddle, std::size_t j);

// realized dynamic saddle-point regret of agent j: |gap|
Vec dynamic_sp_regret(const algorithm::Trajectory& traj,
                      const saddle::SaddleSequence& saddle, std::size_t j);

// x-side: sum_{t,i} [f_{i,t}(x_{i,t}, y_{i,t}) - f_{i,t}(x*_t, y_{i,t})]
// y-side: sum_{t,i} [f_{i,t}(x_{i,t}, y*_t) - f_{i,t}(x_{i,t}, y_{i,t})]
std::pair<Vec, Vec> partial_regrets(const algorithm::Trajectory& traj,
                                    const saddle::SaddleSequence& saddle);

struct PathVariation {
  Vec x, y;     // V_T^x, V_T^y
  Vec overall;  // max of both
};

// V_T^x = sum_{t<=T} ||x*_{t+1} - B_t x*_t|| in the geometry's primal norm;
// the saddle sequence must cover rounds 1..T+1.
PathVariation path_variation(const saddle::SaddleSequence& saddle,
                             const algorithm::PredictionMap& prediction,
                             const geometry::BregmanGeometry& geom_x,
                             const geometry::BregmanGeometry& geom_y);

struct ConsensusError {
  Vec per_round_x, per_round_y;    // sum_i ||x_{i,t} - x_avg,t||
  Vec cumulative_x, cumulative_y;  // prefix sums
};

ConsensusError consensus_error(const algorithm::Trajectory& traj,
                               const geometry::BregmanGeometry& geom_x,
                               const geometry::BregmanGeometry& geom_y);

struct AdsprReport {
  std::vector<Vec> per_agent;  // M_j(T) = regret_j(T) / T
  Vec inf_env, sup_env, global;
  Vec normalized;  // global divided by its T=1 value
  bool normalization_skipped = false;
};

// Builds the time-average report from per-agent (absolute) regret series.
AdsprReport adspr_family(const std::vector<Vec>& regret_per_agent);

// |seed-mean signed gap| per agent: approximates the expected regret.
// Input indexing: gaps[seed][agent][T-1].
std::vector<Vec> expected_regret(const std::vector<std::vector<Vec>>& gaps);

// ---- regret upper bounds ---------------------------------------------------

struct BoundConstants {
  double l_x = 0.0, l_y = 0.0;      // stochastic-gradient norm bounds
  double rho_x = 1.0, rho_y = 1.0;  // strong-convexity moduli
  double r_x = 0.0, r_y = 0.0;      // max divergence over the sets
  double k_x = 0.0, k_y = 0.0;      // divergence Lipschitz constants
  double i1 = 0.0, i2 = 0.0, i3 = 0.0, i4 = 0.0, i5 = 0.0, i6 = 0.0;
  double mix = 0.0;    // Gamma/(1-sigma), or Gamma1 sigma1^(K-1)/(1-sigma1^K)
  double e1 = 0.0, e2 = 0.0;  // n^2 L / rho
  double theta1 = 0.0, theta2 = 0.0;
  network::ConsensusConstants consensus;
};

// Max divergence over the set and the Lipschitz constant of the divergence
// in its first argument; closed forms for the euclidean geometry, sampled
// estimates otherwise (sample count fixed and documented in the README).
double max_divergence(const geometry::BregmanGeometry& geom,
                      const geometry::FeasibleSet& set);
double divergence_lipschitz(const geometry::BregmanGeometry& geom,
                            const geometry::FeasibleSet& set);

BoundConstants bound_constants(const algorithm::Trajectory& traj,
                               const geometry::BregmanGeometry& geom_x,
                               const geometry::BregmanGeometry& geom_y,
                               const geometry::FeasibleSet& set_x,
                               const geometry::FeasibleSet& set_y,
                               std::pair<double, double> lipschitz,
                               const network::ConsensusConstants& cc,
                               algorithm::Variant variant,
                               const algorithm::StepSchedule& steps);

// Right-hand side of the regret bound at every prefix T:
//   I1 + mix I2 + (I3 + mix I4) sum alpha + (I5 + mix I6) sum eta
//   + n R_X / alpha_T + n R_Y / eta_T
//   + n K_X sum (1/alpha_t) ||x*_{t+1} - B_t x*_t||
//   + n K_Y sum (1/eta_t)  ||y*_{t+1} - C_t y*_t||
Vec theorem_bound_series(const BoundConstants& c, std::size_t n,
                         const algorithm::StepSchedule& steps,
                         const saddle::SaddleSequence& saddle,
                         const algorithm::PredictionMap& prediction,
                         const geometry::BregmanGeometry& geom_x,
                         const geometry::BregmanGeometry& geom_y,
                         std::size_t rounds);

// Consensus-error bound at every prefix T (x side or y side):
//   sum_i ||x_{i,1} - x_avg,1|| + n mix sum_j ||x_{j,1}||
//   + mix E sum_{t<=T-1} step_t
Vec consensus_bound_series(const BoundConstants& c,
                           const algorithm::Trajectory& traj,
                           const geometry::BregmanGeometry& geom,
                           const algorithm::StepSchedule& steps, bool x_side);

}  // namespace dosp::metrics
