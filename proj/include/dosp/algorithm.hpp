#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dosp/geometry.hpp"
#include "dosp/network.hpp"
#include "dosp/problem.hpp"
#include "dosp/vec.hpp"

// Round-by-round drivers for distributed online stochastic mirror descent
// on convex-concave losses. Each round, every agent
//   1. draws stochastic gradients at its current pair,
//   2. takes a mirror descent step in x and a mirror ascent step in y,
//   3. Bregman-projects both onto the feasible sets,
//   4. applies the prediction maps,
//   5. mixes with its in-neighbors (once, or K_t times for the
//      multi-consensus variant).

namespace dosp::algorithm {

enum class Variant { single, multi };

struct StepSchedule {
  // alpha_t = t^-gamma1 / eps1, eta_t = t^-gamma2 / eps2
  double eps1 = 1.0 / 3.0;
  double gamma1 = 0.35;
  double eps2 = 1.0 / 15.0;
  double gamma2 = 0.4;

  double alpha(std::size_t t) const;
  double eta(std::size_t t) const;
  double theta1() const;  // max(1 - gamma1, 1 - gamma2)
  double theta2() const;  // max(gamma1, gamma2)
};

enum class MapKind { identity, target_dynamics, fixed_matrix };

struct MapSpec {
  MapKind kind = MapKind::identity;
  Mat matrix;  // fixed_matrix only
};

// Prediction maps B_t (on x) and C_t (on y). target_dynamics pulls the
// round-t matrix from the provider (the scenario's target dynamics).
struct PredictionMap {
  MapSpec x, y;
  std::function<Mat(std::size_t t)> dynamics;

  void apply_x(std::size_t t, std::span<const double> in,
               std::span<double> out) const;
  void apply_y(std::size_t t, std::span<const double> in,
               std::span<double> out) const;
};

// Nonexpansiveness / set-mapping validation: operator norm <= 1 + 1e-12 and
// the map sends the set into itself, checked on box vertices for d <= 12
// (sampled corners beyond), simplex vertices, and random points. Throws
// with the violating detail.
void validate_prediction_map(const MapSpec& spec,
                             const std::function<Mat(std::size_t)>& dynamics,
                             const geometry::FeasibleSet& set,
                             std::size_t probe_rounds);

// One projected mirror step: mirror_update then bregman_project, with the
// explicit stabilized formula on the kl/simplex pairing.
Vec mirror_project(const geometry::BregmanGeometry& geom,
                   const geometry::FeasibleSet& set, std::span<const double> x,
                   std::span<const double> g, double step,
                   geometry::Direction dir);

struct RoundArgs {
  const geometry::BregmanGeometry* geom_x = nullptr;
  const geometry::BregmanGeometry* geom_y = nullptr;
  const geometry::FeasibleSet* set_x = nullptr;
  const geometry::FeasibleSet* set_y = nullptr;
  const PredictionMap* prediction = nullptr;
  const Mat* mix = nullptr;  // A_t
  double alpha = 0.0;
  double eta = 0.0;
  std::size_t t = 1;
};

struct RoundOutput {
  std::vector<Vec> x_next, y_next;    // after consensus
  std::vector<Vec> x_tilde, y_tilde;  // after projection
  std::vector<Vec> sx, sy;            // after prediction
  // worst slack of the step-displacement bound
  // ||tilde - current|| - (step / rho) ||grad||_*  over agents
  double disp_slack_x = 0.0, disp_slack_y = 0.0;
};

// Single-consensus round (one weighted-averaging step).
RoundOutput round_single(const RoundArgs& args, const std::vector<Vec>& x,
                         const std::vector<Vec>& y, const std::vector<Vec>& gx,
                         const std::vector<Vec>& gy);

// K-fold consensus round; bit-identical to round_single when k == 1.
RoundOutput round_multi(const RoundArgs& args, std::size_t k,
                        const std::vector<Vec>& x, const std::vector<Vec>& y,
                        const std::vector<Vec>& gx, const std::vector<Vec>& gy);

struct RoundRecord {
  std::vector<Vec> grad_x, grad_y;    // noisy draws
  std::vector<Vec> x_tilde, y_tilde;
  std::vector<Vec> sx, sy;
  double alpha = 0.0, eta = 0.0;
  double disp_slack_x = 0.0, disp_slack_y = 0.0;
};

struct Trajectory {
  std::size_t n = 0, dx = 0, dy = 0, rounds = 0;
  std::uint64_t seed = 0;
  Variant variant = Variant::single;
  // states_* [t-1][i] holds the decisions of round t, t = 1..rounds+1
  std::vector<std::vector<Vec>> states_x, states_y;
  // realized per-round objectives, t = 1..rounds+1
  std::vector<problem::RoundLoss> losses;
  std::vector<RoundRecord> records;  // t = 1..rounds
  double worst_feasibility = 0.0;    // largest set violation observed
  double worst_disp_slack = 0.0;     // largest step-displacement slack

  const std::vector<Vec>& x_at(std::size_t t) const { return states_x[t - 1]; }
  const std::vector<Vec>& y_at(std::size_t t) const { return states_y[t - 1]; }
};

struct RunInputs {
  geometry::BregmanGeometry geom_x, geom_y;
  geometry::FeasibleSet set_x, set_y;
  StepSchedule steps;
  const network::GraphSchedule* graphs = nullptr;
  network::KSchedule ks = network::KSchedule::constant(1);
  Variant variant = Variant::single;
  PredictionMap prediction;
  std::size_t rounds = 1;
  std::uint64_t seed = 1;
  bool reverse_agents = false;  // test hook; must not change the result
};

// Full run on a tracking scenario. Deterministic given (inputs, scenario
// seed); the trajectory carries every intermediate needed by the metrics.
Trajectory run(const RunInputs& in, problem::TrackingScenario& scenario);

}  // namespace dosp::algorithm
