#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dosp/geometry.hpp"
#include "dosp/rng.hpp"
#include "dosp/vec.hpp"

// The robust target-tracking problem: each agent pays a movement cost on x,
// a quadratic tracking penalty toward a perturbed target observation shifted
// by the adversary's y, an l1 regularizer on x, and the adversary pays a
// quadratic penalty on y:
//   f_i(x, y) = c1 <pi_i, x> + c2 ||x - (phihat_i + y)||_2^2
//               + lambda1 ||x||_1 - lambda2 ||y||_2^2
// Convex in x; concave in y whenever c2 < lambda2.

namespace dosp::problem {

enum class TargetKind {
  fixed,              // P_t = I
  planar_rotations,   // 2x2 rotation blocks, angles decay like t^-q
  signed_permutation, // fixed signed permutation (box-preserving isometry)
  cycle,              // cyclic coordinate shift (simplex-compatible)
};

struct TargetSpec {
  TargetKind kind = TargetKind::planar_rotations;
  double max_angle = 0.05;   // per-block cap, radians
  double angle_decay = 0.55; // theta_b(t) = theta_b * t^-angle_decay
};

struct TrackingParams {
  std::size_t n = 10;
  std::size_t d = 6;
  double c1 = 0.1;
  double c2 = 0.3;
  double lambda1 = 0.1;
  double lambda2 = 0.5;
  double a1 = 0.5;        // cost-vector mixing weight, in [0, 1)
  double noise_dx = 1.0;  // per-coordinate gradient-noise variance on x
  double noise_dy = 1.0;  // per-coordinate gradient-noise variance on y
  TargetSpec target;
};

// Target dynamics realized from a seed; ||P_t||_2 = 1 for every kind except
// fixed blocks of a rotation with zero angle (still 1). apply() never builds
// the matrix.
struct TargetDynamics {
  TargetKind kind = TargetKind::fixed;
  std::size_t d = 0;
  double angle_decay = 0.0;
  std::vector<double> block_angle;   // planar_rotations: one per 2x2 block
  std::vector<std::size_t> perm;     // signed_permutation / cycle: out[i] = s_i in[perm[i]]
  std::vector<double> sign;

  void apply(std::size_t t, std::span<const double> in,
             std::span<double> out) const;
  Mat matrix(std::size_t t) const;
};

// Frozen objective of one round (all agents): realized cost vectors and
// target observations plus the coefficients.
struct RoundLoss {
  double c1 = 0.0, c2 = 0.0, lambda1 = 0.0, lambda2 = 0.0;
  std::vector<Vec> pi;      // per agent
  std::vector<Vec> phihat;  // per agent

  std::size_t agents() const { return pi.size(); }
  double value(std::size_t i, std::span<const double> x,
               std::span<const double> y) const;
  Vec grad_x(std::size_t i, std::span<const double> x,
             std::span<const double> y) const;
  Vec grad_y(std::size_t i, std::span<const double> x,
             std::span<const double> y) const;
  double total_value(std::span<const double> x, std::span<const double> y) const;
  // smooth parts of the total gradients (the l1 term is left to prox steps)
  void total_grad_smooth(std::span<const double> x, std::span<const double> y,
                         std::span<double> gx, std::span<double> gy) const;
};

class TrackingScenario {
 public:
  TrackingScenario(TrackingParams params, geometry::FeasibleSet set_x,
                   geometry::FeasibleSet set_y, std::uint64_t master_seed);

  const TrackingParams& params() const { return params_; }
  const geometry::FeasibleSet& set_x() const { return set_x_; }
  const geometry::FeasibleSet& set_y() const { return set_y_; }
  const TargetDynamics& dynamics() const { return dynamics_; }
  std::uint64_t seed() const { return seed_; }

  // target action at round t (t >= 1); phi_{t+1} = P_t phi_t
  const Vec& phi(std::size_t t);
  // observed target: phi_t + (1/sqrt t) eps_{i,t}, eps ~ U[-1,1]^d
  Vec phi_hat(std::size_t i, std::size_t t);
  // realized cost vector; depends on the decision through sgn(x_l)
  Vec cost_vector(std::size_t i, std::size_t t, std::span<const double> x);

  // f_{i,t} and its exact gradients at (x, y) given the decision that
  // generated the cost vector
  RoundLoss round_loss(std::size_t t, const std::vector<Vec>& x_states);

  // exact gradient pair of f_{i,t}
  std::pair<Vec, Vec> gradients(const RoundLoss& loss, std::size_t i,
                                std::span<const double> x,
                                std::span<const double> y) const;
  // gradients plus N(0, Dx I) / N(0, Dy I) noise from the (i, t) substream
  std::pair<Vec, Vec> noisy_gradients(const RoundLoss& loss, std::size_t i,
                                      std::size_t t, std::span<const double> x,
                                      std::span<const double> y) const;

  // Euclidean-norm gradient bounds over the feasible sets plus a 3-sigma
  // noise allowance; these are the L constants used by the regret bounds.
  std::pair<double, double> lipschitz_bounds() const;

 private:
  TrackingParams params_;
  geometry::FeasibleSet set_x_, set_y_;
  std::uint64_t seed_;
  TargetDynamics dynamics_;
  std::vector<Vec> pi_base_;  // per agent
  std::vector<Vec> phi_;      // cached target path, phi_[t-1] = phi_t
};

// loss pieces shared by scenario and recomputation paths
double tracking_value(double c1, double c2, double l1, double l2,
                      std::span<const double> pi, std::span<const double> phihat,
                      std::span<const double> x, std::span<const double> y);
Vec tracking_grad_x(double c1, double c2, double l1, std::span<const double> pi,
                    std::span<const double> phihat, std::span<const double> x,
                    std::span<const double> y);
Vec tracking_grad_y(double c2, double l2, std::span<const double> phihat,
                    std::span<const double> x, std::span<const double> y);

}  // namespace dosp::problem
