#include "dosp/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dosp::problem {
namespace {

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

void TargetDynamics::apply(std::size_t t, std::span<const double> in,
                           std::span<double> out) const {
  if (in.size() != d || out.size() != d)
    throw std::invalid_argument("TargetDynamics::apply: dimension mismatch");
  switch (kind) {
    case TargetKind::fixed:
      std::copy(in.begin(), in.end(), out.begin());
      return;
    case TargetKind::planar_rotations: {
      const double decay = std::pow(static_cast<double>(t), -angle_decay);
      for (std::size_t b = 0; b * 2 + 1 < d; ++b) {
        double theta = block_angle[b] * decay;
        double c = std::cos(theta), s = std::sin(theta);
        double u = in[2 * b], v = in[2 * b + 1];
        out[2 * b] = c * u - s * v;
        out[2 * b + 1] = s * u + c * v;
      }
      if (d % 2 == 1) out[d - 1] = in[d - 1];
      return;
    }
    case TargetKind::signed_permutation:
    case TargetKind::cycle:
      for (std::size_t i = 0; i < d; ++i) out[i] = sign[i] * in[perm[i]];
      return;
  }
}

Mat TargetDynamics::matrix(std::size_t t) const {
  Mat p(d, d);
  Vec e(d, 0.0), col(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    e[j] = 1.0;
    apply(t, e, col);
    for (std::size_t i = 0; i < d; ++i) p(i, j) = col[i];
    e[j] = 0.0;
  }
  return p;
}

double tracking_value(double c1, double c2, double l1, double l2,
                      std::span<const double> pi, std::span<const double> phihat,
                      std::span<const double> x, std::span<const double> y) {
  const std::size_t d = x.size();
  double quad = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    double r = x[i] - (phihat[i] + y[i]);
    quad += r * r;
  }
  return c1 * dot(pi, x) + c2 * quad + l1 * norm1(x) - l2 * dot(y, y);
}

Vec tracking_grad_x(double c1, double c2, double l1, std::span<const double> pi,
                    std::span<const double> phihat, std::span<const double> x,
                    std::span<const double> y) {
  Vec g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = x[i] - (phihat[i] + y[i]);
    g[i] = c1 * pi[i] + 2.0 * c2 * r + l1 * sgn(x[i]);
  }
  return g;
}

Vec tracking_grad_y(double c2, double l2, std::span<const double> phihat,
                    std::span<const double> x, std::span<const double> y) {
  Vec g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = x[i] - (phihat[i] + y[i]);
    g[i] = -2.0 * c2 * r - 2.0 * l2 * y[i];
  }
  return g;
}

double RoundLoss::value(std::size_t i, std::span<const double> x,
                        std::span<const double> y) const {
  return tracking_value(c1, c2, lambda1, lambda2, pi[i], phihat[i], x, y);
}

Vec RoundLoss::grad_x(std::size_t i, std::span<const double> x,
                      std::span<const double> y) const {
  return tracking_grad_x(c1, c2, lambda1, pi[i], phihat[i], x, y);
}

Vec RoundLoss::grad_y(std::size_t i, std::span<const double> x,
                      std::span<const double> y) const {
  return tracking_grad_y(c2, lambda2, phihat[i], x, y);
}

double RoundLoss::total_value(std::span<const double> x,
                              std::span<const double> y) const {
  double s = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) s += value(i, x, y);
  return s;
}

void RoundLoss::total_grad_smooth(std::span<const double> x,
                                  std::span<const double> y,
                                  std::span<double> gx,
                                  std::span<double> gy) const {
  const std::size_t d = x.size();
  const double nn = static_cast<double>(pi.size());
  for (std::size_t l = 0; l < d; ++l) {
    double pis = 0.0, phis = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) {
      pis += pi[i][l];
      phis += phihat[i][l];
    }
    double r = nn * (x[l] - y[l]) - phis;  // sum_i (x - phihat_i - y)
    gx[l] = c1 * pis + 2.0 * c2 * r;
    gy[l] = -2.0 * c2 * r - 2.0 * lambda2 * nn * y[l];
  }
}

TrackingScenario::TrackingScenario(TrackingParams params,
                                   geometry::FeasibleSet set_x,
                                   geometry::FeasibleSet set_y,
                                   std::uint64_t master_seed)
    : params_(std::move(params)),
      set_x_(std::move(set_x)),
      set_y_(std::move(set_y)),
      seed_(master_seed) {
  if (params_.n < 1) throw std::invalid_argument("TrackingScenario: n < 1");
  if (set_x_.dim != params_.d || set_y_.dim != params_.d)
    throw std::invalid_argument("TrackingScenario: set dimensions != d");
  if (!(params_.a1 >= 0.0 && params_.a1 < 1.0))
    throw std::invalid_argument("TrackingScenario: a1 outside [0,1)");
  if (!(params_.c2 < params_.lambda2))
    throw std::invalid_argument(
        "TrackingScenario: need c2 < lambda2 for concavity in y");
  if (params_.target.kind == TargetKind::planar_rotations &&
      set_x_.kind == geometry::SetKind::simplex)
    throw std::invalid_argument(
        "TrackingScenario: rotations do not preserve the simplex; use "
        "cycle or fixed dynamics");

  const std::size_t d = params_.d;
  // dynamics realized per seed
  dynamics_.kind = params_.target.kind;
  dynamics_.d = d;
  dynamics_.angle_decay = params_.target.angle_decay;
  rng::Stream dyn = rng::substream(seed_, rng::Purpose::target_dyn);
  switch (params_.target.kind) {
    case TargetKind::fixed:
      break;
    case TargetKind::planar_rotations:
      for (std::size_t b = 0; b * 2 + 1 < d; ++b)
        dynamics_.block_angle.push_back(params_.target.max_angle *
                                        dyn.uniform(0.5, 1.0));
      break;
    case TargetKind::signed_permutation: {
      dynamics_.perm.resize(d);
      std::iota(dynamics_.perm.begin(), dynamics_.perm.end(), std::size_t{0});
      for (std::size_t i = d; i > 1; --i)
        std::swap(dynamics_.perm[i - 1],
                  dynamics_.perm[dyn.next_u64() % i]);
      dynamics_.sign.resize(d);
      for (double& s : dynamics_.sign) s = dyn.u01() < 0.5 ? -1.0 : 1.0;
      break;
    }
    case TargetKind::cycle: {
      dynamics_.perm.resize(d);
      for (std::size_t i = 0; i < d; ++i) dynamics_.perm[i] = (i + 1) % d;
      dynamics_.sign.assign(d, 1.0);
      break;
    }
  }

  // initial target: inside the largest centered l2 ball contained in the
  // box so isometric dynamics can never leave the set
  rng::Stream init = rng::substream(seed_, rng::Purpose::target_init);
  Vec phi1(d, 0.0);
  if (set_x_.kind == geometry::SetKind::box) {
    double radius = set_x_.upper[0];
    for (std::size_t i = 0; i < d; ++i)
      radius = std::min(radius,
                        std::min(std::fabs(set_x_.lower[i]), set_x_.upper[i]));
    double bound = radius / std::sqrt(static_cast<double>(d));
    init.fill_uniform(phi1, -bound, bound);
  } else {
    for (double& v : phi1) v = -std::log(1.0 - init.u01());
    phi1 = geometry::clip_simplex(phi1);
  }
  phi_.push_back(std::move(phi1));

  // per-agent base cost vectors, U[0,1]^d
  pi_base_.resize(params_.n);
  for (std::size_t i = 0; i < params_.n; ++i) {
    pi_base_[i].resize(d);
    rng::substream(seed_, rng::Purpose::pi_base, i).fill_uniform(pi_base_[i],
                                                                 0.0, 1.0);
  }
}

const Vec& TrackingScenario::phi(std::size_t t) {
  if (t < 1) throw std::invalid_argument("TrackingScenario::phi: t < 1");
  while (phi_.size() < t) {
    std::size_t tau = phi_.size();  // phi_{tau+1} = P_tau phi_tau
    Vec next(params_.d);
    dynamics_.apply(tau, phi_[tau - 1], next);
    phi_.push_back(std::move(next));
  }
  return phi_[t - 1];
}

Vec TrackingScenario::phi_hat(std::size_t i, std::size_t t) {
  Vec eps(params_.d);
  rng::substream(seed_, rng::Purpose::obs_noise, i, t).fill_uniform(eps, -1.0,
                                                                    1.0);
  Vec out = phi(t);
  kernels::active().axpy(params_.d, 1.0 / std::sqrt(static_cast<double>(t)),
                         eps.data(), out.data());
  return out;
}

Vec TrackingScenario::cost_vector(std::size_t i, std::size_t t,
                                  std::span<const double> x) {
  if (t < 1) throw std::invalid_argument("cost_vector: t < 1");
  Vec pi2(params_.d);
  rng::substream(seed_, rng::Purpose::pi_fluct, i, t).fill_uniform(pi2, 0.0,
                                                                   1.0);
  const double w = params_.a1 / std::sqrt(static_cast<double>(t));
  Vec out(params_.d);
  for (std::size_t l = 0; l < params_.d; ++l)
    out[l] = sgn(x[l]) * ((1.0 - w) * pi_base_[i][l] + w * pi2[l]);
  return out;
}

RoundLoss TrackingScenario::round_loss(std::size_t t,
                                       const std::vector<Vec>& x_states) {
  if (x_states.size() != params_.n)
    throw std::invalid_argument("round_loss: wrong number of agent states");
  RoundLoss loss;
  loss.c1 = params_.c1;
  loss.c2 = params_.c2;
  loss.lambda1 = params_.lambda1;
  loss.lambda2 = params_.lambda2;
  loss.pi.reserve(params_.n);
  loss.phihat.reserve(params_.n);
  for (std::size_t i = 0; i < params_.n; ++i) {
    loss.pi.push_back(cost_vector(i, t, x_states[i]));
    loss.phihat.push_back(phi_hat(i, t));
  }
  return loss;
}

std::pair<Vec, Vec> TrackingScenario::gradients(const RoundLoss& loss,
                                                std::size_t i,
                                                std::span<const double> x,
                                                std::span<const double> y) const {
  return {loss.grad_x(i, x, y), loss.grad_y(i, x, y)};
}

std::pair<Vec, Vec> TrackingScenario::noisy_gradients(
    const RoundLoss& loss, std::size_t i, std::size_t t,
    std::span<const double> x, std::span<const double> y) const {
  auto [gx, gy] = gradients(loss, i, x, y);
  rng::Stream st = rng::substream(seed_, rng::Purpose::grad_noise, i, t);
  const double sx = std::sqrt(params_.noise_dx);
  const double sy = std::sqrt(params_.noise_dy);
  for (double& v : gx) v += sx * st.normal();
  for (double& v : gy) v += sy * st.normal();
  return {std::move(gx), std::move(gy)};
}

std::pair<double, double> TrackingScenario::lipschitz_bounds() const {
  const double d = static_cast<double>(params_.d);
  const double sqd = std::sqrt(d);
  // per-coordinate magnitude bounds over the feasible sets
  double x_max = 0.0, ball = 0.0;
  if (set_x_.kind == geometry::SetKind::box) {
    for (std::size_t i = 0; i < params_.d; ++i) {
      x_max = std::max(x_max, std::max(std::fabs(set_x_.lower[i]),
                                       std::fabs(set_x_.upper[i])));
      ball = (i == 0) ? std::min(std::fabs(set_x_.lower[0]), set_x_.upper[0])
                      : std::min(ball, std::min(std::fabs(set_x_.lower[i]),
                                                set_x_.upper[i]));
    }
  } else {
    x_max = 1.0;
    ball = 1.0;
  }
  double y_max = 0.0;
  for (std::size_t i = 0; i < params_.d; ++i)
    y_max = std::max(y_max, std::max(std::fabs(set_y_.lower[i]),
                                     std::fabs(set_y_.upper[i])));
  // |phi_l| <= ball (isometric dynamics in the inscribed ball) and the
  // observation perturbation adds at most 1 per coordinate
  const double diff = x_max + (ball + 1.0) + y_max;
  const double lx = (params_.c1 + params_.lambda1) * sqd +
                    2.0 * params_.c2 * diff * sqd +
                    3.0 * std::sqrt(d * params_.noise_dx);
  const double ly = 2.0 * params_.c2 * diff * sqd +
                    2.0 * params_.lambda2 * y_max * sqd +
                    3.0 * std::sqrt(d * params_.noise_dy);
  return {lx, ly};
}

}  // namespace dosp::problem
