#include "dosp/saddle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dosp/rng.hpp"

namespace dosp::saddle {
namespace {

Vec random_point(const geometry::FeasibleSet& set, rng::Stream& st) {
  Vec v(set.dim);
  if (set.kind == geometry::SetKind::box) {
    for (std::size_t i = 0; i < set.dim; ++i)
      v[i] = st.uniform(set.lower[i], set.upper[i]);
    return v;
  }
  for (double& u : v) u = -std::log(1.0 - st.u01());
  return geometry::clip_simplex(v);
}

}  // namespace

double estimate_smoothness(const SmoothSaddle& s,
                           const geometry::FeasibleSet& set_x,
                           const geometry::FeasibleSet& set_y,
                           std::uint64_t seed, int probes) {
  rng::Stream st = rng::substream(seed, rng::Purpose::generic);
  Vec gx1(s.dx), gy1(s.dy), gx2(s.dx), gy2(s.dy);
  double best = 0.0;
  for (int k = 0; k < probes; ++k) {
    Vec x1 = random_point(set_x, st), y1 = random_point(set_y, st);
    Vec x2 = random_point(set_x, st), y2 = random_point(set_y, st);
    s.grads(x1, y1, gx1, gy1);
    s.grads(x2, y2, gx2, gy2);
    double num = kernels::active().diff_nrm2sq(s.dx, gx1.data(), gx2.data()) +
                 kernels::active().diff_nrm2sq(s.dy, gy1.data(), gy2.data());
    double den = kernels::active().diff_nrm2sq(s.dx, x1.data(), x2.data()) +
                 kernels::active().diff_nrm2sq(s.dy, y1.data(), y2.data());
    if (den > 0.0) best = std::max(best, std::sqrt(num / den));
  }
  return best > 0.0 ? best : 1.0;
}

SolveResult solve(const SmoothSaddle& s, Vec x0, Vec y0, const SolveOptions& opt) {
  if (x0.size() != s.dx || y0.size() != s.dy)
    throw std::invalid_argument("saddle::solve: start point dimension mismatch");
  const double tau = opt.step;
  if (!(tau > 0.0)) throw std::invalid_argument("saddle::solve: step <= 0");

  SolveResult best;
  best.x = x0;
  best.y = y0;
  best.residual = std::numeric_limits<double>::infinity();

  Vec x = std::move(x0), y = std::move(y0);
  Vec gx(s.dx), gy(s.dy), trial_x(s.dx), trial_y(s.dy);
  for (int it = 0; it < opt.max_iter; ++it) {
    s.grads(x, y, gx, gy);
    kernels::active().axpby(s.dx, 1.0, x.data(), -tau, gx.data(), trial_x.data());
    kernels::active().axpby(s.dy, 1.0, y.data(), tau, gy.data(), trial_y.data());
    Vec xb = s.prox_x(trial_x, tau);
    Vec yb = s.proj_y(trial_y);

    double res =
        std::sqrt(kernels::active().diff_nrm2sq(s.dx, x.data(), xb.data()) +
                  kernels::active().diff_nrm2sq(s.dy, y.data(), yb.data())) /
        tau;
    if (res < best.residual) {
      best.residual = res;
      best.x = x;
      best.y = y;
      best.iterations = it;
    }
    if (res <= opt.tol) {
      best.converged = true;
      best.iterations = it;
      return best;
    }

    // extragradient correction evaluated at the half point
    s.grads(xb, yb, gx, gy);
    kernels::active().axpby(s.dx, 1.0, x.data(), -tau, gx.data(), trial_x.data());
    kernels::active().axpby(s.dy, 1.0, y.data(), tau, gy.data(), trial_y.data());
    x = s.prox_x(trial_x, tau);
    y = s.proj_y(trial_y);
  }
  best.converged = best.residual <= opt.tol;
  return best;
}

SmoothSaddle tracking_saddle(const problem::RoundLoss& loss,
                             const geometry::FeasibleSet& set_x,
                             const geometry::FeasibleSet& set_y) {
  if (loss.agents() == 0)
    throw std::invalid_argument("tracking_saddle: empty loss");
  SmoothSaddle s;
  s.dx = set_x.dim;
  s.dy = set_y.dim;
  const problem::RoundLoss* lp = &loss;
  s.grads = [lp](std::span<const double> x, std::span<const double> y,
                 std::span<double> gx, std::span<double> gy) {
    lp->total_grad_smooth(x, y, gx, gy);
  };
  const double l1_total = loss.lambda1 * static_cast<double>(loss.agents());
  if (set_x.kind == geometry::SetKind::box) {
    const geometry::FeasibleSet* sx = &set_x;
    s.prox_x = [sx, l1_total](std::span<const double> v, double tau) {
      Vec out(v.size());
      const double thr = tau * l1_total;
      for (std::size_t i = 0; i < v.size(); ++i) {
        double soft = v[i] > thr ? v[i] - thr : (v[i] < -thr ? v[i] + thr : 0.0);
        out[i] = std::clamp(soft, sx->lower[i], sx->upper[i]);
      }
      return out;
    };
  } else {
    // ||x||_1 = 1 on the simplex, so only the projection remains
    s.prox_x = [](std::span<const double> v, double) {
      return geometry::project_simplex_l2(v);
    };
  }
  const geometry::FeasibleSet* sy = &set_y;
  s.proj_y = [sy](std::span<const double> v) {
    Vec out(v.size());
    kernels::active().clamp(v.size(), sy->lower.data(), sy->upper.data(),
                            v.data(), out.data());
    return out;
  };
  return s;
}

SaddleSequence solve_sequence(const std::vector<problem::RoundLoss>& series,
                              const geometry::FeasibleSet& set_x,
                              const geometry::FeasibleSet& set_y,
                              const SolveOptions& opt) {
  SaddleSequence seq;
  seq.tol = opt.tol;
  if (series.empty()) return seq;

  Vec x(set_x.dim, 0.0), y(set_y.dim, 0.0);
  if (set_x.kind == geometry::SetKind::simplex)
    x.assign(set_x.dim, 1.0 / static_cast<double>(set_x.dim));
  else
    for (std::size_t i = 0; i < set_x.dim; ++i)
      x[i] = 0.5 * (set_x.lower[i] + set_x.upper[i]);
  for (std::size_t i = 0; i < set_y.dim; ++i)
    y[i] = 0.5 * (set_y.lower[i] + set_y.upper[i]);

  double step = opt.step;
  for (const problem::RoundLoss& loss : series) {
    SmoothSaddle s = tracking_saddle(loss, set_x, set_y);
    if (step <= 0.0) step = 0.5 / estimate_smoothness(s, set_x, set_y);
    SolveOptions o = opt;
    o.step = step;
    SolveResult r = solve(s, x, y, o);
    seq.all_converged = seq.all_converged && r.converged;
    x = r.x;
    y = r.y;
    seq.x.push_back(std::move(r.x));
    seq.y.push_back(std::move(r.y));
    seq.residual.push_back(r.residual);
    seq.iterations.push_back(r.iterations);
  }
  return seq;
}

}  // namespace dosp::saddle
