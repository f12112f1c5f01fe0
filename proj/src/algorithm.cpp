#include "dosp/algorithm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "dosp/rng.hpp"

namespace dosp::algorithm {
namespace {

double set_violation(const geometry::FeasibleSet& set,
                     std::span<const double> x) {
  double v = 0.0;
  if (set.kind == geometry::SetKind::box) {
    for (std::size_t i = 0; i < set.dim; ++i) {
      v = std::max(v, set.lower[i] - x[i]);
      v = std::max(v, x[i] - set.upper[i]);
    }
    return v;
  }
  double s = 0.0;
  for (double c : x) {
    v = std::max(v, -c);
    s += c;
  }
  return std::max(v, std::fabs(s - 1.0));
}

Vec random_in_set(const geometry::FeasibleSet& set, rng::Stream& st) {
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

double StepSchedule::alpha(std::size_t t) const {
  if (t < 1) throw std::invalid_argument("StepSchedule: t < 1");
  return std::pow(static_cast<double>(t), -gamma1) / eps1;
}

double StepSchedule::eta(std::size_t t) const {
  if (t < 1) throw std::invalid_argument("StepSchedule: t < 1");
  return std::pow(static_cast<double>(t), -gamma2) / eps2;
}

double StepSchedule::theta1() const {
  return std::max(1.0 - gamma1, 1.0 - gamma2);
}

double StepSchedule::theta2() const { return std::max(gamma1, gamma2); }

void PredictionMap::apply_x(std::size_t t, std::span<const double> in,
                            std::span<double> out) const {
  switch (x.kind) {
    case MapKind::identity:
      std::copy(in.begin(), in.end(), out.begin());
      return;
    case MapKind::target_dynamics:
      dynamics(t).apply(in, out);
      return;
    case MapKind::fixed_matrix:
      x.matrix.apply(in, out);
      return;
  }
}

void PredictionMap::apply_y(std::size_t t, std::span<const double> in,
                            std::span<double> out) const {
  switch (y.kind) {
    case MapKind::identity:
      std::copy(in.begin(), in.end(), out.begin());
      return;
    case MapKind::target_dynamics:
      dynamics(t).apply(in, out);
      return;
    case MapKind::fixed_matrix:
      y.matrix.apply(in, out);
      return;
  }
}

void validate_prediction_map(const MapSpec& spec,
                             const std::function<Mat(std::size_t)>& dynamics,
                             const geometry::FeasibleSet& set,
                             std::size_t probe_rounds) {
  if (spec.kind == MapKind::identity) return;

  auto check_matrix = [&](const Mat& m, std::size_t t) {
    if (m.rows() != set.dim || m.cols() != set.dim)
      throw std::invalid_argument("prediction map: dimension mismatch");
    double nrm = operator_norm2(m);
    if (nrm > 1.0 + 1e-12)
      throw std::invalid_argument("prediction map at t=" + std::to_string(t) +
                                  " is expansive: ||B||_2 = " +
                                  std::to_string(nrm));
    Vec img(set.dim);
    auto check_point = [&](const Vec& p) {
      m.apply(p, img);
      if (set_violation(set, img) > 1e-9)
        throw std::invalid_argument(
            "prediction map at t=" + std::to_string(t) +
            " leaves the feasible set (violation " +
            std::to_string(set_violation(set, img)) + ")");
    };
    if (set.kind == geometry::SetKind::box) {
      const std::size_t d = set.dim;
      if (d <= 12) {
        for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
          Vec corner(d);
          for (std::size_t i = 0; i < d; ++i)
            corner[i] = (mask >> i) & 1 ? set.upper[i] : set.lower[i];
          check_point(corner);
        }
      } else {
        rng::Stream st = rng::substream(11, rng::Purpose::generic, set.dim);
        for (int k = 0; k < 4096; ++k) {
          Vec corner(d);
          for (std::size_t i = 0; i < d; ++i)
            corner[i] = st.u01() < 0.5 ? set.lower[i] : set.upper[i];
          check_point(corner);
        }
      }
    } else {
      for (std::size_t i = 0; i < set.dim; ++i) {
        Vec vertex(set.dim, 0.0);
        vertex[i] = 1.0;
        check_point(vertex);
      }
    }
    rng::Stream st = rng::substream(13, rng::Purpose::generic, set.dim, t);
    for (int k = 0; k < 64; ++k) check_point(random_in_set(set, st));
  };

  if (spec.kind == MapKind::fixed_matrix) {
    check_matrix(spec.matrix, 0);
    return;
  }
  if (!dynamics)
    throw std::invalid_argument(
        "prediction map: target_dynamics requires a dynamics provider");
  // time-varying: probe early rounds densely, later rounds sparsely
  for (std::size_t t = 1; t <= std::min<std::size_t>(probe_rounds, 8); ++t)
    check_matrix(dynamics(t), t);
  for (std::size_t t = 16; t <= probe_rounds; t *= 4)
    check_matrix(dynamics(t), t);
}

Vec mirror_project(const geometry::BregmanGeometry& geom,
                   const geometry::FeasibleSet& set, std::span<const double> x,
                   std::span<const double> g, double step,
                   geometry::Direction dir) {
  if (geom.kind == geometry::GeomKind::kl_simplex &&
      set.kind == geometry::SetKind::simplex) {
    if (dir == geometry::Direction::descent)
      return geometry::kl_mirror_step(x, g, step);
    Vec neg(g.size());
    kernels::active().axpby(g.size(), -1.0, g.data(), 0.0, g.data(), neg.data());
    return geometry::kl_mirror_step(x, neg, step);
  }
  Vec z = geom.mirror_update(x, g, step, dir);
  return geometry::bregman_project(geom, set, z);
}

namespace {

RoundOutput run_round(const RoundArgs& a, std::size_t k,
                      const std::vector<Vec>& x, const std::vector<Vec>& y,
                      const std::vector<Vec>& gx, const std::vector<Vec>& gy) {
  const std::size_t n = x.size();
  if (y.size() != n || gx.size() != n || gy.size() != n)
    throw std::invalid_argument("round: per-agent array sizes differ");
  RoundOutput out;
  out.x_tilde.resize(n);
  out.y_tilde.resize(n);
  out.sx.resize(n);
  out.sy.resize(n);
  const double rho_x = a.geom_x->strong_convexity();
  const double rho_y = a.geom_y->strong_convexity();
  double worst_x = -std::numeric_limits<double>::infinity();
  double worst_y = worst_x;
  for (std::size_t i = 0; i < n; ++i) {
    out.x_tilde[i] = mirror_project(*a.geom_x, *a.set_x, x[i], gx[i], a.alpha,
                                    geometry::Direction::descent);
    out.y_tilde[i] = mirror_project(*a.geom_y, *a.set_y, y[i], gy[i], a.eta,
                                    geometry::Direction::ascent);
    // step-displacement bound: ||tilde - current|| <= (step/rho) ||g||_*
    Vec dx_(a.set_x->dim), dy_(a.set_y->dim);
    kernels::active().axpby(dx_.size(), 1.0, out.x_tilde[i].data(), -1.0,
                            x[i].data(), dx_.data());
    kernels::active().axpby(dy_.size(), 1.0, out.y_tilde[i].data(), -1.0,
                            y[i].data(), dy_.data());
    worst_x = std::max(worst_x, a.geom_x->primal_norm(dx_) -
                                    (a.alpha / rho_x) * a.geom_x->dual_norm(gx[i]));
    worst_y = std::max(worst_y, a.geom_y->primal_norm(dy_) -
                                    (a.eta / rho_y) * a.geom_y->dual_norm(gy[i]));
    out.sx[i].resize(a.set_x->dim);
    out.sy[i].resize(a.set_y->dim);
    a.prediction->apply_x(a.t, out.x_tilde[i], out.sx[i]);
    a.prediction->apply_y(a.t, out.y_tilde[i], out.sy[i]);
  }
  out.disp_slack_x = worst_x;
  out.disp_slack_y = worst_y;
  out.x_next = network::multi_consensus(*a.mix, k, out.sx);
  out.y_next = network::multi_consensus(*a.mix, k, out.sy);
  return out;
}

}  // namespace

RoundOutput round_single(const RoundArgs& args, const std::vector<Vec>& x,
                         const std::vector<Vec>& y, const std::vector<Vec>& gx,
                         const std::vector<Vec>& gy) {
  return run_round(args, 1, x, y, gx, gy);
}

RoundOutput round_multi(const RoundArgs& args, std::size_t k,
                        const std::vector<Vec>& x, const std::vector<Vec>& y,
                        const std::vector<Vec>& gx, const std::vector<Vec>& gy) {
  if (k < 1) throw std::invalid_argument("round_multi: K < 1");
  return run_round(args, k, x, y, gx, gy);
}

Trajectory run(const RunInputs& in, problem::TrackingScenario& scenario) {
  if (in.rounds < 1) throw std::invalid_argument("run: rounds < 1");
  if (in.graphs == nullptr) throw std::invalid_argument("run: no graph schedule");
  const std::size_t n = scenario.params().n;
  if (in.graphs->n() != n)
    throw std::invalid_argument("run: graph schedule has " +
                                std::to_string(in.graphs->n()) +
                                " agents, scenario has " + std::to_string(n));
  if (in.geom_x.dim != in.set_x.dim || in.geom_y.dim != in.set_y.dim)
    throw std::invalid_argument("run: geometry/set dimension mismatch");
  if (in.geom_x.kind == geometry::GeomKind::kl_simplex &&
      in.set_x.kind != geometry::SetKind::simplex)
    throw std::invalid_argument("run: kl geometry requires a simplex set");
  if (in.geom_y.kind == geometry::GeomKind::kl_simplex &&
      in.set_y.kind != geometry::SetKind::simplex)
    throw std::invalid_argument("run: kl geometry requires a simplex set");

  if (in.variant == Variant::multi) {
    if (!in.graphs->every_graph_strongly_connected())
      throw std::invalid_argument(
          "run: multi-consensus variant requires every round graph to be "
          "strongly connected");
  } else {
    in.graphs->q();  // throws when no joint-connectivity window is known
  }

  validate_prediction_map(in.prediction.x, in.prediction.dynamics, in.set_x,
                          in.rounds);
  validate_prediction_map(in.prediction.y, in.prediction.dynamics, in.set_y,
                          in.rounds);

  Trajectory traj;
  traj.n = n;
  traj.dx = in.set_x.dim;
  traj.dy = in.set_y.dim;
  traj.rounds = in.rounds;
  traj.seed = in.seed;
  traj.variant = in.variant;

  // initial decisions: uniform in the feasible sets from per-agent substreams
  std::vector<Vec> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    rng::Stream sx = rng::substream(in.seed, rng::Purpose::init_x, i);
    rng::Stream sy = rng::substream(in.seed, rng::Purpose::init_y, i);
    x[i] = random_in_set(in.set_x, sx);
    y[i] = random_in_set(in.set_y, sy);
  }
  traj.states_x.push_back(x);
  traj.states_y.push_back(y);

  double worst_feas = 0.0, worst_slack = -std::numeric_limits<double>::infinity();
  std::vector<Vec> gx(n), gy(n);
  for (std::size_t t = 1; t <= in.rounds; ++t) {
    problem::RoundLoss loss = scenario.round_loss(t, x);
    for (std::size_t idx = 0; idx < n; ++idx) {
      std::size_t i = in.reverse_agents ? n - 1 - idx : idx;
      auto [gxi, gyi] = scenario.noisy_gradients(loss, i, t, x[i], y[i]);
      gx[i] = std::move(gxi);
      gy[i] = std::move(gyi);
    }
    RoundArgs args;
    args.geom_x = &in.geom_x;
    args.geom_y = &in.geom_y;
    args.set_x = &in.set_x;
    args.set_y = &in.set_y;
    args.prediction = &in.prediction;
    args.mix = &in.graphs->at(t);
    args.alpha = in.steps.alpha(t);
    args.eta = in.steps.eta(t);
    args.t = t;
    RoundOutput out = in.variant == Variant::single
                          ? round_single(args, x, y, gx, gy)
                          : round_multi(args, in.ks.at(t), x, y, gx, gy);

    for (std::size_t i = 0; i < n; ++i) {
      worst_feas = std::max(worst_feas, set_violation(in.set_x, out.x_tilde[i]));
      worst_feas = std::max(worst_feas, set_violation(in.set_y, out.y_tilde[i]));
      worst_feas = std::max(worst_feas, set_violation(in.set_x, out.sx[i]));
      worst_feas = std::max(worst_feas, set_violation(in.set_y, out.sy[i]));
      worst_feas = std::max(worst_feas, set_violation(in.set_x, out.x_next[i]));
      worst_feas = std::max(worst_feas, set_violation(in.set_y, out.y_next[i]));
    }
    worst_slack = std::max(worst_slack,
                           std::max(out.disp_slack_x, out.disp_slack_y));

    RoundRecord rec;
    rec.grad_x = gx;
    rec.grad_y = gy;
    rec.x_tilde = std::move(out.x_tilde);
    rec.y_tilde = std::move(out.y_tilde);
    rec.sx = std::move(out.sx);
    rec.sy = std::move(out.sy);
    rec.alpha = args.alpha;
    rec.eta = args.eta;
    rec.disp_slack_x = out.disp_slack_x;
    rec.disp_slack_y = out.disp_slack_y;
    traj.records.push_back(std::move(rec));
    traj.losses.push_back(std::move(loss));

    x = std::move(out.x_next);
    y = std::move(out.y_next);
    traj.states_x.push_back(x);
    traj.states_y.push_back(y);
  }
  // the round-(T+1) objective is realized by the final decisions
  traj.losses.push_back(scenario.round_loss(in.rounds + 1, x));
  traj.worst_feasibility = worst_feas;
  traj.worst_disp_slack = worst_slack;
  return traj;
}

}  // namespace dosp::algorithm
