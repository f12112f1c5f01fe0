#include "dosp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dosp/rng.hpp"

namespace dosp::metrics {
namespace {

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

// clipped vertex of the simplex, usable inside logs
Vec clipped_vertex(std::size_t dim, std::size_t i) {
  Vec v(dim, 0.0);
  v[i] = 1.0;
  return geometry::clip_simplex(v);
}

}  // namespace

Vec regret_gap_series(const algorithm::Trajectory& traj,
                      const saddle::SaddleSequence& saddle, std::size_t j) {
  if (j >= traj.n) throw std::invalid_argument("regret_gap_series: bad agent");
  if (saddle.x.size() < traj.rounds)
    throw std::invalid_argument("regret_gap_series: saddle sequence too short");
  Vec out(traj.rounds);
  double acc = 0.0;
  for (std::size_t t = 1; t <= traj.rounds; ++t) {
    const problem::RoundLoss& loss = traj.losses[t - 1];
    acc += loss.total_value(traj.x_at(t)[j], traj.y_at(t)[j]) -
           loss.total_value(saddle.x[t - 1], saddle.y[t - 1]);
    out[t - 1] = acc;
  }
  return out;
}

Vec dynamic_sp_regret(const algorithm::Trajectory& traj,
                      const saddle::SaddleSequence& saddle, std::size_t j) {
  Vec out = regret_gap_series(traj, saddle, j);
  for (double& v : out) v = std::fabs(v);
  return out;
}

std::pair<Vec, Vec> partial_regrets(const algorithm::Trajectory& traj,
                                    const saddle::SaddleSequence& saddle) {
  if (saddle.x.size() < traj.rounds)
    throw std::invalid_argument("partial_regrets: saddle sequence too short");
  Vec px(traj.rounds), py(traj.rounds);
  double ax = 0.0, ay = 0.0;
  for (std::size_t t = 1; t <= traj.rounds; ++t) {
    const problem::RoundLoss& loss = traj.losses[t - 1];
    for (std::size_t i = 0; i < traj.n; ++i) {
      const Vec& xi = traj.x_at(t)[i];
      const Vec& yi = traj.y_at(t)[i];
      double f_ii = loss.value(i, xi, yi);
      ax += f_ii - loss.value(i, saddle.x[t - 1], yi);
      ay += loss.value(i, xi, saddle.y[t - 1]) - f_ii;
    }
    px[t - 1] = ax;
    py[t - 1] = ay;
  }
  return {std::move(px), std::move(py)};
}

PathVariation path_variation(const saddle::SaddleSequence& saddle,
                             const algorithm::PredictionMap& prediction,
                             const geometry::BregmanGeometry& geom_x,
                             const geometry::BregmanGeometry& geom_y) {
  if (saddle.x.size() < 2)
    throw std::invalid_argument("path_variation: need at least two rounds");
  const std::size_t horizon = saddle.x.size() - 1;
  PathVariation pv;
  pv.x.resize(horizon);
  pv.y.resize(horizon);
  pv.overall.resize(horizon);
  double ax = 0.0, ay = 0.0;
  Vec bx(saddle.x.front().size()), cy(saddle.y.front().size());
  Vec dx(bx.size()), dy(cy.size());
  for (std::size_t t = 1; t <= horizon; ++t) {
    prediction.apply_x(t, saddle.x[t - 1], bx);
    prediction.apply_y(t, saddle.y[t - 1], cy);
    kernels::active().axpby(bx.size(), 1.0, saddle.x[t].data(), -1.0, bx.data(),
                            dx.data());
    kernels::active().axpby(cy.size(), 1.0, saddle.y[t].data(), -1.0, cy.data(),
                            dy.data());
    ax += geom_x.primal_norm(dx);
    ay += geom_y.primal_norm(dy);
    pv.x[t - 1] = ax;
    pv.y[t - 1] = ay;
    pv.overall[t - 1] = std::max(ax, ay);
  }
  return pv;
}

ConsensusError consensus_error(const algorithm::Trajectory& traj,
                               const geometry::BregmanGeometry& geom_x,
                               const geometry::BregmanGeometry& geom_y) {
  ConsensusError ce;
  const std::size_t horizon = traj.rounds;
  ce.per_round_x.resize(horizon);
  ce.per_round_y.resize(horizon);
  ce.cumulative_x.resize(horizon);
  ce.cumulative_y.resize(horizon);
  Vec avg_x(traj.dx), avg_y(traj.dy), diff(std::max(traj.dx, traj.dy));
  double cx = 0.0, cy = 0.0;
  for (std::size_t t = 1; t <= horizon; ++t) {
    const auto& xs = traj.x_at(t);
    const auto& ys = traj.y_at(t);
    std::fill(avg_x.begin(), avg_x.end(), 0.0);
    std::fill(avg_y.begin(), avg_y.end(), 0.0);
    const double inv = 1.0 / static_cast<double>(traj.n);
    for (std::size_t i = 0; i < traj.n; ++i) {
      kernels::active().axpy(traj.dx, inv, xs[i].data(), avg_x.data());
      kernels::active().axpy(traj.dy, inv, ys[i].data(), avg_y.data());
    }
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < traj.n; ++i) {
      kernels::active().axpby(traj.dx, 1.0, xs[i].data(), -1.0, avg_x.data(),
                              diff.data());
      sx += geom_x.primal_norm({diff.data(), traj.dx});
      kernels::active().axpby(traj.dy, 1.0, ys[i].data(), -1.0, avg_y.data(),
                              diff.data());
      sy += geom_y.primal_norm({diff.data(), traj.dy});
    }
    ce.per_round_x[t - 1] = sx;
    ce.per_round_y[t - 1] = sy;
    cx += sx;
    cy += sy;
    ce.cumulative_x[t - 1] = cx;
    ce.cumulative_y[t - 1] = cy;
  }
  return ce;
}

AdsprReport adspr_family(const std::vector<Vec>& regret_per_agent) {
  if (regret_per_agent.empty())
    throw std::invalid_argument("adspr_family: no agents");
  const std::size_t horizon = regret_per_agent.front().size();
  for (const Vec& r : regret_per_agent)
    if (r.size() != horizon)
      throw std::invalid_argument("adspr_family: ragged series");
  AdsprReport rep;
  rep.per_agent.reserve(regret_per_agent.size());
  for (const Vec& r : regret_per_agent) {
    Vec m(horizon);
    for (std::size_t t = 1; t <= horizon; ++t)
      m[t - 1] = r[t - 1] / static_cast<double>(t);
    rep.per_agent.push_back(std::move(m));
  }
  rep.inf_env.assign(horizon, 0.0);
  rep.sup_env.assign(horizon, 0.0);
  rep.global.assign(horizon, 0.0);
  for (std::size_t t = 0; t < horizon; ++t) {
    double lo = rep.per_agent.front()[t], hi = lo, sum = 0.0;
    for (const Vec& m : rep.per_agent) {
      lo = std::min(lo, m[t]);
      hi = std::max(hi, m[t]);
      sum += m[t];
    }
    rep.inf_env[t] = lo;
    rep.sup_env[t] = hi;
    rep.global[t] = sum / static_cast<double>(rep.per_agent.size());
  }
  if (rep.global.front() == 0.0) {
    rep.normalization_skipped = true;
  } else {
    rep.normalized.resize(horizon);
    for (std::size_t t = 0; t < horizon; ++t)
      rep.normalized[t] = rep.global[t] / rep.global.front();
  }
  return rep;
}

std::vector<Vec> expected_regret(const std::vector<std::vector<Vec>>& gaps) {
  if (gaps.empty()) throw std::invalid_argument("expected_regret: no seeds");
  const std::size_t agents = gaps.front().size();
  const std::size_t horizon = gaps.front().front().size();
  std::vector<Vec> out(agents, Vec(horizon, 0.0));
  const double inv = 1.0 / static_cast<double>(gaps.size());
  for (const auto& seed_gaps : gaps) {
    if (seed_gaps.size() != agents)
      throw std::invalid_argument("expected_regret: ragged seeds");
    for (std::size_t j = 0; j < agents; ++j)
      kernels::active().axpy(horizon, inv, seed_gaps[j].data(), out[j].data());
  }
  for (Vec& r : out)
    for (double& v : r) v = std::fabs(v);
  return out;
}

double max_divergence(const geometry::BregmanGeometry& geom,
                      const geometry::FeasibleSet& set) {
  if (geom.kind == geometry::GeomKind::euclidean) {
    double diam = set_diameter(set, geom);
    return 0.5 * diam * diam;
  }
  // sampled maximization: vertex pairs plus 4096 random pairs
  rng::Stream st = rng::substream(17, rng::Purpose::generic, set.dim);
  double best = 0.0;
  auto probe = [&](const Vec& a, const Vec& b) {
    best = std::max(best, geom.divergence(a, b));
  };
  if (set.kind == geometry::SetKind::simplex) {
    for (std::size_t i = 0; i < set.dim; ++i)
      for (std::size_t j = 0; j < set.dim; ++j)
        if (i != j) probe(clipped_vertex(set.dim, i), clipped_vertex(set.dim, j));
  } else {
    for (int k = 0; k < 512; ++k) {
      Vec a(set.dim), b(set.dim);
      for (std::size_t i = 0; i < set.dim; ++i) {
        a[i] = st.u01() < 0.5 ? set.lower[i] : set.upper[i];
        b[i] = st.u01() < 0.5 ? set.lower[i] : set.upper[i];
      }
      probe(a, b);
    }
  }
  for (int k = 0; k < 4096; ++k) {
    Vec a = random_in_set(set, st), b = random_in_set(set, st);
    if (geom.kind == geometry::GeomKind::kl_simplex) {
      a = geometry::clip_simplex(a);
      b = geometry::clip_simplex(b);
    }
    probe(a, b);
  }
  return best;
}

double divergence_lipschitz(const geometry::BregmanGeometry& geom,
                            const geometry::FeasibleSet& set) {
  if (geom.kind == geometry::GeomKind::euclidean)
    return set_diameter(set, geom);
  rng::Stream st = rng::substream(19, rng::Purpose::generic, set.dim);
  double best = 0.0;
  Vec diff(set.dim);
  for (int k = 0; k < 8192; ++k) {
    Vec a = random_in_set(set, st), b = random_in_set(set, st),
        c = random_in_set(set, st);
    if (geom.kind == geometry::GeomKind::kl_simplex) {
      a = geometry::clip_simplex(a);
      b = geometry::clip_simplex(b);
      c = geometry::clip_simplex(c);
    }
    kernels::active().axpby(set.dim, 1.0, a.data(), -1.0, b.data(), diff.data());
    double den = geom.primal_norm(diff);
    if (den < 1e-12) continue;
    double num = std::fabs(geom.divergence(a, c) - geom.divergence(b, c));
    best = std::max(best, num / den);
  }
  return best;
}

BoundConstants bound_constants(const algorithm::Trajectory& traj,
                               const geometry::BregmanGeometry& geom_x,
                               const geometry::BregmanGeometry& geom_y,
                               const geometry::FeasibleSet& set_x,
                               const geometry::FeasibleSet& set_y,
                               std::pair<double, double> lipschitz,
                               const network::ConsensusConstants& cc,
                               algorithm::Variant variant,
                               const algorithm::StepSchedule& steps) {
  BoundConstants c;
  c.l_x = lipschitz.first;
  c.l_y = lipschitz.second;
  c.rho_x = geom_x.strong_convexity();
  c.rho_y = geom_y.strong_convexity();
  c.r_x = max_divergence(geom_x, set_x);
  c.r_y = max_divergence(geom_y, set_y);
  c.k_x = divergence_lipschitz(geom_x, set_x);
  c.k_y = divergence_lipschitz(geom_y, set_y);
  c.consensus = cc;
  c.theta1 = steps.theta1();
  c.theta2 = steps.theta2();

  const double n = static_cast<double>(traj.n);
  c.i3 = n * c.l_x * c.l_x / c.rho_x;
  c.i4 = n * n * (n + 2.0) * c.l_x * c.l_x / c.rho_x;
  c.i5 = n * c.l_y * c.l_y / c.rho_y;
  c.i6 = n * n * (n + 2.0) * c.l_y * c.l_y / c.rho_y;
  c.e1 = n * n * c.l_x / c.rho_x;
  c.e2 = n * n * c.l_y / c.rho_y;

  // initial-state terms
  const auto& x1 = traj.x_at(1);
  const auto& y1 = traj.y_at(1);
  Vec avg_x(traj.dx, 0.0), avg_y(traj.dy, 0.0), diff(std::max(traj.dx, traj.dy));
  for (std::size_t i = 0; i < traj.n; ++i) {
    kernels::active().axpy(traj.dx, 1.0 / n, x1[i].data(), avg_x.data());
    kernels::active().axpy(traj.dy, 1.0 / n, y1[i].data(), avg_y.data());
  }
  double i1 = 0.0, i2 = 0.0;
  for (std::size_t i = 0; i < traj.n; ++i) {
    kernels::active().axpby(traj.dx, 1.0, x1[i].data(), -1.0, avg_x.data(),
                            diff.data());
    i1 += c.l_x * geom_x.primal_norm({diff.data(), traj.dx});
    kernels::active().axpby(traj.dy, 1.0, y1[i].data(), -1.0, avg_y.data(),
                            diff.data());
    i1 += c.l_y * geom_y.primal_norm({diff.data(), traj.dy});
    i2 += c.l_x * geom_x.primal_norm(x1[i]) + c.l_y * geom_y.primal_norm(y1[i]);
  }
  c.i1 = (n + 2.0) * i1;
  c.i2 = n * (n + 2.0) * i2;

  if (variant == algorithm::Variant::single) {
    c.mix = cc.gamma / (1.0 - cc.sigma);
  } else {
    const double sk = std::pow(cc.sigma1, static_cast<double>(cc.k_min));
    c.mix = cc.gamma1 * std::pow(cc.sigma1, static_cast<double>(cc.k_min) - 1.0) /
            (1.0 - sk);
  }
  return c;
}

Vec theorem_bound_series(const BoundConstants& c, std::size_t n,
                         const algorithm::StepSchedule& steps,
                         const saddle::SaddleSequence& saddle,
                         const algorithm::PredictionMap& prediction,
                         const geometry::BregmanGeometry& geom_x,
                         const geometry::BregmanGeometry& geom_y,
                         std::size_t rounds) {
  if (saddle.x.size() < rounds + 1)
    throw std::invalid_argument(
        "theorem_bound_series: saddle sequence must cover rounds+1");
  Vec out(rounds);
  const double nn = static_cast<double>(n);
  double sum_alpha = 0.0, sum_eta = 0.0, sum_vx = 0.0, sum_vy = 0.0;
  Vec bx(saddle.x.front().size()), cy(saddle.y.front().size());
  Vec dx(bx.size()), dy(cy.size());
  for (std::size_t t = 1; t <= rounds; ++t) {
    const double alpha = steps.alpha(t);
    const double eta = steps.eta(t);
    sum_alpha += alpha;
    sum_eta += eta;
    prediction.apply_x(t, saddle.x[t - 1], bx);
    prediction.apply_y(t, saddle.y[t - 1], cy);
    kernels::active().axpby(bx.size(), 1.0, saddle.x[t].data(), -1.0, bx.data(),
                            dx.data());
    kernels::active().axpby(cy.size(), 1.0, saddle.y[t].data(), -1.0, cy.data(),
                            dy.data());
    sum_vx += geom_x.primal_norm(dx) / alpha;
    sum_vy += geom_y.primal_norm(dy) / eta;
    out[t - 1] = c.i1 + c.mix * c.i2 + (c.i3 + c.mix * c.i4) * sum_alpha +
                 (c.i5 + c.mix * c.i6) * sum_eta + nn * c.r_x / alpha +
                 nn * c.r_y / eta + nn * c.k_x * sum_vx + nn * c.k_y * sum_vy;
  }
  return out;
}

Vec consensus_bound_series(const BoundConstants& c,
                           const algorithm::Trajectory& traj,
                           const geometry::BregmanGeometry& geom,
                           const algorithm::StepSchedule& steps, bool x_side) {
  const std::size_t horizon = traj.rounds;
  const double n = static_cast<double>(traj.n);
  const std::size_t dim = x_side ? traj.dx : traj.dy;
  const auto& first = x_side ? traj.x_at(1) : traj.y_at(1);
  Vec avg(dim, 0.0), diff(dim);
  for (std::size_t i = 0; i < traj.n; ++i)
    kernels::active().axpy(dim, 1.0 / n, first[i].data(), avg.data());
  double init_gap = 0.0, init_norms = 0.0;
  for (std::size_t i = 0; i < traj.n; ++i) {
    kernels::active().axpby(dim, 1.0, first[i].data(), -1.0, avg.data(),
                            diff.data());
    init_gap += geom.primal_norm(diff);
    init_norms += geom.primal_norm(first[i]);
  }
  const double e = x_side ? c.e1 : c.e2;
  Vec out(horizon);
  double sum_steps = 0.0;
  for (std::size_t t = 1; t <= horizon; ++t) {
    // bound at prefix T uses step sums up to T-1
    out[t - 1] = init_gap + n * c.mix * init_norms + c.mix * e * sum_steps;
    sum_steps += x_side ? steps.alpha(t) : steps.eta(t);
  }
  return out;
}

}  // namespace dosp::metrics
