#include "dosp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dosp::geometry {
namespace {

void check_dim(std::size_t expected, std::size_t got, const char* where) {
  if (expected != got)
    throw std::invalid_argument(std::string(where) + ": dimension mismatch");
}

double pnorm_value(std::span<const double> v, double p) {
  double s = 0.0;
  for (double x : v) s += std::pow(std::fabs(x), p);
  return std::pow(s, 1.0 / p);
}

// gradient of 1/2 ||v||_r^2: ||v||_r^(2-r) * sign(v_i) |v_i|^(r-1)
Vec pnorm_half_sq_grad(std::span<const double> v, double r) {
  Vec g(v.size(), 0.0);
  double nrm = pnorm_value(v, r);
  if (nrm == 0.0) return g;
  double scale = std::pow(nrm, 2.0 - r);
  for (std::size_t i = 0; i < v.size(); ++i) {
    double s = v[i] > 0.0 ? 1.0 : (v[i] < 0.0 ? -1.0 : 0.0);
    g[i] = scale * s * std::pow(std::fabs(v[i]), r - 1.0);
  }
  return g;
}

}  // namespace

FeasibleSet FeasibleSet::box(Vec lower, Vec upper) {
  if (lower.size() != upper.size())
    throw std::invalid_argument("FeasibleSet::box: bound sizes differ");
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (lower[i] > upper[i])
      throw std::invalid_argument("FeasibleSet::box: lower > upper");
  FeasibleSet s;
  s.kind = SetKind::box;
  s.dim = lower.size();
  s.lower = std::move(lower);
  s.upper = std::move(upper);
  return s;
}

FeasibleSet FeasibleSet::box(std::size_t dim, double lo, double hi) {
  return box(Vec(dim, lo), Vec(dim, hi));
}

FeasibleSet FeasibleSet::simplex(std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("FeasibleSet::simplex: dim == 0");
  FeasibleSet s;
  s.kind = SetKind::simplex;
  s.dim = dim;
  return s;
}

bool FeasibleSet::contains(std::span<const double> x, double tol) const {
  if (x.size() != dim) return false;
  if (kind == SetKind::box) {
    for (std::size_t i = 0; i < dim; ++i)
      if (x[i] < lower[i] - tol || x[i] > upper[i] + tol) return false;
    return true;
  }
  double s = 0.0;
  for (double v : x) {
    if (v < -tol) return false;
    s += v;
  }
  return std::fabs(s - 1.0) <= tol;
}

BregmanGeometry BregmanGeometry::euclidean(std::size_t dim) {
  return {GeomKind::euclidean, dim, 2.0};
}

BregmanGeometry BregmanGeometry::kl(std::size_t dim) {
  return {GeomKind::kl_simplex, dim, 2.0};
}

BregmanGeometry BregmanGeometry::pnorm(std::size_t dim, double p) {
  if (!(p > 1.0 && p <= 2.0))
    throw std::invalid_argument("BregmanGeometry::pnorm: p must be in (1, 2]");
  return {GeomKind::p_norm, dim, p};
}

double BregmanGeometry::strong_convexity() const {
  switch (kind) {
    case GeomKind::euclidean:
      return 1.0;
    case GeomKind::kl_simplex:
      return 1.0;  // Pinsker, with respect to l1
    case GeomKind::p_norm:
      return p - 1.0;
  }
  return 1.0;
}

double BregmanGeometry::primal_norm(std::span<const double> v) const {
  switch (kind) {
    case GeomKind::euclidean:
      return norm2(v);
    case GeomKind::kl_simplex:
      return norm1(v);
    case GeomKind::p_norm:
      return pnorm_value(v, p);
  }
  return 0.0;
}

double BregmanGeometry::dual_norm(std::span<const double> v) const {
  switch (kind) {
    case GeomKind::euclidean:
      return norm2(v);
    case GeomKind::kl_simplex:
      return norm_inf(v);
    case GeomKind::p_norm:
      return pnorm_value(v, p / (p - 1.0));
  }
  return 0.0;
}

Vec BregmanGeometry::grad_R(std::span<const double> x) const {
  check_dim(dim, x.size(), "grad_R");
  switch (kind) {
    case GeomKind::euclidean:
      return Vec(x.begin(), x.end());
    case GeomKind::kl_simplex: {
      Vec g(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        if (x[i] <= 0.0)
          throw std::domain_error("grad_R: kl geometry needs positive coordinates");
        g[i] = 1.0 + std::log(x[i]);
      }
      return g;
    }
    case GeomKind::p_norm:
      return pnorm_half_sq_grad(x, p);
  }
  return {};
}

Vec BregmanGeometry::grad_R_inverse(std::span<const double> theta) const {
  check_dim(dim, theta.size(), "grad_R_inverse");
  switch (kind) {
    case GeomKind::euclidean:
      return Vec(theta.begin(), theta.end());
    case GeomKind::kl_simplex: {
      Vec x(dim);
      for (std::size_t i = 0; i < dim; ++i) x[i] = std::exp(theta[i] - 1.0);
      if (!all_finite(x))
        throw std::overflow_error("grad_R_inverse: kl dual point overflowed");
      return x;
    }
    case GeomKind::p_norm:
      // conjugate of 1/2 ||.||_p^2 is 1/2 ||.||_q^2
      return pnorm_half_sq_grad(theta, p / (p - 1.0));
  }
  return {};
}

double BregmanGeometry::divergence(std::span<const double> a,
                                   std::span<const double> b) const {
  check_dim(dim, a.size(), "divergence");
  check_dim(dim, b.size(), "divergence");
  switch (kind) {
    case GeomKind::euclidean:
      return 0.5 * kernels::active().diff_nrm2sq(dim, a.data(), b.data());
    case GeomKind::kl_simplex: {
      // generalized KL, valid for any positive b and nonnegative a
      double s = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        if (b[i] <= 0.0)
          throw std::domain_error("divergence: kl geometry needs positive b");
        if (a[i] < 0.0)
          throw std::domain_error("divergence: kl geometry needs nonnegative a");
        if (a[i] > 0.0) s += a[i] * std::log(a[i] / b[i]);
        s += b[i] - a[i];
      }
      return s;
    }
    case GeomKind::p_norm: {
      double na = pnorm_value(a, p);
      double nb = pnorm_value(b, p);
      Vec gb = pnorm_half_sq_grad(b, p);
      double cross = 0.0;
      for (std::size_t i = 0; i < dim; ++i) cross += gb[i] * (a[i] - b[i]);
      return 0.5 * na * na - 0.5 * nb * nb - cross;
    }
  }
  return 0.0;
}

Vec BregmanGeometry::mirror_update(std::span<const double> x,
                                   std::span<const double> g, double step,
                                   Direction dir) const {
  check_dim(dim, x.size(), "mirror_update");
  check_dim(dim, g.size(), "mirror_update");
  if (!(step > 0.0)) throw std::invalid_argument("mirror_update: step <= 0");
  const double sgn = dir == Direction::descent ? -1.0 : 1.0;
  switch (kind) {
    case GeomKind::euclidean: {
      Vec z(dim);
      kernels::active().axpby(dim, 1.0, x.data(), sgn * step, g.data(), z.data());
      return z;
    }
    case GeomKind::kl_simplex: {
      // grad R(z) = 1 + ln z, so z_i = x_i exp(sgn step g_i) exactly
      Vec z(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        if (x[i] <= 0.0)
          throw std::domain_error("mirror_update: kl geometry needs positive x");
        z[i] = x[i] * std::exp(sgn * step * g[i]);
      }
      if (!all_finite(z))
        throw std::overflow_error("mirror_update: kl dual point overflowed");
      return z;
    }
    case GeomKind::p_norm: {
      Vec theta = grad_R(x);
      kernels::active().axpy(dim, sgn * step, g.data(), theta.data());
      return grad_R_inverse(theta);
    }
  }
  return {};
}

Vec clip_simplex(std::span<const double> x, double floor) {
  Vec out(x.begin(), x.end());
  double s = 0.0;
  for (double& v : out) {
    if (v < floor) v = floor;
    s += v;
  }
  kernels::active().scal(out.size(), 1.0 / s, out.data());
  return out;
}

Vec project_simplex_l2(std::span<const double> z) {
  const std::size_t n = z.size();
  Vec u(z.begin(), z.end());
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cum += u[i];
    double cand = (cum - 1.0) / static_cast<double>(i + 1);
    if (u[i] - cand > 0.0) theta = cand;
  }
  Vec out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::max(z[i] - theta, 0.0);
  return out;
}

Vec bregman_project(const BregmanGeometry& geom, const FeasibleSet& set,
                    std::span<const double> z) {
  check_dim(geom.dim, set.dim, "bregman_project");
  check_dim(geom.dim, z.size(), "bregman_project");
  switch (geom.kind) {
    case GeomKind::euclidean: {
      if (set.kind == SetKind::box) {
        Vec out(geom.dim);
        kernels::active().clamp(geom.dim, set.lower.data(), set.upper.data(),
                                z.data(), out.data());
        return out;
      }
      return project_simplex_l2(z);
    }
    case GeomKind::kl_simplex: {
      if (set.kind != SetKind::simplex)
        throw std::invalid_argument(
            "bregman_project: kl geometry requires a simplex set");
      double s = 0.0;
      for (double v : z) {
        if (v < 0.0)
          throw std::domain_error("bregman_project: kl input must be nonnegative");
        s += v;
      }
      if (s <= 0.0)
        throw std::domain_error("bregman_project: kl input sums to zero");
      // argmin of the generalized KL over the simplex is plain normalization
      Vec out(z.begin(), z.end());
      kernels::active().scal(out.size(), 1.0 / s, out.data());
      return out;
    }
    case GeomKind::p_norm:
      return bregman_project_numeric(geom, set, z);
  }
  return {};
}

Vec bregman_project_numeric(const BregmanGeometry& geom, const FeasibleSet& set,
                            std::span<const double> z, double tol,
                            int max_iter) {
  check_dim(geom.dim, set.dim, "bregman_project_numeric");
  check_dim(geom.dim, z.size(), "bregman_project_numeric");
  if (geom.kind == GeomKind::kl_simplex)
    throw std::invalid_argument(
        "bregman_project_numeric: kl is handled in closed form");

  auto euclid_proj = [&](const Vec& v) {
    if (set.kind == SetKind::box) {
      Vec out(v.size());
      kernels::active().clamp(v.size(), set.lower.data(), set.upper.data(),
                              v.data(), out.data());
      return out;
    }
    return project_simplex_l2(v);
  };

  const Vec gz = geom.grad_R(z);
  auto objective = [&](const Vec& x) {
    double rx = 0.5 * std::pow(geom.primal_norm(x), 2.0);
    double cross = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) cross += gz[i] * (x[i] - z[i]);
    double rz = 0.5 * std::pow(geom.primal_norm(z), 2.0);
    return rx - rz - cross;
  };
  auto gradient = [&](const Vec& x) {
    Vec g = geom.grad_R(x);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] -= gz[i];
    return g;
  };

  Vec x = euclid_proj(Vec(z.begin(), z.end()));
  double fx = objective(x);
  double step = 1.0;
  for (int it = 0; it < max_iter; ++it) {
    Vec g = gradient(x);
    // backtracking on the projected step
    Vec cand;
    double fc = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      Vec trial(x.size());
      kernels::active().axpby(x.size(), 1.0, x.data(), -step, g.data(),
                              trial.data());
      cand = euclid_proj(trial);
      fc = objective(cand);
      double decrease = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i)
        decrease += g[i] * (x[i] - cand[i]);
      double move = kernels::active().diff_nrm2sq(x.size(), x.data(), cand.data());
      if (fc <= fx - decrease + 0.5 * move / std::max(step, 1e-300) + 1e-15 ||
          move == 0.0) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    double residual =
        std::sqrt(kernels::active().diff_nrm2sq(x.size(), x.data(), cand.data())) /
        std::max(step, 1e-300);
    x = std::move(cand);
    fx = fc;
    if (residual <= tol) break;
    step = std::min(step * 2.0, 1.0);
  }
  return x;
}

Vec kl_mirror_step(std::span<const double> x, std::span<const double> g,
                   double step) {
  if (x.size() != g.size())
    throw std::invalid_argument("kl_mirror_step: dimension mismatch");
  const std::size_t n = x.size();
  double emax = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] <= 0.0)
      throw std::domain_error("kl_mirror_step: x must be strictly positive");
    emax = std::max(emax, -step * g[i]);
  }
  Vec w(n);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = x[i] * std::exp(-step * g[i] - emax);
    s += w[i];
  }
  kernels::active().scal(n, 1.0 / s, w.data());
  return w;
}

double set_diameter(const FeasibleSet& set, const BregmanGeometry& geom) {
  if (set.kind == SetKind::box) {
    Vec d(set.dim);
    for (std::size_t i = 0; i < set.dim; ++i) d[i] = set.upper[i] - set.lower[i];
    return geom.primal_norm(d);
  }
  // simplex: the extreme pair is a pair of vertices, ||e_i - e_j||
  switch (geom.kind) {
    case GeomKind::euclidean:
      return set.dim > 1 ? std::numbers::sqrt2 : 0.0;
    case GeomKind::kl_simplex:
      return set.dim > 1 ? 2.0 : 0.0;
    case GeomKind::p_norm:
      return set.dim > 1 ? std::pow(2.0, 1.0 / geom.p) : 0.0;
  }
  return 0.0;
}

}  // namespace dosp::geometry
