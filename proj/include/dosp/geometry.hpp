#pragma once

#include <cstddef>
#include <span>

#include "dosp/vec.hpp"

// Distance-generating functions, Bregman divergences, mirror updates and
// Bregman projections. Three families are supported:
//   euclidean   R(u) = 1/2 ||u||_2^2      rho = 1      primal norm l2
//   kl_simplex  R(u) = sum u_i ln u_i     rho = 1      primal norm l1
//   p_norm      R(u) = 1/2 ||u||_p^2      rho = p - 1  primal norm lp
// with p in (1, 2]. Dual norms are l2, l_inf and l_q (1/p + 1/q = 1).

namespace dosp::geometry {

enum class GeomKind { euclidean, kl_simplex, p_norm };
enum class SetKind { box, simplex };
enum class Direction { descent, ascent };

// Floor applied to simplex coordinates before anything takes a log.
inline constexpr double kSimplexFloor = 1e-12;

struct FeasibleSet {
  SetKind kind = SetKind::box;
  std::size_t dim = 0;
  Vec lower, upper;  // box only

  static FeasibleSet box(Vec lower, Vec upper);
  static FeasibleSet box(std::size_t dim, double lo, double hi);
  static FeasibleSet simplex(std::size_t dim);

  bool contains(std::span<const double> x, double tol = 1e-12) const;
};

struct BregmanGeometry {
  GeomKind kind = GeomKind::euclidean;
  std::size_t dim = 0;
  double p = 2.0;  // p_norm only

  static BregmanGeometry euclidean(std::size_t dim);
  static BregmanGeometry kl(std::size_t dim);
  static BregmanGeometry pnorm(std::size_t dim, double p);

  // strong-convexity modulus of R with respect to the primal norm
  double strong_convexity() const;

  double primal_norm(std::span<const double> v) const;
  double dual_norm(std::span<const double> v) const;

  Vec grad_R(std::span<const double> x) const;
  Vec grad_R_inverse(std::span<const double> theta) const;

  // Psi(a, b) = R(a) - R(b) - <grad R(b), a - b>
  double divergence(std::span<const double> a, std::span<const double> b) const;

  // Solves grad R(z) = grad R(x) -/+ step * g and returns z (descent takes
  // the minus sign). The result is generally infeasible; project after.
  Vec mirror_update(std::span<const double> x, std::span<const double> g,
                    double step, Direction dir) const;
};

// max(x, floor) coordinatewise, then renormalized to sum 1
Vec clip_simplex(std::span<const double> x, double floor = kSimplexFloor);

// Euclidean projection onto the probability simplex (sort-based, exact).
Vec project_simplex_l2(std::span<const double> z);

// argmin over the set of Psi(x, z). Closed forms: euclidean/box -> clamp,
// euclidean/simplex -> l2 simplex projection, kl/simplex -> normalization.
// p_norm falls back to the numeric projection below. kl/box is rejected.
Vec bregman_project(const BregmanGeometry& geom, const FeasibleSet& set,
                    std::span<const double> z);

// Projected gradient with backtracking on x -> Psi(x, z); usable for every
// geometry/set pairing except kl (whose domain excludes the boundary) and
// kept independent of the closed forms so it can serve as their oracle.
Vec bregman_project_numeric(const BregmanGeometry& geom, const FeasibleSet& set,
                            std::span<const double> z, double tol = 1e-10,
                            int max_iter = 20000);

// Explicit entropic mirror step on the simplex:
//   out_s = x_s exp(-step g_s) / sum_j x_j exp(-step g_j)
// stabilized by subtracting the largest exponent. Coincides with
// mirror_update + bregman_project for the kl geometry.
Vec kl_mirror_step(std::span<const double> x, std::span<const double> g,
                   double step);

// Diameter of the set in the geometry's primal norm.
double set_diameter(const FeasibleSet& set, const BregmanGeometry& geom);

}  // namespace dosp::geometry
