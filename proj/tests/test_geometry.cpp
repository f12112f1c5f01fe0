#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "dosp/geometry.hpp"
#include "dosp/rng.hpp"

using namespace dosp;
using namespace dosp::geometry;

namespace {

Vec random_box_point(rng::Stream& st, const FeasibleSet& set) {
  Vec v(set.dim);
  for (std::size_t i = 0; i < set.dim; ++i)
    v[i] = st.uniform(set.lower[i], set.upper[i]);
  return v;
}

Vec random_simplex_point(rng::Stream& st, std::size_t dim) {
  Vec v(dim);
  for (double& u : v) u = -std::log(1.0 - st.u01());
  return clip_simplex(v);
}

}  // namespace

TEST_CASE("divergence: euclidean and kl spot values") {
  BregmanGeometry eu = BregmanGeometry::euclidean(2);
  CHECK(eu.divergence(Vec{1, 2}, Vec{0, 0}) == doctest::Approx(2.5));

  BregmanGeometry kl = BregmanGeometry::kl(2);
  CHECK(kl.divergence(Vec{0.5, 0.5}, Vec{0.5, 0.5}) == doctest::Approx(0.0));

  // independent high-precision evaluation of sum a ln(a/b)
  long double want = 0.75L * std::log(1.5L) + 0.25L * std::log(0.5L);
  double got = kl.divergence(Vec{0.75, 0.25}, Vec{0.5, 0.5});
  CHECK(got == doctest::Approx(static_cast<double>(want)).epsilon(1e-14));
  CHECK(got == doctest::Approx(0.13081203594113696).epsilon(1e-13));
}

TEST_CASE("divergence: domain violations are rejected") {
  BregmanGeometry kl = BregmanGeometry::kl(2);
  CHECK_THROWS_AS(kl.divergence(Vec{0.5, 0.5}, Vec{1.0, 0.0}),
                  std::domain_error);
  CHECK_THROWS_AS(kl.divergence(Vec{-0.1, 1.1}, Vec{0.5, 0.5}),
                  std::domain_error);
  BregmanGeometry eu = BregmanGeometry::euclidean(2);
  CHECK_THROWS_AS(eu.divergence(Vec{1, 2, 3}, Vec{0, 0}),
                  std::invalid_argument);
}

TEST_CASE("strong-convexity lower bound holds on random pairs") {
  rng::Stream st = rng::substream(1, rng::Purpose::generic);
  FeasibleSet box = FeasibleSet::box(6, -6.0, 6.0);

  SUBCASE("euclidean, rho = 1 w.r.t. l2") {
    BregmanGeometry g = BregmanGeometry::euclidean(6);
    for (int k = 0; k < 1000; ++k) {
      Vec a = random_box_point(st, box), b = random_box_point(st, box);
      Vec d(6);
      for (int i = 0; i < 6; ++i) d[i] = a[i] - b[i];
      double nrm = g.primal_norm(d);
      CHECK(g.divergence(a, b) >= 0.5 * nrm * nrm - 1e-10);
    }
  }
  SUBCASE("kl, rho = 1 w.r.t. l1 (Pinsker)") {
    BregmanGeometry g = BregmanGeometry::kl(6);
    for (int k = 0; k < 1000; ++k) {
      Vec a = random_simplex_point(st, 6), b = random_simplex_point(st, 6);
      Vec d(6);
      for (int i = 0; i < 6; ++i) d[i] = a[i] - b[i];
      double nrm = g.primal_norm(d);
      CHECK(g.divergence(a, b) >= 0.5 * nrm * nrm - 1e-10);
    }
  }
  SUBCASE("p-norm, rho = p-1 w.r.t. lp") {
    for (double p : {1.3, 1.85, 2.0}) {
      BregmanGeometry g = BregmanGeometry::pnorm(6, p);
      for (int k = 0; k < 1000; ++k) {
        Vec a = random_box_point(st, box), b = random_box_point(st, box);
        Vec d(6);
        for (int i = 0; i < 6; ++i) d[i] = a[i] - b[i];
        double nrm = g.primal_norm(d);
        CHECK(g.divergence(a, b) >= 0.5 * (p - 1.0) * nrm * nrm - 1e-10);
      }
    }
  }
}

TEST_CASE("divergence is zero only at identical points") {
  rng::Stream st = rng::substream(2, rng::Purpose::generic);
  FeasibleSet box = FeasibleSet::box(4, -2.0, 2.0);
  BregmanGeometry g = BregmanGeometry::pnorm(4, 1.85);
  for (int k = 0; k < 200; ++k) {
    Vec a = random_box_point(st, box);
    CHECK(g.divergence(a, a) == doctest::Approx(0.0).epsilon(1e-12));
    Vec b = a;
    b[0] += 0.5;
    CHECK(g.divergence(a, b) > 1e-12);
  }
}

TEST_CASE("mirror_update: dual-space contract") {
  SUBCASE("euclidean closed form") {
    BregmanGeometry g = BregmanGeometry::euclidean(2);
    Vec z = g.mirror_update(Vec{1, 1}, Vec{2, 0}, 0.5, Direction::descent);
    CHECK(z[0] == doctest::Approx(0.0));
    CHECK(z[1] == doctest::Approx(1.0));
  }
  SUBCASE("kl zero gradient is the identity") {
    BregmanGeometry g = BregmanGeometry::kl(3);
    Vec x{0.2, 0.3, 0.5};
    Vec z = g.mirror_update(x, Vec{0, 0, 0}, 1.0, Direction::descent);
    for (int i = 0; i < 3; ++i) CHECK(z[i] == doctest::Approx(x[i]));
  }
  SUBCASE("kl multiplicative form") {
    BregmanGeometry g = BregmanGeometry::kl(2);
    Vec z = g.mirror_update(Vec{0.5, 0.5}, Vec{std::log(2.0), 0.0}, 1.0,
                            Direction::descent);
    CHECK(z[0] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(z[1] == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("grad R(z) = grad R(x) -/+ step g within 1e-10 in the dual norm") {
    rng::Stream st = rng::substream(3, rng::Purpose::generic);
    FeasibleSet box = FeasibleSet::box(5, -3.0, 3.0);
    for (int k = 0; k < 200; ++k) {
      Vec gvec(5);
      st.fill_uniform(gvec, -4.0, 4.0);
      double step = st.uniform(0.01, 2.0);
      for (int which = 0; which < 3; ++which) {
        BregmanGeometry g = which == 0   ? BregmanGeometry::euclidean(5)
                            : which == 1 ? BregmanGeometry::kl(5)
                                         : BregmanGeometry::pnorm(5, 1.85);
        Vec x = which == 1 ? random_simplex_point(st, 5)
                           : random_box_point(st, box);
        for (Direction dir : {Direction::descent, Direction::ascent}) {
          Vec z = g.mirror_update(x, gvec, step, dir);
          Vec lhs = g.grad_R(z);
          Vec rhs = g.grad_R(x);
          double sgn = dir == Direction::descent ? -1.0 : 1.0;
          for (int i = 0; i < 5; ++i) rhs[i] += sgn * step * gvec[i];
          Vec diff(5);
          for (int i = 0; i < 5; ++i) diff[i] = lhs[i] - rhs[i];
          CHECK(g.dual_norm(diff) <= 1e-10 * std::max(1.0, g.dual_norm(rhs)));
        }
      }
    }
  }
  SUBCASE("kl overflow raises") {
    BregmanGeometry g = BregmanGeometry::kl(2);
    CHECK_THROWS_AS(g.mirror_update(Vec{0.5, 0.5}, Vec{-1000.0, 0.0}, 1.0,
                                    Direction::descent),
                    std::overflow_error);
  }
}

TEST_CASE("mirror_update involution: forward then backward returns the point") {
  rng::Stream st = rng::substream(4, rng::Purpose::generic);
  FeasibleSet box = FeasibleSet::box(6, -6.0, 6.0);
  BregmanGeometry eu = BregmanGeometry::euclidean(6);
  BregmanGeometry kl = BregmanGeometry::kl(6);
  for (int k = 0; k < 300; ++k) {
    Vec gvec(6);
    st.fill_uniform(gvec, -5.0, 5.0);
    double step = st.uniform(0.01, 1.5);

    Vec x = random_box_point(st, box);
    Vec z = eu.mirror_update(x, gvec, step, Direction::descent);
    Vec back = eu.mirror_update(z, gvec, step, Direction::ascent);
    for (int i = 0; i < 6; ++i)
      CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-9));

    Vec xs = random_simplex_point(st, 6);
    Vec zs = kl.mirror_update(xs, gvec, step, Direction::descent);
    Vec backs = kl.mirror_update(zs, gvec, step, Direction::ascent);
    for (int i = 0; i < 6; ++i)
      CHECK(backs[i] == doctest::Approx(xs[i]).epsilon(1e-9));
  }
}

TEST_CASE("p-norm gradient maps invert each other") {
  rng::Stream st = rng::substream(5, rng::Purpose::generic);
  for (double p : {1.2, 1.5, 1.85, 2.0}) {
    BregmanGeometry g = BregmanGeometry::pnorm(4, p);
    for (int k = 0; k < 200; ++k) {
      Vec x(4);
      st.fill_uniform(x, -3.0, 3.0);
      Vec back = g.grad_R_inverse(g.grad_R(x));
      for (int i = 0; i < 4; ++i)
        CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("bregman_project closed forms") {
  SUBCASE("euclidean box clamp") {
    BregmanGeometry g = BregmanGeometry::euclidean(2);
    FeasibleSet box = FeasibleSet::box(2, -6.0, 6.0);
    Vec out = bregman_project(g, box, Vec{7.0, -8.0});
    CHECK(out[0] == 6.0);
    CHECK(out[1] == -6.0);
    Vec inside = bregman_project(g, box, Vec{1.5, -2.25});
    CHECK(inside[0] == 1.5);
    CHECK(inside[1] == -2.25);
  }
  SUBCASE("kl normalization") {
    BregmanGeometry g = BregmanGeometry::kl(2);
    FeasibleSet sx = FeasibleSet::simplex(2);
    Vec out = bregman_project(g, sx, Vec{0.2, 0.2});
    CHECK(out[0] == doctest::Approx(0.5));
    CHECK(out[1] == doctest::Approx(0.5));
  }
  SUBCASE("kl with a box set is rejected") {
    BregmanGeometry g = BregmanGeometry::kl(2);
    FeasibleSet box = FeasibleSet::box(2, 0.0, 1.0);
    CHECK_THROWS_AS(bregman_project(g, box, Vec{0.2, 0.2}),
                    std::invalid_argument);
  }
  SUBCASE("euclidean simplex projection") {
    BregmanGeometry g = BregmanGeometry::euclidean(3);
    FeasibleSet sx = FeasibleSet::simplex(3);
    Vec out = bregman_project(g, sx, Vec{1.0, 0.0, 0.0});
    CHECK(out[0] == doctest::Approx(1.0));
    CHECK(out[1] == doctest::Approx(0.0));
    Vec uniform = bregman_project(g, sx, Vec{5.0, 5.0, 5.0});
    for (int i = 0; i < 3; ++i) CHECK(uniform[i] == doctest::Approx(1.0 / 3));
  }
}

TEST_CASE("projection first-order optimality on sampled probes") {
  rng::Stream st = rng::substream(6, rng::Purpose::generic);
  FeasibleSet box = FeasibleSet::box(4, -2.0, 2.0);
  FeasibleSet sx = FeasibleSet::simplex(4);

  auto check_opt = [&](const BregmanGeometry& g, const FeasibleSet& set,
                       const Vec& z) {
    Vec proj = bregman_project(g, set, z);
    if (g.kind == GeomKind::kl_simplex) proj = clip_simplex(proj);
    Vec gp = g.grad_R(proj);
    Vec gz = g.grad_R(z);
    for (int probe = 0; probe < 100; ++probe) {
      Vec x = set.kind == SetKind::box ? random_box_point(st, set)
                                       : random_simplex_point(st, 4);
      double inner = 0.0;
      for (std::size_t i = 0; i < set.dim; ++i)
        inner += (gp[i] - gz[i]) * (x[i] - proj[i]);
      CHECK(inner >= -1e-8);
    }
  };

  for (int k = 0; k < 20; ++k) {
    Vec z(4);
    st.fill_uniform(z, -4.0, 4.0);
    check_opt(BregmanGeometry::euclidean(4), box, z);
    check_opt(BregmanGeometry::pnorm(4, 1.85), box, z);
    Vec zpos(4);
    st.fill_uniform(zpos, 0.05, 3.0);
    check_opt(BregmanGeometry::kl(4), sx, zpos);
  }
}

TEST_CASE("kl_mirror_step explicit solution") {
  SUBCASE("zero gradient is the identity") {
    Vec x{0.3, 0.7};
    Vec out = kl_mirror_step(x, Vec{0.0, 0.0}, 0.7);
    CHECK(out[0] == doctest::Approx(0.3));
    CHECK(out[1] == doctest::Approx(0.7));
  }
  SUBCASE("hand-evaluated two-coordinate case") {
    Vec out = kl_mirror_step(Vec{0.5, 0.5}, Vec{std::log(2.0), 0.0}, 1.0);
    CHECK(out[0] == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(2.0 / 3).epsilon(1e-12));
  }
  SUBCASE("constant gradients cancel in the normalization") {
    Vec x{0.25, 0.25, 0.25, 0.25};
    Vec out = kl_mirror_step(x, Vec{3.7, 3.7, 3.7, 3.7}, 0.9);
    for (int i = 0; i < 4; ++i) CHECK(out[i] == doctest::Approx(0.25));
  }
  SUBCASE("huge exponents survive thanks to the max shift") {
    Vec out = kl_mirror_step(Vec{0.5, 0.5}, Vec{-500.0, 500.0}, 2.0);
    CHECK(out[0] == doctest::Approx(1.0));
    CHECK(out[1] == doctest::Approx(0.0));
  }
  SUBCASE("nonpositive coordinates are rejected") {
    CHECK_THROWS_AS(kl_mirror_step(Vec{1.0, 0.0}, Vec{0.0, 0.0}, 1.0),
                    std::domain_error);
  }
}

TEST_CASE("closed-form kl step equals mirror_update + projection") {
  rng::Stream st = rng::substream(7, rng::Purpose::generic);
  BregmanGeometry g = BregmanGeometry::kl(6);
  FeasibleSet sx = FeasibleSet::simplex(6);
  for (int k = 0; k < 1000; ++k) {
    Vec x = random_simplex_point(st, 6);
    Vec gvec(6);
    st.fill_uniform(gvec, -30.0, 30.0);
    double step = st.uniform(0.01, 3.0);
    Vec fused = kl_mirror_step(x, gvec, step);
    Vec twostep = bregman_project(
        g, sx, g.mirror_update(x, gvec, step, Direction::descent));
    for (int i = 0; i < 6; ++i)
      CHECK(std::fabs(fused[i] - twostep[i]) <= 1e-10);
  }
}

TEST_CASE("numeric projection agrees with the euclidean closed form") {
  rng::Stream st = rng::substream(8, rng::Purpose::generic);
  BregmanGeometry g = BregmanGeometry::euclidean(5);
  FeasibleSet box = FeasibleSet::box(5, -1.5, 2.5);
  for (int k = 0; k < 200; ++k) {
    Vec z(5);
    st.fill_uniform(z, -5.0, 5.0);
    Vec closed = bregman_project(g, box, z);
    Vec numeric = bregman_project_numeric(g, box, z);
    for (int i = 0; i < 5; ++i)
      CHECK(std::fabs(closed[i] - numeric[i]) <= 1e-8);
  }
}

TEST_CASE("numeric p-norm projection is idempotent on feasible points") {
  rng::Stream st = rng::substream(9, rng::Purpose::generic);
  BregmanGeometry g = BregmanGeometry::pnorm(4, 1.85);
  FeasibleSet box = FeasibleSet::box(4, -2.0, 2.0);
  for (int k = 0; k < 50; ++k) {
    Vec inside = random_box_point(st, box);
    Vec out = bregman_project(g, box, inside);
    for (int i = 0; i < 4; ++i)
      CHECK(out[i] == doctest::Approx(inside[i]).epsilon(1e-7));
  }
}

TEST_CASE("set diameters in each primal norm") {
  FeasibleSet box = FeasibleSet::box(4, -6.0, 6.0);
  CHECK(set_diameter(box, BregmanGeometry::euclidean(4)) ==
        doctest::Approx(12.0 * 2.0));  // ||(12,12,12,12)||_2
  CHECK(set_diameter(box, BregmanGeometry::pnorm(4, 1.85)) ==
        doctest::Approx(12.0 * std::pow(4.0, 1.0 / 1.85)));
  FeasibleSet sx = FeasibleSet::simplex(4);
  CHECK(set_diameter(sx, BregmanGeometry::euclidean(4)) ==
        doctest::Approx(std::sqrt(2.0)));
  CHECK(set_diameter(sx, BregmanGeometry::kl(4)) == doctest::Approx(2.0));
}

TEST_CASE("feasible-set membership") {
  FeasibleSet box = FeasibleSet::box(2, -1.0, 1.0);
  CHECK(box.contains(Vec{0.0, 1.0}));
  CHECK(!box.contains(Vec{0.0, 1.1}));
  FeasibleSet sx = FeasibleSet::simplex(3);
  CHECK(sx.contains(Vec{0.2, 0.3, 0.5}));
  CHECK(!sx.contains(Vec{0.5, 0.6, -0.1}));
  CHECK(!sx.contains(Vec{0.5, 0.6, 0.1}));
  CHECK_THROWS_AS(FeasibleSet::box(Vec{1.0}, Vec{0.0}), std::invalid_argument);
}

TEST_CASE("clip_simplex floors tiny coordinates and renormalizes") {
  Vec v{1.0, 0.0, 1e-18};
  Vec out = clip_simplex(v);
  double sum = 0.0;
  for (double c : out) {
    CHECK(c >= 1e-13);
    sum += c;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
}
