#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "dosp/kernels.hpp"
#include "dosp/rng.hpp"

using dosp::kernels::Backend;

namespace {

std::vector<double> random_vec(dosp::rng::Stream& st, std::size_t n,
                               double lo = -10.0, double hi = 10.0) {
  std::vector<double> v(n);
  st.fill_uniform(v, lo, hi);
  return v;
}

// sizes around the SIMD width, plus odd tails and larger blocks
const std::size_t kSizes[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 31, 64, 257};

}  // namespace

TEST_CASE("backend listing always includes the scalar reference") {
  auto all = dosp::kernels::available();
  REQUIRE(!all.empty());
  CHECK(std::string(all.front()->name) == "scalar");
  CHECK(std::string(dosp::kernels::active().name).size() > 0);
}

TEST_CASE("elementwise kernels match the scalar reference bit for bit") {
  const Backend& ref = dosp::kernels::scalar_backend();
  for (const Backend* b : dosp::kernels::available()) {
    CAPTURE(b->name);
    dosp::rng::Stream st = dosp::rng::substream(42, dosp::rng::Purpose::generic);
    for (std::size_t n : kSizes) {
      auto x = random_vec(st, n);
      auto y = random_vec(st, n);
      double a = st.uniform(-3.0, 3.0);

      auto y_ref = y, y_got = y;
      ref.axpy(n, a, x.data(), y_ref.data());
      b->axpy(n, a, x.data(), y_got.data());
      CHECK(y_ref == y_got);

      std::vector<double> o_ref(n), o_got(n);
      double bb = st.uniform(-3.0, 3.0);
      ref.axpby(n, a, x.data(), bb, y.data(), o_ref.data());
      b->axpby(n, a, x.data(), bb, y.data(), o_got.data());
      CHECK(o_ref == o_got);

      auto s_ref = x, s_got = x;
      ref.scal(n, a, s_ref.data());
      b->scal(n, a, s_got.data());
      CHECK(s_ref == s_got);

      auto lo = random_vec(st, n, -5.0, 0.0);
      auto hi = random_vec(st, n, 0.0, 5.0);
      ref.clamp(n, lo.data(), hi.data(), x.data(), o_ref.data());
      b->clamp(n, lo.data(), hi.data(), x.data(), o_got.data());
      CHECK(o_ref == o_got);
    }
  }
}

TEST_CASE("reductions agree with the scalar reference to rounding") {
  const Backend& ref = dosp::kernels::scalar_backend();
  for (const Backend* b : dosp::kernels::available()) {
    CAPTURE(b->name);
    dosp::rng::Stream st = dosp::rng::substream(43, dosp::rng::Purpose::generic);
    for (std::size_t n : kSizes) {
      auto x = random_vec(st, n);
      auto y = random_vec(st, n);
      auto close = [&](double got, double want) {
        double scale = std::max({1.0, std::fabs(want), static_cast<double>(n)});
        CHECK(std::fabs(got - want) <= 1e-13 * scale);
      };
      close(b->dot(n, x.data(), y.data()), ref.dot(n, x.data(), y.data()));
      close(b->sum(n, x.data()), ref.sum(n, x.data()));
      close(b->nrm2sq(n, x.data()), ref.nrm2sq(n, x.data()));
      close(b->nrm1(n, x.data()), ref.nrm1(n, x.data()));
      close(b->diff_nrm2sq(n, x.data(), y.data()),
            ref.diff_nrm2sq(n, x.data(), y.data()));
      close(b->diff_nrm1(n, x.data(), y.data()),
            ref.diff_nrm1(n, x.data(), y.data()));
      // max of |.| is order-independent, so exact
      CHECK(b->amax(n, x.data()) == ref.amax(n, x.data()));
    }
  }
}

TEST_CASE("scalar reference spot values") {
  const Backend& k = dosp::kernels::scalar_backend();
  const double x[3] = {1.0, -2.0, 3.0};
  const double y[3] = {4.0, 5.0, -6.0};
  CHECK(k.dot(3, x, y) == doctest::Approx(4.0 - 10.0 - 18.0));
  CHECK(k.sum(3, x) == doctest::Approx(2.0));
  CHECK(k.nrm2sq(3, x) == doctest::Approx(14.0));
  CHECK(k.nrm1(3, x) == doctest::Approx(6.0));
  CHECK(k.amax(3, x) == doctest::Approx(3.0));
  CHECK(k.diff_nrm2sq(3, x, y) == doctest::Approx(9.0 + 49.0 + 81.0));
  CHECK(k.diff_nrm1(3, x, y) == doctest::Approx(3.0 + 7.0 + 9.0));
  double out[3];
  const double lo[3] = {0.0, 0.0, 0.0};
  const double hi[3] = {2.0, 2.0, 2.0};
  k.clamp(3, lo, hi, x, out);
  CHECK(out[0] == 1.0);
  CHECK(out[1] == 0.0);
  CHECK(out[2] == 2.0);
}
