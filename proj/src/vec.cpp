#include "dosp/vec.hpp"

#include <cmath>

namespace dosp {

double operator_norm2(const Mat& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  // power iteration on M^T M with a fixed, slightly asymmetric start
  Vec v(m.cols());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = 1.0 + 1e-3 * static_cast<double>(i + 1);
  double nv = norm2(v);
  kernels::active().scal(v.size(), 1.0 / nv, v.data());
  Vec mv(m.rows()), w(m.cols());
  double lambda = 0.0;
  for (int it = 0; it < 500; ++it) {
    m.apply(v, mv);
    // w = M^T (M v)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < m.rows(); ++i) s += m(i, j) * mv[i];
      w[j] = s;
    }
    double nw = norm2(w);
    if (nw == 0.0) return 0.0;
    kernels::active().scal(w.size(), 1.0 / nw, w.data());
    double next = nw;
    v = w;
    if (it > 8 && std::fabs(next - lambda) <= 1e-14 * std::max(1.0, next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::sqrt(lambda);
}

}  // namespace dosp
