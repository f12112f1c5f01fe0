#pragma once

#include <cstddef>
#include <vector>

// Vector kernels used by every arithmetic inner loop in the library.
// Each backend provides the full set; the scalar backend is the reference
// implementation and the AVX2 backend must agree with it as follows:
//   - elementwise kernels (axpy, axpby, scal, clamp) are bit-identical
//     (no FMA contraction, same per-element operation order),
//   - reductions (dot, sum, nrm2sq, nrm1, diff_*) may differ in the last
//     bits because lanes are accumulated separately,
//   - amax is exact (max is order-independent).
// All kernels accept n == 0.

namespace dosp::kernels {

struct Backend {
  const char* name;

  // y += a * x
  void (*axpy)(std::size_t n, double a, const double* x, double* y);
  // out = a * x + b * y   (out may alias x or y)
  void (*axpby)(std::size_t n, double a, const double* x, double b,
                const double* y, double* out);
  // x *= a
  void (*scal)(std::size_t n, double a, double* x);
  // out_i = min(hi_i, max(lo_i, x_i))
  void (*clamp)(std::size_t n, const double* lo, const double* hi,
                const double* x, double* out);

  double (*dot)(std::size_t n, const double* x, const double* y);
  double (*sum)(std::size_t n, const double* x);
  double (*nrm2sq)(std::size_t n, const double* x);
  double (*nrm1)(std::size_t n, const double* x);
  double (*amax)(std::size_t n, const double* x);
  double (*diff_nrm2sq)(std::size_t n, const double* x, const double* y);
  double (*diff_nrm1)(std::size_t n, const double* x, const double* y);
};

const Backend& scalar_backend();

#if defined(DOSP_HAVE_AVX2)
const Backend& avx2_backend();
#endif

// Backend selected at load time: AVX2 when the CPU supports it, unless
// overridden with DOSP_KERNELS=scalar|avx2 in the environment.
const Backend& active();

// All backends usable on this machine, scalar first.
std::vector<const Backend*> available();

}  // namespace dosp::kernels
