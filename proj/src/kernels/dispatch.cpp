#include "dosp/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace dosp::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(DOSP_HAVE_AVX2)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const Backend* select() {
  const char* forced = std::getenv("DOSP_KERNELS");
  if (forced != nullptr) {
    if (std::strcmp(forced, "scalar") == 0) return &scalar_backend();
#if defined(DOSP_HAVE_AVX2)
    if (std::strcmp(forced, "avx2") == 0 && cpu_has_avx2())
      return &avx2_backend();
#endif
    return &scalar_backend();
  }
#if defined(DOSP_HAVE_AVX2)
  if (cpu_has_avx2()) return &avx2_backend();
#endif
  return &scalar_backend();
}

}  // namespace

const Backend& active() {
  static const Backend* chosen = select();
  return *chosen;
}

std::vector<const Backend*> available() {
  std::vector<const Backend*> out{&scalar_backend()};
#if defined(DOSP_HAVE_AVX2)
  if (cpu_has_avx2()) out.push_back(&avx2_backend());
#endif
  return out;
}

}  // namespace dosp::kernels
