#include "dosp/rng.hpp"

#include <cmath>
#include <numbers>

namespace dosp::rng {
namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t Stream::next_u64() {
  state_ += kGamma;
  return mix(state_);
}

double Stream::u01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Stream::uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

double Stream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller; u is kept away from 0 so log stays finite.
  double u = 0.0;
  do {
    u = u01();
  } while (u <= 0.0);
  double v = u01();
  double r = std::sqrt(-2.0 * std::log(u));
  double angle = 2.0 * std::numbers::pi * v;
  spare_ = r * std::sin(angle);
  has_spare_ = true;
  return r * std::cos(angle);
}

double Stream::normal(double mean, double stddev) {
  return mean + stddev * normal();
}

void Stream::fill_uniform(std::span<double> out, double lo, double hi) {
  for (double& v : out) v = uniform(lo, hi);
}

void Stream::fill_normal(std::span<double> out, double mean, double stddev) {
  for (double& v : out) v = normal(mean, stddev);
}

Stream substream(std::uint64_t master, Purpose purpose, std::uint64_t a,
                 std::uint64_t b) {
  std::uint64_t h = mix(master + kGamma);
  h = mix(h ^ (static_cast<std::uint64_t>(purpose) * 0xd6e8feb86659fd93ULL));
  h = mix(h + (a + 1) * 0xa0761d6478bd642fULL);
  h = mix(h + (b + 1) * 0xe7037ed1a0b428dbULL);
  return Stream(h);
}

}  // namespace dosp::rng
