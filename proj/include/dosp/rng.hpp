#pragma once

#include <cstdint>
#include <span>

// Seeded random streams. Every random quantity in a run is drawn from a
// substream addressed by (master seed, purpose, a, b), so results do not
// depend on evaluation order and agents can be processed in any order.
// The generator is SplitMix64; normals come from Box-Muller. No standard
// library distributions are used so that byte streams never depend on the
// C++ runtime in use.

namespace dosp::rng {

enum class Purpose : std::uint64_t {
  init_x = 1,
  init_y,
  grad_noise,
  pi_base,       // per-agent base cost vector
  pi_fluct,      // per-(agent, round) cost fluctuation
  obs_noise,     // per-(agent, round) observation perturbation
  target_init,   // initial target position
  target_dyn,    // target dynamics construction
  graph_gen,     // random schedule generation (tests / presets)
  generic,
};

class Stream {
 public:
  explicit Stream(std::uint64_t state) : state_(state) {}

  std::uint64_t next_u64();

  // [0, 1)
  double u01();
  double uniform(double lo, double hi);

  // standard normal, Box-Muller pair with one value cached
  double normal();
  double normal(double mean, double stddev);

  void fill_uniform(std::span<double> out, double lo, double hi);
  void fill_normal(std::span<double> out, double mean, double stddev);

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Derives an independent substream. Different (purpose, a, b) triples give
// unrelated streams for the same master seed.
Stream substream(std::uint64_t master, Purpose purpose, std::uint64_t a = 0,
                 std::uint64_t b = 0);

}  // namespace dosp::rng
