#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "dosp/vec.hpp"

// Time-varying communication graphs with doubly-stochastic weights,
// consensus mixing, transition-matrix products and the contraction
// constants they obey.

namespace dosp::network {

struct Graph {
  std::size_t n = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // undirected

  bool connected() const;
};

// Metropolis weights: w_ij = 1 / (1 + max(deg_i, deg_j)) on edges, the
// diagonal takes the residual. Symmetric and doubly stochastic.
Mat metropolis_weights(const Graph& g);

// Validates and annotates a weight matrix; throws if a row/column sum is
// off by more than tol or a positive entry is not above zeta.
void check_doubly_stochastic(const Mat& a, double tol = 1e-12);

// Smallest positive entry across a list of weight matrices.
double min_positive_entry(const std::vector<Mat>& mats);

struct ConsensusConstants {
  double gamma = 0.0;   // single-consensus contraction scale
  double sigma = 0.0;   // single-consensus contraction rate
  double gamma1 = 0.0;  // multi-consensus scale
  double sigma1 = 0.0;  // multi-consensus rate
  std::size_t k_min = 1;
};

// gamma = (1 - zeta/4n^2)^((1-2Q)/Q), sigma = (1 - zeta/4n^2)^(1/Q),
// gamma1 = (1 - zeta/4n^2)^-1,       sigma1 = 1 - zeta/4n^2.
ConsensusConstants consensus_constants(std::size_t n, double zeta,
                                       std::size_t q, std::size_t k_min = 1);

// Consensus repetitions per round.
struct KSchedule {
  // constant k, or k(t) = base + ceil(num / t^exp)
  static KSchedule constant(std::size_t k);
  static KSchedule adaptive(std::size_t base, double num, double exp);

  std::size_t at(std::size_t t) const;           // t >= 1
  std::size_t min_over(std::size_t horizon) const;

  std::size_t base = 1;
  double num = 0.0;
  double exp = 0.0;
  bool is_constant = true;
};

class GraphSchedule {
 public:
  enum class Mode { static_graph, switching_list };

  // Round t uses matrices[t % matrices.size()].
  static GraphSchedule switching(std::vector<Mat> matrices);
  static GraphSchedule single(Mat matrix);

  std::size_t n() const { return n_; }
  Mode mode() const { return mode_; }
  std::size_t period() const { return matrices_.size(); }
  const Mat& at(std::size_t t) const;  // t >= 1
  const std::vector<Mat>& matrices() const { return matrices_; }

  // Smallest positive weight minus a small slack; always valid for the
  // matrices actually used.
  double zeta() const { return zeta_; }

  // Joint-connectivity window: the list period when the union over one
  // period is strongly connected, else must be supplied by the caller.
  std::size_t q() const;
  void override_q(std::size_t q);

  bool union_strongly_connected() const;
  bool every_graph_strongly_connected() const;

 private:
  GraphSchedule() = default;
  std::size_t n_ = 0;
  Mode mode_ = Mode::static_graph;
  std::vector<Mat> matrices_;
  double zeta_ = 0.0;
  std::size_t q_override_ = 0;
};

// out_i = sum_j A_ij points_j (one weighted-averaging step)
std::vector<Vec> consensus_round(const Mat& a, const std::vector<Vec>& points);

// k successive consensus rounds; identical to mixing by A^k.
std::vector<Vec> multi_consensus(const Mat& a, std::size_t k,
                                 const std::vector<Vec>& points);

// Phi(t, s) = A_t A_{t-1} ... A_s, t >= s >= 1
Mat transition_matrix(const GraphSchedule& schedule, std::size_t t,
                      std::size_t s);

// Phi^K(t, s) = A_t^{K_t} ... A_s^{K_s}; Phi^K(t, t+1) = I by convention.
Mat multi_transition(const GraphSchedule& schedule, const KSchedule& ks,
                     std::size_t t, std::size_t s);

// max_ij |[m]_ij - 1/n|
double max_deviation_from_uniform(const Mat& m);

// ---- random schedules for tests and presets -------------------------------

// Connected Erdos-Renyi-style graph (spanning tree plus extra edges).
Graph random_connected_graph(std::size_t n, double extra_edge_prob,
                             std::uint64_t seed);

// Splits a connected graph's edges across `period` rounds so that each
// window of `period` consecutive rounds is jointly connected while the
// individual rounds usually are not.
std::vector<Graph> split_edges_schedule(const Graph& g, std::size_t period,
                                        std::uint64_t seed);

}  // namespace dosp::network
