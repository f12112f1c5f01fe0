#include "dosp/network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dosp/rng.hpp"

namespace dosp::network {
namespace {

// strong connectivity of the directed graph "A(i,j) > 0 means j -> i"
bool strongly_connected(const Mat& a) {
  const std::size_t n = a.rows();
  auto reachable = [&](bool transpose) {
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v = 0; v < n; ++v) {
        double w = transpose ? a(v, u) : a(u, v);
        if (w > 0.0 && !seen[v]) {
          seen[v] = 1;
          stack.push_back(v);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
  };
  return reachable(false) && reachable(true);
}

Mat union_support(const std::vector<Mat>& mats) {
  Mat u(mats.front().rows(), mats.front().cols());
  for (const Mat& m : mats)
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j)
        if (m(i, j) > 0.0) u(i, j) = 1.0;
  return u;
}

}  // namespace

bool Graph::connected() const {
  if (n == 0) return false;
  std::vector<std::vector<std::size_t>> adj(n);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count == n;
}

Mat metropolis_weights(const Graph& g) {
  if (g.n < 2) throw std::invalid_argument("metropolis_weights: need n >= 2");
  std::vector<std::size_t> deg(g.n, 0);
  for (auto [a, b] : g.edges) {
    if (a >= g.n || b >= g.n || a == b)
      throw std::invalid_argument("metropolis_weights: bad edge");
    ++deg[a];
    ++deg[b];
  }
  Mat w(g.n, g.n);
  for (auto [a, b] : g.edges) {
    double v = 1.0 / (1.0 + static_cast<double>(std::max(deg[a], deg[b])));
    w(a, b) += v;
    w(b, a) += v;
  }
  for (std::size_t i = 0; i < g.n; ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < g.n; ++j)
      if (j != i) off += w(i, j);
    w(i, i) = 1.0 - off;
  }
  return w;
}

void check_doubly_stochastic(const Mat& a, double tol) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("check_doubly_stochastic: matrix not square");
  const std::size_t n = a.rows();
  for (std::size_t i = 0; i < n; ++i) {
    double rs = 0.0, cs = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (a(i, j) < 0.0)
        throw std::invalid_argument("check_doubly_stochastic: negative entry at (" +
                                    std::to_string(i) + "," + std::to_string(j) + ")");
      rs += a(i, j);
      cs += a(j, i);
    }
    if (std::fabs(rs - 1.0) > tol)
      throw std::invalid_argument("check_doubly_stochastic: row " +
                                  std::to_string(i) + " sums to " +
                                  std::to_string(rs));
    if (std::fabs(cs - 1.0) > tol)
      throw std::invalid_argument("check_doubly_stochastic: column " +
                                  std::to_string(i) + " sums to " +
                                  std::to_string(cs));
  }
}

double min_positive_entry(const std::vector<Mat>& mats) {
  double z = 1.0;
  for (const Mat& m : mats)
    for (double v : m.data())
      if (v > 0.0) z = std::min(z, v);
  return z;
}

ConsensusConstants consensus_constants(std::size_t n, double zeta,
                                       std::size_t q, std::size_t k_min) {
  if (n < 2) throw std::invalid_argument("consensus_constants: n < 2");
  if (!(zeta > 0.0 && zeta < 1.0))
    throw std::invalid_argument("consensus_constants: zeta outside (0,1)");
  if (q < 1) throw std::invalid_argument("consensus_constants: Q < 1");
  if (k_min < 1) throw std::invalid_argument("consensus_constants: K_min < 1");
  const double base = 1.0 - zeta / (4.0 * static_cast<double>(n * n));
  ConsensusConstants c;
  c.gamma = std::pow(base, (1.0 - 2.0 * static_cast<double>(q)) /
                               static_cast<double>(q));
  c.sigma = std::pow(base, 1.0 / static_cast<double>(q));
  c.gamma1 = 1.0 / base;
  c.sigma1 = base;
  c.k_min = k_min;
  return c;
}

KSchedule KSchedule::constant(std::size_t k) {
  if (k < 1) throw std::invalid_argument("KSchedule: k < 1");
  KSchedule s;
  s.base = k;
  s.is_constant = true;
  return s;
}

KSchedule KSchedule::adaptive(std::size_t base, double num, double exp) {
  KSchedule s;
  s.base = base;
  s.num = num;
  s.exp = exp;
  s.is_constant = false;
  if (s.at(1) < 1) throw std::invalid_argument("KSchedule: K_1 < 1");
  return s;
}

std::size_t KSchedule::at(std::size_t t) const {
  if (t < 1) throw std::invalid_argument("KSchedule::at: t < 1");
  if (is_constant) return base;
  double extra = std::ceil(num / std::pow(static_cast<double>(t), exp));
  return base + static_cast<std::size_t>(std::max(0.0, extra));
}

std::size_t KSchedule::min_over(std::size_t horizon) const {
  if (is_constant) return base;
  std::size_t m = at(1);
  for (std::size_t t = 2; t <= horizon; ++t) m = std::min(m, at(t));
  return m;
}

GraphSchedule GraphSchedule::switching(std::vector<Mat> matrices) {
  if (matrices.empty())
    throw std::invalid_argument("GraphSchedule: empty matrix list");
  GraphSchedule s;
  s.n_ = matrices.front().rows();
  for (const Mat& m : matrices) {
    if (m.rows() != s.n_ || m.cols() != s.n_)
      throw std::invalid_argument("GraphSchedule: inconsistent sizes");
    check_doubly_stochastic(m);
  }
  s.mode_ = matrices.size() == 1 ? Mode::static_graph : Mode::switching_list;
  s.matrices_ = std::move(matrices);
  // zeta backed off by a slack so every positive entry is strictly above it
  s.zeta_ = min_positive_entry(s.matrices_) - 1e-12;
  return s;
}

GraphSchedule GraphSchedule::single(Mat matrix) {
  std::vector<Mat> ms;
  ms.push_back(std::move(matrix));
  return switching(std::move(ms));
}

const Mat& GraphSchedule::at(std::size_t t) const {
  if (t < 1) throw std::invalid_argument("GraphSchedule::at: rounds start at 1");
  return matrices_[t % matrices_.size()];
}

bool GraphSchedule::union_strongly_connected() const {
  return strongly_connected(union_support(matrices_));
}

bool GraphSchedule::every_graph_strongly_connected() const {
  return std::all_of(matrices_.begin(), matrices_.end(),
                     [](const Mat& m) { return strongly_connected(m); });
}

std::size_t GraphSchedule::q() const {
  if (q_override_ > 0) return q_override_;
  if (union_strongly_connected()) return matrices_.size();
  throw std::runtime_error(
      "GraphSchedule: union over one period is not strongly connected; "
      "supply Q explicitly");
}

void GraphSchedule::override_q(std::size_t q) {
  if (q < 1) throw std::invalid_argument("GraphSchedule: Q < 1");
  q_override_ = q;
}

std::vector<Vec> consensus_round(const Mat& a, const std::vector<Vec>& points) {
  const std::size_t n = a.rows();
  if (points.size() != n)
    throw std::invalid_argument("consensus_round: |points| != n");
  const std::size_t d = points.front().size();
  for (const Vec& p : points)
    if (p.size() != d)
      throw std::invalid_argument("consensus_round: ragged points");
  std::vector<Vec> out(n, Vec(d, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double w = a(i, j);
      if (w != 0.0)
        kernels::active().axpy(d, w, points[j].data(), out[i].data());
    }
  return out;
}

std::vector<Vec> multi_consensus(const Mat& a, std::size_t k,
                                 const std::vector<Vec>& points) {
  if (k < 1) throw std::invalid_argument("multi_consensus: K < 1");
  std::vector<Vec> cur = consensus_round(a, points);
  for (std::size_t i = 1; i < k; ++i) cur = consensus_round(a, cur);
  return cur;
}

Mat transition_matrix(const GraphSchedule& schedule, std::size_t t,
                      std::size_t s) {
  if (s < 1 || t < s)
    throw std::invalid_argument("transition_matrix: need t >= s >= 1");
  Mat phi = schedule.at(s);
  for (std::size_t tau = s + 1; tau <= t; ++tau) phi = schedule.at(tau) * phi;
  return phi;
}

Mat multi_transition(const GraphSchedule& schedule, const KSchedule& ks,
                     std::size_t t, std::size_t s) {
  if (s < 1) throw std::invalid_argument("multi_transition: need s >= 1");
  if (s == t + 1) return Mat::identity(schedule.n());  // empty product
  if (t < s) throw std::invalid_argument("multi_transition: need t >= s >= 1");
  Mat phi = Mat::identity(schedule.n());
  for (std::size_t tau = s; tau <= t; ++tau) {
    const Mat& a = schedule.at(tau);
    for (std::size_t rep = 0; rep < ks.at(tau); ++rep) phi = a * phi;
  }
  return phi;
}

double max_deviation_from_uniform(const Mat& m) {
  const double inv = 1.0 / static_cast<double>(m.rows());
  double dev = 0.0;
  for (double v : m.data()) dev = std::max(dev, std::fabs(v - inv));
  return dev;
}

Graph random_connected_graph(std::size_t n, double extra_edge_prob,
                             std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("random_connected_graph: n < 2");
  rng::Stream st = rng::substream(seed, rng::Purpose::graph_gen, n);
  Graph g;
  g.n = n;
  // random spanning tree: attach each node to a random earlier node
  for (std::size_t v = 1; v < n; ++v) {
    std::size_t u = static_cast<std::size_t>(st.next_u64() % v);
    g.edges.emplace_back(u, v);
  }
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v) {
      bool in_tree = false;
      for (auto [a, b] : g.edges)
        if ((a == u && b == v) || (a == v && b == u)) in_tree = true;
      if (!in_tree && st.u01() < extra_edge_prob) g.edges.emplace_back(u, v);
    }
  return g;
}

std::vector<Graph> split_edges_schedule(const Graph& g, std::size_t period,
                                        std::uint64_t seed) {
  if (period < 1) throw std::invalid_argument("split_edges_schedule: period < 1");
  rng::Stream st = rng::substream(seed, rng::Purpose::graph_gen, g.n, period);
  std::vector<Graph> out(period);
  for (auto& part : out) part.n = g.n;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    std::size_t slot = static_cast<std::size_t>(st.next_u64() % period);
    out[slot].edges.push_back(g.edges[e]);
  }
  // an empty slot would produce the identity matrix, which is fine for
  // Assumption-style windows, but give each slot at least one edge anyway
  for (std::size_t k = 0; k < period; ++k)
    if (out[k].edges.empty())
      out[k].edges.push_back(g.edges[st.next_u64() % g.edges.size()]);
  return out;
}

}  // namespace dosp::network
