#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dosp/geometry.hpp"
#include "dosp/problem.hpp"
#include "dosp/vec.hpp"

// Projected extragradient for convex-concave saddle problems
//   min_x max_y  f(x, y) = g(x, y) + h(x) ,
// where g is the smooth part and the nonsmooth h (here: an l1 term) enters
// through its prox. Each half step is
//   x+ = prox_x(x - tau gx(x, y)),  y+ = proj_y(y + tau gy(x, y)) ,
// and the reported residual is the norm of the projected-gradient mapping
// at the current pair, which vanishes exactly at a saddle point.

namespace dosp::saddle {

struct SmoothSaddle {
  std::size_t dx = 0, dy = 0;
  // fills both smooth gradients at (x, y)
  std::function<void(std::span<const double> x, std::span<const double> y,
                     std::span<double> gx, std::span<double> gy)>
      grads;
  // prox of tau * h + indicator of X
  std::function<Vec(std::span<const double> v, double tau)> prox_x;
  std::function<Vec(std::span<const double> v)> proj_y;
};

struct SolveOptions {
  double tol = 1e-7;
  int max_iter = 100000;
  double step = 0.0;  // must be set; solve_sequence fills 0.5 / smoothness
};

struct SolveResult {
  Vec x, y;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Largest observed ||F(z1) - F(z2)|| / ||z1 - z2|| over random probe pairs,
// F = (grad_x, -grad_y). Deterministic for a given seed.
double estimate_smoothness(const SmoothSaddle& s,
                           const geometry::FeasibleSet& set_x,
                           const geometry::FeasibleSet& set_y,
                           std::uint64_t seed = 7, int probes = 64);

SolveResult solve(const SmoothSaddle& s, Vec x0, Vec y0, const SolveOptions& opt);

// Saddle problem of the summed tracking loss over one round. The l1 term is
// constant on a simplex X, so its prox reduces to the Euclidean projection.
SmoothSaddle tracking_saddle(const problem::RoundLoss& loss,
                             const geometry::FeasibleSet& set_x,
                             const geometry::FeasibleSet& set_y);

struct SaddleSequence {
  std::vector<Vec> x, y;  // [t-1], t = 1..T
  std::vector<double> residual;
  std::vector<int> iterations;
  bool all_converged = true;
  double tol = 0.0;
};

// Solves every round of the series, warm-starting from the previous round.
// The tracking gradients are affine, so the smoothness estimate from the
// first round is reused for the rest.
SaddleSequence solve_sequence(const std::vector<problem::RoundLoss>& series,
                              const geometry::FeasibleSet& set_x,
                              const geometry::FeasibleSet& set_y,
                              const SolveOptions& opt);

}  // namespace dosp::saddle
