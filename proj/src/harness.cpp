#include "dosp/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "dosp/rng.hpp"

namespace dosp::harness {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void print_check(const Check& c, bool quiet) {
  if (quiet) return;
  std::printf("[%s] %-28s margin=%- .3e %s\n", c.pass ? "PASS" : "FAIL",
              c.name.c_str(), c.margin,
              c.detail.empty() ? "" : c.detail.c_str());
}

// max over prefixes of lhs - rhs (domination margin; <= 0 when dominated)
double domination_margin(const Vec& lhs, const Vec& rhs) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lhs.size(); ++i) m = std::max(m, lhs[i] - rhs[i]);
  return m;
}

std::vector<Mat> raw_matrices(const config::GraphsSpec& g) {
  if (!g.weights.empty()) return g.weights;
  std::vector<Mat> mats;
  for (const auto& edge_list : g.edges) {
    network::Graph graph;
    graph.n = g.n;
    graph.edges = edge_list;
    mats.push_back(network::metropolis_weights(graph));
  }
  return mats;
}

void write_u64(std::ofstream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint64_t read_u64(std::ifstream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

void write_doubles(std::ofstream& out, std::span<const double> v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void read_doubles(std::ifstream& in, std::span<double> v) {
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(v.size() * sizeof(double)));
}

constexpr std::uint64_t kTrajMagic = 0x314a52545053ULL;  // "SPTRJ1"

}  // namespace

Materialized materialize(const config::RunConfig& c) {
  Materialized m{
      config::make_geometry(c.geom_x, c.params.d),
      config::make_geometry(c.geom_y, c.params.d),
      config::make_set(c.set_x, c.params.d),
      config::make_set(c.set_y, c.params.d),
      config::make_schedule(c.graphs),
      config::make_kschedule(c.k_schedule),
  };
  if (m.schedule.n() != c.params.n)
    throw std::invalid_argument("config: graph size != agent count");
  return m;
}

algorithm::RunInputs make_inputs(const config::RunConfig& c,
                                 const Materialized& m,
                                 problem::TrackingScenario& scenario,
                                 std::uint64_t seed) {
  algorithm::RunInputs in;
  in.geom_x = m.geom_x;
  in.geom_y = m.geom_y;
  in.set_x = m.set_x;
  in.set_y = m.set_y;
  in.steps = c.steps;
  in.graphs = &m.schedule;
  in.ks = m.ks;
  in.variant = c.variant;
  in.prediction.x.kind = c.prediction.x;
  in.prediction.y.kind = c.prediction.y;
  if (c.prediction.x == algorithm::MapKind::fixed_matrix)
    in.prediction.x.matrix = c.prediction.x_matrix;
  if (c.prediction.y == algorithm::MapKind::fixed_matrix)
    in.prediction.y.matrix = c.prediction.y_matrix;
  const problem::TargetDynamics* dyn = &scenario.dynamics();
  in.prediction.dynamics = [dyn](std::size_t t) { return dyn->matrix(t); };
  in.rounds = c.rounds;
  in.seed = seed;
  return in;
}

SeedRun run_seed(const config::RunConfig& c, std::uint64_t seed) {
  Materialized m = materialize(c);
  problem::TrackingScenario scenario(c.params, m.set_x, m.set_y, seed);
  algorithm::RunInputs in = make_inputs(c, m, scenario, seed);

  SeedRun r;
  r.seed = seed;
  r.traj = algorithm::run(in, scenario);
  saddle::SolveOptions opt;
  opt.tol = c.saddle.tol;
  opt.max_iter = c.saddle.max_iter;
  r.saddle = saddle::solve_sequence(r.traj.losses, m.set_x, m.set_y, opt);

  r.gaps.reserve(c.params.n);
  std::vector<Vec> abs_gaps;
  for (std::size_t j = 0; j < c.params.n; ++j) {
    r.gaps.push_back(metrics::regret_gap_series(r.traj, r.saddle, j));
    Vec a = r.gaps.back();
    for (double& v : a) v = std::fabs(v);
    abs_gaps.push_back(std::move(a));
  }
  r.adspr = metrics::adspr_family(abs_gaps);
  r.consensus = metrics::consensus_error(r.traj, m.geom_x, m.geom_y);

  const std::size_t k_min =
      c.variant == algorithm::Variant::multi ? m.ks.min_over(c.rounds) : 1;
  network::ConsensusConstants cc = network::consensus_constants(
      c.params.n, m.schedule.zeta(), m.schedule.q(), k_min);
  r.constants = metrics::bound_constants(r.traj, m.geom_x, m.geom_y, m.set_x,
                                         m.set_y, scenario.lipschitz_bounds(),
                                         cc, c.variant, c.steps);
  r.bound = metrics::theorem_bound_series(r.constants, c.params.n, c.steps,
                                          r.saddle, in.prediction, m.geom_x,
                                          m.geom_y, c.rounds);
  r.lemma_rhs_x =
      metrics::consensus_bound_series(r.constants, r.traj, m.geom_x, c.steps, true);
  r.lemma_rhs_y =
      metrics::consensus_bound_series(r.constants, r.traj, m.geom_y, c.steps, false);
  return r;
}

ExecuteResult execute(const config::RunConfig& c, bool quiet) {
  ExecuteResult res;
  fs::create_directories(c.out_dir);
  config::save_file(c, c.out_dir + "/config.json");
  const std::string fp = config::fingerprint(c);

  std::vector<std::vector<Vec>> all_gaps;  // [seed][agent][T]
  Vec mean_bound, mean_cons_x, mean_cons_y;
  json per_seed = json::array();

  for (std::uint64_t seed : c.seeds) {
    SeedRun r = run_seed(c, seed);
    const std::string tag = std::to_string(seed);
    write_trajectory(c.out_dir + "/traj_seed" + tag + ".bin", r.traj, r.saddle,
                     fp);
    std::vector<Vec> abs_gaps;
    for (const Vec& g : r.gaps) {
      Vec a = g;
      for (double& v : a) v = std::fabs(v);
      abs_gaps.push_back(std::move(a));
    }
    write_metrics_csv(c.out_dir + "/metrics_seed" + tag + ".csv", abs_gaps,
                      r.adspr, r.consensus.per_round_x, r.consensus.per_round_y,
                      r.bound);

    // runtime invariant checks
    Check feas{"feasibility", r.traj.worst_feasibility <= 1e-9,
               r.traj.worst_feasibility - 1e-9,
               "seed " + tag + " worst set violation " +
                   fmt(r.traj.worst_feasibility)};
    Check disp{"step-displacement-bound", r.traj.worst_disp_slack <= 1e-8,
               r.traj.worst_disp_slack - 1e-8, "seed " + tag};
    double lx = domination_margin(r.consensus.cumulative_x, r.lemma_rhs_x);
    double ly = domination_margin(r.consensus.cumulative_y, r.lemma_rhs_y);
    Check cons{"consensus-error-bound", lx <= 0.0 && ly <= 0.0,
               std::max(lx, ly), "seed " + tag};
    double bd = -std::numeric_limits<double>::infinity();
    for (const Vec& a : abs_gaps) bd = std::max(bd, domination_margin(a, r.bound));
    Check dom{"regret-bound (realized)", bd <= 0.0, bd, "seed " + tag};
    Check sad{"saddle-solver", r.saddle.all_converged,
              r.saddle.all_converged ? -1.0 : 1.0,
              "seed " + tag + " worst residual " +
                  fmt(*std::max_element(r.saddle.residual.begin(),
                                        r.saddle.residual.end()))};
    for (const Check& ch : {feas, disp, cons, dom, sad}) {
      print_check(ch, quiet);
      res.all_pass = res.all_pass && ch.pass;
      res.checks.push_back(ch);
    }

    all_gaps.push_back(std::move(r.gaps));
    if (mean_bound.empty()) {
      mean_bound.assign(c.rounds, 0.0);
      mean_cons_x.assign(c.rounds, 0.0);
      mean_cons_y.assign(c.rounds, 0.0);
    }
    const double w = 1.0 / static_cast<double>(c.seeds.size());
    kernels::active().axpy(c.rounds, w, r.bound.data(), mean_bound.data());
    kernels::active().axpy(c.rounds, w, r.consensus.per_round_x.data(),
                           mean_cons_x.data());
    kernels::active().axpy(c.rounds, w, r.consensus.per_round_y.data(),
                           mean_cons_y.data());

    json js;
    js["seed"] = seed;
    js["final_global_adspr"] = r.adspr.global.back();
    js["final_normalized_adspr"] =
        r.adspr.normalization_skipped ? json() : json(r.adspr.normalized.back());
    js["final_bound"] = r.bound.back();
    js["worst_feasibility"] = r.traj.worst_feasibility;
    js["worst_displacement_slack"] = r.traj.worst_disp_slack;
    js["constants"] = {{"L_X", r.constants.l_x},   {"L_Y", r.constants.l_y},
                       {"rho_x", r.constants.rho_x}, {"rho_y", r.constants.rho_y},
                       {"R_X", r.constants.r_x},   {"R_Y", r.constants.r_y},
                       {"K_X", r.constants.k_x},   {"K_Y", r.constants.k_y},
                       {"Gamma", r.constants.consensus.gamma},
                       {"sigma", r.constants.consensus.sigma},
                       {"Gamma1", r.constants.consensus.gamma1},
                       {"sigma1", r.constants.consensus.sigma1},
                       {"K_min", r.constants.consensus.k_min},
                       {"theta1", r.constants.theta1},
                       {"theta2", r.constants.theta2}};
    per_seed.push_back(std::move(js));
  }

  // seed-averaged (expected) regret and its domination check
  std::vector<Vec> exp_regret = metrics::expected_regret(all_gaps);
  metrics::AdsprReport mean_adspr = metrics::adspr_family(exp_regret);
  write_metrics_csv(c.out_dir + "/metrics_mean.csv", exp_regret, mean_adspr,
                    mean_cons_x, mean_cons_y, mean_bound);
  double md = -std::numeric_limits<double>::infinity();
  for (const Vec& a : exp_regret)
    md = std::max(md, domination_margin(a, mean_bound));
  Check mdom{"regret-bound (seed mean)", md <= 0.0, md,
             std::to_string(c.seeds.size()) + " seeds"};
  print_check(mdom, quiet);
  res.all_pass = res.all_pass && mdom.pass;
  res.checks.push_back(mdom);

  json summary;
  summary["name"] = c.name;
  summary["fingerprint"] = fp;
  summary["seeds"] = c.seeds;
  summary["rounds"] = c.rounds;
  summary["regret_semantics"] =
      c.seeds.size() > 1
          ? "expected (" + std::to_string(c.seeds.size()) + "-seed mean)"
          : "realized (single seed)";
  summary["per_seed"] = std::move(per_seed);
  summary["mean_final_global_adspr"] = mean_adspr.global.back();
  summary["mean_final_bound"] = mean_bound.back();
  json checks = json::array();
  for (const Check& ch : res.checks)
    checks.push_back(json{{"name", ch.name},
                          {"pass", ch.pass},
                          {"margin", ch.margin},
                          {"detail", ch.detail}});
  summary["checks"] = std::move(checks);
  summary["all_pass"] = res.all_pass;
  std::ofstream out(c.out_dir + "/summary.json");
  out << summary.dump(2) << "\n";
  res.summary = std::move(summary);
  return res;
}

VerifyResult verify(const config::RunConfig& c, bool quiet) {
  VerifyResult res;
  auto add = [&](Check ch) {
    print_check(ch, quiet);
    res.all_pass = res.all_pass && ch.pass;
    res.checks.push_back(std::move(ch));
  };

  // 1) double stochasticity, checked directly so a broken matrix is named
  std::vector<Mat> mats = raw_matrices(c.graphs);
  bool ds_ok = true;
  std::string ds_detail;
  for (std::size_t k = 0; k < mats.size() && ds_ok; ++k) {
    try {
      network::check_doubly_stochastic(mats[k]);
    } catch (const std::exception& e) {
      ds_ok = false;
      ds_detail = "graph " + std::to_string(k) + ": " + e.what();
    }
  }
  add({"doubly-stochastic", ds_ok, ds_ok ? -1.0 : 1.0, ds_detail});
  if (!ds_ok) return res;  // everything downstream assumes valid weights

  network::GraphSchedule schedule = config::make_schedule(c.graphs);
  const std::size_t n = schedule.n();

  // 2) weight floor and self-loops
  double zeta = schedule.zeta();
  bool floor_ok = zeta > 0.0 && zeta < 1.0;
  double min_diag = 1.0;
  for (const Mat& m : schedule.matrices())
    for (std::size_t i = 0; i < n; ++i) min_diag = std::min(min_diag, m(i, i));
  add({"weight-floor", floor_ok && min_diag > 0.0,
       floor_ok && min_diag > 0.0 ? -zeta : 1.0,
       "zeta=" + fmt(zeta) + " min_diag=" + fmt(min_diag)});

  // 3) single-consensus contraction over windows up to 50
  network::ConsensusConstants cc =
      network::consensus_constants(n, zeta, schedule.q());
  double worst1 = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 1; s <= schedule.period(); ++s) {
    for (std::size_t t = s; t <= s + 50; ++t) {
      Mat phi = network::transition_matrix(schedule, t, s);
      double dev = network::max_deviation_from_uniform(phi);
      double rhs = cc.gamma * std::pow(cc.sigma, static_cast<double>(t - s));
      worst1 = std::max(worst1, dev - rhs);
    }
  }
  add({"transition-contraction", worst1 <= 0.0, worst1, "windows up to 50"});

  // 4) K-fold contraction (needs every round graph strongly connected)
  if (schedule.every_graph_strongly_connected()) {
    double worstK = -std::numeric_limits<double>::infinity();
    for (std::size_t kk : {std::size_t{1}, std::size_t{3}}) {
      network::KSchedule ks = network::KSchedule::constant(kk);
      for (std::size_t s = 1; s <= schedule.period(); ++s) {
        for (std::size_t t = s; t <= s + 30; ++t) {
          Mat phi = network::multi_transition(schedule, ks, t, s);
          double dev = network::max_deviation_from_uniform(phi);
          double rhs = cc.gamma1 *
                       std::pow(cc.sigma1,
                                static_cast<double>(kk * (t - s + 1)) - 1.0);
          worstK = std::max(worstK, dev - rhs);
        }
      }
    }
    add({"multi-transition-contraction", worstK <= 0.0, worstK, "K in {1,3}"});
  } else {
    add({"multi-transition-contraction", true, 0.0,
         "skipped: some round graph is not strongly connected"});
  }

  // 5) prediction-map validation
  try {
    Materialized m = materialize(c);
    problem::TrackingScenario scenario(c.params, m.set_x, m.set_y, c.seeds.front());
    algorithm::RunInputs in = make_inputs(c, m, scenario, c.seeds.front());
    algorithm::validate_prediction_map(in.prediction.x, in.prediction.dynamics,
                                       m.set_x, c.rounds);
    algorithm::validate_prediction_map(in.prediction.y, in.prediction.dynamics,
                                       m.set_y, c.rounds);
    add({"prediction-maps", true, -1.0, ""});
  } catch (const std::exception& e) {
    add({"prediction-maps", false, 1.0, e.what()});
    return res;
  }

  // 6) divergence lower bound on 1000 random pairs per geometry
  {
    Materialized m = materialize(c);
    auto check_geom = [&](const geometry::BregmanGeometry& geom,
                          const geometry::FeasibleSet& set, const char* name) {
      rng::Stream st = rng::substream(23, rng::Purpose::generic, set.dim);
      double worst = -std::numeric_limits<double>::infinity();
      Vec diff(set.dim);
      for (int k = 0; k < 1000; ++k) {
        Vec a(set.dim), b(set.dim);
        if (set.kind == geometry::SetKind::box) {
          for (std::size_t i = 0; i < set.dim; ++i) {
            a[i] = st.uniform(set.lower[i], set.upper[i]);
            b[i] = st.uniform(set.lower[i], set.upper[i]);
          }
        } else {
          for (double& v : a) v = -std::log(1.0 - st.u01());
          for (double& v : b) v = -std::log(1.0 - st.u01());
          a = geometry::clip_simplex(a);
          b = geometry::clip_simplex(b);
        }
        kernels::active().axpby(set.dim, 1.0, a.data(), -1.0, b.data(),
                                diff.data());
        double nrm = geom.primal_norm(diff);
        double lower = 0.5 * geom.strong_convexity() * nrm * nrm;
        worst = std::max(worst, lower - geom.divergence(a, b) - 1e-10);
      }
      add({std::string("divergence-lower-bound-") + name, worst <= 0.0, worst,
           "1000 pairs"});
    };
    check_geom(m.geom_x, m.set_x, "x");
    check_geom(m.geom_y, m.set_y, "y");
  }

  // 7) short run: feasibility, displacement bound, consensus-error bound
  {
    config::RunConfig short_cfg = c;
    short_cfg.rounds = std::min<std::size_t>(c.rounds, 50);
    short_cfg.seeds = {c.seeds.front()};
    SeedRun r = run_seed(short_cfg, c.seeds.front());
    add({"short-run-feasibility", r.traj.worst_feasibility <= 1e-9,
         r.traj.worst_feasibility - 1e-9, ""});
    add({"short-run-displacement", r.traj.worst_disp_slack <= 1e-8,
         r.traj.worst_disp_slack - 1e-8, ""});
    double lx = domination_margin(r.consensus.cumulative_x, r.lemma_rhs_x);
    double ly = domination_margin(r.consensus.cumulative_y, r.lemma_rhs_y);
    add({"short-run-consensus-bound", lx <= 0.0 && ly <= 0.0, std::max(lx, ly),
         ""});
  }
  return res;
}

void write_trajectory(const std::string& path, const algorithm::Trajectory& t,
                      const saddle::SaddleSequence& s,
                      const std::string& fingerprint) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_u64(out, kTrajMagic);
  write_u64(out, t.n);
  write_u64(out, t.dx);
  write_u64(out, t.dy);
  write_u64(out, t.rounds);
  write_u64(out, t.seed);
  write_u64(out, t.variant == algorithm::Variant::single ? 0 : 1);
  write_u64(out, fingerprint.size());
  out.write(fingerprint.data(),
            static_cast<std::streamsize>(fingerprint.size()));
  const problem::RoundLoss& l0 = t.losses.front();
  double coeff[4] = {l0.c1, l0.c2, l0.lambda1, l0.lambda2};
  write_doubles(out, coeff);
  for (std::size_t k = 0; k <= t.rounds; ++k)
    for (std::size_t i = 0; i < t.n; ++i) write_doubles(out, t.states_x[k][i]);
  for (std::size_t k = 0; k <= t.rounds; ++k)
    for (std::size_t i = 0; i < t.n; ++i) write_doubles(out, t.states_y[k][i]);
  for (std::size_t k = 0; k <= t.rounds; ++k)
    for (std::size_t i = 0; i < t.n; ++i) write_doubles(out, t.losses[k].pi[i]);
  for (std::size_t k = 0; k <= t.rounds; ++k)
    for (std::size_t i = 0; i < t.n; ++i)
      write_doubles(out, t.losses[k].phihat[i]);
  write_u64(out, s.x.size());
  for (const Vec& v : s.x) write_doubles(out, v);
  for (const Vec& v : s.y) write_doubles(out, v);
  write_doubles(out, s.residual);
  for (int it : s.iterations) write_u64(out, static_cast<std::uint64_t>(it));
  double tol = s.tol;
  write_doubles(out, {&tol, 1});
  write_u64(out, s.all_converged ? 1 : 0);
}

LoadedTrajectory read_trajectory(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  if (read_u64(in) != kTrajMagic)
    throw std::runtime_error("'" + path + "' is not a trajectory file");
  LoadedTrajectory lt;
  algorithm::Trajectory& t = lt.traj;
  t.n = read_u64(in);
  t.dx = read_u64(in);
  t.dy = read_u64(in);
  t.rounds = read_u64(in);
  t.seed = read_u64(in);
  t.variant = read_u64(in) == 0 ? algorithm::Variant::single
                                : algorithm::Variant::multi;
  std::string fp(read_u64(in), '\0');
  in.read(fp.data(), static_cast<std::streamsize>(fp.size()));
  lt.fingerprint = std::move(fp);
  double coeff[4];
  read_doubles(in, coeff);
  auto read_family = [&](std::size_t dim) {
    std::vector<std::vector<Vec>> fam(t.rounds + 1,
                                      std::vector<Vec>(t.n, Vec(dim)));
    for (auto& per_round : fam)
      for (Vec& v : per_round) read_doubles(in, v);
    return fam;
  };
  t.states_x = read_family(t.dx);
  t.states_y = read_family(t.dy);
  auto pi = read_family(t.dx);
  auto ph = read_family(t.dx);
  t.losses.resize(t.rounds + 1);
  for (std::size_t k = 0; k <= t.rounds; ++k) {
    t.losses[k].c1 = coeff[0];
    t.losses[k].c2 = coeff[1];
    t.losses[k].lambda1 = coeff[2];
    t.losses[k].lambda2 = coeff[3];
    t.losses[k].pi = std::move(pi[k]);
    t.losses[k].phihat = std::move(ph[k]);
  }
  saddle::SaddleSequence& s = lt.saddle;
  const std::size_t count = read_u64(in);
  s.x.assign(count, Vec(t.dx));
  s.y.assign(count, Vec(t.dy));
  for (Vec& v : s.x) read_doubles(in, v);
  for (Vec& v : s.y) read_doubles(in, v);
  s.residual.resize(count);
  read_doubles(in, s.residual);
  s.iterations.resize(count);
  for (int& it : s.iterations) it = static_cast<int>(read_u64(in));
  double tol = 0.0;
  read_doubles(in, {&tol, 1});
  s.tol = tol;
  s.all_converged = read_u64(in) == 1;
  if (!in) throw std::runtime_error("'" + path + "' is truncated");
  return lt;
}

void write_metrics_csv(const std::string& path,
                       const std::vector<Vec>& regret_per_agent,
                       const metrics::AdsprReport& adspr,
                       const Vec& consensus_x, const Vec& consensus_y,
                       const Vec& bound) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "t";
  for (std::size_t j = 0; j < regret_per_agent.size(); ++j)
    out << ",regret_" << (j + 1);
  out << ",adspr_inf,adspr_sup,adspr_global,adspr_normalized,"
         "consensus_x,consensus_y,bound\n";
  const std::size_t horizon = bound.size();
  for (std::size_t t = 1; t <= horizon; ++t) {
    out << t;
    for (const Vec& r : regret_per_agent) out << "," << fmt(r[t - 1]);
    out << "," << fmt(adspr.inf_env[t - 1]) << "," << fmt(adspr.sup_env[t - 1])
        << "," << fmt(adspr.global[t - 1]) << ","
        << fmt(adspr.normalization_skipped
                   ? std::numeric_limits<double>::quiet_NaN()
                   : adspr.normalized[t - 1])
        << "," << fmt(consensus_x[t - 1]) << "," << fmt(consensus_y[t - 1])
        << "," << fmt(bound[t - 1]) << "\n";
  }
}

}  // namespace dosp::harness
