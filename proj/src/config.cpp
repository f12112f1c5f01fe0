#include "dosp/config.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace dosp::config {
namespace {

using nlohmann::json;

std::string geom_name(geometry::GeomKind k) {
  switch (k) {
    case geometry::GeomKind::euclidean:
      return "euclidean";
    case geometry::GeomKind::kl_simplex:
      return "kl-simplex";
    case geometry::GeomKind::p_norm:
      return "p-norm";
  }
  return "euclidean";
}

geometry::GeomKind geom_from(const std::string& s) {
  if (s == "euclidean") return geometry::GeomKind::euclidean;
  if (s == "kl-simplex") return geometry::GeomKind::kl_simplex;
  if (s == "p-norm") return geometry::GeomKind::p_norm;
  throw std::invalid_argument("config: unknown geometry kind '" + s + "'");
}

std::string target_name(problem::TargetKind k) {
  switch (k) {
    case problem::TargetKind::fixed:
      return "fixed";
    case problem::TargetKind::planar_rotations:
      return "planar-rotations";
    case problem::TargetKind::signed_permutation:
      return "signed-permutation";
    case problem::TargetKind::cycle:
      return "cycle";
  }
  return "fixed";
}

problem::TargetKind target_from(const std::string& s) {
  if (s == "fixed") return problem::TargetKind::fixed;
  if (s == "planar-rotations") return problem::TargetKind::planar_rotations;
  if (s == "signed-permutation") return problem::TargetKind::signed_permutation;
  if (s == "cycle") return problem::TargetKind::cycle;
  throw std::invalid_argument("config: unknown target kind '" + s + "'");
}

std::string map_name(algorithm::MapKind k) {
  switch (k) {
    case algorithm::MapKind::identity:
      return "identity";
    case algorithm::MapKind::target_dynamics:
      return "target-dynamics";
    case algorithm::MapKind::fixed_matrix:
      return "matrix";
  }
  return "identity";
}

algorithm::MapKind map_from(const std::string& s) {
  if (s == "identity") return algorithm::MapKind::identity;
  if (s == "target-dynamics") return algorithm::MapKind::target_dynamics;
  if (s == "matrix") return algorithm::MapKind::fixed_matrix;
  throw std::invalid_argument("config: unknown prediction kind '" + s + "'");
}

json mat_to_json(const Mat& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat mat_from_json(const json& j) {
  const std::size_t rows = j.size();
  const std::size_t cols = rows == 0 ? 0 : j.front().size();
  Mat m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (j[i].size() != cols)
      throw std::invalid_argument("config: ragged matrix literal");
    for (std::size_t c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
  }
  return m;
}

json set_to_json(const SetSpec& s) {
  json j;
  if (s.kind == geometry::SetKind::simplex) {
    j["kind"] = "simplex";
    return j;
  }
  j["kind"] = "box";
  if (!s.lower_vec.empty()) {
    j["lower"] = s.lower_vec;
    j["upper"] = s.upper_vec;
  } else {
    j["lower"] = s.lower;
    j["upper"] = s.upper;
  }
  return j;
}

SetSpec set_from_json(const json& j) {
  SetSpec s;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "simplex") {
    s.kind = geometry::SetKind::simplex;
    return s;
  }
  if (kind != "box") throw std::invalid_argument("config: unknown set kind");
  s.kind = geometry::SetKind::box;
  if (j.at("lower").is_array()) {
    s.lower_vec = j.at("lower").get<Vec>();
    s.upper_vec = j.at("upper").get<Vec>();
  } else {
    s.lower = j.at("lower").get<double>();
    s.upper = j.at("upper").get<double>();
  }
  return s;
}

json k_to_json(const KSpec& k) {
  json j;
  if (k.is_constant) {
    j["kind"] = "constant";
    j["k"] = k.k;
  } else {
    j["kind"] = "adaptive";
    j["base"] = k.base;
    j["num"] = k.num;
    j["exp"] = k.exp;
  }
  return j;
}

KSpec k_from_json(const json& j) {
  KSpec k;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant") {
    k.is_constant = true;
    k.k = j.at("k").get<std::size_t>();
  } else if (kind == "adaptive") {
    k.is_constant = false;
    k.base = j.at("base").get<std::size_t>();
    k.num = j.at("num").get<double>();
    k.exp = j.at("exp").get<double>();
  } else {
    throw std::invalid_argument("config: unknown k-schedule kind");
  }
  return k;
}

// the three ten-node switching graphs used by the n=10 presets
GraphsSpec ten_node_graphs() {
  GraphsSpec g;
  g.n = 10;
  std::vector<std::pair<std::size_t, std::size_t>> ring, star, chord;
  for (std::size_t i = 0; i < 10; ++i) ring.emplace_back(i, (i + 1) % 10);
  for (std::size_t i = 1; i < 10; ++i) star.emplace_back(0, i);
  chord = ring;
  chord.emplace_back(0, 5);
  chord.emplace_back(2, 7);
  g.edges = {ring, star, chord};
  return g;
}

GraphsSpec thirty_node_graphs() {
  GraphsSpec g;
  g.n = 30;
  for (std::uint64_t k = 0; k < 3; ++k) {
    network::Graph rg = network::random_connected_graph(30, 0.08, 101 + k);
    g.edges.push_back(rg.edges);
  }
  return g;
}

}  // namespace

json to_json(const RunConfig& c) {
  json j;
  j["name"] = c.name;
  j["n"] = c.params.n;
  j["d"] = c.params.d;
  j["coefficients"] = {{"c1", c.params.c1},
                       {"c2", c.params.c2},
                       {"lambda1", c.params.lambda1},
                       {"lambda2", c.params.lambda2}};
  j["a1"] = c.params.a1;
  j["noise"] = {{"dx", c.params.noise_dx}, {"dy", c.params.noise_dy}};
  j["target"] = {{"kind", target_name(c.params.target.kind)},
                 {"max_angle", c.params.target.max_angle},
                 {"angle_decay", c.params.target.angle_decay}};
  j["set_x"] = set_to_json(c.set_x);
  j["set_y"] = set_to_json(c.set_y);
  j["geometry_x"] = {{"kind", geom_name(c.geom_x.kind)}, {"p", c.geom_x.p}};
  j["geometry_y"] = {{"kind", geom_name(c.geom_y.kind)}, {"p", c.geom_y.p}};
  json graphs;
  graphs["n"] = c.graphs.n;
  if (!c.graphs.weights.empty()) {
    json ws = json::array();
    for (const Mat& m : c.graphs.weights) ws.push_back(mat_to_json(m));
    graphs["weights"] = std::move(ws);
  } else {
    json gs = json::array();
    for (const auto& edge_list : c.graphs.edges) {
      json edges = json::array();
      for (auto [a, b] : edge_list) edges.push_back(json::array({a, b}));
      gs.push_back(json{{"edges", std::move(edges)}});
    }
    graphs["graphs"] = std::move(gs);
  }
  if (c.graphs.q_override > 0) graphs["q"] = c.graphs.q_override;
  j["graph"] = std::move(graphs);
  j["variant"] =
      c.variant == algorithm::Variant::single ? "single" : "multi";
  j["k_schedule"] = k_to_json(c.k_schedule);
  if (!c.k_arms.empty()) {
    json arms = json::array();
    for (const KSpec& k : c.k_arms) arms.push_back(k_to_json(k));
    j["k_arms"] = std::move(arms);
  }
  j["steps"] = {{"eps1", c.steps.eps1},
                {"gamma1", c.steps.gamma1},
                {"eps2", c.steps.eps2},
                {"gamma2", c.steps.gamma2}};
  json pred;
  pred["x"] = map_name(c.prediction.x);
  pred["y"] = map_name(c.prediction.y);
  if (c.prediction.x == algorithm::MapKind::fixed_matrix)
    pred["x_matrix"] = mat_to_json(c.prediction.x_matrix);
  if (c.prediction.y == algorithm::MapKind::fixed_matrix)
    pred["y_matrix"] = mat_to_json(c.prediction.y_matrix);
  j["prediction"] = std::move(pred);
  j["rounds"] = c.rounds;
  j["seeds"] = c.seeds;
  j["out_dir"] = c.out_dir;
  j["saddle"] = {{"tol", c.saddle.tol}, {"max_iter", c.saddle.max_iter}};
  return j;
}

RunConfig from_json(const json& j) {
  RunConfig c;
  c.name = j.value("name", std::string("custom"));
  c.params.n = j.at("n").get<std::size_t>();
  c.params.d = j.at("d").get<std::size_t>();
  const json& co = j.at("coefficients");
  c.params.c1 = co.at("c1").get<double>();
  c.params.c2 = co.at("c2").get<double>();
  c.params.lambda1 = co.at("lambda1").get<double>();
  c.params.lambda2 = co.at("lambda2").get<double>();
  c.params.a1 = j.value("a1", 0.5);
  if (j.contains("noise")) {
    c.params.noise_dx = j["noise"].value("dx", 1.0);
    c.params.noise_dy = j["noise"].value("dy", 1.0);
  }
  if (j.contains("target")) {
    c.params.target.kind = target_from(j["target"].at("kind").get<std::string>());
    c.params.target.max_angle = j["target"].value("max_angle", 0.05);
    c.params.target.angle_decay = j["target"].value("angle_decay", 0.55);
  }
  c.set_x = set_from_json(j.at("set_x"));
  c.set_y = set_from_json(j.at("set_y"));
  c.geom_x.kind = geom_from(j.at("geometry_x").at("kind").get<std::string>());
  c.geom_x.p = j.at("geometry_x").value("p", 2.0);
  c.geom_y.kind = geom_from(j.at("geometry_y").at("kind").get<std::string>());
  c.geom_y.p = j.at("geometry_y").value("p", 2.0);
  const json& gj = j.at("graph");
  c.graphs.n = gj.at("n").get<std::size_t>();
  if (gj.contains("weights")) {
    for (const json& w : gj["weights"])
      c.graphs.weights.push_back(mat_from_json(w));
  } else {
    for (const json& g : gj.at("graphs")) {
      std::vector<std::pair<std::size_t, std::size_t>> edges;
      for (const json& e : g.at("edges"))
        edges.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>());
      c.graphs.edges.push_back(std::move(edges));
    }
  }
  c.graphs.q_override = gj.value("q", std::size_t{0});
  const std::string variant = j.value("variant", std::string("single"));
  if (variant == "single")
    c.variant = algorithm::Variant::single;
  else if (variant == "multi")
    c.variant = algorithm::Variant::multi;
  else
    throw std::invalid_argument("config: unknown variant '" + variant + "'");
  if (j.contains("k_schedule")) c.k_schedule = k_from_json(j["k_schedule"]);
  if (j.contains("k_arms"))
    for (const json& a : j["k_arms"]) c.k_arms.push_back(k_from_json(a));
  if (j.contains("steps")) {
    c.steps.eps1 = j["steps"].value("eps1", c.steps.eps1);
    c.steps.gamma1 = j["steps"].value("gamma1", c.steps.gamma1);
    c.steps.eps2 = j["steps"].value("eps2", c.steps.eps2);
    c.steps.gamma2 = j["steps"].value("gamma2", c.steps.gamma2);
  }
  if (j.contains("prediction")) {
    c.prediction.x = map_from(j["prediction"].value("x", std::string("identity")));
    c.prediction.y = map_from(j["prediction"].value("y", std::string("identity")));
    if (c.prediction.x == algorithm::MapKind::fixed_matrix)
      c.prediction.x_matrix = mat_from_json(j["prediction"].at("x_matrix"));
    if (c.prediction.y == algorithm::MapKind::fixed_matrix)
      c.prediction.y_matrix = mat_from_json(j["prediction"].at("y_matrix"));
  }
  c.rounds = j.at("rounds").get<std::size_t>();
  c.seeds = j.value("seeds", std::vector<std::uint64_t>{1});
  c.out_dir = j.value("out_dir", std::string("out"));
  if (j.contains("saddle")) {
    c.saddle.tol = j["saddle"].value("tol", 1e-7);
    c.saddle.max_iter = j["saddle"].value("max_iter", 100000);
  }
  return c;
}

RunConfig load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  json j;
  in >> j;
  return from_json(j);
}

void save_file(const RunConfig& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("config: cannot write '" + path + "'");
  out << to_json(c).dump(2) << "\n";
}

std::string fingerprint(const RunConfig& c) {
  const std::string s = to_json(c).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

std::vector<std::string> preset_names() {
  return {"baseline-noise", "prediction-compare", "pnorm-compare",
          "kl-simplex",     "multi-consensus",    "comparison"};
}

RunConfig preset(const std::string& name) {
  RunConfig c;
  c.name = name;
  c.graphs = ten_node_graphs();
  c.out_dir = "out/" + name;
  if (name == "baseline-noise") {
    c.rounds = 2000;
    return c;
  }
  if (name == "prediction-compare") {
    c.params.noise_dx = 0.0;
    c.params.noise_dy = 0.0;
    c.params.target.kind = problem::TargetKind::signed_permutation;
    c.prediction.x = algorithm::MapKind::target_dynamics;
    c.rounds = 1000;
    return c;
  }
  if (name == "pnorm-compare") {
    c.geom_x.kind = geometry::GeomKind::p_norm;
    c.geom_x.p = 1.85;
    c.params.lambda1 = 0.3;
    c.rounds = 2000;
    return c;
  }
  if (name == "kl-simplex") {
    c.set_x = SetSpec{geometry::SetKind::simplex, 0.0, 0.0, {}, {}};
    c.geom_x.kind = geometry::GeomKind::kl_simplex;
    c.params.target.kind = problem::TargetKind::fixed;
    c.rounds = 2000;
    return c;
  }
  if (name == "multi-consensus") {
    c.params.n = 30;
    c.graphs = thirty_node_graphs();
    c.variant = algorithm::Variant::multi;
    c.k_schedule = KSpec{false, 1, 6, 4.0, 0.2};
    c.k_arms = {KSpec{true, 1, 0, 0, 0}, KSpec{true, 3, 0, 0, 0},
                KSpec{false, 1, 6, 4.0, 0.2}};
    c.rounds = 1000;
    return c;
  }
  if (name == "comparison") {
    c.params.n = 30;
    c.graphs = thirty_node_graphs();
    c.rounds = 1000;
    return c;
  }
  throw std::invalid_argument("unknown preset '" + name + "'");
}

geometry::FeasibleSet make_set(const SetSpec& s, std::size_t d) {
  if (s.kind == geometry::SetKind::simplex)
    return geometry::FeasibleSet::simplex(d);
  if (!s.lower_vec.empty()) {
    if (s.lower_vec.size() != d || s.upper_vec.size() != d)
      throw std::invalid_argument("config: per-coordinate bounds have wrong size");
    return geometry::FeasibleSet::box(s.lower_vec, s.upper_vec);
  }
  return geometry::FeasibleSet::box(d, s.lower, s.upper);
}

geometry::BregmanGeometry make_geometry(const GeometrySpec& g, std::size_t d) {
  switch (g.kind) {
    case geometry::GeomKind::euclidean:
      return geometry::BregmanGeometry::euclidean(d);
    case geometry::GeomKind::kl_simplex:
      return geometry::BregmanGeometry::kl(d);
    case geometry::GeomKind::p_norm:
      return geometry::BregmanGeometry::pnorm(d, g.p);
  }
  return geometry::BregmanGeometry::euclidean(d);
}

network::GraphSchedule make_schedule(const GraphsSpec& g) {
  std::vector<Mat> mats;
  if (!g.weights.empty()) {
    mats = g.weights;
  } else {
    if (g.edges.empty())
      throw std::invalid_argument("config: graph spec has neither edges nor weights");
    for (const auto& edge_list : g.edges) {
      network::Graph graph;
      graph.n = g.n;
      graph.edges = edge_list;
      mats.push_back(network::metropolis_weights(graph));
    }
  }
  network::GraphSchedule s = network::GraphSchedule::switching(std::move(mats));
  if (g.q_override > 0) s.override_q(g.q_override);
  return s;
}

network::KSchedule make_kschedule(const KSpec& k) {
  if (k.is_constant) return network::KSchedule::constant(k.k);
  return network::KSchedule::adaptive(k.base, k.num, k.exp);
}

}  // namespace dosp::config
