#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dosp/algorithm.hpp"
#include "dosp/geometry.hpp"
#include "dosp/network.hpp"
#include "dosp/problem.hpp"

#include "json.hpp"

// Run configuration: JSON round-trippable, with the named presets shipped
// both in code and as files under configs/.

namespace dosp::config {

struct GeometrySpec {
  geometry::GeomKind kind = geometry::GeomKind::euclidean;
  double p = 2.0;
};

struct SetSpec {
  geometry::SetKind kind = geometry::SetKind::box;
  // uniform bounds, or per-coordinate vectors when nonempty
  double lower = -1.0, upper = 1.0;
  Vec lower_vec, upper_vec;
};

struct GraphsSpec {
  std::size_t n = 0;
  // per graph: undirected edge list; alternatively explicit weight matrices
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> edges;
  std::vector<Mat> weights;
  std::size_t q_override = 0;
};

struct KSpec {
  bool is_constant = true;
  std::size_t k = 1;
  std::size_t base = 6;
  double num = 4.0, exp = 0.2;
};

struct PredictionSpec {
  algorithm::MapKind x = algorithm::MapKind::identity;
  algorithm::MapKind y = algorithm::MapKind::identity;
  Mat x_matrix, y_matrix;  // fixed_matrix kinds only
};

struct SaddleSpec {
  double tol = 1e-7;
  int max_iter = 100000;
};

struct RunConfig {
  std::string name = "custom";
  problem::TrackingParams params;
  SetSpec set_x{geometry::SetKind::box, -6.0, 6.0, {}, {}};
  SetSpec set_y{geometry::SetKind::box, -0.3, 0.3, {}, {}};
  GeometrySpec geom_x, geom_y;
  GraphsSpec graphs;
  algorithm::Variant variant = algorithm::Variant::single;
  KSpec k_schedule;
  std::vector<KSpec> k_arms;  // comparison arms (multi-consensus preset)
  algorithm::StepSchedule steps;
  PredictionSpec prediction;
  std::size_t rounds = 100;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::string out_dir = "out";
  SaddleSpec saddle;
};

nlohmann::json to_json(const RunConfig& c);
RunConfig from_json(const nlohmann::json& j);
RunConfig load_file(const std::string& path);
void save_file(const RunConfig& c, const std::string& path);

// FNV-1a over the canonical serialization.
std::string fingerprint(const RunConfig& c);

std::vector<std::string> preset_names();
RunConfig preset(const std::string& name);

// materialization
geometry::FeasibleSet make_set(const SetSpec& s, std::size_t d);
geometry::BregmanGeometry make_geometry(const GeometrySpec& g, std::size_t d);
network::GraphSchedule make_schedule(const GraphsSpec& g);
network::KSchedule make_kschedule(const KSpec& k);

}  // namespace dosp::config
