#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "physimetrics/bodymodel.hpp"
#include "physimetrics/errors.hpp"
#include "test_helpers.hpp"

using namespace physimetrics;

namespace {

PointMatrix rest_points(const Skeleton& s, int frames) {
  const auto rest = s.rest_positions();
  PointMatrix p(static_cast<Eigen::Index>(frames) * s.joint_count(), 3);
  for (int t = 0; t < frames; ++t) {
    for (int j = 0; j < s.joint_count(); ++j) {
      p.row(flat_index(t, j, s.joint_count())) = rest[j].transpose();
    }
  }
  return p;
}

nlohmann::json load_golden() {
  std::ifstream in(std::string(PHYSIMETRICS_SOURCE_DIR) + "/tests/data/body_rest_golden.json");
  REQUIRE(in.good());
  return nlohmann::json::parse(in);
}

}  // namespace

TEST_CASE("default body config loads with 67 markers and 45 spheres") {
  const BodyModel& body = default_body();
  CHECK(body.markers.marker_count() == 67);
  CHECK(body.spheres.sphere_count() == 45);
  for (int k = 0; k < body.markers.marker_count(); ++k) {
    const double sum = body.markers.weights.row(k).sum();
    CHECK(std::abs(sum - 1.0) < 1e-6);
    CHECK(body.markers.weights.row(k).minCoeff() >= 0.0);
  }
}

TEST_CASE("one-hot and midpoint marker rows") {
  const Skeleton& s = Skeleton::default22();
  MarkerSet ms;
  ms.weights = Eigen::MatrixXd::Zero(2, 22);
  ms.weights(0, 5) = 1.0;
  ms.weights(1, 3) = 0.5;
  ms.weights(1, 4) = 0.5;
  ms.marker_names = {"onehot", "mid"};

  std::mt19937 rng(77);
  std::normal_distribution<double> n(0.0, 1.0);
  PointMatrix p(22, 3);
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (int c = 0; c < 3; ++c) p(i, c) = n(rng);
  }
  const PointMatrix markers = regress_markers(p, 1, ms);
  CHECK(markers.row(0).isApprox(p.row(5)));
  CHECK(markers.row(1).isApprox(0.5 * (p.row(3) + p.row(4))));
  (void)s;
}

TEST_CASE("sphere centers interpolate bone endpoints") {
  SphereBody sb;
  sb.spheres = {{0, 1, 0.0, 0.1}, {0, 1, 0.5, 0.2}, {0, 1, 1.0, 0.3}};
  PointMatrix p(2, 3);
  p << 1, 2, 3, 5, 6, 7;
  const auto centers = sphere_centers(p, 1, sb);
  CHECK(centers[0][0].center.isApprox(Vec3(1, 2, 3)));
  CHECK(centers[0][1].center.isApprox(Vec3(3, 4, 5)));
  CHECK(centers[0][2].center.isApprox(Vec3(5, 6, 7)));
  CHECK(centers[0][1].radius == 0.2);
}

TEST_CASE("rest-pose markers match the frozen golden file") {
  const Skeleton& s = Skeleton::default22();
  const BodyModel& body = default_body();
  const PointMatrix p = rest_points(s, 1);
  const PointMatrix markers = regress_markers(p, 1, body.markers);

  const nlohmann::json golden = load_golden();
  REQUIRE(golden["rest_markers"].size() == 67);
  for (int k = 0; k < 67; ++k) {
    const auto& g = golden["rest_markers"][k];
    CHECK(body.markers.marker_names[k] == g["name"].get<std::string>());
    const Vec3 expected(g["position"][0], g["position"][1], g["position"][2]);
    CHECK((Vec3(markers.row(k).transpose()) - expected).norm() < 1e-12);
  }
}

TEST_CASE("rest-pose sphere centers match the frozen golden file") {
  const Skeleton& s = Skeleton::default22();
  const BodyModel& body = default_body();
  const auto centers = sphere_centers(rest_points(s, 1), 1, body.spheres);

  const nlohmann::json golden = load_golden();
  REQUIRE(golden["rest_spheres"].size() == 45);
  for (int k = 0; k < 45; ++k) {
    const auto& g = golden["rest_spheres"][k];
    const Vec3 expected(g["center"][0], g["center"][1], g["center"][2]);
    CHECK((centers[0][k].center - expected).norm() < 1e-12);
    CHECK(centers[0][k].radius == doctest::Approx(g["radius"].get<double>()).epsilon(1e-14));
  }
}

TEST_CASE("marker regression and sphere centers are rigid-motion equivariant") {
  const Skeleton& s = Skeleton::default22();
  const BodyModel& body = default_body();
  std::mt19937 rng(83);
  const PointMatrix p = rest_points(s, 2);
  const Mat3 rot = pmtest::random_rotation(rng);
  const Vec3 trans(0.2, -0.7, 1.1);
  PointMatrix moved(p.rows(), 3);
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    moved.row(i) = (rot * Vec3(p.row(i).transpose()) + trans).transpose();
  }

  const PointMatrix m0 = regress_markers(p, 2, body.markers);
  const PointMatrix m1 = regress_markers(moved, 2, body.markers);
  for (Eigen::Index i = 0; i < m0.rows(); ++i) {
    const Vec3 expected = rot * Vec3(m0.row(i).transpose()) + trans;
    CHECK((Vec3(m1.row(i).transpose()) - expected).norm() < 1e-12);
  }

  const auto c0 = sphere_centers(p, 2, body.spheres);
  const auto c1 = sphere_centers(moved, 2, body.spheres);
  for (int t = 0; t < 2; ++t) {
    for (std::size_t k = 0; k < c0[t].size(); ++k) {
      const Vec3 expected = rot * c0[t][k].center + trans;
      CHECK((c1[t][k].center - expected).norm() < 1e-12);
      CHECK(c1[t][k].radius == c0[t][k].radius);
    }
  }
}

TEST_CASE("config round trip is identical modulo whitespace") {
  const Skeleton& s = Skeleton::default22();
  const std::string path = std::string(PHYSIMETRICS_SOURCE_DIR) + "/configs/body67_45.json";
  const BodyModel body = load_body_config(path, s);
  const nlohmann::json serialized = body_to_json(body, s);

  std::ifstream in(path);
  const nlohmann::json original = nlohmann::json::parse(in);
  CHECK(serialized == original);

  // And reloading the serialized form yields the same weights.
  const BodyModel reloaded = body_from_json(serialized, s);
  CHECK(reloaded.markers.weights == body.markers.weights);
}

TEST_CASE("bad marker row sums are rejected by name") {
  const Skeleton& s = Skeleton::default22();
  nlohmann::json j = body_to_json(default_body(), s);
  j["markers"][3]["weights"] = {{"head", 0.8}};  // sums to 0.8
  try {
    body_from_json(j, s);
    FAIL("expected InvariantViolation");
  } catch (const InvariantViolation& e) {
    const std::string msg = e.what();
    CHECK(msg.find(j["markers"][3]["name"].get<std::string>()) != std::string::npos);
  }
}

TEST_CASE("wrong sphere count is rejected") {
  const Skeleton& s = Skeleton::default22();
  nlohmann::json j = body_to_json(default_body(), s);
  j["spheres"].erase(44);
  try {
    body_from_json(j, s);
    FAIL("expected InvariantViolation");
  } catch (const InvariantViolation& e) {
    CHECK(std::string(e.what()).find("45") != std::string::npos);
  }
}

TEST_CASE("sphere t outside [0,1] is rejected") {
  const Skeleton& s = Skeleton::default22();
  nlohmann::json j = body_to_json(default_body(), s);
  j["spheres"][7]["t"] = 1.5;
  CHECK_THROWS_AS(body_from_json(j, s), InvariantViolation);
}
