#include "physimetrics/bodymodel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "physimetrics/errors.hpp"

namespace physimetrics {

namespace detail {
extern const char* kDefaultBodyJson;
}

namespace {
constexpr double kRowSumTol = 1e-6;
}

PointMatrix regress_markers(const PointMatrix& p, int frames, const MarkerSet& ms) {
  const int M = ms.marker_count();
  const Eigen::Index J = ms.weights.cols();
  if (p.rows() != static_cast<Eigen::Index>(frames) * J) {
    throw ShapeMismatch("regress_markers: positions rows disagree with frames * joints");
  }
  PointMatrix out(static_cast<Eigen::Index>(frames) * M, 3);
  for (int t = 0; t < frames; ++t) {
    out.middleRows(static_cast<Eigen::Index>(t) * M, M).noalias() =
        ms.weights * p.middleRows(static_cast<Eigen::Index>(t) * J, J);
  }
  return out;
}

std::vector<std::vector<SphereState>> sphere_centers(const PointMatrix& p, int frames,
                                                     const SphereBody& sb) {
  Eigen::Index joints = 0;
  for (const auto& sp : sb.spheres) {
    joints = std::max<Eigen::Index>(joints, std::max(sp.joint_a, sp.joint_b) + 1);
  }
  if (frames < 1 || p.rows() % frames != 0 || p.rows() / frames < joints) {
    throw ShapeMismatch("sphere_centers: positions too small for the sphere layout");
  }
  const Eigen::Index J = p.rows() / frames;
  std::vector<std::vector<SphereState>> out(frames);
  for (int t = 0; t < frames; ++t) {
    out[t].reserve(sb.spheres.size());
    for (const auto& sp : sb.spheres) {
      const Vec3 a = p.row(static_cast<Eigen::Index>(t) * J + sp.joint_a);
      const Vec3 b = p.row(static_cast<Eigen::Index>(t) * J + sp.joint_b);
      out[t].push_back({(1.0 - sp.t) * a + sp.t * b, sp.radius});
    }
  }
  return out;
}

BodyModel body_from_json(const nlohmann::json& j, const Skeleton& s) {
  BodyModel body;
  const int J = s.joint_count();

  if (!j.contains("markers") || !j["markers"].is_array()) {
    throw ParseError("body config: missing \"markers\" array");
  }
  const auto& markers = j["markers"];
  if (markers.size() != MarkerSet::kMarkers) {
    throw InvariantViolation("body config: expected 67 markers, got " +
                             std::to_string(markers.size()));
  }
  body.markers.weights = Eigen::MatrixXd::Zero(MarkerSet::kMarkers, J);
  for (std::size_t k = 0; k < markers.size(); ++k) {
    const auto& m = markers[k];
    const std::string name = m.at("name").get<std::string>();
    body.markers.marker_names.push_back(name);
    double sum = 0.0;
    for (const auto& [joint_name, w] : m.at("weights").items()) {
      const int joint = s.find_joint(joint_name);
      if (joint < 0) {
        throw InvariantViolation("body config: marker " + name + " references unknown joint " +
                                 joint_name);
      }
      const double weight = w.get<double>();
      if (weight < 0.0) {
        throw InvariantViolation("body config: marker " + name + " has a negative weight");
      }
      body.markers.weights(static_cast<Eigen::Index>(k), joint) = weight;
      sum += weight;
    }
    if (std::abs(sum - 1.0) > kRowSumTol) {
      throw InvariantViolation("body config: marker " + name + " weights sum to " +
                               std::to_string(sum) + ", expected 1");
    }
  }

  if (!j.contains("spheres") || !j["spheres"].is_array()) {
    throw ParseError("body config: missing \"spheres\" array");
  }
  const auto& spheres = j["spheres"];
  if (spheres.size() != SphereBody::kSpheres) {
    throw InvariantViolation("body config: expected 45 spheres, got " +
                             std::to_string(spheres.size()));
  }
  for (std::size_t k = 0; k < spheres.size(); ++k) {
    const auto& sp = spheres[k];
    BoneSphere bs;
    auto resolve = [&](const nlohmann::json& field) {
      const int joint = field.is_string() ? s.find_joint(field.get<std::string>())
                                          : field.get<int>();
      if (joint < 0 || joint >= J) {
        throw InvariantViolation("body config: sphere " + std::to_string(k) +
                                 " references an invalid joint");
      }
      return joint;
    };
    bs.joint_a = resolve(sp.at("a"));
    bs.joint_b = resolve(sp.at("b"));
    bs.t = sp.at("t").get<double>();
    bs.radius = sp.at("radius").get<double>();
    if (bs.t < 0.0 || bs.t > 1.0) {
      throw InvariantViolation("body config: sphere " + std::to_string(k) +
                               " has t outside [0, 1]");
    }
    if (!(bs.radius > 0.0)) {
      throw InvariantViolation("body config: sphere " + std::to_string(k) +
                               " has a non-positive radius");
    }
    body.spheres.spheres.push_back(bs);
  }
  return body;
}

nlohmann::json body_to_json(const BodyModel& body, const Skeleton& s) {
  nlohmann::json markers = nlohmann::json::array();
  for (int k = 0; k < body.markers.marker_count(); ++k) {
    nlohmann::json weights;
    for (int j = 0; j < s.joint_count(); ++j) {
      const double w = body.markers.weights(k, j);
      if (w != 0.0) {
        weights[s.joint_name(j)] = w;
      }
    }
    markers.push_back({{"name", body.markers.marker_names[k]}, {"weights", weights}});
  }
  nlohmann::json spheres = nlohmann::json::array();
  for (const auto& sp : body.spheres.spheres) {
    spheres.push_back({{"a", s.joint_name(sp.joint_a)},
                       {"b", s.joint_name(sp.joint_b)},
                       {"t", sp.t},
                       {"radius", sp.radius}});
  }
  return {{"markers", markers}, {"spheres", spheres}};
}

BodyModel load_body_config(const std::string& path, const Skeleton& s) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("body config: cannot open " + path);
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": byte " + std::to_string(e.byte) + ": " + e.what());
  }
  return body_from_json(j, s);
}

const BodyModel& default_body() {
  static const BodyModel instance =
      body_from_json(nlohmann::json::parse(detail::kDefaultBodyJson), Skeleton::default22());
  return instance;
}

}  // namespace physimetrics
