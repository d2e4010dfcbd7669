#pragma once

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "physimetrics/skeleton.hpp"
#include "physimetrics/types.hpp"

namespace physimetrics {

/// 67 surface markers as convex combinations of the 22 joints.  Every weight
/// row is non-negative and sums to 1 within 1e-6.
struct MarkerSet {
  Eigen::MatrixXd weights;                // 67x22
  std::vector<std::string> marker_names;  // 67

  static constexpr int kMarkers = 67;

  int marker_count() const { return static_cast<int>(weights.rows()); }
};

/// One bone-attached sphere: center interpolates joint_a -> joint_b at
/// fraction t, with a fixed radius in meters.
struct BoneSphere {
  int joint_a = 0;
  int joint_b = 0;
  double t = 0.5;
  double radius = 0.05;
};

/// 45-sphere volumetric approximation of the body.
struct SphereBody {
  std::vector<BoneSphere> spheres;

  static constexpr int kSpheres = 45;

  int sphere_count() const { return static_cast<int>(spheres.size()); }
};

struct BodyModel {
  MarkerSet markers;
  SphereBody spheres;
};

/// marker k at frame t = sum_j weights[k, j] * p[t, j].  Output (T*67)x3.
PointMatrix regress_markers(const PointMatrix& p, int frames, const MarkerSet& ms);

struct SphereState {
  Vec3 center;
  double radius;
};

/// Sphere centers per frame: (1 - t) * p[joint_a] + t * p[joint_b].
std::vector<std::vector<SphereState>> sphere_centers(const PointMatrix& p, int frames,
                                                     const SphereBody& sb);

/// Parses and validates a body config; rejects violations with diagnostics
/// naming the failing marker or sphere.  Joint names resolve against `s`.
BodyModel load_body_config(const std::string& path, const Skeleton& s);
BodyModel body_from_json(const nlohmann::json& j, const Skeleton& s);
nlohmann::json body_to_json(const BodyModel& body, const Skeleton& s);

/// The 67-marker / 45-sphere model shipped with the library (bound to the
/// default skeleton).
const BodyModel& default_body();

}  // namespace physimetrics
