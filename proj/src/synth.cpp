#include "physimetrics/synth.hpp"

#include <algorithm>
#include <functional>
#include <limits>

#include "physimetrics/errors.hpp"

namespace physimetrics {

double ground_rest_height(const Skeleton& s, const SphereBody& sb) {
  const auto rest = s.rest_positions(Vec3::Zero());
  double z_min = std::numeric_limits<double>::infinity();
  for (const auto& sp : sb.spheres) {
    const Vec3 center = (1.0 - sp.t) * rest[sp.joint_a] + sp.t * rest[sp.joint_b];
    z_min = std::min(z_min, center.z() - sp.radius);
  }
  return -z_min;
}

namespace {

PointMatrix translated_rest(const Skeleton& s, int frames,
                            const std::function<Vec3(int)>& offset_at) {
  const auto rest = s.rest_positions(Vec3::Zero());
  const int J = s.joint_count();
  PointMatrix p(static_cast<Eigen::Index>(frames) * J, 3);
  for (int t = 0; t < frames; ++t) {
    const Vec3 off = offset_at(t);
    for (int j = 0; j < J; ++j) {
      p.row(flat_index(t, j, J)) = (rest[j] + off).transpose();
    }
  }
  return p;
}

}  // namespace

MotionFile synth_clip(const std::string& kind, const SynthParams& params,
                      const Skeleton& s, const SphereBody& sb) {
  if (params.frames < 2) {
    throw InvariantViolation("synth: need at least two frames");
  }
  if (!(params.fps > 0.0)) {
    throw InvariantViolation("synth: fps must be positive");
  }
  const double base_z = ground_rest_height(s, sb) + params.offset_z;

  if (kind == "static") {
    const PointMatrix p =
        translated_rest(s, params.frames, [&](int) { return Vec3(0, 0, base_z); });
    return motion_file_from_positions({p}, params.frames, params.fps, s.joint_count());
  }
  if (kind == "walk-line") {
    const PointMatrix p = translated_rest(s, params.frames, [&](int t) {
      return Vec3(params.speed * t, 0, base_z);
    });
    return motion_file_from_positions({p}, params.frames, params.fps, s.joint_count());
  }
  if (kind == "two-person-approach") {
    if (!(params.gap > 0.0)) {
      throw InvariantViolation("synth: gap must be positive");
    }
    // Root centers start gap + 1 m apart on the x axis and close linearly to
    // `gap` at the final frame.
    const int T = params.frames;
    auto half_distance = [&](int t) {
      const double extra = 1.0 * (1.0 - static_cast<double>(t) / (T - 1));
      return 0.5 * (params.gap + extra);
    };
    const PointMatrix pa = translated_rest(s, T, [&](int t) {
      return Vec3(-half_distance(t), 0, base_z);
    });
    const PointMatrix pb = translated_rest(s, T, [&](int t) {
      return Vec3(half_distance(t), 0, base_z);
    });
    return motion_file_from_positions({pa, pb}, T, params.fps, s.joint_count());
  }
  throw InvariantViolation("synth: unknown kind \"" + kind + "\"");
}

}  // namespace physimetrics
