#pragma once

#include <cmath>
#include <random>

#include <Eigen/Geometry>

#include "physimetrics/kinematics.hpp"
#include "physimetrics/representation.hpp"
#include "physimetrics/rotation.hpp"
#include "physimetrics/skeleton.hpp"

namespace pmtest {

using namespace physimetrics;

/// root -> a -> b chain with unit offsets along +x.
inline Skeleton toy_chain3() {
  return Skeleton({"root", "a", "b"}, {Skeleton::kNoParent, 0, 1},
                  {Vec3::Zero(), Vec3(1, 0, 0), Vec3(1, 0, 0)}, 0, 2, 2);
}

/// Single-joint skeleton for scalar-level loss toys.
inline Skeleton toy_single() {
  return Skeleton({"root"}, {Skeleton::kNoParent}, {Vec3::Zero()}, 0, 0, 0);
}

inline Mat3 rot_z(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat3 m;
  m << c, -s, 0, s, c, 0, 0, 0, 1;
  return m;
}

inline Mat3 rot_x(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat3 m;
  m << 1, 0, 0, 0, c, -s, 0, s, c;
  return m;
}

/// Uniform random rotation via quaternion sampling.
inline Mat3 random_rotation(std::mt19937& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Vector4d q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Mat3 m;
  m << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
       2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
       2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return m;
}

/// Rotation about a random axis with angle uniform in [-max_angle, max_angle].
inline Mat3 random_bounded_rotation(std::mt19937& rng, double max_angle) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(-max_angle, max_angle);
  Vec3 axis(n(rng), n(rng), n(rng));
  axis.normalize();
  const double angle = u(rng);
  return Eigen::AngleAxisd(angle, axis).toRotationMatrix();
}

/// Random pose with per-joint rotations bounded by max_angle radians.
inline PoseSequence random_pose(const Skeleton& s, int frames, double max_angle,
                                std::mt19937& rng, double fps = 20.0,
                                double root_walk = 0.02) {
  PoseSequence pose;
  pose.joints = s.joint_count();
  pose.fps = fps;
  pose.root_translation.resize(frames, 3);
  pose.local_rotation.resize(static_cast<Eigen::Index>(frames) * pose.joints, 6);
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 root(0.1 * n(rng), 0.1 * n(rng), 1.0 + 0.1 * n(rng));
  for (int t = 0; t < frames; ++t) {
    root += root_walk * Vec3(n(rng), n(rng), n(rng));
    pose.root_translation.row(t) = root.transpose();
    for (int j = 0; j < pose.joints; ++j) {
      pose.set_rotation(t, j, matrix_to_rot6d(random_bounded_rotation(rng, max_angle)));
    }
  }
  return pose;
}

/// Applies one rigid motion to every frame of a representation: positions
/// and velocities rotate (positions also translate), the root rotation is
/// premultiplied, and other local rotations ride along unchanged.
inline MotionRep apply_rigid(const MotionRep& rep, const Skeleton& s, const Mat3& rot,
                             const Vec3& trans) {
  MotionRep out = rep;
  for (Eigen::Index i = 0; i < rep.p.rows(); ++i) {
    out.p.row(i) = (rot * Vec3(rep.p.row(i).transpose()) + trans).transpose();
    out.v.row(i) = (rot * Vec3(rep.v.row(i).transpose())).transpose();
  }
  const int J = rep.joints;
  for (int t = 0; t < rep.frames(); ++t) {
    const auto row = flat_index(t, s.root_index(), J);
    const Mat3 m = rot6d_to_matrix(rot6d_from_row(rep.r.row(row)));
    out.r.row(row) = rot6d_to_row(matrix_to_rot6d(rot * m));
  }
  return out;
}

}  // namespace pmtest
