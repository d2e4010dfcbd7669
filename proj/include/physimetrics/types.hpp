#pragma once

#include <Eigen/Core>

namespace physimetrics {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Joint positions for a sequence, stored as (T*J)x3 row-major so the memory
/// layout is exactly a C-order (T, J, 3) array.  Row t*J + j is joint j at
/// frame t.
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

/// 6D rotations for a sequence, (T*J)x6 row-major; each row is [ax ay az bx by bz].
using Rot6Matrix = Eigen::Matrix<double, Eigen::Dynamic, 6, Eigen::RowMajor>;

/// Root trajectory, Tx3 row-major.
using TranslationMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

inline Eigen::Index flat_index(int frame, int joint, int joint_count) {
  return static_cast<Eigen::Index>(frame) * joint_count + joint;
}

}  // namespace physimetrics
