#pragma once

#include "physimetrics/rotation.hpp"
#include "physimetrics/skeleton.hpp"
#include "physimetrics/types.hpp"

namespace physimetrics {

/// Root trajectory plus per-joint local rotations for T frames.
struct PoseSequence {
  TranslationMatrix root_translation;  // Tx3, meters
  Rot6Matrix local_rotation;           // (T*J)x6
  double fps = 20.0;
  int joints = 0;

  int frames() const {
    return static_cast<int>(root_translation.rows());
  }

  Rotation6D rotation(int frame, int joint) const {
    return rot6d_from_row(local_rotation.row(flat_index(frame, joint, joints)));
  }
  void set_rotation(int frame, int joint, const Rotation6D& r) {
    local_rotation.row(flat_index(frame, joint, joints)) = rot6d_to_row(r);
  }

  /// T frames of identity rotations with the root pinned at `root`.
  static PoseSequence rest(const Skeleton& s, int frames, double fps,
                           const Vec3& root = Vec3::Zero());
};

/// Global joint positions, (T*J)x3.  Root position is the root translation;
/// children accumulate parent rotation times rest offset down the tree.
PointMatrix forward_kinematics(const Skeleton& s, const PoseSequence& pose);

/// Single-frame FK positions from a parameter vector [root_xyz, 6D per joint]
/// of size 3 + 6J.  Used by the fitter and the Jacobian.
Eigen::VectorXd fk_frame(const Skeleton& s, const Eigen::VectorXd& params);

/// Analytic Jacobian of all joint positions w.r.t. the frame parameters.
/// Rows: 3 per joint in joint order.  Columns: [root translation (3) |
/// joint 0 rot6d (6) | joint 1 rot6d (6) | ...], total 6J + 3.
Eigen::MatrixXd fk_position_jacobian(const Skeleton& s, const Eigen::VectorXd& params);

/// Per-frame parent->child segment lengths, Tx(J-1), bones ordered as
/// Skeleton::bone_joints().
Eigen::MatrixXd bone_lengths(const Skeleton& s, const PointMatrix& positions, int frames);

}  // namespace physimetrics
