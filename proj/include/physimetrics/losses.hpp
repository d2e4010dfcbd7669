#pragma once

#include <functional>

#include "physimetrics/representation.hpp"
#include "physimetrics/skeleton.hpp"
#include "physimetrics/types.hpp"

namespace physimetrics {

enum class McMode {
  kGtAnchored,  // velocity and position anchors come from the ground truth
  kInternal,    // pure self-consistency within the prediction
};

struct LossConfig {
  McMode mc_mode = McMode::kGtAnchored;
  double mi_contact_threshold = 0.1;  // meters
  double mi_range_threshold = 1.0;    // meters
  double foot_height_threshold = 0.05;  // meters
  bool mi_mask_on_gt = false;  // second MI term masks on the gt map instead

  /// Throws InvariantViolation unless thresholds are positive and
  /// contact < range.
  void validate() const;
};

/// Mean squared error over all 12*J*T elements of the representation.
double simple_loss(const MotionRep& pred, const MotionRep& gt);

/// Motion consistency: velocity-vs-position differencing plus position-vs-FK
/// of the rotations.  Each term is a mean over its contributing elements;
/// terms are summed.  gt-anchored mode anchors both terms on gt; internal
/// mode uses pred's own components.
double mc_loss(const MotionRep& pred, const MotionRep& gt, const Skeleton& s,
               const LossConfig& cfg = {});

/// Marker-based interaction loss on 67x67 pairwise distance maps between two
/// persons.  Term 1 penalizes predicted distance where gt is in contact
/// (< contact threshold); term 2 aligns predicted with gt distances inside
/// the range threshold.  Masked-out entries stay in the denominator.
/// Marker trajectories are (T*67)x3.
double mi_loss(const PointMatrix& pred_a, const PointMatrix& pred_b,
               const PointMatrix& gt_a, const PointMatrix& gt_b, int frames,
               const LossConfig& cfg = {});

/// Mean squared error between the velocity components.
double velocity_loss(const MotionRep& pred, const MotionRep& gt);

/// Mean squared predicted foot velocity over frames where the gt foot height
/// is below the threshold; 0 when no foot is in contact.
double foot_contact_loss(const MotionRep& pred, const MotionRep& gt, const Skeleton& s,
                         const LossConfig& cfg = {});

/// Mean squared difference of per-bone lengths.  Positions are (T*J)x3.
double bone_length_loss(const PointMatrix& pred_p, const PointMatrix& gt_p, int frames,
                        const Skeleton& s);

/// Mean squared wrapped difference of the two-person relative facing angle
/// (yaw of the root rotation), radians^2.  Requires exactly two persons.
double relative_orientation_loss(const InteractionClip& pred, const InteractionClip& gt,
                                 const Skeleton& s);

/// Central-difference gradient of a scalar function, element by element.
Eigen::VectorXd finite_diff_grad(const std::function<double(const Eigen::VectorXd&)>& f,
                                 const Eigen::VectorXd& x0, double step);

/// Wrap an angle to (-pi, pi].
double wrap_angle(double radians);

/// Yaw (ground-plane facing angle) of a rotation matrix, radians.
double yaw_of(const Mat3& m);

}  // namespace physimetrics
