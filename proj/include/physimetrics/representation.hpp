#pragma once

#include <optional>
#include <string>
#include <vector>

#include "physimetrics/kinematics.hpp"
#include "physimetrics/skeleton.hpp"
#include "physimetrics/types.hpp"

namespace physimetrics {

/// Per-person motion: global positions p, per-frame velocities v, and 6D
/// local rotations r.  The canonical layout uses 22 joints, giving a
/// flattened frame width of 22*3 + 22*3 + 22*6 = 264.  Loss helpers also
/// accept reduced joint counts for toy constructions; the canonical width is
/// enforced at assembly and file boundaries.
struct MotionRep {
  PointMatrix p;   // (T*J)x3, meters
  PointMatrix v;   // (T*J)x3, meters/frame
  Rot6Matrix r;    // (T*J)x6
  double fps = 20.0;
  int joints = 22;

  static constexpr int kCanonicalJoints = 22;
  static constexpr int kFrameWidth = 264;

  int frames() const {
    return joints > 0 ? static_cast<int>(p.rows()) / joints : 0;
  }
  int frame_width() const { return joints * 12; }
};

/// N persons sharing a timeline and frame rate.
struct InteractionClip {
  std::vector<MotionRep> persons;
  std::optional<std::string> text;

  int frames() const { return persons.empty() ? 0 : persons.front().frames(); }
  double fps() const { return persons.empty() ? 0.0 : persons.front().fps; }

  /// Throws ShapeMismatch unless N >= 1 and all persons share T and fps.
  void validate() const;
};

/// v[t] = p[t+1] - p[t], final frame padded by repetition.  Throws TooShort
/// if T < 2.
PointMatrix compute_velocity(const PointMatrix& p, int frames);

/// Bundles components into the canonical 22-joint representation; throws
/// ShapeMismatch unless all shapes agree and rows/frames == 22.
MotionRep assemble_rep(const PointMatrix& p, const PointMatrix& v, const Rot6Matrix& r,
                       double fps, int frames);

struct RepComponents {
  PointMatrix p;
  PointMatrix v;
  Rot6Matrix r;
};

/// Inverse of assemble_rep; the round trip is bit-exact.
RepComponents split_rep(const MotionRep& rep);

/// Flattens to Tx264 rows laid out [p | v | r], joints in skeleton order.
Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> flatten_rep(
    const MotionRep& rep);

/// Rebuilds a MotionRep from Tx(12J) flattened rows.
MotionRep unflatten_rep(
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>& flat,
    double fps, int joints = MotionRep::kCanonicalJoints);

/// Derives the representation from a pose: p by forward kinematics, v by
/// differencing, r copied.  The output is self-consistent by construction.
MotionRep rep_from_motion(const Skeleton& s, const PoseSequence& pose);

/// Mean joint distance in millimeters between the position component and FK
/// of the rotation component (root translation taken from the position
/// component's root joint).
double pos_rot_mpjpe(const MotionRep& rep, const Skeleton& s);

struct Violation {
  std::string component;  // "p", "v", "r", or "rep"
  std::string kind;       // "finite", "shape", "velocity_consistency", ...
  std::string message;
  double value = 0.0;
};

struct ValidateTolerances {
  double velocity_residual = 1e-8;  // mean squared v vs delta-p, m^2
  double mpjpe_mm = 50.0;           // pos/rot disagreement threshold
  double bone_deviation = 1e-3;     // max |bone length - rest length|, m
};

/// Reports finiteness, shape, velocity-consistency, pos/rot MPJPE, and
/// bone-length deviations.  Violations are data, not errors; an empty list
/// means the representation is valid.
std::vector<Violation> validate_rep(const MotionRep& rep, const Skeleton& s,
                                    const ValidateTolerances& tol = {});

}  // namespace physimetrics
