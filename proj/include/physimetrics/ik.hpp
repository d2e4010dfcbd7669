#pragma once

#include "physimetrics/kinematics.hpp"

namespace physimetrics {

struct IkConfig {
  int max_iterations = 200;
  double damping = 1e-4;        // Gauss-Newton damping lambda
  double tolerance = 1e-7;      // stop when RMS improvement drops below, meters
  bool warm_start = true;       // initialize each frame from the previous one
};

struct IkResult {
  PoseSequence pose;
  Eigen::VectorXd residual_rms;  // per-frame RMS position error, meters
};

/// Fits root translation and 6D local rotations to target joint positions by
/// damped Gauss-Newton on the position residual.  Deterministic for a fixed
/// config.  Targets are (T*J)x3; throws NonFinite on bad input.
IkResult ik_fit(const Skeleton& s, const PointMatrix& targets, int frames,
                double fps, const IkConfig& config = {});

}  // namespace physimetrics
