#pragma once

#include <string>

#include "physimetrics/bodymodel.hpp"
#include "physimetrics/motion_file.hpp"
#include "physimetrics/skeleton.hpp"

namespace physimetrics {

struct SynthParams {
  int frames = 10;
  double fps = 20.0;
  double speed = 0.012;   // walk-line: meters per frame along +x
  double gap = 0.5;       // two-person-approach: closest root distance, meters
  double offset_z = 0.0;  // vertical shift applied after ground placement
};

/// Root height that rests the body's lowest sphere surface exactly on z = 0
/// in the rest pose.
double ground_rest_height(const Skeleton& s, const SphereBody& sb);

/// Deterministic closed-form test clips (positions payload):
///   static              one person standing on the ground
///   walk-line           one person translating at constant speed along +x
///   two-person-approach two persons converging to `gap` apart on the x axis
/// Throws InvariantViolation for unknown kinds or bad params.
MotionFile synth_clip(const std::string& kind, const SynthParams& params,
                      const Skeleton& s, const SphereBody& sb);

}  // namespace physimetrics
