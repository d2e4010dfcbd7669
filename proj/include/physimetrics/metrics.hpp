#pragma once

#include <optional>

#include "physimetrics/bodymodel.hpp"
#include "physimetrics/representation.hpp"
#include "physimetrics/skeleton.hpp"
#include "physimetrics/types.hpp"

namespace physimetrics {

/// Ground plane orthogonal to the canonical z up-axis.
struct GroundPlane {
  double height = 0.0;  // meters
};

struct GroundContact {
  double penetration_mm = 0.0;
  double float_mm = 0.0;
  double foot_contact_mm = 0.0;  // penetration + float
};

/// All physical metrics for a clip or dataset.
struct MetricsReport {
  double penetration_mm = 0.0;
  double float_mm = 0.0;
  double foot_contact_mm = 0.0;
  double skate_cm_s = 0.0;
  double pfc = 0.0;
  std::optional<double> interpenetration_cm3;  // multi-person only
  std::optional<double> mpjpe_mm;              // representation payloads only
  std::optional<double> fid_star;              // dataset-level only
  long frames = 0;
  int persons = 0;
  int clips = 1;
};

/// Per frame, z_min is the lowest sphere surface point relative to the
/// ground.  Penetration averages max(0, -z_min), float averages
/// max(0, z_min); both reported in millimeters.
GroundContact ground_contact_metrics(const PointMatrix& positions, int frames,
                                     const SphereBody& sb, const GroundPlane& g = {});

/// Mean horizontal center speed (cm/s) over all (sphere, frame) pairs whose
/// sphere surface is within contact_eps of the ground; 0 with no contacts.
double skate(const PointMatrix& positions, int frames, const SphereBody& sb,
             const GroundPlane& g, double fps, double contact_eps = 0.005);

/// Frame-wise product of horizontal foot speeds and root acceleration
/// magnitude, averaged over frames and scaled by 100.  Velocities by central
/// differences in m/s, acceleration in m/s^2.  Requires T >= 3.
double pfc(const PointMatrix& positions, int frames, const Skeleton& s, double fps);

/// Exact sphere-sphere intersection volume in cubic meters (lens formula;
/// containment and disjoint cases handled).
double sphere_overlap_volume(const Vec3& c1, double r1, const Vec3& c2, double r2);

/// Mean over frames of the summed cross-person sphere overlap volume,
/// reported in cm^3.  Throws SinglePerson if the clip has fewer than two.
double interpenetration(const InteractionClip& clip, const SphereBody& sb);

/// Frechet distance between Gaussian fits of two feature sets (rows =
/// samples).  Uses sample covariance; the matrix square root comes from a
/// symmetric eigendecomposition with tiny negative eigenvalues clamped.
/// Throws RankDeficient when regularization cannot rescue a degenerate pair.
double frechet_gaussian_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Per-frame 66-dim features: flattened global joint positions.
Eigen::MatrixXd position_features(const PointMatrix& positions, int frames,
                                  bool root_centered = false, int root_index = 0);

/// FID* on raw joint positions: frechet_gaussian_distance over 66-dim frames.
double fid_star(const Eigen::MatrixXd& features_a, const Eigen::MatrixXd& features_b);

/// Runs all applicable metrics for one clip: ground contact, skate, and PFC
/// averaged across persons, interpenetration when N >= 2, pos/rot MPJPE when
/// rotations are meaningful (rep payloads).  fps <= 0 uses the clip's rate.
MetricsReport evaluate_clip(const InteractionClip& clip, const Skeleton& s,
                            const BodyModel& body, const GroundPlane& g = {},
                            double fps = 0.0, bool with_mpjpe = true,
                            double contact_eps = 0.005);

}  // namespace physimetrics
