#include "physimetrics/representation.hpp"

#include <algorithm>
#include <cmath>

#include "physimetrics/errors.hpp"

namespace physimetrics {

void InteractionClip::validate() const {
  if (persons.empty()) {
    throw ShapeMismatch("clip has no persons");
  }
  const int T = persons.front().frames();
  const double rate = persons.front().fps;
  for (const auto& person : persons) {
    if (person.frames() != T || person.fps != rate) {
      throw ShapeMismatch("clip persons disagree on frames or fps");
    }
  }
}

PointMatrix compute_velocity(const PointMatrix& p, int frames) {
  if (frames < 2) {
    throw TooShort("compute_velocity: need at least two frames");
  }
  if (p.rows() % frames != 0) {
    throw ShapeMismatch("compute_velocity: rows not divisible by frames");
  }
  const Eigen::Index J = p.rows() / frames;
  PointMatrix v(p.rows(), 3);
  v.topRows((frames - 1) * J) = p.bottomRows((frames - 1) * J) - p.topRows((frames - 1) * J);
  // Final frame padded by repeating the last difference.
  v.bottomRows(J) = v.middleRows((frames - 2) * J, J);
  return v;
}

MotionRep assemble_rep(const PointMatrix& p, const PointMatrix& v, const Rot6Matrix& r,
                       double fps, int frames) {
  if (frames < 2) {
    throw TooShort("assemble_rep: need at least two frames");
  }
  if (p.rows() != v.rows() || p.rows() != r.rows()) {
    throw ShapeMismatch("assemble_rep: component row counts disagree");
  }
  if (p.rows() != static_cast<Eigen::Index>(frames) * MotionRep::kCanonicalJoints) {
    throw ShapeMismatch("assemble_rep: expected 22 joints per frame");
  }
  if (!(fps > 0.0)) {
    throw InvariantViolation("assemble_rep: fps must be positive");
  }
  MotionRep rep;
  rep.p = p;
  rep.v = v;
  rep.r = r;
  rep.fps = fps;
  rep.joints = MotionRep::kCanonicalJoints;
  return rep;
}

RepComponents split_rep(const MotionRep& rep) {
  return {rep.p, rep.v, rep.r};
}

Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> flatten_rep(
    const MotionRep& rep) {
  const int T = rep.frames();
  const int J = rep.joints;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> flat(T, 12 * J);
  for (int t = 0; t < T; ++t) {
    for (int j = 0; j < J; ++j) {
      const auto row = flat_index(t, j, J);
      flat.block<1, 3>(t, 3 * j) = rep.p.row(row);
      flat.block<1, 3>(t, 3 * J + 3 * j) = rep.v.row(row);
      flat.block<1, 6>(t, 6 * J + 6 * j) = rep.r.row(row);
    }
  }
  return flat;
}

MotionRep unflatten_rep(
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>& flat,
    double fps, int joints) {
  if (flat.cols() != 12 * joints) {
    throw ShapeMismatch("unflatten_rep: row width disagrees with joint count");
  }
  const int T = static_cast<int>(flat.rows());
  MotionRep rep;
  rep.joints = joints;
  rep.fps = fps;
  rep.p.resize(static_cast<Eigen::Index>(T) * joints, 3);
  rep.v.resize(static_cast<Eigen::Index>(T) * joints, 3);
  rep.r.resize(static_cast<Eigen::Index>(T) * joints, 6);
  for (int t = 0; t < T; ++t) {
    for (int j = 0; j < joints; ++j) {
      const auto row = flat_index(t, j, joints);
      rep.p.row(row) = flat.block<1, 3>(t, 3 * j);
      rep.v.row(row) = flat.block<1, 3>(t, 3 * joints + 3 * j);
      rep.r.row(row) = flat.block<1, 6>(t, 6 * joints + 6 * j);
    }
  }
  return rep;
}

MotionRep rep_from_motion(const Skeleton& s, const PoseSequence& pose) {
  MotionRep rep;
  rep.joints = s.joint_count();
  rep.fps = pose.fps;
  rep.p = forward_kinematics(s, pose);
  rep.v = compute_velocity(rep.p, pose.frames());
  rep.r = pose.local_rotation;
  return rep;
}

double pos_rot_mpjpe(const MotionRep& rep, const Skeleton& s) {
  if (rep.joints != s.joint_count()) {
    throw ShapeMismatch("pos_rot_mpjpe: joint counts disagree");
  }
  const int T = rep.frames();
  const int J = rep.joints;
  PoseSequence pose;
  pose.joints = J;
  pose.fps = rep.fps;
  pose.local_rotation = rep.r;
  pose.root_translation.resize(T, 3);
  for (int t = 0; t < T; ++t) {
    pose.root_translation.row(t) = rep.p.row(flat_index(t, s.root_index(), J));
  }
  const PointMatrix fk = forward_kinematics(s, pose);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < fk.rows(); ++i) {
    sum += (rep.p.row(i) - fk.row(i)).norm();
  }
  return 1000.0 * sum / static_cast<double>(fk.rows());
}

std::vector<Violation> validate_rep(const MotionRep& rep, const Skeleton& s,
                                    const ValidateTolerances& tol) {
  std::vector<Violation> out;

  if (rep.joints != MotionRep::kCanonicalJoints || rep.joints != s.joint_count()) {
    out.push_back({"rep", "shape",
                   "expected the canonical 22-joint layout matching the skeleton",
                   static_cast<double>(rep.joints)});
    return out;
  }
  const int T = rep.frames();
  const int J = rep.joints;
  const auto rows = static_cast<Eigen::Index>(T) * J;
  if (T < 2 || rep.p.rows() != rows || rep.v.rows() != rows || rep.r.rows() != rows) {
    out.push_back({"rep", "shape", "component shapes disagree with frames * joints",
                   static_cast<double>(T)});
    return out;
  }

  if (!rep.p.allFinite()) out.push_back({"p", "finite", "positions contain non-finite values", 0.0});
  if (!rep.v.allFinite()) out.push_back({"v", "finite", "velocities contain non-finite values", 0.0});
  if (!rep.r.allFinite()) out.push_back({"r", "finite", "rotations contain non-finite values", 0.0});
  if (!out.empty()) return out;  // downstream numbers would be meaningless

  // Velocity consistency: stored v against position differences.
  double residual = 0.0;
  for (int t = 0; t + 1 < T; ++t) {
    for (int j = 0; j < J; ++j) {
      const Vec3 dp = rep.p.row(flat_index(t + 1, j, J)) - rep.p.row(flat_index(t, j, J));
      residual += (Vec3(rep.v.row(flat_index(t, j, J)).transpose()) - dp).squaredNorm();
    }
  }
  residual /= static_cast<double>(T - 1) * J;
  if (residual > tol.velocity_residual) {
    out.push_back({"v", "velocity_consistency",
                   "stored velocities disagree with position differences", residual});
  }

  double mpjpe = 0.0;
  bool rot_ok = true;
  try {
    mpjpe = pos_rot_mpjpe(rep, s);
  } catch (const DegenerateRotation&) {
    rot_ok = false;
    out.push_back({"r", "degenerate", "rotation component cannot be orthonormalized", 0.0});
  }
  if (rot_ok && mpjpe > tol.mpjpe_mm) {
    out.push_back({"rep", "pos_rot_mpjpe",
                   "position and rotation components describe different motions", mpjpe});
  }

  const Eigen::MatrixXd lengths = bone_lengths(s, rep.p, T);
  double worst = 0.0;
  for (Eigen::Index b = 0; b < lengths.cols(); ++b) {
    const double rest = s.rest_offset(s.bone_joints()[b]).norm();
    const double dev = (lengths.col(b).array() - rest).abs().maxCoeff();
    worst = std::max(worst, dev);
  }
  if (worst > tol.bone_deviation) {
    out.push_back({"p", "bone_length", "bone lengths deviate from the skeleton", worst});
  }

  return out;
}

}  // namespace physimetrics
