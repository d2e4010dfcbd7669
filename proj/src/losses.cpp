#include "physimetrics/losses.hpp"

#include <cmath>

#include "physimetrics/errors.hpp"

namespace physimetrics {

void LossConfig::validate() const {
  if (!(mi_contact_threshold > 0.0) || !(mi_range_threshold > 0.0) ||
      !(foot_height_threshold > 0.0)) {
    throw InvariantViolation("loss config: thresholds must be positive");
  }
  if (!(mi_contact_threshold < mi_range_threshold)) {
    throw InvariantViolation("loss config: contact threshold must be below range threshold");
  }
}

namespace {

void check_same_shape(const MotionRep& pred, const MotionRep& gt) {
  if (pred.joints != gt.joints || pred.p.rows() != gt.p.rows() ||
      pred.v.rows() != gt.v.rows() || pred.r.rows() != gt.r.rows()) {
    throw ShapeMismatch("loss: pred and gt shapes disagree");
  }
}

/// FK of the rotation component with the root pinned to the position
/// component's root joint.
PointMatrix fk_of_rotations(const MotionRep& rep, const Skeleton& s) {
  PoseSequence pose;
  pose.joints = rep.joints;
  pose.fps = rep.fps;
  pose.local_rotation = rep.r;
  const int T = rep.frames();
  pose.root_translation.resize(T, 3);
  for (int t = 0; t < T; ++t) {
    pose.root_translation.row(t) = rep.p.row(flat_index(t, s.root_index(), rep.joints));
  }
  return forward_kinematics(s, pose);
}

}  // namespace

double simple_loss(const MotionRep& pred, const MotionRep& gt) {
  check_same_shape(pred, gt);
  const double elements = static_cast<double>(pred.p.size() + pred.v.size() + pred.r.size());
  const double sum = (pred.p - gt.p).squaredNorm() + (pred.v - gt.v).squaredNorm() +
                     (pred.r - gt.r).squaredNorm();
  return sum / elements;
}

double mc_loss(const MotionRep& pred, const MotionRep& gt, const Skeleton& s,
               const LossConfig& cfg) {
  check_same_shape(pred, gt);
  if (pred.joints != s.joint_count()) {
    throw ShapeMismatch("mc_loss: skeleton does not match representation");
  }
  const int T = pred.frames();
  const int J = pred.joints;
  if (T < 2) {
    throw TooShort("mc_loss: need at least two frames");
  }
  const bool anchored = cfg.mc_mode == McMode::kGtAnchored;

  // Velocity term: anchor velocities against predicted position differences
  // over the first T-1 frames.
  const auto rows = static_cast<Eigen::Index>(T - 1) * J;
  const PointMatrix diff = pred.p.bottomRows(rows) - pred.p.topRows(rows);
  const auto& v_anchor = anchored ? gt.v : pred.v;
  const double term_v =
      (v_anchor.topRows(rows) - diff).squaredNorm() / static_cast<double>(rows * 3);

  // Position term: anchor positions against FK of the predicted rotations.
  const PointMatrix fk = fk_of_rotations(pred, s);
  const auto& p_anchor = anchored ? gt.p : pred.p;
  const double term_p = (p_anchor - fk).squaredNorm() / static_cast<double>(fk.size());

  return term_v + term_p;
}

double mi_loss(const PointMatrix& pred_a, const PointMatrix& pred_b,
               const PointMatrix& gt_a, const PointMatrix& gt_b, int frames,
               const LossConfig& cfg) {
  cfg.validate();
  if (pred_a.rows() != pred_b.rows() || pred_a.rows() != gt_a.rows() ||
      pred_a.rows() != gt_b.rows()) {
    throw ShapeMismatch("mi_loss: marker trajectory shapes disagree");
  }
  if (frames < 1 || pred_a.rows() % frames != 0) {
    throw ShapeMismatch("mi_loss: rows not divisible by frames");
  }
  const Eigen::Index M = pred_a.rows() / frames;

  double contact_term = 0.0;
  double range_term = 0.0;
  for (int t = 0; t < frames; ++t) {
    const auto base = static_cast<Eigen::Index>(t) * M;
    for (Eigen::Index i = 0; i < M; ++i) {
      for (Eigen::Index j = 0; j < M; ++j) {
        const double d_pred = (pred_a.row(base + i) - pred_b.row(base + j)).norm();
        const double d_gt = (gt_a.row(base + i) - gt_b.row(base + j)).norm();
        if (d_gt < cfg.mi_contact_threshold) {
          contact_term += d_pred * d_pred;
        }
        const double mask_d = cfg.mi_mask_on_gt ? d_gt : d_pred;
        if (mask_d < cfg.mi_range_threshold) {
          const double e = d_pred - d_gt;
          range_term += e * e;
        }
      }
    }
  }
  // Masked-out entries contribute zero but stay in the denominator.
  const double entries = static_cast<double>(frames) * M * M;
  return contact_term / entries + range_term / entries;
}

double velocity_loss(const MotionRep& pred, const MotionRep& gt) {
  check_same_shape(pred, gt);
  return (pred.v - gt.v).squaredNorm() / static_cast<double>(pred.v.size());
}

double foot_contact_loss(const MotionRep& pred, const MotionRep& gt, const Skeleton& s,
                         const LossConfig& cfg) {
  check_same_shape(pred, gt);
  if (pred.joints != s.joint_count()) {
    throw ShapeMismatch("foot_contact_loss: skeleton does not match representation");
  }
  const int feet[2] = {s.left_foot_index(), s.right_foot_index()};
  const int T = pred.frames();
  double sum = 0.0;
  long contact_elements = 0;
  for (int t = 0; t < T; ++t) {
    for (int foot : feet) {
      const auto row = flat_index(t, foot, pred.joints);
      if (gt.p(row, 2) < cfg.foot_height_threshold) {
        sum += pred.v.row(row).squaredNorm();
        contact_elements += 3;
      }
    }
  }
  return contact_elements == 0 ? 0.0 : sum / static_cast<double>(contact_elements);
}

double bone_length_loss(const PointMatrix& pred_p, const PointMatrix& gt_p, int frames,
                        const Skeleton& s) {
  if (pred_p.rows() != gt_p.rows()) {
    throw ShapeMismatch("bone_length_loss: position shapes disagree");
  }
  const Eigen::MatrixXd pred_len = bone_lengths(s, pred_p, frames);
  const Eigen::MatrixXd gt_len = bone_lengths(s, gt_p, frames);
  return (pred_len - gt_len).squaredNorm() / static_cast<double>(pred_len.size());
}

double wrap_angle(double radians) {
  const double two_pi = 2.0 * M_PI;
  double a = std::fmod(radians, two_pi);
  if (a <= -M_PI) a += two_pi;
  if (a > M_PI) a -= two_pi;
  return a;
}

double yaw_of(const Mat3& m) {
  return std::atan2(m(1, 0), m(0, 0));
}

double relative_orientation_loss(const InteractionClip& pred, const InteractionClip& gt,
                                 const Skeleton& s) {
  if (pred.persons.size() != 2 || gt.persons.size() != 2) {
    throw ShapeMismatch("relative_orientation_loss: expected exactly two persons");
  }
  pred.validate();
  gt.validate();
  const int T = pred.frames();
  if (T != gt.frames()) {
    throw ShapeMismatch("relative_orientation_loss: pred and gt frame counts disagree");
  }
  const int root = s.root_index();
  auto relative_yaw = [&](const InteractionClip& clip, int t) {
    const int J = clip.persons[0].joints;
    const Mat3 ra =
        rot6d_to_matrix(rot6d_from_row(clip.persons[0].r.row(flat_index(t, root, J))));
    const Mat3 rb =
        rot6d_to_matrix(rot6d_from_row(clip.persons[1].r.row(flat_index(t, root, J))));
    return wrap_angle(yaw_of(ra) - yaw_of(rb));
  };
  double sum = 0.0;
  for (int t = 0; t < T; ++t) {
    const double e = wrap_angle(relative_yaw(pred, t) - relative_yaw(gt, t));
    sum += e * e;
  }
  return sum / static_cast<double>(T);
}

Eigen::VectorXd finite_diff_grad(const std::function<double(const Eigen::VectorXd&)>& f,
                                 const Eigen::VectorXd& x0, double step) {
  Eigen::VectorXd grad(x0.size());
  Eigen::VectorXd x = x0;
  for (Eigen::Index i = 0; i < x0.size(); ++i) {
    x[i] = x0[i] + step;
    const double hi = f(x);
    x[i] = x0[i] - step;
    const double lo = f(x);
    x[i] = x0[i];
    grad[i] = (hi - lo) / (2.0 * step);
  }
  return grad;
}

}  // namespace physimetrics
