#include "physimetrics/ik.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "physimetrics/errors.hpp"
#include "physimetrics/rotation.hpp"

namespace physimetrics {

namespace {

double frame_rms(const Eigen::VectorXd& residual, int joints) {
  return std::sqrt(residual.squaredNorm() / joints);
}

/// Re-projects every 6D block onto its orthonormalized frame.  Leaves the
/// decoded rotation unchanged; keeps the parameters well conditioned.
void reproject_rotations(const Skeleton& s, Eigen::VectorXd* params) {
  for (int j = 0; j < s.joint_count(); ++j) {
    auto block = params->segment<6>(3 + 6 * j);
    const Mat3 m = rot6d_to_matrix({block.head<3>(), block.tail<3>()});
    block.head<3>() = m.col(0);
    block.tail<3>() = m.col(1);
  }
}

}  // namespace

IkResult ik_fit(const Skeleton& s, const PointMatrix& targets, int frames, double fps,
                const IkConfig& config) {
  const int J = s.joint_count();
  if (frames < 1 || targets.rows() != static_cast<Eigen::Index>(frames) * J) {
    throw ShapeMismatch("ik_fit: target rows disagree with frames * joints");
  }
  if (!targets.allFinite()) {
    throw NonFinite("ik_fit: targets contain non-finite values");
  }

  const int dof = 3 + 6 * J;
  IkResult result;
  result.pose.joints = J;
  result.pose.fps = fps;
  result.pose.root_translation.resize(frames, 3);
  result.pose.local_rotation.resize(static_cast<Eigen::Index>(frames) * J, 6);
  result.residual_rms.resize(frames);

  Eigen::VectorXd params(dof);
  const Eigen::MatrixXd damping = config.damping * Eigen::MatrixXd::Identity(dof, dof);

  for (int t = 0; t < frames; ++t) {
    Eigen::VectorXd target(3 * J);
    for (int j = 0; j < J; ++j) {
      target.segment<3>(3 * j) = targets.row(flat_index(t, j, J)).transpose();
    }

    if (t == 0 || !config.warm_start) {
      // Rest initialization: identity rotations, root pinned on its target.
      params.setZero();
      for (int j = 0; j < J; ++j) {
        params.segment<6>(3 + 6 * j) << 1, 0, 0, 0, 1, 0;
      }
      params.head<3>() = target.segment<3>(3 * s.root_index());
    }
    // Otherwise the previous frame's solution carries over as the warm start.

    double rms = frame_rms(target - fk_frame(s, params), J);
    for (int iter = 0; iter < config.max_iterations; ++iter) {
      const Eigen::VectorXd residual = target - fk_frame(s, params);
      const Eigen::MatrixXd jac = fk_position_jacobian(s, params);
      const Eigen::MatrixXd normal = jac.transpose() * jac + damping;
      const Eigen::VectorXd step = normal.ldlt().solve(jac.transpose() * residual);

      // Backtrack when a full step overshoots; keeps the solve deterministic.
      double scale = 1.0;
      double new_rms = rms;
      Eigen::VectorXd candidate = params;
      for (int k = 0; k < 8; ++k) {
        candidate = params + scale * step;
        new_rms = frame_rms(target - fk_frame(s, candidate), J);
        if (new_rms <= rms) break;
        scale *= 0.5;
      }
      if (new_rms > rms) {
        break;  // no descent direction left; accept the current params
      }
      params = candidate;
      reproject_rotations(s, &params);
      const double improvement = rms - new_rms;
      rms = new_rms;
      if (improvement < config.tolerance) {
        break;
      }
    }

    result.pose.root_translation.row(t) = params.head<3>().transpose();
    for (int j = 0; j < J; ++j) {
      result.pose.local_rotation.row(flat_index(t, j, J)) =
          params.segment<6>(3 + 6 * j).transpose();
    }
    result.residual_rms[t] = rms;
  }
  return result;
}

}  // namespace physimetrics
