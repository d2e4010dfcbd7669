#include "physimetrics/kinematics.hpp"

#include <vector>

#include "physimetrics/errors.hpp"

namespace physimetrics {

PoseSequence PoseSequence::rest(const Skeleton& s, int frames, double fps, const Vec3& root) {
  PoseSequence pose;
  pose.joints = s.joint_count();
  pose.fps = fps;
  pose.root_translation.resize(frames, 3);
  pose.local_rotation.resize(static_cast<Eigen::Index>(frames) * pose.joints, 6);
  const auto identity = rot6d_to_row(Rotation6D::identity());
  for (int t = 0; t < frames; ++t) {
    pose.root_translation.row(t) = root.transpose();
    for (int j = 0; j < pose.joints; ++j) {
      pose.local_rotation.row(flat_index(t, j, pose.joints)) = identity;
    }
  }
  return pose;
}

namespace {

void check_pose(const Skeleton& s, const PoseSequence& pose) {
  if (pose.joints != s.joint_count()) {
    throw ShapeMismatch("pose joint count does not match skeleton");
  }
  if (pose.frames() < 1) {
    throw ShapeMismatch("pose has no frames");
  }
  if (pose.local_rotation.rows() !=
      static_cast<Eigen::Index>(pose.frames()) * pose.joints) {
    throw ShapeMismatch("pose rotation rows disagree with frames * joints");
  }
}

}  // namespace

PointMatrix forward_kinematics(const Skeleton& s, const PoseSequence& pose) {
  check_pose(s, pose);
  const int T = pose.frames();
  const int J = s.joint_count();
  PointMatrix out(static_cast<Eigen::Index>(T) * J, 3);
  std::vector<Mat3> global_rot(J);
  std::vector<Vec3> global_pos(J);
  for (int t = 0; t < T; ++t) {
    for (int j : s.topological_order()) {
      const Mat3 local = rot6d_to_matrix(pose.rotation(t, j));
      const int par = s.parent(j);
      if (par == Skeleton::kNoParent) {
        global_rot[j] = local;
        global_pos[j] = pose.root_translation.row(t).transpose();
      } else {
        global_pos[j] = global_pos[par] + global_rot[par] * s.rest_offset(j);
        global_rot[j] = global_rot[par] * local;
      }
      out.row(flat_index(t, j, J)) = global_pos[j].transpose();
    }
  }
  return out;
}

namespace {

struct FrameState {
  std::vector<Mat3> local;
  std::vector<Mat3> global;
  std::vector<Vec3> pos;
};

FrameState eval_frame(const Skeleton& s, const Eigen::VectorXd& params) {
  const int J = s.joint_count();
  if (params.size() != 3 + 6 * J) {
    throw ShapeMismatch("frame parameter vector must have 3 + 6J entries");
  }
  FrameState st;
  st.local.resize(J);
  st.global.resize(J);
  st.pos.resize(J);
  const Vec3 root_t = params.head<3>();
  for (int j : s.topological_order()) {
    const auto block = params.segment<6>(3 + 6 * j);
    st.local[j] = rot6d_to_matrix({block.head<3>(), block.tail<3>()});
    const int par = s.parent(j);
    if (par == Skeleton::kNoParent) {
      st.global[j] = st.local[j];
      st.pos[j] = root_t;
    } else {
      st.pos[j] = st.pos[par] + st.global[par] * s.rest_offset(j);
      st.global[j] = st.global[par] * st.local[j];
    }
  }
  return st;
}

}  // namespace

Eigen::VectorXd fk_frame(const Skeleton& s, const Eigen::VectorXd& params) {
  const FrameState st = eval_frame(s, params);
  const int J = s.joint_count();
  Eigen::VectorXd out(3 * J);
  for (int j = 0; j < J; ++j) {
    out.segment<3>(3 * j) = st.pos[j];
  }
  return out;
}

Eigen::MatrixXd fk_position_jacobian(const Skeleton& s, const Eigen::VectorXd& params) {
  const int J = s.joint_count();
  const FrameState st = eval_frame(s, params);
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(3 * J, 6 * J + 3);

  // Root translation moves every joint one-for-one.
  for (int j = 0; j < J; ++j) {
    jac.block<3, 3>(3 * j, 0).setIdentity();
  }

  // For each joint k, propagate d(global rotation)/d(theta_k) and
  // d(position)/d(theta_k) down k's subtree.  Positions of joints outside
  // the subtree (and of k itself) do not depend on theta_k.
  std::vector<Mat3> dglobal(J);
  std::vector<Vec3> dpos(J);
  std::vector<char> in_subtree(J);
  for (int k = 0; k < J; ++k) {
    const auto block = params.segment<6>(3 + 6 * k);
    const Rot6dJacobian dlocal = rot6d_to_matrix_jacobian({block.head<3>(), block.tail<3>()});
    const int par_k = s.parent(k);
    const Mat3 parent_global = (par_k == Skeleton::kNoParent) ? Mat3::Identity() : st.global[par_k];
    std::fill(in_subtree.begin(), in_subtree.end(), 0);
    in_subtree[k] = 1;
    for (int p = 0; p < 6; ++p) {
      Mat3 dlocal_p;
      dlocal_p.col(0) = dlocal.dcol[0].col(p);
      dlocal_p.col(1) = dlocal.dcol[1].col(p);
      dlocal_p.col(2) = dlocal.dcol[2].col(p);
      dglobal[k] = parent_global * dlocal_p;
      dpos[k].setZero();
      for (int j : s.topological_order()) {
        if (j == k || !in_subtree[s.parent(j) == Skeleton::kNoParent ? j : s.parent(j)]) {
          continue;
        }
        const int par = s.parent(j);
        in_subtree[j] = 1;
        dpos[j] = dpos[par] + dglobal[par] * s.rest_offset(j);
        dglobal[j] = dglobal[par] * st.local[j];
        jac.block<3, 1>(3 * j, 3 + 6 * k + p) = dpos[j];
      }
    }
  }
  return jac;
}

Eigen::MatrixXd bone_lengths(const Skeleton& s, const PointMatrix& positions, int frames) {
  const int J = s.joint_count();
  if (positions.rows() != static_cast<Eigen::Index>(frames) * J) {
    throw ShapeMismatch("bone_lengths: positions rows disagree with frames * joints");
  }
  const auto& bones = s.bone_joints();
  Eigen::MatrixXd out(frames, bones.size());
  for (int t = 0; t < frames; ++t) {
    for (std::size_t b = 0; b < bones.size(); ++b) {
      const int j = bones[b];
      const Vec3 d = positions.row(flat_index(t, j, J)) -
                     positions.row(flat_index(t, s.parent(j), J));
      out(t, static_cast<Eigen::Index>(b)) = d.norm();
    }
  }
  return out;
}

}  // namespace physimetrics
