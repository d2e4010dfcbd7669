#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "physimetrics/types.hpp"

namespace physimetrics {

/// Joint hierarchy with rest offsets; the kinematic ground truth for forward
/// kinematics, fitting, and bone lengths.  Immutable after construction.
class Skeleton {
 public:
  static constexpr int kNoParent = -1;

  /// Validates the tree (single root, no cycles), offset norms, and the
  /// special indices.  Throws InvariantViolation on failure.
  Skeleton(std::vector<std::string> joint_names, std::vector<int> parents,
           std::vector<Vec3> rest_offsets, int root_index, int left_foot_index,
           int right_foot_index);

  int joint_count() const { return static_cast<int>(parent_.size()); }
  int parent(int joint) const { return parent_[joint]; }
  const Vec3& rest_offset(int joint) const { return rest_offset_[joint]; }
  const std::string& joint_name(int joint) const { return name_[joint]; }
  const std::vector<std::string>& joint_names() const { return name_; }

  int root_index() const { return root_; }
  int left_foot_index() const { return left_foot_; }
  int right_foot_index() const { return right_foot_; }

  /// Joints ordered parent-before-child; starts at the root.
  const std::vector<int>& topological_order() const { return topo_; }

  /// Non-root joints in ascending index order; bone k is the segment
  /// parent(bone_joint(k)) -> bone_joint(k).
  const std::vector<int>& bone_joints() const { return bones_; }

  /// Lookup by name; returns -1 if absent.
  int find_joint(const std::string& name) const;

  /// Rest-pose joint positions with the root at `root_position` and all
  /// rotations identity.
  std::vector<Vec3> rest_positions(const Vec3& root_position = Vec3::Zero()) const;

  static Skeleton from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  static Skeleton load(const std::string& path);

  /// The 22-joint skeleton shipped with the library.
  static const Skeleton& default22();

 private:
  std::vector<std::string> name_;
  std::vector<int> parent_;
  std::vector<Vec3> rest_offset_;
  int root_ = 0;
  int left_foot_ = 0;
  int right_foot_ = 0;
  std::vector<int> topo_;
  std::vector<int> bones_;
};

}  // namespace physimetrics
