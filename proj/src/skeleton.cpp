#include "physimetrics/skeleton.hpp"

#include <fstream>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "physimetrics/errors.hpp"

namespace physimetrics {

namespace detail {
extern const char* kDefaultSkeletonJson;
}

Skeleton::Skeleton(std::vector<std::string> joint_names, std::vector<int> parents,
                   std::vector<Vec3> rest_offsets, int root_index, int left_foot_index,
                   int right_foot_index)
    : name_(std::move(joint_names)),
      parent_(std::move(parents)),
      rest_offset_(std::move(rest_offsets)),
      root_(root_index),
      left_foot_(left_foot_index),
      right_foot_(right_foot_index) {
  const int n = joint_count();
  if (n < 1 || name_.size() != parent_.size() || rest_offset_.size() != parent_.size()) {
    throw InvariantViolation("skeleton: joint arrays disagree in length");
  }
  auto check_index = [n](int idx, const char* what) {
    if (idx < 0 || idx >= n) {
      throw InvariantViolation(std::string("skeleton: ") + what + " index out of range");
    }
  };
  check_index(root_, "root");
  check_index(left_foot_, "left foot");
  check_index(right_foot_, "right foot");

  int roots = 0;
  for (int j = 0; j < n; ++j) {
    if (parent_[j] == kNoParent) {
      ++roots;
      if (j != root_) {
        throw InvariantViolation("skeleton: parentless joint is not the declared root");
      }
    } else {
      check_index(parent_[j], "parent");
      if (rest_offset_[j].norm() <= 0.0) {
        throw InvariantViolation("skeleton: zero rest offset for joint " + name_[j]);
      }
    }
  }
  if (roots != 1) {
    throw InvariantViolation("skeleton: expected exactly one root joint");
  }

  // Walk parents from every joint; any chain longer than n is a cycle.
  for (int j = 0; j < n; ++j) {
    int hops = 0;
    for (int k = j; k != kNoParent; k = parent_[k]) {
      if (++hops > n) {
        throw InvariantViolation("skeleton: parent indices contain a cycle");
      }
    }
  }

  topo_.reserve(n);
  std::vector<char> placed(n, 0);
  topo_.push_back(root_);
  placed[root_] = 1;
  while (static_cast<int>(topo_.size()) < n) {
    const std::size_t before = topo_.size();
    for (int j = 0; j < n; ++j) {
      if (!placed[j] && placed[parent_[j]]) {
        topo_.push_back(j);
        placed[j] = 1;
      }
    }
    if (topo_.size() == before) {
      throw InvariantViolation("skeleton: disconnected joint subtree");
    }
  }

  bones_.reserve(n - 1);
  for (int j = 0; j < n; ++j) {
    if (j != root_) bones_.push_back(j);
  }
}

int Skeleton::find_joint(const std::string& name) const {
  for (int j = 0; j < joint_count(); ++j) {
    if (name_[j] == name) return j;
  }
  return -1;
}

std::vector<Vec3> Skeleton::rest_positions(const Vec3& root_position) const {
  std::vector<Vec3> pos(joint_count());
  for (int j : topo_) {
    pos[j] = (j == root_) ? root_position : pos[parent_[j]] + rest_offset_[j];
  }
  return pos;
}

namespace {

int resolve_joint_field(const nlohmann::json& field, const std::vector<std::string>& names,
                        const char* what) {
  if (field.is_number_integer()) {
    return field.get<int>();
  }
  if (field.is_string()) {
    const auto target = field.get<std::string>();
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == target) return static_cast<int>(i);
    }
    throw InvariantViolation(std::string("skeleton: unknown joint name for ") + what +
                             ": " + target);
  }
  throw ParseError(std::string("skeleton: ") + what + " must be an index or joint name");
}

}  // namespace

Skeleton Skeleton::from_json(const nlohmann::json& j) {
  if (!j.contains("joints") || !j["joints"].is_array()) {
    throw ParseError("skeleton: missing \"joints\" array");
  }
  std::vector<std::string> names;
  std::vector<int> parents;
  std::vector<Vec3> offsets;
  for (const auto& joint : j["joints"]) {
    names.push_back(joint.at("name").get<std::string>());
    const auto& par = joint.at("parent");
    if (par.is_null()) {
      parents.push_back(kNoParent);
    } else if (par.is_number_integer()) {
      parents.push_back(par.get<int>());
    } else if (par.is_string()) {
      parents.push_back(-2);  // resolved below once all names are known
    } else {
      throw ParseError("skeleton: parent must be null, an index, or a name");
    }
    const auto& off = joint.at("offset");
    if (!off.is_array() || off.size() != 3) {
      throw ParseError("skeleton: offset must be a 3-element array");
    }
    offsets.emplace_back(off[0].get<double>(), off[1].get<double>(), off[2].get<double>());
  }
  for (std::size_t i = 0; i < parents.size(); ++i) {
    if (parents[i] == -2) {
      parents[i] = resolve_joint_field(j["joints"][i]["parent"], names, "parent");
    }
  }
  const int root = resolve_joint_field(j.at("root"), names, "root");
  const int lf = resolve_joint_field(j.at("left_foot"), names, "left_foot");
  const int rf = resolve_joint_field(j.at("right_foot"), names, "right_foot");
  return Skeleton(std::move(names), std::move(parents), std::move(offsets), root, lf, rf);
}

nlohmann::json Skeleton::to_json() const {
  nlohmann::json joints = nlohmann::json::array();
  for (int j = 0; j < joint_count(); ++j) {
    nlohmann::json entry;
    entry["name"] = name_[j];
    if (parent_[j] == kNoParent) {
      entry["parent"] = nullptr;
    } else {
      entry["parent"] = parent_[j];
    }
    entry["offset"] = {rest_offset_[j].x(), rest_offset_[j].y(), rest_offset_[j].z()};
    joints.push_back(entry);
  }
  nlohmann::json out;
  out["joints"] = joints;
  out["root"] = name_[root_];
  out["left_foot"] = name_[left_foot_];
  out["right_foot"] = name_[right_foot_];
  return out;
}

Skeleton Skeleton::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("skeleton: cannot open " + path);
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": byte " + std::to_string(e.byte) + ": " + e.what());
  }
  return from_json(j);
}

const Skeleton& Skeleton::default22() {
  static const Skeleton instance = from_json(nlohmann::json::parse(detail::kDefaultSkeletonJson));
  return instance;
}

}  // namespace physimetrics
