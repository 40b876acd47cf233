#pragma once

#include <string>
#include <vector>

#include "rocap/transforms.hpp"

namespace rocap {

enum class ObjectCategory {
  kDeformable,
  kViewingAngleDependent,
  kArticulated,
};

enum class StateChangeKind {
  kAutomatic,  // gripper re-grips with a different force
  kManual,     // an operator alters the object between state groups
};

struct StateChange {
  StateChangeKind kind = StateChangeKind::kAutomatic;
  double grip_force = 0.0;  // N, meaningful for automatic changes
};

struct ObjectState {
  int id = 0;
  std::string name;
  StateChange change;
};

/// A capture target: its appearance category, the discrete states to
/// sweep, and where it sits relative to the gripper (identity when the
/// object is assumed to share the end-effector pose).
struct ObjectSpec {
  std::string name;
  ObjectCategory category = ObjectCategory::kDeformable;
  std::vector<ObjectState> states;
  Transform gripper_to_object;  // gTo

  void validate() const;
};

std::string to_string(ObjectCategory category);
ObjectCategory object_category_from_string(const std::string& s);

}  // namespace rocap
