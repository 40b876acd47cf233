#include "rocap/object.hpp"

#include <set>

namespace rocap {

void ObjectSpec::validate() const {
  if (name.empty()) {
    throw DataError("object needs a name");
  }
  if (states.empty()) {
    throw DataError("object '" + name + "' needs at least one state");
  }
  std::set<int> ids;
  for (const ObjectState& s : states) {
    if (!ids.insert(s.id).second) {
      throw DataError("object '" + name + "' has duplicate state id " + std::to_string(s.id));
    }
  }
}

std::string to_string(ObjectCategory category) {
  switch (category) {
    case ObjectCategory::kDeformable: return "deformable";
    case ObjectCategory::kViewingAngleDependent: return "viewing_angle_dependent";
    case ObjectCategory::kArticulated: return "articulated";
  }
  return "deformable";
}

ObjectCategory object_category_from_string(const std::string& s) {
  if (s == "deformable") return ObjectCategory::kDeformable;
  if (s == "viewing_angle_dependent") return ObjectCategory::kViewingAngleDependent;
  if (s == "articulated") return ObjectCategory::kArticulated;
  throw DataError("unknown object category '" + s + "'");
}

}  // namespace rocap
