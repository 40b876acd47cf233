#include "rocap/serial.hpp"

#include <fstream>
#include <sstream>

namespace rocap {
namespace {

// Converts nlohmann's missing-key / wrong-type exceptions into DataError
// with a format label.
template <typename F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw DataError(std::string(what) + ": " + e.what());
  }
}

Json pixel_to_json(const Pixel& p) { return Json::array({p.x(), p.y()}); }

Pixel pixel_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw DataError("pixel must be a [u, v] pair");
  return Pixel(j[0].get<double>(), j[1].get<double>());
}

Json vec3_to_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw DataError("expected a 3-vector");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

Json joints_to_json(const JointState& q) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < q.size(); ++i) arr.push_back(q[i]);
  return arr;
}

JointState joints_from_json(const Json& j) {
  if (!j.is_array()) throw DataError("joint state must be an array");
  JointState q(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) q[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return q;
}

Json state_change_to_json(const StateChange& change) {
  Json j;
  j["kind"] = change.kind == StateChangeKind::kManual ? "manual" : "automatic";
  if (change.kind == StateChangeKind::kAutomatic) j["grip_force"] = change.grip_force;
  return j;
}

StateChange state_change_from_json(const Json& j) {
  StateChange change;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "manual") {
    change.kind = StateChangeKind::kManual;
  } else if (kind == "automatic") {
    change.kind = StateChangeKind::kAutomatic;
    change.grip_force = j.value("grip_force", 0.0);
  } else {
    throw DataError("unknown state change kind: " + kind);
  }
  return change;
}

Json record_to_json(const CaptureRecord& rec) {
  Json j;
  j["record_id"] = rec.record_id;
  j["image_path"] = rec.image_path;
  j["base_to_gripper"] = to_json(rec.base_to_gripper);
  j["camera_to_object"] = to_json(rec.camera_to_object);
  j["label_quaternion"] = to_json(rec.label_quaternion);
  j["label_pixel_center"] = pixel_to_json(rec.label_pixel_center);
  j["state_id"] = rec.state_id;
  j["joint_state"] = joints_to_json(rec.joint_state);
  return j;
}

CaptureRecord record_from_json(const Json& j) {
  CaptureRecord rec;
  rec.record_id = j.at("record_id").get<std::string>();
  rec.image_path = j.value("image_path", std::string());
  rec.base_to_gripper = transform_from_json(j.at("base_to_gripper"));
  rec.camera_to_object = transform_from_json(j.at("camera_to_object"));
  rec.label_quaternion = quat_from_json(j.at("label_quaternion"));
  rec.label_pixel_center = pixel_from_json(j.at("label_pixel_center"));
  rec.state_id = j.at("state_id").get<int>();
  rec.joint_state = joints_from_json(j.at("joint_state"));
  return rec;
}

}  // namespace

Json to_json(const Transform& t) {
  const Mat4 m = t.matrix();
  Json arr = Json::array();
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) arr.push_back(m(r, c));
  return arr;
}

Transform transform_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 16)
    throw DataError("transform must be a row-major 16-number array");
  Mat4 m;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) m(r, c) = j[static_cast<std::size_t>(4 * r + c)].get<double>();
  return Transform::from_matrix(m);
}

Json to_json(const UnitQuaternion& q) {
  return Json::array({q.w(), q.x(), q.y(), q.z()});
}

UnitQuaternion quat_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 4)
    throw DataError("quaternion must be a [w, x, y, z] array");
  return UnitQuaternion(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
                        j[3].get<double>());
}

Json to_json(const ObjectSpec& object) {
  Json j;
  j["name"] = object.name;
  j["category"] = to_string(object.category);
  j["gripper_to_object"] = to_json(object.gripper_to_object);
  Json states = Json::array();
  for (const ObjectState& s : object.states) {
    Json js;
    js["id"] = s.id;
    js["name"] = s.name;
    js["change"] = state_change_to_json(s.change);
    states.push_back(js);
  }
  j["states"] = states;
  return j;
}

ObjectSpec object_from_json(const Json& j) {
  return guarded("object spec", [&] {
    ObjectSpec object;
    object.name = j.at("name").get<std::string>();
    object.category = object_category_from_string(j.at("category").get<std::string>());
    if (j.contains("gripper_to_object"))
      object.gripper_to_object = transform_from_json(j.at("gripper_to_object"));
    for (const Json& js : j.at("states")) {
      ObjectState s;
      s.id = js.at("id").get<int>();
      s.name = js.value("name", std::string());
      s.change = state_change_from_json(js.at("change"));
      object.states.push_back(std::move(s));
    }
    object.validate();
    return object;
  });
}

Json to_json(const Manifest& manifest) {
  Json j;
  j["schema_version"] = manifest.schema_version;
  j["toolkit_version"] = manifest.toolkit_version;
  j["object"] = to_json(manifest.object);
  j["calibration_ref"] = manifest.calibration_ref;
  j["intrinsics_ref"] = manifest.intrinsics_ref;
  j["seed"] = manifest.seed;
  Json records = Json::array();
  for (const CaptureRecord& rec : manifest.records) records.push_back(record_to_json(rec));
  j["records"] = records;
  Json events = Json::array();
  for (const SessionEvent& ev : manifest.events) {
    Json je;
    je["type"] = ev.type;
    je["state_id"] = ev.state_id;
    je["waypoint_index"] = ev.waypoint_index;
    je["acknowledged"] = ev.acknowledged;
    events.push_back(je);
  }
  j["events"] = events;
  return j;
}

Manifest manifest_from_json(const Json& j) {
  return guarded("manifest", [&] {
    Manifest manifest;
    manifest.schema_version = j.at("schema_version").get<int>();
    manifest.toolkit_version = j.value("toolkit_version", std::string());
    manifest.object = object_from_json(j.at("object"));
    manifest.calibration_ref = j.value("calibration_ref", std::string());
    manifest.intrinsics_ref = j.value("intrinsics_ref", std::string());
    manifest.seed = j.value("seed", std::uint64_t{0});
    for (const Json& jr : j.at("records")) manifest.records.push_back(record_from_json(jr));
    if (j.contains("events")) {
      for (const Json& je : j.at("events")) {
        SessionEvent ev;
        ev.type = je.at("type").get<std::string>();
        ev.state_id = je.value("state_id", 0);
        ev.waypoint_index = je.value("waypoint_index", std::size_t{0});
        ev.acknowledged = je.value("acknowledged", false);
        manifest.events.push_back(std::move(ev));
      }
    }
    return manifest;
  });
}

Json to_json(const CapturePlan& plan) {
  Json j;
  j["version"] = 1;
  j["object_ref"] = plan.object_ref;
  j["capture_position"] = vec3_to_json(plan.capture_position);
  Json waypoints = Json::array();
  for (const Waypoint& wp : plan.waypoints) {
    Json jw;
    jw["joint_state"] = joints_to_json(wp.joint_state);
    jw["base_to_gripper"] = to_json(wp.base_to_gripper);
    jw["state_id"] = wp.state_id;
    jw["operator_pause"] = wp.operator_pause;
    waypoints.push_back(jw);
  }
  j["waypoints"] = waypoints;
  return j;
}

CapturePlan plan_from_json(const Json& j) {
  return guarded("plan", [&] {
    CapturePlan plan;
    plan.object_ref = j.value("object_ref", std::string());
    plan.capture_position = vec3_from_json(j.at("capture_position"));
    for (const Json& jw : j.at("waypoints")) {
      Waypoint wp;
      wp.joint_state = joints_from_json(jw.at("joint_state"));
      wp.base_to_gripper = transform_from_json(jw.at("base_to_gripper"));
      wp.state_id = jw.at("state_id").get<int>();
      wp.operator_pause = jw.value("operator_pause", false);
      plan.waypoints.push_back(std::move(wp));
    }
    if (plan.waypoints.empty()) throw EmptyPlan("plan file has no waypoints");
    return plan;
  });
}

Json to_json(const CalibrationResult& calibration) {
  Json j;
  j["version"] = 1;
  j["camera_to_base"] = to_json(calibration.base_to_camera_inv);
  j["gripper_to_target"] = to_json(calibration.gripper_to_target);
  j["rot_residual_rms"] = calibration.rot_residual_rms;
  j["trans_residual_rms"] = calibration.trans_residual_rms;
  return j;
}

CalibrationResult calibration_from_json(const Json& j) {
  return guarded("calibration", [&] {
    CalibrationResult calibration;
    calibration.base_to_camera_inv = transform_from_json(j.at("camera_to_base"));
    calibration.gripper_to_target = transform_from_json(j.at("gripper_to_target"));
    calibration.rot_residual_rms = j.value("rot_residual_rms", 0.0);
    calibration.trans_residual_rms = j.value("trans_residual_rms", 0.0);
    return calibration;
  });
}

Json stations_to_json(const std::vector<Station>& stations) {
  Json arr = Json::array();
  for (const Station& s : stations) {
    Json js;
    js["base_to_gripper"] = to_json(s.base_to_gripper);
    js["camera_to_target"] = to_json(s.camera_to_target);
    arr.push_back(js);
  }
  return arr;
}

std::vector<Station> stations_from_json(const Json& j) {
  return guarded("stations", [&] {
    const Json& list = j.is_array() ? j : j.at("stations");
    std::vector<Station> stations;
    for (const Json& js : list) {
      Station s;
      s.base_to_gripper = transform_from_json(js.at("base_to_gripper"));
      s.camera_to_target = transform_from_json(js.at("camera_to_target"));
      stations.push_back(s);
    }
    return stations;
  });
}

Json prompts_to_json(const std::vector<PromptSet>& prompts) {
  Json arr = Json::array();
  for (const PromptSet& p : prompts) {
    Json jp;
    jp["record_id"] = p.record_id;
    jp["image_path"] = p.image_path;
    jp["bbox"] = Json::array({p.bbox.x0, p.bbox.y0, p.bbox.x1, p.bbox.y1});
    Json pos = Json::array();
    for (const Pixel& pt : p.positive_points) pos.push_back(pixel_to_json(pt));
    jp["positive_points"] = pos;
    Json neg = Json::array();
    for (const Pixel& pt : p.negative_points) neg.push_back(pixel_to_json(pt));
    jp["negative_points"] = neg;
    arr.push_back(jp);
  }
  return arr;
}

std::vector<PromptSet> prompts_from_json(const Json& j) {
  return guarded("prompts", [&] {
    if (!j.is_array()) throw DataError("prompts file must be a JSON list");
    std::vector<PromptSet> prompts;
    for (const Json& jp : j) {
      PromptSet p;
      p.record_id = jp.at("record_id").get<std::string>();
      p.image_path = jp.value("image_path", std::string());
      const Json& box = jp.at("bbox");
      if (!box.is_array() || box.size() != 4)
        throw DataError("prompt bbox must be [x0, y0, x1, y1]");
      p.bbox = {box[0].get<double>(), box[1].get<double>(), box[2].get<double>(),
                box[3].get<double>()};
      for (const Json& pt : jp.at("positive_points")) p.positive_points.push_back(pixel_from_json(pt));
      for (const Json& pt : jp.at("negative_points")) p.negative_points.push_back(pixel_from_json(pt));
      p.validate();
      prompts.push_back(std::move(p));
    }
    return prompts;
  });
}

Json predictions_to_json(const std::vector<PredictionRecord>& predictions) {
  Json arr = Json::array();
  for (const PredictionRecord& p : predictions) {
    Json jp;
    jp["record_id"] = p.record_id;
    jp["quaternion"] = to_json(p.quaternion);
    jp["pixel_center"] = pixel_to_json(p.pixel_center);
    if (p.state_id) jp["state_id"] = *p.state_id;
    arr.push_back(jp);
  }
  return arr;
}

std::vector<PredictionRecord> predictions_from_json(const Json& j) {
  return guarded("predictions", [&] {
    if (!j.is_array()) throw DataError("predictions file must be a JSON list");
    std::vector<PredictionRecord> predictions;
    for (const Json& jp : j) {
      PredictionRecord p;
      p.record_id = jp.at("record_id").get<std::string>();
      p.quaternion = quat_from_json(jp.at("quaternion"));
      if (jp.contains("pixel_center")) p.pixel_center = pixel_from_json(jp.at("pixel_center"));
      if (jp.contains("state_id")) p.state_id = jp.at("state_id").get<int>();
      predictions.push_back(std::move(p));
    }
    return predictions;
  });
}

Json load_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw DataError("failed to parse " + path.string() + ": " + e.what());
  }
}

void save_json(const Json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << "\n";
  if (!out.good()) throw IoError("failed writing " + path.string());
}

void write_manifest(const Manifest& manifest, const std::filesystem::path& path) {
  save_json(to_json(manifest), path);
}

Manifest read_manifest(const std::filesystem::path& path) {
  return manifest_from_json(load_json(path));
}

void write_plan(const CapturePlan& plan, const std::filesystem::path& path) {
  save_json(to_json(plan), path);
}

CapturePlan read_plan(const std::filesystem::path& path) {
  return plan_from_json(load_json(path));
}

void write_calibration(const CalibrationResult& calibration,
                       const std::filesystem::path& path) {
  save_json(to_json(calibration), path);
}

CalibrationResult read_calibration(const std::filesystem::path& path) {
  return calibration_from_json(load_json(path));
}

void write_stations(const std::vector<Station>& stations, const std::filesystem::path& path) {
  save_json(stations_to_json(stations), path);
}

std::vector<Station> read_stations(const std::filesystem::path& path) {
  return stations_from_json(load_json(path));
}

void write_prompts(const std::vector<PromptSet>& prompts, const std::filesystem::path& path) {
  save_json(prompts_to_json(prompts), path);
}

std::vector<PromptSet> read_prompts(const std::filesystem::path& path) {
  return prompts_from_json(load_json(path));
}

void write_predictions(const std::vector<PredictionRecord>& predictions,
                       const std::filesystem::path& path) {
  save_json(predictions_to_json(predictions), path);
}

std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path) {
  return predictions_from_json(load_json(path));
}

void write_text(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out.good()) throw IoError("failed writing " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace rocap
