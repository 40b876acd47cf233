#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "helpers.hpp"
#include "rocap/capture.hpp"
#include "rocap/config.hpp"
#include "rocap/serial.hpp"

using namespace rocap;

namespace {

Manifest sample_manifest() {
  std::mt19937_64 rng(77);
  Manifest m;
  m.object.name = "scissors";
  m.object.category = ObjectCategory::kArticulated;
  m.object.states = {
      {0, "closed", {StateChangeKind::kManual, 0.0}},
      {1, "open", {StateChangeKind::kAutomatic, 12.5}},
  };
  m.object.gripper_to_object = testutil::random_transform(rng, 0.1);
  m.calibration_ref = "calibration.json";
  m.intrinsics_ref = "intrinsics.json";
  m.seed = 99;
  for (int i = 0; i < 3; ++i) {
    CaptureRecord r;
    r.record_id = "rec_00000" + std::to_string(i);
    r.image_path = i == 0 ? "" : "frames/rec.ppm";
    r.base_to_gripper = testutil::random_transform(rng);
    r.camera_to_object = testutil::random_transform(rng);
    r.label_quaternion = r.camera_to_object.rotation_quat();
    r.label_pixel_center = Pixel(12.25, -3.5);
    r.state_id = i % 2;
    r.joint_state = testutil::random_joints_in_limits(reference_chain(), rng);
    m.records.push_back(std::move(r));
  }
  SessionEvent ev;
  ev.type = "operator_pause";
  ev.state_id = 1;
  ev.waypoint_index = 4;
  ev.acknowledged = true;
  m.events.push_back(ev);
  return m;
}

}  // namespace

TEST_SUITE_BEGIN("serial");

TEST_CASE("transforms round trip bit for bit") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    const Transform t = testutil::random_transform(rng);
    const Transform back = transform_from_json(to_json(t));
    CHECK((t.matrix() - back.matrix()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("malformed transforms are rejected") {
  CHECK_THROWS_AS(transform_from_json(Json::array({1.0, 2.0})), DataError);
  CHECK_THROWS_AS(transform_from_json(Json::object()), DataError);

  Json bad_bottom = to_json(Transform::identity());
  bad_bottom[15] = 2.0;  // bottom-right must be 1
  CHECK_THROWS_AS(transform_from_json(bad_bottom), DataError);

  Json reflection = to_json(Transform::identity());
  reflection[0] = -1.0;  // det -1
  CHECK_THROWS_AS(transform_from_json(reflection), DataError);
}

TEST_CASE("quaternions serialize w-first") {
  std::mt19937_64 rng(2);
  const UnitQuaternion q = testutil::random_quaternion(rng);
  const Json j = to_json(q);
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 4);
  CHECK(j[0].get<double>() == q.w());
  CHECK(j[1].get<double>() == q.x());
  CHECK(j[2].get<double>() == q.y());
  CHECK(j[3].get<double>() == q.z());

  const UnitQuaternion back = quat_from_json(j);
  CHECK(back.w() == q.w());
  CHECK(back.x() == q.x());
  CHECK(back.y() == q.y());
  CHECK(back.z() == q.z());

  CHECK_THROWS_AS(quat_from_json(Json::array({1.0, 0.0, 0.0})), DataError);
  CHECK_THROWS_AS(quat_from_json(Json::array({0.0, 0.0, 0.0, 0.0})), DataError);
}

TEST_CASE("object specs round trip including state changes") {
  Manifest m = sample_manifest();
  const Json j = to_json(m.object);
  const ObjectSpec back = object_from_json(j);
  CHECK(to_json(back).dump() == j.dump());
  CHECK(back.name == "scissors");
  REQUIRE(back.states.size() == 2);
  CHECK(back.states[0].change.kind == StateChangeKind::kManual);
  CHECK(back.states[1].change.kind == StateChangeKind::kAutomatic);
  CHECK(back.states[1].change.grip_force == 12.5);

  // Manual changes carry no grip force key.
  CHECK_FALSE(j["states"][0]["change"].contains("grip_force"));

  Json invalid = j;
  invalid["states"] = Json::array();
  CHECK_THROWS_AS(object_from_json(invalid), DataError);

  Json bad_category = j;
  bad_category["category"] = "liquid";
  CHECK_THROWS_AS(object_from_json(bad_category), DataError);

  Json dup_states = j;
  dup_states["states"][1]["id"] = 0;
  CHECK_THROWS_AS(object_from_json(dup_states), DataError);
}

TEST_CASE("manifests round trip through JSON") {
  const Manifest m = sample_manifest();
  const Json j = to_json(m);
  const Manifest back = manifest_from_json(j);
  CHECK(to_json(back).dump() == j.dump());
  CHECK(back.schema_version == m.schema_version);
  CHECK(back.toolkit_version == m.toolkit_version);
  CHECK(back.seed == 99);
  REQUIRE(back.records.size() == 3);
  CHECK(back.records[1].image_path == "frames/rec.ppm");
  REQUIRE(back.events.size() == 1);
  CHECK(back.events[0].waypoint_index == 4);
  CHECK(back.events[0].acknowledged);

  Json missing = j;
  missing.erase("records");
  CHECK_THROWS_AS(manifest_from_json(missing), DataError);
}

TEST_CASE("plans round trip and reject empty waypoint lists") {
  const DHChain chain = reference_chain();
  std::mt19937_64 rng(3);
  CapturePlan plan;
  plan.object_ref = "sponge";
  plan.capture_position = Vec3(0.45, 0.0, 0.40);
  for (int i = 0; i < 4; ++i) {
    Waypoint wp;
    wp.joint_state = testutil::random_joints_in_limits(chain, rng);
    wp.base_to_gripper = forward_kinematics(chain, wp.joint_state);
    wp.state_id = i / 2;
    wp.operator_pause = i == 2;
    plan.waypoints.push_back(std::move(wp));
  }

  const Json j = to_json(plan);
  CHECK(j.at("version").get<int>() == 1);
  const CapturePlan back = plan_from_json(j);
  CHECK(to_json(back).dump() == j.dump());
  REQUIRE(back.waypoints.size() == 4);
  CHECK(back.waypoints[2].operator_pause);
  CHECK((back.waypoints[1].joint_state - plan.waypoints[1].joint_state).cwiseAbs().maxCoeff() ==
        0.0);

  Json empty = j;
  empty["waypoints"] = Json::array();
  CHECK_THROWS_AS(plan_from_json(empty), EmptyPlan);
}

TEST_CASE("calibration files carry the camera and tool transforms") {
  std::mt19937_64 rng(4);
  CalibrationResult calib;
  calib.base_to_camera_inv = testutil::random_transform(rng);
  calib.gripper_to_target = testutil::random_transform(rng, 0.2);
  calib.rot_residual_rms = 1.5e-3;
  calib.trans_residual_rms = 2.5e-4;

  const Json j = to_json(calib);
  CHECK(j.at("version").get<int>() == 1);
  REQUIRE(j.contains("camera_to_base"));
  const CalibrationResult back = calibration_from_json(j);
  CHECK((back.base_to_camera_inv.matrix() - calib.base_to_camera_inv.matrix())
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK((back.gripper_to_target.matrix() - calib.gripper_to_target.matrix())
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK(back.rot_residual_rms == 1.5e-3);
  CHECK(back.trans_residual_rms == 2.5e-4);

  Json missing = j;
  missing.erase("camera_to_base");
  CHECK_THROWS_AS(calibration_from_json(missing), DataError);
}

TEST_CASE("stations accept both bare arrays and wrapped objects") {
  std::mt19937_64 rng(5);
  std::vector<Station> stations;
  for (int i = 0; i < 3; ++i)
    stations.push_back({testutil::random_transform(rng), testutil::random_transform(rng)});

  const Json arr = stations_to_json(stations);
  REQUIRE(arr.is_array());
  const auto back = stations_from_json(arr);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK((back[i].base_to_gripper.matrix() - stations[i].base_to_gripper.matrix())
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK((back[i].camera_to_target.matrix() - stations[i].camera_to_target.matrix())
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }

  Json wrapped;
  wrapped["stations"] = arr;
  CHECK(stations_from_json(wrapped).size() == 3);

  CHECK_THROWS_AS(stations_from_json(Json::object()), DataError);
}

TEST_CASE("prompt sets validate on load") {
  PromptSet p;
  p.record_id = "rec_000000";
  p.image_path = "frames/rec_000000.ppm";
  p.bbox = {10.0, 20.0, 110.0, 140.0};
  p.positive_points.push_back(Pixel(60.0, 80.0));
  p.negative_points.push_back(Pixel(60.0, 170.0));

  const Json j = prompts_to_json({p});
  const auto back = prompts_from_json(j);
  REQUIRE(back.size() == 1);
  CHECK(prompts_to_json(back).dump() == j.dump());
  CHECK(back[0].bbox.x1 == 110.0);
  REQUIRE(back[0].positive_points.size() == 1);
  REQUIRE(back[0].negative_points.size() == 1);

  Json outside = j;
  outside[0]["positive_points"][0] = Json::array({5.0, 5.0});  // leaves the bbox
  CHECK_THROWS_AS(prompts_from_json(outside), DataError);

  Json degenerate = j;
  degenerate[0]["bbox"] = Json::array({10.0, 20.0, 10.0, 140.0});
  CHECK_THROWS_AS(prompts_from_json(degenerate), DataError);
}

TEST_CASE("predictions tolerate missing optional fields") {
  PredictionRecord p;
  p.record_id = "rec_000001";
  // norm^2 is exactly 1.0, so the load-time re-normalization is a no-op
  // and the round trip stays byte-identical
  p.quaternion = UnitQuaternion(0.5, 0.5, -0.5, 0.5);
  p.pixel_center = Pixel(321.5, 201.25);
  p.state_id = 2;

  const Json j = predictions_to_json({p});
  const auto back = predictions_from_json(j);
  REQUIRE(back.size() == 1);
  CHECK(predictions_to_json(back).dump() == j.dump());
  REQUIRE(back[0].state_id.has_value());
  CHECK(*back[0].state_id == 2);

  Json bare = j;
  bare[0].erase("pixel_center");
  bare[0].erase("state_id");
  const auto sparse = predictions_from_json(bare);
  REQUIRE(sparse.size() == 1);
  CHECK_FALSE(sparse[0].state_id.has_value());
  CHECK((sparse[0].pixel_center - Pixel::Zero()).norm() == 0.0);
  CHECK(sparse[0].quaternion.w() == p.quaternion.w());

  CHECK_THROWS_AS(predictions_from_json(Json::object()), DataError);
}

TEST_CASE("file IO separates missing files from parse failures") {
  const auto dir = testutil::fresh_dir("serial_io");
  CHECK_THROWS_AS(load_json(dir / "missing.json"), IoError);

  const auto garbled = dir / "garbled.json";
  {
    std::ofstream out(garbled);
    out << "{not json";
  }
  CHECK_THROWS_AS(load_json(garbled), DataError);

  const auto out_path = dir / "data.json";
  const Json j = to_json(sample_manifest());
  save_json(j, out_path);
  CHECK(load_json(out_path).dump() == j.dump());

  // Writes are deterministic and newline-terminated.
  std::ifstream in(out_path, std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  CHECK(bytes == j.dump(2) + "\n");

  save_json(j, out_path);
  std::ifstream again(out_path, std::ios::binary);
  const std::string bytes2((std::istreambuf_iterator<char>(again)),
                           std::istreambuf_iterator<char>());
  CHECK(bytes2 == bytes);
  std::filesystem::remove_all(dir);
}

TEST_CASE("the default config survives a JSON round trip byte for byte") {
  const ToolkitConfig config;
  CHECK_NOTHROW(config.validate());
  const Json j = config_to_json(config);
  const ToolkitConfig back = config_from_json(j);
  CHECK(config_to_json(back).dump() == j.dump());
  CHECK(back.chain.joint_count() == 6);
  CHECK(back.sampler.step_deg == config.sampler.step_deg);
  CHECK((back.sampler.capture_position - Vec3(0.45, 0.0, 0.40)).norm() == 0.0);
  CHECK(back.objects.size() == config.objects.size());
}

TEST_CASE("config files are schema-strict at every level") {
  const Json base = config_to_json(ToolkitConfig{});

  Json no_version = base;
  no_version.erase("version");
  CHECK_THROWS_AS(config_from_json(no_version), ConfigError);

  Json top = base;
  top["surprise"] = 1;
  CHECK_THROWS_AS(config_from_json(top), ConfigError);

  Json link = base;
  link["chain"][0]["twist"] = 0.0;
  CHECK_THROWS_AS(config_from_json(link), ConfigError);

  Json intr = base;
  intr["intrinsics"]["skew"] = 0.0;
  CHECK_THROWS_AS(config_from_json(intr), ConfigError);

  Json board = base;
  board["checkerboard"]["margin"] = 1;
  CHECK_THROWS_AS(config_from_json(board), ConfigError);

  Json sampler = base;
  sampler["sampler"]["shuffle"] = true;
  CHECK_THROWS_AS(config_from_json(sampler), ConfigError);

  Json object = base;
  object["objects"][0]["weight"] = 1.0;
  CHECK_THROWS_AS(config_from_json(object), ConfigError);

  Json state = base;
  state["objects"][0]["states"][0]["color"] = "red";
  CHECK_THROWS_AS(config_from_json(state), ConfigError);

  Json change = base;
  change["objects"][0]["states"][0]["change"]["speed"] = 2;
  CHECK_THROWS_AS(config_from_json(change), ConfigError);

  Json augment = base;
  augment["augment"]["hue_min"] = 0.1;
  CHECK_THROWS_AS(config_from_json(augment), ConfigError);

  Json annotate = base;
  annotate["annotate"]["blur"] = 3;
  CHECK_THROWS_AS(config_from_json(annotate), ConfigError);

  Json render = base;
  render["render"]["antialias"] = true;
  CHECK_THROWS_AS(config_from_json(render), ConfigError);

  Json paths = base;
  paths["paths"]["cache_dir"] = "/tmp";
  CHECK_THROWS_AS(config_from_json(paths), ConfigError);
}

TEST_CASE("config validation rejects inconsistent values") {
  ToolkitConfig config;
  config.sampler.step_deg = 50.0;  // does not divide 360
  CHECK_THROWS_AS(config.validate(), ConfigError);

  config = ToolkitConfig{};
  config.augment.gain_min = 1.5;  // inverted range
  CHECK_THROWS_AS(config.validate(), ConfigError);

  config = ToolkitConfig{};
  config.render.extension = ".bmp";
  CHECK_THROWS_AS(config.validate(), ConfigError);

  config = ToolkitConfig{};
  config.annotate.min_inside_ratio = 1.5;
  CHECK_THROWS_AS(config.validate(), ConfigError);
}

TEST_CASE("config file IO round trip") {
  const auto dir = testutil::fresh_dir("config_io");
  const auto path = dir / "config.json";
  const ToolkitConfig config;
  save_config(config, path);
  const ToolkitConfig back = load_config(path);
  CHECK(config_to_json(back).dump() == config_to_json(config).dump());
  std::filesystem::remove_all(dir);
}

TEST_CASE("named object lookup") {
  const ToolkitConfig config;
  CHECK(config.object_named("").name == "sponge");
  CHECK(config.object_named("sponge").name == "sponge");
  CHECK_THROWS_AS(config.object_named("unicorn"), ConfigError);
}

TEST_SUITE_END();
