#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rocap/camera.hpp"
#include "rocap/handeye.hpp"
#include "rocap/image.hpp"
#include "rocap/object.hpp"
#include "rocap/sampler.hpp"
#include "rocap/transforms.hpp"

namespace rocap {

inline constexpr int kManifestSchemaVersion = 1;
inline constexpr const char* kToolkitVersion = "0.1.0";

/// One labeled sample: the pose label (cTo) plus everything needed to
/// re-derive it from the calibration chain.
struct CaptureRecord {
  std::string record_id;
  std::string image_path;  // empty when no frame was rendered
  Transform base_to_gripper;   // bTg at capture time
  Transform camera_to_object;  // cTo, the 6D label
  UnitQuaternion label_quaternion;
  Pixel label_pixel_center = Pixel::Zero();
  int state_id = 0;
  JointState joint_state;
};

struct SessionEvent {
  std::string type;  // "operator_pause"
  int state_id = 0;
  std::size_t waypoint_index = 0;
  bool acknowledged = false;
};

struct Manifest {
  int schema_version = kManifestSchemaVersion;
  std::string toolkit_version = kToolkitVersion;
  ObjectSpec object;
  std::string calibration_ref;
  std::string intrinsics_ref;
  std::uint64_t seed = 0;
  std::vector<CaptureRecord> records;
  std::vector<SessionEvent> events;
};

/// The pose label chain: cTo = cTb * bTg * gTo.
Transform label_pose(const Transform& base_to_camera_inv, const Transform& base_to_gripper,
                     const Transform& gripper_to_object);

enum class CaptureMode {
  kSim,     // full simulated session, optionally rendering frames
  kDryRun,  // records and events only; no frames are rendered
};

struct RenderOptions {
  bool enabled = false;
  std::filesystem::path directory;
  std::string extension = ".ppm";  // ".ppm" or ".png"
  double object_extent = 0.15;     // m, proxy cuboid edge length
  bool gripper_patch = true;
  std::array<std::uint8_t, 3> background = {40, 40, 48};
};

struct CaptureOptions {
  CaptureMode mode = CaptureMode::kSim;
  std::uint64_t seed = 0;
  RenderOptions render;
  // When set, the plan is validated against this chain: joint counts must
  // match and each waypoint's stored pose must equal its FK within 1e-9.
  const DHChain* chain = nullptr;
  std::string calibration_ref;
  std::string intrinsics_ref;
};

/// Runs the simulated session: one record per non-pause waypoint, one
/// logged (auto-acknowledged) operator event per pause waypoint. Throws
/// CalibrationMissing when no calibration is supplied and
/// PlanChainMismatch when the plan disagrees with options.chain.
Manifest run_capture(const CapturePlan& plan,
                     const std::optional<CalibrationResult>& calibration,
                     const CameraIntrinsics& intrinsics, const ObjectSpec& object,
                     const CaptureOptions& options = {});

/// Axis-aligned image rectangle, inclusive pixel bounds.
struct PixelRect {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  double center_u() const { return 0.5 * (x0 + x1); }
  double center_v() const { return 0.5 * (y0 + y1); }
};

/// Where the renderer paints the simulated green gripper tape for a given
/// object pose: directly below the cuboid silhouette. Returns nullopt when
/// the silhouette is empty or the patch would degenerate.
std::optional<PixelRect> gripper_patch_rect(const CameraIntrinsics& k,
                                            const Transform& camera_to_object,
                                            double object_extent);

/// Flat-shaded proxy cuboid (painter's order) on a solid background, with
/// an optional pure-green gripper patch. Deterministic. Throws
/// BehindCameraError when every cuboid corner is behind the camera.
Image render_synthetic_frame(const CameraIntrinsics& k, const Transform& camera_to_object,
                             double object_extent, bool gripper_patch,
                             const std::array<std::uint8_t, 3>& background = {40, 40, 48});

/// Checks manifest invariants: unique record ids and, when `root` is
/// given, existence of every referenced image file.
void validate_manifest(const Manifest& manifest,
                       const std::optional<std::filesystem::path>& root = std::nullopt);

}  // namespace rocap
