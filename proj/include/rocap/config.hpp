#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rocap/annotate.hpp"
#include "rocap/camera.hpp"
#include "rocap/kinematics.hpp"
#include "rocap/object.hpp"
#include "rocap/sampler.hpp"
#include "rocap/serial.hpp"

namespace rocap {

struct SamplerConfig {
  double step_deg = 20.0;
  double dedup_threshold = 0.35;  // rad
  Vec3 capture_position = Vec3(0.45, 0.0, 0.40);
  Transform tool_offset;  // gripper flange to sampled frame, default identity
  PlanOrdering ordering = PlanOrdering::kGrid;
  double position_jitter = 0.0;  // m, default off
};

struct AnnotateConfig {
  double cube_size = kDefaultCubeSize;
  GreenDetectParams green;
  double min_inside_ratio = 0.8;
};

struct RenderConfig {
  bool enabled = false;
  std::string extension = ".ppm";
  double object_extent = 0.15;
  bool gripper_patch = true;
};

struct PathsConfig {
  std::string output_dir = ".";
};

/// Whole-pipeline configuration. Loading is schema-strict: the version
/// field is required and unknown keys anywhere in the document are
/// rejected.
struct ToolkitConfig {
  int version = 1;
  std::uint64_t seed = 0;
  DHChain chain;
  CameraIntrinsics intrinsics;
  Checkerboard board;
  SamplerConfig sampler;
  std::vector<ObjectSpec> objects;
  AugmentRanges augment;
  AnnotateConfig annotate;
  RenderConfig render;
  PathsConfig paths;

  ToolkitConfig();
  void validate() const;

  /// First object, or the named one. Throws ConfigError when absent.
  const ObjectSpec& object_named(const std::string& name) const;
};

ToolkitConfig config_from_json(const Json& j);
Json config_to_json(const ToolkitConfig& config);

ToolkitConfig load_config(const std::filesystem::path& path);
void save_config(const ToolkitConfig& config, const std::filesystem::path& path);

}  // namespace rocap
