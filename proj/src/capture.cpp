#include "rocap/capture.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <set>

#include "rocap/kinematics.hpp"

namespace rocap {
namespace {

std::string record_id_for(std::size_t index) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "rec_%06zu", index);
  return std::string(buf);
}

// Proxy cuboid corners in the object frame: an axis-aligned cube of edge
// `extent` centered at the origin.
std::array<Vec3, 8> cuboid_corners(double extent) {
  const double h = 0.5 * extent;
  std::array<Vec3, 8> c;
  int n = 0;
  for (int ix : {-1, 1})
    for (int iy : {-1, 1})
      for (int iz : {-1, 1}) c[n++] = Vec3(ix * h, iy * h, iz * h);
  return c;
}

// Faces of the cuboid as corner indices into cuboid_corners, with outward
// normals along -x,+x,-y,+y,-z,+z of the object frame. Corner order is
// counter-clockwise seen from outside.
constexpr int kFaces[6][4] = {
    {0, 1, 3, 2},  // -x
    {4, 6, 7, 5},  // +x
    {0, 4, 5, 1},  // -y
    {2, 3, 7, 6},  // +y
    {0, 2, 6, 4},  // -z
    {1, 5, 7, 3},  // +z
};

constexpr double kFaceNormals[6][3] = {
    {-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1},
};

void fill_triangle(Image& img, const Pixel& a, const Pixel& b, const Pixel& c,
                   const std::array<std::uint8_t, 3>& color) {
  const int x0 = std::max(0, static_cast<int>(std::floor(std::min({a.x(), b.x(), c.x()}))));
  const int x1 = std::min(img.width - 1,
                          static_cast<int>(std::ceil(std::max({a.x(), b.x(), c.x()}))));
  const int y0 = std::max(0, static_cast<int>(std::floor(std::min({a.y(), b.y(), c.y()}))));
  const int y1 = std::min(img.height - 1,
                          static_cast<int>(std::ceil(std::max({a.y(), b.y(), c.y()}))));
  const double area =
      (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
  if (std::abs(area) < 1e-12) return;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double px = x + 0.5, py = y + 0.5;
      const double w0 = (b.x() - a.x()) * (py - a.y()) - (b.y() - a.y()) * (px - a.x());
      const double w1 = (c.x() - b.x()) * (py - b.y()) - (c.y() - b.y()) * (px - b.x());
      const double w2 = (a.x() - c.x()) * (py - c.y()) - (a.y() - c.y()) * (px - c.x());
      const bool inside = (w0 >= 0 && w1 >= 0 && w2 >= 0) || (w0 <= 0 && w1 <= 0 && w2 <= 0);
      if (!inside) continue;
      for (int ch = 0; ch < 3; ++ch) img.at(x, y, ch) = color[ch];
    }
  }
}

}  // namespace

Transform label_pose(const Transform& base_to_camera_inv, const Transform& base_to_gripper,
                     const Transform& gripper_to_object) {
  return base_to_camera_inv * base_to_gripper * gripper_to_object;
}

std::optional<PixelRect> gripper_patch_rect(const CameraIntrinsics& k,
                                            const Transform& camera_to_object,
                                            double object_extent) {
  double u_min = 1e300, u_max = -1e300, v_min = 1e300, v_max = -1e300;
  bool any = false;
  for (const Vec3& corner : cuboid_corners(object_extent)) {
    const auto px = project_point(k, camera_to_object * corner);
    if (!px) continue;
    any = true;
    u_min = std::min(u_min, px->x());
    u_max = std::max(u_max, px->x());
    v_min = std::min(v_min, px->y());
    v_max = std::max(v_max, px->y());
  }
  if (!any) return std::nullopt;
  const double bbox_w = u_max - u_min;
  const double bbox_h = v_max - v_min;
  if (bbox_w < 1.0 || bbox_h < 1.0) return std::nullopt;

  // Simulated tape patch: a rectangle 0.6 x 0.25 of the silhouette bbox,
  // horizontally centered, 2 px below the silhouette.
  const double cu = 0.5 * (u_min + u_max);
  PixelRect r;
  r.x0 = static_cast<int>(std::lround(cu - 0.3 * bbox_w));
  r.x1 = static_cast<int>(std::lround(cu + 0.3 * bbox_w));
  r.y0 = static_cast<int>(std::lround(v_max)) + 2;
  r.y1 = r.y0 + static_cast<int>(std::lround(0.25 * bbox_h));
  r.x0 = std::max(r.x0, 0);
  r.y0 = std::max(r.y0, 0);
  r.x1 = std::min(r.x1, k.width - 1);
  r.y1 = std::min(r.y1, k.height - 1);
  if (r.x0 > r.x1 || r.y0 > r.y1) return std::nullopt;
  return r;
}

Image render_synthetic_frame(const CameraIntrinsics& k, const Transform& camera_to_object,
                             double object_extent, bool gripper_patch,
                             const std::array<std::uint8_t, 3>& background) {
  k.validate();
  Image img = Image::rgb(k.width, k.height, background[0], background[1], background[2]);

  const auto corners = cuboid_corners(object_extent);
  std::array<Vec3, 8> cam;  // camera-frame corners
  std::array<std::optional<Pixel>, 8> px;
  bool any_front = false;
  for (int i = 0; i < 8; ++i) {
    cam[i] = camera_to_object * corners[i];
    px[i] = project_point(k, cam[i]);
    any_front = any_front || px[i].has_value();
  }
  if (!any_front) throw BehindCameraError("cuboid entirely behind the camera");

  // Painter order: draw far faces first so nearer ones overwrite them.
  std::array<int, 6> order = {0, 1, 2, 3, 4, 5};
  std::array<double, 6> depth;
  for (int f = 0; f < 6; ++f) {
    double z = 0.0;
    for (int v = 0; v < 4; ++v) z += cam[kFaces[f][v]].z();
    depth[f] = 0.25 * z;
  }
  std::sort(order.begin(), order.end(),
            [&](int l, int r) { return depth[l] > depth[r]; });

  // Flat lambertian shading against the viewing direction, on a base color
  // whose green channel stays below the pure-green detector band.
  constexpr std::array<double, 3> kBase = {205.0, 120.0, 70.0};
  for (int f : order) {
    bool projectable = true;
    for (int v = 0; v < 4; ++v) projectable = projectable && px[kFaces[f][v]].has_value();
    if (!projectable) continue;

    const Vec3 n_cam =
        camera_to_object.rotation() *
        Vec3(kFaceNormals[f][0], kFaceNormals[f][1], kFaceNormals[f][2]);
    Vec3 center = Vec3::Zero();
    for (int v = 0; v < 4; ++v) center += 0.25 * cam[kFaces[f][v]];
    const Vec3 view = -center.normalized();  // toward the camera
    const double lambert = n_cam.dot(view);
    if (lambert <= 0.0) continue;  // back face

    std::array<std::uint8_t, 3> color;
    for (int ch = 0; ch < 3; ++ch) {
      const double v = kBase[ch] * (0.35 + 0.65 * lambert);
      color[ch] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
    }
    const auto& q = kFaces[f];
    fill_triangle(img, *px[q[0]], *px[q[1]], *px[q[2]], color);
    fill_triangle(img, *px[q[0]], *px[q[2]], *px[q[3]], color);
  }

  if (gripper_patch) {
    if (const auto rect = gripper_patch_rect(k, camera_to_object, object_extent)) {
      for (int y = rect->y0; y <= rect->y1; ++y)
        for (int x = rect->x0; x <= rect->x1; ++x) {
          img.at(x, y, 0) = 0;
          img.at(x, y, 1) = 255;
          img.at(x, y, 2) = 0;
        }
    }
  }
  return img;
}

Manifest run_capture(const CapturePlan& plan,
                     const std::optional<CalibrationResult>& calibration,
                     const CameraIntrinsics& intrinsics, const ObjectSpec& object,
                     const CaptureOptions& options) {
  if (!calibration) throw CalibrationMissing("capture requires a calibration result");
  if (plan.waypoints.empty()) throw EmptyPlan("capture plan has no waypoints");
  intrinsics.validate();
  object.validate();

  if (options.chain) {
    const auto dof = static_cast<Eigen::Index>(options.chain->joint_count());
    for (std::size_t i = 0; i < plan.waypoints.size(); ++i) {
      const Waypoint& wp = plan.waypoints[i];
      if (wp.joint_state.size() != dof)
        throw PlanChainMismatch("waypoint " + std::to_string(i) + " has " +
                                std::to_string(wp.joint_state.size()) + " joints, chain has " +
                                std::to_string(dof));
      const Transform fk = forward_kinematics(*options.chain, wp.joint_state);
      const Mat4 delta = fk.matrix() - wp.base_to_gripper.matrix();
      if (delta.cwiseAbs().maxCoeff() > 1e-9)
        throw PlanChainMismatch("waypoint " + std::to_string(i) +
                                " pose does not match chain forward kinematics");
    }
  }

  const bool render = options.mode == CaptureMode::kSim && options.render.enabled;
  if (render) std::filesystem::create_directories(options.render.directory);

  Manifest manifest;
  manifest.object = object;
  manifest.calibration_ref = options.calibration_ref;
  manifest.intrinsics_ref = options.intrinsics_ref;
  manifest.seed = options.seed;

  const Transform& camera_from_base = calibration->base_to_camera_inv;
  std::size_t record_index = 0;
  for (std::size_t i = 0; i < plan.waypoints.size(); ++i) {
    const Waypoint& wp = plan.waypoints[i];
    if (wp.operator_pause) {
      SessionEvent ev;
      ev.type = "operator_pause";
      ev.state_id = wp.state_id;
      ev.waypoint_index = i;
      ev.acknowledged = true;  // sim and dry-run both auto-acknowledge
      manifest.events.push_back(ev);
      continue;
    }

    CaptureRecord rec;
    rec.record_id = record_id_for(record_index++);
    rec.base_to_gripper = wp.base_to_gripper;
    rec.camera_to_object =
        label_pose(camera_from_base, wp.base_to_gripper, object.gripper_to_object);
    rec.label_quaternion = rec.camera_to_object.rotation_quat();
    rec.state_id = wp.state_id;
    rec.joint_state = wp.joint_state;

    const auto center = project_point(intrinsics, rec.camera_to_object.translation());
    if (!center)
      throw BehindCameraError("object origin behind the camera at waypoint " +
                              std::to_string(i));
    rec.label_pixel_center = *center;

    if (render) {
      const Image frame =
          render_synthetic_frame(intrinsics, rec.camera_to_object, options.render.object_extent,
                                 options.render.gripper_patch, options.render.background);
      const std::filesystem::path file =
          options.render.directory / (rec.record_id + options.render.extension);
      write_image(frame, file);
      rec.image_path = file.string();
    }
    manifest.records.push_back(std::move(rec));
  }
  return manifest;
}

void validate_manifest(const Manifest& manifest,
                       const std::optional<std::filesystem::path>& root) {
  if (manifest.schema_version != kManifestSchemaVersion)
    throw DataError("unsupported manifest schema version " +
                    std::to_string(manifest.schema_version));
  std::set<std::string> ids;
  for (const CaptureRecord& rec : manifest.records) {
    if (!ids.insert(rec.record_id).second)
      throw DataError("duplicate record id: " + rec.record_id);
    const double drift =
        arc_distance(rec.label_quaternion, rec.camera_to_object.rotation_quat());
    if (drift > 1e-9)
      throw DataError("record " + rec.record_id +
                      ": label quaternion disagrees with the pose rotation");
    if (!rec.image_path.empty() && root) {
      std::filesystem::path p(rec.image_path);
      if (p.is_relative()) p = *root / p;
      if (!std::filesystem::exists(p))
        throw DataError("record " + rec.record_id + ": missing image file " + p.string());
    }
  }
}

}  // namespace rocap
