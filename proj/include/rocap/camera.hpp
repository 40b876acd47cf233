#pragma once

#include <optional>
#include <vector>

#include "rocap/transforms.hpp"

namespace rocap {

using Pixel = Eigen::Vector2d;

struct CameraIntrinsics {
  double fx = 0.0, fy = 0.0;  // focal lengths, px
  double cx = 0.0, cy = 0.0;  // principal point, px
  int width = 0, height = 0;  // image size, px

  void validate() const;
};

struct Checkerboard {
  int inner_rows = 0;
  int inner_cols = 0;
  double square_size = 0.0;  // m

  void validate() const;
  int corner_count() const { return inner_rows * inner_cols; }
};

/// Ideal pinhole projection of a camera-frame point. Returns nullopt when
/// the point is at or behind the optical center (z <= 1e-9).
std::optional<Pixel> project_point(const CameraIntrinsics& k, const Vec3& p_cam);

/// Board-frame corner positions, row-major: corner (i, j) sits at
/// (j * square_size, i * square_size, 0).
std::vector<Vec3> checkerboard_corners(const Checkerboard& board);

/// Projects the corner grid through camera_to_target (cTt). Throws
/// BehindCameraError if any corner falls behind the camera.
std::vector<Pixel> project_checkerboard(const CameraIntrinsics& k,
                                        const Transform& camera_to_target,
                                        const Checkerboard& board);

struct PlanarPoseOptions {
  bool refine = true;     // Gauss-Newton reprojection refinement after DLT
  int refine_iters = 10;
};

/// Planar target pose (cTt) from observed corner pixels, row-major order
/// matching checkerboard_corners. Homography DLT with Hartley conditioning,
/// decomposed to [r1 r2 t] and polar-orthonormalized; translation z is
/// forced positive. Throws CountMismatch or DegenerateCorners.
Transform estimate_planar_pose(const CameraIntrinsics& k, const Checkerboard& board,
                               const std::vector<Pixel>& corners,
                               const PlanarPoseOptions& options = {});

}  // namespace rocap
