#include "rocap/camera.hpp"

#include <cmath>

namespace rocap {

namespace {

struct Conditioning {
  Mat3 t = Mat3::Identity();  // similarity: centroid to origin, mean radius sqrt(2)
};

Conditioning condition_points(const std::vector<Eigen::Vector2d>& pts) {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  double rad = 0.0;
  for (const auto& p : pts) rad += (p - mean).norm();
  rad /= static_cast<double>(pts.size());
  const double s = (rad > 1e-12) ? std::sqrt(2.0) / rad : 1.0;
  Conditioning c;
  c.t << s, 0, -s * mean.x(),
         0, s, -s * mean.y(),
         0, 0, 1;
  return c;
}

// Homography mapping board plane (X, Y) to normalized image coordinates.
Mat3 dlt_homography(const std::vector<Eigen::Vector2d>& board,
                    const std::vector<Eigen::Vector2d>& img) {
  const auto n = static_cast<Eigen::Index>(board.size());
  const Conditioning cb = condition_points(board);
  const Conditioning ci = condition_points(img);

  Eigen::MatrixXd a(2 * n, 9);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Vector3d p = cb.t * Eigen::Vector3d(board[i].x(), board[i].y(), 1.0);
    const Eigen::Vector3d q = ci.t * Eigen::Vector3d(img[i].x(), img[i].y(), 1.0);
    a.row(2 * i) << 0, 0, 0, -p.x(), -p.y(), -1, q.y() * p.x(), q.y() * p.y(), q.y();
    a.row(2 * i + 1) << p.x(), p.y(), 1, 0, 0, 0, -q.x() * p.x(), -q.x() * p.y(), -q.x();
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv(0) < 1e-12 || sv(7) / sv(0) < 1e-10) {
    throw DegenerateCorners("corner configuration is rank-deficient (collinear?)");
  }
  const Eigen::VectorXd h = svd.matrixV().col(8);
  Mat3 hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  return ci.t.inverse() * hn * cb.t;
}

Eigen::Vector2d normalized_coords(const CameraIntrinsics& k, const Pixel& px) {
  return {(px.x() - k.cx) / k.fx, (px.y() - k.cy) / k.fy};
}

// Gauss-Newton on reprojection error over (rotation log perturbation, t).
Transform refine_pose(const CameraIntrinsics& k, const std::vector<Vec3>& board_pts,
                      const std::vector<Pixel>& corners, Transform pose, int iters) {
  const auto n = static_cast<Eigen::Index>(board_pts.size());
  for (int it = 0; it < iters; ++it) {
    Eigen::MatrixXd j(2 * n, 6);
    Eigen::VectorXd r(2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Vec3 pc = pose * board_pts[static_cast<std::size_t>(i)];
      if (pc.z() <= 1e-9) {
        return pose;  // refinement walked out of the frustum; keep DLT result
      }
      const double iz = 1.0 / pc.z();
      const double u = k.fx * pc.x() * iz + k.cx;
      const double v = k.fy * pc.y() * iz + k.cy;
      r(2 * i) = corners[static_cast<std::size_t>(i)].x() - u;
      r(2 * i + 1) = corners[static_cast<std::size_t>(i)].y() - v;

      Eigen::Matrix<double, 2, 3> duv_dp;
      duv_dp << k.fx * iz, 0.0, -k.fx * pc.x() * iz * iz,
                0.0, k.fy * iz, -k.fy * pc.y() * iz * iz;
      // Left perturbation: p = exp([w]) * (R P) + t + dt.
      const Vec3 rp = pose.rotation() * board_pts[static_cast<std::size_t>(i)];
      j.block<2, 3>(2 * i, 0) = -duv_dp * skew(rp);
      j.block<2, 3>(2 * i, 3) = duv_dp;
    }
    const Eigen::Matrix<double, 6, 6> jtj = j.transpose() * j;
    const Eigen::Matrix<double, 6, 1> step = jtj.ldlt().solve(j.transpose() * r);
    if (!step.allFinite()) {
      return pose;
    }
    pose = Transform(so3_exp(step.head<3>()) * pose.rotation(),
                     pose.translation() + step.tail<3>());
    if (step.norm() < 1e-14) {
      break;
    }
  }
  return pose;
}

}  // namespace

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw DataError("focal lengths must be positive");
  }
  if (!(cx > 0.0 && cx < width) || !(cy > 0.0 && cy < height)) {
    throw DataError("principal point must lie inside the image");
  }
}

void Checkerboard::validate() const {
  if (inner_rows < 3 || inner_cols < 3) {
    throw DataError("checkerboard needs at least 3x3 inner corners");
  }
  if (!(square_size > 0.0)) {
    throw DataError("square size must be positive");
  }
}

std::optional<Pixel> project_point(const CameraIntrinsics& k, const Vec3& p_cam) {
  if (p_cam.z() <= 1e-9) {
    return std::nullopt;
  }
  return Pixel(k.fx * p_cam.x() / p_cam.z() + k.cx, k.fy * p_cam.y() / p_cam.z() + k.cy);
}

std::vector<Vec3> checkerboard_corners(const Checkerboard& board) {
  board.validate();
  std::vector<Vec3> pts;
  pts.reserve(static_cast<std::size_t>(board.corner_count()));
  for (int i = 0; i < board.inner_rows; ++i) {
    for (int j = 0; j < board.inner_cols; ++j) {
      pts.emplace_back(j * board.square_size, i * board.square_size, 0.0);
    }
  }
  return pts;
}

std::vector<Pixel> project_checkerboard(const CameraIntrinsics& k,
                                        const Transform& camera_to_target,
                                        const Checkerboard& board) {
  std::vector<Pixel> out;
  for (const Vec3& p : checkerboard_corners(board)) {
    const auto px = project_point(k, camera_to_target * p);
    if (!px) {
      throw BehindCameraError("checkerboard corner behind the camera");
    }
    out.push_back(*px);
  }
  return out;
}

Transform estimate_planar_pose(const CameraIntrinsics& k, const Checkerboard& board,
                               const std::vector<Pixel>& corners,
                               const PlanarPoseOptions& options) {
  const std::vector<Vec3> board_pts = checkerboard_corners(board);
  if (corners.size() != board_pts.size()) {
    throw CountMismatch("expected " + std::to_string(board_pts.size()) + " corners, got " +
                        std::to_string(corners.size()));
  }

  std::vector<Eigen::Vector2d> plane, img;
  plane.reserve(board_pts.size());
  img.reserve(corners.size());
  for (const Vec3& p : board_pts) plane.emplace_back(p.x(), p.y());
  for (const Pixel& c : corners) img.push_back(normalized_coords(k, c));

  Mat3 h = dlt_homography(plane, img);

  // A pose-induced homography is invertible; a rank-deficient H (e.g. all
  // observed corners collinear) projects the plane onto a line and carries
  // no depth information.
  if (std::abs(Mat3(h / h.norm()).determinant()) < 1e-9) {
    throw DegenerateCorners("observed corners are collinear or otherwise rank-deficient");
  }

  // H ~ [r1 r2 t] up to scale in normalized coordinates.
  const double scale = 2.0 / (h.col(0).norm() + h.col(1).norm());
  h *= scale;
  if (h(2, 2) < 0.0) {
    h = -h;  // target must sit in front of the camera
  }
  Mat3 r;
  r.col(0) = h.col(0);
  r.col(1) = h.col(1);
  r.col(2) = h.col(0).cross(h.col(1));
  Transform pose(orthonormalized(r), h.col(2));

  if (options.refine) {
    pose = refine_pose(k, board_pts, corners, pose, options.refine_iters);
  }
  return pose;
}

}  // namespace rocap
