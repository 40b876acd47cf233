#include "rocap/transforms.hpp"

#include <cmath>

namespace rocap {

namespace {

constexpr double kDegToRad = M_PI / 180.0;

bool all_finite(const Mat3& m) { return m.allFinite(); }

}  // namespace

UnitQuaternion::UnitQuaternion(double w, double x, double y, double z) {
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  if (!std::isfinite(n) || n < 1e-12) {
    throw DataError("quaternion components must be finite and not all zero");
  }
  w_ = w / n;
  x_ = x / n;
  y_ = y / n;
  z_ = z / n;
}

UnitQuaternion UnitQuaternion::from_rotation(const Mat3& rotation) {
  const Eigen::Quaterniond q(rotation);
  return UnitQuaternion(q.w(), q.x(), q.y(), q.z());
}

UnitQuaternion UnitQuaternion::from_axis_angle(const Vec3& axis, double angle_rad) {
  const double n = axis.norm();
  if (n < 1e-12) {
    throw DataError("axis must be nonzero");
  }
  const double h = 0.5 * angle_rad;
  const Vec3 a = axis * (std::sin(h) / n);
  return UnitQuaternion(std::cos(h), a.x(), a.y(), a.z());
}

Mat3 UnitQuaternion::to_rotation() const {
  return Eigen::Quaterniond(w_, x_, y_, z_).toRotationMatrix();
}

Transform::Transform(const Mat3& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {
  if (!all_finite(rotation) || !translation.allFinite()) {
    throw DataError("transform entries must be finite");
  }
  if (rotation_.determinant() < 0.0) {
    throw DataError("rotation block is left-handed (det < 0)");
  }
  const double drift =
      (rotation_.transpose() * rotation_ - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (drift > kOrthoDriftTol) {
    rotation_ = orthonormalized(rotation_);
  }
}

Transform Transform::from_matrix(const Mat4& m) {
  if ((m.row(3) - Eigen::RowVector4d(0, 0, 0, 1)).cwiseAbs().maxCoeff() > 1e-9) {
    throw DataError("homogeneous matrix must have bottom row [0 0 0 1]");
  }
  return Transform(m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>());
}

Mat4 Transform::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

Transform Transform::inverse() const {
  const Mat3 rt = rotation_.transpose();
  return Transform(rt, -(rt * translation_));
}

Transform Transform::operator*(const Transform& rhs) const {
  return Transform(rotation_ * rhs.rotation_, rotation_ * rhs.translation_ + translation_);
}

UnitQuaternion quat_from_euler(const EulerAngles& e) {
  if (!std::isfinite(e.yaw) || !std::isfinite(e.pitch) || !std::isfinite(e.roll)) {
    throw DataError("Euler angles must be finite");
  }
  const Eigen::Quaterniond q =
      Eigen::AngleAxisd(e.yaw * kDegToRad, Vec3::UnitZ()) *
      Eigen::AngleAxisd(e.pitch * kDegToRad, Vec3::UnitY()) *
      Eigen::AngleAxisd(e.roll * kDegToRad, Vec3::UnitX());
  return UnitQuaternion(q.w(), q.x(), q.y(), q.z());
}

double arc_distance(const UnitQuaternion& q1, const UnitQuaternion& q2) {
  return 2.0 * std::acos(std::min(1.0, std::abs(q1.dot(q2))));
}

Vec3 so3_log(const Mat3& rotation) {
  Eigen::Quaterniond q(rotation);
  if (q.w() < 0.0) {
    q.coeffs() *= -1.0;  // keep the angle in [0, pi]
  }
  Vec3 v(q.x(), q.y(), q.z());
  const double vn = v.norm();
  if (vn < 1e-12) {
    return 2.0 * v;  // small-angle limit of axis * 2*atan2(vn, w)
  }
  if (q.w() <= 1e-15) {
    // Angle of exactly pi: both signs of the axis are valid; make the
    // first nonzero component positive.
    for (int i = 0; i < 3; ++i) {
      if (std::abs(v[i]) > 1e-12) {
        if (v[i] < 0.0) v = -v;
        break;
      }
    }
  }
  const double angle = 2.0 * std::atan2(vn, q.w());
  return v * (angle / vn);
}

Mat3 so3_exp(const Vec3& axis_angle) {
  if (!axis_angle.allFinite()) {
    throw DataError("axis-angle vector must be finite");
  }
  const double t2 = axis_angle.squaredNorm();
  double a, b;  // R = I + a*[v]x + b*[v]x^2
  if (t2 < 1e-16) {
    a = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
    b = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
  } else {
    const double t = std::sqrt(t2);
    a = std::sin(t) / t;
    b = (1.0 - std::cos(t)) / t2;
  }
  const Mat3 k = skew(axis_angle);
  return Mat3::Identity() + a * k + b * (k * k);
}

double rotation_angle(const Mat3& rotation) {
  const double c = std::clamp((rotation.trace() - 1.0) * 0.5, -1.0, 1.0);
  return std::acos(c);
}

Mat3 orthonormalized(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  if ((u * svd.matrixV().transpose()).determinant() < 0.0) {
    u.col(2) *= -1.0;
  }
  return u * svd.matrixV().transpose();
}

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
      -v.y(), v.x(), 0.0;
  return m;
}

}  // namespace rocap
