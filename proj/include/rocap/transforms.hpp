#pragma once

#include <Eigen/Dense>

#include "rocap/errors.hpp"

namespace rocap {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

// Frame naming convention used throughout: a transform named `a_to_b`
// (symbolically aTb) maps coordinates of frame b into frame a:
//   p_a = a_to_b * p_b.

inline constexpr double kOrthoDriftTol = 1e-9;

/// Intrinsic Z-Y-X Euler angles (yaw about z, then pitch about y, then
/// roll about x), in degrees.
struct EulerAngles {
  double yaw = 0.0;
  double pitch = 0.0;
  double roll = 0.0;
};

/// Unit quaternion, w-first. Normalized on construction; the hemisphere is
/// not canonicalized (q and -q denote the same rotation, and arc_distance
/// treats them as equal).
class UnitQuaternion {
 public:
  UnitQuaternion() : w_(1.0), x_(0.0), y_(0.0), z_(0.0) {}
  UnitQuaternion(double w, double x, double y, double z);

  static UnitQuaternion from_rotation(const Mat3& rotation);
  static UnitQuaternion from_axis_angle(const Vec3& axis, double angle_rad);

  double w() const { return w_; }
  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }

  double dot(const UnitQuaternion& other) const {
    return w_ * other.w_ + x_ * other.x_ + y_ * other.y_ + z_ * other.z_;
  }

  Mat3 to_rotation() const;

 private:
  double w_, x_, y_, z_;
};

/// Rigid transform: orthonormal rotation plus translation in meters.
/// Construction re-orthonormalizes the rotation (polar factor) when the
/// orthogonality drift exceeds kOrthoDriftTol and rejects reflections.
class Transform {
 public:
  Transform() : rotation_(Mat3::Identity()), translation_(Vec3::Zero()) {}
  Transform(const Mat3& rotation, const Vec3& translation);
  Transform(const UnitQuaternion& rotation, const Vec3& translation)
      : Transform(rotation.to_rotation(), translation) {}

  static Transform identity() { return Transform(); }
  static Transform from_matrix(const Mat4& m);

  const Mat3& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }
  UnitQuaternion rotation_quat() const { return UnitQuaternion::from_rotation(rotation_); }
  Mat4 matrix() const;

  Transform inverse() const;

  /// Composition: (a * b) maps b's source frame through b then a.
  Transform operator*(const Transform& rhs) const;

  /// Applies the transform to a point.
  Vec3 operator*(const Vec3& p) const { return rotation_ * p + translation_; }

 private:
  Mat3 rotation_;
  Vec3 translation_;
};

/// Quaternion from intrinsic Z-Y-X Euler angles, i.e. the rotation
/// Rz(yaw) * Ry(pitch) * Rx(roll).
UnitQuaternion quat_from_euler(const EulerAngles& e);

/// Geodesic distance between two orientations in radians:
/// 2 * acos(min(1, |<q1,q2>|)), in [0, pi]. Sign-invariant (q vs -q).
double arc_distance(const UnitQuaternion& q1, const UnitQuaternion& q2);

inline Transform compose(const Transform& a, const Transform& b) { return a * b; }
inline Transform invert(const Transform& t) { return t.inverse(); }

/// Rotation-matrix logarithm: axis * angle with angle in [0, pi].
/// At angle pi the sign of the axis is fixed so its first nonzero
/// component is positive.
Vec3 so3_log(const Mat3& rotation);

/// Rodrigues exponential; falls back to a Taylor expansion below 1e-8 rad.
Mat3 so3_exp(const Vec3& axis_angle);

/// Rotation angle of R in [0, pi] (the geodesic distance to the identity).
double rotation_angle(const Mat3& rotation);

/// Nearest rotation matrix in the Frobenius sense (polar factor via SVD).
Mat3 orthonormalized(const Mat3& m);

/// Cross-product matrix: skew(v) * u == v x u.
Mat3 skew(const Vec3& v);

}  // namespace rocap
