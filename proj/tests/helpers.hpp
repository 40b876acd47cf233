#pragma once

// Shared generators and fixtures for the unit suites. Everything here is
// deterministic given the caller's RNG so test values stay frozen.

#include <filesystem>
#include <random>
#include <vector>

#include "rocap/handeye.hpp"
#include "rocap/kinematics.hpp"
#include "rocap/transforms.hpp"

namespace testutil {

using rocap::DHChain;
using rocap::DHLink;
using rocap::JointState;
using rocap::Mat3;
using rocap::Transform;
using rocap::UnitQuaternion;
using rocap::Vec3;

inline UnitQuaternion random_quaternion(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  double w = g(rng), x = g(rng), y = g(rng), z = g(rng);
  while (w * w + x * x + y * y + z * z < 1e-12) {
    w = g(rng);
    x = g(rng);
    y = g(rng);
    z = g(rng);
  }
  return UnitQuaternion(w, x, y, z);
}

inline Mat3 random_rotation(std::mt19937_64& rng) {
  return random_quaternion(rng).to_rotation();
}

inline Transform random_transform(std::mt19937_64& rng, double span = 1.0) {
  std::uniform_real_distribution<double> u(-span, span);
  const Mat3 r = random_rotation(rng);
  return Transform(r, Vec3(u(rng), u(rng), u(rng)));
}

// Two-link planar arm along x: closed-form workspace of radius 2.
inline DHChain planar_2r() {
  DHLink l1, l2;
  l1.a = 1.0;
  l2.a = 1.0;
  return DHChain({l1, l2});
}

// The stock 6R chain with limits widened to a full turn per joint.
inline DHChain open_limits_chain() {
  std::vector<DHLink> links = rocap::reference_chain().links();
  for (DHLink& l : links) {
    l.limit_min = -M_PI;
    l.limit_max = M_PI;
  }
  return DHChain(std::move(links));
}

inline JointState random_joints_in_limits(const DHChain& chain, std::mt19937_64& rng) {
  JointState q(static_cast<Eigen::Index>(chain.joint_count()));
  for (std::size_t i = 0; i < chain.joint_count(); ++i) {
    std::uniform_real_distribution<double> u(chain.links()[i].limit_min,
                                             chain.links()[i].limit_max);
    q[static_cast<Eigen::Index>(i)] = u(rng);
  }
  return q;
}

// A camera pose in the base frame (bTc) placed at `eye`, optical axis
// aimed at `look_at`, with a deterministic roll.
inline Transform camera_in_base(const Vec3& eye, const Vec3& look_at) {
  const Vec3 z = (look_at - eye).normalized();
  Vec3 up(0.0, 0.0, 1.0);
  if (std::abs(z.dot(up)) > 0.99) up = Vec3(0.0, 1.0, 0.0);
  const Vec3 x = up.cross(z).normalized();
  const Vec3 y = z.cross(x);
  Mat3 r;
  r.col(0) = x;
  r.col(1) = y;
  r.col(2) = z;
  return Transform(r, eye);
}

// Scratch directory unique to this process, wiped on first use per tag.
inline std::filesystem::path fresh_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("rocap_test_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testutil
