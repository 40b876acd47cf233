#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rocap/transforms.hpp"

namespace rocap {

/// One Denavit-Hartenberg link (standard convention), revolute joint.
/// The per-link transform is Rz(q + theta_offset) * Tz(d) * Tx(a) * Rx(alpha).
struct DHLink {
  double a = 0.0;             // link length, m
  double alpha = 0.0;         // link twist, rad
  double d = 0.0;             // link offset, m
  double theta_offset = 0.0;  // joint angle offset, rad
  double limit_min = -M_PI;   // rad, closed interval
  double limit_max = M_PI;
};

using JointState = Eigen::VectorXd;

class DHChain {
 public:
  explicit DHChain(std::vector<DHLink> links);

  std::size_t joint_count() const { return links_.size(); }
  const std::vector<DHLink>& links() const { return links_; }

 private:
  std::vector<DHLink> links_;
};

/// Base-to-gripper pose (bTg) for the given joint configuration.
Transform forward_kinematics(const DHChain& chain, const JointState& q);

/// Geometric Jacobian in the base frame: rows 0-2 linear (m/rad),
/// rows 3-5 angular (rad/rad), one column per joint.
Eigen::Matrix<double, 6, Eigen::Dynamic> jacobian(const DHChain& chain, const JointState& q);

/// True iff every joint lies within its closed [min, max] interval.
bool check_limits(const DHChain& chain, const JointState& q);

struct IkOptions {
  double tol_pos = 1e-8;    // m
  double tol_rot = 1e-8;    // rad
  int max_iter = 200;       // per restart
  double damping = 0.05;    // DLS lambda
  double max_step = 0.2;    // rad per joint per iteration
  int restarts = 8;         // perturbed re-seeds before giving up
  std::uint64_t seed = 0;   // drives the restart perturbations
};

/// Damped-least-squares inverse kinematics. Joint limits are enforced by
/// clamping inside the iteration. Returns nullopt when no restart reaches
/// the tolerances (the target is treated as unreachable).
std::optional<JointState> solve_ik(const DHChain& chain, const Transform& target,
                                   const JointState& seed, const IkOptions& options = {});

/// The 6R chain shipped as the default simulated arm (UR5-like geometry,
/// +-170 deg limits on joints 1/4/6 and +-120 deg on joints 2/3/5).
DHChain reference_chain();

}  // namespace rocap
