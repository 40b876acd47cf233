#include "rocap/kinematics.hpp"

#include <cmath>
#include <random>

namespace rocap {

namespace {

void require_length(const DHChain& chain, const JointState& q) {
  if (static_cast<std::size_t>(q.size()) != chain.joint_count()) {
    throw LengthMismatch("joint vector has " + std::to_string(q.size()) +
                         " entries, chain has " + std::to_string(chain.joint_count()));
  }
}

Mat4 dh_link_matrix(const DHLink& link, double q) {
  const double theta = q + link.theta_offset;
  const double ct = std::cos(theta), st = std::sin(theta);
  const double ca = std::cos(link.alpha), sa = std::sin(link.alpha);
  Mat4 m;
  m << ct, -st * ca, st * sa, link.a * ct,
       st, ct * ca, -ct * sa, link.a * st,
       0.0, sa, ca, link.d,
       0.0, 0.0, 0.0, 1.0;
  return m;
}

// Pose error of `current` relative to `target` as a 6-vector
// [translation; rotation log], both expressed in the base frame.
Eigen::Matrix<double, 6, 1> pose_error(const Transform& target, const Transform& current) {
  Eigen::Matrix<double, 6, 1> e;
  e.head<3>() = target.translation() - current.translation();
  e.tail<3>() = so3_log(target.rotation() * current.rotation().transpose());
  return e;
}

JointState clamp_to_limits(const DHChain& chain, JointState q) {
  for (std::size_t i = 0; i < chain.joint_count(); ++i) {
    q[static_cast<Eigen::Index>(i)] = std::clamp(q[static_cast<Eigen::Index>(i)],
                                                 chain.links()[i].limit_min,
                                                 chain.links()[i].limit_max);
  }
  return q;
}

}  // namespace

DHChain::DHChain(std::vector<DHLink> links) : links_(std::move(links)) {
  if (links_.empty()) {
    throw DataError("DH chain needs at least one link");
  }
  for (const DHLink& l : links_) {
    if (!std::isfinite(l.a) || !std::isfinite(l.alpha) || !std::isfinite(l.d) ||
        !std::isfinite(l.theta_offset) || !std::isfinite(l.limit_min) ||
        !std::isfinite(l.limit_max)) {
      throw DataError("DH parameters must be finite");
    }
    if (!(l.limit_min < l.limit_max)) {
      throw DataError("joint limits require min < max");
    }
  }
}

Transform forward_kinematics(const DHChain& chain, const JointState& q) {
  require_length(chain, q);
  Mat4 t = Mat4::Identity();
  for (std::size_t i = 0; i < chain.joint_count(); ++i) {
    t = t * dh_link_matrix(chain.links()[i], q[static_cast<Eigen::Index>(i)]);
  }
  return Transform::from_matrix(t);
}

Eigen::Matrix<double, 6, Eigen::Dynamic> jacobian(const DHChain& chain, const JointState& q) {
  require_length(chain, q);
  const auto n = static_cast<Eigen::Index>(chain.joint_count());

  // Joint i rotates about the z-axis of frame i-1.
  std::vector<Vec3> origins(chain.joint_count() + 1);
  std::vector<Vec3> axes(chain.joint_count() + 1);
  Mat4 t = Mat4::Identity();
  origins[0] = Vec3::Zero();
  axes[0] = Vec3::UnitZ();
  for (std::size_t i = 0; i < chain.joint_count(); ++i) {
    t = t * dh_link_matrix(chain.links()[i], q[static_cast<Eigen::Index>(i)]);
    origins[i + 1] = t.topRightCorner<3, 1>();
    axes[i + 1] = t.topLeftCorner<3, 3>().col(2);
  }
  const Vec3 tip = origins[chain.joint_count()];

  Eigen::Matrix<double, 6, Eigen::Dynamic> j(6, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec3& z = axes[static_cast<std::size_t>(i)];
    const Vec3& p = origins[static_cast<std::size_t>(i)];
    j.col(i).head<3>() = z.cross(tip - p);
    j.col(i).tail<3>() = z;
  }
  return j;
}

bool check_limits(const DHChain& chain, const JointState& q) {
  require_length(chain, q);
  for (std::size_t i = 0; i < chain.joint_count(); ++i) {
    const double v = q[static_cast<Eigen::Index>(i)];
    if (v < chain.links()[i].limit_min || v > chain.links()[i].limit_max) {
      return false;
    }
  }
  return true;
}

std::optional<JointState> solve_ik(const DHChain& chain, const Transform& target,
                                   const JointState& seed, const IkOptions& options) {
  require_length(chain, seed);
  const auto n = static_cast<Eigen::Index>(chain.joint_count());

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  for (int attempt = 0; attempt <= options.restarts; ++attempt) {
    JointState q = seed;
    if (attempt > 0 && attempt % 2 == 1) {
      // Odd restarts re-seed uniformly within the limits to escape the
      // seed's solution branch.
      for (Eigen::Index i = 0; i < n; ++i) {
        const DHLink& link = chain.links()[static_cast<std::size_t>(i)];
        q[i] = link.limit_min + (link.limit_max - link.limit_min) * uniform(rng);
      }
    } else if (attempt > 0) {
      // Even restarts widen a Gaussian perturbation around the seed.
      const double scale = 0.3 * attempt;
      for (Eigen::Index i = 0; i < n; ++i) {
        q[i] += scale * gauss(rng);
      }
    }
    q = clamp_to_limits(chain, q);

    // Constant-step damped iteration. Deliberately non-monotone: accepting
    // every step lets the iterate wander out of shallow minima, and the
    // stall counter hands persistent failures to the next restart.
    double best_err = std::numeric_limits<double>::infinity();
    int stalled = 0;
    for (int iter = 0; iter < options.max_iter; ++iter) {
      const Transform current = forward_kinematics(chain, q);
      const Eigen::Matrix<double, 6, 1> e = pose_error(target, current);
      const double pos_err = e.head<3>().norm();
      const double rot_err = e.tail<3>().norm();
      if (pos_err <= options.tol_pos && rot_err <= options.tol_rot) {
        return q;
      }

      const double err = e.norm();
      stalled = (err > best_err - 1e-14) ? stalled + 1 : 0;
      if (stalled > 15) {
        break;
      }
      best_err = std::min(best_err, err);

      // Error-proportional damping, capped at options.damping: far from the
      // target the full lambda stabilizes the step, near it the iteration
      // approaches Gauss-Newton so convergence is quadratic. The step clamp
      // still bounds near-singular blowups.
      const double lambda = std::min(options.damping, err);
      const double lambda2 = std::max(lambda * lambda, 1e-12);
      const auto j = jacobian(chain, q);
      const Eigen::Matrix<double, 6, 6> jjt =
          j * j.transpose() + lambda2 * Eigen::Matrix<double, 6, 6>::Identity();
      JointState dq = j.transpose() * jjt.ldlt().solve(e);
      for (Eigen::Index i = 0; i < n; ++i) {
        dq[i] = std::clamp(dq[i], -options.max_step, options.max_step);
      }
      q = clamp_to_limits(chain, q + dq);
    }
  }
  return std::nullopt;
}

DHChain reference_chain() {
  const double lim_a = 170.0 * M_PI / 180.0;
  const double lim_b = 120.0 * M_PI / 180.0;
  return DHChain({
      {0.0, M_PI / 2, 0.0892, 0.0, -lim_a, lim_a},
      {-0.425, 0.0, 0.0, 0.0, -lim_b, lim_b},
      {-0.392, 0.0, 0.0, 0.0, -lim_b, lim_b},
      {0.0, M_PI / 2, 0.1093, 0.0, -lim_a, lim_a},
      {0.0, -M_PI / 2, 0.0947, 0.0, -lim_b, lim_b},
      {0.0, 0.0, 0.0823, 0.0, -lim_a, lim_a},
  });
}

}  // namespace rocap
