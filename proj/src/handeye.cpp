#include "rocap/handeye.hpp"

#include <cmath>
#include <random>

namespace rocap {

namespace {

constexpr double kDegenerateAngle = 1e-3;       // rad, motion carries no rotation signal
constexpr double kMinAxisSpread = 5.0 * M_PI / 180.0;

MotionPair make_pair(const Station& si, const Station& sj) {
  MotionPair p;
  p.a = sj.base_to_gripper * si.base_to_gripper.inverse();
  p.b = sj.camera_to_target * si.camera_to_target.inverse();
  p.degenerate = rotation_angle(p.a.rotation()) < kDegenerateAngle;
  return p;
}

}  // namespace

std::vector<MotionPair> build_motion_pairs(const std::vector<Station>& stations,
                                           PairingStrategy pairing) {
  if (stations.size() < 3) {
    throw TooFewStations("hand-eye calibration needs at least 3 stations, got " +
                         std::to_string(stations.size()));
  }
  if (pairing == PairingStrategy::kAuto) {
    pairing = stations.size() <= 20 ? PairingStrategy::kAllPairs : PairingStrategy::kConsecutive;
  }

  std::vector<MotionPair> pairs;
  if (pairing == PairingStrategy::kConsecutive) {
    for (std::size_t i = 0; i + 1 < stations.size(); ++i) {
      pairs.push_back(make_pair(stations[i], stations[i + 1]));
    }
  } else {
    for (std::size_t i = 0; i < stations.size(); ++i) {
      for (std::size_t j = i + 1; j < stations.size(); ++j) {
        pairs.push_back(make_pair(stations[i], stations[j]));
      }
    }
  }
  return pairs;
}

CalibrationResult solve_ax_xb(const std::vector<MotionPair>& pairs,
                              const std::vector<Station>& stations) {
  std::vector<const MotionPair*> usable;
  for (const MotionPair& p : pairs) {
    if (!p.degenerate) {
      usable.push_back(&p);
    }
  }
  if (usable.size() < 2) {
    throw TooFewPairs("need at least 2 non-degenerate motion pairs, got " +
                      std::to_string(usable.size()));
  }

  // Rotation axes must span at least two directions or Rx is unobservable.
  std::vector<Vec3> alphas, betas;
  for (const MotionPair* p : usable) {
    alphas.push_back(so3_log(p->a.rotation()));
    betas.push_back(so3_log(p->b.rotation()));
  }
  double max_spread = 0.0;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    for (std::size_t j = i + 1; j < alphas.size(); ++j) {
      const Vec3 u = alphas[i].normalized();
      const Vec3 v = alphas[j].normalized();
      // Axis spread ignoring axis sign (a rotation of -theta about -u
      // equals +theta about u).
      const double c = std::min(1.0, std::abs(u.dot(v)));
      max_spread = std::max(max_spread, std::acos(c));
    }
  }
  if (max_spread < kMinAxisSpread) {
    throw DegenerateMotion("rotation axes are near-parallel (spread " +
                           std::to_string(max_spread * 180.0 / M_PI) + " deg < 5 deg)");
  }

  // Rotation: minimize sum ||alpha_i - Rx beta_i||^2 via the Park-Martin
  // closed form Rx = (M^T M)^(-1/2) M^T with M = sum beta_i alpha_i^T.
  Mat3 m = Mat3::Zero();
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    m += betas[i] * alphas[i].transpose();
  }
  const Mat3 mtm = m.transpose() * m;
  Eigen::SelfAdjointEigenSolver<Mat3> eig(mtm);
  if (!(eig.info() == Eigen::Success)) {
    throw SingularNormalEquations("eigendecomposition of M^T M failed");
  }
  Vec3 inv_sqrt;
  for (int i = 0; i < 3; ++i) {
    inv_sqrt[i] = 1.0 / std::sqrt(std::max(eig.eigenvalues()[i], 1e-12));
  }
  const Mat3 rx_raw =
      eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().transpose() * m.transpose();
  const Mat3 rx = orthonormalized(rx_raw);
  if (rx.determinant() < 0.0) {
    throw SingularNormalEquations("rotation solve produced a reflection");
  }

  // Translation: stack (R_ai - I) tx = Rx t_bi - t_ai over usable pairs.
  const auto rows = static_cast<Eigen::Index>(3 * usable.size());
  Eigen::MatrixXd c(rows, 3);
  Eigen::VectorXd d(rows);
  for (std::size_t i = 0; i < usable.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(3 * i);
    c.block<3, 3>(r, 0) = usable[i]->a.rotation() - Mat3::Identity();
    d.segment<3>(r) = rx * usable[i]->b.translation() - usable[i]->a.translation();
  }
  const Eigen::Matrix3d ctc = c.transpose() * c;
  Eigen::JacobiSVD<Mat3> tsvd(ctc, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (tsvd.singularValues()(2) < 1e-12 * tsvd.singularValues()(0)) {
    throw SingularNormalEquations("translation normal equations are singular");
  }
  const Vec3 tx = ctc.ldlt().solve(c.transpose() * d);

  const Transform x(rx, tx);  // bTc

  CalibrationResult result;
  result.base_to_camera_inv = x.inverse();

  // gTt follows from any station; average the per-station estimates on the
  // log map around the first one to damp noise.
  const Transform g0 = stations.empty()
                           ? Transform::identity()
                           : stations.front().base_to_gripper.inverse() * x *
                                 stations.front().camera_to_target;
  if (!stations.empty()) {
    Vec3 rot_acc = Vec3::Zero();
    Vec3 trans_acc = Vec3::Zero();
    for (const Station& s : stations) {
      const Transform gi = s.base_to_gripper.inverse() * x * s.camera_to_target;
      rot_acc += so3_log(gi.rotation() * g0.rotation().transpose());
      trans_acc += gi.translation();
    }
    const double inv_n = 1.0 / static_cast<double>(stations.size());
    result.gripper_to_target =
        Transform(so3_exp(rot_acc * inv_n) * g0.rotation(), trans_acc * inv_n);
  }

  double rot_sq = 0.0, trans_sq = 0.0;
  for (std::size_t i = 0; i < usable.size(); ++i) {
    rot_sq += (alphas[i] - rx * betas[i]).squaredNorm();
    trans_sq += ((usable[i]->a.rotation() - Mat3::Identity()) * tx -
                 (rx * usable[i]->b.translation() - usable[i]->a.translation()))
                    .squaredNorm();
  }
  result.rot_residual_rms = std::sqrt(rot_sq / static_cast<double>(usable.size()));
  result.trans_residual_rms = std::sqrt(trans_sq / static_cast<double>(usable.size()));
  return result;
}

std::vector<Station> simulate_stations(const Transform& base_to_camera_true,
                                       const Transform& gripper_to_target_true,
                                       const DHChain& chain,
                                       const std::vector<JointState>& configs,
                                       const StationNoise& noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  const Transform camera_from_base = base_to_camera_true.inverse();
  std::vector<Station> stations;
  stations.reserve(configs.size());
  for (const JointState& q : configs) {
    Station s;
    s.base_to_gripper = forward_kinematics(chain, q);
    Transform cam_target = camera_from_base * s.base_to_gripper * gripper_to_target_true;

    if (noise.rot_deg > 0.0 || noise.trans_m > 0.0) {
      Vec3 axis(unit(rng), unit(rng), unit(rng));
      while (axis.norm() < 1e-6) {
        axis = Vec3(unit(rng), unit(rng), unit(rng));
      }
      axis.normalize();
      const double angle = gauss(rng) * noise.rot_deg * M_PI / 180.0;
      const Vec3 dt(gauss(rng) * noise.trans_m, gauss(rng) * noise.trans_m,
                    gauss(rng) * noise.trans_m);
      cam_target = Transform(so3_exp(axis * angle) * cam_target.rotation(),
                             cam_target.translation() + dt);
    }
    s.camera_to_target = cam_target;
    stations.push_back(std::move(s));
  }
  return stations;
}

}  // namespace rocap
