#include <doctest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "rocap/handeye.hpp"

using namespace rocap;

namespace {

std::vector<JointState> random_configs(const DHChain& chain, int n, std::mt19937_64& rng) {
  std::vector<JointState> configs;
  configs.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) configs.push_back(testutil::random_joints_in_limits(chain, rng));
  return configs;
}

double rot_error(const Transform& a, const Transform& b) {
  return rotation_angle(a.rotation().transpose() * b.rotation());
}

struct SolveErrors {
  double rot = 0.0;
  double trans = 0.0;
};

SolveErrors solve_once(const Transform& btc_true, const Transform& gtt_true, int station_count,
                       const StationNoise& noise, std::uint64_t seed, PairingStrategy pairing) {
  const DHChain chain = reference_chain();
  std::mt19937_64 rng(seed * 7919 + 13);
  const auto configs = random_configs(chain, station_count, rng);
  const auto stations = simulate_stations(btc_true, gtt_true, chain, configs, noise, seed);
  const auto result = solve_ax_xb(build_motion_pairs(stations, pairing), stations);
  const Transform ctb_true = btc_true.inverse();
  return {rot_error(result.base_to_camera_inv, ctb_true),
          (result.base_to_camera_inv.translation() - ctb_true.translation()).norm()};
}

}  // namespace

TEST_SUITE_BEGIN("handeye");

TEST_CASE("fewer than three stations is an error") {
  std::mt19937_64 rng(1);
  std::vector<Station> stations;
  CHECK_THROWS_AS(build_motion_pairs(stations), TooFewStations);
  stations.push_back({testutil::random_transform(rng), testutil::random_transform(rng)});
  stations.push_back({testutil::random_transform(rng), testutil::random_transform(rng)});
  CHECK_THROWS_AS(build_motion_pairs(stations), TooFewStations);
}

TEST_CASE("pair counts per strategy") {
  std::mt19937_64 rng(2);
  const DHChain chain = reference_chain();
  const Transform btc = testutil::random_transform(rng);
  const Transform gtt = testutil::random_transform(rng, 0.2);

  auto make = [&](int n) {
    std::mt19937_64 config_rng(100 + n);
    return simulate_stations(btc, gtt, chain, random_configs(chain, n, config_rng), {}, 5);
  };

  CHECK(build_motion_pairs(make(3), PairingStrategy::kConsecutive).size() == 2);
  CHECK(build_motion_pairs(make(6), PairingStrategy::kAllPairs).size() == 15);
  CHECK(build_motion_pairs(make(20), PairingStrategy::kAuto).size() == 190);  // all pairs
  CHECK(build_motion_pairs(make(21), PairingStrategy::kAuto).size() == 20);   // consecutive
}

TEST_CASE("identical stations give degenerate pairs") {
  std::mt19937_64 rng(3);
  const Station s{testutil::random_transform(rng), testutil::random_transform(rng)};
  const std::vector<Station> stations(4, s);
  const auto pairs = build_motion_pairs(stations, PairingStrategy::kConsecutive);
  REQUIRE(pairs.size() == 3);
  for (const MotionPair& p : pairs) {
    CHECK(p.degenerate);
    // R * R^-1 measured through acos((trace-1)/2) floors at ~1e-8.
    CHECK(rotation_angle(p.a.rotation()) < 1e-7);
  }
  CHECK_THROWS_AS(solve_ax_xb(pairs, stations), TooFewPairs);
}

TEST_CASE("motion pairs preserve the rotation angle across frames") {
  std::mt19937_64 rng(4);
  const DHChain chain = reference_chain();
  const Transform btc = testutil::random_transform(rng);
  const Transform gtt = testutil::random_transform(rng, 0.2);
  const auto stations =
      simulate_stations(btc, gtt, chain, random_configs(chain, 12, rng), {}, 17);
  const auto pairs = build_motion_pairs(stations, PairingStrategy::kAllPairs);
  REQUIRE(pairs.size() == 66);
  for (const MotionPair& p : pairs) {
    CHECK(rotation_angle(p.a.rotation()) ==
          doctest::Approx(rotation_angle(p.b.rotation())).epsilon(1e-9));
  }
}

TEST_CASE("noiseless solve recovers the exact geometry") {
  std::mt19937_64 rng(5);
  const DHChain chain = reference_chain();
  for (int trial = 0; trial < 10; ++trial) {
    const Transform btc = testutil::random_transform(rng);
    const Transform gtt = testutil::random_transform(rng, 0.2);
    const auto stations =
        simulate_stations(btc, gtt, chain, random_configs(chain, 10, rng), {},
                          static_cast<std::uint64_t>(trial));
    const auto result = solve_ax_xb(build_motion_pairs(stations), stations);

    const Transform ctb_true = btc.inverse();
    // rotation errors are exact to machine precision but the angle metric
    // itself floors at ~1e-8 (acos conditioning near 1)
    CHECK(rot_error(result.base_to_camera_inv, ctb_true) < 1e-7);
    CHECK((result.base_to_camera_inv.translation() - ctb_true.translation()).norm() < 1e-9);
    CHECK(rot_error(result.gripper_to_target, gtt) < 1e-7);
    CHECK((result.gripper_to_target.translation() - gtt.translation()).norm() < 1e-9);
    CHECK(result.rot_residual_rms < 1e-9);
    CHECK(result.trans_residual_rms < 1e-9);
  }
}

TEST_CASE("rotations about a single axis cannot be solved") {
  std::mt19937_64 rng(6);
  const Transform btc = testutil::random_transform(rng);
  const Transform gtt = testutil::random_transform(rng, 0.2);
  std::uniform_real_distribution<double> u(-0.4, 0.4);

  std::vector<Station> stations;
  for (int i = 0; i < 8; ++i) {
    const Mat3 r = Eigen::AngleAxisd(0.3 * i, Vec3::UnitZ()).toRotationMatrix();
    const Transform btg(r, Vec3(u(rng), u(rng), u(rng)));
    stations.push_back({btg, btc.inverse() * btg * gtt});
  }
  const auto pairs = build_motion_pairs(stations, PairingStrategy::kConsecutive);
  for (const MotionPair& p : pairs) CHECK_FALSE(p.degenerate);
  CHECK_THROWS_AS(solve_ax_xb(pairs, stations), DegenerateMotion);
}

TEST_CASE("a single usable pair is not enough") {
  std::mt19937_64 rng(7);
  const Transform btc = testutil::random_transform(rng);
  const Transform gtt = testutil::random_transform(rng, 0.2);

  const Transform g0 = testutil::random_transform(rng);
  const Transform g1 = testutil::random_transform(rng);
  // Station 2 repeats station 1, so the second consecutive pair is identity.
  std::vector<Station> stations;
  for (const Transform& g : {g0, g1, g1}) {
    stations.push_back({g, btc.inverse() * g * gtt});
  }
  const auto pairs = build_motion_pairs(stations, PairingStrategy::kConsecutive);
  REQUIRE(pairs.size() == 2);
  CHECK_FALSE(pairs[0].degenerate);
  CHECK(pairs[1].degenerate);
  CHECK_THROWS_AS(solve_ax_xb(pairs, stations), TooFewPairs);
}

TEST_CASE("noisy 30-station solves stay within 1 deg and 5 mm") {
  std::mt19937_64 rng(8);
  const Transform btc = testutil::random_transform(rng);
  const Transform gtt = testutil::random_transform(rng, 0.2);
  StationNoise noise;
  noise.rot_deg = 0.5;
  noise.trans_m = 0.002;

  int ok = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto err = solve_once(btc, gtt, 30, noise, static_cast<std::uint64_t>(trial),
                                PairingStrategy::kAuto);
    if (err.rot < 1.0 * M_PI / 180.0 && err.trans < 0.005) ++ok;
  }
  CHECK(ok >= 95);
}

TEST_CASE("solution transforms correctly under a base-frame change") {
  std::mt19937_64 rng(9);
  const DHChain chain = reference_chain();
  const Transform btc = testutil::random_transform(rng);
  const Transform gtt = testutil::random_transform(rng, 0.2);
  StationNoise noise;
  noise.rot_deg = 0.5;
  noise.trans_m = 0.002;
  auto stations = simulate_stations(btc, gtt, chain, random_configs(chain, 12, rng), noise, 33);
  const auto base = solve_ax_xb(build_motion_pairs(stations), stations);

  const Transform w = testutil::random_transform(rng);
  std::vector<Station> moved = stations;
  for (Station& s : moved) s.base_to_gripper = w * s.base_to_gripper;
  const auto shifted = solve_ax_xb(build_motion_pairs(moved), moved);

  // cTb' = cTb * W^-1, gTt unchanged, residuals unchanged. Rotation
  // comparisons sit on the ~1e-8 angle-metric floor.
  const Transform expected_ctb = base.base_to_camera_inv * w.inverse();
  CHECK(rot_error(shifted.base_to_camera_inv, expected_ctb) < 1e-7);
  CHECK((shifted.base_to_camera_inv.translation() - expected_ctb.translation()).norm() < 1e-9);
  CHECK(rot_error(shifted.gripper_to_target, base.gripper_to_target) < 1e-7);
  CHECK((shifted.gripper_to_target.translation() - base.gripper_to_target.translation()).norm() <
        1e-9);
  CHECK(shifted.rot_residual_rms == doctest::Approx(base.rot_residual_rms).epsilon(1e-9));
  CHECK(shifted.trans_residual_rms == doctest::Approx(base.trans_residual_rms).epsilon(1e-9));
}

TEST_CASE("median error shrinks as stations increase") {
  std::mt19937_64 rng(10);
  const Transform btc = testutil::random_transform(rng);
  const Transform gtt = testutil::random_transform(rng, 0.2);
  StationNoise noise;
  noise.rot_deg = 0.5;
  noise.trans_m = 0.002;

  auto median_errors = [&](int stations) {
    std::vector<double> rot, trans;
    for (std::uint64_t seed = 0; seed < 41; ++seed) {
      const auto err = solve_once(btc, gtt, stations, noise, seed + 1000 * stations,
                                  PairingStrategy::kConsecutive);
      rot.push_back(err.rot);
      trans.push_back(err.trans);
    }
    std::nth_element(rot.begin(), rot.begin() + 20, rot.end());
    std::nth_element(trans.begin(), trans.begin() + 20, trans.end());
    return SolveErrors{rot[20], trans[20]};
  };

  const auto e5 = median_errors(5);
  const auto e15 = median_errors(15);
  const auto e50 = median_errors(50);
  CHECK(e5.rot > e15.rot);
  CHECK(e15.rot > e50.rot);
  CHECK(e5.trans > e15.trans);
  CHECK(e15.trans > e50.trans);
}

TEST_CASE("station simulation is deterministic and exact when noiseless") {
  std::mt19937_64 rng(11);
  const DHChain chain = reference_chain();
  const Transform btc = testutil::random_transform(rng);
  const Transform gtt = testutil::random_transform(rng, 0.2);
  const auto configs = random_configs(chain, 8, rng);

  StationNoise noise;
  noise.rot_deg = 0.7;
  noise.trans_m = 0.001;
  const auto s1 = simulate_stations(btc, gtt, chain, configs, noise, 99);
  const auto s2 = simulate_stations(btc, gtt, chain, configs, noise, 99);
  REQUIRE(s1.size() == s2.size());
  for (std::size_t i = 0; i < s1.size(); ++i) {
    CHECK((s1[i].base_to_gripper.matrix() - s2[i].base_to_gripper.matrix()).norm() == 0.0);
    CHECK((s1[i].camera_to_target.matrix() - s2[i].camera_to_target.matrix()).norm() == 0.0);
  }

  const auto clean = simulate_stations(btc, gtt, chain, configs, {}, 99);
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const Transform expected =
        btc.inverse() * forward_kinematics(chain, configs[i]) * gtt;
    CHECK((clean[i].camera_to_target.matrix() - expected.matrix()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("rotation noise has the requested scale") {
  std::mt19937_64 rng(12);
  const DHChain chain = reference_chain();
  const Transform btc = testutil::random_transform(rng);
  const Transform gtt = testutil::random_transform(rng, 0.2);
  const auto configs = random_configs(chain, 1000, rng);

  StationNoise noise;
  noise.rot_deg = 1.0;
  const auto noisy = simulate_stations(btc, gtt, chain, configs, noise, 7);
  const auto clean = simulate_stations(btc, gtt, chain, configs, {}, 7);

  double sum = 0.0;
  for (std::size_t i = 0; i < noisy.size(); ++i) {
    sum += rot_error(noisy[i].camera_to_target, clean[i].camera_to_target);
  }
  const double mean_deg = (sum / 1000.0) * 180.0 / M_PI;
  // Mean |N(0, 1 deg)| is about 0.80 deg.
  CHECK(mean_deg > 0.7);
  CHECK(mean_deg < 0.9);
}

TEST_SUITE_END();
