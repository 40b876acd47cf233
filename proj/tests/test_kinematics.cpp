#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "rocap/kinematics.hpp"

using namespace rocap;

namespace {

// Central-difference check of one Jacobian column. The angular part is the
// log of the relative rotation over the step.
Eigen::Matrix<double, 6, 1> fd_column(const DHChain& chain, const JointState& q,
                                      Eigen::Index joint, double h) {
  JointState qp = q, qm = q;
  qp[joint] += h;
  qm[joint] -= h;
  const Transform tp = forward_kinematics(chain, qp);
  const Transform tm = forward_kinematics(chain, qm);
  Eigen::Matrix<double, 6, 1> col;
  col.head<3>() = (tp.translation() - tm.translation()) / (2.0 * h);
  col.tail<3>() = so3_log(tp.rotation() * tm.rotation().transpose()) / (2.0 * h);
  return col;
}

DHChain random_chain(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nd(2, 7);
  std::uniform_real_distribution<double> au(-0.5, 0.5);
  std::uniform_real_distribution<double> du(-0.3, 0.3);
  std::uniform_real_distribution<double> angu(-M_PI, M_PI);
  std::vector<DHLink> links(static_cast<std::size_t>(nd(rng)));
  for (DHLink& l : links) {
    l.a = au(rng);
    l.alpha = angu(rng);
    l.d = du(rng);
    l.theta_offset = angu(rng);
  }
  return DHChain(std::move(links));
}

}  // namespace

TEST_SUITE_BEGIN("kinematics");

TEST_CASE("planar 2R forward kinematics oracle") {
  const DHChain arm = testutil::planar_2r();

  JointState q(2);
  q << 0.0, 0.0;
  CHECK((forward_kinematics(arm, q).translation() - Vec3(2.0, 0.0, 0.0)).norm() < 1e-15);

  q << M_PI / 2.0, 0.0;
  CHECK((forward_kinematics(arm, q).translation() - Vec3(0.0, 2.0, 0.0)).norm() < 1e-12);

  // Elbow bent 90 degrees: tip at (1, 1, 0).
  q << 0.0, M_PI / 2.0;
  CHECK((forward_kinematics(arm, q).translation() - Vec3(1.0, 1.0, 0.0)).norm() < 1e-12);
}

TEST_CASE("prepending a zero link leaves the pose unchanged") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const DHChain chain = random_chain(rng);
    std::vector<DHLink> extended = chain.links();
    extended.insert(extended.begin(), DHLink{});
    const DHChain padded(std::move(extended));

    const JointState q = testutil::random_joints_in_limits(chain, rng);
    JointState qp(q.size() + 1);
    qp[0] = 0.0;
    qp.tail(q.size()) = q;

    const Mat4 a = forward_kinematics(chain, q).matrix();
    const Mat4 b = forward_kinematics(padded, qp).matrix();
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("forward kinematics is deterministic") {
  const DHChain chain = reference_chain();
  JointState q(6);
  q << 0.3, -0.8, 0.5, 1.1, -0.4, 0.9;
  const Mat4 a = forward_kinematics(chain, q).matrix();
  const Mat4 b = forward_kinematics(chain, q).matrix();
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("length mismatches are rejected") {
  const DHChain chain = testutil::planar_2r();
  JointState q(3);
  q << 0.0, 0.0, 0.0;
  CHECK_THROWS_AS(forward_kinematics(chain, q), LengthMismatch);
  CHECK_THROWS_AS(jacobian(chain, q), LengthMismatch);
  CHECK_THROWS_AS(check_limits(chain, q), LengthMismatch);
  CHECK_THROWS_AS(solve_ik(chain, Transform::identity(), q), LengthMismatch);
}

TEST_CASE("2R Jacobian analytic entries at the stretched pose") {
  const DHChain arm = testutil::planar_2r();
  JointState q(2);
  q << 0.0, 0.0;
  const auto j = jacobian(arm, q);
  REQUIRE(j.cols() == 2);
  // Rotating the base joint sweeps the tip at radius 2 along +y.
  CHECK(j(1, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(j(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
  // The elbow sweeps the tip at radius 1.
  CHECK(j(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
  // Both joints rotate about z.
  CHECK(j(5, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(j(5, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Jacobian columns exist for locked joints") {
  DHLink locked;
  locked.a = 1.0;
  locked.limit_min = 0.5;
  locked.limit_max = 0.5 + 1e-9;
  DHLink free;
  free.a = 1.0;
  const DHChain chain({locked, free});
  JointState q(2);
  q << 0.5, 0.0;
  const auto j = jacobian(chain, q);
  CHECK(j.cols() == 2);
  CHECK(j.col(0).norm() > 0.0);
}

TEST_CASE("Jacobian matches finite differences on 100 reference configurations") {
  const DHChain chain = reference_chain();
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const JointState q = testutil::random_joints_in_limits(chain, rng);
    const auto j = jacobian(chain, q);
    for (Eigen::Index c = 0; c < j.cols(); ++c) {
      const auto fd = fd_column(chain, q, c, 1e-6);
      CHECK((j.col(c) - fd).cwiseAbs().maxCoeff() < 1e-5);
    }
  }
}

TEST_CASE("Jacobian matches finite differences on random chains") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    const DHChain chain = random_chain(rng);
    const JointState q = testutil::random_joints_in_limits(chain, rng);
    const auto j = jacobian(chain, q);
    for (Eigen::Index c = 0; c < j.cols(); ++c) {
      const auto fd = fd_column(chain, q, c, 1e-6);
      CHECK((j.col(c) - fd).cwiseAbs().maxCoeff() < 1e-5);
    }
  }
}

TEST_CASE("check_limits uses closed intervals") {
  DHLink l;
  l.limit_min = -1.0;
  l.limit_max = 1.0;
  const DHChain chain({l, l});
  JointState q(2);

  q << 0.0, 0.0;
  CHECK(check_limits(chain, q));
  q << 1.0, -1.0;  // exactly on the bounds
  CHECK(check_limits(chain, q));
  q << 1.0 + 1e-6, 0.0;
  CHECK_FALSE(check_limits(chain, q));
  q << 0.0, -1.0 - 1e-6;
  CHECK_FALSE(check_limits(chain, q));
}

TEST_CASE("IK returns the seed unchanged when it already solves the target") {
  const DHChain chain = reference_chain();
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const JointState q = testutil::random_joints_in_limits(chain, rng);
    const Transform target = forward_kinematics(chain, q);
    const auto solved = solve_ik(chain, target, q);
    REQUIRE(solved.has_value());
    CHECK((*solved - q).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("2R target beyond the workspace radius is unreachable") {
  const DHChain arm = testutil::planar_2r();
  JointState seed(2);
  seed << 0.1, 0.1;
  const Transform target(Mat3::Identity(), Vec3(2.5, 0.0, 0.0));
  CHECK_FALSE(solve_ik(arm, target, seed).has_value());
}

TEST_CASE("IK round trip on 1000 random reachable poses") {
  const DHChain chain = reference_chain();
  std::mt19937_64 rng(42);
  std::normal_distribution<double> jitter(0.0, 0.3);

  int solved_count = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const JointState q = testutil::random_joints_in_limits(chain, rng);
    const Transform target = forward_kinematics(chain, q);

    JointState seed = q;
    for (Eigen::Index i = 0; i < seed.size(); ++i) seed[i] += jitter(rng);
    for (std::size_t i = 0; i < chain.joint_count(); ++i)
      seed[static_cast<Eigen::Index>(i)] =
          std::clamp(seed[static_cast<Eigen::Index>(i)], chain.links()[i].limit_min,
                     chain.links()[i].limit_max);

    IkOptions options;
    options.seed = static_cast<std::uint64_t>(trial);
    const auto solved = solve_ik(chain, target, seed, options);
    if (!solved) continue;

    // Success must mean both tolerance and limit satisfaction.
    REQUIRE(check_limits(chain, *solved));
    const Transform reached = forward_kinematics(chain, *solved);
    const double pos_err = (reached.translation() - target.translation()).norm();
    const double rot_err = rotation_angle(reached.rotation().transpose() * target.rotation());
    CHECK(pos_err < 1e-6);
    CHECK(rot_err < 1e-6);
    ++solved_count;
  }
  CHECK(solved_count >= 990);
}

TEST_CASE("IK solutions respect asymmetric joint limits") {
  const DHChain chain = reference_chain();
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const JointState q = testutil::random_joints_in_limits(chain, rng);
    const Transform target = forward_kinematics(chain, q);
    JointState seed = JointState::Zero(6);
    IkOptions options;
    options.seed = static_cast<std::uint64_t>(trial) + 7000;
    const auto solved = solve_ik(chain, target, seed, options);
    if (solved) CHECK(check_limits(chain, *solved));
  }
}

TEST_CASE("reference chain shape") {
  const DHChain chain = reference_chain();
  CHECK(chain.joint_count() == 6);
  const double wide = 170.0 * M_PI / 180.0;
  const double narrow = 120.0 * M_PI / 180.0;
  CHECK(chain.links()[0].limit_max == doctest::Approx(wide));
  CHECK(chain.links()[1].limit_max == doctest::Approx(narrow));
  CHECK(chain.links()[2].limit_max == doctest::Approx(narrow));
  CHECK(chain.links()[3].limit_max == doctest::Approx(wide));
  CHECK(chain.links()[4].limit_max == doctest::Approx(narrow));
  CHECK(chain.links()[5].limit_max == doctest::Approx(wide));
  for (const DHLink& l : chain.links()) CHECK(l.limit_min == -l.limit_max);
}

TEST_CASE("chain construction rejects bad limits") {
  DHLink l;
  l.limit_min = 1.0;
  l.limit_max = -1.0;
  CHECK_THROWS_AS(DHChain({l}), DataError);
  CHECK_THROWS_AS(DHChain({}), DataError);
}

TEST_SUITE_END();
