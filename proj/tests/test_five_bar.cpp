#include <doctest.h>

#include <random>

#include "support.hpp"

using namespace ots;
using namespace ots::test;
using Eigen::Vector2d;
using Eigen::Vector3d;

TEST_CASE("five-bar geometry defaults and validation") {
  const FiveBarGeometry g;
  CHECK(g.r10 == 0.04);
  CHECK(g.r11 == 0.06);
  CHECK(g.r12 == 0.05);
  FiveBarGeometry bad;
  bad.r21 = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  CHECK_THROWS_AS(FiveBar{bad}, Error);
}

TEST_CASE("working mode parsing") {
  CHECK(WorkingMode::parse("elbows_out") == WorkingMode::elbows_out());
  CHECK(WorkingMode::parse("elbows_in") == WorkingMode{-1, +1});
  CHECK_FALSE(WorkingMode::parse("sideways"));
  CHECK(WorkingMode::trial_order()[0] == WorkingMode::elbows_out());
}

TEST_CASE("ik at the symmetric pose is mirror symmetric") {
  const FiveBarJoints q = ik_5r({}, WorkingMode::elbows_out(), {0.0, 0.09});
  CHECK(q.q21 == doctest::Approx(std::numbers::pi - q.q11).epsilon(1e-12));
}

TEST_CASE("ik matches an independent circle intersection") {
  // circle(A1, 0.06) with circle(P, 0.05), elbow left of A1 -> P.
  const Vector2d a1(-0.04, 0.0), p(0.0, 0.09);
  const Vector2d d = p - a1;
  const double dist = d.norm();
  const double a = (0.06 * 0.06 - 0.05 * 0.05 + dist * dist) / (2 * dist);
  const double h = std::sqrt(0.06 * 0.06 - a * a);
  const Vector2d b1 = a1 + a * d / dist + h * Vector2d(-d.y(), d.x()) / dist;
  const double expected = std::atan2(b1.y(), b1.x() - a1.x());

  const FiveBarJoints q = ik_5r({}, WorkingMode::elbows_out(), {0.0, 0.09});
  CHECK(q.q11 == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("ik at a fully stretched limb aligns the links") {
  const double ang = 60.0 * kDeg;
  const PlanarPose p{-0.04 + 0.11 * std::cos(ang), 0.11 * std::sin(ang)};
  const FiveBarJoints q = ik_5r({}, WorkingMode::elbows_out(), p);
  CHECK(q.q11 == doctest::Approx(ang).epsilon(1e-6));
  CHECK(std::abs(q.q12) < 1e-6);
}

TEST_CASE("ik rejects unreachable poses") {
  try {
    ik_5r({}, WorkingMode::elbows_out(), {0.0, 0.2});
    FAIL("expected out of workspace");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OutOfWorkspace);
  }
}

TEST_CASE("elbow points satisfy the distal lengths") {
  const FiveBarGeometry g;
  std::mt19937 rng(31);
  const FiveBar model;
  for (int k = 0; k < 200; ++k) {
    const Pose x = random_five_bar_pose(model, rng, 0.0);
    const FiveBarJoints q = model.joints(x);
    const Vector2d p(x(0), x(1));
    const Vector2d b1 = Vector2d(-g.r10, 0) + g.r11 * Vector2d(std::cos(q.q11), std::sin(q.q11));
    const Vector2d b2 = Vector2d(g.r20, 0) + g.r21 * Vector2d(std::cos(q.q21), std::sin(q.q21));
    CHECK(std::abs((p - b1).norm() - g.r12) < 1e-10);
    CHECK(std::abs((p - b2).norm() - g.r22) < 1e-10);
    CHECK(model.constraint_residual(x, model.inverse_kinematics(x)).norm() < 1e-12);
  }
}

TEST_CASE("ik and fk round trips on the working-mode sheet") {
  const FiveBar model;
  const Pose home = planar(0.0, 0.09);
  CHECK((model.forward_kinematics(model.inverse_kinematics(home), home) - home).norm() < 1e-10);

  std::mt19937 rng(32);
  int checked = 0;
  while (checked < 1000) {
    const Pose x = random_five_bar_pose(model, rng, 1.0 * kDeg);
    const JointVector q = model.inverse_kinematics(x);
    const Pose back = model.forward_kinematics(q, x);
    CHECK((back - x).norm() < 1e-10);
    CHECK((model.inverse_kinematics(back) - q).norm() < 1e-9);
    ++checked;
  }
}

TEST_CASE("fk reports disjoint circles") {
  const FiveBar model;
  JointVector q(2);
  q << std::numbers::pi, 0.0;  // elbows 0.2 m apart, distal reach 0.1 m
  try {
    model.forward_kinematics(q, planar(0.0, 0.09));
    FAIL("expected infeasible command");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InfeasibleCommand);
  }
}

TEST_CASE("fk branches nearly coincide at the singular configuration") {
  const FiveBarGeometry g;
  const FiveBar model;
  const FiveBarJoints q = model.joints(table2_singular());
  const Vector2d b1 = Vector2d(-g.r10, 0) + g.r11 * Vector2d(std::cos(q.q11), std::sin(q.q11));
  const Vector2d b2 = Vector2d(g.r20, 0) + g.r21 * Vector2d(std::cos(q.q21), std::sin(q.q21));
  const double gap = (b2 - b1).norm();
  // Tangency of the distal circles: elbow distance equals r12 + r22.
  CHECK(std::abs(gap - (g.r12 + g.r22)) < 1e-4);
}

TEST_CASE("transmission forces match the angle-sum form") {
  const FiveBar model;
  std::mt19937 rng(33);
  for (int k = 0; k < 300; ++k) {
    const Pose x = random_five_bar_pose(model, rng, 0.0);
    const FiveBarJoints q = model.joints(x);
    const auto f = transmission_forces_5r(model.geometry(), q, {x(0), x(1)});
    CHECK((f[0] - distal_direction(q.q11, q.q12)).norm() < 1e-12);
    CHECK((f[1] - distal_direction(q.q21, q.q22)).norm() < 1e-12);
    const Vector3d expected(std::cos(q.q21 + q.q22), std::sin(q.q21 + q.q22), 0.0);
    CHECK((f[1] - expected).norm() < 1e-12);
  }
}

TEST_CASE("transmission forces become parallel at the singular pose") {
  const FiveBar model;
  const auto w = model.transmission_wrenches(table2_singular());
  CHECK(folded_angle(w[0].force(), w[1].force()) < 1.6 * kDeg);
  for (const auto& s : w) CHECK(s.moment() == Vector3d::Zero());
}

TEST_CASE("five-bar output twists") {
  const FiveBar model;
  std::mt19937 rng(34);
  for (int k = 0; k < 200; ++k) {
    const Pose x = random_five_bar_pose(model, rng);
    const auto w = model.transmission_wrenches(x);
    const auto t = model.output_twists(x);
    CHECK(std::abs(t[0].linear.dot(w[1].force())) < 1e-12);
    CHECK(std::abs(t[1].linear.dot(w[0].force())) < 1e-12);
    CHECK(t[0].angular == Vector3d::UnitZ());

    // Rotating by 90 degrees preserves angles, so Theta is the distal-link angle.
    const IndexVectors v = indices_at(model, x);
    CHECK(*v.theta[0].value == doctest::Approx(folded_angle(w[0].force(), w[1].force())).epsilon(1e-10));
    CHECK(*v.omega[0].value == 0.0);
  }
}

TEST_CASE("theta decreases strictly along the singular approach") {
  const FiveBar model;
  const Pose a = planar(0.0, 0.09), b = table2_singular();
  // The distal links align slightly before the published pose; Theta falls
  // strictly up to that point and rises again over the remaining stretch.
  double prev = 10.0;
  int k = 0;
  for (; k <= 200; ++k) {
    const Pose x = a + (k / 200.0) * (b - a);
    const double th = alpha(model, x).value;
    if (th > prev) break;
    CHECK(th < prev);
    prev = th;
  }
  REQUIRE(k <= 200);
  const double det_before = jacobians(model, a + ((k - 2) / 200.0) * (b - a)).det_forward;
  const double det_after = jacobians(model, a + (k / 200.0) * (b - a)).det_forward;
  CHECK(det_before * det_after < 0.0);
  CHECK(k >= 190);
  for (; k <= 200; ++k) {
    const double th = alpha(model, a + (k / 200.0) * (b - a)).value;
    CHECK(th > prev);
    prev = th;
  }
}

TEST_CASE("alpha at the reference poses") {
  const FiveBar model;
  CHECK(alpha(model, planar(0.0, 0.09)).value > 6.0 * kDeg);
  const AlphaResult s = alpha(model, table2_singular());
  CHECK(s.value < 2.0 * kDeg);
  CHECK(s.i == 1);
  CHECK(s.j == 2);
}

TEST_CASE("working mode selection at the published pose") {
  const FiveBarGeometry g;
  // Only the elbows-out branch is near-singular there, at about 1.6 degrees.
  CHECK_FALSE(select_working_mode(g, {-0.03, 0.05}, 1.0 * kDeg));
  CHECK(select_working_mode(g, {-0.03, 0.05}, 2.0 * kDeg) == WorkingMode::elbows_out());
}
