#include <doctest.h>

#include "support.hpp"

using namespace ots;
using namespace ots::test;

namespace {

void check_reports_equal(const RunReport& a, const RunReport& b, double tol) {
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    const ReportRow& x = a.rows[k];
    const ReportRow& y = b.rows[k];
    CHECK(x.t == y.t);
    CHECK((x.x_des - y.x_des).lpNorm<Eigen::Infinity>() <= tol);
    CHECK((x.x_meas - y.x_meas).lpNorm<Eigen::Infinity>() <= tol);
    CHECK((x.q_des - y.q_des).lpNorm<Eigen::Infinity>() <= tol);
    CHECK(std::abs(x.alpha_des - y.alpha_des) <= tol);
    CHECK(x.deviation == y.deviation);
    CHECK(x.mode == y.mode);
  }
}

}  // namespace

TEST_CASE("interpolate sample counts and exact waypoints") {
  CHECK(interpolate(table2(), 0.02).size() == 201);

  const auto t5 = interpolate(table5(), 0.01);
  CHECK(t5.size() == static_cast<std::size_t>(std::floor(40.53 / 0.01 + 1e-9)) + 1);
  const auto hit = std::find_if(t5.begin(), t5.end(), [](const Sample& s) { return std::abs(s.t - 12.76) < 1e-9; });
  REQUIRE(hit != t5.end());
  CHECK((hit->pose - table5_singular()).norm() == 0.0);
  CHECK(t5.front().t == 0.0);
}

TEST_CASE("interpolate is piecewise linear") {
  const std::vector<Waypoint> w{{0.0, planar(0.0, 0.09)}, {1.0, planar(0.01, 0.08)}, {3.0, planar(0.03, 0.08)}};
  const auto s = interpolate(w, 0.25);
  CHECK(s.size() == 13);
  CHECK(s[2].pose(0) == doctest::Approx(0.005));
  CHECK(s[2].pose(1) == doctest::Approx(0.085));
  CHECK(s[8].pose(0) == doctest::Approx(0.02));
  CHECK(pose_at(w, 10.0) == w.back().pose);
}

TEST_CASE("identical waypoints give a constant trajectory") {
  const Pose p = table5_start();
  const auto s = interpolate({{0.0, p}, {0.5, p}}, 0.01);
  for (const Sample& x : s) CHECK(x.pose == p);
}

TEST_CASE("interpolate rejects bad input") {
  const Pose p = planar(0.0, 0.09);
  CHECK_THROWS_AS(interpolate({{0.0, p}}, 0.02), Error);
  CHECK_THROWS_AS(interpolate({{0.0, p}, {0.0, p}}, 0.02), Error);
  CHECK_THROWS_AS(interpolate({{1.0, p}, {0.5, p}}, 0.02), Error);
  CHECK_THROWS_AS(interpolate({{0.0, p}, {1.0, p}}, 0.0), Error);
}

TEST_CASE("singularity-free trajectory tracks the reference") {
  const FiveBar model;
  const std::vector<Waypoint> w{{0.0, planar(0.0, 0.09)}, {1.0, planar(0.02, 0.085)}};
  const RunReport r = run_offline(model, AvoidanceConfig::five_bar_defaults(), w);
  REQUIRE(r.complete);
  CHECK(r.rows.size() == 51);
  for (const ReportRow& row : r.rows) {
    CHECK(row.mode == Mode::Track);
    CHECK(row.q_des == row.q_ref);
  }
  CHECK(r.summary.max_joint_deviation == 0.0);
  CHECK(r.summary.mean_rate_deviation == 0.0);
}

TEST_CASE("offline runs are deterministic") {
  const FiveBar model;
  const auto cfg = AvoidanceConfig::five_bar_defaults();
  const RunReport a = run_offline(model, cfg, table2());
  const RunReport b = run_offline(model, cfg, table2());
  check_reports_equal(a, b, 0.0);
}

TEST_CASE("summary follows its definitions") {
  const UpsRpu model;
  const auto cfg = AvoidanceConfig::ups_rpu_defaults();
  const RunReport r = run_offline(model, cfg, table5());
  double dq = 0.0, rate = 0.0, tl = 0.0;
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    dq = std::max(dq, (r.rows[k].q_des - r.rows[k].q_ref).lpNorm<Eigen::Infinity>());
    tl += r.rows[k].step_time;
    if (k > 0) {
      const JointVector d = (r.rows[k].q_des - r.rows[k - 1].q_des) - (r.rows[k].q_ref - r.rows[k - 1].q_ref);
      rate += d.lpNorm<Eigen::Infinity>() / cfg.sample_time;
    }
  }
  CHECK(r.summary.samples == r.rows.size());
  CHECK(r.summary.max_joint_deviation == doctest::Approx(dq));
  CHECK(r.summary.mean_rate_deviation == doctest::Approx(rate / double(r.rows.size() - 1)));
  CHECK(r.summary.mean_step_time == doctest::Approx(tl / double(r.rows.size())));
}

TEST_CASE("online loop with an ideal plant reproduces the offline run") {
  const UpsRpu ups;
  const auto cfg = AvoidanceConfig::ups_rpu_defaults();
  check_reports_equal(run_offline(ups, cfg, table5()), run_online_sim(ups, cfg, table5(), PlantOptions::ideal()), 1e-9);

  const FiveBar five;
  const auto cfg5 = AvoidanceConfig::five_bar_defaults();
  check_reports_equal(run_offline(five, cfg5, table2()), run_online_sim(five, cfg5, table2(), PlantOptions::ideal()),
                      1e-9);
}

TEST_CASE("online measurements are held between camera frames") {
  const UpsRpu ups;
  PlantOptions plant;
  plant.noise_position = 0.0;
  const RunReport r = run_online_sim(ups, AvoidanceConfig::ups_rpu_defaults(), table5(), plant);
  REQUIRE(r.complete);
  for (const ReportRow& row : r.rows) {
    CHECK(row.t_meas <= row.t + 1e-12);
    CHECK(row.t - row.t_meas < 1.0 / 120.0 + 0.01 + 1e-9);
  }
}

TEST_CASE("a disturbance inside the singular zone triggers avoidance") {
  const UpsRpu ups;
  const auto cfg = AvoidanceConfig::ups_rpu_defaults();
  // Short straight path near the start, pushed toward the singular pose.
  const std::vector<Waypoint> w{{0.0, table5_start()}, {1.0, table5_start()}};
  PlantOptions plant = PlantOptions::ideal();
  plant.disturbances.push_back({0.3, 0.5, table5_singular() - table5_start()});
  const RunReport r = run_online_sim(ups, cfg, w, plant);
  REQUIRE(r.complete);
  bool avoid = false, flagged = false;
  for (const ReportRow& row : r.rows) {
    avoid |= row.mode == Mode::Avoid;
    flagged |= row.measured_trigger;
  }
  CHECK(avoid);
  CHECK(flagged);
}

TEST_CASE("lag keeps the plant behind the command") {
  const FiveBar five;
  PlantOptions plant = PlantOptions::ideal();
  plant.lag = 0.05;
  const std::vector<Waypoint> w{{0.0, planar(0.0, 0.09)}, {1.0, planar(0.02, 0.085)}};
  const RunReport r = run_online_sim(five, AvoidanceConfig::five_bar_defaults(), w, plant);
  REQUIRE(r.complete);
  // The measured pose trails the reference while it moves.
  CHECK(std::abs(r.rows[25].x_meas(0) - r.rows[25].x_ref(0)) > 1e-5);
}

TEST_CASE("calibrate_lim on the five-bar approach") {
  const FiveBar five;
  const Pose a = planar(0.0, 0.09), b = table2_singular();
  const std::vector<Waypoint> path{{0.0, a}, {2.0, b}};
  const double lim = calibrate_lim(five, {path}, 0.1, 0.02);
  CHECK(lim > 0.0);
  CHECK(lim < 6.0 * kDeg);

  // Speed does not change a geometric estimate.
  const std::vector<Waypoint> slow{{0.0, a}, {4.0, b}};
  CHECK(calibrate_lim(five, {slow}, 0.1, 0.04) == doctest::Approx(lim).epsilon(1e-12));

  const std::vector<Waypoint> safe{{0.0, a}, {1.0, planar(0.02, 0.085)}};
  CHECK_THROWS_AS(calibrate_lim(five, {safe}, 0.1, 0.02), Error);
}

TEST_CASE("calibrate_lim on the spatial approach family") {
  const UpsRpu ups;
  std::vector<std::vector<Waypoint>> family;
  const Pose end = table5_start() + 1.1 * (table5_singular() - table5_start());
  for (double dx : {-0.01, 0.0, 0.01}) {
    Pose start = table5_start();
    start(0) += dx;
    family.push_back({{0.0, start}, {12.76, end}});
  }
  // The index falls roughly in proportion to |det J_D| here, so a loose
  // threshold is needed to land near the tuned 2 degrees.
  const double lim = calibrate_lim(ups, family, 0.5, 0.01);
  CHECK(lim > 0.5 * kDeg);
  CHECK(lim < 4.0 * kDeg);
  CHECK(calibrate_lim(ups, family, 0.05, 0.01) < lim);
}
