#include <doctest.h>

#include <json.hpp>
#include <sstream>

#include "support.hpp"

using namespace ots;
using namespace ots::test;

namespace {

io::RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return io::parse_config(in);
}

ErrorKind parse_error(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected a config error");
  return ErrorKind::Parse;
}

}  // namespace

TEST_CASE("bundled presets load") {
  const io::RunConfig five = io::load_config(preset("five_bar.ini"));
  CHECK(five.robot == io::RobotType::FiveBar);
  CHECK(five.working_mode == WorkingMode::elbows_out());
  CHECK(five.avoidance.alpha_limit == doctest::Approx(6.0 * kDeg));
  CHECK(five.avoidance.sample_time == 0.02);

  const io::RunConfig ups = io::load_config(preset("ups_rpu.ini"));
  CHECK(ups.robot == io::RobotType::UpsRpu);
  CHECK(ups.spatial.convention == kDefaultConvention);
  CHECK(ups.avoidance.alpha_limit == doctest::Approx(2.0 * kDeg));
  CHECK(ups.plant.measurement_rate == 120.0);
  CHECK(ups.plant.noise_position == 0.0005);
  CHECK(ups.make_model()->dof() == 4);
}

TEST_CASE("config overrides and defaults") {
  const io::RunConfig c = parse(
      "[robot]\ntype = 5r\n[geometry]\nr11 = 0.07\nworking_mode = elbows_in\n"
      "[limits]\nq_min = -90,-90\nq_max = 170,170\n[avoidance]\nlim_alpha = 4\n");
  CHECK(c.five_bar.r11 == 0.07);
  CHECK(c.five_bar.r21 == 0.06);
  CHECK(c.working_mode == WorkingMode{-1, +1});
  REQUIRE(c.five_bar_limits);
  CHECK(c.five_bar_limits->lower(0) == doctest::Approx(-std::numbers::pi / 2));
  CHECK(c.avoidance.alpha_limit == doctest::Approx(4.0 * kDeg));
  CHECK(c.avoidance.sample_time == 0.02);

  const io::RunConfig s = parse("[robot]\ntype = 3ups_rpu\n[geometry]\nconvention = direct\n");
  CHECK(s.spatial.convention == 0);
  CHECK(s.avoidance.sample_time == 0.01);
}

TEST_CASE("config errors") {
  CHECK(parse_error("[robot]\ntype = delta\n") == ErrorKind::Parse);
  CHECK(parse_error("[robot]\n") == ErrorKind::Parse);
  CHECK(parse_error("[robot]\ntype = 5r\n[avoidance]\nt_s = -1\n") == ErrorKind::ContractViolation);
  CHECK(parse_error("[robot]\ntype = 5r\n[avoidance]\nt_s = fast\n") == ErrorKind::Parse);
  CHECK(parse_error("[robot]\ntype = 5r\n[geometry]\nr12 = 0\n") == ErrorKind::ContractViolation);
  CHECK(parse_error("[robot]\ntype = 5r\n[geometry]\nworking_mode = up\n") == ErrorKind::Parse);
  CHECK(parse_error("[robot]\ntype = 3ups_rpu\n[geometry]\nconvention = upside_down\n") == ErrorKind::Parse);
  CHECK(parse_error("[robot]\ntype = 3ups_rpu\n[limits]\nstroke_min = 1\nstroke_max = 0.5\n") ==
        ErrorKind::ContractViolation);
  CHECK(parse_error("not an ini [[[") == ErrorKind::Parse);
  CHECK_THROWS_AS(io::load_config("/nonexistent/run.ini"), Error);
}

TEST_CASE("trajectory files") {
  const auto w = table5();
  REQUIRE(w.size() == 3);
  CHECK(w[1].t == 12.76);
  CHECK((w[1].pose - table5_singular()).norm() < 1e-15);

  std::ostringstream out;
  io::write_trajectory(out, io::RobotType::UpsRpu, w);
  std::istringstream in(out.str());
  const auto back = io::read_trajectory(in, io::RobotType::UpsRpu);
  REQUIRE(back.size() == w.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    CHECK(back[k].t == w[k].t);
    CHECK((back[k].pose - w[k].pose).norm() < 1e-15);
  }

  auto read = [](const std::string& text) {
    std::istringstream s(text);
    return io::read_trajectory(s, io::RobotType::FiveBar);
  };
  CHECK(read("# comment\nt,x,y\n0,0,0.09\n\n1,0.01,0.08\n").size() == 2);
  CHECK_THROWS_AS(read(""), Error);
  CHECK_THROWS_AS(read("t,x,y\n"), Error);
  CHECK_THROWS_AS(read("t,x,y\n0,0,0.09\n"), Error);
  CHECK_THROWS_AS(read("t,x,y\n0,0,0.09\n0,0.01,0.08\n"), Error);
  CHECK_THROWS_AS(read("t,x,y\n0,0,0.09\n1,0.01\n"), Error);
  CHECK_THROWS_AS(read("t,x,y\n0,0,0.09\n1,0.01,abc\n"), Error);
}

TEST_CASE("report CSV round trip") {
  const UpsRpu model;
  const RunReport r = run_offline(model, AvoidanceConfig::ups_rpu_defaults(), table5());
  std::ostringstream out;
  io::write_report(out, io::RobotType::UpsRpu, r);

  std::istringstream in(out.str());
  const auto rows = io::read_report(in, io::RobotType::UpsRpu);
  REQUIRE(rows.size() == r.rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const ReportRow& a = r.rows[k];
    const ReportRow& b = rows[k];
    CHECK(b.t == a.t);
    CHECK((b.x_des - a.x_des).lpNorm<Eigen::Infinity>() < 1e-14);
    CHECK((b.q_des - a.q_des).lpNorm<Eigen::Infinity>() < 1e-14);
    CHECK(std::abs(b.alpha_meas - a.alpha_meas) < 1e-14);
    CHECK(b.det_des == a.det_des);
    CHECK(b.deviation == a.deviation);
    CHECK(b.mode == a.mode);
    CHECK(b.pair == a.pair);
    CHECK(b.no_improvement == a.no_improvement);
    CHECK(b.measured_trigger == a.measured_trigger);
    CHECK(b.return_blocked == a.return_blocked);
  }

  // Writing the parsed rows again gives the same text up to the step time,
  // which goes through a seconds/microseconds conversion.
  RunReport again = r;
  again.rows = rows;
  std::ostringstream out2;
  io::write_report(out2, io::RobotType::UpsRpu, again);
  auto strip = [](const std::string& text) {
    std::istringstream in(text);
    std::string line, kept;
    while (std::getline(in, line)) kept += line.substr(0, line.rfind(',')) + '\n';
    return kept;
  };
  CHECK(strip(out2.str()) == strip(out.str()));
  for (std::size_t k = 0; k < rows.size(); ++k) CHECK(rows[k].step_time == doctest::Approx(r.rows[k].step_time));
}

TEST_CASE("report header") {
  const auto cols = io::report_columns(io::RobotType::FiveBar);
  CHECK(cols.front() == "t");
  CHECK(cols.back() == "step_time_us");
  CHECK(std::find(cols.begin(), cols.end(), "q11_d") != cols.end());
  CHECK(std::find(cols.begin(), cols.end(), "dl_2") != cols.end());
}

TEST_CASE("summary JSON") {
  const FiveBar model;
  const RunReport r = run_offline(model, AvoidanceConfig::five_bar_defaults(), table2());
  const auto j = nlohmann::json::parse(io::summary_json(io::RobotType::FiveBar, r));
  CHECK(j["robot"] == "5r");
  CHECK(j["complete"] == true);
  CHECK(j["samples"] == 201);
  CHECK(j["delta_q_unit"] == "deg");
  CHECK(j["delta_q"].get<double>() == doctest::Approx(r.summary.max_joint_deviation / kDeg));
  CHECK(j["max_abs_dl"].size() == 2);
}

TEST_CASE("pose units") {
  const Pose p = io::pose_from_file_units(io::RobotType::UpsRpu, {0.1, 0.6, 90.0, -45.0});
  CHECK(p(2) == doctest::Approx(std::numbers::pi / 2));
  const auto back = io::pose_to_file_units(io::RobotType::UpsRpu, p);
  CHECK(back[3] == doctest::Approx(-45.0));
  CHECK_THROWS_AS(io::pose_from_file_units(io::RobotType::FiveBar, {0.1}), Error);
  CHECK(io::parse_list("1, 2.5,-3") == std::vector<double>{1.0, 2.5, -3.0});
  CHECK_THROWS_AS(io::parse_list("1,,2"), Error);
}
