#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "ots/five_bar.hpp"
#include "ots/planner.hpp"
#include "ots/ups_rpu.hpp"

namespace ots::io {

enum class RobotType { FiveBar, UpsRpu };

const char* to_string(RobotType type);

/// Everything a run needs, in internal units (m, rad).
struct RunConfig {
  RobotType robot = RobotType::FiveBar;
  FiveBarGeometry five_bar;
  WorkingMode working_mode = WorkingMode::elbows_out();
  std::optional<JointLimits> five_bar_limits;
  SpatialGeometry spatial;
  StrokeLimits stroke;
  AvoidanceConfig avoidance = AvoidanceConfig::five_bar_defaults();
  PlantOptions plant;

  std::unique_ptr<RobotModel> make_model() const;
  int dof() const { return robot == RobotType::FiveBar ? 2 : 4; }
};

/// INI-style config: sections [robot], [geometry], [limits], [avoidance],
/// [plant]. Angles are read in degrees. Throws Error(Parse) or
/// Error(ContractViolation).
RunConfig load_config(const std::string& path);
RunConfig parse_config(std::istream& in);
RunConfig default_config(RobotType robot);

/// Pose coordinate names in file order.
std::vector<std::string> pose_labels(RobotType robot);
std::vector<std::string> joint_labels(RobotType robot);

/// Pose coordinates that are angles (degrees on disk).
std::vector<bool> pose_angle_mask(RobotType robot);
std::vector<bool> joint_angle_mask(RobotType robot);

Pose pose_from_file_units(RobotType robot, const std::vector<double>& values);
std::vector<double> pose_to_file_units(RobotType robot, const Pose& pose);

/// Header row, then `t,coord...` with SI lengths and angles in degrees.
std::vector<Waypoint> read_trajectory(std::istream& in, RobotType robot);
std::vector<Waypoint> load_trajectory(const std::string& path, RobotType robot);
void write_trajectory(std::ostream& out, RobotType robot, const std::vector<Waypoint>& waypoints);

/// Fixed column order; see README for the schema.
std::vector<std::string> report_columns(RobotType robot);
void write_report(std::ostream& out, RobotType robot, const RunReport& report);
std::vector<ReportRow> read_report(std::istream& in, RobotType robot);

/// JSON summary block (t_l, Delta_q, Delta_qdot, ...).
std::string summary_json(RobotType robot, const RunReport& report);

/// Parses "a,b,c" into doubles.
std::vector<double> parse_list(const std::string& text);

}  // namespace ots::io
