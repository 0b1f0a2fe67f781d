#pragma once

#include <optional>
#include <vector>

#include "ots/avoidance.hpp"

namespace ots {

struct Waypoint {
  double t = 0.0;
  Pose pose;
};

struct Sample {
  double t = 0.0;
  Pose pose;
};

/// Piecewise-linear pose at time `t` (clamped to the trajectory span).
Pose pose_at(const std::vector<Waypoint>& waypoints, double t);

/// Samples at t = k * sample_time over the trajectory span.
std::vector<Sample> interpolate(const std::vector<Waypoint>& waypoints, double sample_time);

struct ReportRow {
  double t = 0.0;
  double t_meas = 0.0;  // timestamp of the measurement used
  Pose x_ref;
  Pose x_meas;
  Pose x_des;
  JointVector q_ref;
  JointVector q_des;
  double alpha_ref = 0.0;
  double alpha_meas = 0.0;
  double alpha_des = 0.0;
  double det_ref = 0.0;
  double det_des = 0.0;
  std::vector<int> deviation;
  Mode mode = Mode::Track;
  LimbPair pair{0, 0};
  bool no_improvement = false;
  bool measured_trigger = false;
  bool return_blocked = false;
  double step_time = 0.0;
};

struct ReportSummary {
  double mean_step_time = 0.0;      // t_l, s
  double max_joint_deviation = 0.0;  // Delta_q
  double mean_rate_deviation = 0.0;  // Delta_qdot
  std::size_t samples = 0;          // N_ptos
};

struct RunReport {
  std::vector<ReportRow> rows;
  ReportSummary summary;
  bool complete = true;
  std::string failure;  // set when a run aborts with a partial report
};

/// Delta_q is the largest |q_des - q_ref| over ticks and actuators; Delta_qdot
/// is the mean over ticks of max_k |dq_des - dq_ref| / sample_time.
ReportSummary summarize(const std::vector<ReportRow>& rows, double sample_time);

/// Offline planning: the measurement is the previous desired pose.
RunReport run_offline(const RobotModel& model, const AvoidanceConfig& config, const std::vector<Waypoint>& waypoints);

struct Disturbance {
  double t0 = 0.0;
  double t1 = 0.0;
  Pose offset;
};

struct PlantOptions {
  /// Measurement rate in Hz; 0 aligns measurements with control ticks.
  double measurement_rate = 120.0;
  /// First-order lag time constant of the joints, s; 0 tracks exactly.
  double lag = 0.0;
  /// Standard deviation of additive noise on position coordinates (m) and on
  /// angular coordinates (rad).
  double noise_position = 0.0005;
  double noise_angle = 0.0;
  unsigned seed = 1;
  std::vector<Disturbance> disturbances;

  /// Zero noise and lag with aligned measurements.
  static PlantOptions ideal() { return {0.0, 0.0, 0.0, 0.0, 1, {}}; }
};

/// Online loop against a kinematic plant that follows the previous command
/// and is observed through a sampled, held measurement.
RunReport run_online_sim(const RobotModel& model, const AvoidanceConfig& config,
                         const std::vector<Waypoint>& waypoints, const PlantOptions& plant);

/// Mean index value at the point where |det J_D| first drops below
/// `det_epsilon` times its value at the start of each trajectory. Throws
/// ContractViolation if a member never gets there.
double calibrate_lim(const RobotModel& model, const std::vector<std::vector<Waypoint>>& family, double det_epsilon,
                     double sample_time);

}  // namespace ots
