#include "ots/planner.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace ots {

namespace {

void check_waypoints(const std::vector<Waypoint>& waypoints) {
  if (waypoints.size() < 2) throw Error(ErrorKind::ContractViolation, "need at least two waypoints");
  for (std::size_t k = 1; k < waypoints.size(); ++k) {
    if (!(waypoints[k].t > waypoints[k - 1].t)) {
      throw Error(ErrorKind::ContractViolation, "waypoint times must increase strictly");
    }
    if (waypoints[k].pose.size() != waypoints[0].pose.size()) {
      throw Error(ErrorKind::ContractViolation, "waypoints have mixed dimensions");
    }
  }
}

double det_at(const RobotModel& model, const Pose& x) {
  try {
    return jacobians(model, x).det_forward;
  } catch (const Error&) {
    return std::nan("");
  }
}

ReportRow make_row(const RobotModel& model, double t, double t_meas, const Pose& x_ref, const Pose& x_meas,
                   const StepResult& r) {
  ReportRow row;
  row.t = t;
  row.t_meas = t_meas;
  row.x_ref = x_ref;
  row.x_meas = x_meas;
  row.x_des = r.pose_des;
  row.q_ref = r.q_ref;
  row.q_des = r.q_des;
  row.alpha_ref = r.diag.alpha_ref;
  row.alpha_meas = r.diag.alpha_meas;
  row.alpha_des = r.diag.alpha_des;
  row.det_ref = det_at(model, x_ref);
  row.det_des = det_at(model, r.pose_des);
  row.deviation = r.state.deviation;
  row.mode = r.state.mode;
  row.pair = r.diag.meas_pair;
  row.no_improvement = r.diag.no_improvement;
  row.measured_trigger = r.diag.measured_trigger;
  row.return_blocked = r.diag.return_blocked;
  row.step_time = r.diag.step_time;
  return row;
}

}  // namespace

Pose pose_at(const std::vector<Waypoint>& waypoints, double t) {
  check_waypoints(waypoints);
  if (t <= waypoints.front().t) return waypoints.front().pose;
  if (t >= waypoints.back().t) return waypoints.back().pose;
  const auto hi = std::upper_bound(waypoints.begin(), waypoints.end(), t,
                                   [](double v, const Waypoint& w) { return v < w.t; });
  const Waypoint& b = *hi;
  const Waypoint& a = *(hi - 1);
  const double span = b.t - a.t;
  // Waypoint instants are returned exactly despite rounding in k * t_s.
  if (std::abs(t - a.t) <= 1e-9 * std::max(1.0, std::abs(a.t))) return a.pose;
  if (std::abs(t - b.t) <= 1e-9 * std::max(1.0, std::abs(b.t))) return b.pose;
  const double s = (t - a.t) / span;
  return a.pose + s * (b.pose - a.pose);
}

std::vector<Sample> interpolate(const std::vector<Waypoint>& waypoints, double sample_time) {
  check_waypoints(waypoints);
  if (!(sample_time > 0.0)) throw Error(ErrorKind::ContractViolation, "sample time must be > 0");
  const double t0 = waypoints.front().t;
  const double span = waypoints.back().t - t0;
  const auto n = static_cast<std::size_t>(std::floor(span / sample_time + 1e-9));
  std::vector<Sample> out;
  out.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = t0 + static_cast<double>(k) * sample_time;
    out.push_back({t, pose_at(waypoints, t)});
  }
  return out;
}

ReportSummary summarize(const std::vector<ReportRow>& rows, double sample_time) {
  ReportSummary s;
  s.samples = rows.size();
  if (rows.empty()) return s;
  double time_sum = 0.0;
  double rate_sum = 0.0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    time_sum += rows[k].step_time;
    const JointVector dev = rows[k].q_des - rows[k].q_ref;
    s.max_joint_deviation = std::max(s.max_joint_deviation, dev.cwiseAbs().maxCoeff());
    if (k > 0) {
      const JointVector prev = rows[k - 1].q_des - rows[k - 1].q_ref;
      rate_sum += (dev - prev).cwiseAbs().maxCoeff() / sample_time;
    }
  }
  s.mean_step_time = time_sum / static_cast<double>(rows.size());
  if (rows.size() > 1) s.mean_rate_deviation = rate_sum / static_cast<double>(rows.size() - 1);
  return s;
}

RunReport run_offline(const RobotModel& model, const AvoidanceConfig& config, const std::vector<Waypoint>& waypoints) {
  const Avoider avoider(model, config);
  const auto samples = interpolate(waypoints, config.sample_time);
  RunReport report;
  report.rows.reserve(samples.size());

  AvoidanceState state(model.dof());
  Pose x_meas = samples.front().pose;
  double t_meas = samples.front().t;
  for (const Sample& s : samples) {
    try {
      const StepResult r = avoider.step(state, s.pose, x_meas);
      report.rows.push_back(make_row(model, s.t, t_meas, s.pose, x_meas, r));
      state = r.state;
      x_meas = r.pose_des;
      t_meas = s.t;
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "t=" << s.t << ": " << e.what();
      report.complete = false;
      report.failure = msg.str();
      break;
    }
  }
  report.summary = summarize(report.rows, config.sample_time);
  return report;
}

namespace {

/// Kinematic plant: joints follow the last command, optionally through a
/// first-order lag; the platform pose tracks the joints by continuation.
class Plant {
 public:
  Plant(const RobotModel& model, const Pose& pose, double lag)
      : model_(model), lag_(lag), q_(model.inverse_kinematics(pose)), q_cmd_(q_), pose_(pose), t_(0.0) {}

  void command(const JointVector& q, const Pose& pose) {
    q_cmd_ = q;
    pose_cmd_ = pose;
  }

  /// Advances to time `t` under the current command.
  void advance(double t) {
    if (t <= t_) return;
    if (lag_ <= 0.0) {
      q_ = q_cmd_;
      if (pose_cmd_) pose_ = *pose_cmd_;
    } else {
      const double decay = std::exp(-(t - t_) / lag_);
      q_ = q_cmd_ + decay * (q_ - q_cmd_);
      pose_ = model_.forward_kinematics(q_, pose_);
    }
    t_ = t;
  }

  const Pose& pose() const { return pose_; }

 private:
  const RobotModel& model_;
  double lag_;
  JointVector q_;
  JointVector q_cmd_;
  std::optional<Pose> pose_cmd_;
  Pose pose_;
  double t_;
};

}  // namespace

RunReport run_online_sim(const RobotModel& model, const AvoidanceConfig& config,
                         const std::vector<Waypoint>& waypoints, const PlantOptions& plant_options) {
  if (plant_options.measurement_rate < 0.0 || plant_options.lag < 0.0 || plant_options.noise_position < 0.0 ||
      plant_options.noise_angle < 0.0) {
    throw Error(ErrorKind::ContractViolation, "plant options must be non-negative");
  }
  for (const auto& d : plant_options.disturbances) {
    if (!(d.t1 >= d.t0) || d.offset.size() != model.dof()) {
      throw Error(ErrorKind::ContractViolation, "malformed disturbance window");
    }
  }
  const Avoider avoider(model, config);
  const auto samples = interpolate(waypoints, config.sample_time);
  const double ts = config.sample_time;
  const double t0 = samples.front().t;

  std::mt19937 rng(plant_options.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const bool planar = model.dof() == 2;
  auto measure = [&](const Pose& truth, double t) {
    Pose m = truth;
    for (Eigen::Index k = 0; k < m.size(); ++k) {
      const bool angular = !planar && k >= 2;
      const double sigma = angular ? plant_options.noise_angle : plant_options.noise_position;
      if (sigma > 0.0) m(k) += sigma * gauss(rng);
    }
    for (const auto& d : plant_options.disturbances) {
      if (t >= d.t0 && t <= d.t1) m += d.offset;
    }
    return m;
  };

  Plant plant(model, samples.front().pose, plant_options.lag);
  RunReport report;
  report.rows.reserve(samples.size());
  AvoidanceState state(model.dof());

  Pose held = measure(plant.pose(), t0);
  double held_t = t0;
  long next_meas = 1;  // index of the next measurement instant after t0

  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double t = samples[k].t;
    try {
      if (k > 0) {
        if (plant_options.measurement_rate <= 0.0) {
          plant.advance(t);
          held = measure(plant.pose(), t);
          held_t = t;
        } else {
          const double period = 1.0 / plant_options.measurement_rate;
          while (t0 + static_cast<double>(next_meas) * period <= t + 1e-9 * ts) {
            const double tm = t0 + static_cast<double>(next_meas) * period;
            plant.advance(tm);
            held = measure(plant.pose(), tm);
            held_t = tm;
            ++next_meas;
          }
          plant.advance(t);
        }
      }
      const StepResult r = avoider.step(state, samples[k].pose, held);
      report.rows.push_back(make_row(model, t, held_t, samples[k].pose, held, r));
      state = r.state;
      plant.command(r.q_des, r.pose_des);
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "t=" << t << ": " << e.what();
      report.complete = false;
      report.failure = msg.str();
      break;
    }
  }
  report.summary = summarize(report.rows, ts);
  return report;
}

double calibrate_lim(const RobotModel& model, const std::vector<std::vector<Waypoint>>& family, double det_epsilon,
                     double sample_time) {
  if (family.empty()) throw Error(ErrorKind::ContractViolation, "empty trajectory family");
  double sum = 0.0;
  for (const auto& member : family) {
    const auto samples = interpolate(member, sample_time);
    const double threshold = det_epsilon * std::abs(jacobians(model, samples.front().pose).det_forward);
    auto below = [&](double t) {
      const double d = det_at(model, pose_at(member, t));
      return !std::isfinite(d) || std::abs(d) < threshold;
    };
    std::optional<double> hit;
    for (std::size_t k = 1; k < samples.size(); ++k) {
      if (!below(samples[k].t)) continue;
      // Refine inside the bracketing interval so the result depends on the
      // path geometry only.
      double lo = samples[k - 1].t;
      double hi = samples[k].t;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (below(mid) ? hi : lo) = mid;
      }
      hit = hi;
      break;
    }
    if (!hit) throw Error(ErrorKind::ContractViolation, "trajectory never reaches the determinant threshold");
    sum += alpha(model, pose_at(member, *hit)).value;
  }
  return sum / static_cast<double>(family.size());
}

}  // namespace ots
