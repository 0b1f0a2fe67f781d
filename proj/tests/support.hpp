#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "ots/five_bar.hpp"
#include "ots/io.hpp"
#include "ots/planner.hpp"
#include "ots/ups_rpu.hpp"

namespace ots::test {

inline constexpr double kDeg = std::numbers::pi / 180.0;

inline Pose planar(double x, double y) {
  Pose p(2);
  p << x, y;
  return p;
}

inline Pose spatial(double x, double z, double theta_deg, double psi_deg) {
  Pose p(4);
  p << x, z, theta_deg * kDeg, psi_deg * kDeg;
  return p;
}

inline std::string preset(const std::string& name) { return std::string(OTS_PRESET_DIR) + "/" + name; }

inline std::vector<Waypoint> table2() { return io::load_trajectory(preset("table2.csv"), io::RobotType::FiveBar); }
inline std::vector<Waypoint> table5() { return io::load_trajectory(preset("table5.csv"), io::RobotType::UpsRpu); }
inline std::vector<Waypoint> table6() { return io::load_trajectory(preset("table6.csv"), io::RobotType::UpsRpu); }

inline Pose table2_singular() { return planar(-0.03, 0.05); }
inline Pose table5_start() { return spatial(0.038, 0.640, 1.14, 3.64); }
inline Pose table5_singular() { return spatial(0.016, 0.707, 8.619, 18.15); }

/// Reachable five-bar pose with alpha above `min_alpha`.
inline Pose random_five_bar_pose(const FiveBar& model, std::mt19937& rng, double min_alpha = 5.0 * kDeg) {
  std::uniform_real_distribution<double> ux(-0.08, 0.08);
  std::uniform_real_distribution<double> uy(0.0, 0.11);
  for (;;) {
    const Pose x = planar(ux(rng), uy(rng));
    try {
      if (alpha(model, x).value > min_alpha) return x;
    } catch (const Error&) {
    }
  }
}

/// Reachable spatial pose near the rehabilitation workspace with alpha above
/// `min_alpha`.
inline Pose random_spatial_pose(const UpsRpu& model, std::mt19937& rng, double min_alpha = 3.0 * kDeg) {
  std::uniform_real_distribution<double> ux(-0.05, 0.22);
  std::uniform_real_distribution<double> uz(0.55, 0.85);
  std::uniform_real_distribution<double> ut(-10.0, 25.0);
  std::uniform_real_distribution<double> up(-10.0, 30.0);
  for (;;) {
    const Pose x = spatial(ux(rng), uz(rng), ut(rng), up(rng));
    try {
      model.inverse_kinematics(x);
      if (alpha(model, x).value > min_alpha) return x;
    } catch (const Error&) {
    }
  }
}

/// Folded angle between two directions of any dimension.
template <typename A, typename B>
double direction_angle(const A& a, const B& b) {
  const double c = std::abs(a.dot(b)) / (a.norm() * b.norm());
  return std::acos(std::min(1.0, c));
}

}  // namespace ots::test
