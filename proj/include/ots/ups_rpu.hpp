#pragma once

#include <array>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "ots/model.hpp"

namespace ots {

/// Position of "fitted" in `vertex_conventions()`.
inline constexpr int kDefaultConvention = 4;

/// Polar angles (rad) of the three outer-limb vertices on each platform.
struct VertexLayout {
  std::array<double, 3> fixed{};
  std::array<double, 3> mobile{};
};

/// Geometry of the 4-DOF 3UPS+RPU robot. Lengths in m, angles in rad.
struct SpatialGeometry {
  std::array<double, 3> fixed_radius{0.4, 0.4, 0.4};
  double beta_fd = 90.0 * std::numbers::pi / 180.0;
  double beta_fi = 45.0 * std::numbers::pi / 180.0;
  double ds = 0.15;
  std::array<double, 3> mobile_radius{0.3, 0.3, 0.3};
  double beta_md = 50.0 * std::numbers::pi / 180.0;
  double beta_mi = 90.0 * std::numbers::pi / 180.0;
  /// Index into `vertex_conventions()`.
  int convention = kDefaultConvention;
  /// Explicit layout; overrides `convention` when set.
  std::optional<VertexLayout> custom_layout;

  VertexLayout layout() const;
  void validate() const;
};

struct VertexConvention {
  std::string id;
  std::string description;
  /// Maps (beta_fd, beta_fi, beta_md, beta_mi) to a layout.
  VertexLayout (*build)(double, double, double, double);
};

/// Candidate placements in fixed trial order.
const std::vector<VertexConvention>& vertex_conventions();
std::optional<int> find_convention(const std::string& id);

struct SpatialPose {
  double x = 0.0;      // m
  double z = 0.0;      // m
  double theta = 0.0;  // rad, about Y
  double psi = 0.0;    // rad, about rotated Z'

  static SpatialPose from(const Pose& p) { return {p(0), p(1), p(2), p(3)}; }
  Pose vector() const;
};

struct SpatialJoints {
  double q13 = 0.0;
  double q23 = 0.0;
  double q33 = 0.0;
  double q42 = 0.0;
  double q41 = 0.0;  // passive revolute about Y at D0

  JointVector actuated() const;
};

struct Vertices {
  std::array<Eigen::Vector3d, 4> fixed;   // A0, B0, C0, D0
  std::array<Eigen::Vector3d, 4> mobile;  // A1, B1, C1, Om (world frame)
};

/// Y-Z' Euler rotation of the mobile frame.
Eigen::Matrix3d platform_rotation(double theta, double psi);

Vertices vertices(const SpatialGeometry& g, const SpatialPose& pose);

/// Unit force direction of an outer limb from its universal-joint angles.
Eigen::Vector3d universal_joint_direction(double q1, double q2);
/// Inverse of `universal_joint_direction` with q2 in [0, pi].
std::array<double, 2> universal_joint_angles(const Eigen::Vector3d& f);

struct StrokeLimits {
  double min = 0.4;
  double max = 1.0;
};

class UpsRpu final : public RobotModel {
 public:
  explicit UpsRpu(SpatialGeometry geometry = {}, StrokeLimits stroke = {});

  const SpatialGeometry& geometry() const { return geometry_; }

  std::string name() const override { return "3ups_rpu"; }
  int dof() const override { return 4; }
  IndexKind index_kind() const override { return IndexKind::Omega; }
  const JointLimits& joint_limits() const override { return limits_; }

  JointVector inverse_kinematics(const Pose& x) const override;
  Pose forward_kinematics(const JointVector& q, const Pose& guess) const override;
  SmallVector constraint_residual(const Pose& x, const JointVector& q) const override;
  std::vector<Screw> transmission_wrenches(const Pose& x) const override;
  std::vector<Screw> output_twists(const Pose& x) const override;
  Screw platform_twist(const Pose& x, const SmallVector& x_dot) const override;
  std::vector<int> twist_components() const override { return {0, 1, 2, 3, 4, 5}; }

  /// Limb lengths and the central revolute angle, without stroke checks.
  SpatialJoints joints(const Pose& x) const;
  /// Output twist of one limb (0-based).
  Screw output_twist(const Pose& x, int limb) const;

 private:
  SpatialGeometry geometry_;
  JointLimits limits_;
};

struct ConventionCheck {
  std::string id;
  double omega_at_pose = 0.0;  // min Omega at the singular pose
  int pair_i = 0;
  int pair_j = 0;
  /// Path parameter of the det J_D sign change (0 start, 1 singular pose).
  std::optional<double> crossing;
  double omega_at_crossing = 0.0;
  int crossing_i = 0;
  int crossing_j = 0;
  bool passed = false;
  std::string reason;
};

/// Checks a layout against a published singular pose: min Omega there below
/// `pose_tol` with argmin pair (3,4), and a det J_D sign change on the line
/// from `start` through the pose (scanned up to `extent` past it) that lies
/// in the same min Omega < `pose_tol` zone as the pose, with min Omega below
/// `crossing_tol` on pair (3,4) at the last sample before the sign change.
ConventionCheck check_convention(const UpsRpu& model, const Pose& start, const Pose& singular, int samples = 1276,
                                 double extent = 0.2, double pose_tol = 2.0 * std::numbers::pi / 180.0,
                                 double crossing_tol = std::numbers::pi / 180.0);

/// Runs `check_convention` over `vertex_conventions()` in order.
std::vector<ConventionCheck> check_all_conventions(const SpatialGeometry& base, StrokeLimits stroke, const Pose& start,
                                                   const Pose& singular);

/// |theta| at or beyond this makes the pitch-coupling row unusable.
inline constexpr double kMaxTilt = 85.0 * std::numbers::pi / 180.0;

}  // namespace ots
