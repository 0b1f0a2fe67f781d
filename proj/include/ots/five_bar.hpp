#pragma once

#include <array>
#include <optional>
#include <string>

#include "ots/model.hpp"

namespace ots {

/// Symmetric-capable planar five-bar. Base joints sit at A1 = (-r10, 0) and
/// A2 = (r20, 0); the origin is midway for the default geometry.
struct FiveBarGeometry {
  double r10 = 0.04;
  double r20 = 0.04;
  double r11 = 0.06;
  double r21 = 0.06;
  double r12 = 0.05;
  double r22 = 0.05;

  void validate() const;
};

/// Elbow side for each limb, relative to the directed line A_i -> P:
/// +1 puts the elbow on the left, -1 on the right.
struct WorkingMode {
  int limb1 = +1;
  int limb2 = -1;

  static WorkingMode elbows_out() { return {+1, -1}; }
  /// Fixed trial order used when validating a mode against a singular pose.
  static std::array<WorkingMode, 4> trial_order();
  static std::optional<WorkingMode> parse(const std::string& text);
  std::string str() const;
  bool operator==(const WorkingMode&) const = default;
};

struct PlanarPose {
  double x = 0.0;
  double y = 0.0;
};

struct FiveBarJoints {
  double q11 = 0.0;  // actuated, absolute from +x at A1
  double q21 = 0.0;  // actuated, absolute from +x at A2
  double q12 = 0.0;  // passive, relative to the proximal link
  double q22 = 0.0;
};

FiveBarJoints ik_5r(const FiveBarGeometry& g, const WorkingMode& mode, const PlanarPose& p);

/// Closed-form FK. `assembly` selects which side of the directed line B1 -> B2
/// the point lies on (+1 left, -1 right). Throws InfeasibleCommand when the
/// distal circles do not meet or the solution does not belong to `mode`.
PlanarPose fk_5r(const FiveBarGeometry& g, const WorkingMode& mode, double q11, double q21, int assembly);

/// Assembly sign of a configuration: side of B1 -> B2 on which P lies.
int assembly_sign(const FiveBarGeometry& g, const FiveBarJoints& q, const PlanarPose& p);

/// Unit distal-link directions f_T1, f_T2 (pure forces through P).
std::array<Eigen::Vector3d, 2> transmission_forces_5r(const FiveBarGeometry& g, const FiveBarJoints& q,
                                                      const PlanarPose& p);

/// Eq.-style trigonometric form (cos(q_i1 + q_i2), sin(q_i1 + q_i2), 0).
Eigen::Vector3d distal_direction(double q_proximal, double q_distal);

class FiveBar final : public RobotModel {
 public:
  explicit FiveBar(FiveBarGeometry geometry = {}, WorkingMode mode = WorkingMode::elbows_out(),
                   std::optional<JointLimits> limits = std::nullopt);

  const FiveBarGeometry& geometry() const { return geometry_; }
  const WorkingMode& working_mode() const { return mode_; }

  std::string name() const override { return "5r"; }
  int dof() const override { return 2; }
  IndexKind index_kind() const override { return IndexKind::Theta; }
  const JointLimits& joint_limits() const override { return limits_; }

  JointVector inverse_kinematics(const Pose& x) const override;
  Pose forward_kinematics(const JointVector& q, const Pose& guess) const override;
  SmallVector constraint_residual(const Pose& x, const JointVector& q) const override;
  std::vector<Screw> transmission_wrenches(const Pose& x) const override;
  std::vector<Screw> output_twists(const Pose& x) const override;
  Screw platform_twist(const Pose& x, const SmallVector& x_dot) const override;
  std::vector<int> twist_components() const override { return {3, 4}; }

  FiveBarJoints joints(const Pose& x) const;

 private:
  FiveBarGeometry geometry_;
  WorkingMode mode_;
  JointLimits limits_;
};

/// First mode in `WorkingMode::trial_order()` whose Theta_{1,2} at `pose` is
/// below `tolerance`, if any.
std::optional<WorkingMode> select_working_mode(const FiveBarGeometry& g, const PlanarPose& pose, double tolerance);

}  // namespace ots
