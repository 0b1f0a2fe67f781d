#pragma once

#include <string>
#include <vector>

#include "ots/numkit.hpp"
#include "ots/screw.hpp"

namespace ots {

/// Task-space coordinates, ordered per model (planar: x, y; spatial: x, z,
/// theta, psi). Angles are radians.
using Pose = SmallVector;
/// Actuated joint values, one per limb.
using JointVector = SmallVector;

enum class IndexKind { Theta, Omega };

struct JointLimits {
  JointVector lower;
  JointVector upper;

  bool contains(const JointVector& q) const;
};

/// Kinematic model of a non-redundant parallel robot. Implementations are
/// immutable after construction and safe to share across threads.
class RobotModel {
 public:
  virtual ~RobotModel() = default;

  virtual std::string name() const = 0;
  virtual int dof() const = 0;
  /// Which index vector drives the proximity measure.
  virtual IndexKind index_kind() const = 0;
  virtual const JointLimits& joint_limits() const = 0;

  /// Throws OutOfWorkspace when the pose is not reachable.
  virtual JointVector inverse_kinematics(const Pose& x) const = 0;
  /// Solution continuous with `guess`. Throws InfeasibleCommand or
  /// NoConvergence.
  virtual Pose forward_kinematics(const JointVector& q, const Pose& guess) const = 0;
  /// Loop-closure residual in squared-length form (m^2).
  virtual SmallVector constraint_residual(const Pose& x, const JointVector& q) const = 0;

  /// Unit transmission wrenches about the platform reference point.
  virtual std::vector<Screw> transmission_wrenches(const Pose& x) const = 0;
  /// Normalized output twist screws, one per limb.
  virtual std::vector<Screw> output_twists(const Pose& x) const = 0;
  /// Platform twist about the reference point for a task-space rate.
  virtual Screw platform_twist(const Pose& x, const SmallVector& x_dot) const = 0;
  /// Screw coordinates (0..5 of `Screw::coords()`) that carry platform motion.
  virtual std::vector<int> twist_components() const = 0;
};

struct AlphaResult {
  double value = 0.0;
  int i = 0;
  int j = 0;
  IndexVectors indices;
};

IndexVectors indices_at(const RobotModel& model, const Pose& x);

/// Index vector used as the proximity measure for `model`.
const std::vector<IndexPair>& active_indices(const RobotModel& model, const IndexVectors& v);

/// Minimum active index and its limb pair. Throws UndefinedIndex when no pair
/// is defined.
AlphaResult alpha(const RobotModel& model, const Pose& x);

struct Jacobians {
  SmallMatrix inverse;  // d phi / d q
  SmallMatrix forward;  // d phi / d x
  double det_forward = 0.0;
};

Jacobians jacobians(const RobotModel& model, const Pose& x, double fd_step = 1e-6);

/// Task-space rate produced by joint rates: J_I q_dot + J_D x_dot = 0.
SmallVector pose_rate(const RobotModel& model, const Pose& x, const JointVector& q_dot);

/// Largest |OTS_i ∘ T_j| over i != j.
double max_reciprocal_residual(const RobotModel& model, const Pose& x);

struct SpanCheck {
  double residual = 0.0;
  double twist_norm = 0.0;
  SmallVector amplitudes;
  Screw twist;
};

/// Least-squares decomposition of the platform twist produced by `q_dot` in
/// the output twist basis.
SpanCheck twist_span_check(const RobotModel& model, const Pose& x, const JointVector& q_dot);

}  // namespace ots
