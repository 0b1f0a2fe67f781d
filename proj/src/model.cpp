#include "ots/model.hpp"

#include "ots/error.hpp"

namespace ots {

bool JointLimits::contains(const JointVector& q) const {
  for (Eigen::Index k = 0; k < q.size(); ++k) {
    if (!(q(k) >= lower(k) && q(k) <= upper(k))) return false;
  }
  return true;
}

IndexVectors indices_at(const RobotModel& model, const Pose& x) {
  const auto twists = model.output_twists(x);
  return index_vectors(twists);
}

const std::vector<IndexPair>& active_indices(const RobotModel& model, const IndexVectors& v) {
  return model.index_kind() == IndexKind::Theta ? v.theta : v.omega;
}

AlphaResult alpha(const RobotModel& model, const Pose& x) {
  AlphaResult out;
  out.indices = indices_at(model, x);
  const auto best = min_defined(active_indices(model, out.indices));
  if (!best) throw Error(ErrorKind::UndefinedIndex, "all index pairs undefined");
  out.value = *best->value;
  out.i = best->i;
  out.j = best->j;
  return out;
}

Jacobians jacobians(const RobotModel& model, const Pose& x, double fd_step) {
  const JointVector q = model.inverse_kinematics(x);
  Jacobians out;
  out.inverse = fd_jacobian([&](const SmallVector& qq) { return model.constraint_residual(x, qq); }, q, fd_step);
  out.forward = fd_jacobian([&](const SmallVector& xx) { return model.constraint_residual(xx, q); }, x, fd_step);
  out.det_forward = out.forward.determinant();
  return out;
}

SmallVector pose_rate(const RobotModel& model, const Pose& x, const JointVector& q_dot) {
  const Jacobians jac = jacobians(model, x);
  return jac.forward.fullPivLu().solve(-(jac.inverse * q_dot));
}

double max_reciprocal_residual(const RobotModel& model, const Pose& x) {
  const auto twists = model.output_twists(x);
  const auto wrenches = model.transmission_wrenches(x);
  double worst = 0.0;
  for (std::size_t i = 0; i < twists.size(); ++i) {
    for (std::size_t j = 0; j < wrenches.size(); ++j) {
      if (i == j) continue;
      worst = std::max(worst, std::abs(reciprocal_product(twists[i], wrenches[j])));
    }
  }
  return worst;
}

SpanCheck twist_span_check(const RobotModel& model, const Pose& x, const JointVector& q_dot) {
  const auto components = model.twist_components();
  const auto twists = model.output_twists(x);
  const auto rows = static_cast<Eigen::Index>(components.size());
  const auto cols = static_cast<Eigen::Index>(twists.size());

  SpanCheck out;
  out.twist = model.platform_twist(x, pose_rate(model, x, q_dot));
  const auto t = out.twist.coords();

  Eigen::MatrixXd basis(rows, cols);
  Eigen::VectorXd target(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    target(r) = t(components[r]);
    for (Eigen::Index c = 0; c < cols; ++c) basis(r, c) = twists[c].coords()(components[r]);
  }
  const Eigen::VectorXd k = basis.completeOrthogonalDecomposition().solve(target);
  out.amplitudes = k;
  out.residual = (basis * k - target).norm();
  out.twist_norm = target.norm();
  return out;
}

}  // namespace ots
