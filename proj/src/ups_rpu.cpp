#include "ots/ups_rpu.hpp"

#include <cmath>
#include <sstream>

#include "ots/error.hpp"

namespace ots {

namespace {

using Eigen::Vector3d;

constexpr double kPi = std::numbers::pi;

Vector3d polar(double radius, double angle) { return {radius * std::cos(angle), radius * std::sin(angle), 0.0}; }

}  // namespace

const std::vector<VertexConvention>& vertex_conventions() {
  static const std::vector<VertexConvention> conventions = {
      {"direct", "fixed (+bFD, -bFI, pi), mobile (+bMD, -bMI, pi)",
       [](double fd, double fi, double md, double mi) {
         return VertexLayout{{fd, -fi, kPi}, {md, -mi, kPi}};
       }},
      {"direct_mirrored", "fixed (-bFD, +bFI, pi), mobile (-bMD, +bMI, pi)",
       [](double fd, double fi, double md, double mi) {
         return VertexLayout{{-fd, fi, kPi}, {-md, mi, kPi}};
       }},
      {"fixed_mirrored", "fixed (-bFD, +bFI, pi), mobile (+bMD, -bMI, pi)",
       [](double fd, double fi, double md, double mi) {
         return VertexLayout{{-fd, fi, kPi}, {md, -mi, kPi}};
       }},
      {"mobile_mirrored", "fixed (+bFD, -bFI, pi), mobile (-bMD, +bMI, pi)",
       [](double fd, double fi, double md, double mi) {
         return VertexLayout{{fd, -fi, kPi}, {-md, mi, kPi}};
       }},
      {"fitted", "fixed (-bFI, bFI - pi, pi), mobile (0, pi - bMD, -bMI)",
       [](double, double fi, double md, double mi) {
         return VertexLayout{{-fi, fi - kPi, kPi}, {0.0, kPi - md, -mi}};
       }},
  };
  return conventions;
}

std::optional<int> find_convention(const std::string& id) {
  const auto& all = vertex_conventions();
  for (std::size_t k = 0; k < all.size(); ++k) {
    if (all[k].id == id) return static_cast<int>(k);
  }
  return std::nullopt;
}

VertexLayout SpatialGeometry::layout() const {
  if (custom_layout) return *custom_layout;
  const auto& all = vertex_conventions();
  if (convention < 0 || convention >= static_cast<int>(all.size())) {
    throw Error(ErrorKind::ContractViolation, "unknown vertex convention");
  }
  return all[convention].build(beta_fd, beta_fi, beta_md, beta_mi);
}

void SpatialGeometry::validate() const {
  for (double r : fixed_radius) {
    if (!(r > 0.0)) throw Error(ErrorKind::ContractViolation, "fixed radii must be > 0");
  }
  for (double r : mobile_radius) {
    if (!(r > 0.0)) throw Error(ErrorKind::ContractViolation, "mobile radii must be > 0");
  }
  if (!std::isfinite(ds) || !std::isfinite(beta_fd) || !std::isfinite(beta_fi) || !std::isfinite(beta_md) ||
      !std::isfinite(beta_mi)) {
    throw Error(ErrorKind::ContractViolation, "geometry parameters must be finite");
  }
  (void)layout();
}

Pose SpatialPose::vector() const {
  Pose p(4);
  p << x, z, theta, psi;
  return p;
}

JointVector SpatialJoints::actuated() const {
  JointVector q(4);
  q << q13, q23, q33, q42;
  return q;
}

Eigen::Matrix3d platform_rotation(double theta, double psi) {
  const double ct = std::cos(theta), st = std::sin(theta);
  const double cp = std::cos(psi), sp = std::sin(psi);
  Eigen::Matrix3d r;
  r << ct * cp, -ct * sp, st,
       sp, cp, 0.0,
       -st * cp, st * sp, ct;
  return r;
}

Vertices vertices(const SpatialGeometry& g, const SpatialPose& pose) {
  const VertexLayout layout = g.layout();
  const Eigen::Matrix3d rot = platform_rotation(pose.theta, pose.psi);
  const Vector3d origin(pose.x, 0.0, pose.z);
  Vertices v;
  for (int k = 0; k < 3; ++k) {
    v.fixed[k] = polar(g.fixed_radius[k], layout.fixed[k]);
    v.mobile[k] = origin + rot * polar(g.mobile_radius[k], layout.mobile[k]);
  }
  v.fixed[3] = Vector3d(g.ds, 0.0, 0.0);
  v.mobile[3] = origin;
  return v;
}

Vector3d universal_joint_direction(double q1, double q2) {
  return {std::cos(q1) * std::sin(q2), -std::cos(q2), std::sin(q1) * std::sin(q2)};
}

std::array<double, 2> universal_joint_angles(const Vector3d& f) {
  const double q2 = std::acos(std::clamp(-f.y(), -1.0, 1.0));
  const double q1 = std::atan2(f.z(), f.x());
  return {q1, q2};
}

UpsRpu::UpsRpu(SpatialGeometry geometry, StrokeLimits stroke) : geometry_(std::move(geometry)) {
  geometry_.validate();
  if (!(stroke.min < stroke.max) || !(stroke.min >= 0.0)) {
    throw Error(ErrorKind::ContractViolation, "stroke limits need 0 <= min < max");
  }
  limits_.lower = JointVector::Constant(4, stroke.min);
  limits_.upper = JointVector::Constant(4, stroke.max);
}

SpatialJoints UpsRpu::joints(const Pose& x) const {
  const Vertices v = vertices(geometry_, SpatialPose::from(x));
  SpatialJoints q;
  q.q13 = (v.mobile[0] - v.fixed[0]).norm();
  q.q23 = (v.mobile[1] - v.fixed[1]).norm();
  q.q33 = (v.mobile[2] - v.fixed[2]).norm();
  const Vector3d strut = v.mobile[3] - v.fixed[3];
  q.q42 = strut.norm();
  q.q41 = std::atan2(-strut.x(), strut.z());
  return q;
}

JointVector UpsRpu::inverse_kinematics(const Pose& x) const {
  const JointVector q = joints(x).actuated();
  if (!limits_.contains(q)) {
    std::ostringstream msg;
    msg << "limb lengths [" << q.transpose() << "] outside stroke";
    throw Error(ErrorKind::OutOfWorkspace, msg.str());
  }
  return q;
}

SmallVector UpsRpu::constraint_residual(const Pose& x, const JointVector& q) const {
  const Vertices v = vertices(geometry_, SpatialPose::from(x));
  SmallVector phi(4);
  for (int k = 0; k < 4; ++k) phi(k) = (v.mobile[k] - v.fixed[k]).squaredNorm() - q(k) * q(k);
  return phi;
}

Pose UpsRpu::forward_kinematics(const JointVector& q, const Pose& guess) const {
  const auto residual = [&](const SmallVector& x) { return constraint_residual(x, q); };
  return newton_solve(residual, guess).x;
}

std::vector<Screw> UpsRpu::transmission_wrenches(const Pose& x) const {
  const Vertices v = vertices(geometry_, SpatialPose::from(x));
  const Vector3d& om = v.mobile[3];
  std::vector<Screw> out;
  out.reserve(4);
  for (int k = 0; k < 4; ++k) {
    const Vector3d limb = v.mobile[k] - v.fixed[k];
    const double len = limb.norm();
    if (len < 1e-9) throw Error(ErrorKind::OutOfWorkspace, "zero-length limb");
    const Vector3d f = limb / len;
    if (k < 3) {
      out.push_back(Screw::wrench(f, (v.mobile[k] - om).cross(f), om));
    } else {
      out.push_back(Screw::pure_force(f, om));
    }
  }
  return out;
}

namespace {

Screw twist_reciprocal_to_others(const std::vector<Screw>& wrenches, double theta, int limb) {
  // Unknowns (w_x, w_y, w_z, v_x, v_z); v_y is zero by the platform constraint.
  SmallMatrix a(4, 5);
  int row = 0;
  for (int j = 0; j < 4; ++j) {
    if (j == limb) continue;
    const Vector3d& m = wrenches[j].moment();
    const Vector3d& f = wrenches[j].force();
    a.row(row++) << m.x(), m.y(), m.z(), f.x(), f.z();
  }
  a.row(row) << 1.0, 0.0, -std::tan(theta), 0.0, 0.0;

  const SmallVector n = null_unit(a);
  Vector3d w(n(0), n(1), n(2));
  Vector3d v(n(3), 0.0, n(4));
  const double wn = w.norm();
  if (wn >= kZeroPartTol) {
    w /= wn;
    v /= wn;
  } else {
    v.normalize();
    w.setZero();
  }
  return Screw::twist(w, v, wrenches[limb].ref_point);
}

void check_tilt(double theta) {
  if (!(std::abs(theta) < kMaxTilt)) throw Error(ErrorKind::ContractViolation, "tilt too close to 90 deg");
}

}  // namespace

Screw UpsRpu::output_twist(const Pose& x, int limb) const {
  if (limb < 0 || limb > 3) throw Error(ErrorKind::ContractViolation, "limb index out of range");
  check_tilt(x(2));
  return twist_reciprocal_to_others(transmission_wrenches(x), x(2), limb);
}

std::vector<Screw> UpsRpu::output_twists(const Pose& x) const {
  check_tilt(x(2));
  const auto wrenches = transmission_wrenches(x);
  std::vector<Screw> out;
  out.reserve(4);
  for (int k = 0; k < 4; ++k) out.push_back(twist_reciprocal_to_others(wrenches, x(2), k));
  return out;
}

Screw UpsRpu::platform_twist(const Pose& x, const SmallVector& x_dot) const {
  const double theta = x(2);
  const Vector3d omega = x_dot(2) * Vector3d::UnitY() + x_dot(3) * Vector3d(std::sin(theta), 0.0, std::cos(theta));
  return Screw::twist(omega, Vector3d(x_dot(0), 0.0, x_dot(1)), Vector3d(x(0), 0.0, x(1)));
}

}  // namespace ots

namespace ots {

ConventionCheck check_convention(const UpsRpu& model, const Pose& start, const Pose& singular, int samples,
                                 double extent, double pose_tol, double crossing_tol) {
  ConventionCheck out;
  const auto& g = model.geometry();
  out.id = g.custom_layout ? "custom" : vertex_conventions().at(g.convention).id;
  auto at = [&](int k) -> Pose { return start + (static_cast<double>(k) / samples) * (singular - start); };
  try {
    const AlphaResult a = alpha(model, singular);
    out.omega_at_pose = a.value;
    out.pair_i = a.i;
    out.pair_j = a.j;
  } catch (const Error& e) {
    out.reason = std::string("singular pose: ") + e.what();
    return out;
  }
  if (out.omega_at_pose >= pose_tol || out.pair_i != 3 || out.pair_j != 4) {
    out.reason = "singular pose not on a (3,4) Omega minimum";
    return out;
  }

  // Sampled det J_D along the approach line; the scan past the pose stops
  // where the line leaves the workspace.
  const int last = static_cast<int>(std::ceil(samples * (1.0 + extent)));
  std::vector<double> dets;
  for (int k = 0; k <= last; ++k) {
    try {
      dets.push_back(jacobians(model, at(k)).det_forward);
    } catch (const Error& e) {
      if (k <= samples) {
        out.reason = std::string("approach path: ") + e.what();
        return out;
      }
      break;
    }
  }
  std::optional<int> before;
  for (std::size_t k = 1; k < dets.size() && !before; ++k) {
    if (dets[k] == 0.0 || (dets[k] > 0.0) != (dets[k - 1] > 0.0)) before = static_cast<int>(k) - 1;
  }
  if (!before) {
    out.reason = "no det J_D sign change on the approach";
    return out;
  }
  double lo = static_cast<double>(*before) / samples;
  double hi = static_cast<double>(*before + 1) / samples;
  const bool positive = dets[*before] > 0.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double d = jacobians(model, start + mid * (singular - start)).det_forward;
    if ((d > 0.0) == positive) lo = mid;
    else hi = mid;
  }
  out.crossing = 0.5 * (lo + hi);

  // The crossing must sit in the same sub-threshold zone as the pose.
  const int from = std::min(*before, samples);
  const int to = std::max(*before, samples);
  for (int k = from; k <= to; ++k) {
    double value = 0.0;
    try {
      value = alpha(model, at(k)).value;
    } catch (const Error&) {
      value = 0.0;
    }
    if (value >= pose_tol) {
      out.reason = "det J_D sign change outside the zone around the singular pose";
      return out;
    }
  }
  try {
    // Every output twist collapses onto one screw on the locus itself, so
    // the index is read at the last sample before it.
    const AlphaResult a = alpha(model, at(*before));
    out.omega_at_crossing = a.value;
    out.crossing_i = a.i;
    out.crossing_j = a.j;
  } catch (const Error& e) {
    out.reason = std::string("crossing: ") + e.what();
    return out;
  }
  if (out.omega_at_crossing >= crossing_tol || out.crossing_i != 3 || out.crossing_j != 4) {
    out.reason = "crossing not on a (3,4) Omega minimum";
    return out;
  }
  out.passed = true;
  return out;
}

std::vector<ConventionCheck> check_all_conventions(const SpatialGeometry& base, StrokeLimits stroke, const Pose& start,
                                                   const Pose& singular) {
  std::vector<ConventionCheck> out;
  for (std::size_t k = 0; k < vertex_conventions().size(); ++k) {
    SpatialGeometry g = base;
    g.custom_layout.reset();
    g.convention = static_cast<int>(k);
    out.push_back(check_convention(UpsRpu(g, stroke), start, singular));
  }
  return out;
}

}  // namespace ots
