#include "ots/five_bar.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "ots/error.hpp"

namespace ots {

namespace {

using Eigen::Vector2d;
using Eigen::Vector3d;

double cross2(const Vector2d& a, const Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

double wrap(double a) { return std::remainder(a, 2.0 * std::numbers::pi); }

/// Intersection of circle(c0, r0) and circle(c1, r1) on the `side` of the
/// directed line c0 -> c1.
std::optional<Vector2d> circle_intersection(const Vector2d& c0, double r0, const Vector2d& c1, double r1, int side) {
  const Vector2d d = c1 - c0;
  const double dist = d.norm();
  if (dist < 1e-15) return std::nullopt;
  const double a = (r0 * r0 - r1 * r1 + dist * dist) / (2.0 * dist);
  double h2 = r0 * r0 - a * a;
  // Boundary configurations are accepted up to rounding.
  if (h2 < -1e-14 * r0 * r0) return std::nullopt;
  const double h = std::sqrt(std::max(h2, 0.0));
  const Vector2d mid = c0 + a * d / dist;
  const Vector2d left(-d.y() / dist, d.x() / dist);
  return mid + side * h * left;
}

Vector2d base1(const FiveBarGeometry& g) { return {-g.r10, 0.0}; }
Vector2d base2(const FiveBarGeometry& g) { return {g.r20, 0.0}; }

Vector2d elbow(const Vector2d& base, double len, double q) { return base + len * Vector2d(std::cos(q), std::sin(q)); }

}  // namespace

void FiveBarGeometry::validate() const {
  for (double v : {r10, r20, r11, r21, r12, r22}) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorKind::ContractViolation, "five-bar lengths must be > 0");
  }
}

std::array<WorkingMode, 4> WorkingMode::trial_order() {
  return {WorkingMode{+1, -1}, WorkingMode{+1, +1}, WorkingMode{-1, -1}, WorkingMode{-1, +1}};
}

std::optional<WorkingMode> WorkingMode::parse(const std::string& text) {
  if (text == "elbows_out" || text == "+-") return WorkingMode{+1, -1};
  if (text == "elbows_in" || text == "-+") return WorkingMode{-1, +1};
  if (text == "++") return WorkingMode{+1, +1};
  if (text == "--") return WorkingMode{-1, -1};
  return std::nullopt;
}

std::string WorkingMode::str() const {
  if (limb1 > 0 && limb2 < 0) return "elbows_out";
  if (limb1 < 0 && limb2 > 0) return "elbows_in";
  return limb1 > 0 ? "++" : "--";
}

FiveBarJoints ik_5r(const FiveBarGeometry& g, const WorkingMode& mode, const PlanarPose& p) {
  const Vector2d pt(p.x, p.y);
  const Vector2d a1 = base1(g);
  const Vector2d a2 = base2(g);
  const auto b1 = circle_intersection(a1, g.r11, pt, g.r12, mode.limb1);
  const auto b2 = circle_intersection(a2, g.r21, pt, g.r22, mode.limb2);
  if (!b1 || !b2) {
    std::ostringstream msg;
    msg << "five-bar pose (" << p.x << ", " << p.y << ") unreachable";
    throw Error(ErrorKind::OutOfWorkspace, msg.str());
  }
  FiveBarJoints q;
  q.q11 = std::atan2(b1->y() - a1.y(), b1->x() - a1.x());
  q.q21 = std::atan2(b2->y() - a2.y(), b2->x() - a2.x());
  q.q12 = wrap(std::atan2(pt.y() - b1->y(), pt.x() - b1->x()) - q.q11);
  q.q22 = wrap(std::atan2(pt.y() - b2->y(), pt.x() - b2->x()) - q.q21);
  return q;
}

int assembly_sign(const FiveBarGeometry& g, const FiveBarJoints& q, const PlanarPose& p) {
  const Vector2d b1 = elbow(base1(g), g.r11, q.q11);
  const Vector2d b2 = elbow(base2(g), g.r21, q.q21);
  return cross2(b2 - b1, Vector2d(p.x, p.y) - b1) >= 0.0 ? +1 : -1;
}

PlanarPose fk_5r(const FiveBarGeometry& g, const WorkingMode& mode, double q11, double q21, int assembly) {
  const Vector2d b1 = elbow(base1(g), g.r11, q11);
  const Vector2d b2 = elbow(base2(g), g.r21, q21);
  const auto pt = circle_intersection(b1, g.r12, b2, g.r22, assembly >= 0 ? +1 : -1);
  if (!pt) throw Error(ErrorKind::InfeasibleCommand, "distal circles do not intersect");
  const PlanarPose p{pt->x(), pt->y()};

  // The point must belong to the working-mode sheet, otherwise IK would not
  // return the commanded joints.
  FiveBarJoints back;
  try {
    back = ik_5r(g, mode, p);
  } catch (const Error&) {
    throw Error(ErrorKind::InfeasibleCommand, "FK solution outside the workspace");
  }
  if (std::abs(wrap(back.q11 - q11)) > 1e-7 || std::abs(wrap(back.q21 - q21)) > 1e-7) {
    throw Error(ErrorKind::InfeasibleCommand, "FK solution leaves the working mode");
  }
  return p;
}

Vector3d distal_direction(double q_proximal, double q_distal) {
  const double c1 = std::cos(q_proximal), s1 = std::sin(q_proximal);
  const double c2 = std::cos(q_distal), s2 = std::sin(q_distal);
  return {c1 * c2 - s1 * s2, s1 * c2 + c1 * s2, 0.0};
}

std::array<Vector3d, 2> transmission_forces_5r(const FiveBarGeometry& g, const FiveBarJoints& q, const PlanarPose& p) {
  const Vector2d pt(p.x, p.y);
  const Vector2d d1 = (pt - elbow(base1(g), g.r11, q.q11)).normalized();
  const Vector2d d2 = (pt - elbow(base2(g), g.r21, q.q21)).normalized();
  return {Vector3d(d1.x(), d1.y(), 0.0), Vector3d(d2.x(), d2.y(), 0.0)};
}

FiveBar::FiveBar(FiveBarGeometry geometry, WorkingMode mode, std::optional<JointLimits> limits)
    : geometry_(geometry), mode_(mode) {
  geometry_.validate();
  if (limits) {
    limits_ = *limits;
  } else {
    limits_.lower = JointVector::Constant(2, -std::numbers::pi);
    limits_.upper = JointVector::Constant(2, std::numbers::pi);
  }
  if (limits_.lower.size() != 2 || limits_.upper.size() != 2 || !(limits_.lower.array() < limits_.upper.array()).all()) {
    throw Error(ErrorKind::ContractViolation, "five-bar joint limits need min < max for 2 actuators");
  }
}

FiveBarJoints FiveBar::joints(const Pose& x) const { return ik_5r(geometry_, mode_, {x(0), x(1)}); }

JointVector FiveBar::inverse_kinematics(const Pose& x) const {
  const FiveBarJoints q = joints(x);
  JointVector out(2);
  out << q.q11, q.q21;
  return out;
}

Pose FiveBar::forward_kinematics(const JointVector& q, const Pose& guess) const {
  const PlanarPose seed{guess(0), guess(1)};
  int assembly = +1;
  try {
    assembly = assembly_sign(geometry_, joints(guess), seed);
  } catch (const Error&) {
    // Unreachable guess: fall back to the upper assembly.
  }
  const PlanarPose p = fk_5r(geometry_, mode_, q(0), q(1), assembly);
  Pose out(2);
  out << p.x, p.y;
  return out;
}

SmallVector FiveBar::constraint_residual(const Pose& x, const JointVector& q) const {
  const Vector2d pt(x(0), x(1));
  const Vector2d b1 = elbow(base1(geometry_), geometry_.r11, q(0));
  const Vector2d b2 = elbow(base2(geometry_), geometry_.r21, q(1));
  SmallVector phi(2);
  phi << (pt - b1).squaredNorm() - geometry_.r12 * geometry_.r12,
      (pt - b2).squaredNorm() - geometry_.r22 * geometry_.r22;
  return phi;
}

std::vector<Screw> FiveBar::transmission_wrenches(const Pose& x) const {
  const PlanarPose p{x(0), x(1)};
  const auto f = transmission_forces_5r(geometry_, joints(x), p);
  const Vector3d ref(p.x, p.y, 0.0);
  return {Screw::pure_force(f[0], ref), Screw::pure_force(f[1], ref)};
}

std::vector<Screw> FiveBar::output_twists(const Pose& x) const {
  const auto wrenches = transmission_wrenches(x);
  std::vector<Screw> out;
  out.reserve(2);
  for (int i = 0; i < 2; ++i) {
    const Vector3d& f = wrenches[1 - i].force();
    SmallMatrix a(1, 2);
    a << f.x(), f.y();
    const SmallVector v = null_unit(a);
    out.push_back(Screw::twist(Vector3d::UnitZ(), Vector3d(v(0), v(1), 0.0), wrenches[i].ref_point));
  }
  return out;
}

Screw FiveBar::platform_twist(const Pose& x, const SmallVector& x_dot) const {
  return Screw::twist(Vector3d::Zero(), Vector3d(x_dot(0), x_dot(1), 0.0), Vector3d(x(0), x(1), 0.0));
}

std::optional<WorkingMode> select_working_mode(const FiveBarGeometry& g, const PlanarPose& pose, double tolerance) {
  Pose x(2);
  x << pose.x, pose.y;
  for (const WorkingMode& mode : WorkingMode::trial_order()) {
    try {
      const FiveBar model(g, mode);
      if (alpha(model, x).value < tolerance) return mode;
    } catch (const Error&) {
      continue;
    }
  }
  return std::nullopt;
}

}  // namespace ots
