#include "ots/screw.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ots/error.hpp"

namespace ots {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ContractViolation: return "contract violation";
    case ErrorKind::DegenerateAnnihilator: return "degenerate annihilator";
    case ErrorKind::NoConvergence: return "no convergence";
    case ErrorKind::OutOfWorkspace: return "out of workspace";
    case ErrorKind::InfeasibleCommand: return "infeasible joint command";
    case ErrorKind::UndefinedIndex: return "undefined index";
    case ErrorKind::Trapped: return "trapped";
    case ErrorKind::ConventionValidation: return "convention validation failed";
    case ErrorKind::Parse: return "parse error";
  }
  return "error";
}

Screw Screw::twist(const Eigen::Vector3d& omega, const Eigen::Vector3d& v, const Eigen::Vector3d& ref) {
  return Screw{omega, v, ScrewKind::Twist, ref};
}

Screw Screw::wrench(const Eigen::Vector3d& f, const Eigen::Vector3d& m, const Eigen::Vector3d& ref) {
  return Screw{m, f, ScrewKind::Wrench, ref};
}

Screw Screw::pure_force(const Eigen::Vector3d& f, const Eigen::Vector3d& ref) {
  return Screw{Eigen::Vector3d::Zero(), f, ScrewKind::Wrench, ref};
}

Screw Screw::scaled(double c) const { return Screw{c * angular, c * linear, kind, ref_point}; }

Eigen::Matrix<double, 6, 1> Screw::coords() const {
  Eigen::Matrix<double, 6, 1> out;
  out << angular, linear;
  return out;
}

double reciprocal_product(const Screw& t, const Screw& w) {
  if (t.kind != ScrewKind::Twist || w.kind != ScrewKind::Wrench) {
    throw Error(ErrorKind::ContractViolation, "reciprocal product needs (twist, wrench)");
  }
  if ((t.ref_point - w.ref_point).norm() > 1e-12) {
    throw Error(ErrorKind::ContractViolation, "screws expressed about different points");
  }
  return t.angular.dot(w.moment()) + t.linear.dot(w.force());
}

double folded_angle(const Eigen::Vector3d& u, const Eigen::Vector3d& v) {
  if (std::abs(u.norm() - 1.0) > 1e-9 || std::abs(v.norm() - 1.0) > 1e-9) {
    throw Error(ErrorKind::ContractViolation, "folded_angle expects unit vectors");
  }
  return std::acos(std::clamp(std::abs(u.dot(v)), 0.0, 1.0));
}

namespace {

std::optional<double> part_angle(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na < kZeroPartTol || nb < kZeroPartTol) return std::nullopt;
  return folded_angle(a / na, b / nb);
}

}  // namespace

IndexVectors index_vectors(std::span<const Screw> output_twists) {
  const auto n = static_cast<int>(output_twists.size());
  if (n < 2) throw Error(ErrorKind::ContractViolation, "index vectors need at least two twists");
  IndexVectors out;
  out.theta.reserve(n * (n - 1) / 2);
  out.omega.reserve(n * (n - 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Screw& a = output_twists[i];
      const Screw& b = output_twists[j];
      if ((a.ref_point - b.ref_point).norm() > 1e-12) {
        throw Error(ErrorKind::ContractViolation, "output twists about different points");
      }
      out.theta.push_back({i + 1, j + 1, part_angle(a.linear, b.linear)});
      out.omega.push_back({i + 1, j + 1, part_angle(a.angular, b.angular)});
    }
  }
  return out;
}

std::optional<IndexPair> min_defined(std::span<const IndexPair> pairs) {
  std::optional<IndexPair> best;
  // Pairs are generated in lexicographic order, so strict < keeps the first.
  for (const auto& p : pairs) {
    if (!p.defined()) continue;
    if (!best || *p.value < *best->value) best = p;
  }
  return best;
}

const IndexPair& find_pair(std::span<const IndexPair> pairs, int i, int j) {
  for (const auto& p : pairs) {
    if (p.i == i && p.j == j) return p;
  }
  std::ostringstream msg;
  msg << "no index pair (" << i << "," << j << ")";
  throw Error(ErrorKind::ContractViolation, msg.str());
}

}  // namespace ots
