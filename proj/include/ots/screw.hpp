#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace ots {

enum class ScrewKind { Twist, Wrench };

/// Six-coordinate screw expressed about `ref_point`.
///
/// For a twist, `angular` is the angular velocity and `linear` the velocity of
/// the reference point. For a wrench, `angular` holds the moment about the
/// reference point and `linear` the force, so the reciprocal product is the
/// plain dot product of `coords()`.
struct Screw {
  Eigen::Vector3d angular = Eigen::Vector3d::Zero();
  Eigen::Vector3d linear = Eigen::Vector3d::Zero();
  ScrewKind kind = ScrewKind::Twist;
  Eigen::Vector3d ref_point = Eigen::Vector3d::Zero();

  static Screw twist(const Eigen::Vector3d& omega, const Eigen::Vector3d& v,
                     const Eigen::Vector3d& ref = Eigen::Vector3d::Zero());
  /// Wrench with force `f` and moment `m` about `ref`.
  static Screw wrench(const Eigen::Vector3d& f, const Eigen::Vector3d& m,
                      const Eigen::Vector3d& ref = Eigen::Vector3d::Zero());
  /// Pure force along a line through `ref`; moment part is exactly zero.
  static Screw pure_force(const Eigen::Vector3d& f, const Eigen::Vector3d& ref = Eigen::Vector3d::Zero());

  const Eigen::Vector3d& force() const { return linear; }
  const Eigen::Vector3d& moment() const { return angular; }

  Screw scaled(double c) const;
  /// (angular; linear) stacked.
  Eigen::Matrix<double, 6, 1> coords() const;
};

/// angular(t)·moment(w) + linear(t)·force(w). Both screws must share a
/// reference point.
double reciprocal_product(const Screw& t, const Screw& w);

/// arccos(|u·v|) in [0, π/2]. Inputs must be unit vectors within 1e-9.
double folded_angle(const Eigen::Vector3d& u, const Eigen::Vector3d& v);

/// One entry of an index vector. Limb indices are 1-based to match the usual
/// limb numbering; `value` is empty when the pair is undefined.
struct IndexPair {
  int i = 0;
  int j = 0;
  std::optional<double> value;

  bool defined() const { return value.has_value(); }
};

struct IndexVectors {
  std::vector<IndexPair> theta;  // linear parts
  std::vector<IndexPair> omega;  // angular parts
};

/// Parts below this norm are treated as absent when forming indices.
inline constexpr double kZeroPartTol = 1e-8;

IndexVectors index_vectors(std::span<const Screw> output_twists);

/// Smallest defined entry, ties broken by lexicographic (i, j).
std::optional<IndexPair> min_defined(std::span<const IndexPair> pairs);

/// Entry for pair (i, j) with i < j, 1-based.
const IndexPair& find_pair(std::span<const IndexPair> pairs, int i, int j);

}  // namespace ots
