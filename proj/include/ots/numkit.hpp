#pragma once

#include <functional>

#include <Eigen/Dense>

namespace ots {

inline constexpr int kMaxDim = 8;

/// Fixed-capacity dense types; nothing in this project exceeds 8 rows/cols.
using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;
using SmallVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;

using VectorFunction = std::function<SmallVector(const SmallVector&)>;

/// Unit vector spanning the one-dimensional null space of an (n-1)×n matrix.
/// The sign is fixed so the first component with magnitude above 1e-8 is
/// positive. Throws DegenerateAnnihilator when the nullity exceeds one.
SmallVector null_unit(const SmallMatrix& a);

/// Central-difference Jacobian of `f` at `x`.
SmallMatrix fd_jacobian(const VectorFunction& f, const SmallVector& x, double step = 1e-6);

struct NewtonOptions {
  double tol = 1e-10;  // on the infinity norm of the residual
  int max_iter = 50;
  int max_halvings = 20;
  double fd_step = 1e-6;
};

struct NewtonResult {
  SmallVector x;
  int iterations = 0;
  double residual_norm = 0.0;
};

/// Damped Newton iteration. `jacobian` may be empty, in which case a
/// central-difference Jacobian is used. Throws NoConvergence.
NewtonResult newton_solve(const VectorFunction& residual, const SmallVector& x0,
                          const NewtonOptions& options = {},
                          const std::function<SmallMatrix(const SmallVector&)>& jacobian = {});

}  // namespace ots
