#include "ots/numkit.hpp"

#include <cmath>
#include <sstream>

#include "ots/error.hpp"

namespace ots {

SmallVector null_unit(const SmallMatrix& a) {
  const auto m = a.rows();
  const auto n = a.cols();
  if (n < 2 || m != n - 1) {
    std::ostringstream msg;
    msg << "null_unit expects an (n-1)x n matrix, got " << m << "x" << n;
    throw Error(ErrorKind::ContractViolation, msg.str());
  }
  if (!a.allFinite()) throw Error(ErrorKind::ContractViolation, "null_unit input not finite");

  Eigen::JacobiSVD<SmallMatrix> svd(a, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double scale = std::max(1.0, s(0));
  // An (n-1)×n matrix always has a zero n-th singular value; the smallest
  // computed one is therefore the second smallest overall.
  if (s(s.size() - 1) < 1e-12 * scale) {
    throw Error(ErrorKind::DegenerateAnnihilator, "null space has dimension above one");
  }
  SmallVector v = svd.matrixV().col(n - 1);
  v.normalize();
  for (Eigen::Index k = 0; k < n; ++k) {
    if (std::abs(v(k)) > 1e-8) {
      if (v(k) < 0) v = -v;
      break;
    }
  }
  return v;
}

SmallMatrix fd_jacobian(const VectorFunction& f, const SmallVector& x, double step) {
  const SmallVector f0 = f(x);
  SmallMatrix jac(f0.size(), x.size());
  SmallVector xp = x;
  SmallVector xm = x;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    xp(k) = x(k) + step;
    xm(k) = x(k) - step;
    jac.col(k) = (f(xp) - f(xm)) / (2.0 * step);
    xp(k) = x(k);
    xm(k) = x(k);
  }
  return jac;
}

NewtonResult newton_solve(const VectorFunction& residual, const SmallVector& x0, const NewtonOptions& options,
                          const std::function<SmallMatrix(const SmallVector&)>& jacobian) {
  NewtonResult out;
  out.x = x0;
  SmallVector r = residual(out.x);
  double norm = r.lpNorm<Eigen::Infinity>();

  for (int it = 0; it < options.max_iter; ++it) {
    if (!std::isfinite(norm)) break;
    if (norm <= options.tol) {
      out.iterations = it;
      out.residual_norm = norm;
      return out;
    }
    const SmallMatrix jac = jacobian ? jacobian(out.x) : fd_jacobian(residual, out.x, options.fd_step);
    const SmallVector dx = jac.completeOrthogonalDecomposition().solve(-r);
    if (!dx.allFinite()) break;

    double lambda = 1.0;
    SmallVector trial = out.x + dx;
    SmallVector r_trial = residual(trial);
    double n_trial = r_trial.lpNorm<Eigen::Infinity>();
    for (int h = 0; h < options.max_halvings && !(n_trial < norm); ++h) {
      lambda *= 0.5;
      trial = out.x + lambda * dx;
      r_trial = residual(trial);
      n_trial = r_trial.lpNorm<Eigen::Infinity>();
    }
    out.x = trial;
    r = r_trial;
    norm = n_trial;
  }
  if (std::isfinite(norm) && norm <= options.tol) {
    out.iterations = options.max_iter;
    out.residual_norm = norm;
    return out;
  }
  std::ostringstream msg;
  msg << "newton stopped with residual " << norm;
  throw Error(ErrorKind::NoConvergence, msg.str());
}

}  // namespace ots
