#ifndef THINHOM_FLUX_HPP
#define THINHOM_FLUX_HPP

#include "thinhom/errors.hpp"

#include <Eigen/Core>

#include <cmath>

namespace thinhom {

/// Exponent, regularization and anisotropy of the p-Laplacian flux.
/// eps_weight is 1 for cell problems and eps for thin-domain problems.
struct FluxParams {
  double p = 2.0;
  double delta = 0.0;
  double eps_weight = 1.0;

  FluxParams() = default;
  FluxParams(double p_, double delta_ = 0.0, double eps_weight_ = 1.0)
      : p(p_), delta(delta_), eps_weight(eps_weight_) {
    if (!(p > 1.0)) throw ConfigError("p must exceed 1");
    if (!(delta >= 0.0)) throw ConfigError("delta must be nonnegative");
    if (!(eps_weight > 0.0)) throw ConfigError("eps_weight must be positive");
  }

  /// Conjugate exponent p' = p / (p - 1).
  double conjugate() const { return p / (p - 1.0); }
};

/// Anisotropic gradient (d1 u, d2 u / eps).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 2, 1> scaled_gradient(const Eigen::MatrixBase<Derived>& grad,
                                                               const FluxParams& params) {
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived, 2);
  return {grad(0), grad(1) / params.eps_weight};
}

/// Scalar weight (delta^2 + s^2)^((p-2)/2) of the regularized flux, with the
/// removable singularity at s = 0, delta = 0 mapped to 0 for p < 2 (the
/// flux itself vanishes there).
template <typename Scalar>
Scalar flux_weight(Scalar norm2, Scalar p, Scalar delta) {
  const Scalar r2 = delta * delta + norm2;
  if (r2 == Scalar(0)) return p == Scalar(2) ? Scalar(1) : Scalar(0);
  return std::pow(r2, (p - Scalar(2)) / Scalar(2));
}

/// Regularized monotone flux (delta^2 + |xi|^2)^((p-2)/2) xi; equals
/// |xi|^(p-2) xi at delta = 0.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Derived::RowsAtCompileTime, 1> a_p_reg(const Eigen::MatrixBase<Derived>& xi,
                                                                               typename Derived::Scalar p,
                                                                               typename Derived::Scalar delta) {
  return flux_weight(xi.squaredNorm(), p, delta) * xi;
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Derived::RowsAtCompileTime, 1> a_p_reg(const Eigen::MatrixBase<Derived>& xi,
                                                                               const FluxParams& params) {
  return a_p_reg(xi, params.p, params.delta);
}

/// Unregularized a_p(xi) = |xi|^(p-2) xi.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Derived::RowsAtCompileTime, 1> a_p(const Eigen::MatrixBase<Derived>& xi,
                                                                           typename Derived::Scalar p) {
  return a_p_reg(xi, p, typename Derived::Scalar(0));
}

/// a_{p'}(xi), the inverse map of a_p.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Derived::RowsAtCompileTime, 1> a_p_dual(const Eigen::MatrixBase<Derived>& xi,
                                                                                typename Derived::Scalar p) {
  using Scalar = typename Derived::Scalar;
  return a_p(xi, p / (p - Scalar(1)));
}

/// Derivative of a_p_reg: w (I + (p-2) xi xi^T / (delta^2 + |xi|^2)).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Derived::RowsAtCompileTime, Derived::RowsAtCompileTime>
a_p_reg_jacobian(const Eigen::MatrixBase<Derived>& xi, typename Derived::Scalar p, typename Derived::Scalar delta) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Derived::RowsAtCompileTime, Derived::RowsAtCompileTime>;
  const Scalar r2 = delta * delta + xi.squaredNorm();
  if (r2 == Scalar(0)) return Mat::Identity(xi.rows(), xi.rows()) * (p == Scalar(2) ? Scalar(1) : Scalar(0));
  const Scalar w = std::pow(r2, (p - Scalar(2)) / Scalar(2));
  return w * (Mat::Identity(xi.rows(), xi.rows()) + (p - Scalar(2)) / r2 * xi * xi.transpose());
}

/// Potential (1/p)(delta^2 + |xi|^2)^(p/2) whose gradient is a_p_reg.
template <typename Scalar>
Scalar flux_potential(Scalar norm2, Scalar p, Scalar delta) {
  return std::pow(delta * delta + norm2, p / Scalar(2)) / p;
}

/// Scalar versions used for the |u|^(p-2) u mass term.
template <typename Scalar>
Scalar a_p_scalar(Scalar u, Scalar p, Scalar delta) {
  return flux_weight(u * u, p, delta) * u;
}

template <typename Scalar>
Scalar a_p_scalar_derivative(Scalar u, Scalar p, Scalar delta) {
  const Scalar r2 = delta * delta + u * u;
  if (r2 == Scalar(0)) return p == Scalar(2) ? Scalar(1) : Scalar(0);
  return std::pow(r2, (p - Scalar(2)) / Scalar(2)) * (Scalar(1) + (p - Scalar(2)) * u * u / r2);
}

} // namespace thinhom

#endif // THINHOM_FLUX_HPP
