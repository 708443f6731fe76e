#ifndef THINHOM_ASSEMBLY_HPP
#define THINHOM_ASSEMBLY_HPP

#include "thinhom/flux.hpp"
#include "thinhom/mesh.hpp"
#include "thinhom/samples.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <functional>
#include <optional>

namespace thinhom {

/// P1 coefficient vector, one value per mesh node.
using Field = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Right-hand side f, either a closed-form function of (x1, x2) or a P1
/// field on the mesh being assembled. A default-constructed Load is f == 0.
class Load {
public:
  using Function = std::function<double(double, double)>;

  Load() = default;
  Load(Function f) : fn_(std::move(f)) {}
  static Load constant(double c) {
    return Load([c](double, double) { return c; });
  }
  static Load nodal(Field values) {
    Load l;
    l.nodal_ = std::move(values);
    return l;
  }

  bool is_zero() const { return !fn_ && !nodal_; }
  /// f at point x of triangle t with barycentric coordinates lam.
  double at(const Mesh& mesh, Index t, const Eigen::Vector3d& lam, const Eigen::Vector2d& x) const;
  /// Closed-form value; nodal loads cannot be evaluated off-mesh.
  double operator()(double x1, double x2) const;

private:
  Function fn_;
  std::optional<Field> nodal_;
};

/// Energy, residual and Jacobian of the discrete functional
///
///   E(u) = sum_T |T| (1/p)(delta^2 + |shift + grad_eps u|^2)^(p/2)
///        + int_Q [ (1/p)(delta^2 + u^2)^(p/2) - f u ]
///
/// where grad_eps u = (d1 u, d2 u / eps_weight) is constant per triangle and
/// int_Q is the 3-point (degree 2) triangle rule. The mass term is optional
/// (cell problems have none); shift is (1, 0) for the cell problem.
class PLaplaceForm {
public:
  PLaplaceForm(const Mesh& mesh, FluxParams params, Load load = {}, Eigen::Vector2d shift = Eigen::Vector2d::Zero(),
               bool mass_term = true);

  const Mesh& mesh() const { return *mesh_; }
  const FluxParams& params() const { return params_; }
  void set_delta(double delta) { params_.delta = delta; }

  double energy(const Field& u) const;
  Eigen::VectorXd residual(const Field& u) const;
  SparseMatrix jacobian(const Field& u) const;

  /// shift + grad_eps u on triangle t.
  Eigen::Vector2d total_gradient(const Field& u, Index t) const;

private:
  const Mesh* mesh_;
  FluxParams params_;
  Load load_;
  Eigen::Vector2d shift_;
  bool mass_term_;
};

/// Quadrature points of the degree-2 interior triangle rule (barycentric
/// columns); each carries weight |T| / 3.
const Eigen::Matrix3d& triangle_quadrature();

/// Constant gradient of the P1 interpolant of u on triangle t.
Eigen::Vector2d element_gradient(const Mesh& mesh, const Field& u, Index t);

Eigen::VectorXd assemble_residual(const Mesh& mesh, const Field& u, const FluxParams& params, const Load& load);
double assemble_energy(const Mesh& mesh, const Field& u, const FluxParams& params, const Load& load);
SparseMatrix assemble_jacobian(const Mesh& mesh, const Field& u, const FluxParams& params);

/// (int |u|^p)^(1/p) with the degree-2 rule.
double lp_norm(const Mesh& mesh, const Field& u, double p);
/// (int |grad_eps u|^p)^(1/p).
double w1p_eps_seminorm(const Mesh& mesh, const Field& u, const FluxParams& params);

/// Nodal interpolant of a closed-form function.
Field interpolate(const Mesh& mesh, const std::function<double(double, double)>& f);

/// fhat^eps(x1) = int_0^{g(x1/eps)} f(x1, x2) dx2 at n1 uniform stations
/// x1 = k / (n1 - 1), by Gauss-Legendre quadrature on each fiber.
Samples1D fhat_of(const Load& load, const ProfileSpec& spec, double eps, Eigen::Index n1);

/// Weak limit of fhat^eps as eps -> 0 for an eps-independent f:
/// (1/L) int_0^L int_0^{g(s)} f(x1, x2) dx2 ds at the same stations.
Samples1D fhat_limit(const Load& load, const ProfileSpec& spec, Eigen::Index n1, int period_samples = 256);

} // namespace thinhom

#endif // THINHOM_ASSEMBLY_HPP
