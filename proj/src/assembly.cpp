#include "thinhom/assembly.hpp"

#include "thinhom/errors.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace thinhom {

namespace {

// 8-point Gauss-Legendre on [0, 1].
constexpr std::array<double, 8> kGaussX = {0.019855071751231856, 0.10166676129318664, 0.2372337950418355,
                                           0.4082826787521751,   0.5917173212478249,  0.7627662049581645,
                                           0.8983332387068134,   0.9801449282487681};
constexpr std::array<double, 8> kGaussW = {0.05061426814518813, 0.11119051722668724, 0.15685332293894363,
                                           0.18134189168918100, 0.18134189168918100, 0.15685332293894363,
                                           0.11119051722668724, 0.05061426814518813};

double fiber_integral(const Load& load, double x1, double height) {
  double s = 0.0;
  for (std::size_t k = 0; k < kGaussX.size(); ++k) s += kGaussW[k] * load(x1, kGaussX[k] * height);
  return s * height;
}

void check_finite(double v, Index t, const char* what) {
  if (!std::isfinite(v)) throw AssemblyError(std::string("non-finite ") + what, long(t));
}

} // namespace

double Load::at(const Mesh& mesh, Index t, const Eigen::Vector3d& lam, const Eigen::Vector2d& x) const {
  if (nodal_) {
    const auto tri = mesh.triangle(t);
    return lam[0] * (*nodal_)[tri(0)] + lam[1] * (*nodal_)[tri(1)] + lam[2] * (*nodal_)[tri(2)];
  }
  if (fn_) return fn_(x.x(), x.y());
  return 0.0;
}

double Load::operator()(double x1, double x2) const {
  if (nodal_) throw Error("nodal load cannot be evaluated at an arbitrary point");
  return fn_ ? fn_(x1, x2) : 0.0;
}

const Eigen::Matrix3d& triangle_quadrature() {
  static const Eigen::Matrix3d q = [] {
    Eigen::Matrix3d m;
    m << 2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0,
         1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0,
         1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0;
    return m;
  }();
  return q;
}

Eigen::Vector2d element_gradient(const Mesh& mesh, const Field& u, Index t) {
  const auto tri = mesh.triangle(t);
  // Differences make the gradient of a constant exactly zero, which matters
  // where the flux is not Lipschitz at the origin (p < 2).
  const auto g = mesh.basis_gradients(t);
  return g.col(1) * (u[tri(1)] - u[tri(0)]) + g.col(2) * (u[tri(2)] - u[tri(0)]);
}

PLaplaceForm::PLaplaceForm(const Mesh& mesh, FluxParams params, Load load, Eigen::Vector2d shift, bool mass_term)
    : mesh_(&mesh), params_(params), load_(std::move(load)), shift_(shift), mass_term_(mass_term) {}

Eigen::Vector2d PLaplaceForm::total_gradient(const Field& u, Index t) const {
  return shift_ + scaled_gradient(element_gradient(*mesh_, u, t), params_);
}

double PLaplaceForm::energy(const Field& u) const {
  const Mesh& m = *mesh_;
  const double p = params_.p;
  const double delta = params_.delta;
  const Eigen::Matrix3d& quad = triangle_quadrature();
  double e = 0.0;
  for (Index t = 0; t < m.num_triangles(); ++t) {
    const double area = m.area(t);
    const Eigen::Vector2d xi = total_gradient(u, t);
    double et = area * flux_potential(xi.squaredNorm(), p, delta);
    const auto tri = m.triangle(t);
    const Eigen::Vector3d ut(u[tri(0)], u[tri(1)], u[tri(2)]);
    const bool need_points = mass_term_ || !load_.is_zero();
    if (need_points) {
      for (int q = 0; q < 3; ++q) {
        const Eigen::Vector3d lam = quad.col(q);
        const double uq = lam.dot(ut);
        double integrand = 0.0;
        if (mass_term_) integrand += flux_potential(uq * uq, p, delta);
        if (!load_.is_zero()) {
          const Eigen::Vector2d x = m.nodes()(Eigen::all, tri) * lam;
          integrand -= load_.at(m, t, lam, x) * uq;
        }
        et += area / 3.0 * integrand;
      }
    }
    check_finite(et, t, "energy");
    e += et;
  }
  return e;
}

Eigen::VectorXd PLaplaceForm::residual(const Field& u) const {
  const Mesh& m = *mesh_;
  const double p = params_.p;
  const double delta = params_.delta;
  const Eigen::Matrix3d& quad = triangle_quadrature();
  const Eigen::Vector2d scale(1.0, 1.0 / params_.eps_weight);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(m.num_nodes());
  for (Index t = 0; t < m.num_triangles(); ++t) {
    const double area = m.area(t);
    const auto tri = m.triangle(t);
    const Eigen::Vector2d flux = a_p_reg(total_gradient(u, t), p, delta);
    // row k: |T| a(xi) . grad_eps(lambda_k)
    Eigen::Vector3d rt = area * (scale.asDiagonal() * m.basis_gradients(t)).transpose() * flux;
    if (mass_term_ || !load_.is_zero()) {
      const Eigen::Vector3d ut(u[tri(0)], u[tri(1)], u[tri(2)]);
      for (int q = 0; q < 3; ++q) {
        const Eigen::Vector3d lam = quad.col(q);
        double integrand = 0.0;
        if (mass_term_) integrand += a_p_scalar(lam.dot(ut), p, delta);
        if (!load_.is_zero()) {
          const Eigen::Vector2d x = m.nodes()(Eigen::all, tri) * lam;
          integrand -= load_.at(m, t, lam, x);
        }
        rt += area / 3.0 * integrand * lam;
      }
    }
    for (int k = 0; k < 3; ++k) {
      check_finite(rt[k], t, "residual");
      r[tri(k)] += rt[k];
    }
  }
  return r;
}

SparseMatrix PLaplaceForm::jacobian(const Field& u) const {
  const Mesh& m = *mesh_;
  const double p = params_.p;
  const double delta = params_.delta;
  if (p < 2.0 && delta == 0.0) {
    throw SolverError("Jacobian of the p-Laplacian with p < 2 requires delta > 0");
  }
  const Eigen::Matrix3d& quad = triangle_quadrature();
  const Eigen::Vector2d scale(1.0, 1.0 / params_.eps_weight);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(std::size_t(9 * m.num_triangles()));
  for (Index t = 0; t < m.num_triangles(); ++t) {
    const double area = m.area(t);
    const auto tri = m.triangle(t);
    const Eigen::Matrix<double, 2, 3> sg = scale.asDiagonal() * m.basis_gradients(t);
    const Eigen::Matrix2d d = a_p_reg_jacobian(total_gradient(u, t), p, delta);
    Eigen::Matrix3d kt = area * sg.transpose() * d * sg;
    if (mass_term_) {
      const Eigen::Vector3d ut(u[tri(0)], u[tri(1)], u[tri(2)]);
      for (int q = 0; q < 3; ++q) {
        const Eigen::Vector3d lam = quad.col(q);
        kt += area / 3.0 * a_p_scalar_derivative(lam.dot(ut), p, delta) * lam * lam.transpose();
      }
    }
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        check_finite(kt(a, b), t, "Jacobian entry");
        trip.emplace_back(tri(a), tri(b), kt(a, b));
      }
    }
  }
  SparseMatrix j(m.num_nodes(), m.num_nodes());
  j.setFromTriplets(trip.begin(), trip.end());
  return j;
}

Eigen::VectorXd assemble_residual(const Mesh& mesh, const Field& u, const FluxParams& params, const Load& load) {
  return PLaplaceForm(mesh, params, load).residual(u);
}

double assemble_energy(const Mesh& mesh, const Field& u, const FluxParams& params, const Load& load) {
  return PLaplaceForm(mesh, params, load).energy(u);
}

SparseMatrix assemble_jacobian(const Mesh& mesh, const Field& u, const FluxParams& params) {
  return PLaplaceForm(mesh, params).jacobian(u);
}

double lp_norm(const Mesh& mesh, const Field& u, double p) {
  if (!(p >= 1.0)) throw Error("lp_norm needs p >= 1");
  const Eigen::Matrix3d& quad = triangle_quadrature();
  double s = 0.0;
  for (Index t = 0; t < mesh.num_triangles(); ++t) {
    const auto tri = mesh.triangle(t);
    const Eigen::Vector3d ut(u[tri(0)], u[tri(1)], u[tri(2)]);
    double st = 0.0;
    for (int q = 0; q < 3; ++q) st += std::pow(std::abs(quad.col(q).dot(ut)), p);
    s += mesh.area(t) / 3.0 * st;
  }
  return std::pow(s, 1.0 / p);
}

double w1p_eps_seminorm(const Mesh& mesh, const Field& u, const FluxParams& params) {
  double s = 0.0;
  for (Index t = 0; t < mesh.num_triangles(); ++t) {
    s += mesh.area(t) * std::pow(scaled_gradient(element_gradient(mesh, u, t), params).norm(), params.p);
  }
  return std::pow(s, 1.0 / params.p);
}

Field interpolate(const Mesh& mesh, const std::function<double(double, double)>& f) {
  Field u(mesh.num_nodes());
  for (Index i = 0; i < mesh.num_nodes(); ++i) u[i] = f(mesh.node(i).x(), mesh.node(i).y());
  return u;
}

Samples1D fhat_of(const Load& load, const ProfileSpec& spec, double eps, Eigen::Index n1) {
  if (n1 < 2) throw Error("fhat_of needs at least two stations");
  Eigen::VectorXd x = Samples1D::uniform_grid(n1);
  Eigen::VectorXd v(n1);
  for (Eigen::Index k = 0; k < n1; ++k) v[k] = fiber_integral(load, x[k], spec(x[k] / eps));
  return Samples1D(std::move(x), std::move(v));
}

Samples1D fhat_limit(const Load& load, const ProfileSpec& spec, Eigen::Index n1, int period_samples) {
  if (n1 < 2) throw Error("fhat_limit needs at least two stations");
  Eigen::VectorXd x = Samples1D::uniform_grid(n1);
  Eigen::VectorXd v(n1);
  const double L = spec.period();
  for (Eigen::Index k = 0; k < n1; ++k) {
    // periodic rectangle rule in s: spectrally accurate for smooth g
    double s = 0.0;
    for (int j = 0; j < period_samples; ++j) s += fiber_integral(load, x[k], spec(L * j / period_samples));
    v[k] = s / period_samples;
  }
  return Samples1D(std::move(x), std::move(v));
}

} // namespace thinhom
