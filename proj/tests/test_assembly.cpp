#include "thinhom/assembly.hpp"
#include "thinhom/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace thinhom;

namespace {

const ProfileSpec kReference(1.0, 1.0, {0.5}, {});

Field random_field(Index n, unsigned seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, scale);
  Field u(n);
  for (Index i = 0; i < n; ++i) u[i] = nd(rng);
  return u;
}

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

} // namespace

TEST_CASE("element gradients reproduce linear functions") {
  const Mesh m = build_cell_mesh(kReference, 8, 4);
  const Field x1 = interpolate(m, [](double a, double) { return a; });
  const Field lin = interpolate(m, [](double a, double b) { return 3 * a + 2 * b; });
  const Field one = Field::Ones(m.num_nodes());
  for (Index t = 0; t < m.num_triangles(); ++t) {
    CHECK(element_gradient(m, x1, t).isApprox(Eigen::Vector2d(1, 0), 1e-12));
    CHECK(element_gradient(m, lin, t).isApprox(Eigen::Vector2d(3, 2), 1e-12));
    CHECK(element_gradient(m, one, t).norm() < 1e-12);
  }
}

TEST_CASE("constant data gives zero residual") {
  const Mesh m = build_thin_mesh(kReference, 0.25, 8, 4);
  for (double p : {1.5, 2.0, 3.0}) {
    const FluxParams params(p, 0.0, 0.25);
    CHECK(assemble_residual(m, Field::Ones(m.num_nodes()), params, Load::constant(1.0)).lpNorm<Eigen::Infinity>() <
          1e-14);
    CHECK(assemble_residual(m, Field::Zero(m.num_nodes()), params, Load()).lpNorm<Eigen::Infinity>() == 0.0);
  }
}

TEST_CASE("energy examples") {
  const Mesh m = build_cell_mesh(ProfileSpec::flat(1.0), 4, 4);
  CHECK(assemble_energy(m, Field::Zero(m.num_nodes()), FluxParams(3.0), Load()) == 0.0);
  CHECK(assemble_energy(m, Field::Ones(m.num_nodes()), FluxParams(2.0), Load()) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(assemble_energy(m, Field::Ones(m.num_nodes()), FluxParams(2.0), Load::constant(1.0)) ==
        doctest::Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("residual is the gradient of the energy") {
  const Mesh m = build_thin_mesh(kReference, 0.5, 8, 4);
  const Load f([](double a, double b) { return std::cos(std::numbers::pi * a) + 0.3 * b; });
  for (double p : {1.5, 2.0, 3.0}) {
    const PLaplaceForm form(m, FluxParams(p, 1e-2, 0.5), f);
    const Field u = random_field(m.num_nodes(), 5, 0.5);
    const Field d = random_field(m.num_nodes(), 6);
    const double h = 1e-5;
    // 4th-order central difference of E along d
    const double fd = (-form.energy(u + 2 * h * d) + 8 * form.energy(u + h * d) - 8 * form.energy(u - h * d) +
                       form.energy(u - 2 * h * d)) /
                      (12 * h);
    CHECK(rel(fd, form.residual(u).dot(d)) < 1e-5);
  }
}

TEST_CASE("Jacobian is the derivative of the residual") {
  const Mesh m = build_thin_mesh(kReference, 0.5, 8, 4);
  for (double p : {1.5, 2.0, 3.0}) {
    for (bool mass : {false, true}) {
      const PLaplaceForm form(m, FluxParams(p, 1e-2, 0.5), Load::constant(1.0), Eigen::Vector2d(1, 0), mass);
      const Field u = random_field(m.num_nodes(), 9, 0.5);
      const Field d = random_field(m.num_nodes(), 10);
      const double h = 1e-5;
      const Eigen::VectorXd fd = (-form.residual(u + 2 * h * d) + 8 * form.residual(u + h * d) -
                                  8 * form.residual(u - h * d) + form.residual(u - 2 * h * d)) /
                                 (12 * h);
      const SparseMatrix j = form.jacobian(u);
      const Eigen::VectorXd jd = j * d;
      CHECK((fd - jd).norm() / jd.norm() < 1e-5);
      const SparseMatrix asym = j - SparseMatrix(j.transpose());
      double amax = 0.0;
      for (int k = 0; k < asym.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(asym, k); it; ++it) amax = std::max(amax, std::abs(it.value()));
      }
      CHECK(amax < 1e-12);
    }
  }
}

TEST_CASE("p = 2 Jacobian does not depend on u") {
  const Mesh m = build_cell_mesh(kReference, 8, 4);
  const FluxParams params(2.0, 0.0);
  const SparseMatrix a = assemble_jacobian(m, random_field(m.num_nodes(), 1), params);
  const SparseMatrix b = assemble_jacobian(m, random_field(m.num_nodes(), 2), params);
  CHECK(SparseMatrix(a - b).norm() < 1e-12 * a.norm());
}

TEST_CASE("Jacobian for p < 2 requires regularization") {
  const Mesh m = build_cell_mesh(kReference, 4, 2);
  CHECK_THROWS_AS(assemble_jacobian(m, Field::Zero(m.num_nodes()), FluxParams(1.5, 0.0)), SolverError);
}

TEST_CASE("residual converges as delta decreases") {
  const Mesh m = build_cell_mesh(kReference, 8, 4);
  const Field u = random_field(m.num_nodes(), 4);
  for (double p : {2.0, 3.0}) {
    const Eigen::VectorXd r0 = assemble_residual(m, u, FluxParams(p, 0.0), Load());
    double prev = 1e300;
    for (double delta : {1e-2, 1e-4, 1e-6, 1e-8}) {
      const double diff = (assemble_residual(m, u, FluxParams(p, delta), Load()) - r0).norm();
      CHECK(diff <= prev);
      prev = diff;
    }
  }
}

TEST_CASE("norm examples") {
  const Mesh sq = build_cell_mesh(ProfileSpec::flat(1.0), 16, 16);
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    CHECK(lp_norm(sq, Field::Ones(sq.num_nodes()), p) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(lp_norm(sq, Field::Constant(sq.num_nodes(), -2.5), p) == doctest::Approx(2.5).epsilon(1e-13));
  }
  const Field x1 = interpolate(sq, [](double a, double) { return a; });
  CHECK(std::abs(lp_norm(sq, x1, 2.0) - 1.0 / std::sqrt(3.0)) < 1e-3);
  CHECK(w1p_eps_seminorm(sq, x1, FluxParams(3.0)) == doctest::Approx(1.0).epsilon(1e-13));
  const Field x2 = interpolate(sq, [](double, double b) { return b; });
  CHECK(w1p_eps_seminorm(sq, x2, FluxParams(2.0, 0.0, 0.5)) == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("nodal loads match closed-form loads on P1 data") {
  const Mesh m = build_cell_mesh(kReference, 8, 4);
  const auto lin = [](double a, double b) { return 1.0 + 2 * a - b; };
  const Field u = random_field(m.num_nodes(), 12, 0.3);
  const Eigen::VectorXd r1 = assemble_residual(m, u, FluxParams(3.0), Load(lin));
  const Eigen::VectorXd r2 = assemble_residual(m, u, FluxParams(3.0), Load::nodal(interpolate(m, lin)));
  CHECK((r1 - r2).norm() < 1e-13);
}

TEST_CASE("fiber integrals of the load") {
  const double eps = 0.125;
  const Samples1D one = fhat_of(Load::constant(1.0), kReference, eps, 101);
  for (Index k = 0; k < one.size(); ++k) CHECK(one.v[k] == doctest::Approx(kReference(one.x[k] / eps)).epsilon(1e-13));

  const auto cosx = [](double a, double) { return std::cos(std::numbers::pi * a); };
  const Samples1D fc = fhat_of(Load(cosx), kReference, eps, 101);
  for (Index k = 0; k < fc.size(); ++k) {
    CHECK(fc.v[k] == doctest::Approx(cosx(fc.x[k], 0) * kReference(fc.x[k] / eps)).epsilon(1e-12).scale(1.0));
  }

  // mean of g(x1 / eps) on a grid that does not resonate with the period
  const Samples1D fine = fhat_of(Load::constant(1.0), kReference, 1.0 / 64, 10007);
  CHECK(std::abs(fine.v.mean() - kReference.cell_measure() / kReference.period()) < 1e-3);

  const Samples1D lim = fhat_limit(Load(cosx), kReference, 11);
  for (Index k = 0; k < lim.size(); ++k) CHECK(lim.v[k] == doctest::Approx(cosx(lim.x[k], 0)).epsilon(1e-12).scale(1.0));
}
