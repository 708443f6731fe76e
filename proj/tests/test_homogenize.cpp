#include "oracles.hpp"

#include "thinhom/errors.hpp"
#include "thinhom/homogenize.hpp"
#include "thinhom/study.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <random>
#include <sstream>

using namespace thinhom;

namespace {

const ProfileSpec kReference(1.0, 1.0, {0.5}, {});

double l2_distance(const Mesh& m, const Field& a, const Field& b) { return lp_norm(m, a - b, 2.0); }

} // namespace

TEST_CASE("flat cell: phi = 0 and q = 1") {
  for (double p : {1.5, 2.0, 3.0}) {
    for (double h : {0.5, 1.0, 2.0}) {
      const CellSolution cell = solve_cell(build_cell_mesh(ProfileSpec::flat(h, 2.0), 12, 5), p);
      CHECK(cell.phi.lpNorm<Eigen::Infinity>() < 1e-10);
      CHECK(std::abs(compute_q(cell) - 1.0) < 1e-10);
      CHECK(std::abs(cell.q_energy - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("p = 2 cell against the linear periodic oracle") {
  const Mesh m = build_cell_mesh(kReference, 64, 16);
  const CellSolution cell = solve_cell(m, 2.0);
  const oracle::LinearCell ref = oracle::linear_cell(m);
  CHECK(l2_distance(m, cell.phi, ref.phi) < 1e-6);
  CHECK(std::abs(compute_q(cell) - ref.q) < 1e-4);
  CHECK(ref.q > 0.0);
  CHECK(ref.q < 1.0);
}

TEST_CASE("q properties on the oscillating cell") {
  const Mesh m = build_cell_mesh(kReference, 32, 8);
  for (double p : {1.5, 2.0, 3.0}) {
    const CellSolution cell = solve_cell(m, p);
    const double q = compute_q(cell);
    CHECK(cell.q_energy > 0.0);
    CHECK(std::abs(cell.q_flux - cell.q_energy) / cell.q_energy < 1e-6);
    CHECK(q > 0.0);
    CHECK(q < 1.0 - 1e-4);
    CHECK(cell.diagnostics.max_energy_increase() <= 1e-12);
    // mean-zero normalization with the lumped weights
    CHECK(std::abs(m.lumped_weights().dot(cell.phi)) < 1e-12);
    for (const auto& [lead, follow] : m.periodic_pairs()) CHECK(cell.phi[lead] == cell.phi[follow]);
  }
}

TEST_CASE("q converges under mesh refinement") {
  double prev_q = 0.0;
  double prev_gap = 1e300;
  for (int k = 0; k < 4; ++k) {
    const int nx = 16 << k;
    const double q = compute_q(solve_cell(build_cell_mesh(kReference, nx, nx / 4), 3.0));
    if (k > 0) {
      const double gap = std::abs(q - prev_q);
      CHECK(gap < prev_gap);
      prev_gap = gap;
    }
    prev_q = q;
  }
}

TEST_CASE("theta") {
  CHECK(theta(kReference, 0.3) == 1.0);
  CHECK(theta(kReference, 1.6) == 0.0);
  CHECK(theta(kReference, 1.0) == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(theta(ProfileSpec::flat(1.0), 0.5) == 1.0);
}

TEST_CASE("cell measure from theta") {
  const auto flat = cell_measure_check(ProfileSpec::flat(1.0));
  CHECK(flat.first == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(flat.second == doctest::Approx(1.0).epsilon(1e-12));
  const auto ref = cell_measure_check(kReference);
  CHECK(std::abs(ref.first - 1.0) < 1e-3);
  CHECK(std::abs(ref.second - 1.0) < 1e-3);

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 10; ++k) {
    const double period = 0.5 + 1.5 * (u(rng) + 1.0) / 2.0;
    std::vector<double> c{0.4 * u(rng), 0.2 * u(rng)};
    std::vector<double> s{0.3 * u(rng)};
    const ProfileSpec spec(period, 1.0, c, s);
    const auto [lhs, rhs] = cell_measure_check(spec);
    CHECK(std::abs(lhs - rhs) < 1e-3);
    CHECK(rhs == doctest::Approx(spec.cell_measure()).epsilon(1e-6));
  }
}

TEST_CASE("b examples and consistency with q") {
  SUBCASE("flat cell") {
    const CellSolution cell = solve_cell(build_cell_mesh(ProfileSpec::flat(1.0), 8, 4), 3.0);
    for (double xi : {-2.0, 0.5, 3.0}) {
      const Eigen::Vector2d b = compute_b(cell, xi, 0.4);
      CHECK(b.x() == doctest::Approx(std::abs(xi) * xi).epsilon(1e-10));
      CHECK(std::abs(b.y()) < 1e-10);
    }
  }
  SUBCASE("oscillating cell") {
    for (double p : {1.5, 2.0, 3.0}) {
      const CellSolution cell = solve_cell(build_cell_mesh(kReference, 32, 8), p);
      const double q = compute_q(cell);
      CHECK(compute_b(cell, 0.0, 0.7).norm() == 0.0);
      CHECK(integrate_b_first(cell, 0.0) == 0.0);
      for (double xi : {-2.0, -1.0, 0.5, 1.0, 3.0}) {
        const double target = q * cell.cell_measure / cell.period * std::pow(std::abs(xi), p - 2.0) * xi;
        CHECK(std::abs(integrate_b_first(cell, xi) - target) <= 1e-4 * std::abs(target));
      }
    }
  }
}

TEST_CASE("corrector lookup wraps periodically") {
  const CellSolution cell = solve_cell(build_cell_mesh(kReference, 16, 4), 3.0);
  const Eigen::Vector2d a = cell.grad_phi_at(0.3, 0.2);
  CHECK(cell.grad_phi_at(3.3, 0.2).isApprox(a, 1e-12));
  CHECK(cell.grad_phi_at(-0.7, 0.2).isApprox(a, 1e-12));
  CHECK_THROWS_AS(cell.grad_phi_at(0.5, 1.4), MeshError);
}

TEST_CASE("fbar scaling") {
  const Samples1D fhat = Samples1D::uniform(Eigen::VectorXd::Constant(11, 2.0 / 3.0));
  const Samples1D fbar = fbar_of(fhat, 2.0 / 3.0, 1.0);
  CHECK((fbar.v.array() - 1.0).abs().maxCoeff() < 1e-15);
  CHECK(fbar_of(Samples1D::uniform(Eigen::VectorXd::Zero(5)), 1.0, 1.0).v.norm() == 0.0);

  // f = x1: fbar of the eps-fiber integral approaches x1 after cell averaging
  const double eps = 1.0 / 64;
  const Samples1D fhat_eps = fhat_of(Load([](double a, double) { return a; }), kReference, eps, 4097);
  const Samples1D smooth = moving_average(fbar_of(fhat_eps, kReference.cell_measure(), 1.0), eps);
  double worst = 0.0;
  for (Index k = 0; k < smooth.size(); ++k) {
    if (smooth.x[k] > eps && smooth.x[k] < 1.0 - eps) worst = std::max(worst, std::abs(smooth.v[k] - smooth.x[k]));
  }
  CHECK(worst < 1e-2);
}

TEST_CASE("cell summary is valid JSON") {
  const CellSolution cell = solve_cell(build_cell_mesh(ProfileSpec::flat(1.0), 8, 4), 2.0);
  std::stringstream ss;
  write_cell_summary(ss, cell);
  const nlohmann::json j = nlohmann::json::parse(ss.str());
  CHECK(j.at("q_flux").get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(j.at("p").get<double>() == 2.0);
}
