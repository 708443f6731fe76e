#include "oracles.hpp"

#include "thinhom/errors.hpp"
#include "thinhom/limit1d.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace thinhom;

namespace {

constexpr double kPi = std::numbers::pi;

Samples1D sampled(const std::function<double(double)>& f, Index n = 4097) {
  const Eigen::VectorXd x = Samples1D::uniform_grid(n);
  Eigen::VectorXd v(n);
  for (Index k = 0; k < n; ++k) v[k] = f(x[k]);
  return Samples1D(x, v);
}

// Data for the manufactured solution u* = cos(pi x) at p = 3:
// -q (|u'| u')' + |u| u with u' = -pi sin(pi x) <= 0 on (0, 1).
double manufactured_rhs(double q, double x) {
  const double c = std::cos(kPi * x);
  return 2.0 * q * kPi * kPi * kPi * std::sin(kPi * x) * c + std::abs(c) * c;
}

} // namespace

TEST_CASE("constant data") {
  for (double p : {1.5, 2.0, 3.0}) {
    for (double q : {0.3, 1.0, 2.0}) {
      const Limit1DSolution s = solve_homogenized({q, p, sampled([](double) { return 1.0; }, 9), 32});
      CHECK((s.u0.v.array() - 1.0).abs().maxCoeff() < 1e-10);
    }
    const double c = 2.5;
    const Limit1DSolution s = solve_homogenized({0.7, p, sampled([c](double) { return c; }, 9), 32});
    CHECK((s.u0.v.array() - std::pow(c, 1.0 / (p - 1.0))).abs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("manufactured solution converges in W^{1,p}") {
  const double q = 0.8;
  const Samples1D fbar = sampled([q](double x) { return manufactured_rhs(q, x); });
  const auto w = [](double x) { return std::cos(kPi * x); };
  const auto dw = [](double x) { return -kPi * std::sin(kPi * x); };
  double prev = 0.0;
  for (int n : {16, 32, 64, 128}) {
    const Limit1DSolution s = solve_homogenized({q, 3.0, fbar, n});
    CHECK(s.diagnostics.max_energy_increase() <= 1e-12);
    const double err = w1p_error(s.u0, w, dw, 3.0);
    if (prev > 0.0) CHECK(prev / err >= 1.7);
    prev = err;
  }
}

TEST_CASE("p = 2 limit solve against the linear oracle") {
  const Samples1D fbar = sampled([](double x) { return std::cos(kPi * x) + 0.5 * x; }, 257);
  const Limit1DSolution s = solve_homogenized({0.6, 2.0, fbar, 200});
  const Eigen::VectorXd ref = oracle::linear_limit(0.6, fbar, 200);
  CHECK((s.u0.v - ref).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("scale invariance harness") {
  const Samples1D one = sampled([](double) { return 1.0; }, 9);
  const ScaleInvarianceReport flat = scale_invariance_check({1.0, 3.0, one, 64}, 2.0);
  CHECK(flat.constant_deviation < 1e-10);
  const Samples1D cosx = sampled([](double x) { return std::cos(kPi * x); });
  const ScaleInvarianceReport rep = scale_invariance_check({1.0, 3.0, cosx, 64}, 2.0);
  CHECK(rep.constant_deviation < 1e-10);
  CHECK(rep.scaled_change > 1e-6);
}

TEST_CASE("refinement self-convergence and Neumann consistency") {
  const Samples1D fbar = sampled([](double x) { return std::cos(kPi * x) + 0.2; });
  std::vector<Samples1D> sols;
  for (int n : {32, 64, 128, 256}) sols.push_back(solve_homogenized({1.0, 3.0, fbar, n}).u0);
  double prev_gap = 1e300;
  for (std::size_t k = 0; k + 1 < sols.size(); ++k) {
    double gap = 0.0;
    for (Index i = 0; i < sols[k].size(); ++i) gap = std::max(gap, std::abs(sols[k].v[i] - sols[k + 1](sols[k].x[i])));
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
  CHECK(prev_gap < 1e-3);
  double prev_end = 1e300;
  for (const Samples1D& s : sols) {
    const Samples1D slopes = element_slopes(s);
    const double ends = std::max(std::abs(slopes.v[0]), std::abs(slopes.v[slopes.size() - 1]));
    CHECK(ends < prev_end);
    prev_end = ends;
  }
}

TEST_CASE("nonnegative data gives a nonnegative solution") {
  const Samples1D fbar = sampled([](double x) { return x < 0.5 ? 0.0 : 2.0 * (x - 0.5); });
  for (double p : {1.5, 3.0}) {
    const Limit1DSolution s = solve_homogenized({0.5, p, fbar, 128});
    CHECK(s.u0.v.minCoeff() >= -1e-10);
  }
}

TEST_CASE("slopes and W^{1,p} error helpers") {
  const Samples1D lin = Samples1D::uniform(Eigen::VectorXd::LinSpaced(11, 1.0, 3.0));
  const Samples1D slopes = element_slopes(lin);
  CHECK(slopes.size() == 10);
  CHECK((slopes.v.array() - 2.0).abs().maxCoeff() < 1e-12);
  CHECK(slopes.x[0] == doctest::Approx(0.05));
  CHECK(w1p_error(lin, [](double x) { return 1.0 + 2.0 * x; }, [](double) { return 2.0; }, 3.0) < 1e-12);
}

TEST_CASE("invalid limit problems are rejected") {
  const Samples1D one = sampled([](double) { return 1.0; }, 9);
  CHECK_THROWS(solve_homogenized({-1.0, 3.0, one, 16}));
  CHECK_THROWS(solve_homogenized({1.0, 3.0, one, 1}));
}
