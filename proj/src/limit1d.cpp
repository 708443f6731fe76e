#include "thinhom/limit1d.hpp"

#include "thinhom/errors.hpp"
#include "thinhom/flux.hpp"

#include <cmath>
#include <vector>

namespace thinhom {

namespace {

constexpr double kG0 = 0.5 - 0.28867513459481287; // (1 - 1/sqrt 3) / 2
constexpr double kG1 = 0.5 + 0.28867513459481287;

} // namespace

void Limit1DProblem::validate() const {
  if (!(q > 0.0)) throw ConfigError("limit problem needs q > 0");
  if (!(p > 1.0)) throw ConfigError("p must exceed 1");
  if (n < 2) throw ConfigError("limit problem needs at least 2 elements");
  if (fbar.size() < 1) throw ConfigError("limit problem needs fbar samples");
}

Limit1DForm::Limit1DForm(Limit1DProblem prob) : prob_(std::move(prob)) {
  prob_.validate();
  const int n = prob_.n;
  const double h = 1.0 / n;
  fgauss_.resize(2 * n);
  for (int e = 0; e < n; ++e) {
    fgauss_[2 * e] = prob_.fbar((e + kG0) * h);
    fgauss_[2 * e + 1] = prob_.fbar((e + kG1) * h);
  }
}

double Limit1DForm::energy(const Field& u, double delta) const {
  const int n = prob_.n;
  const double h = 1.0 / n;
  const double p = prob_.p;
  double e = 0.0;
  for (int k = 0; k < n; ++k) {
    const double s = (u[k + 1] - u[k]) / h;
    double ek = h * prob_.q * flux_potential(s * s, p, delta);
    const double ua = (1.0 - kG0) * u[k] + kG0 * u[k + 1];
    const double ub = (1.0 - kG1) * u[k] + kG1 * u[k + 1];
    ek += 0.5 * h * (flux_potential(ua * ua, p, delta) - fgauss_[2 * k] * ua);
    ek += 0.5 * h * (flux_potential(ub * ub, p, delta) - fgauss_[2 * k + 1] * ub);
    if (!std::isfinite(ek)) throw AssemblyError("non-finite energy", k);
    e += ek;
  }
  return e;
}

Eigen::VectorXd Limit1DForm::residual(const Field& u, double delta) const {
  const int n = prob_.n;
  const double h = 1.0 / n;
  const double p = prob_.p;
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n + 1);
  for (int k = 0; k < n; ++k) {
    const double s = (u[k + 1] - u[k]) / h;
    const double flux = prob_.q * a_p_scalar(s, p, delta);
    double r0 = -flux;
    double r1 = flux;
    const double gx[2] = {kG0, kG1};
    for (int g = 0; g < 2; ++g) {
      const double ug = (1.0 - gx[g]) * u[k] + gx[g] * u[k + 1];
      const double m = 0.5 * h * (a_p_scalar(ug, p, delta) - fgauss_[2 * k + g]);
      r0 += m * (1.0 - gx[g]);
      r1 += m * gx[g];
    }
    if (!std::isfinite(r0) || !std::isfinite(r1)) throw AssemblyError("non-finite residual", k);
    r[k] += r0;
    r[k + 1] += r1;
  }
  return r;
}

SparseMatrix Limit1DForm::jacobian(const Field& u, double delta) const {
  const int n = prob_.n;
  const double h = 1.0 / n;
  const double p = prob_.p;
  if (p < 2.0 && delta == 0.0) throw SolverError("Jacobian of the p-Laplacian with p < 2 requires delta > 0");
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(std::size_t(4 * n));
  for (int k = 0; k < n; ++k) {
    const double s = (u[k + 1] - u[k]) / h;
    const double d = prob_.q * a_p_scalar_derivative(s, p, delta) / h;
    Eigen::Matrix2d ke;
    ke << d, -d, -d, d;
    const double gx[2] = {kG0, kG1};
    for (int g = 0; g < 2; ++g) {
      const Eigen::Vector2d phi(1.0 - gx[g], gx[g]);
      const double m = 0.5 * h * a_p_scalar_derivative(phi.dot(Eigen::Vector2d(u[k], u[k + 1])), p, delta);
      ke += m * phi * phi.transpose();
    }
    if (!ke.allFinite()) throw AssemblyError("non-finite Jacobian entry", k);
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) trip.emplace_back(k + a, k + b, ke(a, b));
    }
  }
  SparseMatrix j(n + 1, n + 1);
  j.setFromTriplets(trip.begin(), trip.end());
  return j;
}

Limit1DSolution solve_homogenized(const Limit1DProblem& prob, const SolveOptions& opts) {
  const Limit1DForm form(prob);
  SolveResult res = newton_solve(form, Field::Zero(prob.n + 1), ConstraintSet{}, opts);
  return {Samples1D::uniform(res.u), std::move(res.diagnostics)};
}

Samples1D element_slopes(const Samples1D& u) {
  const Eigen::Index n = u.size() - 1;
  Eigen::VectorXd x(n);
  Eigen::VectorXd v(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    x[k] = 0.5 * (u.x[k] + u.x[k + 1]);
    v[k] = (u.v[k + 1] - u.v[k]) / (u.x[k + 1] - u.x[k]);
  }
  return Samples1D(std::move(x), std::move(v));
}

double w1p_error(const Samples1D& u, const std::function<double(double)>& w, const std::function<double(double)>& dw,
                 double p) {
  static const double gx[4] = {0.06943184420297371, 0.33000947820757187, 0.6699905217924281, 0.9305681557970263};
  static const double gw[4] = {0.17392742256872692, 0.3260725774312731, 0.3260725774312731, 0.17392742256872692};
  double s = 0.0;
  for (Eigen::Index k = 0; k + 1 < u.size(); ++k) {
    const double a = u.x[k];
    const double h = u.x[k + 1] - a;
    const double slope = (u.v[k + 1] - u.v[k]) / h;
    for (int g = 0; g < 4; ++g) {
      const double x = a + gx[g] * h;
      const double uv = (1.0 - gx[g]) * u.v[k] + gx[g] * u.v[k + 1];
      s += gw[g] * h * (std::pow(std::abs(uv - w(x)), p) + std::pow(std::abs(slope - dw(x)), p));
    }
  }
  return std::pow(s, 1.0 / p);
}

ScaleInvarianceReport scale_invariance_check(const Limit1DProblem& prob, double c, const SolveOptions& opts) {
  if (!(c > 0.0)) throw ConfigError("scale factor must be positive");
  ScaleInvarianceReport rep;
  Limit1DProblem scaled = prob;
  scaled.q = c * prob.q;
  rep.scaled_change =
      (solve_homogenized(prob, opts).u0.v - solve_homogenized(scaled, opts).u0.v).cwiseAbs().maxCoeff();

  Limit1DProblem ones = prob;
  ones.fbar = Samples1D::uniform(Eigen::VectorXd::Ones(2));
  for (double q : {prob.q, c * prob.q}) {
    ones.q = q;
    const Samples1D u0 = solve_homogenized(ones, opts).u0;
    rep.constant_deviation = std::max(rep.constant_deviation, (u0.v.array() - 1.0).abs().maxCoeff());
  }
  return rep;
}

} // namespace thinhom
