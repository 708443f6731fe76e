#include "thinhom/newton.hpp"

#include "thinhom/errors.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace thinhom {

double SolveDiagnostics::max_energy_increase() const {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < history.size(); ++k) {
    const IterationRecord& a = history[k - 1];
    const IterationRecord& b = history[k];
    if (a.stage != b.stage) continue;
    worst = std::max(worst, (b.energy - a.energy) / (1.0 + std::abs(a.energy)));
  }
  return worst;
}

void SolveOptions::validate() const {
  if (!(residual_tol > 0.0) || !(stage_tol > 0.0) || !(linear_tol > 0.0) || !(step_tol > 0.0)) {
    throw ConfigError("solver tolerances must be positive");
  }
  if (max_newton < 1) throw ConfigError("max_newton must be at least 1");
  if (!(backtrack > 0.0 && backtrack < 1.0)) throw ConfigError("backtracking factor must lie in (0, 1)");
  if (!(sufficient_decrease > 0.0 && sufficient_decrease < 1.0)) {
    throw ConfigError("sufficient-decrease constant must lie in (0, 1)");
  }
  if (continuation_deltas.empty()) throw ConfigError("continuation schedule must be non-empty");
  for (double d : continuation_deltas) {
    if (!(d >= 0.0)) throw ConfigError("continuation deltas must be nonnegative");
  }
}

ConstraintMap::ConstraintMap(Index n, const ConstraintSet& constraints) : n_(n), cs_(constraints) {
  std::vector<Index> leader(std::size_t(n), -1);
  for (const auto& [lead, follow] : constraints.periodic_pairs) {
    if (lead < 0 || lead >= n || follow < 0 || follow >= n || lead == follow) {
      throw Error("periodic pair out of range or self-referential");
    }
    if (leader[std::size_t(follow)] != -1 && leader[std::size_t(follow)] != lead) {
      throw Error("node " + std::to_string(follow) + " follows two different leaders");
    }
    leader[std::size_t(follow)] = lead;
  }
  if (constraints.pinned_node) {
    const Index pin = *constraints.pinned_node;
    if (pin < 0 || pin >= n) throw Error("pinned node out of range");
    if (leader[std::size_t(pin)] != -1) throw Error("pinned node is also a periodic follower");
  }
  if (constraints.mean_zero_postshift && constraints.mean_weights.size() != n) {
    throw Error("mean-zero post-shift needs one weight per node");
  }

  auto root = [&](Index i) {
    Index r = i;
    for (Index hops = 0; leader[std::size_t(r)] != -1; ++hops) {
      if (hops > n) throw Error("periodic pairs contain a cycle");
      r = leader[std::size_t(r)];
    }
    return r;
  };

  reduced_index_.assign(std::size_t(n), -1);
  std::vector<Index> root_index(std::size_t(n), -2);
  const Index pin_root = constraints.pinned_node ? root(*constraints.pinned_node) : -1;
  std::vector<Eigen::Triplet<double>> trip;
  for (Index i = 0; i < n; ++i) {
    const Index r = root(i);
    if (r == pin_root) continue;
    if (root_index[std::size_t(r)] == -2) root_index[std::size_t(r)] = nred_++;
    reduced_index_[std::size_t(i)] = root_index[std::size_t(r)];
    trip.emplace_back(i, reduced_index_[std::size_t(i)], 1.0);
  }
  P_.resize(n, nred_);
  P_.setFromTriplets(trip.begin(), trip.end());
}

SparseMatrix ConstraintMap::reduce(const SparseMatrix& a) const {
  SparseMatrix r = P_.transpose() * a * P_;
  r.makeCompressed();
  return r;
}

Eigen::VectorXd ConstraintMap::reduce(const Eigen::VectorXd& b) const { return P_.transpose() * b; }

Field ConstraintMap::expand(const Eigen::VectorXd& ured, const Field& base) const {
  Field u(n_);
  for (Index i = 0; i < n_; ++i) {
    const Index k = reduced_index_[std::size_t(i)];
    u[i] = k >= 0 ? ured[k] : base[cs_.pinned_node ? *cs_.pinned_node : i];
  }
  return u;
}

Eigen::VectorXd ConstraintMap::restrict(const Field& u) const {
  Eigen::VectorXd r(nred_);
  std::vector<bool> seen(std::size_t(nred_), false);
  for (Index i = 0; i < n_; ++i) {
    const Index k = reduced_index_[std::size_t(i)];
    if (k >= 0 && !seen[std::size_t(k)]) {
      r[k] = u[i];
      seen[std::size_t(k)] = true;
    }
  }
  return r;
}

Field ConstraintMap::project(const Field& u, const Field& base) const { return expand(restrict(u), base); }

Field ConstraintMap::postprocess(Field u) const {
  if (cs_.mean_zero_postshift) {
    const double mean = cs_.mean_weights.dot(u) / cs_.mean_weights.sum();
    u.array() -= mean;
  }
  return u;
}

double FormProblem::energy(const Field& u, double delta) const {
  form_.set_delta(delta);
  return form_.energy(u);
}

Eigen::VectorXd FormProblem::residual(const Field& u, double delta) const {
  form_.set_delta(delta);
  return form_.residual(u);
}

SparseMatrix FormProblem::jacobian(const Field& u, double delta) const {
  form_.set_delta(delta);
  return form_.jacobian(u);
}

Eigen::VectorXd linear_solve(const SparseMatrix& a, const Eigen::VectorXd& b, double tol) {
  if (a.rows() != a.cols() || a.rows() != b.size()) throw SolverError("linear_solve: dimension mismatch");
  const double bnorm = b.norm();
  if (bnorm == 0.0) return Eigen::VectorXd::Zero(b.size());
  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt(a);
  if (ldlt.info() != Eigen::Success) throw SolverError("linear_solve: factorization failed");
  const double dmin = ldlt.vectorD().minCoeff();
  if (!(dmin > 0.0)) {
    std::ostringstream msg;
    msg << "linear_solve: matrix is not positive definite (pivot " << dmin << ")";
    throw SolverError(msg.str());
  }
  Eigen::VectorXd x = ldlt.solve(b);
  double rnorm = (b - a * x).norm();
  for (int it = 0; it < 10 && rnorm > tol * bnorm; ++it) {
    const Eigen::VectorXd next_x = x + ldlt.solve(b - a * x);
    const double next = (b - a * next_x).norm();
    if (!(next < rnorm)) break;
    x = next_x;
    rnorm = next;
  }
  // tol is the refinement target; a direction is still usable for Newton up to
  // the looser inexact-solve bound, or when the residual is at the round-off
  // level of a backward-stable solve (normwise backward error).
  const double accept = std::max(tol, 1e-6);
  Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(a.rows());
  for (Index k = 0; k < a.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) row_sums[it.row()] += std::abs(it.value());
  }
  const double backward = (b - a * x).lpNorm<Eigen::Infinity>() / (row_sums.maxCoeff() * x.lpNorm<Eigen::Infinity>() + b.lpNorm<Eigen::Infinity>());
  if (!(rnorm <= accept * bnorm) && !(backward <= 1e-12)) {
    std::ostringstream msg;
    msg << "linear_solve: relative residual " << rnorm / bnorm << " above tolerance " << accept
        << " (backward error " << backward << ")";
    throw SolverError(msg.str());
  }
  return x;
}

SolveResult newton_solve(const NonlinearProblem& problem, const Field& init, const ConstraintSet& constraints,
                         const SolveOptions& opts) {
  opts.validate();
  if (init.size() != problem.size()) throw SolverError("newton_solve: initial field has the wrong size");
  const ConstraintMap cm(problem.size(), constraints);
  SolveResult out;
  SolveDiagnostics& diag = out.diagnostics;
  Field u = cm.project(init, init);

  const std::size_t nstages = opts.continuation_deltas.size();
  double r0 = 0.0;
  for (std::size_t s = 0; s < nstages; ++s) {
    const double delta = opts.continuation_deltas[s];
    const bool last = s + 1 == nstages;
    const double tol = last ? opts.residual_tol : std::max(opts.stage_tol, opts.residual_tol);

    double e = problem.energy(u, delta);
    Eigen::VectorXd r = cm.reduce(problem.residual(u, delta));
    double rn = r.norm();
    if (s == 0) {
      r0 = rn;
      diag.initial_residual = rn;
    }
    const double threshold = tol * (1.0 + r0);
    auto record = [&](int it, double step) {
      IterationRecord rec{int(s), delta, it, e, rn, step};
      diag.history.push_back(rec);
      if (opts.log) opts.log(rec);
    };
    record(0, 0.0);

    int it = 0;
    while (rn > threshold) {
      if (it >= opts.max_newton) {
        std::ostringstream msg;
        msg << "Newton did not converge in " << opts.max_newton << " iterations (stage " << s << ", delta " << delta
            << ", residual " << rn << ", target " << threshold << ")";
        throw SolverError(msg.str());
      }
      const Eigen::VectorXd dir = linear_solve(cm.reduce(problem.jacobian(u, delta)), -r, opts.linear_tol);
      const double slope = r.dot(dir);
      const Eigen::VectorXd ured = cm.restrict(u);
      if (dir.lpNorm<Eigen::Infinity>() <= opts.step_tol * (1.0 + ured.lpNorm<Eigen::Infinity>())) {
        ++it;
        u = cm.expand(ured + dir, u);
        e = problem.energy(u, delta);
        r = cm.reduce(problem.residual(u, delta));
        rn = r.norm();
        record(it, 1.0);
        break;
      }

      double step = 1.0;
      bool accepted = false;
      Field trial;
      double e_trial = 0.0;
      Eigen::VectorXd r_trial;
      bool have_r_trial = false;
      for (int h = 0; h <= opts.max_halvings; ++h) {
        trial = cm.expand(ured + step * dir, u);
        e_trial = problem.energy(trial, delta);
        if (e_trial <= e + opts.sufficient_decrease * step * slope) {
          accepted = true;
          // Keep halving while the energy still drops: for p < 2 the full
          // step overshoots where the gradient is small.
          for (int extra = h + 1; extra <= opts.max_halvings; ++extra) {
            Field shorter = cm.expand(ured + step * opts.backtrack * dir, u);
            const double e_shorter = problem.energy(shorter, delta);
            if (!(e_shorter < e_trial)) break;
            trial = std::move(shorter);
            e_trial = e_shorter;
            step *= opts.backtrack;
          }
          break;
        }
        // Energy differences below round-off carry no information; fall back
        // to requiring a smaller residual.
        const double noise = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(e));
        if (std::abs(step * slope) <= noise && e_trial <= e + noise) {
          r_trial = cm.reduce(problem.residual(trial, delta));
          if (r_trial.norm() < rn) {
            accepted = true;
            have_r_trial = true;
            break;
          }
        }
        step *= opts.backtrack;
      }
      if (!accepted) {
        std::ostringstream msg;
        msg << "line search stagnated after " << opts.max_halvings << " halvings (stage " << s << ", delta "
            << delta << ", iteration " << it << ", energy " << e << ", residual " << rn << ", slope " << slope << ")";
        throw SolverError(msg.str());
      }
      ++it;
      u = std::move(trial);
      e = e_trial;
      r = have_r_trial ? r_trial : cm.reduce(problem.residual(u, delta));
      rn = r.norm();
      record(it, step);
    }
    diag.stages.push_back({delta, it, rn});
    diag.total_iterations += it;
    diag.final_residual = rn;
  }
  out.u = cm.postprocess(std::move(u));
  return out;
}

} // namespace thinhom
