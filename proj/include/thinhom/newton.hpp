#ifndef THINHOM_NEWTON_HPP
#define THINHOM_NEWTON_HPP

#include "thinhom/assembly.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace thinhom {

/// One Newton iteration as emitted to the diagnostics log.
struct IterationRecord {
  int stage = 0;
  double delta = 0.0;
  int iteration = 0;
  double energy = 0.0;
  double residual_norm = 0.0;
  double step_length = 0.0;
};

struct StageSummary {
  double delta = 0.0;
  int iterations = 0;
  double final_residual = 0.0;
};

struct SolveDiagnostics {
  std::vector<IterationRecord> history;
  std::vector<StageSummary> stages;
  int total_iterations = 0;
  double final_residual = 0.0;
  double initial_residual = 0.0;

  /// Largest relative increase of the energy across accepted steps within a
  /// stage (<= 0 up to round-off when the line search works).
  double max_energy_increase() const;
};

struct SolveOptions {
  double residual_tol = 1e-10;
  /// Looser tolerance for the non-final continuation stages.
  double stage_tol = 1e-6;
  int max_newton = 50;
  double backtrack = 0.5;
  double sufficient_decrease = 1e-4;
  int max_halvings = 30;
  /// Regularization schedule; the last entry is the target delta.
  std::vector<double> continuation_deltas = {1e-2, 1e-4, 1e-8};
  double linear_tol = 1e-12;
  /// A stage also ends when the Newton correction falls below
  /// step_tol * (1 + max|u|): the residual can floor above residual_tol when
  /// small delta makes the Jacobian stiff.
  double step_tol = 1e-12;
  /// Structured per-iteration log sink (optional).
  std::function<void(const IterationRecord&)> log;

  void validate() const;
};

/// Periodic identification, optional pinned node and mean-zero post-shift.
struct ConstraintSet {
  /// (leader, follower): the follower's value is eliminated onto the leader.
  std::vector<std::pair<Index, Index>> periodic_pairs;
  std::optional<Index> pinned_node;
  bool mean_zero_postshift = false;
  /// Integration weights for the post-shift mean (mesh lumped weights).
  Eigen::VectorXd mean_weights;
};

/// Linear map between full nodal vectors and the reduced unknowns left after
/// eliminating followers and the pinned node. u_full = P u_red + fixed.
class ConstraintMap {
public:
  ConstraintMap(Index n, const ConstraintSet& constraints);

  Index full_size() const { return n_; }
  Index reduced_size() const { return nred_; }
  const SparseMatrix& prolongation() const { return P_; }

  /// Reduced system P^T A P, P^T b.
  SparseMatrix reduce(const SparseMatrix& a) const;
  Eigen::VectorXd reduce(const Eigen::VectorXd& b) const;
  /// Full field from reduced unknowns; constrained-out values come from base.
  Field expand(const Eigen::VectorXd& ured, const Field& base) const;
  /// Reduced unknowns of a full field (leader values).
  Eigen::VectorXd restrict(const Field& u) const;
  /// Enforce the constraints on a full field (followers copy leaders,
  /// pinned value taken from base).
  Field project(const Field& u, const Field& base) const;
  /// Mean-zero shift, when requested.
  Field postprocess(Field u) const;

private:
  Index n_;
  Index nred_ = 0;
  std::vector<Index> reduced_index_; // -1 for pinned (and its followers)
  SparseMatrix P_;
  ConstraintSet cs_;
};

/// A convex discrete functional parameterized by the regularization delta.
class NonlinearProblem {
public:
  virtual ~NonlinearProblem() = default;
  virtual Index size() const = 0;
  virtual double energy(const Field& u, double delta) const = 0;
  virtual Eigen::VectorXd residual(const Field& u, double delta) const = 0;
  virtual SparseMatrix jacobian(const Field& u, double delta) const = 0;
};

/// Adapter solving a PLaplaceForm.
class FormProblem : public NonlinearProblem {
public:
  explicit FormProblem(PLaplaceForm form) : form_(std::move(form)) {}
  Index size() const override { return form_.mesh().num_nodes(); }
  double energy(const Field& u, double delta) const override;
  Eigen::VectorXd residual(const Field& u, double delta) const override;
  SparseMatrix jacobian(const Field& u, double delta) const override;

private:
  mutable PLaplaceForm form_;
};

struct SolveResult {
  Field u;
  SolveDiagnostics diagnostics;
};

/// Solve A x = b for symmetric positive-definite A with a sparse LDL^T
/// factorization plus iterative refinement toward tol * |b|. Throws SolverError
/// on a non-positive pivot or when the residual stays above max(tol, 1e-6) * |b|
/// and the normwise backward error exceeds 1e-12.
Eigen::VectorXd linear_solve(const SparseMatrix& a, const Eigen::VectorXd& b, double tol = 1e-12);

/// Damped Newton with backtracking on the energy and delta continuation.
SolveResult newton_solve(const NonlinearProblem& problem, const Field& init, const ConstraintSet& constraints,
                         const SolveOptions& opts);

} // namespace thinhom

#endif // THINHOM_NEWTON_HPP
