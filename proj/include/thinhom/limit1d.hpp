#ifndef THINHOM_LIMIT1D_HPP
#define THINHOM_LIMIT1D_HPP

#include "thinhom/newton.hpp"
#include "thinhom/samples.hpp"

namespace thinhom {

/// -q (|u'|^(p-2) u')' + |u|^(p-2) u = fbar on (0, 1), u'(0) = u'(1) = 0.
struct Limit1DProblem {
  double q = 1.0;
  double p = 2.0;
  Samples1D fbar;
  int n = 2; ///< number of uniform P1 elements

  void validate() const;
};

/// Discrete energy of the limit problem on the uniform grid, two-point Gauss
/// rule for the mass and load terms.
class Limit1DForm : public NonlinearProblem {
public:
  explicit Limit1DForm(Limit1DProblem prob);
  Index size() const override { return prob_.n + 1; }
  double energy(const Field& u, double delta) const override;
  Eigen::VectorXd residual(const Field& u, double delta) const override;
  SparseMatrix jacobian(const Field& u, double delta) const override;

private:
  Limit1DProblem prob_;
  Eigen::VectorXd fgauss_; // fbar at the two Gauss points of each element
};

struct Limit1DSolution {
  Samples1D u0; ///< nodal values at x = k / n
  SolveDiagnostics diagnostics;
};

Limit1DSolution solve_homogenized(const Limit1DProblem& prob, const SolveOptions& opts = {});

/// Element slopes of a P1 function, placed at element midpoints.
Samples1D element_slopes(const Samples1D& u);

/// (int |u - w|^p + |u' - w'|^p)^(1/p) over (0, 1) for a P1 function u on a
/// uniform grid and a closed-form w, by 4-point Gauss per element.
double w1p_error(const Samples1D& u, const std::function<double(double)>& w,
                 const std::function<double(double)>& dw, double p);

struct ScaleInvarianceReport {
  /// max |u0 - 1| over the q values, for fbar == 1
  double constant_deviation = 0.0;
  /// max |u0(q) - u0(c q)| for the given fbar
  double scaled_change = 0.0;
};

/// Solves with (q, fbar) and (c q, fbar), and with fbar == 1 for q and c q.
ScaleInvarianceReport scale_invariance_check(const Limit1DProblem& prob, double c, const SolveOptions& opts = {});

} // namespace thinhom

#endif // THINHOM_LIMIT1D_HPP
