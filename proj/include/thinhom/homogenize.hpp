#ifndef THINHOM_HOMOGENIZE_HPP
#define THINHOM_HOMOGENIZE_HPP

#include "thinhom/assembly.hpp"
#include "thinhom/newton.hpp"

#include <iosfwd>
#include <utility>

namespace thinhom {

/// Solution of the periodic cell problem on Y*: v = y1 + phi with phi
/// periodic and of zero mean, and the homogenized coefficient it yields.
struct CellSolution {
  Mesh mesh;
  Field phi;
  double p = 2.0;
  double period = 1.0;
  double cell_measure = 0.0; ///< |Y*| of the mesh
  double q_flux = 0.0;       ///< (1/|Y*|) int |grad v|^(p-2) d1 v
  double q_energy = 0.0;     ///< (1/|Y*|) int |grad v|^p
  double delta = 0.0;        ///< regularization of the final solve
  SolveDiagnostics diagnostics;

  /// (1, 0) + grad phi on cell triangle t.
  Eigen::Vector2d grad_v(Index t) const;
  /// grad phi at a point of the periodically extended cell; throws MeshError
  /// when the wrapped point is outside the cell mesh.
  Eigen::Vector2d grad_phi_at(double y1, double y2) const;
};

/// Solve int a_p((1,0) + grad phi) . grad psi = 0 for periodic psi.
CellSolution solve_cell(const Mesh& mesh, double p, const SolveOptions& opts = {});

/// q_flux, after checking it against q_energy (SolverError beyond 1e-4 relative).
double compute_q(const CellSolution& cell);

/// Fraction of the period where g(s) > x2, from n uniform midpoint samples.
double theta(const ProfileSpec& spec, double x2, int n_samples = 10000);

/// (L int_0^{g1} theta dx2, |Y*|), both by n-point sampling.
std::pair<double, double> cell_measure_check(const ProfileSpec& spec, int n = 10000);

/// b(xi, x2) = (|xi|^(p-2) xi / L) int_0^L chi_{Y*}(s, x2) a_p((1,0) + grad phi)(s, x2) ds,
/// integrated exactly along the horizontal line through the cell triangles.
Eigen::Vector2d compute_b(const CellSolution& cell, double xi, double x2);

/// int_0^{g1} b(xi, x2) . (1, 0) dx2, exact for the piecewise-constant grad phi
/// (two-point Gauss between consecutive node heights).
double integrate_b_first(const CellSolution& cell, double xi);

/// fbar = (L / |Y*|) fhat.
Samples1D fbar_of(const Samples1D& fhat, double cell_measure, double period);

/// Scalar summary as a JSON object.
void write_cell_summary(std::ostream& os, const CellSolution& cell);

} // namespace thinhom

#endif // THINHOM_HOMOGENIZE_HPP
