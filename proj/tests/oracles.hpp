#ifndef THINHOM_TEST_ORACLES_HPP
#define THINHOM_TEST_ORACLES_HPP

// Independent reference computations for the p = 2 (linear) case. They read
// only mesh geometry (nodes, triangles, periodic pairs) and redo assembly,
// constraint handling and linear algebra with their own code paths.

#include "thinhom/mesh.hpp"
#include "thinhom/samples.hpp"

#include <Eigen/Core>

#include <functional>
#include <vector>

namespace oracle {

struct LinearCell {
  Eigen::VectorXd phi; ///< zero-mean periodic corrector
  double q = 0.0;      ///< 1 + (1/|Y*|) int d1 phi
  double area = 0.0;
};

/// Periodic Laplace cell problem -div((1,0) + grad phi) = 0 solved with a
/// Lagrange multiplier for the mean (sparse LU on the saddle system).
LinearCell linear_cell(const thinhom::Mesh& mesh);

/// -div(grad_eps u) + u = f on a thin mesh, natural boundary conditions,
/// sparse LU. Mass and load use the interior 3-point rule.
Eigen::VectorXd linear_thin(const thinhom::Mesh& mesh, const std::function<double(double, double)>& f);

/// -q u'' + u = fbar on (0, 1), u'(0) = u'(1) = 0, n uniform P1 elements,
/// exact mass matrix and 2-point Gauss load.
Eigen::VectorXd linear_limit(double q, const thinhom::Samples1D& fbar, int n);

/// Mean of the piecewise-linear interpolant of samples over [a, b], by
/// splitting at every sample abscissa and averaging endpoint values.
double interpolant_mean(const thinhom::Samples1D& s, double a, double b);

/// sum_T |T| |grad_eps u - c_T|^p over the mesh, gradients from nodal
/// coordinates.
double gradient_error(const thinhom::Mesh& mesh, const Eigen::VectorXd& u, const Eigen::Matrix2Xd& c, double p,
                      double eps);

/// (int |u - w|^p)^(1/p) with the degree-2 interior rule, u P1 on the mesh and
/// w P1 given by nodal values.
double lp_distance(const thinhom::Mesh& mesh, const Eigen::VectorXd& u, const Eigen::VectorXd& w, double p);

/// Trapezoid-rule area of a mapped grid from its column heights.
double trapezoid_area(const thinhom::GridLayout& layout);

} // namespace oracle

#endif // THINHOM_TEST_ORACLES_HPP
