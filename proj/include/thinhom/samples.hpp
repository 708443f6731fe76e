#ifndef THINHOM_SAMPLES_HPP
#define THINHOM_SAMPLES_HPP

#include <Eigen/Core>

#include <iosfwd>
#include <string>

namespace thinhom {

/// A function of x1 given by values at increasing abscissae, read as its
/// piecewise-linear interpolant (constant beyond the first/last abscissa).
struct Samples1D {
  Eigen::VectorXd x;
  Eigen::VectorXd v;

  Samples1D() = default;
  Samples1D(Eigen::VectorXd x_, Eigen::VectorXd v_);

  /// Values v_k at x_k = k / (n - 1), k = 0..n-1.
  static Samples1D uniform(const Eigen::VectorXd& values);
  /// Abscissae k / (n - 1), k = 0..n-1.
  static Eigen::VectorXd uniform_grid(Eigen::Index n);

  Eigen::Index size() const { return x.size(); }
  double operator()(double t) const;
  /// Exact integral of the interpolant over [a, b].
  double integrate(double a, double b) const;
};

/// Two-column comma-separated listing "x,value" with a header row.
void write_samples_csv(std::ostream& os, const Samples1D& s, const std::string& value_name = "value");
Samples1D read_samples_csv(std::istream& is);

} // namespace thinhom

#endif // THINHOM_SAMPLES_HPP
