#ifndef THINHOM_STUDY_HPP
#define THINHOM_STUDY_HPP

#include "thinhom/homogenize.hpp"
#include "thinhom/limit1d.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace thinhom {

/// Serializable closed-form right-hand side.
///   constant:   f = value
///   cos_x1:     f = amplitude cos(wavenumber pi x1)
///   linear_x1:  f = a + b x1
///   cos_x1_x2:  f = amplitude cos(wavenumber pi x1) (1 + slope_x2 x2)
struct LoadSpec {
  enum class Kind { constant, cos_x1, linear_x1, cos_x1_x2 };
  Kind kind = Kind::constant;
  double value = 1.0;
  double amplitude = 1.0;
  double wavenumber = 1.0;
  double a = 0.0;
  double b = 1.0;
  double slope_x2 = 0.0;

  double operator()(double x1, double x2) const;
  Load to_load() const;
  static const char* kind_name(Kind k);
};

/// Intervals of width L 2^-nu covering (0, 1); the last one is the
/// remainder when 2^nu / L is not an integer.
struct PartitionSpec {
  int nu = 0;
  std::vector<std::pair<double, double>> cells;

  static PartitionSpec make(int nu, double period);
  std::size_t cell_of(double x1) const;
};

struct StudyConfig {
  ProfileSpec profile = ProfileSpec::flat(1.0);
  double p = 2.0;
  LoadSpec load;
  std::vector<double> eps;
  std::vector<int> nu;
  int cell_nx = 128;
  int cell_ny = 32;
  int thin_nx_per_period = 32;
  int thin_ny = 16;
  int limit_elements = 1024;
  /// Used by `solve-limit` instead of solving the cell problem, when set.
  std::optional<double> limit_q;
  int flux_stations = 1024;
  SolveOptions solver;
  std::string output = "out";
  /// Wall times are written only when enabled, so reports stay reproducible.
  bool record_timing = false;
  /// Parallel eps rows (from THINHOM_THREADS in the CLI).
  int threads = 1;

  void validate() const;
};

struct StudyRow {
  double eps = 0.0;
  int nu = 0;
  long nodes = 0;
  double err_u = 0.0;          ///< |u_eps - u0|_{L^p(Omega^eps)}
  double err_corrector = 0.0;  ///< |grad_eps u_eps - c_{i nu}^eps|_{L^p}
  double err_naive = 0.0;      ///< |grad_eps u_eps - (u0', 0)|_{L^p}
  double flux_discrepancy = 0.0;
  double fhat_discrepancy = 0.0;
  int newton_iterations = 0;
  double wall_time = 0.0;
  std::string status = "ok";
};

struct StudyReport {
  double q = 0.0;
  double q_energy = 0.0;
  double cell_measure = 0.0;
  int cell_newton_iterations = 0;
  std::vector<StudyRow> rows;
};

struct ThinSolution {
  Field u;
  SolveDiagnostics diagnostics;
};

/// The grad_eps-weighted problem with mass term on a thin mesh.
ThinSolution solve_thin(const Mesh& mesh, double p, const Load& load, const SolveOptions& opts = {});

/// Mean of the interpolant of du0 over each partition cell.
std::vector<double> partition_average(const Samples1D& du0, const PartitionSpec& part);

/// c(x) = <u0'>_{i nu} ((1, 0) + grad phi(x1 / eps, x2)) at every triangle barycenter.
Eigen::Matrix2Xd corrector_field(const CellSolution& cell, const Samples1D& du0, const PartitionSpec& part, double eps,
                                 const Mesh& mesh);

/// (u0'(x1), 0) at every triangle barycenter.
Eigen::Matrix2Xd naive_gradient_field(const Samples1D& du0, const Mesh& mesh);

/// u0 interpolated in x1 at every node.
Field lift_limit(const Mesh& mesh, const Samples1D& u0);

double error_u(const Mesh& mesh, const Field& u_eps, const Samples1D& u0, double p);
double error_corrector(const Mesh& mesh, const Field& u_eps, const Eigen::Matrix2Xd& c_field, double p, double eps);

/// int_0^{g(x1/eps)} a_p(grad_eps u) . (1, 0) dx2 at stations (k + 1/2) / n1.
Samples1D flux_profile(const Mesh& mesh, const Field& u_eps, double p, double eps, int n1);
/// q (|Y*| / L) |u0'|^(p-2) u0' at the given stations.
Samples1D flux_target(const CellSolution& cell, const Samples1D& du0, const Eigen::VectorXd& stations);

/// Box-kernel moving average of width `window` (truncated at the ends).
Samples1D moving_average(const Samples1D& s, double window);
/// Midpoint-rule L^r(0, 1) norm of the difference of two sample sets on the same stations.
double discrete_lr_distance(const Samples1D& a, const Samples1D& b, double r);

StudyReport run_study(const StudyConfig& config);

/// Comma-separated report with a header row; wall_time is written as 0 unless
/// include_timing is set.
void write_report_csv(std::ostream& os, const StudyReport& report, bool include_timing = false);
std::vector<StudyRow> read_report_csv(std::istream& is);

/// JSON object mirroring the config plus the cell summary and rows.
void write_report_json(std::ostream& os, const StudyConfig& config, const StudyReport& report);
StudyReport read_report_json(std::istream& is);

} // namespace thinhom

#endif // THINHOM_STUDY_HPP
