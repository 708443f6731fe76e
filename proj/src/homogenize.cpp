#include "thinhom/homogenize.hpp"

#include "thinhom/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <vector>

namespace thinhom {

namespace {

// Length of the intersection of the horizontal line y = c with triangle t,
// zero when the line only touches a vertex or runs along an edge.
double horizontal_chord(const Mesh& mesh, Index t, double c) {
  const auto tri = mesh.triangle(t);
  double xs[3];
  int n = 0;
  for (int k = 0; k < 3; ++k) {
    const auto a = mesh.node(tri(k));
    const auto b = mesh.node(tri((k + 1) % 3));
    const double da = a.y() - c;
    const double db = b.y() - c;
    if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) {
      xs[n++] = a.x() + (b.x() - a.x()) * da / (da - db);
    } else if (da == 0.0 && db != 0.0) {
      xs[n++] = a.x();
    }
  }
  if (n < 2) return 0.0;
  return std::abs(xs[1] - xs[0]);
}

} // namespace

Eigen::Vector2d CellSolution::grad_v(Index t) const {
  return Eigen::Vector2d(1.0, 0.0) + element_gradient(mesh, phi, t);
}

Eigen::Vector2d CellSolution::grad_phi_at(double y1, double y2) const {
  double s = std::fmod(y1, period);
  if (s < 0.0) s += period;
  const auto t = mesh.locate(Eigen::Vector2d(s, y2));
  if (!t) {
    std::ostringstream msg;
    msg << "point (" << y1 << ", " << y2 << ") wraps to (" << s << ", " << y2 << ") outside every cell triangle";
    throw MeshError(msg.str());
  }
  return element_gradient(mesh, phi, *t);
}

CellSolution solve_cell(const Mesh& mesh, double p, const SolveOptions& opts) {
  if (mesh.kind() != DomainKind::cell) throw MeshError("solve_cell needs a cell mesh");
  if (mesh.periodic_pairs().empty()) throw MeshError("cell mesh has no periodic pairs");
  const FluxParams params(p, opts.continuation_deltas.front(), 1.0);
  FormProblem problem(PLaplaceForm(mesh, params, Load{}, Eigen::Vector2d(1.0, 0.0), false));

  ConstraintSet cs;
  cs.periodic_pairs = mesh.periodic_pairs();
  cs.pinned_node = mesh.periodic_pairs().front().first;
  cs.mean_zero_postshift = true;
  cs.mean_weights = mesh.lumped_weights();

  SolveResult res = newton_solve(problem, Field::Zero(mesh.num_nodes()), cs, opts);

  CellSolution cell{mesh, std::move(res.u), p, mesh.width(), mesh_area(mesh), 0.0, 0.0,
                    opts.continuation_deltas.back(), std::move(res.diagnostics)};
  double qf = 0.0;
  double qe = 0.0;
  for (Index t = 0; t < mesh.num_triangles(); ++t) {
    const Eigen::Vector2d gv = cell.grad_v(t);
    const double nrm = gv.norm();
    const double w = nrm > 0.0 ? std::pow(nrm, p - 2.0) : (p == 2.0 ? 1.0 : 0.0);
    qf += mesh.area(t) * w * gv.x();
    qe += mesh.area(t) * std::pow(nrm, p);
  }
  cell.q_flux = qf / cell.cell_measure;
  cell.q_energy = qe / cell.cell_measure;
  return cell;
}

double compute_q(const CellSolution& cell) {
  const double rel = std::abs(cell.q_flux - cell.q_energy) / std::abs(cell.q_energy);
  if (!(rel <= 1e-4)) {
    std::ostringstream msg;
    msg << "q formulas disagree (q_flux " << cell.q_flux << ", q_energy " << cell.q_energy
        << "): cell solve is not converged";
    throw SolverError(msg.str());
  }
  return cell.q_flux;
}

double theta(const ProfileSpec& spec, double x2, int n_samples) {
  const double L = spec.period();
  int inside = 0;
  for (int k = 0; k < n_samples; ++k) {
    if (spec(L * (k + 0.5) / n_samples) > x2) ++inside;
  }
  return double(inside) / n_samples;
}

std::pair<double, double> cell_measure_check(const ProfileSpec& spec, int n) {
  const double L = spec.period();
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) g[std::size_t(k)] = spec(L * (k + 0.5) / n);
  std::sort(g.begin(), g.end());

  // theta(x2) = #{g_k > x2} / n, integrated by the midpoint rule in x2
  const double g1 = spec.g1();
  const double h = g1 / n;
  double integral = 0.0;
  for (int j = 0; j < n; ++j) {
    const double x2 = (j + 0.5) * h;
    const auto above = g.end() - std::upper_bound(g.begin(), g.end(), x2);
    integral += double(above) / n * h;
  }
  double mean = 0.0;
  for (double v : g) mean += v;
  mean /= n;
  return {L * integral, L * mean};
}

Eigen::Vector2d compute_b(const CellSolution& cell, double xi, double x2) {
  Eigen::Vector2d acc = Eigen::Vector2d::Zero();
  if (xi == 0.0) return acc;
  for (Index t = 0; t < cell.mesh.num_triangles(); ++t) {
    const double len = horizontal_chord(cell.mesh, t, x2);
    if (len > 0.0) acc += len * a_p(cell.grad_v(t), cell.p);
  }
  const double axi = std::pow(std::abs(xi), cell.p - 2.0) * xi;
  return axi / cell.period * acc;
}

double integrate_b_first(const CellSolution& cell, double xi) {
  std::vector<double> heights(cell.mesh.nodes().row(1).begin(), cell.mesh.nodes().row(1).end());
  std::sort(heights.begin(), heights.end());
  heights.erase(std::unique(heights.begin(), heights.end()), heights.end());
  const double gp = 0.5 / std::sqrt(3.0);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < heights.size(); ++k) {
    const double a = heights[k];
    const double b = heights[k + 1];
    const double mid = 0.5 * (a + b);
    const double w = 0.5 * (b - a);
    total += w * (compute_b(cell, xi, mid - gp * (b - a)).x() + compute_b(cell, xi, mid + gp * (b - a)).x());
  }
  return total;
}

Samples1D fbar_of(const Samples1D& fhat, double cell_measure, double period) {
  if (!(cell_measure > 0.0)) throw Error("fbar_of needs a positive cell measure");
  return Samples1D(fhat.x, (period / cell_measure) * fhat.v);
}

void write_cell_summary(std::ostream& os, const CellSolution& cell) {
  nlohmann::ordered_json j;
  j["p"] = cell.p;
  j["L"] = cell.period;
  j["cell_measure"] = cell.cell_measure;
  j["q_flux"] = cell.q_flux;
  j["q_energy"] = cell.q_energy;
  j["delta"] = cell.delta;
  j["residual"] = cell.diagnostics.final_residual;
  j["newton_iterations"] = cell.diagnostics.total_iterations;
  j["nodes"] = cell.mesh.num_nodes();
  os << j.dump(2) << "\n";
}

} // namespace thinhom
