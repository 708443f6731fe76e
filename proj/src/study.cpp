#include "thinhom/study.hpp"

#include "thinhom/config.hpp"
#include "thinhom/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

namespace thinhom {

double LoadSpec::operator()(double x1, double x2) const {
  switch (kind) {
  case Kind::constant: return value;
  case Kind::cos_x1: return amplitude * std::cos(wavenumber * std::numbers::pi * x1);
  case Kind::linear_x1: return a + b * x1;
  case Kind::cos_x1_x2: return amplitude * std::cos(wavenumber * std::numbers::pi * x1) * (1.0 + slope_x2 * x2);
  }
  return 0.0;
}

Load LoadSpec::to_load() const {
  const LoadSpec copy = *this;
  return Load([copy](double x1, double x2) { return copy(x1, x2); });
}

const char* LoadSpec::kind_name(Kind k) {
  switch (k) {
  case Kind::constant: return "constant";
  case Kind::cos_x1: return "cos_x1";
  case Kind::linear_x1: return "linear_x1";
  case Kind::cos_x1_x2: return "cos_x1_x2";
  }
  return "?";
}

PartitionSpec PartitionSpec::make(int nu, double period) {
  if (nu < 0) throw ConfigError("nu must be nonnegative");
  PartitionSpec part;
  part.nu = nu;
  const double w = period * std::ldexp(1.0, -nu);
  double a = 0.0;
  // a remainder narrower than 1e-12 is round-off, not a cell
  while (a < 1.0 - 1e-12) {
    const double b = std::min(a + w, 1.0);
    part.cells.emplace_back(a, (1.0 - b) < 1e-12 ? 1.0 : b);
    a = part.cells.back().second;
  }
  return part;
}

std::size_t PartitionSpec::cell_of(double x1) const {
  const double w = cells.front().second - cells.front().first;
  const auto k = std::size_t(std::max(0.0, std::floor(x1 / w)));
  return std::min(k, cells.size() - 1);
}

void StudyConfig::validate() const {
  if (!(p > 1.0)) throw ConfigError("p must exceed 1");
  if (eps.empty()) throw ConfigError("eps ladder must be non-empty");
  if (nu.empty()) throw ConfigError("nu ladder must be non-empty");
  for (std::size_t k = 0; k < eps.size(); ++k) {
    if (k > 0 && !(eps[k] < eps[k - 1])) throw ConfigError("eps ladder must be strictly decreasing");
    try {
      periods_for_eps(profile, eps[k]);
    } catch (const MeshError& e) {
      throw ConfigError(e.what());
    }
  }
  for (int v : nu) {
    if (v < 0) throw ConfigError("nu values must be nonnegative");
  }
  if (cell_nx < 2 || cell_ny < 2) throw ConfigError("cell mesh needs nx, ny >= 2");
  if (thin_nx_per_period < 2 || thin_ny < 2) throw ConfigError("thin mesh needs nx_per_period, ny >= 2");
  if (limit_elements < 2) throw ConfigError("limit problem needs at least 2 elements");
  if (flux_stations < 2) throw ConfigError("flux_stations must be at least 2");
  if (threads < 1) throw ConfigError("threads must be at least 1");
  solver.validate();
}

ThinSolution solve_thin(const Mesh& mesh, double p, const Load& load, const SolveOptions& opts) {
  if (mesh.kind() != DomainKind::thin) throw MeshError("solve_thin needs a thin-domain mesh");
  FormProblem problem(PLaplaceForm(mesh, FluxParams(p, opts.continuation_deltas.front(), mesh.eps()), load));
  SolveResult res = newton_solve(problem, Field::Zero(mesh.num_nodes()), ConstraintSet{}, opts);
  return {std::move(res.u), std::move(res.diagnostics)};
}

std::vector<double> partition_average(const Samples1D& du0, const PartitionSpec& part) {
  std::vector<double> avg;
  avg.reserve(part.cells.size());
  for (const auto& [a, b] : part.cells) avg.push_back(du0.integrate(a, b) / (b - a));
  return avg;
}

Eigen::Matrix2Xd corrector_field(const CellSolution& cell, const Samples1D& du0, const PartitionSpec& part, double eps,
                                 const Mesh& mesh) {
  const std::vector<double> avg = partition_average(du0, part);
  Eigen::Matrix2Xd c(2, mesh.num_triangles());
  for (Index t = 0; t < mesh.num_triangles(); ++t) {
    const Eigen::Vector2d x = mesh.barycenter(t);
    const double a = avg[part.cell_of(x.x())];
    c.col(t) = a * (Eigen::Vector2d(1.0, 0.0) + cell.grad_phi_at(x.x() / eps, x.y()));
  }
  return c;
}

Eigen::Matrix2Xd naive_gradient_field(const Samples1D& du0, const Mesh& mesh) {
  Eigen::Matrix2Xd c = Eigen::Matrix2Xd::Zero(2, mesh.num_triangles());
  for (Index t = 0; t < mesh.num_triangles(); ++t) c(0, t) = du0(mesh.barycenter(t).x());
  return c;
}

Field lift_limit(const Mesh& mesh, const Samples1D& u0) {
  Field v(mesh.num_nodes());
  for (Index i = 0; i < mesh.num_nodes(); ++i) v[i] = u0(mesh.node(i).x());
  return v;
}

double error_u(const Mesh& mesh, const Field& u_eps, const Samples1D& u0, double p) {
  return lp_norm(mesh, u_eps - lift_limit(mesh, u0), p);
}

double error_corrector(const Mesh& mesh, const Field& u_eps, const Eigen::Matrix2Xd& c_field, double p, double eps) {
  const FluxParams params(p, 0.0, eps);
  double s = 0.0;
  for (Index t = 0; t < mesh.num_triangles(); ++t) {
    const Eigen::Vector2d d = scaled_gradient(element_gradient(mesh, u_eps, t), params) - c_field.col(t);
    s += mesh.area(t) * std::pow(d.norm(), p);
  }
  return std::pow(s, 1.0 / p);
}

namespace {

double vertical_chord(const Mesh& mesh, Index t, double c) {
  const auto tri = mesh.triangle(t);
  double ys[3];
  int n = 0;
  for (int k = 0; k < 3; ++k) {
    const auto a = mesh.node(tri(k));
    const auto b = mesh.node(tri((k + 1) % 3));
    const double da = a.x() - c;
    const double db = b.x() - c;
    if (da == 0.0 && db == 0.0) return std::abs(b.y() - a.y());
    if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) {
      ys[n++] = a.y() + (b.y() - a.y()) * da / (da - db);
    } else if (da == 0.0 && db != 0.0) {
      ys[n++] = a.y();
    }
  }
  return n < 2 ? 0.0 : std::abs(ys[1] - ys[0]);
}

} // namespace

Samples1D flux_profile(const Mesh& mesh, const Field& u_eps, double p, double eps, int n1) {
  const FluxParams params(p, 0.0, eps);
  const GridLayout& lay = mesh.layout();
  if (lay.columns < 1) throw MeshError("flux_profile needs a mapped-grid mesh");
  Eigen::VectorXd x(n1);
  Eigen::VectorXd v(n1);
  const double x0 = lay.column_x.front();
  const double dx = (lay.column_x.back() - x0) / lay.columns;
  for (int k = 0; k < n1; ++k) {
    x[k] = (k + 0.5) / n1;
    const int i = std::clamp(int(std::floor((x[k] - x0) / dx)), 0, lay.columns - 1);
    double s = 0.0;
    for (int j = 0; j < lay.rows; ++j) {
      for (Index t = 2 * (Index(i) * lay.rows + j); t < 2 * (Index(i) * lay.rows + j) + 2; ++t) {
        const double len = vertical_chord(mesh, t, x[k]);
        if (len > 0.0) s += len * a_p(scaled_gradient(element_gradient(mesh, u_eps, t), params), p).x();
      }
    }
    v[k] = s;
  }
  return Samples1D(std::move(x), std::move(v));
}

Samples1D flux_target(const CellSolution& cell, const Samples1D& du0, const Eigen::VectorXd& stations) {
  Eigen::VectorXd v(stations.size());
  const double scale = cell.q_flux * cell.cell_measure / cell.period;
  for (Eigen::Index k = 0; k < stations.size(); ++k) {
    const double d = du0(stations[k]);
    v[k] = d == 0.0 ? 0.0 : scale * std::pow(std::abs(d), cell.p - 2.0) * d;
  }
  return Samples1D(stations, std::move(v));
}

Samples1D moving_average(const Samples1D& s, double window) {
  const Eigen::Index n = s.size();
  std::vector<double> prefix(std::size_t(n + 1), 0.0);
  for (Eigen::Index k = 0; k < n; ++k) prefix[std::size_t(k + 1)] = prefix[std::size_t(k)] + s.v[k];
  Eigen::VectorXd out(n);
  const double half = 0.5 * window * (1.0 + 1e-12);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto lo = std::lower_bound(s.x.data(), s.x.data() + n, s.x[k] - half) - s.x.data();
    const auto hi = std::upper_bound(s.x.data(), s.x.data() + n, s.x[k] + half) - s.x.data();
    out[k] = (prefix[std::size_t(hi)] - prefix[std::size_t(lo)]) / double(hi - lo);
  }
  return Samples1D(s.x, std::move(out));
}

double discrete_lr_distance(const Samples1D& a, const Samples1D& b, double r) {
  if (a.size() != b.size()) throw Error("sample sets differ in size");
  return std::pow((a.v - b.v).array().abs().pow(r).mean(), 1.0 / r);
}

namespace {

struct Ingredients {
  CellSolution cell;
  Samples1D fhat;
  Samples1D u0;
  Samples1D du0;
  Samples1D target;
  int limit_iterations = 0;
};

std::vector<StudyRow> run_eps_row(const StudyConfig& cfg, const Ingredients& ing, double eps) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  std::vector<StudyRow> rows;
  StudyRow base;
  base.eps = eps;
  try {
    const Mesh mesh = build_thin_mesh(cfg.profile, eps, cfg.thin_nx_per_period, cfg.thin_ny);
    base.nodes = long(mesh.num_nodes());
    const Load load = cfg.load.to_load();
    const ThinSolution sol = solve_thin(mesh, cfg.p, load, cfg.solver);
    base.newton_iterations = sol.diagnostics.total_iterations;
    base.err_u = error_u(mesh, sol.u, ing.u0, cfg.p);
    base.err_naive = error_corrector(mesh, sol.u, naive_gradient_field(ing.du0, mesh), cfg.p, eps);

    const double window = eps * cfg.profile.period();
    const double pc = cfg.p / (cfg.p - 1.0);
    const Samples1D flux = flux_profile(mesh, sol.u, cfg.p, eps, cfg.flux_stations);
    base.flux_discrepancy =
        discrete_lr_distance(moving_average(flux, window), moving_average(ing.target, window), pc);
    const Samples1D fhat_eps = fhat_of(load, cfg.profile, eps, ing.fhat.size());
    base.fhat_discrepancy = discrete_lr_distance(moving_average(fhat_eps, window), ing.fhat, pc);

    for (int nu : cfg.nu) {
      StudyRow row = base;
      row.nu = nu;
      try {
        const PartitionSpec part = PartitionSpec::make(nu, cfg.profile.period());
        row.err_corrector = error_corrector(mesh, sol.u, corrector_field(ing.cell, ing.du0, part, eps, mesh), cfg.p, eps);
      } catch (const std::exception& e) {
        row.status = e.what();
      }
      rows.push_back(std::move(row));
    }
  } catch (const std::exception& e) {
    for (int nu : cfg.nu) {
      StudyRow row = base;
      row.nu = nu;
      row.status = e.what();
      rows.push_back(std::move(row));
    }
  }
  const double elapsed = std::chrono::duration<double>(clock::now() - start).count();
  for (StudyRow& r : rows) r.wall_time = elapsed;
  return rows;
}

} // namespace

StudyReport run_study(const StudyConfig& config) {
  config.validate();
  const Mesh cell_mesh = build_cell_mesh(config.profile, config.cell_nx, config.cell_ny);
  Ingredients ing{solve_cell(cell_mesh, config.p, config.solver), {}, {}, {}, {}, 0};
  const double q = compute_q(ing.cell);

  const Load load = config.load.to_load();
  ing.fhat = fhat_limit(load, config.profile, config.limit_elements + 1);
  // exact |Y*| of the profile, matching the quadrature inside fhat_limit
  const Samples1D fbar = fbar_of(ing.fhat, config.profile.cell_measure(), config.profile.period());
  Limit1DSolution lim = solve_homogenized({q, config.p, fbar, config.limit_elements}, config.solver);
  ing.u0 = std::move(lim.u0);
  ing.limit_iterations = lim.diagnostics.total_iterations;
  ing.du0 = element_slopes(ing.u0);
  Eigen::VectorXd stations(config.flux_stations);
  for (int k = 0; k < config.flux_stations; ++k) stations[k] = (k + 0.5) / config.flux_stations;
  ing.target = flux_target(ing.cell, ing.du0, stations);

  StudyReport report;
  report.q = q;
  report.q_energy = ing.cell.q_energy;
  report.cell_measure = ing.cell.cell_measure;
  report.cell_newton_iterations = ing.cell.diagnostics.total_iterations;

  const std::size_t ne = config.eps.size();
  std::vector<std::vector<StudyRow>> per_eps(ne);
  const std::size_t nthreads = std::min<std::size_t>(std::size_t(config.threads), ne);
  if (nthreads <= 1) {
    for (std::size_t k = 0; k < ne; ++k) per_eps[k] = run_eps_row(config, ing, config.eps[k]);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < nthreads; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < ne; k += nthreads) per_eps[k] = run_eps_row(config, ing, config.eps[k]);
      });
    }
    for (std::thread& t : pool) t.join();
  }
  for (auto& rows : per_eps) {
    for (StudyRow& r : rows) report.rows.push_back(std::move(r));
  }
  return report;
}

namespace {

const char* kCsvHeader =
    "eps,nu,nodes,err_u,err_corrector,err_naive,flux_discrepancy,fhat_discrepancy,newton_iterations,wall_time,status";

std::string sanitize(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

} // namespace

void write_report_csv(std::ostream& os, const StudyReport& report, bool include_timing) {
  std::ostringstream buf;
  buf << std::setprecision(17);
  buf << kCsvHeader << "\n";
  for (const StudyRow& r : report.rows) {
    buf << r.eps << "," << r.nu << "," << r.nodes << "," << r.err_u << "," << r.err_corrector << "," << r.err_naive
        << "," << r.flux_discrepancy << "," << r.fhat_discrepancy << "," << r.newton_iterations << ","
        << (include_timing ? r.wall_time : 0.0) << "," << sanitize(r.status) << "\n";
  }
  os << buf.str();
}

std::vector<StudyRow> read_report_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) throw IoError("report csv: unexpected header");
  std::vector<StudyRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    std::string cell;
    for (int k = 0; k < 10 && std::getline(ls, cell, ','); ++k) f.push_back(cell);
    std::getline(ls, cell);
    f.push_back(cell);
    if (f.size() != 11) throw IoError("report csv: expected 11 fields in '" + line + "'");
    try {
      StudyRow r;
      r.eps = std::stod(f[0]);
      r.nu = std::stoi(f[1]);
      r.nodes = std::stol(f[2]);
      r.err_u = std::stod(f[3]);
      r.err_corrector = std::stod(f[4]);
      r.err_naive = std::stod(f[5]);
      r.flux_discrepancy = std::stod(f[6]);
      r.fhat_discrepancy = std::stod(f[7]);
      r.newton_iterations = std::stoi(f[8]);
      r.wall_time = std::stod(f[9]);
      r.status = f[10];
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw IoError("report csv: unparsable row '" + line + "'");
    }
  }
  return rows;
}

void write_report_json(std::ostream& os, const StudyConfig& config, const StudyReport& report) {
  nlohmann::ordered_json j;
  j["config"] = config_to_json(config);
  j["cell"] = {{"q_flux", report.q},
               {"q_energy", report.q_energy},
               {"cell_measure", report.cell_measure},
               {"newton_iterations", report.cell_newton_iterations}};
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const StudyRow& r : report.rows) {
    rows.push_back({{"eps", r.eps},
                    {"nu", r.nu},
                    {"nodes", r.nodes},
                    {"err_u", r.err_u},
                    {"err_corrector", r.err_corrector},
                    {"err_naive", r.err_naive},
                    {"flux_discrepancy", r.flux_discrepancy},
                    {"fhat_discrepancy", r.fhat_discrepancy},
                    {"newton_iterations", r.newton_iterations},
                    {"wall_time", config.record_timing ? r.wall_time : 0.0},
                    {"status", r.status}});
  }
  j["rows"] = std::move(rows);
  os << j.dump(2) << "\n";
}

StudyReport read_report_json(std::istream& is) {
  StudyReport rep;
  try {
    const nlohmann::json j = nlohmann::json::parse(is);
    rep.q = j.at("cell").at("q_flux").get<double>();
    rep.q_energy = j.at("cell").at("q_energy").get<double>();
    rep.cell_measure = j.at("cell").at("cell_measure").get<double>();
    rep.cell_newton_iterations = j.at("cell").at("newton_iterations").get<int>();
    for (const auto& r : j.at("rows")) {
      StudyRow row;
      row.eps = r.at("eps").get<double>();
      row.nu = r.at("nu").get<int>();
      row.nodes = r.at("nodes").get<long>();
      row.err_u = r.at("err_u").get<double>();
      row.err_corrector = r.at("err_corrector").get<double>();
      row.err_naive = r.at("err_naive").get<double>();
      row.flux_discrepancy = r.at("flux_discrepancy").get<double>();
      row.fhat_discrepancy = r.at("fhat_discrepancy").get<double>();
      row.newton_iterations = r.at("newton_iterations").get<int>();
      row.wall_time = r.at("wall_time").get<double>();
      row.status = r.at("status").get<std::string>();
      rep.rows.push_back(std::move(row));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("report json: ") + e.what());
  }
  return rep;
}

} // namespace thinhom
