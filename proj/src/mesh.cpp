#include "thinhom/mesh.hpp"

#include "thinhom/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace thinhom {

const char* to_string(BoundaryTag tag) {
  switch (tag) {
  case BoundaryTag::lower: return "lower";
  case BoundaryTag::upper: return "upper";
  case BoundaryTag::left: return "left";
  case BoundaryTag::right: return "right";
  }
  return "?";
}

const char* to_string(DomainKind kind) { return kind == DomainKind::cell ? "cell" : "thin"; }

Mesh::Mesh(Eigen::Matrix2Xd nodes, Eigen::Matrix3Xi triangles, std::vector<BoundaryEdge> boundary_edges,
           std::vector<std::pair<Index, Index>> periodic_pairs, DomainKind kind, double eps, GridLayout layout)
    : nodes_(std::move(nodes)), triangles_(std::move(triangles)), boundary_edges_(std::move(boundary_edges)),
      periodic_pairs_(std::move(periodic_pairs)), kind_(kind), eps_(eps), layout_(std::move(layout)) {
  const Index nt = triangles_.cols();
  areas_.resize(nt);
  grads_.resize(std::size_t(nt));
  for (Index t = 0; t < nt; ++t) {
    const Eigen::Vector2d p0 = nodes_.col(triangles_(0, t));
    const Eigen::Vector2d p1 = nodes_.col(triangles_(1, t));
    const Eigen::Vector2d p2 = nodes_.col(triangles_(2, t));
    const Eigen::Vector2d e1 = p1 - p0;
    const Eigen::Vector2d e2 = p2 - p0;
    const double det = e1.x() * e2.y() - e1.y() * e2.x();
    if (!(det > 0.0)) {
      std::ostringstream msg;
      msg << "triangle " << t << " has non-positive signed area " << 0.5 * det;
      throw MeshError(msg.str());
    }
    areas_[t] = 0.5 * det;
    // grad(lambda_k) = rot90(p_{k+2} - p_{k+1}) / det
    Eigen::Matrix<double, 2, 3> g;
    g.col(0) << p1.y() - p2.y(), p2.x() - p1.x();
    g.col(1) << p2.y() - p0.y(), p0.x() - p2.x();
    g.col(2) << p0.y() - p1.y(), p1.x() - p0.x();
    grads_[std::size_t(t)] = g / det;
  }
}

Eigen::Vector2d Mesh::barycenter(Index t) const {
  return (nodes_.col(triangles_(0, t)) + nodes_.col(triangles_(1, t)) + nodes_.col(triangles_(2, t))) / 3.0;
}

Eigen::VectorXd Mesh::lumped_weights() const {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(num_nodes());
  for (Index t = 0; t < num_triangles(); ++t) {
    for (int k = 0; k < 3; ++k) w[triangles_(k, t)] += areas_[t] / 3.0;
  }
  return w;
}

Eigen::Vector3d Mesh::barycentric(Index t, const Eigen::Vector2d& x) const {
  const Eigen::Vector2d p0 = nodes_.col(triangles_(0, t));
  const Eigen::Matrix<double, 2, 3>& g = grads_[std::size_t(t)];
  Eigen::Vector3d lam;
  lam[1] = g.col(1).dot(x - p0);
  lam[2] = g.col(2).dot(x - p0);
  lam[0] = 1.0 - lam[1] - lam[2];
  return lam;
}

std::optional<Index> Mesh::locate(const Eigen::Vector2d& x) const {
  constexpr double tol = 1e-9;
  Index best = -1;
  double best_score = -std::numeric_limits<double>::infinity();
  auto consider = [&](Index t) {
    const double score = barycentric(t, x).minCoeff();
    if (score > best_score) {
      best_score = score;
      best = t;
    }
  };

  const GridLayout& lay = layout_;
  if (lay.columns > 0 && lay.rows > 0) {
    const double x0 = lay.column_x.front();
    const double dx = (lay.column_x.back() - x0) / lay.columns;
    const int ic = std::clamp(int(std::floor((x.x() - x0) / dx)), 0, lay.columns - 1);
    for (int i = std::max(0, ic - 1); i <= std::min(lay.columns - 1, ic + 1); ++i) {
      const double s = std::clamp((x.x() - lay.column_x[i]) / (lay.column_x[i + 1] - lay.column_x[i]), 0.0, 1.0);
      const double top = (1.0 - s) * lay.column_height[i] + s * lay.column_height[i + 1];
      const int jc = std::clamp(int(std::floor(x.y() / top * lay.rows)), 0, lay.rows - 1);
      for (int j = std::max(0, jc - 1); j <= std::min(lay.rows - 1, jc + 1); ++j) {
        const Index q = 2 * (Index(i) * lay.rows + j);
        consider(q);
        consider(q + 1);
      }
    }
    if (best_score >= -tol) return best;
  }
  for (Index t = 0; t < num_triangles(); ++t) consider(t);
  if (best_score >= -tol) return best;
  return std::nullopt;
}

namespace {

// Nodes, triangles and boundary edges of a mapped grid with the given
// column positions and heights.
Mesh build_mapped(GridLayout layout, DomainKind kind, double eps) {
  const int nx = layout.columns;
  const int ny = layout.rows;
  Eigen::Matrix2Xd nodes(2, Index(nx + 1) * (ny + 1));
  for (int i = 0; i <= nx; ++i) {
    for (int j = 0; j <= ny; ++j) {
      nodes.col(layout.node(i, j)) << layout.column_x[i], layout.column_height[i] * j / ny;
    }
  }

  Eigen::Matrix3Xi tris(3, 2 * Index(nx) * ny);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const int a = int(layout.node(i, j));
      const int b = int(layout.node(i + 1, j));
      const int c = int(layout.node(i + 1, j + 1));
      const int d = int(layout.node(i, j + 1));
      const Index q = 2 * (Index(i) * ny + j);
      tris.col(q) << a, b, c;
      tris.col(q + 1) << a, c, d;
    }
  }
  // Convex trapezoids always split into positive triangles unless a column
  // is numerically collapsed; report the offending column before Mesh does.
  for (int i = 0; i < nx; ++i) {
    const double w = layout.column_x[i + 1] - layout.column_x[i];
    const double hmin = std::min(layout.column_height[i], layout.column_height[i + 1]) / ny;
    if (!(w > 0.0) || !(hmin > 1e-14 * std::max(1.0, w))) {
      std::ostringstream msg;
      msg << "degenerate triangles in column " << i << " (x1 = " << layout.column_x[i]
          << "): profile too steep or too thin for this resolution";
      throw MeshError(msg.str());
    }
  }

  std::vector<BoundaryEdge> edges;
  edges.reserve(2 * std::size_t(nx + ny));
  for (int i = 0; i < nx; ++i) edges.push_back({layout.node(i, 0), layout.node(i + 1, 0), BoundaryTag::lower});
  for (int j = 0; j < ny; ++j) edges.push_back({layout.node(nx, j), layout.node(nx, j + 1), BoundaryTag::right});
  for (int i = nx; i > 0; --i) edges.push_back({layout.node(i, ny), layout.node(i - 1, ny), BoundaryTag::upper});
  for (int j = ny; j > 0; --j) edges.push_back({layout.node(0, j), layout.node(0, j - 1), BoundaryTag::left});

  std::vector<std::pair<Index, Index>> pairs;
  pairs.reserve(std::size_t(ny + 1));
  for (int j = 0; j <= ny; ++j) pairs.emplace_back(layout.node(0, j), layout.node(nx, j));

  return Mesh(std::move(nodes), std::move(tris), std::move(edges), std::move(pairs), kind, eps, std::move(layout));
}

} // namespace

Mesh build_cell_mesh(const ProfileSpec& spec, int nx, int ny) {
  if (nx < 2 || ny < 2) throw MeshError("cell mesh needs nx >= 2 and ny >= 2");
  const double L = spec.period();
  GridLayout lay;
  lay.columns = nx;
  lay.rows = ny;
  lay.column_x.resize(std::size_t(nx + 1));
  lay.column_height.resize(std::size_t(nx + 1));
  for (int i = 0; i <= nx; ++i) {
    lay.column_x[i] = L * i / nx;
    lay.column_height[i] = spec(L * (i % nx) / nx);
  }
  return build_mapped(std::move(lay), DomainKind::cell, 1.0);
}

int periods_for_eps(const ProfileSpec& spec, double eps) {
  if (!(eps > 0.0) || eps > 1.0) throw MeshError("eps must lie in (0, 1]");
  const double m = 1.0 / (eps * spec.period());
  const double mr = std::round(m);
  if (mr < 1.0 || std::abs(m - mr) > 1e-9 * mr) {
    std::ostringstream msg;
    msg << "eps = " << eps << " is not of the form 1/(m L) with integer m (L = " << spec.period()
        << ", 1/(eps L) = " << m << "); an integer number of periods must tile (0, 1)";
    throw MeshError(msg.str());
  }
  return int(mr);
}

Mesh build_thin_mesh(const ProfileSpec& spec, double eps, int nx_per_period, int ny) {
  if (nx_per_period < 2 || ny < 2) throw MeshError("thin mesh needs nx_per_period >= 2 and ny >= 2");
  const int m = periods_for_eps(spec, eps);
  const int nx = m * nx_per_period;
  const double L = spec.period();
  GridLayout lay;
  lay.columns = nx;
  lay.rows = ny;
  lay.column_x.resize(std::size_t(nx + 1));
  lay.column_height.resize(std::size_t(nx + 1));
  for (int i = 0; i <= nx; ++i) {
    lay.column_x[i] = double(i) / nx;
    // same heights as the cell grid at this resolution, copied per period
    lay.column_height[i] = spec(L * (i % nx_per_period) / nx_per_period);
  }
  return build_mapped(std::move(lay), DomainKind::thin, eps);
}

double mesh_area(const Mesh& mesh) { return mesh.areas().sum(); }

void write_mesh(std::ostream& os, const Mesh& mesh) {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(17);
  os << "thinhom-mesh 1\n";
  os << "kind " << to_string(mesh.kind()) << "\n";
  os << "eps " << mesh.eps() << "\n";
  const GridLayout& lay = mesh.layout();
  os << "grid " << lay.columns << " " << lay.rows << "\n";
  os << "columns " << lay.column_x.size() << "\n";
  for (std::size_t i = 0; i < lay.column_x.size(); ++i) {
    os << i << " " << lay.column_x[i] << " " << lay.column_height[i] << "\n";
  }
  os << "nodes " << mesh.num_nodes() << "\n";
  for (Index i = 0; i < mesh.num_nodes(); ++i) os << i << " " << mesh.node(i).x() << " " << mesh.node(i).y() << "\n";
  os << "triangles " << mesh.num_triangles() << "\n";
  for (Index t = 0; t < mesh.num_triangles(); ++t) {
    os << t << " " << mesh.triangle(t)(0) << " " << mesh.triangle(t)(1) << " " << mesh.triangle(t)(2) << "\n";
  }
  os << "edges " << mesh.boundary_edges().size() << "\n";
  for (std::size_t e = 0; e < mesh.boundary_edges().size(); ++e) {
    const BoundaryEdge& be = mesh.boundary_edges()[e];
    os << e << " " << be.a << " " << be.b << " " << to_string(be.tag) << "\n";
  }
  os << "periodic " << mesh.periodic_pairs().size() << "\n";
  for (std::size_t k = 0; k < mesh.periodic_pairs().size(); ++k) {
    os << k << " " << mesh.periodic_pairs()[k].first << " " << mesh.periodic_pairs()[k].second << "\n";
  }
  os.flags(flags);
  os.precision(prec);
}

namespace {

std::size_t expect_section(std::istream& is, const std::string& name) {
  std::string key;
  std::size_t n = 0;
  if (!(is >> key >> n) || key != name) throw IoError("mesh file: expected section '" + name + "'");
  return n;
}

} // namespace

Mesh read_mesh(std::istream& is) {
  std::string magic;
  int version = 0;
  if (!(is >> magic >> version) || magic != "thinhom-mesh" || version != 1) {
    throw IoError("mesh file: missing 'thinhom-mesh 1' header");
  }
  std::string key;
  std::string kind_s;
  double eps = 1.0;
  GridLayout lay;
  if (!(is >> key >> kind_s) || key != "kind" || (kind_s != "cell" && kind_s != "thin")) {
    throw IoError("mesh file: bad kind record");
  }
  if (!(is >> key >> eps) || key != "eps") throw IoError("mesh file: bad eps record");
  if (!(is >> key >> lay.columns >> lay.rows) || key != "grid") throw IoError("mesh file: bad grid record");

  const std::size_t nc = expect_section(is, "columns");
  lay.column_x.resize(nc);
  lay.column_height.resize(nc);
  for (std::size_t i = 0; i < nc; ++i) {
    std::size_t idx = 0;
    if (!(is >> idx >> lay.column_x[i] >> lay.column_height[i]) || idx != i) throw IoError("mesh file: bad column");
  }
  const std::size_t nn = expect_section(is, "nodes");
  Eigen::Matrix2Xd nodes(2, Index(nn));
  for (std::size_t i = 0; i < nn; ++i) {
    std::size_t idx = 0;
    if (!(is >> idx >> nodes(0, Index(i)) >> nodes(1, Index(i))) || idx != i) throw IoError("mesh file: bad node");
  }
  const std::size_t nt = expect_section(is, "triangles");
  Eigen::Matrix3Xi tris(3, Index(nt));
  for (std::size_t t = 0; t < nt; ++t) {
    std::size_t idx = 0;
    auto c = tris.col(Index(t));
    if (!(is >> idx >> c(0) >> c(1) >> c(2)) || idx != t) throw IoError("mesh file: bad triangle");
    if (c.minCoeff() < 0 || std::size_t(c.maxCoeff()) >= nn) throw IoError("mesh file: triangle vertex out of range");
  }
  const std::size_t ne = expect_section(is, "edges");
  std::vector<BoundaryEdge> edges(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    std::size_t idx = 0;
    std::string tag;
    if (!(is >> idx >> edges[e].a >> edges[e].b >> tag) || idx != e) throw IoError("mesh file: bad edge");
    if (tag == "lower") edges[e].tag = BoundaryTag::lower;
    else if (tag == "upper") edges[e].tag = BoundaryTag::upper;
    else if (tag == "left") edges[e].tag = BoundaryTag::left;
    else if (tag == "right") edges[e].tag = BoundaryTag::right;
    else throw IoError("mesh file: unknown edge tag '" + tag + "'");
  }
  const std::size_t np = expect_section(is, "periodic");
  std::vector<std::pair<Index, Index>> pairs(np);
  for (std::size_t k = 0; k < np; ++k) {
    std::size_t idx = 0;
    if (!(is >> idx >> pairs[k].first >> pairs[k].second) || idx != k) throw IoError("mesh file: bad periodic pair");
  }
  return Mesh(std::move(nodes), std::move(tris), std::move(edges), std::move(pairs),
              kind_s == "cell" ? DomainKind::cell : DomainKind::thin, eps, std::move(lay));
}

} // namespace thinhom
