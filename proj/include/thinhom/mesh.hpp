#ifndef THINHOM_MESH_HPP
#define THINHOM_MESH_HPP

#include "thinhom/profile.hpp"

#include <Eigen/Core>

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace thinhom {

using Index = Eigen::Index;

enum class DomainKind { cell, thin };
enum class BoundaryTag { lower, upper, left, right };

const char* to_string(BoundaryTag tag);
const char* to_string(DomainKind kind);

struct BoundaryEdge {
  Index a;
  Index b;
  BoundaryTag tag;
};

/// Column/row layout of a vertical-fiber mapped grid. Node (i, j) sits at
/// (column_x[i], j * column_height[i] / rows) and has index i * (rows + 1) + j.
/// Quad (i, j) is split along its (i, j)-(i+1, j+1) diagonal into triangles
/// 2 * (i * rows + j) and 2 * (i * rows + j) + 1.
struct GridLayout {
  int columns = 0;
  int rows = 0;
  std::vector<double> column_x;
  std::vector<double> column_height;

  Index node(int i, int j) const { return Index(i) * (rows + 1) + j; }
};

/// Triangulation of the reference cell Y* or of the rescaled thin domain.
/// Immutable after construction; per-triangle areas and barycentric
/// gradients are precomputed.
class Mesh {
public:
  Mesh(Eigen::Matrix2Xd nodes, Eigen::Matrix3Xi triangles, std::vector<BoundaryEdge> boundary_edges,
       std::vector<std::pair<Index, Index>> periodic_pairs, DomainKind kind, double eps, GridLayout layout);

  Index num_nodes() const { return nodes_.cols(); }
  Index num_triangles() const { return triangles_.cols(); }

  const Eigen::Matrix2Xd& nodes() const { return nodes_; }
  auto node(Index i) const { return nodes_.col(i); }
  const Eigen::Matrix3Xi& triangles() const { return triangles_; }
  auto triangle(Index t) const { return triangles_.col(t); }
  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_edges_; }
  const std::vector<std::pair<Index, Index>>& periodic_pairs() const { return periodic_pairs_; }
  DomainKind kind() const { return kind_; }
  /// 1 for cell meshes, epsilon for thin meshes.
  double eps() const { return eps_; }
  /// x1-extent of the domain: L for cells, 1 for thin domains.
  double width() const { return layout_.column_x.back() - layout_.column_x.front(); }
  const GridLayout& layout() const { return layout_; }

  double area(Index t) const { return areas_[t]; }
  const Eigen::VectorXd& areas() const { return areas_; }
  /// Columns are the gradients of the three barycentric coordinates.
  const Eigen::Matrix<double, 2, 3>& basis_gradients(Index t) const { return grads_[std::size_t(t)]; }
  Eigen::Vector2d barycenter(Index t) const;

  /// Per-node weights w with sum_i w_i u_i = integral of the P1 interpolant of u.
  Eigen::VectorXd lumped_weights() const;

  /// Triangle containing the point (within a small relative tolerance), if any.
  std::optional<Index> locate(const Eigen::Vector2d& x) const;

  /// Barycentric coordinates of x with respect to triangle t.
  Eigen::Vector3d barycentric(Index t, const Eigen::Vector2d& x) const;

private:
  Eigen::Matrix2Xd nodes_;
  Eigen::Matrix3Xi triangles_;
  std::vector<BoundaryEdge> boundary_edges_;
  std::vector<std::pair<Index, Index>> periodic_pairs_;
  DomainKind kind_;
  double eps_;
  GridLayout layout_;
  Eigen::VectorXd areas_;
  std::vector<Eigen::Matrix<double, 2, 3>> grads_;
};

/// Mapped grid of Y* = {0 < y1 < L, 0 < y2 < g(y1)} with nx columns and ny rows.
Mesh build_cell_mesh(const ProfileSpec& spec, int nx, int ny);

/// Number of profile periods tiling (0, 1) at this eps; throws MeshError
/// unless eps = 1 / (m L) for a positive integer m.
int periods_for_eps(const ProfileSpec& spec, double eps);

/// Mapped grid of the thin domain {0 < x1 < 1, 0 < x2 < g(x1 / eps)}, built
/// from m = 1 / (eps L) copies of the period grid.
Mesh build_thin_mesh(const ProfileSpec& spec, double eps, int nx_per_period, int ny);

double mesh_area(const Mesh& mesh);

/// Plain-text mesh listing; see README for the record layout.
void write_mesh(std::ostream& os, const Mesh& mesh);
Mesh read_mesh(std::istream& is);

} // namespace thinhom

#endif // THINHOM_MESH_HPP
