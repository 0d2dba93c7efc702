#pragma once

#include <array>
#include <memory>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "cflow/domain.hpp"

namespace cflow {

/// Conforming triangulation of a DomainSpec. Immutable once built; share it
/// through std::shared_ptr<const Mesh>.
///
/// Local edge i of a triangle joins vertices (i+1)%3 and (i+2)%3, i.e. it is
/// the edge opposite local vertex i. Global edges are numbered in order of
/// first appearance when scanning triangles, which makes the numbering (and
/// everything assembled on top of it) reproducible bit for bit.
class Mesh {
 public:
  using Triangle = std::array<int, 3>;
  using Edge = std::array<int, 2>;  // sorted vertex pair

  /// Validates every invariant (orientation, conformity, single boundary
  /// loop, boundary vertices on the exact curve). Throws std::invalid_argument.
  Mesh(DomainSpec domain, std::vector<Point> vertices, std::vector<Triangle> triangles,
       std::vector<int> boundary_loop, std::vector<double> boundary_param);

  const DomainSpec& domain() const { return domain_; }
  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  /// Counterclockwise closed loop of boundary vertex indices (first vertex
  /// not repeated at the end).
  const std::vector<int>& boundary() const { return boundary_; }
  /// Exact-curve parameter of boundary()[i].
  const std::vector<double>& boundary_param() const { return boundary_param_; }

  const std::vector<Edge>& edges() const { return edges_; }
  const std::array<int, 3>& triangle_edges(int t) const { return triangle_edges_[t]; }
  /// Up to two adjacent triangles; second entry is -1 on the boundary.
  const std::array<int, 2>& edge_triangles(int e) const { return edge_triangles_[e]; }
  bool is_boundary_vertex(int v) const { return boundary_vertex_[v]; }
  bool is_boundary_edge(int e) const { return edge_triangles_[e][1] < 0; }
  /// Global edge index of boundary segment (boundary()[i], boundary()[i+1]).
  const std::vector<int>& boundary_edges() const { return boundary_edges_; }

  int vertex_count() const { return static_cast<int>(vertices_.size()); }
  int triangle_count() const { return static_cast<int>(triangles_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  double triangle_area(int t) const;
  double total_area() const;
  /// Maximum edge length.
  double h() const { return h_; }

  /// Returns the edge index joining a and b, or -1.
  int find_edge(int a, int b) const;

  nlohmann::json to_json() const;

 private:
  void build_topology();
  void validate() const;

  DomainSpec domain_;
  std::vector<Point> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<int> boundary_;
  std::vector<double> boundary_param_;

  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> triangle_edges_;
  std::vector<std::array<int, 2>> edge_triangles_;
  std::vector<std::vector<std::pair<int, int>>> vertex_edges_;  // (other vertex, edge)
  std::vector<bool> boundary_vertex_;
  std::vector<int> boundary_edges_;
  double h_ = 0.0;
};

using MeshPtr = std::shared_ptr<const Mesh>;

/// Structured mesh with max edge length <= 1.5 * target_h. Curved domains are
/// concentric rings of the unit disc mapped through the boundary
/// parametrisation; rectangles are a uniform grid split along diagonals.
/// Throws std::invalid_argument when target_h exceeds feature_size()/4.
MeshPtr build_mesh(const DomainSpec& spec, double target_h);

/// Uniform red refinement; new boundary midpoints are moved onto the exact
/// boundary curve.
MeshPtr refine(const Mesh& mesh);

/// Length of each boundary segment, in boundary-loop order.
std::vector<double> boundary_arc_measure(const Mesh& mesh);

/// Sequence of meshes: build_mesh(spec, h) followed by levels-1 refinements.
std::vector<MeshPtr> mesh_hierarchy(const DomainSpec& spec, double h, int levels);

}  // namespace cflow
