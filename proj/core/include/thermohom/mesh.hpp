#pragma once

#include "thermohom/element.hpp"
#include "thermohom/geometry.hpp"

#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace thermohom {

enum class BoundaryKind { left, right, bottom, top, pore };

std::string to_string(BoundaryKind kind);

/// Boundary segment; `nodes[2]` is the midside node for order 2, else -1.
struct BoundaryEdge {
  std::array<int, 3> nodes{-1, -1, -1};
  BoundaryKind kind = BoundaryKind::pore;
  int pore = -1;  // index into Mesh::pores for pore edges
};

/// Identification of nodes on opposite faces. `master[n] == n` for
/// independent nodes; the four corners collapse onto the lower-left one.
struct PeriodicMap {
  std::vector<int> master;
  std::vector<std::pair<int, int>> left_right;  // (left node, right node)
  std::vector<std::pair<int, int>> bottom_top;  // (bottom node, top node)

  std::size_t follower_count() const;
};

/// Periodic 2D simplex mesh of the solid part of the cell. Treated as
/// immutable once built.
struct Mesh {
  int order = 1;
  Square cell;
  std::vector<Pore> pores;
  std::vector<Point> nodes;
  std::vector<std::array<int, kMaxElementNodes>> cells;
  std::vector<int> regions;  // material region per cell
  std::vector<BoundaryEdge> boundary;
  PeriodicMap periodic;

  int nodes_per_cell() const { return nodes_per_element(order); }
  std::size_t num_nodes() const { return nodes.size(); }
  std::size_t num_cells() const { return cells.size(); }

  /// Coordinates of the nodes of one cell, in local order.
  std::array<Point, kMaxElementNodes> cell_coordinates(std::size_t cell) const;
  Point centroid(std::size_t cell) const;
};

struct MeshOptions {
  /// Nodes closer than this fraction of a grid cell to a pore circle are
  /// snapped onto it before elements are classified.
  double snap_fraction = 0.5;
  /// Pore-boundary edges shorter than this fraction of a grid cell are
  /// collapsed onto their circular midpoint.
  double collapse_fraction = 0.4;
  /// Relative pairing tolerance (times L).
  double pairing_tolerance = 1e-8;
};

/// Structured crossed-triangle grid with `resolution` squares per edge, each
/// split into four triangles about its center. Elements whose centroid lies
/// in a pore are removed and the hole boundary is fitted to the circles.
Mesh generate_mesh(const RveSpec& spec, int resolution, int order, const MeshOptions& options = {});

/// Matches boundary nodes of opposite faces by coordinate. Throws
/// PeriodicityError listing unmatched nodes.
PeriodicMap periodic_pairs(const Mesh& mesh, double tolerance);

/// Throws GeometryError if any element has a nonpositive Jacobian at a
/// quadrature point or a node lies inside a pore.
void validate_mesh(const Mesh& mesh);

/// Smallest inradius/circumradius ratio over all vertex triangles.
double min_quality(const Mesh& mesh);

/// Sets the region of every cell from its centroid.
void assign_regions(Mesh& mesh, const std::function<int(Point)>& region_of);

/// Nodes carrying a given boundary tag, sorted and unique.
std::vector<int> boundary_nodes(const Mesh& mesh, BoundaryKind kind);

}  // namespace thermohom
