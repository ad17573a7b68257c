#include "thermohom/mesh.hpp"

#include "thermohom/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

namespace thermohom {
namespace {

using Edge = std::pair<int, int>;

Edge make_edge(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

Point project_onto(const Pore& pore, Point p) {
  const double d = distance(p, pore.center);
  return pore.center + (pore.radius / d) * (p - pore.center);
}

// Which outer face (if any) contains both points.
std::optional<BoundaryKind> outer_face(const Square& sq, Point a, Point b) {
  if (a.x == sq.x_min() && b.x == sq.x_min()) return BoundaryKind::left;
  if (a.x == sq.x_max() && b.x == sq.x_max()) return BoundaryKind::right;
  if (a.y == sq.y_min() && b.y == sq.y_min()) return BoundaryKind::bottom;
  if (a.y == sq.y_max() && b.y == sq.y_max()) return BoundaryKind::top;
  return std::nullopt;
}

bool on_outer_boundary(const Square& sq, Point p) {
  return p.x == sq.x_min() || p.x == sq.x_max() || p.y == sq.y_min() || p.y == sq.y_max();
}

void check_resolution(const RveSpec& spec, int resolution, int order) {
  if (order != 1 && order != 2) throw GeometryError("element order must be 1 or 2");
  if (resolution < 1) throw GeometryError("resolution must be positive");
  if (spec.pores.empty()) return;
  if (resolution < 4) throw GeometryError("resolution must be at least 4 for a porous cell");
  const double h = spec.cell.edge_length / resolution;
  const Square& sq = spec.cell;
  for (std::size_t i = 0; i < spec.pores.size(); ++i) {
    const Pore& p = spec.pores[i];
    if (p.radius < 2.0 * h) {
      std::ostringstream msg;
      msg << "pore " << i << " radius " << p.radius << " is below two cell widths (" << 2.0 * h
          << "); increase the resolution";
      throw GeometryError(msg.str());
    }
    const double clearance = std::min({p.center.x - p.radius - sq.x_min(),
                                       sq.x_max() - p.center.x - p.radius,
                                       p.center.y - p.radius - sq.y_min(),
                                       sq.y_max() - p.center.y - p.radius});
    if (clearance < h) {
      std::ostringstream msg;
      msg << "pore " << i << " lies within one cell width of the cell boundary (clearance "
          << clearance << ", cell width " << h << ")";
      throw GeometryError(msg.str());
    }
    for (std::size_t j = 0; j < i; ++j) {
      const double gap = distance(p.center, spec.pores[j].center) - p.radius - spec.pores[j].radius;
      if (gap < h) {
        std::ostringstream msg;
        msg << "pores " << j << " and " << i << " are closer than one cell width (gap " << gap
            << ")";
        throw GeometryError(msg.str());
      }
    }
  }
}

}  // namespace

std::string to_string(BoundaryKind kind) {
  switch (kind) {
    case BoundaryKind::left: return "left";
    case BoundaryKind::right: return "right";
    case BoundaryKind::bottom: return "bottom";
    case BoundaryKind::top: return "top";
    case BoundaryKind::pore: return "pore";
  }
  return "unknown";
}

std::size_t PeriodicMap::follower_count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < master.size(); ++i) n += master[i] != static_cast<int>(i);
  return n;
}

std::array<Point, kMaxElementNodes> Mesh::cell_coordinates(std::size_t cell) const {
  std::array<Point, kMaxElementNodes> out{};
  for (int a = 0; a < nodes_per_cell(); ++a) out[a] = nodes[cells[cell][a]];
  return out;
}

Point Mesh::centroid(std::size_t cell) const {
  const auto& c = cells[cell];
  return (1.0 / 3.0) * (nodes[c[0]] + nodes[c[1]] + nodes[c[2]]);
}

Mesh generate_mesh(const RveSpec& spec, int resolution, int order, const MeshOptions& options) {
  spec.validate();
  check_resolution(spec, resolution, order);

  const Square& sq = spec.cell;
  const int n = resolution;
  const double h = sq.edge_length / n;
  const int num_vertices = (n + 1) * (n + 1);
  auto vertex = [n](int i, int j) { return j * (n + 1) + i; };
  auto center = [n, num_vertices](int i, int j) { return num_vertices + j * n + i; };

  std::vector<Point> pts(static_cast<std::size_t>(num_vertices + n * n));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      pts[vertex(i, j)] = {sq.x_min() + sq.edge_length * i / n,
                           sq.y_min() + sq.edge_length * j / n};
  // Outer faces must be bit-identical so periodic partners match exactly.
  for (int k = 0; k <= n; ++k) {
    pts[vertex(n, k)].x = sq.x_max();
    pts[vertex(k, n)].y = sq.y_max();
  }
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      pts[center(i, j)] = {sq.x_min() + sq.edge_length * (i + 0.5) / n,
                           sq.y_min() + sq.edge_length * (j + 0.5) / n};

  std::vector<std::array<int, 3>> tris;
  tris.reserve(static_cast<std::size_t>(4 * n * n));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int v00 = vertex(i, j), v10 = vertex(i + 1, j), v11 = vertex(i + 1, j + 1),
                v01 = vertex(i, j + 1), c = center(i, j);
      tris.push_back({v00, v10, c});
      tris.push_back({v10, v11, c});
      tris.push_back({v11, v01, c});
      tris.push_back({v01, v00, c});
    }

  std::vector<int> on_pore(pts.size(), -1);
  std::vector<char> alive(tris.size(), 1);

  if (!spec.pores.empty()) {
    // Snap nodes near a circle onto it.
    const double snap = options.snap_fraction * h;
    for (std::size_t v = 0; v < pts.size(); ++v) {
      if (on_outer_boundary(sq, pts[v])) continue;
      for (std::size_t k = 0; k < spec.pores.size(); ++k) {
        const Pore& pore = spec.pores[k];
        if (std::abs(distance(pts[v], pore.center) - pore.radius) < snap) {
          pts[v] = project_onto(pore, pts[v]);
          on_pore[v] = static_cast<int>(k);
          break;
        }
      }
    }

    auto inside_any = [&](Point p) {
      for (const Pore& pore : spec.pores)
        if (distance(p, pore.center) < pore.radius * (1.0 - 1e-12)) return true;
      return false;
    };
    auto centroid_of = [&](const std::array<int, 3>& t) {
      return (1.0 / 3.0) * (pts[t[0]] + pts[t[1]] + pts[t[2]]);
    };
    for (std::size_t e = 0; e < tris.size(); ++e) alive[e] = !inside_any(centroid_of(tris[e]));

    // Fit the hole boundary: every node on an exposed edge goes onto its
    // nearest circle; elements that end up inside a pore are dropped.
    for (bool changed = true; changed;) {
      changed = false;
      std::map<Edge, int> edge_count;
      for (std::size_t e = 0; e < tris.size(); ++e) {
        if (!alive[e]) continue;
        for (int s = 0; s < 3; ++s) ++edge_count[make_edge(tris[e][s], tris[e][(s + 1) % 3])];
      }
      for (const auto& [edge, count] : edge_count) {
        if (count != 1 || outer_face(sq, pts[edge.first], pts[edge.second])) continue;
        for (int v : {edge.first, edge.second}) {
          if (on_pore[v] >= 0) continue;
          std::size_t nearest = 0;
          double best = std::numeric_limits<double>::max();
          for (std::size_t k = 0; k < spec.pores.size(); ++k) {
            const double gap =
                std::abs(distance(pts[v], spec.pores[k].center) - spec.pores[k].radius);
            if (gap < best) best = gap, nearest = k;
          }
          pts[v] = project_onto(spec.pores[nearest], pts[v]);
          on_pore[v] = static_cast<int>(nearest);
          changed = true;
        }
      }
      for (std::size_t e = 0; e < tris.size(); ++e) {
        if (!alive[e]) continue;
        const auto& t = tris[e];
        const bool all_on_circle =
            on_pore[t[0]] >= 0 && on_pore[t[0]] == on_pore[t[1]] && on_pore[t[1]] == on_pore[t[2]];
        if (all_on_circle || inside_any(centroid_of(t))) {
          alive[e] = 0;
          changed = true;
        }
      }
    }

    // Two circle nodes close together leave a sliver; merge them at their
    // circular midpoint.
    const double short_edge = options.collapse_fraction * h;
    for (bool collapsed = true; collapsed;) {
      collapsed = false;
      std::map<Edge, int> edge_count;
      std::vector<std::vector<int>> incident(pts.size());
      for (std::size_t e = 0; e < tris.size(); ++e) {
        if (!alive[e]) continue;
        for (int s = 0; s < 3; ++s) {
          ++edge_count[make_edge(tris[e][s], tris[e][(s + 1) % 3])];
          incident[tris[e][s]].push_back(static_cast<int>(e));
        }
      }
      std::vector<char> touched(pts.size(), 0);
      for (const auto& [edge, count] : edge_count) {
        const auto [a, b] = edge;
        if (count != 1 || on_pore[a] < 0 || on_pore[a] != on_pore[b]) continue;
        if (touched[a] || touched[b] || distance(pts[a], pts[b]) >= short_edge) continue;
        const Point merged = project_onto(spec.pores[on_pore[a]], 0.5 * (pts[a] + pts[b]));
        bool ok = true;
        std::vector<int> affected;
        for (int v : {a, b})
          for (int e : incident[v]) {
            auto t = tris[e];
            const bool has_a = t[0] == a || t[1] == a || t[2] == a;
            const bool has_b = t[0] == b || t[1] == b || t[2] == b;
            if (has_a && has_b) continue;
            for (int& w : t)
              if (w == a || w == b) w = a;
            std::array<Point, 3> q{pts[t[0]], pts[t[1]], pts[t[2]]};
            for (int k = 0; k < 3; ++k)
              if (t[k] == a) q[k] = merged;
            ok = ok && signed_area(q[0], q[1], q[2]) > 0.0;
            affected.push_back(e);
          }
        if (!ok) continue;
        for (int e : incident[a])
          for (int w : tris[e]) touched[w] = 1;
        for (int e : incident[b]) {
          const auto& t = tris[e];
          if ((t[0] == a || t[1] == a || t[2] == a)) alive[e] = 0;
          for (int w : t) touched[w] = 1;
        }
        for (int e : affected)
          for (int& w : tris[e])
            if (w == b) w = a;
        pts[a] = merged;
        on_pore[b] = -1;
        collapsed = true;
      }
    }

    // One Jacobi smoothing pass over the two node rings next to the pores.
    std::vector<std::vector<int>> neighbours(pts.size());
    for (std::size_t e = 0; e < tris.size(); ++e) {
      if (!alive[e]) continue;
      for (int s = 0; s < 3; ++s) {
        const int a = tris[e][s], b = tris[e][(s + 1) % 3];
        neighbours[a].push_back(b);
        neighbours[b].push_back(a);
      }
    }
    for (auto& nb : neighbours) {
      std::sort(nb.begin(), nb.end());
      nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }
    std::vector<int> ring(pts.size(), 0);
    for (std::size_t v = 0; v < pts.size(); ++v)
      if (on_pore[v] >= 0 && !neighbours[v].empty()) ring[v] = -1;
    for (int level = 1; level <= 2; ++level) {
      for (std::size_t v = 0; v < pts.size(); ++v) {
        if (ring[v] != 0 || on_outer_boundary(sq, pts[v])) continue;
        for (int w : neighbours[v]) {
          if (ring[w] == (level == 1 ? -1 : level - 1)) {
            ring[v] = level;
            break;
          }
        }
      }
    }
    std::vector<Point> smoothed = pts;
    for (std::size_t v = 0; v < pts.size(); ++v) {
      if (ring[v] == 0) continue;
      Point avg;
      for (int w : neighbours[v]) avg = avg + pts[w];
      smoothed[v] = (1.0 / static_cast<double>(neighbours[v].size())) * avg;
      // Circle nodes only slide along their circle.
      if (ring[v] < 0) smoothed[v] = project_onto(spec.pores[on_pore[v]], smoothed[v]);
    }
    bool valid = true;
    for (std::size_t e = 0; e < tris.size() && valid; ++e) {
      if (!alive[e]) continue;
      const auto& t = tris[e];
      valid = signed_area(smoothed[t[0]], smoothed[t[1]], smoothed[t[2]]) > 0.0;
    }
    if (valid) pts = std::move(smoothed);
  }

  // Compact the node numbering, keeping generation order.
  std::vector<int> new_id(pts.size(), -1);
  Mesh mesh;
  mesh.order = order;
  mesh.cell = sq;
  mesh.pores = spec.pores;
  for (std::size_t e = 0; e < tris.size(); ++e) {
    if (!alive[e]) continue;
    for (int v : tris[e]) new_id[v] = 0;
  }
  std::vector<int> node_pore;
  for (std::size_t v = 0; v < pts.size(); ++v) {
    if (new_id[v] < 0) continue;
    new_id[v] = static_cast<int>(mesh.nodes.size());
    mesh.nodes.push_back(pts[v]);
    node_pore.push_back(on_pore[v]);
  }

  std::map<Edge, int> edge_count;
  for (std::size_t e = 0; e < tris.size(); ++e) {
    if (!alive[e]) continue;
    std::array<int, kMaxElementNodes> cell{-1, -1, -1, -1, -1, -1};
    for (int a = 0; a < 3; ++a) cell[a] = new_id[tris[e][a]];
    mesh.cells.push_back(cell);
    for (int s = 0; s < 3; ++s) ++edge_count[make_edge(cell[s], cell[(s + 1) % 3])];
  }
  mesh.regions.assign(mesh.cells.size(), 0);

  auto exposed_pore = [&](int a, int b) -> int {
    if (edge_count[make_edge(a, b)] != 1) return -1;
    if (node_pore[a] < 0 || node_pore[a] != node_pore[b]) return -1;
    return node_pore[a];
  };

  std::map<Edge, int> midside;
  if (order == 2) {
    for (auto& cell : mesh.cells) {
      for (int s = 0; s < 3; ++s) {
        const int a = cell[s], b = cell[(s + 1) % 3];
        const Edge edge = make_edge(a, b);
        auto it = midside.find(edge);
        if (it == midside.end()) {
          Point mid = 0.5 * (mesh.nodes[a] + mesh.nodes[b]);
          if (const int k = exposed_pore(a, b); k >= 0) mid = project_onto(mesh.pores[k], mid);
          it = midside.emplace(edge, static_cast<int>(mesh.nodes.size())).first;
          mesh.nodes.push_back(mid);
        }
        cell[3 + s] = it->second;
      }
    }
  }

  for (const auto& cell : mesh.cells) {
    for (int s = 0; s < 3; ++s) {
      const int a = cell[s], b = cell[(s + 1) % 3];
      if (edge_count[make_edge(a, b)] != 1) continue;
      BoundaryEdge be;
      be.nodes = {a, b, order == 2 ? cell[3 + s] : -1};
      if (auto face = outer_face(sq, mesh.nodes[a], mesh.nodes[b])) {
        be.kind = *face;
      } else {
        be.kind = BoundaryKind::pore;
        be.pore = node_pore[a] >= 0 ? node_pore[a] : node_pore[b];
      }
      mesh.boundary.push_back(be);
    }
  }

  validate_mesh(mesh);
  mesh.periodic = periodic_pairs(mesh, options.pairing_tolerance * sq.edge_length);
  return mesh;
}

PeriodicMap periodic_pairs(const Mesh& mesh, double tolerance) {
  const std::size_t nn = mesh.num_nodes();
  PeriodicMap map;
  map.master.resize(nn);
  for (std::size_t i = 0; i < nn; ++i) map.master[i] = static_cast<int>(i);

  auto match = [&](BoundaryKind lo_kind, BoundaryKind hi_kind, bool along_y,
                   std::vector<std::pair<int, int>>& out) {
    auto lo = boundary_nodes(mesh, lo_kind);
    auto hi = boundary_nodes(mesh, hi_kind);
    auto coord = [&](int v) { return along_y ? mesh.nodes[v].y : mesh.nodes[v].x; };
    auto by_coord = [&](int a, int b) { return coord(a) < coord(b); };
    std::sort(lo.begin(), lo.end(), by_coord);
    std::sort(hi.begin(), hi.end(), by_coord);

    std::vector<int> unmatched;
    std::size_t i = 0, j = 0;
    while (i < lo.size() && j < hi.size()) {
      const double d = coord(hi[j]) - coord(lo[i]);
      if (std::abs(d) <= tolerance) {
        out.emplace_back(lo[i++], hi[j++]);
      } else if (d > 0) {
        unmatched.push_back(lo[i++]);
      } else {
        unmatched.push_back(hi[j++]);
      }
    }
    for (; i < lo.size(); ++i) unmatched.push_back(lo[i]);
    for (; j < hi.size(); ++j) unmatched.push_back(hi[j]);
    if (!unmatched.empty()) {
      std::ostringstream msg;
      msg << "no periodic partner on the opposite face (" << to_string(lo_kind) << "/"
          << to_string(hi_kind) << ") for node(s):";
      for (std::size_t k = 0; k < std::min<std::size_t>(unmatched.size(), 20); ++k) {
        const Point p = mesh.nodes[unmatched[k]];
        msg << " " << unmatched[k] << "(" << p.x << "," << p.y << ")";
      }
      if (unmatched.size() > 20) msg << " ...";
      throw PeriodicityError(msg.str());
    }
  };
  match(BoundaryKind::left, BoundaryKind::right, true, map.left_right);
  match(BoundaryKind::bottom, BoundaryKind::top, false, map.bottom_top);
  if (map.left_right.empty() || map.bottom_top.empty()) {
    throw PeriodicityError("mesh lacks tagged boundary faces");
  }

  for (auto [l, r] : map.left_right) map.master[r] = l;
  for (auto [b, t] : map.bottom_top) {
    // The top-right corner already points at the top-left one; redirect the
    // remaining root instead of overwriting it.
    int root_t = t;
    while (map.master[root_t] != root_t) root_t = map.master[root_t];
    int root_b = b;
    while (map.master[root_b] != root_b) root_b = map.master[root_b];
    if (root_t != root_b) map.master[root_t] = root_b;
  }
  for (std::size_t v = 0; v < nn; ++v) {
    int root = static_cast<int>(v);
    std::size_t steps = 0;
    while (map.master[root] != root) {
      root = map.master[root];
      if (++steps > nn) throw PeriodicityError("cyclic periodic identification");
    }
    map.master[v] = root;
  }
  return map;
}

void validate_mesh(const Mesh& mesh) {
  if (mesh.order != 1 && mesh.order != 2) throw GeometryError("element order must be 1 or 2");
  const auto rule = triangle_rule(mesh.order);
  for (std::size_t e = 0; e < mesh.num_cells(); ++e) {
    const auto coords = mesh.cell_coordinates(e);
    const std::span<const Point> cs(coords.data(), static_cast<std::size_t>(mesh.nodes_per_cell()));
    for (const auto& qp : rule) {
      if (map_point(cs, mesh.order, qp).det_jacobian <= 0.0) {
        const Point c = mesh.centroid(e);
        std::ostringstream msg;
        msg << "inverted element " << e << " near (" << c.x << ", " << c.y << ")";
        throw GeometryError(msg.str());
      }
    }
  }
  for (std::size_t v = 0; v < mesh.num_nodes(); ++v)
    for (std::size_t k = 0; k < mesh.pores.size(); ++k)
      if (distance(mesh.nodes[v], mesh.pores[k].center) < mesh.pores[k].radius * (1.0 - 1e-9)) {
        throw GeometryError("node " + std::to_string(v) + " lies inside pore " + std::to_string(k));
      }
}

double min_quality(const Mesh& mesh) {
  double q = 1.0;
  for (const auto& c : mesh.cells)
    q = std::min(q, triangle_quality(mesh.nodes[c[0]], mesh.nodes[c[1]], mesh.nodes[c[2]]));
  return q;
}

void assign_regions(Mesh& mesh, const std::function<int(Point)>& region_of) {
  mesh.regions.resize(mesh.num_cells());
  for (std::size_t e = 0; e < mesh.num_cells(); ++e) mesh.regions[e] = region_of(mesh.centroid(e));
}

std::vector<int> boundary_nodes(const Mesh& mesh, BoundaryKind kind) {
  std::vector<int> out;
  for (const auto& be : mesh.boundary) {
    if (be.kind != kind) continue;
    for (int v : be.nodes)
      if (v >= 0) out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace thermohom
