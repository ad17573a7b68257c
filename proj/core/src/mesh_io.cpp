#include "thermohom/mesh_io.hpp"

#include "thermohom/errors.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace thermohom {
namespace {

constexpr int kCurveTagOffset = 4;  // curves 1..4 are the faces, pores follow

int face_tag(BoundaryKind kind) {
  switch (kind) {
    case BoundaryKind::left: return 1;
    case BoundaryKind::right: return 2;
    case BoundaryKind::bottom: return 3;
    case BoundaryKind::top: return 4;
    case BoundaryKind::pore: break;
  }
  return -1;
}

int edge_curve_tag(const BoundaryEdge& be) {
  return be.kind == BoundaryKind::pore ? kCurveTagOffset + 1 + be.pore : face_tag(be.kind);
}

int nodes_for_type(int type) {
  switch (type) {
    case 1: return 2;
    case 2: return 3;
    case 8: return 3;
    case 9: return 6;
    case 15: return 1;
    default: return -1;
  }
}

struct BoundingBox {
  double lo[2]{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
  double hi[2]{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
  void add(Point p) {
    lo[0] = std::min(lo[0], p.x);
    lo[1] = std::min(lo[1], p.y);
    hi[0] = std::max(hi[0], p.x);
    hi[1] = std::max(hi[1], p.y);
  }
};

std::ostream& operator<<(std::ostream& os, const BoundingBox& b) {
  return os << b.lo[0] << ' ' << b.lo[1] << " 0 " << b.hi[0] << ' ' << b.hi[1] << " 0";
}

Pore fit_circle(const std::vector<Point>& pts) {
  // Algebraic fit of x^2 + y^2 + D x + E y + F = 0.
  Eigen::MatrixXd A(pts.size(), 3);
  Eigen::VectorXd b(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    A(i, 0) = pts[i].x;
    A(i, 1) = pts[i].y;
    A(i, 2) = 1.0;
    b(i) = -(pts[i].x * pts[i].x + pts[i].y * pts[i].y);
  }
  const Eigen::Vector3d s = A.colPivHouseholderQr().solve(b);
  const Point c{-0.5 * s(0), -0.5 * s(1)};
  return {c, std::sqrt(c.x * c.x + c.y * c.y - s(2))};
}

class Tokens {
 public:
  explicit Tokens(std::string_view text) : in_(std::string(text)) {}

  template <typename T>
  T next(const char* what) {
    T value;
    if (!(in_ >> value)) throw GeometryError(std::string("msh: cannot read ") + what);
    return value;
  }
  std::string quoted() {
    std::string s;
    if (!(in_ >> std::quoted(s))) throw GeometryError("msh: cannot read physical name");
    return s;
  }
  bool section(std::string& name) {
    std::string tok;
    while (in_ >> tok) {
      if (tok.size() > 1 && tok[0] == '$' && tok.rfind("$End", 0) != 0) {
        name = tok.substr(1);
        return true;
      }
    }
    return false;
  }
  void skip_to_end(const std::string& name) {
    const std::string end = "$End" + name;
    std::string tok;
    while (in_ >> tok)
      if (tok == end) return;
    throw GeometryError("msh: missing " + end);
  }

 private:
  std::istringstream in_;
};

}  // namespace

std::string export_msh(const Mesh& mesh) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10);

  std::set<int> region_set(mesh.regions.begin(), mesh.regions.end());
  if (region_set.empty()) region_set.insert(0);
  const std::vector<int> regions(region_set.begin(), region_set.end());
  auto surface_name = [&](int region) {
    return regions.size() == 1 ? std::string("solid") : "region_" + std::to_string(region);
  };

  os << "$MeshFormat\n4.1 0 8\n$EndMeshFormat\n";
  const int num_curves = kCurveTagOffset + static_cast<int>(mesh.pores.size());
  os << "$PhysicalNames\n" << num_curves + regions.size() << '\n';
  for (BoundaryKind k : {BoundaryKind::left, BoundaryKind::right, BoundaryKind::bottom,
                         BoundaryKind::top})
    os << "1 " << face_tag(k) << " \"" << to_string(k) << "\"\n";
  for (std::size_t k = 0; k < mesh.pores.size(); ++k)
    os << "1 " << kCurveTagOffset + 1 + k << " \"pore_" << k << "\"\n";
  for (std::size_t r = 0; r < regions.size(); ++r)
    os << "2 " << r + 1 << " \"" << surface_name(regions[r]) << "\"\n";
  os << "$EndPhysicalNames\n";

  std::vector<BoundingBox> curve_box(num_curves + 1);
  for (const auto& be : mesh.boundary)
    for (int v : be.nodes)
      if (v >= 0) curve_box[edge_curve_tag(be)].add(mesh.nodes[v]);
  BoundingBox all;
  for (const Point& p : mesh.nodes) all.add(p);

  os << "$Entities\n0 " << num_curves << ' ' << regions.size() << " 0\n";
  for (int c = 1; c <= num_curves; ++c) os << c << ' ' << curve_box[c] << " 1 " << c << " 0\n";
  for (std::size_t r = 0; r < regions.size(); ++r) {
    os << r + 1 << ' ' << all << " 1 " << r + 1 << ' ' << num_curves;
    for (int c = 1; c <= num_curves; ++c) os << ' ' << c;
    os << '\n';
  }
  os << "$EndEntities\n";

  const std::size_t nn = mesh.num_nodes();
  os << "$Nodes\n1 " << nn << " 1 " << nn << "\n2 1 0 " << nn << '\n';
  for (std::size_t v = 0; v < nn; ++v) os << v + 1 << '\n';
  for (const Point& p : mesh.nodes) os << p.x << ' ' << p.y << " 0\n";
  os << "$EndNodes\n";

  std::vector<std::vector<const BoundaryEdge*>> by_curve(num_curves + 1);
  for (const auto& be : mesh.boundary) by_curve[edge_curve_tag(be)].push_back(&be);
  std::size_t blocks = regions.size();
  for (int c = 1; c <= num_curves; ++c) blocks += !by_curve[c].empty();
  const std::size_t num_elements = mesh.boundary.size() + mesh.num_cells();

  const int line_type = mesh.order == 1 ? 1 : 8;
  const int tri_type = mesh.order == 1 ? 2 : 9;
  const int line_nodes = mesh.order == 1 ? 2 : 3;
  os << "$Elements\n" << blocks << ' ' << num_elements << " 1 " << num_elements << '\n';
  std::size_t tag = 1;
  for (int c = 1; c <= num_curves; ++c) {
    if (by_curve[c].empty()) continue;
    os << "1 " << c << ' ' << line_type << ' ' << by_curve[c].size() << '\n';
    for (const BoundaryEdge* be : by_curve[c]) {
      os << tag++;
      for (int a = 0; a < line_nodes; ++a) os << ' ' << be->nodes[a] + 1;
      os << '\n';
    }
  }
  for (std::size_t r = 0; r < regions.size(); ++r) {
    std::vector<std::size_t> cells;
    for (std::size_t e = 0; e < mesh.num_cells(); ++e)
      if ((mesh.regions.empty() ? 0 : mesh.regions[e]) == regions[r]) cells.push_back(e);
    os << "2 " << r + 1 << ' ' << tri_type << ' ' << cells.size() << '\n';
    for (std::size_t e : cells) {
      os << tag++;
      for (int a = 0; a < mesh.nodes_per_cell(); ++a) os << ' ' << mesh.cells[e][a] + 1;
      os << '\n';
    }
  }
  os << "$EndElements\n";
  return os.str();
}

Mesh import_msh(std::string_view text, double pairing_tolerance) {
  Tokens tok(text);
  std::map<std::pair<int, int>, std::string> physical_names;  // (dim, tag) -> name
  std::map<int, std::vector<int>> curve_physicals, surface_physicals;
  std::map<long, int> node_index;
  std::vector<Point> nodes;
  struct RawElement {
    int entity_dim, entity_tag, type;
    std::vector<long> nodes;
  };
  std::vector<RawElement> elements;
  bool seen_format = false;

  std::string name;
  while (tok.section(name)) {
    if (name == "MeshFormat") {
      const auto version = tok.next<std::string>("version");
      const int file_type = tok.next<int>("file type");
      tok.next<int>("data size");
      if (version.rfind("4.1", 0) != 0 || file_type != 0) {
        throw GeometryError("msh: only version 4.1 ASCII is supported (got " + version + ")");
      }
      seen_format = true;
      tok.skip_to_end(name);
    } else if (name == "PhysicalNames") {
      const int n = tok.next<int>("physical name count");
      for (int i = 0; i < n; ++i) {
        const int dim = tok.next<int>("physical dimension");
        const int tag = tok.next<int>("physical tag");
        physical_names[{dim, tag}] = tok.quoted();
      }
      tok.skip_to_end(name);
    } else if (name == "Entities") {
      const long np = tok.next<long>("point count"), nc = tok.next<long>("curve count"),
                 ns = tok.next<long>("surface count"), nv = tok.next<long>("volume count");
      for (long i = 0; i < np; ++i) {
        tok.next<int>("point tag");
        for (int k = 0; k < 3; ++k) tok.next<double>("point coordinate");
        const int nphys = tok.next<int>("point physical count");
        for (int k = 0; k < nphys; ++k) tok.next<int>("point physical tag");
      }
      auto read_entities = [&](long count, int dim, std::map<int, std::vector<int>>* out) {
        for (long i = 0; i < count; ++i) {
          const int tag = tok.next<int>("entity tag");
          for (int k = 0; k < 6; ++k) tok.next<double>("bounding box");
          const int nphys = tok.next<int>("physical count");
          for (int k = 0; k < nphys; ++k) {
            const int p = tok.next<int>("physical tag");
            if (out) (*out)[tag].push_back(p);
          }
          const int nbound = tok.next<int>("bounding entity count");
          for (int k = 0; k < nbound; ++k) tok.next<int>("bounding entity tag");
        }
        (void)dim;
      };
      read_entities(nc, 1, &curve_physicals);
      read_entities(ns, 2, &surface_physicals);
      read_entities(nv, 3, nullptr);
      tok.skip_to_end(name);
    } else if (name == "Nodes") {
      const long blocks = tok.next<long>("node block count");
      const long total = tok.next<long>("node count");
      tok.next<long>("min node tag");
      tok.next<long>("max node tag");
      nodes.reserve(static_cast<std::size_t>(total));
      for (long b = 0; b < blocks; ++b) {
        const int dim = tok.next<int>("entity dimension");
        tok.next<int>("entity tag");
        const int parametric = tok.next<int>("parametric flag");
        const long count = tok.next<long>("block node count");
        std::vector<long> tags(static_cast<std::size_t>(count));
        for (auto& t : tags) t = tok.next<long>("node tag");
        for (long t : tags) {
          const double x = tok.next<double>("x"), y = tok.next<double>("y");
          tok.next<double>("z");
          for (int k = 0; parametric && k < dim; ++k) tok.next<double>("parametric coordinate");
          if (!node_index.emplace(t, static_cast<int>(nodes.size())).second) {
            throw GeometryError("msh: duplicate node tag " + std::to_string(t));
          }
          nodes.push_back({x, y});
        }
      }
      tok.skip_to_end(name);
    } else if (name == "Elements") {
      const long blocks = tok.next<long>("element block count");
      tok.next<long>("element count");
      tok.next<long>("min element tag");
      tok.next<long>("max element tag");
      for (long b = 0; b < blocks; ++b) {
        RawElement proto;
        proto.entity_dim = tok.next<int>("entity dimension");
        proto.entity_tag = tok.next<int>("entity tag");
        proto.type = tok.next<int>("element type");
        const long count = tok.next<long>("block element count");
        const int nn = nodes_for_type(proto.type);
        if (nn < 0) {
          throw GeometryError("msh: unsupported element type " + std::to_string(proto.type));
        }
        for (long i = 0; i < count; ++i) {
          RawElement el = proto;
          tok.next<long>("element tag");
          el.nodes.resize(static_cast<std::size_t>(nn));
          for (auto& v : el.nodes) v = tok.next<long>("element node");
          elements.push_back(std::move(el));
        }
      }
      tok.skip_to_end(name);
    } else {
      tok.skip_to_end(name);
    }
  }
  if (!seen_format) throw GeometryError("msh: missing $MeshFormat");
  if (nodes.empty()) throw GeometryError("msh: no nodes");

  auto index_of = [&](long tag) {
    auto it = node_index.find(tag);
    if (it == node_index.end()) throw GeometryError("msh: unknown node tag " + std::to_string(tag));
    return it->second;
  };

  // Surface physical groups become regions in tag order.
  std::set<int> surface_tags;
  for (const auto& [entity, phys] : surface_physicals)
    for (int p : phys) surface_tags.insert(p);
  std::map<int, int> region_of_physical;
  for (int p : surface_tags) region_of_physical.emplace(p, static_cast<int>(region_of_physical.size()));

  Mesh mesh;
  mesh.order = 0;
  std::map<int, std::vector<Point>> pore_points;
  std::vector<std::pair<BoundaryEdge, int>> pore_edges;  // edge, pore label from the file
  std::set<int> pore_labels;
  for (const RawElement& el : elements) {
    if (el.type == 2 || el.type == 9) {
      const int order = el.type == 2 ? 1 : 2;
      if (mesh.order != 0 && mesh.order != order) {
        throw GeometryError("msh: mixed triangle orders are not supported");
      }
      mesh.order = order;
      std::array<int, kMaxElementNodes> cell{-1, -1, -1, -1, -1, -1};
      for (std::size_t a = 0; a < el.nodes.size(); ++a) cell[a] = index_of(el.nodes[a]);
      if (signed_area(nodes[cell[0]], nodes[cell[1]], nodes[cell[2]]) < 0.0) {
        std::swap(cell[1], cell[2]);
        if (order == 2) std::swap(cell[3], cell[5]);
      }
      mesh.cells.push_back(cell);
      int region = 0;
      if (auto it = surface_physicals.find(el.entity_tag); it != surface_physicals.end() &&
                                                            !it->second.empty()) {
        region = region_of_physical.at(it->second.front());
      }
      mesh.regions.push_back(region);
    } else if (el.type == 1 || el.type == 8) {
      auto it = curve_physicals.find(el.entity_tag);
      if (it == curve_physicals.end()) continue;
      for (int p : it->second) {
        auto nit = physical_names.find({1, p});
        if (nit == physical_names.end()) continue;
        const std::string& label = nit->second;
        BoundaryEdge be;
        for (std::size_t a = 0; a < el.nodes.size(); ++a) be.nodes[a] = index_of(el.nodes[a]);
        if (label == "left") {
          be.kind = BoundaryKind::left;
        } else if (label == "right") {
          be.kind = BoundaryKind::right;
        } else if (label == "bottom") {
          be.kind = BoundaryKind::bottom;
        } else if (label == "top") {
          be.kind = BoundaryKind::top;
        } else if (label.rfind("pore_", 0) == 0) {
          int k = -1;
          try {
            k = std::stoi(label.substr(5));
          } catch (const std::exception&) {
            throw GeometryError("msh: malformed pore group name '" + label + "'");
          }
          be.kind = BoundaryKind::pore;
          pore_labels.insert(k);
          for (int v : be.nodes)
            if (v >= 0) pore_points[k].push_back(nodes[v]);
          pore_edges.emplace_back(be, k);
          continue;
        } else {
          continue;
        }
        mesh.boundary.push_back(be);
      }
    }
  }
  if (mesh.cells.empty()) throw GeometryError("msh: no triangles");

  // Pore labels are renumbered densely in label order.
  std::map<int, int> pore_index;
  for (int k : pore_labels) {
    pore_index.emplace(k, static_cast<int>(mesh.pores.size()));
    if (pore_points[k].size() < 3) {
      throw GeometryError("msh: pore_" + std::to_string(k) + " has fewer than three nodes");
    }
    Pore pore = fit_circle(pore_points[k]);
    // Keep every boundary node on or outside the fitted circle.
    for (const Point& p : pore_points[k]) pore.radius = std::min(pore.radius, distance(p, pore.center));
    mesh.pores.push_back(pore);
  }
  for (auto& [be, k] : pore_edges) {
    be.pore = pore_index.at(k);
    mesh.boundary.push_back(be);
  }

  BoundingBox box;
  for (const Point& p : nodes) box.add(p);
  const double width = box.hi[0] - box.lo[0];
  const double height = box.hi[1] - box.lo[1];
  if (!(width > 0.0) || std::abs(width - height) > 1e-9 * width) {
    throw GeometryError("msh: node bounding box is not a square");
  }
  mesh.cell = Square{{0.5 * (box.lo[0] + box.hi[0]), 0.5 * (box.lo[1] + box.hi[1])}, width};
  mesh.nodes = std::move(nodes);

  validate_mesh(mesh);
  mesh.periodic = periodic_pairs(mesh, pairing_tolerance * width);
  return mesh;
}

nlohmann::json mesh_to_json(const Mesh& mesh) {
  nlohmann::json j;
  j["order"] = mesh.order;
  j["cell"] = {{"center", {mesh.cell.center.x, mesh.cell.center.y}},
               {"edge_length", mesh.cell.edge_length}};
  j["pores"] = nlohmann::json::array();
  for (const Pore& p : mesh.pores)
    j["pores"].push_back({{"center", {p.center.x, p.center.y}}, {"radius", p.radius}});
  j["nodes"] = nlohmann::json::array();
  for (const Point& p : mesh.nodes) j["nodes"].push_back({p.x, p.y});
  j["cells"] = nlohmann::json::array();
  for (const auto& c : mesh.cells)
    j["cells"].push_back(std::vector<int>(c.begin(), c.begin() + mesh.nodes_per_cell()));
  j["regions"] = mesh.regions;
  j["boundary"] = nlohmann::json::array();
  for (const auto& be : mesh.boundary) {
    nlohmann::json e{{"kind", to_string(be.kind)},
                     {"nodes", std::vector<int>(be.nodes.begin(),
                                                be.nodes.begin() + (mesh.order == 1 ? 2 : 3))}};
    if (be.kind == BoundaryKind::pore) e["pore"] = be.pore;
    j["boundary"].push_back(e);
  }
  j["periodic_master"] = mesh.periodic.master;
  return j;
}

}  // namespace thermohom
