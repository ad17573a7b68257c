#include "thermohom/cell_problems.hpp"

#include "thermohom/errors.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace thermohom {
namespace {

const RegionMaterial& material_at(const Mesh& mesh, const MaterialTable& materials,
                                  std::size_t cell) {
  const int region = mesh.regions.empty() ? 0 : mesh.regions[cell];
  if (region < 0 || static_cast<std::size_t>(region) >= materials.size()) {
    throw ConfigError("no material for region " + std::to_string(region));
  }
  return materials[static_cast<std::size_t>(region)];
}

std::string pair_name(int a, int b) { return std::to_string(a + 1) + std::to_string(b + 1); }

std::string triple_name(const Triple& t) { return pair_name(t.a, t.b) + std::to_string(t.c + 1); }

void record(std::vector<SolveLog>* log, std::string name, const SolveReport& r) {
  if (log) log->push_back({std::move(name), r.residual, r.mean_residual});
}

// L_abkl = delta_ak delta_bl + d phi_abk / d y_l
Tensor2 L_of(const FieldPoint& phi, int a, int b) {
  Tensor2 L;
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) L(k, l) = kronecker(a, k) * kronecker(b, l) + phi.grad[k][l];
  return L;
}

}  // namespace

CellSystem::CellSystem(const Mesh& mesh, const MaterialTable& materials, Operator kind)
    : mesh_(&mesh),
      materials_(&materials),
      dofs_(mesh, kind == Operator::elasticity ? 2 : 1),
      solver_(reduce_periodic(assemble_bilinear(mesh, materials, kind), dofs_), dofs_,
              node_weights(mesh), true) {}

CellSystem::Result CellSystem::solve(const LoadFunction& load) const {
  const Eigen::VectorXd full = assemble_linear(*mesh_, components(), load);
  Result r;
  for (Eigen::Index i = 0; i < full.size(); ++i) r.load_integral[i % components()] += full[i];
  r.field = dofs_.expand(solver_.solve(dofs_.fold(full), &r.report));
  return r;
}

FieldPoint evaluate_field(const Mesh& mesh, const Eigen::VectorXd& field, int components,
                          std::size_t cell, const ElementPoint& point) {
  FieldPoint out;
  const auto& nodes = mesh.cells[cell];
  for (int a = 0; a < mesh.nodes_per_cell(); ++a)
    for (int i = 0; i < components; ++i) {
      const double v = field[nodes[a] * components + i];
      out.value[i] += point.N[a] * v;
      out.grad[i][0] += point.dN[a][0] * v;
      out.grad[i][1] += point.dN[a][1] * v;
    }
  return out;
}

const Eigen::VectorXd& CellSolutions::phi_of(int a, int b) const {
  if (a == b) return phi[a == 0 ? 0 : 1];
  return phi[2];
}

const Eigen::VectorXd& CellSolutions::psi_of(int a, int b, int c) const {
  for (std::size_t t = 0; t < kTriples.size(); ++t) {
    const Triple& tr = kTriples[t];
    if (tr.c == c && ((tr.a == a && tr.b == b) || (tr.a == b && tr.b == a))) return psi[t];
  }
  throw Error("invalid psi index");
}

std::array<Eigen::VectorXd, 3> solve_phi(const CellSystem& elastic, std::vector<SolveLog>* log) {
  std::array<Eigen::VectorXd, 3> phi;
  const Mesh& mesh = elastic.mesh();
  for (std::size_t p = 0; p < kPairs.size(); ++p) {
    const auto [a, b] = kPairs[p];
    auto r = elastic.solve([&](std::size_t cell, const ElementPoint&) {
      const Tensor4& C = material_at(mesh, elastic.materials(), cell).C;
      PointLoad q;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) q.flux[i][j] = -C(i, j, a, b);
      return q;
    });
    record(log, "phi" + pair_name(a, b), r.report);
    phi[p] = std::move(r.field);
  }
  return phi;
}

Eigen::VectorXd solve_P(const CellSystem& elastic, std::vector<SolveLog>* log) {
  const Mesh& mesh = elastic.mesh();
  auto r = elastic.solve([&](std::size_t cell, const ElementPoint&) {
    const Tensor2& beta = material_at(mesh, elastic.materials(), cell).beta;
    PointLoad q;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) q.flux[i][j] = -beta(i, j);
    return q;
  });
  record(log, "P", r.report);
  return std::move(r.field);
}

FirstPass first_pass_macro(const Mesh& mesh, const MaterialTable& materials,
                           const std::array<Eigen::VectorXd, 3>& phi, const Eigen::VectorXd& P) {
  FirstPass out;
  const double V = mesh.cell.area();
  const auto rule = triangle_rule(mesh.order);
  for (std::size_t e = 0; e < mesh.num_cells(); ++e) {
    const RegionMaterial& m = material_at(mesh, materials, e);
    const auto coords = mesh.cell_coordinates(e);
    const std::span<const Point> cs(coords.data(), static_cast<std::size_t>(mesh.nodes_per_cell()));
    for (const auto& qp : rule) {
      const ElementPoint p = map_point(cs, mesh.order, qp);
      std::array<Tensor2, 4> L;  // index a * 2 + b
      std::array<Tensor2, 4> S;  // C : L
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const auto& f = phi[a == b ? static_cast<std::size_t>(a) : 2];
          L[a * 2 + b] = L_of(evaluate_field(mesh, f, 2, e, p), a, b);
          S[a * 2 + b] = contract(m.C, L[a * 2 + b]);
        }
      const FieldPoint Pp = evaluate_field(mesh, P, 2, e, p);
      Tensor2 Z;
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) Z(k, l) = Pp.grad[k][l];
      const Tensor2 CZ = contract(m.C, Z);
      for (int ab = 0; ab < 4; ++ab) {
        for (int cd = 0; cd < 4; ++cd)
          out.C[ab * 4 + cd] += p.jxw * double_dot(L[ab], S[cd]) / V;
        out.beta[ab] += p.jxw * (double_dot(L[ab], CZ) - double_dot(m.beta, L[ab])) / V;
      }
      out.rho += p.jxw * m.rho / V;
    }
  }
  return out;
}

std::array<Eigen::VectorXd, 6> solve_psi(const CellSystem& elastic,
                                         const std::array<Eigen::VectorXd, 3>& phi,
                                         const FirstPass& first, std::vector<SolveLog>* log,
                                         std::array<double, 6>* solvability) {
  const Mesh& mesh = elastic.mesh();
  const double V = mesh.cell.area();
  const double cnorm = first.C.norm();
  if (!(first.rho > 0.0)) throw SolverError("macroscale density must be positive");
  std::array<Eigen::VectorXd, 6> psi;
  for (std::size_t t = 0; t < kTriples.size(); ++t) {
    const auto [a, b, c] = kTriples[t];
    const auto& f = phi[a == b ? static_cast<std::size_t>(a) : 2];
    auto r = elastic.solve([&](std::size_t cell, const ElementPoint& p) {
      const RegionMaterial& m = material_at(mesh, elastic.materials(), cell);
      const FieldPoint ph = evaluate_field(mesh, f, 2, cell, p);
      const Tensor2 L = L_of(ph, a, b);
      PointLoad q;
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          double s = 0.0;
          for (int k = 0; k < 2; ++k) s += m.C(i, j, k, c) * ph.value[k];
          q.flux[i][j] = -s;
        }
        double s = 0.0;
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) s += m.C(i, c, k, l) * L(k, l);
        q.body[i] = s - m.rho / first.rho * first.C(i, c, a, b);
      }
      return q;
    });
    const double defect = std::hypot(r.load_integral[0], r.load_integral[1]) / (V * cnorm);
    if (solvability) (*solvability)[t] = defect;
    if (defect > kSolvabilityTolerance) {
      std::ostringstream msg;
      msg << "psi" << triple_name(kTriples[t]) << " load violates solvability (relative defect "
          << defect << ")";
      throw SolverError(msg.str());
    }
    record(log, "psi" + triple_name(kTriples[t]), r.report);
    psi[t] = std::move(r.field);
  }
  return psi;
}

std::array<Eigen::VectorXd, 2> solve_R(const CellSystem& conduction, std::vector<SolveLog>* log) {
  const Mesh& mesh = conduction.mesh();
  std::array<Eigen::VectorXd, 2> R;
  for (int j = 0; j < 2; ++j) {
    auto r = conduction.solve([&](std::size_t cell, const ElementPoint&) {
      const Tensor2& kappa = material_at(mesh, conduction.materials(), cell).kappa;
      PointLoad q;
      q.flux[0] = {kappa(0, j), kappa(1, j)};
      return q;
    });
    record(log, "R" + std::to_string(j + 1), r.report);
    R[j] = std::move(r.field);
  }
  return R;
}

CellSolutions solve_cell_problems(const Mesh& mesh, const MaterialTable& materials) {
  CellSolutions s;
  {
    const CellSystem elastic(mesh, materials, Operator::elasticity);
    s.phi = solve_phi(elastic, &s.solves);
    s.P = solve_P(elastic, &s.solves);
    s.first_pass = first_pass_macro(mesh, materials, s.phi, s.P);
    s.psi = solve_psi(elastic, s.phi, s.first_pass, &s.solves, &s.solvability);
  }
  const CellSystem conduction(mesh, materials, Operator::conduction);
  s.R = solve_R(conduction, &s.solves);
  return s;
}

namespace {

std::vector<std::pair<std::string, std::pair<const Eigen::VectorXd*, int>>> field_columns(
    const CellSolutions& s) {
  std::vector<std::pair<std::string, std::pair<const Eigen::VectorXd*, int>>> cols;
  for (std::size_t p = 0; p < kPairs.size(); ++p)
    cols.push_back({"phi" + pair_name(kPairs[p].a, kPairs[p].b), {&s.phi[p], 2}});
  cols.push_back({"P", {&s.P, 2}});
  for (std::size_t t = 0; t < kTriples.size(); ++t)
    cols.push_back({"psi" + triple_name(kTriples[t]), {&s.psi[t], 2}});
  for (int j = 0; j < 2; ++j) cols.push_back({"R" + std::to_string(j + 1), {&s.R[j], 1}});
  return cols;
}

}  // namespace

void write_fields_csv(std::ostream& os, const Mesh& mesh, const CellSolutions& s) {
  const auto cols = field_columns(s);
  os << "node,x,y";
  for (const auto& [name, f] : cols) {
    if (f.second == 1) {
      os << ',' << name;
    } else {
      os << ',' << name << "_1," << name << "_2";
    }
  }
  os << '\n';
  const auto old_precision = os.precision(std::numeric_limits<double>::max_digits10);
  for (std::size_t v = 0; v < mesh.num_nodes(); ++v) {
    os << v << ',' << mesh.nodes[v].x << ',' << mesh.nodes[v].y;
    for (const auto& [name, f] : cols)
      for (int i = 0; i < f.second; ++i) os << ',' << (*f.first)[static_cast<Eigen::Index>(v) * f.second + i];
    os << '\n';
  }
  os.precision(old_precision);
}

nlohmann::json fields_to_json(const Mesh& mesh, const CellSolutions& s) {
  nlohmann::json j;
  j["nodes"] = nlohmann::json::array();
  for (const Point& p : mesh.nodes) j["nodes"].push_back({p.x, p.y});
  j["fields"] = nlohmann::json::object();
  for (const auto& [name, f] : field_columns(s)) {
    j["fields"][name] = {{"components", f.second},
                         {"values", std::vector<double>(f.first->data(),
                                                        f.first->data() + f.first->size())}};
  }
  return j;
}

}  // namespace thermohom
