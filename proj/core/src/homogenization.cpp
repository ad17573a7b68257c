#include "thermohom/homogenization.hpp"

#include "thermohom/errors.hpp"

#include <cmath>

namespace thermohom {
namespace {

constexpr int pair_index(int a, int b) { return a * 2 + b; }
constexpr int triple_index(int a, int b, int c) { return (a * 2 + b) * 2 + c; }

Tensor2 gradient_tensor(const FieldPoint& f) {
  Tensor2 g;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) g(i, j) = f.grad[i][j];
  return g;
}

// Three-point Gauss rule on [0, 1].
constexpr std::array<std::pair<double, double>, 3> kEdgeRule{{
    {0.5 - 0.3872983346207417, 5.0 / 18.0},
    {0.5, 8.0 / 18.0},
    {0.5 + 0.3872983346207417, 5.0 / 18.0},
}};

// oint over pore edges of f_i n_j, with n pointing from the solid into the pore.
std::array<std::array<double, 2>, 2> pore_flux(const Mesh& mesh, const Eigen::VectorXd& field,
                                                int components) {
  std::array<std::array<double, 2>, 2> out{};
  for (const auto& be : mesh.boundary) {
    if (be.kind != BoundaryKind::pore) continue;
    const int n = mesh.order == 1 ? 2 : 3;
    const Point center = mesh.pores.at(static_cast<std::size_t>(be.pore)).center;
    for (const auto& [s, w] : kEdgeRule) {
      std::array<double, 3> N{}, dN{};
      if (n == 2) {
        N = {1.0 - s, s, 0.0};
        dN = {-1.0, 1.0, 0.0};
      } else {
        N = {(1.0 - s) * (1.0 - 2.0 * s), s * (2.0 * s - 1.0), 4.0 * s * (1.0 - s)};
        dN = {4.0 * s - 3.0, 4.0 * s - 1.0, 4.0 - 8.0 * s};
      }
      Point x, t;
      std::array<double, 2> f{};
      for (int a = 0; a < n; ++a) {
        const Point p = mesh.nodes[be.nodes[a]];
        x = x + N[a] * p;
        t = t + dN[a] * p;
        for (int i = 0; i < components; ++i) f[i] += N[a] * field[be.nodes[a] * components + i];
      }
      Point normal{t.y, -t.x};  // |normal| = ds / d s
      if (normal.x * (center.x - x.x) + normal.y * (center.y - x.y) < 0.0) normal = -1.0 * normal;
      for (int i = 0; i < components; ++i) {
        out[i][0] += w * f[i] * normal.x;
        out[i][1] += w * f[i] * normal.y;
      }
    }
  }
  return out;
}

// Max entry of (1/V)[int grad f - oint_pores f n] and the max |grad f| seen.
std::pair<double, double> periodic_gradient_mean(const Mesh& mesh, const Eigen::VectorXd& field,
                                                 int components) {
  std::array<std::array<double, 2>, 2> integral{};
  double scale = 0.0;
  const auto rule = triangle_rule(mesh.order);
  for (std::size_t e = 0; e < mesh.num_cells(); ++e) {
    const auto coords = mesh.cell_coordinates(e);
    const std::span<const Point> cs(coords.data(), static_cast<std::size_t>(mesh.nodes_per_cell()));
    for (const auto& qp : rule) {
      const ElementPoint p = map_point(cs, mesh.order, qp);
      const FieldPoint f = evaluate_field(mesh, field, components, e, p);
      for (int i = 0; i < components; ++i)
        for (int j = 0; j < 2; ++j) {
          integral[i][j] += p.jxw * f.grad[i][j];
          scale = std::max(scale, std::abs(f.grad[i][j]));
        }
    }
  }
  const auto surface = pore_flux(mesh, field, components);
  double worst = 0.0;
  for (int i = 0; i < components; ++i)
    for (int j = 0; j < 2; ++j)
      worst = std::max(worst, std::abs(integral[i][j] - surface[i][j]) / mesh.cell.area());
  return {worst, scale};
}

double relative(double value, double scale) { return scale > 0.0 ? value / scale : value; }

// Relative to max(|m|, reference) so that round-off sized matrices read as symmetric.
template <typename M>
double asymmetry(const M& m, double reference = 0.0) {
  const double n = std::max(m.norm(), reference);
  return n > 0.0 ? (m - m.transpose()).norm() / n : 0.0;
}

}  // namespace

CorrectorFields::CorrectorFields(const Mesh& mesh, const MaterialTable& materials,
                                 const CellSolutions& solutions)
    : mesh_(&mesh), materials_(&materials), solutions_(&solutions) {}

CorrectorPoint CorrectorFields::evaluate(std::size_t cell, std::size_t qp) const {
  const Mesh& mesh = *mesh_;
  const CellSolutions& s = *solutions_;
  const auto coords = mesh.cell_coordinates(cell);
  const std::span<const Point> cs(coords.data(), static_cast<std::size_t>(mesh.nodes_per_cell()));
  const ElementPoint p = map_point(cs, mesh.order, rule()[qp]);

  CorrectorPoint out;
  const int region = mesh.regions.empty() ? 0 : mesh.regions[cell];
  if (region < 0 || static_cast<std::size_t>(region) >= materials_->size()) {
    throw ConfigError("no material for region " + std::to_string(region));
  }
  out.material = &(*materials_)[static_cast<std::size_t>(region)];
  out.y = p.x - mesh.cell.center;
  out.jxw = p.jxw;
  out.Z = gradient_tensor(evaluate_field(mesh, s.P, 2, cell, p));

  const double y[2] = {out.y.x, out.y.y};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const FieldPoint phi = evaluate_field(mesh, s.phi_of(a, b), 2, cell, p);
      Tensor2& L = out.L[pair_index(a, b)];
      L = gradient_tensor(phi);
      L(a, b) += 1.0;
      for (int c = 0; c < 2; ++c) {
        const FieldPoint psi = evaluate_field(mesh, s.psi_of(a, b, c), 2, cell, p);
        Tensor2& N = out.N[triple_index(a, b, c)];
        N = gradient_tensor(psi);
        for (int i = 0; i < 2; ++i) N(i, c) += phi.value[i];
        out.M[triple_index(a, b, c)] = y[c] * L + N;
      }
    }
  return out;
}

std::optional<KappaNormalization> kappa_normalization_from_string(const std::string& name) {
  if (name == "cell_average") return KappaNormalization::cell_average;
  if (name == "solid_average") return KappaNormalization::solid_average;
  return std::nullopt;
}

std::string to_string(KappaNormalization n) {
  return n == KappaNormalization::cell_average ? "cell_average" : "solid_average";
}

Tensor2 normalized_moment(const Mesh& mesh, double epsilon, MomentDomain domain) {
  return (epsilon * epsilon / mesh.cell.area()) * volume_moment(mesh, domain);
}

MechanicalParameters homogenize_mechanical(const CorrectorFields& fields, const Tensor2& moment,
                                           double epsilon) {
  MechanicalParameters out;
  const double V = fields.mesh().cell.area();
  fields.for_each([&](const CorrectorPoint& q) {
    const Tensor4& C = q.material->C;
    std::array<Tensor2, 4> CL;
    std::array<Tensor2, 8> CM;
    for (int ab = 0; ab < 4; ++ab) CL[ab] = contract(C, q.L[ab]);
    for (int abc = 0; abc < 8; ++abc) CM[abc] = contract(C, q.M[abc]);
    const double w = q.jxw / V;
    for (int ab = 0; ab < 4; ++ab) {
      for (int cd = 0; cd < 4; ++cd) out.C[ab * 4 + cd] += w * double_dot(q.L[ab], CL[cd]);
      for (int cde = 0; cde < 8; ++cde)
        out.G[ab * 8 + cde] += epsilon * w * double_dot(CL[ab], q.M[cde]);
    }
    for (int abc = 0; abc < 8; ++abc)
      for (int def = 0; def < 8; ++def)
        out.D_bar[abc * 8 + def] += epsilon * epsilon * w * double_dot(q.M[abc], CM[def]);
  });
  out.D = out.D_bar;
  for (std::size_t f = 0; f < Tensor6::kSize; ++f) {
    const auto [a, b, c, d, e, g] = Tensor6::indices(f);
    out.D[f] -= out.C(a, b, d, e) * moment(c, g);
  }
  return out;
}

ThermalParameters homogenize_thermal(const CorrectorFields& fields, double epsilon) {
  ThermalParameters out;
  const double V = fields.mesh().cell.area();
  fields.for_each([&](const CorrectorPoint& q) {
    const RegionMaterial& m = *q.material;
    const Tensor2 CZ = contract(m.C, q.Z);
    const double w = q.jxw / V;
    for (int ab = 0; ab < 4; ++ab)
      out.beta[ab] += w * (double_dot(q.L[ab], CZ) - double_dot(m.beta, q.L[ab]));
    for (int abc = 0; abc < 8; ++abc)
      out.gamma[abc] -= epsilon * w * (double_dot(q.M[abc], CZ) - double_dot(m.beta, q.M[abc]));
    out.a -= w * (double_dot(q.Z, CZ) - 2.0 * double_dot(m.beta, q.Z) - m.a);
    out.c += w * m.c;
  });
  return out;
}

Tensor2 homogenize_conduction(const Mesh& mesh, const MaterialTable& materials,
                              const std::array<Eigen::VectorXd, 2>& R, KappaNormalization n) {
  Tensor2 integral;
  double solid = 0.0;
  const auto rule = triangle_rule(mesh.order);
  for (std::size_t e = 0; e < mesh.num_cells(); ++e) {
    const int region = mesh.regions.empty() ? 0 : mesh.regions[e];
    if (region < 0 || static_cast<std::size_t>(region) >= materials.size()) {
      throw ConfigError("no material for region " + std::to_string(region));
    }
    const Tensor2& kappa = materials[static_cast<std::size_t>(region)].kappa;
    const auto coords = mesh.cell_coordinates(e);
    const std::span<const Point> cs(coords.data(), static_cast<std::size_t>(mesh.nodes_per_cell()));
    for (const auto& qp : rule) {
      const ElementPoint p = map_point(cs, mesh.order, qp);
      solid += p.jxw;
      for (int j = 0; j < 2; ++j) {
        const FieldPoint r = evaluate_field(mesh, R[j], 1, e, p);
        for (int i = 0; i < 2; ++i) {
          double s = kappa(i, j);
          for (int q = 0; q < 2; ++q) s -= kappa(i, q) * r.grad[0][q];
          integral(i, j) += p.jxw * s;
        }
      }
    }
  }
  switch (n) {
    case KappaNormalization::cell_average: return (1.0 / mesh.cell.area()) * integral;
    case KappaNormalization::solid_average: return (1.0 / solid) * integral;
  }
  throw ConfigError("unknown conductivity normalization");
}

HomogenizedParameters homogenize(const Mesh& mesh, const MaterialTable& materials,
                                 const CellSolutions& solutions,
                                 const HomogenizationOptions& options) {
  if (!(options.epsilon > 0.0)) throw ConfigError("homothetic ratio must be positive");
  const CorrectorFields fields(mesh, materials, solutions);
  HomogenizedParameters h;
  h.epsilon = options.epsilon;
  h.edge_length = mesh.cell.edge_length;
  h.moment_domain = options.moment_domain;
  h.moment = normalized_moment(mesh, options.epsilon, options.moment_domain);
  const MechanicalParameters mech = homogenize_mechanical(fields, h.moment, options.epsilon);
  h.C = mech.C;
  h.G = mech.G;
  h.D = mech.D;
  const ThermalParameters th = homogenize_thermal(fields, options.epsilon);
  h.beta = th.beta;
  h.gamma = th.gamma;
  h.a = th.a;
  h.c = th.c;
  h.rho = solutions.first_pass.rho;
  h.kappa_cell = homogenize_conduction(mesh, materials, solutions.R, KappaNormalization::cell_average);
  h.kappa_solid =
      homogenize_conduction(mesh, materials, solutions.R, KappaNormalization::solid_average);
  h.normalization = options.normalization;
  return h;
}

AveragingChecks averaging_checks(const Mesh& mesh, const CellSolutions& s,
                                 const HomogenizedParameters& h) {
  AveragingChecks out;
  for (const auto& phi : s.phi)
    out.L_minus_identity = std::max(out.L_minus_identity, periodic_gradient_mean(mesh, phi, 2).first);
  const auto [z, zscale] = periodic_gradient_mean(mesh, s.P, 2);
  out.Z = relative(z, zscale);
  for (const auto& r : s.R) {
    const auto [g, gscale] = periodic_gradient_mean(mesh, r, 1);
    out.grad_R = std::max(out.grad_R, relative(g, gscale));
  }
  for (const auto& psi : s.psi) {
    const auto [g, gscale] = periodic_gradient_mean(mesh, psi, 2);
    out.grad_psi = std::max(out.grad_psi, relative(g, gscale));
  }
  // Voigt matrices are read directly so that the check does not depend on
  // the packing's own symmetry guard.
  Matrix3 C;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      C(r, c) = h.C(kPairs[r].a, kPairs[r].b, kPairs[c].a, kPairs[c].b);
  Matrix6 D;
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) {
      const Triple& p = kTriples[r];
      const Triple& q = kTriples[c];
      D(r, c) = h.D(p.a, p.b, p.c, q.a, q.b, q.c);
    }
  out.C_symmetry = asymmetry(C);
  const double length = h.epsilon * h.edge_length;
  out.D_symmetry = asymmetry(D, C.norm() * length * length);
  return out;
}

PackedParameters voigt_pack(const HomogenizedParameters& h) {
  PackedParameters p;
  const double length = h.epsilon * h.edge_length;
  p.C = pack_stiffness(h.C);
  p.G = pack_coupling(h.G, h.C.max_abs() * length);
  p.D = pack_gradient_stiffness(h.D, h.C.max_abs() * length * length);
  p.beta = pack2(h.beta);
  p.gamma = pack_gradient_thermal(h.gamma, h.beta.max_abs() * length);
  p.kappa_cell = pack2(h.kappa_cell);
  p.kappa_solid = pack2(h.kappa_solid);
  p.moment = pack2(h.moment);
  return p;
}

}  // namespace thermohom
