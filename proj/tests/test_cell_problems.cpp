#include "thermohom/cell_problems.hpp"
#include "thermohom/errors.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

using namespace thermohom;

namespace {

MaterialTable aluminium_table() { return {RegionMaterial::from(aluminium())}; }

// Node at the point reflection of each node about the cell centre, or -1.
std::vector<int> reflected_nodes(const Mesh& m) {
  std::map<std::pair<long long, long long>, int> index;
  auto key = [](Point p) { return std::make_pair(std::llround(p.x * 1e9), std::llround(p.y * 1e9)); };
  for (std::size_t n = 0; n < m.num_nodes(); ++n) index[key(m.nodes[n])] = static_cast<int>(n);
  std::vector<int> out(m.num_nodes(), -1);
  for (std::size_t n = 0; n < m.num_nodes(); ++n) {
    const Point q = 2.0 * m.cell.center - m.nodes[n];
    const auto it = index.find(key(q));
    if (it != index.end()) out[n] = it->second;
  }
  return out;
}

}  // namespace

TEST(CellProblems, HomogeneousCorrectorsVanish) {
  const Mesh m = generate_mesh(make_preset(Preset::homogeneous), 8, 2);
  const CellSolutions s = solve_cell_problems(m, aluminium_table());
  for (const auto& f : s.phi) EXPECT_LT(f.lpNorm<Eigen::Infinity>(), 1e-12);
  EXPECT_LT(s.P.lpNorm<Eigen::Infinity>(), 1e-15);
  for (const auto& f : s.psi) EXPECT_LT(f.lpNorm<Eigen::Infinity>(), 1e-12);
  for (const auto& f : s.R) EXPECT_LT(f.lpNorm<Eigen::Infinity>(), 1e-12);
  EXPECT_EQ(s.solves.size(), 12u);
}

TEST(CellProblems, FirstPassOfHomogeneousCell) {
  const Mesh m = generate_mesh(make_preset(Preset::homogeneous), 4, 1);
  const CellSolutions s = solve_cell_problems(m, aluminium_table());
  const RegionMaterial a = aluminium_table()[0];
  for (std::size_t f = 0; f < Tensor4::kSize; ++f) EXPECT_NEAR(s.first_pass.C[f], a.C[f], 1e-9);
  EXPECT_NEAR(s.first_pass.beta(0, 0), -a.beta(0, 0), 1e-12);
  EXPECT_NEAR(s.first_pass.rho, 2700.0, 1e-9);
}

// Two strips x < 1/2 and x > 1/2 with kappa_2 = 10 kappa_1: dR_1/dx = 1 -
// kappa_h / kappa(x) with kappa_h the harmonic mean, and R_2 = 0.
TEST(CellProblems, LaminateConductionCorrector) {
  Mesh m = generate_mesh(make_preset(Preset::homogeneous), 8, 1);
  assign_regions(m, [](Point p) { return p.x < 0.5 ? 0 : 1; });
  MicroMaterial soft, hard;
  soft.kappa = 10.0;
  hard.kappa = 100.0;
  const MaterialTable mats{RegionMaterial::from(soft), RegionMaterial::from(hard)};
  const CellSystem conduction(m, mats, Operator::conduction);
  const auto R = solve_R(conduction);
  const double harmonic = 2.0 / (1.0 / 10.0 + 1.0 / 100.0);
  const auto rule = triangle_rule(1);
  for (std::size_t e = 0; e < m.num_cells(); ++e) {
    const auto coords = m.cell_coordinates(e);
    const ElementPoint p = map_point(std::span<const Point>(coords.data(), 3), 1, rule[0]);
    const double k = m.regions[e] == 0 ? 10.0 : 100.0;
    const FieldPoint r1 = evaluate_field(m, R[0], 1, e, p);
    EXPECT_NEAR(r1.grad[0][0], 1.0 - harmonic / k, 1e-10);
    EXPECT_NEAR(r1.grad[0][1], 0.0, 1e-10);
  }
  EXPECT_LT(R[1].lpNorm<Eigen::Infinity>(), 1e-12);
}

// Point reflection y -> -y maps a centrosymmetric cell onto itself. The
// constant-load problems (phi, P, R) then have odd solutions, while psi,
// driven by the odd phi, is even.
TEST(CellProblems, ParityUnderPointReflection) {
  const Mesh m = generate_mesh(make_preset(Preset::single), 16, 2);
  const CellSolutions s = solve_cell_problems(m, aluminium_table());
  const auto mirror = reflected_nodes(m);
  std::size_t matched = 0;
  for (std::size_t n = 0; n < m.num_nodes(); ++n) {
    const int q = mirror[n];
    if (q < 0) continue;
    ++matched;
    for (int c = 0; c < 2; ++c) {
      const auto i = static_cast<Eigen::Index>(2 * n + c);
      const auto j = static_cast<Eigen::Index>(2 * q + c);
      for (const auto& f : s.phi) EXPECT_NEAR(f[i], -f[j], 1e-9 * f.lpNorm<Eigen::Infinity>());
      EXPECT_NEAR(s.P[i], -s.P[j], 1e-9 * s.P.lpNorm<Eigen::Infinity>());
      for (const auto& f : s.psi) EXPECT_NEAR(f[i], f[j], 1e-9 * f.lpNorm<Eigen::Infinity>());
    }
    for (const auto& f : s.R) {
      EXPECT_NEAR(f[static_cast<Eigen::Index>(n)], -f[q], 1e-9 * f.lpNorm<Eigen::Infinity>());
    }
  }
  EXPECT_GT(matched, m.num_nodes() / 2);
}

TEST(CellProblems, SolvabilityAndResidualsOnPresets) {
  for (Preset p : {Preset::single, Preset::uniform4}) {
    const Mesh m = generate_mesh(make_preset(p), 16, 2);
    const CellSolutions s = solve_cell_problems(m, aluminium_table());
    for (double v : s.solvability) EXPECT_LT(v, kSolvabilityTolerance) << to_string(p);
    for (const auto& log : s.solves) {
      EXPECT_LT(log.residual, 1e-10) << log.name;
      EXPECT_LT(log.mean_residual, 1e-10) << log.name;
    }
  }
}

TEST(CellProblems, AliasesShareStorage) {
  const Mesh m = generate_mesh(make_preset(Preset::homogeneous), 4, 1);
  const CellSolutions s = solve_cell_problems(m, aluminium_table());
  EXPECT_EQ(&s.phi_of(0, 1), &s.phi_of(1, 0));
  EXPECT_EQ(&s.psi_of(0, 1, 1), &s.psi_of(1, 0, 1));
  EXPECT_NE(&s.psi_of(0, 1, 0), &s.psi_of(0, 1, 1));
}

TEST(CellProblems, FieldDumpsHaveOneRowPerNode) {
  const Mesh m = generate_mesh(make_preset(Preset::single), 8, 1);
  const CellSolutions s = solve_cell_problems(m, aluminium_table());
  std::ostringstream csv;
  write_fields_csv(csv, m, s);
  const std::string text = csv.str();
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), m.num_nodes() + 1);
  EXPECT_EQ(fields_to_json(m, s).at("fields").at("P").at("values").size(), 2 * m.num_nodes());
}
