#include "thermohom/errors.hpp"
#include "thermohom/homogenization.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace thermohom;

namespace {

MaterialTable aluminium_table() { return {RegionMaterial::from(aluminium())}; }

struct CellRun {
  Mesh mesh;
  CellSolutions solutions;
  HomogenizedParameters h;
};

CellRun run(const RveSpec& spec, int resolution, int order, const HomogenizationOptions& o = {},
        const MaterialTable& mats = aluminium_table()) {
  CellRun r{generate_mesh(spec, resolution, order), {}, {}};
  if (mats.size() > 1) assign_regions(r.mesh, [](Point p) { return p.x < 0.5 ? 0 : 1; });
  r.solutions = solve_cell_problems(r.mesh, mats);
  r.h = homogenize(r.mesh, mats, r.solutions, o);
  return r;
}

RveSpec off_center_layout() {
  RveSpec spec;
  const double r = pore_radius_for_porosity(1.0, 0.2, 4);
  spec.pores = {{{0.25, 0.30}, r}, {{0.72, 0.22}, r}, {{0.30, 0.75}, r}, {{0.70, 0.68}, r}};
  return spec;
}

// Exact plane-stress laminate with the layer normal along x and volume
// fractions 1/2: series in the normal direction, with the in-plane
// correction for the along-layer stiffness.
Matrix3 laminate_oracle(const Tensor4& c1, const Tensor4& c2) {
  auto avg = [](double a, double b) { return 0.5 * (a + b); };
  const double inv11 = avg(1.0 / c1(0, 0, 0, 0), 1.0 / c2(0, 0, 0, 0));
  const double C11 = 1.0 / inv11;
  const double C12 = avg(c1(0, 0, 1, 1) / c1(0, 0, 0, 0), c2(0, 0, 1, 1) / c2(0, 0, 0, 0)) * C11;
  const double C22 = avg(c1(1, 1, 1, 1) - c1(0, 0, 1, 1) * c1(0, 0, 1, 1) / c1(0, 0, 0, 0),
                         c2(1, 1, 1, 1) - c2(0, 0, 1, 1) * c2(0, 0, 1, 1) / c2(0, 0, 0, 0)) +
                     C12 * C12 / C11;
  const double C33 = 1.0 / avg(1.0 / c1(0, 1, 0, 1), 1.0 / c2(0, 1, 0, 1));
  Matrix3 m = Matrix3::Zero();
  m << C11, C12, 0, C12, C22, 0, 0, 0, C33;
  return m;
}

}  // namespace

TEST(Homogenization, HomogeneousCellIsExact) {
  for (int order : {1, 2}) {
    const CellRun r = run(make_preset(Preset::homogeneous), 8, order);
    const PackedParameters p = voigt_pack(r.h);
    const Matrix3 C = pack_stiffness(plane_stress_stiffness(75000.0, 0.33));
    EXPECT_LT((p.C - C).norm(), 1e-10 * C.norm());
    EXPECT_NEAR(p.beta(0, 0), -75000.0 * 2.36e-5 / 0.67, 1e-12);
    EXPECT_NEAR(p.kappa_cell(0, 0), 247.0, 1e-10);
    EXPECT_NEAR(p.kappa_solid(1, 1), 247.0, 1e-10);
    EXPECT_NEAR(r.h.c, 0.9, 1e-12);
    EXPECT_NEAR(r.h.a, 0.00225, 1e-15);
    EXPECT_NEAR(r.h.rho, 2700.0, 1e-9);
    EXPECT_LT(r.h.G.norm(), 1e-8 * r.h.C.norm());
    EXPECT_LT(r.h.D.norm(), 1e-8 * r.h.C.norm());
    EXPECT_LT(r.h.gamma.norm(), 1e-8 * r.h.beta.norm());
  }
}

// D = D_bar - C x I vanishes for a homogeneous cell at any L and eps when
// I is the cell moment scaled by eps^2 / V.
TEST(Homogenization, HomogeneousDVanishesAtAnyScale) {
  RveSpec spec = make_preset(Preset::homogeneous, 2.0);
  HomogenizationOptions o;
  o.epsilon = 0.5;
  const CellRun r = run(spec, 8, 2, o);
  EXPECT_LT(r.h.D.norm(), 1e-8 * r.h.C.norm() * 1.0);
  EXPECT_GT(r.h.moment(0, 0), 0.0);
  EXPECT_NEAR(r.h.moment(0, 0), 0.25 * 4.0 / 12.0, 1e-14);
}

TEST(Homogenization, LaminateConductionMeans) {
  MicroMaterial soft, hard;
  soft.kappa = 24.7;
  hard.kappa = 247.0;
  const MaterialTable mats{RegionMaterial::from(soft), RegionMaterial::from(hard)};
  for (int order : {1, 2}) {
    const CellRun r = run(make_preset(Preset::homogeneous), 8, order, {}, mats);
    const double harmonic = 2.0 / (1.0 / 24.7 + 1.0 / 247.0);
    const double arithmetic = 0.5 * (24.7 + 247.0);
    EXPECT_NEAR(r.h.kappa_cell(0, 0), harmonic, 1e-9 * harmonic);
    EXPECT_NEAR(r.h.kappa_cell(1, 1), arithmetic, 1e-9 * arithmetic);
    EXPECT_NEAR(r.h.kappa_cell(0, 1), 0.0, 1e-9);
  }
}

TEST(Homogenization, LaminateElasticityClosedForm) {
  MicroMaterial m1, m2;
  m1.nu = m2.nu = 0.25;
  m2.E = 2.0 * m1.E;
  const MaterialTable mats{RegionMaterial::from(m1), RegionMaterial::from(m2)};
  const CellRun r = run(make_preset(Preset::homogeneous), 8, 2, {}, mats);
  const Matrix3 expected = laminate_oracle(mats[0].C, mats[1].C);
  const Matrix3 C = voigt_pack(r.h).C;
  EXPECT_LT((C - expected).norm(), 1e-9 * expected.norm()) << C << "\n" << expected;
  // the along-layer stiffness stays within 1% of the Voigt average here
  const double voigt = 0.5 * (mats[0].C(1, 1, 1, 1) + mats[1].C(1, 1, 1, 1));
  EXPECT_NEAR(C(1, 1), voigt, 0.01 * voigt);
}

TEST(Homogenization, SinglePoreMaxwellAndBounds) {
  const CellRun r = run(make_preset(Preset::single), 48, 2);
  const double maxwell = 247.0 * 0.8 / 1.2;
  EXPECT_NEAR(r.h.kappa_cell(0, 0), maxwell, 0.03 * maxwell);
  EXPECT_LT(r.h.kappa_cell(0, 0), 0.8 * 247.0);
  // normalised by the meshed solid area, which is 0.8 up to the chord error
  const double solid = solid_volume(r.mesh) / r.mesh.cell.area();
  EXPECT_NEAR(solid, 0.8, 1e-5);
  EXPECT_NEAR(r.h.kappa_solid(0, 0), r.h.kappa_cell(0, 0) / solid, 1e-10);
  EXPECT_NEAR(r.h.c, 0.72, 1e-6);
  EXPECT_NEAR(r.h.rho, 0.8 * 2700.0, 1e-3);
  // isotropy of the square symmetric layout
  EXPECT_NEAR(r.h.C(0, 0, 0, 0), r.h.C(1, 1, 1, 1), 1e-9 * r.h.C.max_abs());
}

TEST(Homogenization, CentrosymmetricCellsHaveNoOddTensors) {
  for (Preset p : {Preset::single, Preset::uniform4}) {
    const CellRun r = run(make_preset(p), 32, 2);
    EXPECT_LT(r.h.gamma.norm(), 1e-6 * r.h.beta.norm()) << to_string(p);
    EXPECT_LT(r.h.G.norm(), 1e-2 * r.h.D.norm()) << to_string(p);
  }
}

TEST(Homogenization, MirrorSymmetricCellDecouplesShear) {
  RveSpec spec;
  spec.pores = {{{0.3, 0.5}, 0.12}, {{0.72, 0.5}, 0.08}};
  const CellRun r = run(spec, 50, 2);
  const double scale = r.h.C.max_abs();
  EXPECT_LT(std::abs(r.h.C(0, 0, 0, 1)), 1e-8 * scale);
  EXPECT_LT(std::abs(r.h.C(1, 1, 0, 1)), 1e-8 * scale);
  EXPECT_LT(std::abs(r.h.beta(0, 1)), 1e-8 * r.h.beta.max_abs());
}

TEST(Homogenization, AnisotropicLayoutCouplesEverything) {
  const CellRun r = run(off_center_layout(), 32, 2);
  EXPECT_GT(std::abs(r.h.C(0, 0, 0, 1)), 1.0);
  EXPECT_GT(std::abs(r.h.beta(0, 1)), 1e-4);
  EXPECT_GT(r.h.gamma.norm(), 1e-3);
  EXPECT_GT(r.h.G.norm(), 1.0);
}

TEST(Homogenization, EpsilonScaling) {
  const RveSpec spec = off_center_layout();
  CellRun base{generate_mesh(spec, 24, 2), {}, {}};
  base.solutions = solve_cell_problems(base.mesh, aluminium_table());
  const MaterialTable mats = aluminium_table();
  HomogenizationOptions o1, o2;
  o2.epsilon = 3.0;
  const HomogenizedParameters h1 = homogenize(base.mesh, mats, base.solutions, o1);
  const HomogenizedParameters h2 = homogenize(base.mesh, mats, base.solutions, o2);
  for (std::size_t f = 0; f < Tensor5::kSize; ++f) EXPECT_NEAR(h2.G[f], 3.0 * h1.G[f], 1e-9 * h1.G.max_abs());
  for (std::size_t f = 0; f < Tensor6::kSize; ++f) EXPECT_NEAR(h2.D[f], 9.0 * h1.D[f], 1e-9 * h1.D.max_abs());
  for (std::size_t f = 0; f < Tensor3::kSize; ++f)
    EXPECT_NEAR(h2.gamma[f], 3.0 * h1.gamma[f], 1e-9 * h1.gamma.max_abs());
  for (std::size_t f = 0; f < Tensor4::kSize; ++f) EXPECT_EQ(h2.C[f], h1.C[f]);
  EXPECT_EQ(h2.a, h1.a);
  EXPECT_EQ(h2.c, h1.c);
  EXPECT_EQ(h2.kappa_solid(0, 0), h1.kappa_solid(0, 0));
}

TEST(Homogenization, SymmetryAndAveragingChecks) {
  for (const RveSpec& spec : {make_preset(Preset::single), make_preset(Preset::uniform4), off_center_layout()}) {
    const CellRun r = run(spec, 32, 2);
    const AveragingChecks c = averaging_checks(r.mesh, r.solutions, r.h);
    EXPECT_LT(c.L_minus_identity, 1e-10);
    EXPECT_LT(c.Z, 1e-10);
    EXPECT_LT(c.grad_R, 1e-10);
    EXPECT_LT(c.grad_psi, 1e-10);
    EXPECT_LT(c.C_symmetry, 1e-10);
    EXPECT_LT(c.D_symmetry, 1e-10);
  }
}

TEST(Homogenization, DScalesWithPoreSize) {
  const CellRun single = run(make_preset(Preset::single), 48, 2);
  const CellRun uniform = run(make_preset(Preset::uniform4), 48, 2);
  const double ratio = uniform.h.D(0, 0, 0, 0, 0, 0) / single.h.D(0, 0, 0, 0, 0, 0);
  EXPECT_NEAR(ratio, 0.25, 0.0125);
}

TEST(Homogenization, KappaNormalizationSelects) {
  CellRun r = run(make_preset(Preset::single), 16, 1);
  r.h.normalization = KappaNormalization::cell_average;
  EXPECT_EQ(&r.h.kappa(), &r.h.kappa_cell);
  r.h.normalization = KappaNormalization::solid_average;
  EXPECT_EQ(&r.h.kappa(), &r.h.kappa_solid);
  EXPECT_EQ(kappa_normalization_from_string("cell_average"), KappaNormalization::cell_average);
  EXPECT_FALSE(kappa_normalization_from_string("volume").has_value());
}
