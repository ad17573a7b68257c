#include "thermohom/errors.hpp"
#include "thermohom/materials.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace thermohom;

TEST(Materials, PlaneStressStiffnessOfAluminium) {
  const Tensor4 c = plane_stress_stiffness(75000.0, 0.33);
  const double f = 75000.0 / (1.0 - 0.33 * 0.33);
  EXPECT_NEAR(c(0, 0, 0, 0), f, 1e-9);
  EXPECT_NEAR(c(0, 0, 1, 1), 0.33 * f, 1e-9);
  EXPECT_NEAR(c(0, 1, 0, 1), 0.5 * (1.0 - 0.33) * f, 1e-9);
  EXPECT_NEAR(c(0, 1, 0, 1), 28195.5, 0.05);
  // minor and major symmetry
  EXPECT_EQ(c(0, 1, 0, 1), c(1, 0, 0, 1));
  EXPECT_EQ(c(0, 0, 1, 1), c(1, 1, 0, 0));
}

TEST(Materials, ThermalStressIsIsotropic) {
  const MicroMaterial m = aluminium();
  const Tensor2 b = m.thermal_stress();
  EXPECT_NEAR(b(0, 0), 75000.0 * 2.36e-5 / (1.0 - 0.33), 1e-12);
  EXPECT_NEAR(b(0, 0), 2.64, 0.005);
  EXPECT_EQ(b(0, 1), 0.0);
  EXPECT_EQ(b(0, 0), b(1, 1));
}

TEST(Materials, HeatCapacityParameter) {
  EXPECT_DOUBLE_EQ(heat_capacity_parameter(0.9, 400.0), 0.00225);
  EXPECT_DOUBLE_EQ(heat_capacity_parameter(0.72, 400.0), 0.0018);
  EXPECT_THROW(heat_capacity_parameter(0.9, 0.0), ConfigError);
  EXPECT_DOUBLE_EQ(aluminium().heat_capacity_parameter(), 0.00225);
}

TEST(Materials, RejectsInadmissibleValues) {
  EXPECT_THROW(plane_stress_stiffness(-1.0, 0.3), ConfigError);
  EXPECT_THROW(plane_stress_stiffness(1.0, 0.5), ConfigError);
  MicroMaterial m;
  m.rho = 0.0;
  EXPECT_THROW(m.validate(), ConfigError);
  MicroMaterial k;
  Tensor2 bad;
  bad(0, 0) = 1.0;
  bad(1, 1) = -1.0;
  k.kappa_tensor = bad;
  EXPECT_THROW(k.validate(), ConfigError);
}

TEST(Materials, AnisotropicOverridesWin) {
  MicroMaterial m;
  Tensor2 k;
  k(0, 0) = 100.0;
  k(1, 1) = 200.0;
  m.kappa_tensor = k;
  EXPECT_EQ(m.conductivity()(1, 1), 200.0);
  const RegionMaterial r = RegionMaterial::from(m);
  EXPECT_EQ(r.kappa(0, 0), 100.0);
  EXPECT_DOUBLE_EQ(r.a, 0.00225);
}

TEST(Taylor, ErrorVanishesAtReference) {
  EXPECT_EQ(taylor_log_error(1.0), 0.0);
  EXPECT_GT(taylor_log_error(0.6), taylor_log_error(0.8));
  EXPECT_GT(taylor_log_error(2.0), taylor_log_error(1.5));
}

// The returned interval is the largest one around T_ref where the error
// stays within the tolerance; its ends sit where the error equals it.
TEST(Taylor, IntervalEndsSitOnTheTolerance) {
  const double tol = taylor_log_error(180.0 / 300.0);
  const TaylorValidity v = taylor_log_validity(300.0, tol);
  EXPECT_NEAR(v.T_low, 180.0, 1e-6);
  EXPECT_NEAR(taylor_log_error(v.T_high / 300.0), tol, 1e-9);
  EXPECT_LE(taylor_log_error(0.5 * (v.T_low + v.T_high) / 300.0), tol);
}

TEST(Taylor, LowerEndIsCappedAtHalfReference) {
  const TaylorValidity v = taylor_log_validity(300.0, 10.0);
  EXPECT_DOUBLE_EQ(v.T_low, 150.0);
}
