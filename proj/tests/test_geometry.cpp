#include "thermohom/errors.hpp"
#include "thermohom/geometry.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace thermohom;

TEST(Geometry, PoreRadiusForTwentyPercent) {
  EXPECT_NEAR(pore_radius_for_porosity(1.0, 0.2, 1), std::sqrt(0.2 / std::numbers::pi), 1e-15);
  EXPECT_NEAR(pore_radius_for_porosity(1.0, 0.2, 4), 0.126157, 1e-6);
  EXPECT_NEAR(pore_radius_for_porosity(2.0, 0.2, 1), 2.0 * std::sqrt(0.2 / std::numbers::pi), 1e-14);
}

TEST(Geometry, PresetsHaveTwentyPercentPorosity) {
  for (Preset p : {Preset::single, Preset::uniform4}) {
    const RveSpec spec = make_preset(p);
    EXPECT_NEAR(porosity(spec), 0.2, 1e-14) << to_string(p);
    EXPECT_NO_THROW(spec.validate());
    EXPECT_TRUE(is_centrosymmetric(spec));
  }
  EXPECT_EQ(porosity(make_preset(Preset::homogeneous)), 0.0);
}

TEST(Geometry, UniformPoresSitAtQuarterPoints) {
  const RveSpec spec = make_preset(Preset::uniform4, 2.0);
  ASSERT_EQ(spec.pores.size(), 4u);
  EXPECT_DOUBLE_EQ(spec.pores[0].center.x, 0.5);
  EXPECT_DOUBLE_EQ(spec.pores[3].center.y, 1.5);
}

TEST(Geometry, Random4IsNotSilentlyInvented) {
  EXPECT_THROW(make_preset(Preset::random4), ConfigError);
}

TEST(Geometry, SeededRandomLayoutIsReproducibleAndValid) {
  const RveSpec a = random_pores(42);
  const RveSpec b = random_pores(42);
  ASSERT_EQ(a.pores.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(a.pores[i].center.x, b.pores[i].center.x);
    EXPECT_EQ(a.pores[i].center.y, b.pores[i].center.y);
  }
  EXPECT_NO_THROW(a.validate());
  EXPECT_NEAR(porosity(a), 0.2, 1e-14);
}

TEST(Geometry, RejectsPoreTouchingBoundary) {
  RveSpec spec;
  spec.pores.push_back({{0.1, 0.5}, 0.2});
  EXPECT_THROW(spec.validate(), GeometryError);
}

TEST(Geometry, RejectsOverlappingPores) {
  RveSpec spec;
  spec.pores.push_back({{0.4, 0.5}, 0.15});
  spec.pores.push_back({{0.6, 0.5}, 0.15});
  EXPECT_THROW(spec.validate(), GeometryError);
  EXPECT_THROW(porosity(spec), GeometryError);
}

TEST(Geometry, RejectsNonpositiveSizes) {
  RveSpec spec;
  spec.cell.edge_length = 0.0;
  EXPECT_THROW(spec.validate(), GeometryError);
  RveSpec ratio;
  ratio.homothetic_ratio = -1.0;
  EXPECT_THROW(ratio.validate(), GeometryError);
}

TEST(Geometry, OffCenterLayoutIsNotCentrosymmetric) {
  RveSpec spec;
  spec.pores.push_back({{0.3, 0.4}, 0.1});
  EXPECT_FALSE(is_centrosymmetric(spec));
}

TEST(Geometry, PresetNamesRoundTrip) {
  for (Preset p : {Preset::homogeneous, Preset::single, Preset::uniform4, Preset::random4}) {
    EXPECT_EQ(preset_from_string(to_string(p)), p);
  }
  EXPECT_FALSE(preset_from_string("hexagonal").has_value());
}
