#include "thermohom/errors.hpp"
#include "thermohom/report.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace thermohom;
using nlohmann::json;

namespace {

RunConfig config_of(const std::string& text) { return RunConfig::from_json(json::parse(text)); }

json homogeneous_report(bool deterministic = true) {
  const RunConfig cfg = config_of(R"({"geometry": {"preset": "homogeneous", "resolution": 8, "order": 2}})");
  return make_report(cfg, run_pipeline(cfg), deterministic);
}

json read_fixture(const std::string& name) {
  std::ifstream in(std::string(THERMOHOM_FIXTURES) + "/" + name);
  return json::parse(in);
}

}  // namespace

TEST(Config, DefaultsMirrorTheReferenceStudy) {
  const RunConfig cfg = config_of("{}");
  EXPECT_EQ(cfg.geometry.edge_length, 1.0);
  EXPECT_EQ(cfg.material.E, 75000.0);
  EXPECT_EQ(cfg.material.T_eval, 400.0);
  EXPECT_EQ(cfg.physics.homogenization.epsilon, 1.0);
  EXPECT_EQ(cfg.physics.homogenization.normalization, KappaNormalization::solid_average);
  EXPECT_TRUE(cfg.rve().pores.empty());
}

TEST(Config, PresetsExpandToExplicitPores) {
  const RunConfig cfg = config_of(R"({"geometry": {"preset": "uniform4", "edge_length": 2.0}})");
  const RveSpec spec = cfg.rve();
  ASSERT_EQ(spec.pores.size(), 4u);
  EXPECT_NEAR(porosity(spec), 0.2, 1e-14);
  EXPECT_DOUBLE_EQ(spec.cell.center.x, 1.0);
}

TEST(Config, Random4NeedsCoordinatesOrAnExplicitSeed) {
  EXPECT_THROW(config_of(R"({"geometry": {"preset": "random4"}})").rve(), ConfigError);
  EXPECT_THROW(config_of(R"({"geometry": {"preset": "random4", "seed": 5}})").rve(), ConfigError);
  const RveSpec seeded =
      config_of(R"({"geometry": {"preset": "random4", "seed": 5, "allow_random": true}})").rve();
  EXPECT_EQ(seeded.pores.size(), 4u);
  const RveSpec explicit_layout = config_of(R"({"geometry": {"preset": "random4", "pores": [
      {"center": [0.25, 0.3], "radius": 0.1}, {"center": [0.72, 0.22], "radius": 0.1},
      {"center": [0.3, 0.75], "radius": 0.1}, {"center": [0.7, 0.68], "radius": 0.1}]}})")
                                          .rve();
  EXPECT_DOUBLE_EQ(explicit_layout.pores[1].center.x, 0.72);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(config_of(R"({"geometry": {"colour": 1}})"), ConfigError);
  EXPECT_THROW(config_of(R"({"geometry": {"order": 3}})"), ConfigError);
  EXPECT_THROW(config_of(R"({"geometry": {"preset": "hexagonal"}})"), ConfigError);
  EXPECT_THROW(config_of(R"({"geometry": {"resolution": "fine"}})"), ConfigError);
  EXPECT_THROW(config_of(R"({"material": {"nu": 0.7}})"), ConfigError);
  EXPECT_THROW(config_of(R"({"physics": {"kappa_normalization": "volume"}})"), ConfigError);
  EXPECT_THROW(config_of(R"({"verify": {"tolerances": {"C": 0.0}}})"), ConfigError);
  EXPECT_THROW(config_of(R"({"geometry": {"preset": "single", "pores": [{"center": [0.5, 0.5], "radius": 0.1}]}})")
                   .rve(),
               ConfigError);
}

TEST(Config, PoreTouchingBoundaryIsAGeometryError) {
  const RunConfig cfg = config_of(R"({"geometry": {"pores": [{"center": [0.1, 0.5], "radius": 0.2}]}})");
  EXPECT_THROW(cfg.rve(), GeometryError);
}

TEST(Report, DeterministicRunsAreByteIdentical) {
  EXPECT_EQ(homogeneous_report().dump(), homogeneous_report().dump());
  EXPECT_FALSE(homogeneous_report().contains("timing"));
  EXPECT_TRUE(homogeneous_report(false).contains("timing"));
}

TEST(Report, SchemaAndBlocks) {
  const json r = homogeneous_report();
  EXPECT_EQ(r.at("schema"), kReportSchema);
  EXPECT_EQ(r.at("status"), "ok");
  EXPECT_EQ(r.at("parameters").at("G").size(), 3u);
  EXPECT_EQ(r.at("parameters").at("G")[0].size(), 6u);
  EXPECT_EQ(r.at("parameters").at("D").size(), 6u);
  EXPECT_EQ(r.at("diagnostics").at("solves").size(), 12u);
  EXPECT_NEAR(r.at("parameters").at("C")[0][0].get<double>(), 84165.6, 0.05);
}

TEST(Report, ErrorStub) {
  const json e = error_report("geometry", "pore crosses the boundary");
  EXPECT_EQ(e.at("status"), "error");
  EXPECT_EQ(e.at("error").at("kind"), "geometry");
}

TEST(Report, CsvHasOneSectionPerParameter) {
  std::ostringstream os;
  write_matrices_csv(os, homogeneous_report());
  const std::string text = os.str();
  EXPECT_NE(text.find("C\n"), std::string::npos);
  EXPECT_NE(text.find("kappa_solid\n"), std::string::npos);
}

TEST(Verify, ReportAgainstItselfHasZeroDiff) {
  const json r = homogeneous_report();
  const VerifyResult v = verify_reports(r, r);
  EXPECT_TRUE(v.pass);
  for (const auto& e : v.entries) EXPECT_EQ(e.error, 0.0);
}

TEST(Verify, PerturbedEntryIsNamedFirst) {
  const json ref = homogeneous_report();
  json bad = ref;
  const double tol = 0.005;
  bad["parameters"]["C"][1][1] = ref["parameters"]["C"][1][1].get<double>() * (1.0 + 2.0 * tol);
  const VerifyResult v = verify_reports(bad, ref, {{"C", tol}});
  EXPECT_FALSE(v.pass);
  EXPECT_EQ(v.entries.front().name, "C[1][1]");
  EXPECT_FALSE(v.entries.front().pass);
  EXPECT_NEAR(v.entries.front().error, 2.0 * tol, 1e-12);
}

TEST(Verify, RoundOffEntriesUseTheFloor) {
  const json ref = homogeneous_report();
  json noisy = ref;
  noisy["parameters"]["G"][0][0] = 1e-9;
  noisy["parameters"]["D"][2][3] = -1e-9;
  EXPECT_TRUE(verify_reports(noisy, ref).pass);
}

TEST(Verify, LayoutMismatchThrows) {
  const json ref = homogeneous_report();
  json missing = ref;
  missing["parameters"].erase("D");
  EXPECT_THROW(verify_reports(missing, ref), LayoutError);
  json shape = ref;
  shape["parameters"]["beta"] = json::array({json::array({1.0, 2.0, 3.0})});
  EXPECT_THROW(verify_reports(shape, ref), LayoutError);
  EXPECT_THROW(verify_reports(error_report("solver", "x"), ref), LayoutError);
}

TEST(Verify, ShippedHomogeneousReferenceMatchesFreshRun) {
  const json ref = read_fixture("homogeneous_reference.json");
  RunConfig cfg = RunConfig::from_json(read_fixture("homogeneous.json"), THERMOHOM_FIXTURES);
  const json fresh = make_report(cfg, run_pipeline(cfg), true);
  const VerifyResult v = verify_reports(fresh, ref, {});
  std::ostringstream table;
  print_verify(table, v);
  EXPECT_TRUE(v.pass) << table.str();
}
