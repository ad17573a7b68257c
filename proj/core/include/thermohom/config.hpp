#pragma once

// Run configuration, read from JSON. Every default mirrors the aluminium
// cell of the reference study: L = 1 mm, eps = 1, T_eval = 400 K.

#include "thermohom/homogenization.hpp"
#include "thermohom/materials.hpp"
#include "thermohom/mesh.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace thermohom {

struct GeometryConfig {
  double edge_length = 1.0;
  std::optional<Preset> preset;
  std::vector<Pore> pores;  // explicit layout; mutually exclusive with fixed presets
  double porosity = 0.2;    // target porosity of presets and seeded layouts
  int resolution = 64;
  int order = 2;
  std::filesystem::path mesh_file;  // imported instead of generated when set
  std::optional<std::uint64_t> seed;
  bool allow_random = false;  // required together with seed for random4
};

struct PhysicsConfig {
  HomogenizationOptions homogenization;
};

struct OutputConfig {
  std::filesystem::path report = "report.json";
  std::filesystem::path csv;   // matrix export; empty disables
  std::filesystem::path mesh;  // MSH written by the mesh command
  bool dump_fields = false;
  std::filesystem::path fields_prefix = "fields";
};

/// Per-tensor relative tolerances keyed by parameter name (C, G, D, beta,
/// gamma, kappa, kappa_cell, kappa_solid, moment, a, c, rho).
using ToleranceMap = std::map<std::string, double>;

inline constexpr double kDefaultVerifyTolerance = 5e-3;

struct VerifyConfig {
  std::filesystem::path reference;
  ToleranceMap tolerances;
};

struct RunConfig {
  GeometryConfig geometry;
  MicroMaterial material;
  PhysicsConfig physics;
  OutputConfig output;
  VerifyConfig verify;

  /// Relative paths inside the file are resolved against `base_dir`.
  /// Throws ConfigError on unknown keys, wrong types or invalid values.
  static RunConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

  /// Explicit cell and pore list; presets are expanded here. Throws
  /// ConfigError for random4 without coordinates or without both seed and
  /// allow_random.
  RveSpec rve() const;

  /// Generated or imported mesh with regions set to 0.
  Mesh build_mesh() const;

  MaterialTable materials() const { return {RegionMaterial::from(material)}; }
};

RunConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const RunConfig& config);

}  // namespace thermohom
