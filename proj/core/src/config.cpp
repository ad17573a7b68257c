#include "thermohom/config.hpp"

#include "thermohom/errors.hpp"
#include "thermohom/mesh_io.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace thermohom {
namespace {

using nlohmann::json;

void require_keys(const json& block, const std::string& name, const std::set<std::string>& allowed) {
  if (!block.is_object()) throw ConfigError("'" + name + "' must be an object");
  for (const auto& [key, value] : block.items()) {
    if (!allowed.contains(key)) throw ConfigError("unknown key '" + name + "." + key + "'");
  }
}

template <typename T>
void read(const json& block, const std::string& name, const char* key, T& out) {
  if (!block.contains(key)) return;
  try {
    out = block.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("'" + name + "." + key + "' has the wrong type");
  }
}

void require_positive(double v, const std::string& what) {
  if (!(v > 0.0)) throw ConfigError(what + " must be positive");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

Pore read_pore(const json& j) {
  require_keys(j, "geometry.pores[]", {"center", "radius"});
  Pore p;
  try {
    const auto c = j.at("center").get<std::vector<double>>();
    if (c.size() != 2) throw ConfigError("pore center needs two coordinates");
    p.center = {c[0], c[1]};
    p.radius = j.at("radius").get<double>();
  } catch (const json::exception&) {
    throw ConfigError("pore entries need center [x, y] and radius");
  }
  return p;
}

Tensor2 read_tensor2(const json& j, const std::string& what) {
  try {
    const auto rows = j.get<std::vector<std::vector<double>>>();
    if (rows.size() != 2 || rows[0].size() != 2 || rows[1].size() != 2) throw ConfigError(what + " must be 2x2");
    Tensor2 t;
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 2; ++k) t(i, k) = rows[i][k];
    return t;
  } catch (const json::exception&) {
    throw ConfigError(what + " must be a 2x2 array");
  }
}

std::vector<std::vector<double>> rows(const Tensor2& t) {
  return {{t(0, 0), t(0, 1)}, {t(1, 0), t(1, 1)}};
}

}  // namespace

RunConfig RunConfig::from_json(const json& j, const std::filesystem::path& base_dir) {
  require_keys(j, "config", {"geometry", "material", "physics", "output", "verify"});
  RunConfig cfg;

  if (j.contains("geometry")) {
    const json& g = j.at("geometry");
    require_keys(g, "geometry", {"edge_length", "preset", "pores", "porosity", "resolution", "order",
                                 "mesh_file", "seed", "allow_random"});
    GeometryConfig& geo = cfg.geometry;
    read(g, "geometry", "edge_length", geo.edge_length);
    read(g, "geometry", "porosity", geo.porosity);
    read(g, "geometry", "resolution", geo.resolution);
    read(g, "geometry", "order", geo.order);
    read(g, "geometry", "allow_random", geo.allow_random);
    if (g.contains("preset")) {
      std::string name;
      read(g, "geometry", "preset", name);
      geo.preset = preset_from_string(name);
      if (!geo.preset) throw ConfigError("unknown preset '" + name + "'");
    }
    if (g.contains("pores")) {
      if (!g.at("pores").is_array()) throw ConfigError("'geometry.pores' must be an array");
      for (const auto& p : g.at("pores")) geo.pores.push_back(read_pore(p));
    }
    if (g.contains("seed")) {
      std::uint64_t seed = 0;
      read(g, "geometry", "seed", seed);
      geo.seed = seed;
    }
    std::string mesh_file;
    read(g, "geometry", "mesh_file", mesh_file);
    geo.mesh_file = resolve(base_dir, mesh_file);
    require_positive(geo.edge_length, "geometry.edge_length");
    if (!(geo.porosity > 0.0 && geo.porosity < 1.0)) throw ConfigError("geometry.porosity must lie in (0, 1)");
    if (geo.order != 1 && geo.order != 2) throw ConfigError("geometry.order must be 1 or 2");
    if (geo.resolution < 1) throw ConfigError("geometry.resolution must be positive");
  }

  if (j.contains("material")) {
    const json& m = j.at("material");
    require_keys(m, "material", {"E", "nu", "rho", "alpha", "c", "kappa", "T_ref", "T_eval"});
    MicroMaterial& mat = cfg.material;
    read(m, "material", "E", mat.E);
    read(m, "material", "nu", mat.nu);
    read(m, "material", "rho", mat.rho);
    read(m, "material", "c", mat.c);
    read(m, "material", "T_ref", mat.T_ref);
    read(m, "material", "T_eval", mat.T_eval);
    if (m.contains("alpha")) {
      if (m.at("alpha").is_array()) {
        mat.alpha_tensor = read_tensor2(m.at("alpha"), "material.alpha");
      } else {
        read(m, "material", "alpha", mat.alpha);
      }
    }
    if (m.contains("kappa")) {
      if (m.at("kappa").is_array()) {
        mat.kappa_tensor = read_tensor2(m.at("kappa"), "material.kappa");
      } else {
        read(m, "material", "kappa", mat.kappa);
      }
    }
  }
  cfg.material.validate();

  if (j.contains("physics")) {
    const json& p = j.at("physics");
    require_keys(p, "physics", {"epsilon", "kappa_normalization", "moment_domain"});
    HomogenizationOptions& h = cfg.physics.homogenization;
    read(p, "physics", "epsilon", h.epsilon);
    require_positive(h.epsilon, "physics.epsilon");
    if (p.contains("kappa_normalization")) {
      std::string name;
      read(p, "physics", "kappa_normalization", name);
      const auto n = kappa_normalization_from_string(name);
      if (!n) throw ConfigError("unknown kappa_normalization '" + name + "'");
      h.normalization = *n;
    }
    if (p.contains("moment_domain")) {
      std::string name;
      read(p, "physics", "moment_domain", name);
      if (name == "cell") {
        h.moment_domain = MomentDomain::cell;
      } else if (name == "solid") {
        h.moment_domain = MomentDomain::solid;
      } else {
        throw ConfigError("unknown moment_domain '" + name + "'");
      }
    }
  }

  if (j.contains("output")) {
    const json& o = j.at("output");
    require_keys(o, "output", {"report", "csv", "mesh", "dump_fields", "fields_prefix"});
    std::string report = cfg.output.report.string(), csv, mesh, prefix = cfg.output.fields_prefix.string();
    read(o, "output", "report", report);
    read(o, "output", "csv", csv);
    read(o, "output", "mesh", mesh);
    read(o, "output", "fields_prefix", prefix);
    read(o, "output", "dump_fields", cfg.output.dump_fields);
    cfg.output.report = resolve(base_dir, report);
    cfg.output.csv = resolve(base_dir, csv);
    cfg.output.mesh = resolve(base_dir, mesh);
    cfg.output.fields_prefix = resolve(base_dir, prefix);
  }

  if (j.contains("verify")) {
    const json& v = j.at("verify");
    require_keys(v, "verify", {"reference", "tolerances"});
    std::string reference;
    read(v, "verify", "reference", reference);
    cfg.verify.reference = resolve(base_dir, reference);
    read(v, "verify", "tolerances", cfg.verify.tolerances);
    for (const auto& [name, tol] : cfg.verify.tolerances) require_positive(tol, "verify.tolerances." + name);
  }
  return cfg;
}

RveSpec RunConfig::rve() const {
  const GeometryConfig& g = geometry;
  const bool is_random = g.preset == Preset::random4;
  RveSpec spec;
  if (!g.pores.empty()) {
    if (g.preset && !is_random) {
      throw ConfigError("geometry.pores given together with fixed preset '" + to_string(*g.preset) + "'");
    }
    if (is_random && g.pores.size() != 4) throw ConfigError("preset random4 takes exactly four pores");
    spec.cell = Square{{0.5 * g.edge_length, 0.5 * g.edge_length}, g.edge_length};
    spec.pores = g.pores;
  } else if (is_random) {
    if (!g.seed || !g.allow_random) {
      throw ConfigError(
          "preset random4 needs explicit geometry.pores, or geometry.seed together with "
          "geometry.allow_random = true");
    }
    spec = random_pores(*g.seed, 4, g.edge_length, g.porosity);
  } else {
    spec = make_preset(g.preset.value_or(Preset::homogeneous), g.edge_length, g.porosity);
  }
  spec.validate();
  return spec;
}

Mesh RunConfig::build_mesh() const {
  Mesh mesh;
  if (!geometry.mesh_file.empty()) {
    std::ifstream in(geometry.mesh_file);
    if (!in) throw ConfigError("cannot open mesh file " + geometry.mesh_file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    mesh = import_msh(ss.str());
  } else {
    mesh = generate_mesh(rve(), geometry.resolution, geometry.order);
  }
  mesh.regions.assign(mesh.num_cells(), 0);
  return mesh;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return RunConfig::from_json(j, path.parent_path());
}

json to_json(const RunConfig& c) {
  json pores = json::array();
  for (const auto& p : c.geometry.pores) pores.push_back({{"center", {p.center.x, p.center.y}}, {"radius", p.radius}});
  json geometry = {{"edge_length", c.geometry.edge_length},
                   {"porosity", c.geometry.porosity},
                   {"resolution", c.geometry.resolution},
                   {"order", c.geometry.order},
                   {"pores", pores}};
  if (c.geometry.preset) geometry["preset"] = to_string(*c.geometry.preset);
  if (!c.geometry.mesh_file.empty()) geometry["mesh_file"] = c.geometry.mesh_file.string();
  if (c.geometry.seed) {
    geometry["seed"] = *c.geometry.seed;
    geometry["allow_random"] = c.geometry.allow_random;
  }
  const MicroMaterial& m = c.material;
  json material = {{"E", m.E}, {"nu", m.nu}, {"rho", m.rho}, {"c", m.c}, {"T_ref", m.T_ref}, {"T_eval", m.T_eval}};
  material["alpha"] = m.alpha_tensor ? json(rows(*m.alpha_tensor)) : json(m.alpha);
  material["kappa"] = m.kappa_tensor ? json(rows(*m.kappa_tensor)) : json(m.kappa);
  const HomogenizationOptions& h = c.physics.homogenization;
  json physics = {{"epsilon", h.epsilon},
                  {"kappa_normalization", to_string(h.normalization)},
                  {"moment_domain", h.moment_domain == MomentDomain::cell ? "cell" : "solid"}};
  return {{"geometry", geometry}, {"material", material}, {"physics", physics}};
}

}  // namespace thermohom
