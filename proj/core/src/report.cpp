#include "thermohom/report.hpp"

#include "thermohom/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace thermohom {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename Derived>
json rows(const Eigen::MatrixBase<Derived>& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

// Scalars become 1x1 so that every parameter is compared the same way.
std::vector<std::vector<double>> as_matrix(const json& j, const std::string& name) {
  if (j.is_number()) return {{j.get<double>()}};
  try {
    auto m = j.get<std::vector<std::vector<double>>>();
    for (const auto& r : m) {
      if (r.size() != m.front().size()) throw LayoutError("ragged matrix '" + name + "'");
    }
    return m;
  } catch (const json::exception&) {
    throw LayoutError("parameter '" + name + "' is neither a number nor a matrix");
  }
}

const json& parameters_of(const json& report, const char* which) {
  if (!report.is_object() || !report.contains("parameters") || !report.at("parameters").is_object()) {
    throw LayoutError(std::string(which) + " has no parameters block");
  }
  if (report.value("schema", "") != kReportSchema) {
    throw LayoutError(std::string(which) + " is not a " + kReportSchema + " report");
  }
  return report.at("parameters");
}

double max_abs(const std::vector<std::vector<double>>& m) {
  double s = 0.0;
  for (const auto& r : m)
    for (double v : r) s = std::max(s, std::abs(v));
  return s;
}

// Dimensional scale of the higher-order tensors, taken from the reference.
double dimensional_scale(const json& reference, const std::string& name) {
  const json& p = reference.at("parameters");
  double length = 1.0;
  if (reference.contains("physics") && reference.contains("mesh")) {
    length = reference.at("physics").value("epsilon", 1.0) * reference.at("mesh").value("edge_length", 1.0);
  }
  auto scale_of = [&](const char* key) { return p.contains(key) ? max_abs(as_matrix(p.at(key), key)) : 0.0; };
  if (name == "G") return scale_of("C") * length;
  if (name == "D") return scale_of("C") * length * length;
  if (name == "gamma") return scale_of("beta") * length;
  return 0.0;
}

}  // namespace

PipelineResult run_pipeline(const RunConfig& config) {
  PipelineResult out;
  auto t0 = Clock::now();
  out.mesh = config.build_mesh();
  out.seconds.mesh = seconds_since(t0);

  const MaterialTable materials = config.materials();
  t0 = Clock::now();
  out.solutions = solve_cell_problems(out.mesh, materials);
  out.seconds.solve = seconds_since(t0);

  t0 = Clock::now();
  out.parameters = homogenize(out.mesh, materials, out.solutions, config.physics.homogenization);
  out.checks = averaging_checks(out.mesh, out.solutions, out.parameters);
  out.seconds.homogenize = seconds_since(t0);
  return out;
}

json make_report(const RunConfig& config, const PipelineResult& r, bool deterministic) {
  const HomogenizedParameters& h = r.parameters;
  const PackedParameters p = voigt_pack(h);
  const Mesh& mesh = r.mesh;

  json pores = json::array();
  for (const auto& pore : mesh.pores) pores.push_back({{"center", {pore.center.x, pore.center.y}}, {"radius", pore.radius}});
  const double solid = solid_volume(mesh);
  json mesh_block = {{"source", config.geometry.mesh_file.empty() ? "generated" : "imported"},
                     {"edge_length", mesh.cell.edge_length},
                     {"order", mesh.order},
                     {"nodes", mesh.num_nodes()},
                     {"cells", mesh.num_cells()},
                     {"periodic_followers", mesh.periodic.follower_count()},
                     {"min_quality", min_quality(mesh)},
                     {"solid_area", solid},
                     {"porosity", 1.0 - solid / mesh.cell.area()},
                     {"pores", pores}};
  if (config.geometry.mesh_file.empty()) mesh_block["resolution"] = config.geometry.resolution;

  json parameters = {{"C", rows(p.C)},
                     {"G", rows(p.G)},
                     {"D", rows(p.D)},
                     {"beta", rows(p.beta)},
                     {"gamma", rows(p.gamma)},
                     {"kappa", rows(h.normalization == KappaNormalization::solid_average ? p.kappa_solid : p.kappa_cell)},
                     {"kappa_cell", rows(p.kappa_cell)},
                     {"kappa_solid", rows(p.kappa_solid)},
                     {"moment", rows(p.moment)},
                     {"a", h.a},
                     {"c", h.c},
                     {"rho", h.rho}};

  json solves = json::array();
  for (const auto& s : r.solutions.solves) {
    solves.push_back({{"name", s.name}, {"residual", s.residual}, {"mean_residual", s.mean_residual}});
  }
  const AveragingChecks& c = r.checks;
  json diagnostics = {
      {"solves", solves},
      {"solvability", r.solutions.solvability},
      {"solvability_tolerance", kSolvabilityTolerance},
      {"averaging",
       {{"L_minus_identity", c.L_minus_identity},
        {"Z", c.Z},
        {"grad_R", c.grad_R},
        {"grad_psi", c.grad_psi},
        {"C_symmetry", c.C_symmetry},
        {"D_symmetry", c.D_symmetry}}},
      {"a_from_heat_capacity", heat_capacity_parameter(h.c, config.material.T_eval)}};

  json physics = to_json(config).at("physics");
  physics["T_ref"] = config.material.T_ref;
  physics["T_eval"] = config.material.T_eval;

  json report = {{"schema", kReportSchema},
                 {"status", "ok"},
                 {"config", to_json(config)},
                 {"mesh", mesh_block},
                 {"physics", physics},
                 {"parameters", parameters},
                 {"diagnostics", diagnostics}};
  if (!deterministic) {
    report["timing"] = {{"mesh", r.seconds.mesh}, {"solve", r.seconds.solve}, {"homogenize", r.seconds.homogenize}};
  }
  return report;
}

json error_report(const std::string& kind, const std::string& message) {
  return {{"schema", kReportSchema}, {"status", "error"}, {"error", {{"kind", kind}, {"message", message}}}};
}

void write_matrices_csv(std::ostream& os, const json& report) {
  const json& p = parameters_of(report, "report");
  os << std::setprecision(17);
  for (const auto& [name, value] : p.items()) {
    const auto m = as_matrix(value, name);
    os << name << '\n';
    for (const auto& r : m) {
      for (std::size_t k = 0; k < r.size(); ++k) os << (k ? "," : "") << r[k];
      os << '\n';
    }
  }
}

VerifyResult verify_reports(const json& report, const json& reference, const ToleranceMap& tolerances) {
  const json& mine = parameters_of(report, "report");
  const json& ref = parameters_of(reference, "reference");
  for (const auto& [name, _] : ref.items()) {
    if (!mine.contains(name)) throw LayoutError("report lacks parameter '" + name + "'");
  }
  for (const auto& [name, _] : mine.items()) {
    if (!ref.contains(name)) throw LayoutError("reference lacks parameter '" + name + "'");
  }

  VerifyResult out;
  for (const auto& [name, value] : ref.items()) {
    const auto r = as_matrix(value, name);
    const auto m = as_matrix(mine.at(name), name);
    if (r.size() != m.size() || r.front().size() != m.front().size()) {
      throw LayoutError("parameter '" + name + "' has shape " + std::to_string(m.size()) + "x" +
                        std::to_string(m.front().size()) + ", reference " + std::to_string(r.size()) + "x" +
                        std::to_string(r.front().size()));
    }
    const auto it = tolerances.find(name);
    const double tol = it != tolerances.end() ? it->second : kDefaultVerifyTolerance;
    const double floor = 1e-3 * std::max(max_abs(r), dimensional_scale(reference, name));
    const bool scalar = r.size() == 1 && r.front().size() == 1;
    for (std::size_t i = 0; i < r.size(); ++i)
      for (std::size_t k = 0; k < r[i].size(); ++k) {
        DiffEntry e;
        e.name = scalar ? name : name + "[" + std::to_string(i) + "][" + std::to_string(k) + "]";
        e.value = m[i][k];
        e.reference = r[i][k];
        e.tolerance = tol;
        const double diff = std::abs(e.value - e.reference);
        e.floored = std::abs(e.reference) < floor;
        if (e.floored) {
          e.error = floor > 0.0 ? diff / floor : diff;
        } else {
          e.error = diff / std::abs(e.reference);
        }
        e.pass = std::isfinite(e.value) && e.error <= tol;
        out.pass = out.pass && e.pass;
        out.entries.push_back(e);
      }
  }
  std::stable_sort(out.entries.begin(), out.entries.end(), [](const DiffEntry& a, const DiffEntry& b) {
    return a.error / a.tolerance > b.error / b.tolerance;
  });
  return out;
}

void print_verify(std::ostream& os, const VerifyResult& result, std::size_t limit) {
  os << (result.pass ? "verify: PASS" : "verify: FAIL") << " (" << result.entries.size() << " entries)\n";
  os << std::left << std::setw(14) << "entry" << std::right << std::setw(18) << "value" << std::setw(18)
     << "reference" << std::setw(12) << "error" << std::setw(10) << "tol" << "\n";
  const std::size_t n = std::min(limit, result.entries.size());
  for (std::size_t i = 0; i < n; ++i) {
    const DiffEntry& e = result.entries[i];
    os << std::left << std::setw(14) << e.name << std::right << std::setprecision(9) << std::setw(18) << e.value
       << std::setw(18) << e.reference << std::setprecision(3) << std::setw(12) << e.error << std::setw(10)
       << e.tolerance << (e.floored ? " abs" : "") << (e.pass ? "" : "  FAIL") << "\n";
  }
}

}  // namespace thermohom
