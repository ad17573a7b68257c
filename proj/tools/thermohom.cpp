// Command-line driver: homogenize, verify and mesh.

#include "thermohom/errors.hpp"
#include "thermohom/mesh_io.hpp"
#include "thermohom/report.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace thermohom;
using nlohmann::json;

enum ExitCode { kOk = 0, kInternal = 1, kConfig = 2, kGeometry = 3, kSolver = 4, kVerifyFailed = 5 };

struct Overrides {
  int resolution = 0;
  int order = 0;
  std::string kappa_norm;
  bool deterministic = false;
  bool dump_fields = false;
  std::string report;
};

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + " is not valid JSON: " + e.what());
  }
}

void apply(const Overrides& o, RunConfig& cfg) {
  if (o.resolution > 0) cfg.geometry.resolution = o.resolution;
  if (o.order > 0) {
    if (o.order > 2) throw ConfigError("--order must be 1 or 2");
    cfg.geometry.order = o.order;
  }
  if (!o.kappa_norm.empty()) {
    const auto n = kappa_normalization_from_string(o.kappa_norm);
    if (!n) throw ConfigError("unknown --kappa-norm '" + o.kappa_norm + "'");
    cfg.physics.homogenization.normalization = *n;
  }
  if (o.dump_fields) cfg.output.dump_fields = true;
  if (!o.report.empty()) cfg.output.report = o.report;
}

// Runs `body` and maps library errors onto exit codes. `on_error` receives
// the error kind and message, e.g. to leave a report stub behind.
template <typename F, typename G>
int guarded(F&& body, G&& on_error) {
  auto fail = [&](const char* kind, const std::exception& e, int code) {
    std::cerr << "error (" << kind << "): " << e.what() << "\n";
    try {
      on_error(kind, e.what());
    } catch (const std::exception& stub) {
      std::cerr << "could not write error report: " << stub.what() << "\n";
    }
    return code;
  };
  try {
    return body();
  } catch (const LayoutError& e) {
    return fail("layout", e, kConfig);
  } catch (const ConfigError& e) {
    return fail("config", e, kConfig);
  } catch (const GeometryError& e) {
    return fail("geometry", e, kGeometry);
  } catch (const SolverError& e) {
    return fail("solver", e, kSolver);
  } catch (const std::exception& e) {
    return fail("internal", e, kInternal);
  }
}

void print_summary(const json& report) {
  const json& p = report.at("parameters");
  const json& m = report.at("mesh");
  std::cout << "mesh: " << m.at("nodes") << " nodes, " << m.at("cells") << " cells, order " << m.at("order")
            << ", porosity " << m.at("porosity") << "\n";
  std::cout << "C11 " << p.at("C")[0][0] << "  C12 " << p.at("C")[0][1] << "  C33 " << p.at("C")[2][2] << "\n";
  std::cout << "beta11 " << p.at("beta")[0][0] << "  kappa11 " << p.at("kappa")[0][0] << "  c " << p.at("c")
            << "  a " << p.at("a") << "\n";
  std::cout << "D11 " << p.at("D")[0][0] << "\n";
}

int verify_against(const json& report, const std::filesystem::path& reference, const ToleranceMap& tolerances) {
  const VerifyResult v = verify_reports(report, read_json(reference), tolerances);
  print_verify(std::cout, v);
  return v.pass ? kOk : kVerifyFailed;
}

int run_homogenize(const std::string& config_path, const Overrides& o) {
  std::filesystem::path report_path = o.report;
  return guarded(
      [&] {
        RunConfig cfg = load_config(config_path);
        apply(o, cfg);
        report_path = cfg.output.report;
        const PipelineResult result = run_pipeline(cfg);
        const json report = make_report(cfg, result, o.deterministic);
        write_text(cfg.output.report, report.dump(2) + "\n");
        std::cout << "report: " << cfg.output.report.string() << "\n";
        if (!cfg.output.csv.empty()) {
          std::ostringstream csv;
          write_matrices_csv(csv, report);
          write_text(cfg.output.csv, csv.str());
        }
        if (cfg.output.dump_fields) {
          std::ostringstream fields;
          write_fields_csv(fields, result.mesh, result.solutions);
          write_text(cfg.output.fields_prefix.string() + "_fields.csv", fields.str());
        }
        print_summary(report);
        if (!cfg.verify.reference.empty()) return verify_against(report, cfg.verify.reference, cfg.verify.tolerances);
        return static_cast<int>(kOk);
      },
      [&](const std::string& kind, const std::string& message) {
        if (!report_path.empty()) write_text(report_path, error_report(kind, message).dump(2) + "\n");
      });
}

int run_mesh(const std::string& config_path, const Overrides& o, const std::string& output) {
  return guarded(
      [&] {
        RunConfig cfg = load_config(config_path);
        apply(o, cfg);
        std::filesystem::path msh = output.empty() ? cfg.output.mesh : std::filesystem::path(output);
        if (msh.empty()) msh = "mesh.msh";
        const Mesh mesh = cfg.build_mesh();
        write_text(msh, export_msh(mesh));
        std::filesystem::path dump = msh;
        dump.replace_extension(".json");
        write_text(dump, mesh_to_json(mesh).dump(2) + "\n");
        std::cout << "mesh: " << mesh.num_nodes() << " nodes, " << mesh.num_cells() << " cells -> " << msh.string()
                  << ", " << dump.string() << "\n";
        return static_cast<int>(kOk);
      },
      [](const std::string&, const std::string&) {});
}

int run_verify(const std::string& report, const std::string& reference, const std::vector<std::string>& tols) {
  return guarded(
      [&] {
        ToleranceMap tolerances;
        for (const auto& t : tols) {
          const auto eq = t.find('=');
          if (eq == std::string::npos) throw ConfigError("--tol expects name=value, got '" + t + "'");
          double v = 0.0;
          try {
            v = std::stod(t.substr(eq + 1));
          } catch (const std::exception&) {
            throw ConfigError("--tol value in '" + t + "' is not a number");
          }
          if (!(v > 0.0)) throw ConfigError("--tol value in '" + t + "' must be positive");
          tolerances[t.substr(0, eq)] = v;
        }
        return verify_against(read_json(report), reference, tolerances);
      },
      [](const std::string&, const std::string&) {});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periodic-cell homogenization for strain-gradient thermoelasticity"};
  app.require_subcommand(1);

  Overrides o;
  auto add_overrides = [&o](CLI::App* cmd) {
    cmd->add_option("--resolution", o.resolution, "Grid squares per cell edge");
    cmd->add_option("--order", o.order, "Element order (1 or 2)");
  };

  std::string config, report, reference, mesh_out;
  std::vector<std::string> tols;

  auto* hom = app.add_subcommand("homogenize", "Solve the cell problems and write a report");
  hom->add_option("config", config, "JSON run configuration")->required();
  add_overrides(hom);
  hom->add_option("--kappa-norm", o.kappa_norm, "cell_average or solid_average");
  hom->add_flag("--deterministic", o.deterministic, "Leave timings out of the report");
  hom->add_flag("--dump-fields", o.dump_fields, "Write nodal corrector fields as CSV");
  hom->add_option("--report", o.report, "Report path (overrides output.report)");

  auto* ver = app.add_subcommand("verify", "Compare a report against a reference report");
  ver->add_option("report", report, "Report to check")->required();
  ver->add_option("reference", reference, "Reference report")->required();
  ver->add_option("--tol", tols, "Per-tensor relative tolerance, name=value");

  auto* msh = app.add_subcommand("mesh", "Write the cell mesh as MSH and JSON without solving");
  msh->add_option("config", config, "JSON run configuration")->required();
  add_overrides(msh);
  msh->add_option("-o,--output", mesh_out, "MSH path (overrides output.mesh)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  if (*hom) return run_homogenize(config, o);
  if (*ver) return run_verify(report, reference, tols);
  return run_mesh(config, o, mesh_out);
}
