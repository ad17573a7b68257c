#pragma once

// The periodic corrector problems, solved in dependency order:
// phi (3 cases) -> P -> first-pass C^M, beta^M, rho^M -> psi (6 cases) -> R (2).

#include "thermohom/fem.hpp"

#include <nlohmann/json_fwd.hpp>

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace thermohom {

/// Reduced operator of one kind, its DOF map and a reusable factorization.
class CellSystem {
 public:
  CellSystem(const Mesh& mesh, const MaterialTable& materials, Operator kind);

  const Mesh& mesh() const { return *mesh_; }
  const MaterialTable& materials() const { return *materials_; }
  const DofMap& dofs() const { return dofs_; }
  int components() const { return dofs_.components(); }

  struct Result {
    Eigen::VectorXd field;  // full nodal vector, followers equal their master
    SolveReport report;
    std::array<double, 2> load_integral{};  // integral of the load per component
  };
  Result solve(const LoadFunction& load) const;

 private:
  const Mesh* mesh_;
  const MaterialTable* materials_;
  DofMap dofs_;
  ConstrainedSolver solver_;
};

/// Value and gradient of a nodal field at one quadrature point:
/// value[i], grad[i][j] = d field_i / d y_j.
struct FieldPoint {
  std::array<double, 2> value{};
  std::array<std::array<double, 2>, 2> grad{};
};
FieldPoint evaluate_field(const Mesh& mesh, const Eigen::VectorXd& field, int components,
                          std::size_t cell, const ElementPoint& point);

struct FirstPass {
  Tensor4 C;     // C^M
  Tensor2 beta;  // beta^M
  double rho = 0.0;
};

struct SolveLog {
  std::string name;
  double residual = 0.0;
  double mean_residual = 0.0;
};

struct CellSolutions {
  std::array<Eigen::VectorXd, 3> phi;  // kPairs order
  Eigen::VectorXd P;
  std::array<Eigen::VectorXd, 6> psi;  // kTriples order
  std::array<Eigen::VectorXd, 2> R;
  FirstPass first_pass;
  std::vector<SolveLog> solves;
  /// Relative solvability residual of each psi load, kTriples order.
  std::array<double, 6> solvability{};

  /// phi for any (a, b); (1, 0) aliases (0, 1).
  const Eigen::VectorXd& phi_of(int a, int b) const;
  /// psi for any (a, b, c); (1, 0, c) aliases (0, 1, c).
  const Eigen::VectorXd& psi_of(int a, int b, int c) const;
};

inline constexpr double kSolvabilityTolerance = 1e-8;

std::array<Eigen::VectorXd, 3> solve_phi(const CellSystem& elastic, std::vector<SolveLog>* log = nullptr);
Eigen::VectorXd solve_P(const CellSystem& elastic, std::vector<SolveLog>* log = nullptr);

/// C^M = (1/V) int C L L, beta^M = (1/V) int [C L Z - beta L], rho^M = (1/V) int rho,
/// with V the full cell area.
FirstPass first_pass_macro(const Mesh& mesh, const MaterialTable& materials,
                           const std::array<Eigen::VectorXd, 3>& phi, const Eigen::VectorXd& P);

/// Throws SolverError if a load violates the solvability condition by more
/// than kSolvabilityTolerance * V * ||C^M||.
std::array<Eigen::VectorXd, 6> solve_psi(const CellSystem& elastic,
                                         const std::array<Eigen::VectorXd, 3>& phi,
                                         const FirstPass& first, std::vector<SolveLog>* log = nullptr,
                                         std::array<double, 6>* solvability = nullptr);

std::array<Eigen::VectorXd, 2> solve_R(const CellSystem& conduction,
                                       std::vector<SolveLog>* log = nullptr);

/// Runs all stages in order.
CellSolutions solve_cell_problems(const Mesh& mesh, const MaterialTable& materials);

/// Nodal corrector values, one row per node.
void write_fields_csv(std::ostream& os, const Mesh& mesh, const CellSolutions& s);
nlohmann::json fields_to_json(const Mesh& mesh, const CellSolutions& s);

}  // namespace thermohom
