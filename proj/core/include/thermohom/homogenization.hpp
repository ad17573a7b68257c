#pragma once

// Corrector-derived fields at quadrature points and the effective parameters
// built from them.

#include "thermohom/cell_problems.hpp"

#include <optional>
#include <string>

namespace thermohom {

/// Fields at one quadrature point. Pair index ab = a * 2 + b, triple index
/// abc = (a * 2 + b) * 2 + c.
struct CorrectorPoint {
  Point y;  // X - X_c
  double jxw = 0.0;
  const RegionMaterial* material = nullptr;
  std::array<Tensor2, 4> L;  // delta_ia delta_jb + d phi_abi / d y_j
  Tensor2 Z;                 // d P_i / d y_j
  std::array<Tensor2, 8> N;  // phi_abi delta_jc + d psi_abci / d y_j
  std::array<Tensor2, 8> M;  // y_c L_abij + N_abcij
};

/// Evaluates L, Z, N and M on demand; nothing is stored per point.
class CorrectorFields {
 public:
  CorrectorFields(const Mesh& mesh, const MaterialTable& materials, const CellSolutions& solutions);

  const Mesh& mesh() const { return *mesh_; }
  std::span<const QuadraturePoint> rule() const { return triangle_rule(mesh_->order); }
  CorrectorPoint evaluate(std::size_t cell, std::size_t qp) const;

  template <typename F>
  void for_each(F&& f) const {
    const auto r = rule();
    for (std::size_t e = 0; e < mesh_->num_cells(); ++e)
      for (std::size_t q = 0; q < r.size(); ++q) f(evaluate(e, q));
  }

 private:
  const Mesh* mesh_;
  const MaterialTable* materials_;
  const CellSolutions* solutions_;
};

enum class KappaNormalization { cell_average, solid_average };
std::optional<KappaNormalization> kappa_normalization_from_string(const std::string& name);
std::string to_string(KappaNormalization n);

struct MechanicalParameters {
  Tensor4 C;
  Tensor5 G;
  Tensor6 D;
  Tensor6 D_bar;
};

struct ThermalParameters {
  Tensor2 beta;
  Tensor3 gamma;
  double a = 0.0;
  double c = 0.0;
};

/// Moment tensor entering the D mapping, in macroscale coordinates and per
/// unit cell area: eps^2 / V * integral of y y over `domain`.
Tensor2 normalized_moment(const Mesh& mesh, double epsilon, MomentDomain domain);

/// C = (1/V) int C L L, G = (eps/V) int C L M, D_bar = (eps^2/V) int C M M and
/// D_abcdef = D_bar_abcdef - C_abde I_cf with I from normalized_moment.
MechanicalParameters homogenize_mechanical(const CorrectorFields& fields, const Tensor2& moment,
                                           double epsilon);

/// beta = (1/V) int [C L Z - beta L], gamma = -(eps/V) int [C M Z - beta M],
/// a = -(1/V) int [C Z Z - 2 beta Z - a], c = (1/V) int c.
ThermalParameters homogenize_thermal(const CorrectorFields& fields, double epsilon);

/// Integral of kappa_ij - kappa_ip d R_j / d y_p over the solid, divided by
/// V (cell_average) or by the solid area (solid_average).
Tensor2 homogenize_conduction(const Mesh& mesh, const MaterialTable& materials,
                              const std::array<Eigen::VectorXd, 2>& R, KappaNormalization n);

struct HomogenizedParameters {
  Tensor4 C;
  Tensor5 G;
  Tensor6 D;
  Tensor2 beta;
  Tensor3 gamma;
  double a = 0.0;
  double c = 0.0;
  double rho = 0.0;
  Tensor2 kappa_cell;
  Tensor2 kappa_solid;
  KappaNormalization normalization = KappaNormalization::solid_average;
  Tensor2 moment;  // the normalized moment used for D
  MomentDomain moment_domain = MomentDomain::cell;
  double epsilon = 1.0;
  double edge_length = 1.0;

  const Tensor2& kappa() const {
    return normalization == KappaNormalization::solid_average ? kappa_solid : kappa_cell;
  }
};

/// Volume averages that vanish for periodic fields. Gradient averages use
/// the full cell with the pore-surface term, (1/V)[int_solid grad f -
/// oint_pores f n], which is zero exactly when f is periodic.
struct AveragingChecks {
  double L_minus_identity = 0.0;  // max |<L_abij> - delta_ia delta_jb|
  double Z = 0.0;                 // max |<Z_ij>| / max |Z|
  double grad_R = 0.0;            // max |<d R_j / d y_i>| / max |grad R|
  double grad_psi = 0.0;          // max |<d psi / d y>| / max |grad psi|
  double C_symmetry = 0.0;        // relative asymmetry of the Voigt C
  double D_symmetry = 0.0;        // relative asymmetry of the Voigt D
};

AveragingChecks averaging_checks(const Mesh& mesh, const CellSolutions& s,
                                 const HomogenizedParameters& h);

struct HomogenizationOptions {
  double epsilon = 1.0;
  KappaNormalization normalization = KappaNormalization::solid_average;
  MomentDomain moment_domain = MomentDomain::cell;
};

HomogenizedParameters homogenize(const Mesh& mesh, const MaterialTable& materials,
                                 const CellSolutions& solutions,
                                 const HomogenizationOptions& options = {});

struct PackedParameters {
  Matrix3 C;
  Matrix36 G;
  Matrix6 D;
  Matrix2 beta;
  Matrix32 gamma;
  Matrix2 kappa_cell;
  Matrix2 kappa_solid;
  Matrix2 moment;
};

/// Throws Error if a tensor lacks the symmetry its packing assumes.
PackedParameters voigt_pack(const HomogenizedParameters& h);

}  // namespace thermohom
