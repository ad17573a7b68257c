#pragma once

// Microscale constitutive data. Units: mm, MPa, N, K. Heat capacity and
// density are carried as raw numbers (0.9, 2700) without unit conversion.

#include "thermohom/tensor.hpp"

#include <optional>
#include <vector>

namespace thermohom {

/// Plane-stress stiffness of an isotropic solid, full index form.
/// Throws ConfigError unless E > 0 and -1 < nu < 0.5.
Tensor4 plane_stress_stiffness(double E, double nu);

/// beta_ij = C_ijkl alpha_kl
Tensor2 thermal_stress(const Tensor4& C, const Tensor2& alpha);

/// a = c / T. Throws ConfigError for T <= 0.
double heat_capacity_parameter(double c, double T);

struct MicroMaterial {
  double E = 75000.0;
  double nu = 0.33;
  double rho = 2700.0;
  double alpha = 2.36e-5;
  double c = 0.9;
  double kappa = 247.0;
  double T_ref = 300.0;
  double T_eval = 400.0;
  /// Anisotropic overrides of the scalar alpha and kappa.
  std::optional<Tensor2> alpha_tensor;
  std::optional<Tensor2> kappa_tensor;

  /// Throws ConfigError on inadmissible values.
  void validate() const;

  Tensor4 stiffness() const { return plane_stress_stiffness(E, nu); }
  Tensor2 expansion() const { return alpha_tensor ? *alpha_tensor : alpha * identity2(); }
  Tensor2 thermal_stress() const { return thermohom::thermal_stress(stiffness(), expansion()); }
  Tensor2 conductivity() const { return kappa_tensor ? *kappa_tensor : kappa * identity2(); }
  double heat_capacity_parameter() const { return thermohom::heat_capacity_parameter(c, T_eval); }
};

/// Aluminium at T_eval = 400 K.
inline MicroMaterial aluminium() { return {}; }

/// Per-region constitutive data, evaluated once per region.
struct RegionMaterial {
  Tensor4 C;
  Tensor2 beta;
  Tensor2 kappa;
  double rho = 0.0;
  double c = 0.0;
  double a = 0.0;

  static RegionMaterial from(const MicroMaterial& m);
};

/// Materials indexed by Mesh::regions.
using MaterialTable = std::vector<RegionMaterial>;

// Validity of the second-order expansion of ln(T / T_ref) in
// u = (xi - 1) / xi, xi = T / T_ref.

/// |ln xi - (u + u^2 / 2)|
double taylor_log_error(double xi);

struct TaylorValidity {
  double T_low = 0.0;
  double T_high = 0.0;
  double tolerance = 0.0;
};

/// Largest interval around T_ref on which taylor_log_error stays within
/// `tol`, found by a scan in xi (step 1e-3) refined by bisection. The lower
/// end is capped at T_ref / 2.
TaylorValidity taylor_log_validity(double T_ref, double tol);

}  // namespace thermohom
