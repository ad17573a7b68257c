#include "thermohom/materials.hpp"

#include "thermohom/errors.hpp"

#include <cmath>
#include <string>

namespace thermohom {

Tensor4 plane_stress_stiffness(double E, double nu) {
  if (!(E > 0.0)) throw ConfigError("Young's modulus must be positive");
  if (!(nu > -1.0 && nu < 0.5)) throw ConfigError("Poisson's ratio must lie in (-1, 0.5)");
  const double f = E / (1.0 - nu * nu);
  const double shear = E / (2.0 * (1.0 + nu));
  Tensor4 C;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k)
        for (int l = 0; l < kDim; ++l)
          C(i, j, k, l) = f * nu * kronecker(i, j) * kronecker(k, l) +
                          shear * (kronecker(i, k) * kronecker(j, l) +
                                   kronecker(i, l) * kronecker(j, k));
  // f nu + 2 shear = f, so C_1111 = E / (1 - nu^2).
  return C;
}

Tensor2 thermal_stress(const Tensor4& C, const Tensor2& alpha) { return contract(C, alpha); }

double heat_capacity_parameter(double c, double T) {
  if (!(T > 0.0)) throw ConfigError("temperature must be positive");
  return c / T;
}

void MicroMaterial::validate() const {
  plane_stress_stiffness(E, nu);
  if (!(rho > 0.0)) throw ConfigError("density must be positive");
  if (!(c >= 0.0)) throw ConfigError("heat capacity must be nonnegative");
  if (!(kappa > 0.0) && !kappa_tensor) throw ConfigError("conductivity must be positive");
  if (!(T_ref > 0.0) || !(T_eval > 0.0)) throw ConfigError("temperatures must be positive");
  for (const auto* t : {&alpha_tensor, &kappa_tensor})
    if (*t && std::abs((**t)(0, 1) - (**t)(1, 0)) > 1e-12 * (*t)->max_abs()) {
      throw ConfigError("anisotropic alpha and kappa must be symmetric");
    }
  if (kappa_tensor) {
    const Tensor2& k = *kappa_tensor;
    if (!(k(0, 0) > 0.0) || !(k(0, 0) * k(1, 1) - k(0, 1) * k(1, 0) > 0.0)) {
      throw ConfigError("conductivity tensor must be positive definite");
    }
  }
}

RegionMaterial RegionMaterial::from(const MicroMaterial& m) {
  m.validate();
  RegionMaterial r;
  r.C = m.stiffness();
  r.beta = m.thermal_stress();
  r.kappa = m.conductivity();
  r.rho = m.rho;
  r.c = m.c;
  r.a = m.heat_capacity_parameter();
  return r;
}

double taylor_log_error(double xi) {
  const double u = (xi - 1.0) / xi;
  return std::abs(std::log(xi) - (u + 0.5 * u * u));
}

namespace {

// First xi from 1 towards `limit` where the error exceeds tol; returns
// `limit` if none.
double scan_edge(double tol, double limit) {
  constexpr double kStep = 1e-3;
  const double dir = limit > 1.0 ? 1.0 : -1.0;
  double inside = 1.0;
  for (double xi = 1.0 + dir * kStep; dir * (limit - xi) >= 0.0; xi += dir * kStep) {
    if (taylor_log_error(xi) > tol) {
      double a = inside, b = xi;
      for (int it = 0; it < 100; ++it) {
        const double m = 0.5 * (a + b);
        (taylor_log_error(m) > tol ? b : a) = m;
      }
      return a;
    }
    inside = xi;
  }
  return limit;
}

}  // namespace

TaylorValidity taylor_log_validity(double T_ref, double tol) {
  if (!(T_ref > 0.0)) throw ConfigError("reference temperature must be positive");
  if (!(tol > 0.0)) throw ConfigError("tolerance must be positive");
  constexpr double kLowerCap = 0.5;
  constexpr double kUpperLimit = 100.0;
  return {T_ref * scan_edge(tol, kLowerCap), T_ref * scan_edge(tol, kUpperLimit), tol};
}

}  // namespace thermohom
