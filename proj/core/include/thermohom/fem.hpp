#pragma once

// Assembly, periodic reduction and constrained solves for the two bilinear
// forms of the cell problems.

#include "thermohom/element.hpp"
#include "thermohom/materials.hpp"
#include "thermohom/mesh.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace thermohom {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Full DOF of (node, component) is node * components + component. Reduced
/// DOFs number the periodic masters in node order.
class DofMap {
 public:
  DofMap(const Mesh& mesh, int components);

  int components() const { return components_; }
  std::size_t num_full() const { return full_to_reduced_.size(); }
  std::size_t num_reduced() const { return num_reduced_; }
  int reduced(int node, int component) const {
    return full_to_reduced_[static_cast<std::size_t>(node * components_ + component)];
  }
  const std::vector<int>& full_to_reduced() const { return full_to_reduced_; }

  /// 0/1 prolongation P with x_full = P x_reduced.
  SparseMatrix prolongation() const;
  Eigen::VectorXd expand(const Eigen::VectorXd& reduced) const;
  /// P^T b: follower entries are summed into their master.
  Eigen::VectorXd fold(const Eigen::VectorXd& full) const;

 private:
  int components_;
  std::size_t num_reduced_ = 0;
  std::vector<int> full_to_reduced_;
};

enum class Operator { elasticity, conduction };

/// Full (unreduced) stiffness: elasticity integrates C_ijkl v_k,l w_i,j and
/// conduction kappa_ik v,k w,i. `materials` is indexed by Mesh::regions.
/// Throws GeometryError on an inverted element and ConfigError on a region
/// without material.
SparseMatrix assemble_bilinear(const Mesh& mesh, const MaterialTable& materials, Operator kind);

/// Integrand of a linear form at one quadrature point:
/// flux[i][j] * w_i,j + body[i] * w_i (i ranges over components).
struct PointLoad {
  std::array<std::array<double, 2>, 2> flux{};
  std::array<double, 2> body{};
};
using LoadFunction = std::function<PointLoad(std::size_t cell, const ElementPoint& point)>;

/// Full (unreduced) right-hand side for `components` unknowns per node.
Eigen::VectorXd assemble_linear(const Mesh& mesh, int components, const LoadFunction& load);

/// P^T A P
SparseMatrix reduce_periodic(const SparseMatrix& full, const DofMap& dofs);
Eigen::VectorXd reduce_periodic(const Eigen::VectorXd& full, const DofMap& dofs);

/// Integral of each shape function over the solid, per node.
Eigen::VectorXd node_weights(const Mesh& mesh);

struct SolveReport {
  double residual = 0.0;       // ||A x + B lambda - b|| / ||b|| on the augmented system
  double mean_residual = 0.0;  // max_c |integral of component c| / (V ||x||_inf)
};

/// Direct solver for a reduced periodic operator, factorized once and reused
/// for several right-hand sides.
///
/// With the mean constraint, the augmented system
///   [K  B] [x]   [f]
///   [B' 0] [l] = [0],  B_c = integral of the component-c shape functions,
/// is solved exactly: the multipliers follow from the constant-mode kernel
/// of K, the remaining singular system is solved with one DOF per component
/// held at zero, and the result is shifted to zero mean.
class ConstrainedSolver {
 public:
  ConstrainedSolver(const SparseMatrix& reduced, const DofMap& dofs, const Eigen::VectorXd& weights,
                    bool mean_constraint, double tolerance = 1e-10);
  ~ConstrainedSolver();
  ConstrainedSolver(ConstrainedSolver&&) noexcept;
  ConstrainedSolver& operator=(ConstrainedSolver&&) noexcept;

  /// Throws SolverError if the residual exceeds the tolerance.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs, SolveReport* report = nullptr) const;

  std::size_t size() const;
  double symmetry_error() const { return symmetry_error_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double symmetry_error_ = 0.0;
};

/// One-shot convenience wrapper.
Eigen::VectorXd solve_spd(const SparseMatrix& reduced, const DofMap& dofs,
                          const Eigen::VectorXd& weights, const Eigen::VectorXd& rhs,
                          bool mean_constraint, SolveReport* report = nullptr);

enum class MomentDomain { solid, cell };

/// I_kn = integral of (X - X_c)_k (X - X_c)_n over the solid (quadrature) or
/// over the full square (closed form L^4 / 12 delta_kn).
Tensor2 volume_moment(const Mesh& mesh, MomentDomain domain = MomentDomain::solid);

/// Summed element area of the solid.
double solid_volume(const Mesh& mesh);

}  // namespace thermohom
