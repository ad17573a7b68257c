#include "thermohom/errors.hpp"
#include "thermohom/fem.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace thermohom;

namespace {

MaterialTable aluminium_table() { return {RegionMaterial::from(aluminium())}; }

Mesh square(int n, int order) { return generate_mesh(make_preset(Preset::homogeneous), n, order); }

// Nodal error of the periodic solution of -kappa lap u = f with
// u = sin(2 pi x) cos(2 pi y), which has zero mean over the cell.
double poisson_error(const Mesh& m) {
  const MaterialTable mats = aluminium_table();
  const double kappa = mats[0].kappa(0, 0);
  const double k = 2.0 * std::numbers::pi;
  auto exact = [k](Point p) { return std::sin(k * p.x) * std::cos(k * p.y); };
  const DofMap dofs(m, 1);
  const SparseMatrix A = reduce_periodic(assemble_bilinear(m, mats, Operator::conduction), dofs);
  const Eigen::VectorXd b = assemble_linear(m, 1, [&](std::size_t, const ElementPoint& p) {
    PointLoad load;
    load.body[0] = 2.0 * k * k * kappa * exact(p.x);
    return load;
  });
  const Eigen::VectorXd u = dofs.expand(solve_spd(A, dofs, node_weights(m), dofs.fold(b), true));
  double err = 0.0;
  for (std::size_t n = 0; n < m.num_nodes(); ++n) err = std::max(err, std::abs(u[n] - exact(m.nodes[n])));
  return err;
}

}  // namespace

TEST(DofMap, ReducedCountExcludesFollowers) {
  const Mesh m = square(4, 1);
  const DofMap d(m, 2);
  EXPECT_EQ(d.num_full(), 2 * m.num_nodes());
  EXPECT_EQ(d.num_reduced(), 2 * (m.num_nodes() - m.periodic.follower_count()));
  for (std::size_t n = 0; n < m.num_nodes(); ++n) {
    const int master = m.periodic.master[n];
    EXPECT_EQ(d.reduced(static_cast<int>(n), 1), d.reduced(master, 1));
  }
}

TEST(DofMap, FoldIsTransposeOfExpand) {
  const Mesh m = square(3, 2);
  const DofMap d(m, 2);
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(d.num_reduced()), -1.0, 2.0);
  const Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(d.num_full()), 0.5, 3.0);
  EXPECT_NEAR(d.expand(x).dot(y), x.dot(d.fold(y)), 1e-12);
  const SparseMatrix P = d.prolongation();
  EXPECT_NEAR((P * x - d.expand(x)).norm(), 0.0, 1e-15);
}

TEST(Assembly, SymmetricWithRigidKernel) {
  const Mesh m = generate_mesh(make_preset(Preset::single), 16, 2);
  const MaterialTable mats = aluminium_table();
  for (Operator op : {Operator::elasticity, Operator::conduction}) {
    const int comps = op == Operator::elasticity ? 2 : 1;
    const DofMap d(m, comps);
    const SparseMatrix K = reduce_periodic(assemble_bilinear(m, mats, op), d);
    const SparseMatrix Kt = K.transpose();
    EXPECT_LT((K - Kt).norm(), 1e-12 * K.norm());
    // constant translations are the only periodic zero-energy modes
    for (int c = 0; c < comps; ++c) {
      Eigen::VectorXd t = Eigen::VectorXd::Zero(K.rows());
      for (Eigen::Index i = c; i < t.size(); i += comps) t[i] = 1.0;
      EXPECT_LT((K * t).norm(), 1e-9 * K.norm());
    }
  }
}

TEST(Assembly, NodeWeightsSumToSolidArea) {
  const Mesh m = generate_mesh(make_preset(Preset::uniform4), 32, 2);
  EXPECT_NEAR(node_weights(m).sum(), solid_volume(m), 1e-12);
}

TEST(Assembly, MissingRegionMaterial) {
  Mesh m = square(2, 1);
  m.regions.assign(m.num_cells(), 0);
  m.regions[3] = 4;
  EXPECT_THROW(assemble_bilinear(m, aluminium_table(), Operator::conduction), ConfigError);
}

TEST(Solver, ManufacturedPeriodicPoissonConverges) {
  const double e1 = poisson_error(square(8, 2));
  const double e2 = poisson_error(square(16, 2));
  EXPECT_LT(e2, 2e-3);
  EXPECT_GT(e1 / e2, 6.0);  // about h^3 at nodes for P2
  const double p1 = poisson_error(square(32, 1));
  EXPECT_LT(p1, 1e-2);
}

TEST(Solver, SolutionHasZeroMeanAndSmallResidual) {
  const Mesh m = generate_mesh(make_preset(Preset::single), 16, 2);
  const MaterialTable mats = aluminium_table();
  const DofMap d(m, 2);
  const SparseMatrix K = reduce_periodic(assemble_bilinear(m, mats, Operator::elasticity), d);
  const Eigen::VectorXd w = node_weights(m);
  const ConstrainedSolver solver(K, d, w, true);
  EXPECT_LT(solver.symmetry_error(), 1e-12);
  // a load with nonzero resultant is projected by the multiplier
  const Eigen::VectorXd full = assemble_linear(m, 2, [](std::size_t, const ElementPoint& p) {
    PointLoad l;
    l.flux[0][0] = p.x.y;
    l.body[1] = 1.0 + p.x.x;
    return l;
  });
  SolveReport report;
  const Eigen::VectorXd x = d.expand(solver.solve(d.fold(full), &report));
  EXPECT_LT(report.residual, 1e-10);
  EXPECT_LT(report.mean_residual, 1e-12);
  double mean[2] = {0.0, 0.0};
  for (std::size_t n = 0; n < m.num_nodes(); ++n)
    for (int c = 0; c < 2; ++c) mean[c] += w[static_cast<Eigen::Index>(n)] * x[static_cast<Eigen::Index>(2 * n + c)];
  EXPECT_LT(std::abs(mean[0]), 1e-12 * x.lpNorm<Eigen::Infinity>());
  EXPECT_LT(std::abs(mean[1]), 1e-12 * x.lpNorm<Eigen::Infinity>());
}

TEST(Solver, RejectsAsymmetricOperator) {
  const Mesh m = square(4, 1);
  const DofMap d(m, 1);
  SparseMatrix K = reduce_periodic(assemble_bilinear(m, aluminium_table(), Operator::conduction), d);
  K.coeffRef(0, 1) += 1.0;
  EXPECT_THROW(ConstrainedSolver(K, d, node_weights(m), true), SolverError);
}
