#include "thermohom/fem.hpp"

#include "thermohom/errors.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <sstream>

namespace thermohom {
namespace {

std::span<const Point> element_coords(const std::array<Point, kMaxElementNodes>& c, int order) {
  return {c.data(), static_cast<std::size_t>(nodes_per_element(order))};
}

ElementPoint checked_point(const Mesh& mesh, std::size_t cell,
                           const std::array<Point, kMaxElementNodes>& coords,
                           const QuadraturePoint& qp) {
  ElementPoint p = map_point(element_coords(coords, mesh.order), mesh.order, qp);
  if (p.det_jacobian <= 0.0) {
    const Point c = mesh.centroid(cell);
    std::ostringstream msg;
    msg << "inverted element " << cell << " near (" << c.x << ", " << c.y << ")";
    throw GeometryError(msg.str());
  }
  return p;
}

const RegionMaterial& material_of(const Mesh& mesh, const MaterialTable& materials,
                                  std::size_t cell) {
  const int region = mesh.regions.empty() ? 0 : mesh.regions[cell];
  if (region < 0 || static_cast<std::size_t>(region) >= materials.size()) {
    throw ConfigError("no material for region " + std::to_string(region));
  }
  return materials[static_cast<std::size_t>(region)];
}

}  // namespace

DofMap::DofMap(const Mesh& mesh, int components) : components_(components) {
  if (components != 1 && components != 2) throw Error("a DOF map has one or two components");
  const std::size_t nn = mesh.num_nodes();
  const auto& master = mesh.periodic.master;
  if (!master.empty() && master.size() != nn) throw PeriodicityError("periodic map size mismatch");

  std::vector<int> node_reduced(nn, -1);
  int next = 0;
  for (std::size_t v = 0; v < nn; ++v) {
    const int m = master.empty() ? static_cast<int>(v) : master[v];
    if (m == static_cast<int>(v)) node_reduced[v] = next++;
  }
  for (std::size_t v = 0; v < nn; ++v) {
    const int m = master.empty() ? static_cast<int>(v) : master[v];
    if (!master.empty() && master[m] != m) throw PeriodicityError("periodic master is itself a follower");
    node_reduced[v] = node_reduced[m];
  }
  num_reduced_ = static_cast<std::size_t>(next) * components;
  full_to_reduced_.resize(nn * components);
  for (std::size_t v = 0; v < nn; ++v)
    for (int c = 0; c < components; ++c)
      full_to_reduced_[v * components + c] = node_reduced[v] * components + c;
}

SparseMatrix DofMap::prolongation() const {
  SparseMatrix P(static_cast<Eigen::Index>(num_full()), static_cast<Eigen::Index>(num_reduced_));
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(num_full());
  for (std::size_t i = 0; i < num_full(); ++i)
    t.emplace_back(static_cast<int>(i), full_to_reduced_[i], 1.0);
  P.setFromTriplets(t.begin(), t.end());
  return P;
}

Eigen::VectorXd DofMap::expand(const Eigen::VectorXd& reduced) const {
  Eigen::VectorXd full(static_cast<Eigen::Index>(num_full()));
  for (std::size_t i = 0; i < num_full(); ++i) full[i] = reduced[full_to_reduced_[i]];
  return full;
}

Eigen::VectorXd DofMap::fold(const Eigen::VectorXd& full) const {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_reduced_));
  for (std::size_t i = 0; i < num_full(); ++i) r[full_to_reduced_[i]] += full[i];
  return r;
}

SparseMatrix assemble_bilinear(const Mesh& mesh, const MaterialTable& materials, Operator kind) {
  const int comps = kind == Operator::elasticity ? 2 : 1;
  const int npe = mesh.nodes_per_cell();
  const int ndof = npe * comps;
  const auto rule = triangle_rule(mesh.order);

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(mesh.num_cells() * static_cast<std::size_t>(ndof * ndof));
  Eigen::MatrixXd ke(ndof, ndof);
  for (std::size_t e = 0; e < mesh.num_cells(); ++e) {
    const RegionMaterial& mat = material_of(mesh, materials, e);
    const auto coords = mesh.cell_coordinates(e);
    ke.setZero();
    for (const auto& qp : rule) {
      const ElementPoint p = checked_point(mesh, e, coords, qp);
      if (kind == Operator::elasticity) {
        for (int a = 0; a < npe; ++a)
          for (int b = 0; b < npe; ++b)
            for (int i = 0; i < 2; ++i)
              for (int k = 0; k < 2; ++k) {
                double s = 0.0;
                for (int j = 0; j < 2; ++j)
                  for (int l = 0; l < 2; ++l) s += mat.C(i, j, k, l) * p.dN[a][j] * p.dN[b][l];
                ke(a * 2 + i, b * 2 + k) += p.jxw * s;
              }
      } else {
        for (int a = 0; a < npe; ++a)
          for (int b = 0; b < npe; ++b) {
            double s = 0.0;
            for (int i = 0; i < 2; ++i)
              for (int k = 0; k < 2; ++k) s += mat.kappa(i, k) * p.dN[a][i] * p.dN[b][k];
            ke(a, b) += p.jxw * s;
          }
      }
    }
    const auto& cell = mesh.cells[e];
    for (int r = 0; r < ndof; ++r)
      for (int c = 0; c < ndof; ++c)
        triplets.emplace_back(cell[r / comps] * comps + r % comps,
                              cell[c / comps] * comps + c % comps, ke(r, c));
  }
  const auto n = static_cast<Eigen::Index>(mesh.num_nodes() * comps);
  SparseMatrix K(n, n);
  K.setFromTriplets(triplets.begin(), triplets.end());
  return K;
}

Eigen::VectorXd assemble_linear(const Mesh& mesh, int components, const LoadFunction& load) {
  const int npe = mesh.nodes_per_cell();
  const auto rule = triangle_rule(mesh.order);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.num_nodes() * components));
  for (std::size_t e = 0; e < mesh.num_cells(); ++e) {
    const auto coords = mesh.cell_coordinates(e);
    const auto& cell = mesh.cells[e];
    for (const auto& qp : rule) {
      const ElementPoint p = checked_point(mesh, e, coords, qp);
      const PointLoad q = load(e, p);
      for (int a = 0; a < npe; ++a)
        for (int i = 0; i < components; ++i)
          f[cell[a] * components + i] +=
              p.jxw * (q.flux[i][0] * p.dN[a][0] + q.flux[i][1] * p.dN[a][1] + q.body[i] * p.N[a]);
    }
  }
  return f;
}

SparseMatrix reduce_periodic(const SparseMatrix& full, const DofMap& dofs) {
  const SparseMatrix P = dofs.prolongation();
  SparseMatrix r = SparseMatrix(P.transpose()) * full * P;
  r.makeCompressed();
  return r;
}

Eigen::VectorXd reduce_periodic(const Eigen::VectorXd& full, const DofMap& dofs) {
  return dofs.fold(full);
}

Eigen::VectorXd node_weights(const Mesh& mesh) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.num_nodes()));
  const auto rule = triangle_rule(mesh.order);
  for (std::size_t e = 0; e < mesh.num_cells(); ++e) {
    const auto coords = mesh.cell_coordinates(e);
    for (const auto& qp : rule) {
      const ElementPoint p = checked_point(mesh, e, coords, qp);
      for (int a = 0; a < mesh.nodes_per_cell(); ++a) w[mesh.cells[e][a]] += p.jxw * p.N[a];
    }
  }
  return w;
}

struct ConstrainedSolver::Impl {
  SparseMatrix K;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt;
  bool constrained = false;
  double tolerance = 1e-10;
  int components = 1;
  std::vector<Eigen::Index> pins;
  std::vector<Eigen::VectorXd> B;       // per component, folded shape-function integrals
  std::vector<Eigen::VectorXd> ones;    // per component, constant mode
  double volume = 0.0;
};

ConstrainedSolver::ConstrainedSolver(const SparseMatrix& reduced, const DofMap& dofs,
                                     const Eigen::VectorXd& weights, bool mean_constraint,
                                     double tolerance)
    : impl_(std::make_unique<Impl>()) {
  Impl& s = *impl_;
  if (reduced.rows() != static_cast<Eigen::Index>(dofs.num_reduced()) ||
      reduced.cols() != reduced.rows()) {
    throw SolverError("reduced matrix does not match the DOF map");
  }
  s.K = reduced;
  s.constrained = mean_constraint;
  s.tolerance = tolerance;
  s.components = dofs.components();

  const SparseMatrix asym = SparseMatrix(s.K.transpose()) - s.K;
  const double knorm = s.K.norm();
  symmetry_error_ = knorm > 0.0 ? asym.norm() / knorm : 0.0;
  if (symmetry_error_ > 1e-12) {
    throw SolverError("operator is not symmetric (relative asymmetry " +
                      std::to_string(symmetry_error_) + ")");
  }

  SparseMatrix A = s.K;
  if (mean_constraint) {
    const auto n = reduced.rows();
    std::vector<Eigen::Index> component_of(static_cast<std::size_t>(n), -1);
    for (std::size_t i = 0; i < dofs.num_full(); ++i)
      component_of[dofs.full_to_reduced()[i]] = static_cast<Eigen::Index>(i % dofs.components());
    for (int c = 0; c < s.components; ++c) {
      Eigen::VectorXd full = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dofs.num_full()));
      for (Eigen::Index v = 0; v < weights.size(); ++v) full[v * s.components + c] = weights[v];
      s.B.push_back(dofs.fold(full));
      Eigen::VectorXd one = Eigen::VectorXd::Zero(n);
      for (Eigen::Index i = 0; i < n; ++i)
        if (component_of[i] == c) one[i] = 1.0;
      s.ones.push_back(one);
      s.pins.push_back(dofs.full_to_reduced()[static_cast<std::size_t>(c)]);
    }
    s.volume = weights.sum();
    std::vector<char> pinned(static_cast<std::size_t>(n), 0);
    for (auto p : s.pins) pinned[p] = 1;
    A.prune([&](Eigen::Index r, Eigen::Index c, double) { return !pinned[r] && !pinned[c]; });
    for (auto p : s.pins) A.coeffRef(p, p) = 1.0;
    A.makeCompressed();
  }
  s.ldlt.compute(A);
  if (s.ldlt.info() != Eigen::Success) throw SolverError("factorization failed");
  if (s.ldlt.vectorD().minCoeff() <= 0.0) {
    throw SolverError("factorization is not positive definite");
  }
}

ConstrainedSolver::~ConstrainedSolver() = default;
ConstrainedSolver::ConstrainedSolver(ConstrainedSolver&&) noexcept = default;
ConstrainedSolver& ConstrainedSolver::operator=(ConstrainedSolver&&) noexcept = default;

std::size_t ConstrainedSolver::size() const { return static_cast<std::size_t>(impl_->K.rows()); }

Eigen::VectorXd ConstrainedSolver::solve(const Eigen::VectorXd& f, SolveReport* report) const {
  const Impl& s = *impl_;
  if (f.size() != s.K.rows()) throw SolverError("right-hand side has the wrong size");
  const double fnorm = f.norm();
  SolveReport rep;
  if (fnorm == 0.0) {
    if (report) *report = rep;
    return Eigen::VectorXd::Zero(f.size());
  }

  Eigen::VectorXd x;
  Eigen::VectorXd r;
  if (s.constrained) {
    Eigen::VectorXd g = f;
    std::vector<double> lambda(static_cast<std::size_t>(s.components));
    for (int c = 0; c < s.components; ++c) {
      lambda[c] = s.ones[c].dot(f) / s.ones[c].dot(s.B[c]);
      g -= lambda[c] * s.B[c];
    }
    for (auto p : s.pins) g[p] = 0.0;
    x = s.ldlt.solve(g);
    for (int c = 0; c < s.components; ++c) x -= (s.B[c].dot(x) / s.B[c].dot(s.ones[c])) * s.ones[c];
    r = s.K * x - f;
    for (int c = 0; c < s.components; ++c) r += lambda[c] * s.B[c];
    const double xmax = x.lpNorm<Eigen::Infinity>();
    for (int c = 0; c < s.components; ++c) {
      const double m = xmax > 0.0 ? std::abs(s.B[c].dot(x)) / (s.volume * xmax) : 0.0;
      rep.mean_residual = std::max(rep.mean_residual, m);
    }
  } else {
    x = s.ldlt.solve(f);
    r = s.K * x - f;
  }
  rep.residual = r.norm() / fnorm;
  if (!std::isfinite(rep.residual) || rep.residual > s.tolerance ||
      rep.mean_residual > s.tolerance) {
    std::ostringstream msg;
    msg << "linear solve residual " << rep.residual << " (mean " << rep.mean_residual
        << ") exceeds tolerance " << s.tolerance;
    throw SolverError(msg.str());
  }
  if (report) *report = rep;
  return x;
}

Eigen::VectorXd solve_spd(const SparseMatrix& reduced, const DofMap& dofs,
                          const Eigen::VectorXd& weights, const Eigen::VectorXd& rhs,
                          bool mean_constraint, SolveReport* report) {
  return ConstrainedSolver(reduced, dofs, weights, mean_constraint).solve(rhs, report);
}

Tensor2 volume_moment(const Mesh& mesh, MomentDomain domain) {
  Tensor2 I;
  if (domain == MomentDomain::cell) {
    const double L = mesh.cell.edge_length;
    I(0, 0) = I(1, 1) = L * L * L * L / 12.0;
    return I;
  }
  const Point xc = mesh.cell.center;
  const auto rule = triangle_rule(mesh.order);
  for (std::size_t e = 0; e < mesh.num_cells(); ++e) {
    const auto coords = mesh.cell_coordinates(e);
    for (const auto& qp : rule) {
      const ElementPoint p = checked_point(mesh, e, coords, qp);
      const double y[2] = {p.x.x - xc.x, p.x.y - xc.y};
      for (int k = 0; k < 2; ++k)
        for (int n = 0; n < 2; ++n) I(k, n) += p.jxw * y[k] * y[n];
    }
  }
  return I;
}

double solid_volume(const Mesh& mesh) {
  double v = 0.0;
  const auto rule = triangle_rule(mesh.order);
  for (std::size_t e = 0; e < mesh.num_cells(); ++e) {
    const auto coords = mesh.cell_coordinates(e);
    for (const auto& qp : rule) v += checked_point(mesh, e, coords, qp).jxw;
  }
  return v;
}

}  // namespace thermohom
