#include "lbs/assembly.hpp"
#include "lbs/harmonics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace lbs;

namespace {

FeSpace space_on(const SurfaceDescription& s, CellKind kind, int level, int k, int r, int segments = 4) {
  BaseMeshOptions o;
  o.cell_kind = kind;
  o.level = level;
  o.circle_segments = segments;
  const auto pts = default_node_family(kind) == NodeFamily::GaussLobatto ? InterpolationPointSet::gauss_lobatto(k)
                                                                        : InterpolationPointSet::equispaced(k);
  auto lifted = std::make_shared<LiftedMesh>(build_lift(s, make_base(s, o), k, pts));
  return build_space(lifted, r);
}

// Smallest nonzero generalized eigenvalues by a dense solve, constant mode dropped.
Eigen::VectorXd dense_spectrum(const AssembledForms& f, int count) {
  const Eigen::MatrixXd a(f.stiffness), m(f.mass);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, m);
  return es.eigenvalues().segment(1, count);
}

double max_abs(const SparseMatrix& a) {
  double v = 0.0;
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) v = std::max(v, std::abs(it.value()));
  return v;
}

}  // namespace

TEST_CASE("DOF counts") {
  const auto circle = SurfaceDescription::circle();
  for (int n : {3, 5, 8, 17}) CHECK(space_on(circle, CellKind::Segment, 0, 1, 1, n).n_dofs() == n);
  CHECK(space_on(circle, CellKind::Segment, 0, 2, 3, 8).n_dofs() == 24);

  const auto sphere = SurfaceDescription::sphere();
  CHECK(space_on(sphere, CellKind::Triangle, 0, 1, 1).n_dofs() == 12);
  CHECK(space_on(sphere, CellKind::Triangle, 0, 1, 2).n_dofs() == 42);
  CHECK(space_on(sphere, CellKind::Triangle, 0, 2, 3).n_dofs() == 12 + 2 * 30 + 20);
  CHECK(space_on(sphere, CellKind::Quad, 0, 1, 2).n_dofs() == 8 + 12 + 6);
  CHECK(space_on(sphere, CellKind::Quad, 1, 2, 3).n_dofs() == 26 + 2 * 48 + 4 * 24);

  // every DOF touched by some cell
  const FeSpace s = space_on(sphere, CellKind::Triangle, 1, 2, 3);
  std::vector<int> touched(s.n_dofs(), 0);
  for (const auto& c : s.dofs.cell_nodes)
    for (int g : c) touched[g] = 1;
  CHECK(std::count(touched.begin(), touched.end(), 0) == 0);
}

TEST_CASE("A 1 = 0, symmetry and area") {
  struct Case {
    SurfaceDescription s;
    CellKind kind;
    int k, r;
  };
  for (const Case& c : {Case{SurfaceDescription::circle(), CellKind::Segment, 3, 2},
                        Case{SurfaceDescription::sphere(), CellKind::Triangle, 2, 3},
                        Case{SurfaceDescription::sphere(), CellKind::Quad, 3, 2},
                        Case{SurfaceDescription::torus(2.0, 1.0), CellKind::Quad, 2, 2},
                        Case{SurfaceDescription::implicit("heart"), CellKind::Triangle, 2, 2}}) {
    // implicit surfaces need a finer base to lift inside the tubular neighbourhood
    const int level = c.s.kind() == SurfaceKind::Implicit ? 3 : 1;
    const FeSpace space = space_on(c.s, c.kind, level, c.k, c.r, 6);
    const AssembledForms f = assemble(space);
    const double na = max_abs(f.stiffness);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(space.n_dofs());
    INFO(c.s.name());
    CHECK((f.stiffness * ones).cwiseAbs().maxCoeff() <= 1e-12 * na);
    CHECK(max_abs(SparseMatrix(f.stiffness - SparseMatrix(f.stiffness.transpose()))) <= 1e-12 * na);
    CHECK(max_abs(SparseMatrix(f.mass - SparseMatrix(f.mass.transpose()))) <= 1e-12 * max_abs(f.mass));
    CHECK(f.area == doctest::Approx(ones.dot(f.mass * ones)).epsilon(1e-14));
    CHECK((f.mass_row_sums - f.mass * ones).norm() < 1e-14 * f.area);
    // positive definite mass
    Eigen::SimplicialLLT<SparseMatrix> llt(f.mass);
    CHECK(llt.info() == Eigen::Success);
  }
}

TEST_CASE("area of the polygonal and curved circle") {
  const auto circle = SurfaceDescription::circle();
  const AssembledForms sq = assemble(space_on(circle, CellKind::Segment, 0, 1, 1, 4));
  CHECK(sq.area == doctest::Approx(4 * std::sqrt(2.0)).epsilon(1e-15));
  const AssembledForms fine = assemble(space_on(circle, CellKind::Segment, 4, 3, 1, 4));
  CHECK(std::abs(fine.area - 2 * M_PI) < 1e-8);
  const AssembledForms sph = assemble(space_on(SurfaceDescription::sphere(), CellKind::Quad, 3, 3, 1));
  CHECK(std::abs(sph.area - 4 * M_PI) < 1e-6);
}

TEST_CASE("regular polygon, P1: periodic Fourier symbol") {
  for (int n : {8, 16}) {
    const AssembledForms f = assemble(space_on(SurfaceDescription::circle(), CellKind::Segment, 0, 1, 1, n));
    const double s = 2 * std::sin(M_PI / n);
    std::vector<double> symbol;
    for (int j = 1; j < n; ++j) {
      const double th = 2 * M_PI * j / n;
      symbol.push_back(6 * (1 - std::cos(th)) / (s * s * (2 + std::cos(th))));
    }
    std::sort(symbol.begin(), symbol.end());
    const Eigen::VectorXd lam = dense_spectrum(f, n - 1);
    for (int j = 0; j < n - 1; ++j) CHECK(std::abs(lam(j) - symbol[j]) <= 1e-10 * symbol[j]);
    // entries of the tridiagonal pencil
    CHECK(f.stiffness.coeff(0, 0) == doctest::Approx(2 / s).epsilon(1e-14));
    CHECK(f.mass.coeff(0, 0) == doctest::Approx(4 * s / 6).epsilon(1e-14));
  }
}

TEST_CASE("eigenvalues scale as 1/R^2") {
  const AssembledForms f1 = assemble(space_on(SurfaceDescription::sphere(1.0), CellKind::Quad, 1, 2, 2));
  const AssembledForms f2 = assemble(space_on(SurfaceDescription::sphere(2.0), CellKind::Quad, 1, 2, 2));
  const Eigen::VectorXd l1 = dense_spectrum(f1, 10), l2 = dense_spectrum(f2, 10);
  for (int i = 0; i < 10; ++i) CHECK(std::abs(l1(i) / l2(i) - 4.0) < 1e-8);
  CHECK(f2.area / f1.area == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("quadrature refinement leaves eigenvalues unchanged") {
  // flat P2 triangles: the default rule already integrates exactly
  const FeSpace flat = space_on(SurfaceDescription::sphere(), CellKind::Triangle, 1, 1, 2);
  const QuadratureRule base_rule = default_assembly_rule(flat);
  const Eigen::VectorXd a = dense_spectrum(assemble(flat), 10);
  const Eigen::VectorXd b =
      dense_spectrum(assemble(flat, gauss_rule_for_degree(CellKind::Triangle, 2 * base_rule.exactness_degree)), 10);
  for (int i = 0; i < 10; ++i) CHECK(std::abs(a(i) - b(i)) <= 1e-10 * a(i));

  // curved quads: rational integrands, the change stays far below the discretization error
  const FeSpace curved = space_on(SurfaceDescription::sphere(), CellKind::Quad, 1, 2, 2);
  const Eigen::VectorXd c = dense_spectrum(assemble(curved), 3);
  const Eigen::VectorXd d = dense_spectrum(
      assemble(curved, gauss_rule_for_degree(CellKind::Quad, 2 * default_assembly_rule(curved).exactness_degree)), 3);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(c(i) - d(i)) <= 1e-3 * std::abs(c(i) - 2.0));
}

TEST_CASE("thread count does not change the matrices") {
  const FeSpace space = space_on(SurfaceDescription::sphere(), CellKind::Quad, 2, 2, 3);
  const AssembledForms one = assemble(space, std::nullopt, 1);
  const AssembledForms many = assemble(space, std::nullopt, 3);
  CHECK(max_abs(SparseMatrix(one.stiffness - many.stiffness)) == 0.0);
  CHECK(max_abs(SparseMatrix(one.mass - many.mass)) == 0.0);
  CHECK(one.area == many.area);
}

TEST_CASE("surface gradients on a flat tilted triangle") {
  const Vec3 x0(0.1, 0.2, 0.3), x1(1.0, 0.4, -0.2), x2(0.3, 1.1, 0.5);
  TangentMatrix jac(3, 2);
  jac.col(0) = x1 - x0;
  jac.col(1) = x2 - x0;
  const ReferenceElement el(CellKind::Triangle, 1, NodeFamily::Equispaced);
  const auto g = surface_gradients(jac, el.gradients(RefPoint(0.2, 0.2)));
  const Vec3 xs[3] = {x0, x1, x2};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(g.col(i).dot(xs[j] - x0) == doctest::Approx((i == j) - (i == 0)).epsilon(1e-14));
  const Vec3 n = jac.col(0).cross(jac.col(1));
  for (int i = 0; i < 3; ++i) CHECK(std::abs(g.col(i).dot(n)) < 1e-14);
}

TEST_CASE("Galerkin orthogonality probe") {
  // -Delta u + u = 3 u for the degree-one harmonic u = z on the unit sphere
  std::vector<double> err;
  for (int level = 1; level <= 3; ++level) {
    const FeSpace space = space_on(SurfaceDescription::sphere(), CellKind::Quad, level, 2, 2);
    const AssembledForms f = assemble(space);
    const SparseMatrix k = f.stiffness + f.mass;
    const QuadratureRule rule = default_assembly_rule(space);
    const TabulatedBasis ftab = space.element.tabulate(rule);
    const TabulatedBasis gtab = space.lifted->element.tabulate(rule);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(space.n_dofs());
    CellGeometry geo;
    for (std::size_t c = 0; c < space.num_cells(); ++c) {
      evaluate_cell_geometry(*space.lifted, static_cast<int>(c), gtab, geo);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const double fval = 3.0 * geo.x[q].normalized().z();
        for (std::size_t i = 0; i < space.dofs.cell_nodes[c].size(); ++i)
          b(space.dofs.cell_nodes[c][i]) += rule.weights[q] * geo.area[q] * fval * ftab.values(q, i);
      }
    }
    Eigen::SimplicialLDLT<SparseMatrix> solver(k);
    const Eigen::VectorXd u = solver.solve(b);
    CHECK((k * u - b).norm() <= 1e-12 * b.norm());
    // nodal comparison with the exact solution at the control points' projections
    double e = 0.0;
    for (int g = 0; g < space.n_dofs(); ++g) {
      const auto [cell, j] = space.dofs.owner[g];
      const Vec3 p = map_point(*space.lifted, cell, space.element.nodes()[j].x);
      e = std::max(e, std::abs(u(g) - p.normalized().z()));
    }
    err.push_back(e);
  }
  CHECK(err[1] / err[2] > 3.0);
}

TEST_CASE("MatrixMarket export") {
  const AssembledForms f = assemble(space_on(SurfaceDescription::circle(), CellKind::Segment, 0, 1, 1, 5));
  std::ostringstream os;
  write_matrix_market(os, f.stiffness);
  std::istringstream in(os.str());
  std::string banner;
  std::getline(in, banner);
  CHECK(banner == "%%MatrixMarket matrix coordinate real general");
  int rows, cols, nnz;
  in >> rows >> cols >> nnz;
  CHECK(rows == 5);
  CHECK(cols == 5);
  CHECK(nnz == 15);
}
