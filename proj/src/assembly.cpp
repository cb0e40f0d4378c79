#include "lbs/assembly.hpp"

#include "lbs/error.hpp"
#include "lbs/parallel.hpp"

#include <ostream>

namespace lbs {

FeSpace build_space(std::shared_ptr<const LiftedMesh> lifted, int r) {
  if (r < 1) throw Error(ErrorKind::InvalidArgument, "FE degree must be >= 1");
  FeSpace space;
  space.element = ReferenceElement(lifted->cell_kind(), r, default_node_family(lifted->cell_kind()));
  space.dofs = number_nodes(lifted->base, space.element);
  space.lifted = std::move(lifted);
  return space;
}

QuadratureRule default_assembly_rule(const FeSpace& space) {
  return gauss_rule_for_degree(space.lifted->cell_kind(), 2 * space.degree() + 2 * space.lifted->degree);
}

Eigen::Matrix<double, 3, Eigen::Dynamic> surface_gradients(const TangentMatrix& jac,
                                                           const Eigen::MatrixXd& ref_grads) {
  const Eigen::MatrixXd ginv = (jac.transpose() * jac).inverse();
  return jac * ginv * ref_grads.transpose();
}

AssembledForms assemble(const FeSpace& space, const std::optional<QuadratureRule>& rule_in,
                        int threads) {
  const QuadratureRule rule = rule_in ? *rule_in : default_assembly_rule(space);
  if (rule.cell_kind != space.lifted->cell_kind())
    throw Error(ErrorKind::UnsupportedCombination, "assembly rule does not match the cell kind");
  const LiftedMesh& lifted = *space.lifted;
  const TabulatedBasis lift_tab = lifted.element.tabulate(rule);
  const TabulatedBasis fe_tab = space.element.tabulate(rule);
  const int nn = space.element.num_nodes();
  const int dim = space.element.dim();
  const std::size_t ncells = space.num_cells();
  const int nq = static_cast<int>(rule.size());

  std::vector<Eigen::MatrixXd> kloc(ncells), mloc(ncells);
  parallel_for(ncells, [&](std::size_t c) {
    CellGeometry geo;
    evaluate_cell_geometry(lifted, static_cast<int>(c), lift_tab, geo);
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(nn, nn);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nn, nn);
    Eigen::MatrixXd g(nn, dim);
    for (int q = 0; q < nq; ++q) {
      const double wq = rule.weights[q] * geo.area[q];
      for (int d = 0; d < dim; ++d) g.col(d) = fe_tab.grads[d].row(q).transpose();
      const Eigen::MatrixXd ginv = (geo.jac[q].transpose() * geo.jac[q]).inverse();
      k.noalias() += wq * (g * ginv * g.transpose());
      const Eigen::VectorXd phi = fe_tab.values.row(q).transpose();
      m.noalias() += wq * (phi * phi.transpose());
    }
    kloc[c] = 0.5 * (k + k.transpose());
    mloc[c] = 0.5 * (m + m.transpose());
  }, threads);

  std::vector<Eigen::Triplet<double>> kt, mt;
  kt.reserve(ncells * nn * nn);
  mt.reserve(ncells * nn * nn);
  for (std::size_t c = 0; c < ncells; ++c) {
    const auto& ids = space.dofs.cell_nodes[c];
    for (int a = 0; a < nn; ++a)
      for (int b = 0; b < nn; ++b) {
        kt.emplace_back(ids[a], ids[b], kloc[c](a, b));
        mt.emplace_back(ids[a], ids[b], mloc[c](a, b));
      }
  }
  AssembledForms f;
  const int n = space.n_dofs();
  f.stiffness.resize(n, n);
  f.mass.resize(n, n);
  f.stiffness.setFromTriplets(kt.begin(), kt.end());
  f.mass.setFromTriplets(mt.begin(), mt.end());
  f.mass_row_sums = f.mass * Eigen::VectorXd::Ones(n);
  f.area = f.mass_row_sums.sum();
  return f;
}

void write_matrix_market(std::ostream& os, const SparseMatrix& a) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << a.rows() << ' ' << a.cols() << ' ' << a.nonZeros() << '\n';
  os.precision(17);
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it)
      os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
}

}  // namespace lbs
