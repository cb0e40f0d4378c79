#pragma once

#include "lbs/lift.hpp"

#include <Eigen/Sparse>

#include <iosfwd>
#include <memory>
#include <optional>

namespace lbs {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Degree-r Lagrange space on a lifted surface.
struct FeSpace {
  std::shared_ptr<const LiftedMesh> lifted;
  ReferenceElement element{CellKind::Segment, 1, NodeFamily::Equispaced};
  NodeNumbering dofs;

  int degree() const { return element.degree(); }
  int n_dofs() const { return dofs.num_global; }
  std::size_t num_cells() const { return dofs.cell_nodes.size(); }
};

FeSpace build_space(std::shared_ptr<const LiftedMesh> lifted, int r);

struct AssembledForms {
  SparseMatrix stiffness;
  SparseMatrix mass;
  Eigen::VectorXd mass_row_sums;  // M * 1
  double area = 0.0;              // 1^T M 1
};

/// Default assembly rule: Gauss, exact through degree 2r + 2k.
QuadratureRule default_assembly_rule(const FeSpace& space);

/// Element loops run in parallel; element matrices are merged in cell order,
/// so the result does not depend on the thread count.
AssembledForms assemble(const FeSpace& space, const std::optional<QuadratureRule>& rule = std::nullopt,
                        int threads = 0);

/// Surface gradients of all basis functions at one point: the columns of
/// J (J^T J)^{-1} grad_ref(phi)^T.
Eigen::Matrix<double, 3, Eigen::Dynamic> surface_gradients(const TangentMatrix& jac,
                                                           const Eigen::MatrixXd& ref_grads);

/// MatrixMarket "coordinate real general" export.
void write_matrix_market(std::ostream& os, const SparseMatrix& a);

}  // namespace lbs
