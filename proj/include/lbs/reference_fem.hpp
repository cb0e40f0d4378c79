#pragma once

#include "lbs/base_mesh.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string_view>
#include <vector>

namespace lbs {

/// Reference coordinates. Segments use [0,1] in x (y = 0); triangles the
/// Kuhn simplex {x, y >= 0, x + y <= 1}; quads the unit square.
using RefPoint = Eigen::Vector2d;

double reference_measure(CellKind kind);

// ---------------------------------------------------------------------------
// Quadrature

enum class QuadratureFamily { GaussLegendre, GaussLobatto, NewtonCotes, SymmetricTriangle };

std::string_view to_string(QuadratureFamily family);
QuadratureFamily quadrature_family_from_string(std::string_view name);

struct QuadratureRule {
  CellKind cell_kind = CellKind::Segment;
  QuadratureFamily family = QuadratureFamily::GaussLegendre;
  std::vector<RefPoint> points;
  std::vector<double> weights;
  /// Largest total degree integrated exactly (per-direction degree for
  /// tensor rules on quads).
  int exactness_degree = 0;

  /// E(chi) = 0 for every chi of degree < order_ell().
  int order_ell() const { return exactness_degree + 1; }
  std::size_t size() const { return points.size(); }
  double apply(const std::function<double(const RefPoint&)>& f) const;
};

/// 1D rules on [0,1], sorted ascending.
void gauss_legendre_1d(int n, std::vector<double>& x, std::vector<double>& w);
void gauss_lobatto_1d(int n, std::vector<double>& x, std::vector<double>& w);
void newton_cotes_1d(int n, std::vector<double>& x, std::vector<double>& w);

/// `n_points` counts points per direction for segment/quad rules and for the
/// collapsed Gauss-Legendre triangle rule, points per edge for triangle
/// Newton-Cotes, and the total table size for symmetric triangle rules
/// (1, 3, 4, 6, 7, 12 or 13 points).
QuadratureRule make_rule(CellKind kind, QuadratureFamily family, int n_points);

/// Cheapest Gauss rule integrating total degree `degree` exactly.
QuadratureRule gauss_rule_for_degree(CellKind kind, int degree);

/// Reference integral of x^a y^b (x^a for segments).
double reference_monomial_integral(CellKind kind, int a, int b);

/// Largest degree d such that the rule integrates all monomials of degree <= d
/// to `tol` (relative to the reference measure); `max_degree` caps the search.
int measured_exactness(const QuadratureRule& rule, int max_degree, double tol = 1e-13);

struct QuadratureErrorSettings {
  /// Disagreement allowed between the oracle and the refined oracle.
  double oracle_tol = 1e-14;
};

/// E(f) = integral of f over the reference cell minus the rule's value. The
/// integral comes from a Gauss oracle of exactness 2 * exactness + 6, checked
/// against a second, larger oracle.
double quadrature_error(const QuadratureRule& rule,
                        const std::function<double(const RefPoint&)>& f,
                        const QuadratureErrorSettings& settings = {});

// ---------------------------------------------------------------------------
// Lagrange elements

enum class NodeFamily { Equispaced, GaussLobatto };

std::string_view to_string(NodeFamily family);

/// Best-conditioned node family available on a cell kind.
inline NodeFamily default_node_family(CellKind kind) {
  return kind == CellKind::Triangle ? NodeFamily::Equispaced : NodeFamily::GaussLobatto;
}

enum class EntityKind { Vertex, Edge, Interior };

struct ReferenceNode {
  RefPoint x;
  EntityKind entity = EntityKind::Vertex;
  /// Local vertex or edge id; unused for interior nodes.
  int entity_index = 0;
  /// Position along the edge counted from the edge's first local vertex
  /// (1..degree-1), or a running index for interior nodes.
  int position = 0;
};

/// Values and gradients of every basis function at every point of a rule.
struct TabulatedBasis {
  Eigen::MatrixXd values;               // n_points x n_basis
  std::vector<Eigen::MatrixXd> grads;   // per reference direction, n_points x n_basis
};

class ReferenceElement {
 public:
  ReferenceElement(CellKind kind, int degree, NodeFamily family);

  CellKind cell_kind() const { return kind_; }
  int degree() const { return degree_; }
  NodeFamily node_family() const { return family_; }
  int dim() const { return reference_dim(kind_); }
  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  const std::vector<ReferenceNode>& nodes() const { return nodes_; }
  /// 1D node coordinates s_0 = 0 < ... < s_p = 1 (segments and quads).
  const std::vector<double>& nodes_1d() const { return s_; }

  Eigen::VectorXd values(const RefPoint& x) const;
  /// num_nodes x dim.
  Eigen::MatrixXd gradients(const RefPoint& x) const;
  TabulatedBasis tabulate(const QuadratureRule& rule) const;

 private:
  void lagrange_1d(double s, Eigen::VectorXd& v, Eigen::VectorXd& dv) const;

  CellKind kind_;
  int degree_;
  NodeFamily family_;
  std::vector<double> s_;
  std::vector<ReferenceNode> nodes_;
  // Tensor index pairs for quads, first index only for segments.
  std::vector<std::array<int, 2>> tensor_index_;
  // Triangles: monomial exponents and inverse Vandermonde (coefficients by column).
  std::vector<std::array<int, 2>> monomials_;
  Eigen::MatrixXd coeffs_;
};

/// The rule whose nodes are the element's nodes and whose weights integrate the
/// element's Lagrange basis exactly; its exactness is measured, not assumed.
QuadratureRule induced_rule(const ReferenceElement& element);

}  // namespace lbs
