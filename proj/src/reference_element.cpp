#include "lbs/reference_fem.hpp"

#include "lbs/error.hpp"

#include <cmath>

namespace lbs {

std::string_view to_string(NodeFamily family) {
  return family == NodeFamily::Equispaced ? "equispaced" : "gauss_lobatto";
}

ReferenceElement::ReferenceElement(CellKind kind, int degree, NodeFamily family)
    : kind_(kind), degree_(degree), family_(family) {
  if (degree < 1) throw Error(ErrorKind::InvalidArgument, "element degree must be >= 1");
  const int p = degree;

  if (kind == CellKind::Triangle && family == NodeFamily::GaussLobatto)
    throw Error(ErrorKind::UnsupportedCombination,
                "Gauss-Lobatto nodes are not defined on triangles");

  if (family_ == NodeFamily::GaussLobatto) {
    std::vector<double> w;
    gauss_lobatto_1d(p + 1, s_, w);
  } else {
    s_.resize(p + 1);
    for (int i = 0; i <= p; ++i) s_[i] = static_cast<double>(i) / p;
  }

  auto push = [&](RefPoint x, EntityKind e, int idx, int pos) {
    nodes_.push_back({x, e, idx, pos});
  };

  switch (kind) {
    case CellKind::Segment: {
      push({0.0, 0.0}, EntityKind::Vertex, 0, 0);
      tensor_index_.push_back({0, 0});
      push({1.0, 0.0}, EntityKind::Vertex, 1, 0);
      tensor_index_.push_back({p, 0});
      for (int t = 1; t < p; ++t) {
        push({s_[t], 0.0}, EntityKind::Interior, 0, t - 1);
        tensor_index_.push_back({t, 0});
      }
      break;
    }
    case CellKind::Quad: {
      const int corner[4][2] = {{0, 0}, {p, 0}, {p, p}, {0, p}};
      for (int v = 0; v < 4; ++v) {
        push({s_[corner[v][0]], s_[corner[v][1]]}, EntityKind::Vertex, v, 0);
        tensor_index_.push_back({corner[v][0], corner[v][1]});
      }
      for (int e = 0; e < 4; ++e) {
        for (int t = 1; t < p; ++t) {
          int i = 0, j = 0;
          switch (e) {
            case 0: i = t; j = 0; break;
            case 1: i = p; j = t; break;
            case 2: i = p - t; j = p; break;
            case 3: i = 0; j = p - t; break;
          }
          push({s_[i], s_[j]}, EntityKind::Edge, e, t);
          tensor_index_.push_back({i, j});
        }
      }
      int running = 0;
      for (int j = 1; j < p; ++j)
        for (int i = 1; i < p; ++i) {
          push({s_[i], s_[j]}, EntityKind::Interior, 0, running++);
          tensor_index_.push_back({i, j});
        }
      break;
    }
    case CellKind::Triangle: {
      const double h = 1.0 / p;
      push({0.0, 0.0}, EntityKind::Vertex, 0, 0);
      push({1.0, 0.0}, EntityKind::Vertex, 1, 0);
      push({0.0, 1.0}, EntityKind::Vertex, 2, 0);
      for (int t = 1; t < p; ++t) push({t * h, 0.0}, EntityKind::Edge, 0, t);
      for (int t = 1; t < p; ++t) push({(p - t) * h, t * h}, EntityKind::Edge, 1, t);
      for (int t = 1; t < p; ++t) push({0.0, (p - t) * h}, EntityKind::Edge, 2, t);
      int running = 0;
      for (int j = 1; j < p; ++j)
        for (int i = 1; i + j < p; ++i) push({i * h, j * h}, EntityKind::Interior, 0, running++);

      for (int d = 0; d <= p; ++d)
        for (int a = d; a >= 0; --a) monomials_.push_back({a, d - a});
      const int n = static_cast<int>(nodes_.size());
      Eigen::MatrixXd vdm(n, n);
      for (int i = 0; i < n; ++i)
        for (int m = 0; m < n; ++m)
          vdm(i, m) = std::pow(nodes_[i].x.x(), monomials_[m][0]) *
                      std::pow(nodes_[i].x.y(), monomials_[m][1]);
      // phi_j = sum_m coeffs_(m, j) x^a y^b with vdm * coeffs = I
      coeffs_ = vdm.fullPivLu().inverse();
      break;
    }
  }
}

void ReferenceElement::lagrange_1d(double s, Eigen::VectorXd& v, Eigen::VectorXd& dv) const {
  const int n = static_cast<int>(s_.size());
  v.resize(n);
  dv.resize(n);
  for (int a = 0; a < n; ++a) {
    double val = 1.0, der = 0.0;
    for (int b = 0; b < n; ++b) {
      if (b == a) continue;
      const double inv = 1.0 / (s_[a] - s_[b]);
      der = der * (s - s_[b]) * inv + val * inv;
      val *= (s - s_[b]) * inv;
    }
    v(a) = val;
    dv(a) = der;
  }
}

Eigen::VectorXd ReferenceElement::values(const RefPoint& x) const {
  const int n = num_nodes();
  Eigen::VectorXd out(n);
  if (kind_ == CellKind::Triangle) {
    Eigen::VectorXd mono(n);
    for (int m = 0; m < n; ++m)
      mono(m) = std::pow(x.x(), monomials_[m][0]) * std::pow(x.y(), monomials_[m][1]);
    out = coeffs_.transpose() * mono;
    return out;
  }
  Eigen::VectorXd vx, dvx, vy, dvy;
  lagrange_1d(x.x(), vx, dvx);
  if (kind_ == CellKind::Segment) {
    for (int i = 0; i < n; ++i) out(i) = vx(tensor_index_[i][0]);
    return out;
  }
  lagrange_1d(x.y(), vy, dvy);
  for (int i = 0; i < n; ++i) out(i) = vx(tensor_index_[i][0]) * vy(tensor_index_[i][1]);
  return out;
}

Eigen::MatrixXd ReferenceElement::gradients(const RefPoint& x) const {
  const int n = num_nodes();
  Eigen::MatrixXd out(n, dim());
  if (kind_ == CellKind::Triangle) {
    Eigen::MatrixXd dmono(n, 2);
    for (int m = 0; m < n; ++m) {
      const int a = monomials_[m][0], b = monomials_[m][1];
      dmono(m, 0) = a == 0 ? 0.0 : a * std::pow(x.x(), a - 1) * std::pow(x.y(), b);
      dmono(m, 1) = b == 0 ? 0.0 : b * std::pow(x.x(), a) * std::pow(x.y(), b - 1);
    }
    out = coeffs_.transpose() * dmono;
    return out;
  }
  Eigen::VectorXd vx, dvx, vy, dvy;
  lagrange_1d(x.x(), vx, dvx);
  if (kind_ == CellKind::Segment) {
    for (int i = 0; i < n; ++i) out(i, 0) = dvx(tensor_index_[i][0]);
    return out;
  }
  lagrange_1d(x.y(), vy, dvy);
  for (int i = 0; i < n; ++i) {
    const int a = tensor_index_[i][0], b = tensor_index_[i][1];
    out(i, 0) = dvx(a) * vy(b);
    out(i, 1) = vx(a) * dvy(b);
  }
  return out;
}

TabulatedBasis ReferenceElement::tabulate(const QuadratureRule& rule) const {
  TabulatedBasis t;
  const int nq = static_cast<int>(rule.size());
  t.values.resize(nq, num_nodes());
  t.grads.assign(dim(), Eigen::MatrixXd(nq, num_nodes()));
  for (int q = 0; q < nq; ++q) {
    t.values.row(q) = values(rule.points[q]).transpose();
    const Eigen::MatrixXd g = gradients(rule.points[q]);
    for (int d = 0; d < dim(); ++d) t.grads[d].row(q) = g.col(d).transpose();
  }
  return t;
}

QuadratureRule induced_rule(const ReferenceElement& element) {
  QuadratureRule rule;
  rule.cell_kind = element.cell_kind();
  rule.family = element.node_family() == NodeFamily::GaussLobatto ? QuadratureFamily::GaussLobatto
                                                                 : QuadratureFamily::NewtonCotes;
  const QuadratureRule exact = gauss_rule_for_degree(element.cell_kind(), 2 * element.degree() + 2);
  const TabulatedBasis tab = element.tabulate(exact);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(element.num_nodes());
  for (std::size_t q = 0; q < exact.size(); ++q) w += exact.weights[q] * tab.values.row(q).transpose();
  for (int i = 0; i < element.num_nodes(); ++i) {
    rule.points.push_back(element.nodes()[i].x);
    rule.weights.push_back(w(i));
  }
  rule.exactness_degree = measured_exactness(rule, 2 * element.degree() + 2, 1e-12);
  return rule;
}

}  // namespace lbs
