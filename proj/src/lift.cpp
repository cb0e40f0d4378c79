#include "lbs/lift.hpp"

#include "lbs/error.hpp"

#include <array>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

namespace lbs {

std::string_view to_string(PointKind kind) {
  switch (kind) {
    case PointKind::Equispaced: return "equispaced";
    case PointKind::GaussLobatto: return "gauss_lobatto";
    case PointKind::Perturbed: return "perturbed";
  }
  return "unknown";
}

PointKind point_kind_from_string(std::string_view name) {
  if (name == "equispaced") return PointKind::Equispaced;
  if (name == "gauss_lobatto") return PointKind::GaussLobatto;
  if (name == "perturbed") return PointKind::Perturbed;
  throw Error(ErrorKind::InvalidArgument, "unknown point kind '" + std::string(name) + "'");
}

InterpolationPointSet InterpolationPointSet::equispaced(int k) {
  return {PointKind::Equispaced, NodeFamily::Equispaced, k, {}};
}

InterpolationPointSet InterpolationPointSet::gauss_lobatto(int k) {
  return {PointKind::GaussLobatto, NodeFamily::GaussLobatto, k, {}};
}

InterpolationPointSet InterpolationPointSet::perturbed(NodeFamily base, int k, PerturbationSpec spec) {
  return {PointKind::Perturbed, base, k, spec};
}

NodeNumbering number_nodes(const BaseMesh& mesh, const ReferenceElement& element) {
  NodeNumbering nn;
  const int p = element.degree();
  const auto edges = local_edges(mesh.cell_kind);
  std::map<std::array<long, 4>, int> ids;
  nn.cell_nodes.resize(mesh.cells.size());
  for (std::size_t ci = 0; ci < mesh.cells.size(); ++ci) {
    const auto& c = mesh.cells[ci];
    auto& local = nn.cell_nodes[ci];
    local.resize(element.num_nodes());
    for (int j = 0; j < element.num_nodes(); ++j) {
      const ReferenceNode& node = element.nodes()[j];
      std::array<long, 4> key{};
      switch (node.entity) {
        case EntityKind::Vertex:
          key = {0, c[node.entity_index], 0, 0};
          break;
        case EntityKind::Edge: {
          const int a = c[edges[node.entity_index][0]];
          const int b = c[edges[node.entity_index][1]];
          const int pos = a < b ? node.position : p - node.position;
          key = {1, std::min(a, b), std::max(a, b), pos};
          break;
        }
        case EntityKind::Interior:
          key = {2, static_cast<long>(ci), node.position, 0};
          break;
      }
      auto [it, inserted] = ids.emplace(key, nn.num_global);
      if (inserted) {
        ++nn.num_global;
        nn.owner.emplace_back(static_cast<int>(ci), j);
      }
      local[j] = it->second;
    }
  }
  return nn;
}

Vec3 base_map(const BaseMesh& mesh, int cell, const RefPoint& x) {
  const auto& c = mesh.cells[cell];
  const auto& v = mesh.vertices;
  switch (mesh.cell_kind) {
    case CellKind::Segment:
      return v[c[0]] + x.x() * (v[c[1]] - v[c[0]]);
    case CellKind::Triangle:
      return v[c[0]] + x.x() * (v[c[1]] - v[c[0]]) + x.y() * (v[c[2]] - v[c[0]]);
    case CellKind::Quad:
      return (1 - x.x()) * (1 - x.y()) * v[c[0]] + x.x() * (1 - x.y()) * v[c[1]] +
             x.x() * x.y() * v[c[2]] + (1 - x.x()) * x.y() * v[c[3]];
  }
  return Vec3::Zero();
}

namespace {

void check_continuity(const LiftedMesh& lifted) {
  // Every shared facet must be traced identically from both sides.
  const auto inc = facet_incidence(lifted.base);
  if (lifted.cell_kind() == CellKind::Segment) return;  // shared points are vertices
  const auto edges = local_edges(lifted.cell_kind());
  auto edge_point = [&](int cell, int a, int b, double t) -> Vec3 {
    const auto& c = lifted.base.cells[cell];
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const int ga = c[edges[e][0]], gb = c[edges[e][1]];
      if (!((ga == a && gb == b) || (ga == b && gb == a))) continue;
      const double s = ga == a ? t : 1.0 - t;
      const RefPoint p0 = lifted.element.nodes()[edges[e][0]].x;
      const RefPoint p1 = lifted.element.nodes()[edges[e][1]].x;
      return map_point(lifted, cell, p0 + s * (p1 - p0));
    }
    throw Error(ErrorKind::ContinuityViolation, "facet not found in incident cell");
  };
  for (const auto& [key, cells] : inc) {
    if (cells.size() != 2) continue;
    for (double t : {0.21, 0.5, 0.77}) {
      const Vec3 x0 = edge_point(cells[0], key.first, key.second, t);
      const Vec3 x1 = edge_point(cells[1], key.first, key.second, t);
      if ((x0 - x1).norm() > 1e-11 * std::max(1.0, x0.norm())) {
        std::ostringstream os;
        os << "cells " << cells[0] << " and " << cells[1] << " disagree by " << (x0 - x1).norm();
        throw Error(ErrorKind::ContinuityViolation, os.str());
      }
    }
  }
}

}  // namespace

LiftedMesh build_lift(const SurfaceDescription& surface, const BaseMesh& base, int k,
                      const InterpolationPointSet& points) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "lift degree must be >= 1");
  if (points.degree != k)
    throw Error(ErrorKind::InvalidArgument, "point set degree does not match lift degree");

  LiftedMesh lm;
  lm.base = base;
  lm.degree = k;
  lm.point_set = points;
  lm.element = ReferenceElement(base.cell_kind, k, points.base_family);
  lm.nodes = number_nodes(base, lm.element);
  lm.h = metrics(base).h;

  lm.control_points.resize(lm.nodes.num_global);
  for (int g = 0; g < lm.nodes.num_global; ++g) {
    const auto [cell, j] = lm.nodes.owner[g];
    const Vec3 flat = base_map(base, cell, lm.element.nodes()[j].x);
    try {
      lm.control_points[g] = closest_point(surface, flat);
    } catch (const Error& e) {
      throw Error(ErrorKind::ProjectionFailure, e.what());
    }
  }

  if (points.kind == PointKind::Perturbed) {
    const auto& spec = points.perturbation;
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unif(spec.center - spec.width, spec.center + spec.width);
    const double scale = std::pow(lm.h, k + 1);
    for (auto& x : lm.control_points) {
      const Vec3 n = project(surface, x).normal;
      x += scale * unif(rng) * n;
    }
    lm.quadrature_order_ell = 0;
  } else {
    lm.quadrature_order_ell = induced_rule(lm.element).order_ell();
  }

  check_continuity(lm);
  return lm;
}

Vec3 map_point(const LiftedMesh& lifted, int cell, const RefPoint& x) {
  const Eigen::VectorXd phi = lifted.element.values(x);
  const auto& ids = lifted.nodes.cell_nodes[cell];
  Vec3 out = Vec3::Zero();
  for (std::size_t j = 0; j < ids.size(); ++j) out += phi(j) * lifted.control_points[ids[j]];
  return out;
}

CellJacobian map_jacobian(const LiftedMesh& lifted, int cell, const RefPoint& x) {
  const Eigen::MatrixXd g = lifted.element.gradients(x);
  const auto& ids = lifted.nodes.cell_nodes[cell];
  CellJacobian cj;
  cj.tangent = TangentMatrix::Zero(3, lifted.element.dim());
  for (std::size_t j = 0; j < ids.size(); ++j)
    cj.tangent += lifted.control_points[ids[j]] * g.row(j);
  const double det = (cj.tangent.transpose() * cj.tangent).determinant();
  cj.area_factor = det > 0 ? std::sqrt(det) : 0.0;
  if (!(cj.area_factor > 0))
    throw Error(ErrorKind::DegenerateCell, "non-positive area factor in cell " + std::to_string(cell));
  return cj;
}

void evaluate_cell_geometry(const LiftedMesh& lifted, int cell, const TabulatedBasis& tab,
                            CellGeometry& out) {
  const int nq = static_cast<int>(tab.values.rows());
  const int dim = lifted.element.dim();
  const auto& ids = lifted.nodes.cell_nodes[cell];
  const int nn = static_cast<int>(ids.size());
  Eigen::Matrix<double, 3, Eigen::Dynamic> ctrl(3, nn);
  for (int j = 0; j < nn; ++j) ctrl.col(j) = lifted.control_points[ids[j]];

  out.x.resize(nq);
  out.jac.resize(nq);
  out.area.resize(nq);
  for (int q = 0; q < nq; ++q) {
    out.x[q] = ctrl * tab.values.row(q).transpose();
    out.jac[q].resize(3, dim);
    for (int d = 0; d < dim; ++d) out.jac[q].col(d) = ctrl * tab.grads[d].row(q).transpose();
    const double det = (out.jac[q].transpose() * out.jac[q]).determinant();
    if (!(det > 0))
      throw Error(ErrorKind::DegenerateCell, "non-positive area factor in cell " + std::to_string(cell));
    out.area[q] = std::sqrt(det);
  }
}

}  // namespace lbs
