#include "lbs/error_analysis.hpp"

#include "lbs/error.hpp"
#include "lbs/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace lbs {

ExactEigenpair exact_eigenpair(const SurfaceDescription& surface, int index) {
  if (index < 1) throw Error(ErrorKind::InvalidArgument, "eigenpair index must be >= 1");
  ExactEigenpair ep;
  const double radius = surface.radius();
  switch (surface.kind()) {
    case SurfaceKind::Circle: {
      const int n = index;
      ep.lambda = static_cast<double>(n * n) / (radius * radius);
      ep.multiplicity = 2;
      ep.label = "circle n=" + std::to_string(n);
      for (bool sine : {false, true})
        ep.functions.push_back([n, sine, radius](const Vec3& y) { return circle_mode(n, sine, radius, y); });
      return ep;
    }
    case SurfaceKind::Sphere: {
      const int l = index;
      ep.lambda = static_cast<double>(l * (l + 1)) / (radius * radius);
      ep.multiplicity = 2 * l + 1;
      ep.label = "sphere l=" + std::to_string(l);
      for (int m = -l; m <= l; ++m)
        ep.functions.push_back([l, m, radius](const Vec3& y) { return sphere_harmonic(l, m, radius, y); });
      return ep;
    }
    default:
      throw Error(ErrorKind::UnsupportedSurface,
                  "no closed-form spectrum for " + surface.name() + "; use an extrapolated reference");
  }
}

std::vector<ExactEigenpair> exact_spectrum(const SurfaceDescription& surface, int count) {
  std::vector<ExactEigenpair> out;
  for (int i = 1; i <= count; ++i) out.push_back(exact_eigenpair(surface, i));
  return out;
}

namespace {

Mat3 discrete_projector(const TangentMatrix& jac) {
  const Eigen::MatrixXd ginv = (jac.transpose() * jac).inverse();
  return jac * ginv * jac.transpose();
}

double gram_root(const Eigen::MatrixXd& j) { return std::sqrt((j.transpose() * j).determinant()); }

}  // namespace

GeometricFactors geometric_factors(const SurfaceDescription& surface, const Vec3& x, const TangentMatrix& jac) {
  GeometricFactors g;
  const SurfacePoint sp = project(surface, x);
  g.d = sp.distance;
  g.nu = sp.normal;
  g.p = tangent_projector(surface, sp.normal);
  g.h = distance_hessian(surface, x);
  g.dpsi = g.p - g.d * g.h;
  g.p_discrete = discrete_projector(jac);
  if (jac.cols() == 2) g.n_discrete = jac.col(0).cross(jac.col(1)).normalized();
  const Eigen::MatrixXd jg = g.dpsi * jac;
  g.q = gram_root(jg) / gram_root(jac);
  g.a_gamma = g.dpsi * g.p_discrete * g.dpsi / g.q;
  return g;
}

DiscreteSurfaceSampler discrete_sampler(const FeSpace& space, const Eigen::VectorXd& coeffs) {
  return [&space, coeffs](int cell, const Vec3&, const TangentMatrix& jac, const RefPoint& xi) {
    const auto& ids = space.dofs.cell_nodes[cell];
    const Eigen::VectorXd phi = space.element.values(xi);
    const Eigen::MatrixXd grads = space.element.gradients(xi);
    Eigen::VectorXd local(ids.size());
    for (std::size_t j = 0; j < ids.size(); ++j) local(j) = coeffs(ids[j]);
    FunctionSample s;
    s.value = phi.dot(local);
    s.gradient = surface_gradients(jac, grads) * local;
    return s;
  };
}

FunctionErrors projection_errors(const FeSpace& space, const SpectralResult& result, const std::vector<int>& cluster,
                                 const DiscreteSurfaceSampler& target, AlphaPolicy policy) {
  const LiftedMesh& lifted = *space.lifted;
  const QuadratureRule rule =
      gauss_rule_for_degree(lifted.cell_kind(), 2 * space.degree() + 2 * lifted.degree + 4);
  const TabulatedBasis lift_tab = lifted.element.tabulate(rule);
  const TabulatedBasis fe_tab = space.element.tabulate(rule);
  const int nq = static_cast<int>(rule.size());
  const int nj = static_cast<int>(cluster.size());
  const int dim = space.element.dim();
  const std::size_t ncells = space.num_cells();

  struct Point {
    double w;
    FunctionSample u;
    Eigen::VectorXd uj;                          // U_j values, j in cluster
    Eigen::Matrix<double, 3, Eigen::Dynamic> gj;  // U_j surface gradients
  };
  std::vector<std::vector<Point>> pts(ncells);
  parallel_for(ncells, [&](std::size_t c) {
    CellGeometry geo;
    evaluate_cell_geometry(lifted, static_cast<int>(c), lift_tab, geo);
    const auto& ids = space.dofs.cell_nodes[c];
    const int nn = static_cast<int>(ids.size());
    Eigen::MatrixXd local(nn, nj);
    for (int a = 0; a < nn; ++a)
      for (int j = 0; j < nj; ++j) local(a, j) = result.eigenvectors(ids[a], cluster[j]);
    auto& out = pts[c];
    out.resize(nq);
    Eigen::MatrixXd g(nn, dim);
    for (int q = 0; q < nq; ++q) {
      Point& p = out[q];
      p.w = rule.weights[q] * geo.area[q];
      p.u = target(static_cast<int>(c), geo.x[q], geo.jac[q], rule.points[q]);
      p.uj = local.transpose() * fe_tab.values.row(q).transpose();
      for (int d = 0; d < dim; ++d) g.col(d) = fe_tab.grads[d].row(q).transpose();
      p.gj = surface_gradients(geo.jac[q], g) * local;
    }
  });

  // Projection coefficients, reduced in cell order. Gram matrices are taken
  // with the same rule so the projections are exact for it.
  Eigen::VectorXd cm = Eigen::VectorXd::Zero(nj), ca = Eigen::VectorXd::Zero(nj);
  Eigen::MatrixXd gm = Eigen::MatrixXd::Zero(nj, nj), ga = Eigen::MatrixXd::Zero(nj, nj);
  for (const auto& cell : pts)
    for (const Point& p : cell) {
      cm += p.w * p.u.value * p.uj;
      ca += p.w * (p.gj.transpose() * p.u.gradient);
      gm += p.w * p.uj * p.uj.transpose();
      ga += p.w * p.gj.transpose() * p.gj;
    }
  cm = gm.ldlt().solve(cm);
  const Eigen::VectorXd cz = ga.ldlt().solve(ca);

  double area = 0.0, mean = 0.0;
  for (const auto& cell : pts)
    for (const Point& p : cell) {
      area += p.w;
      mean += p.w * (p.u.value - p.uj.dot(cm));
    }
  FunctionErrors fe;
  fe.alpha = policy == AlphaPolicy::MeanShift ? mean / area : 0.0;
  double l2 = 0.0, en = 0.0, enz = 0.0;
  for (const auto& cell : pts)
    for (const Point& p : cell) {
      const double e = p.u.value - p.uj.dot(cm) - fe.alpha;
      l2 += p.w * e * e;
      en += p.w * (p.u.gradient - p.gj * cm).squaredNorm();
      enz += p.w * (p.u.gradient - p.gj * cz).squaredNorm();
    }
  fe.l2 = std::sqrt(l2);
  fe.energy = std::sqrt(en);
  fe.energy_z = std::sqrt(enz);
  return fe;
}

FunctionErrors lifted_error_norms(const SurfaceDescription& surface, const FeSpace& space,
                                  const SpectralResult& result, const std::vector<int>& cluster,
                                  const Eigenfunction& u, AlphaPolicy policy) {
  const DiscreteSurfaceSampler sampler = [&](int, const Vec3& x, const TangentMatrix& jac, const RefPoint&) {
    const SurfacePoint sp = project(surface, x);
    const FunctionSample s = u(sp.foot);
    const Mat3 dpsi = tangent_projector(surface, sp.normal) - sp.distance * distance_hessian(surface, x);
    FunctionSample out;
    out.value = s.value;
    out.gradient = discrete_projector(jac) * (dpsi * s.gradient);
    return out;
  };
  return projection_errors(space, result, cluster, sampler, policy);
}

EigenvalueErrors eigenvalue_errors_and_mu(const Eigen::VectorXd& ev, const std::vector<int>& cluster,
                                          double lambda) {
  EigenvalueErrors out;
  std::vector<bool> in(ev.size(), false);
  for (int j : cluster) {
    if (j < 0 || j >= ev.size()) throw Error(ErrorKind::InvalidArgument, "cluster index out of range");
    in[j] = true;
    out.per_index.push_back(std::abs(lambda - ev(j)));
    out.cluster_error = std::max(out.cluster_error, out.per_index.back());
  }
  bool any = false;
  const double eps_gap = 1e-14 * std::max(1.0, std::abs(lambda));
  for (int j = 0; j < ev.size(); ++j) {
    if (in[j]) continue;
    any = true;
    const double gap = std::abs(ev(j) - lambda);
    if (gap < eps_gap)
      throw Error(ErrorKind::ClusterNotSeparated, "discrete eigenvalue outside the cluster coincides with lambda");
    out.mu = std::max(out.mu, std::abs(lambda / (ev(j) - lambda)));
  }
  if (!any) throw Error(ErrorKind::InsufficientData, "no computed eigenvalue outside the cluster");
  return out;
}

GammaForms gamma_forms(const SurfaceDescription& surface, const FeSpace& space, const Eigen::VectorXd& v,
                       const Eigen::VectorXd& w, int extra_degree) {
  const LiftedMesh& lifted = *space.lifted;
  const QuadratureRule rule =
      gauss_rule_for_degree(lifted.cell_kind(), 2 * space.degree() + 2 * lifted.degree + extra_degree);
  const TabulatedBasis lift_tab = lifted.element.tabulate(rule);
  const TabulatedBasis fe_tab = space.element.tabulate(rule);
  const int nq = static_cast<int>(rule.size());
  const int dim = space.element.dim();
  const std::size_t ncells = space.num_cells();
  std::vector<GammaForms> part(ncells);
  parallel_for(ncells, [&](std::size_t c) {
    CellGeometry geo;
    evaluate_cell_geometry(lifted, static_cast<int>(c), lift_tab, geo);
    const auto& ids = space.dofs.cell_nodes[c];
    const int nn = static_cast<int>(ids.size());
    Eigen::VectorXd lv(nn), lw(nn);
    for (int a = 0; a < nn; ++a) {
      lv(a) = v(ids[a]);
      lw(a) = w(ids[a]);
    }
    Eigen::MatrixXd g(nn, dim);
    GammaForms& out = part[c];
    for (int q = 0; q < nq; ++q) {
      for (int d = 0; d < dim; ++d) g.col(d) = fe_tab.grads[d].row(q).transpose();
      const GeometricFactors gf = geometric_factors(surface, geo.x[q], geo.jac[q]);
      const TangentMatrix jg = gf.dpsi * geo.jac[q];
      const double wg = rule.weights[q] * gram_root(jg);
      const Eigen::MatrixXd grads = surface_gradients(jg, g);
      const Vec3 gv = grads * lv, gw = grads * lw;
      const double fv = fe_tab.values.row(q).dot(lv), fw = fe_tab.values.row(q).dot(lw);
      out.a += wg * gv.dot(gw);
      out.m += wg * fv * fw;
      out.a_tilde += wg * gv.dot(gf.a_gamma * gw);
      out.m_tilde += wg * fv * fw / gf.q;
    }
  });
  GammaForms total;
  for (const GammaForms& p : part) {
    total.a += p.a;
    total.m += p.m;
    total.a_tilde += p.a_tilde;
    total.m_tilde += p.m_tilde;
  }
  return total;
}

ConsistencyMismatch geometric_consistency_probe(const SurfaceDescription& surface, const FeSpace& space,
                                                const AssembledForms& forms, const Eigen::VectorXd& v) {
  const GammaForms g1 = gamma_forms(surface, space, v, v, 8);
  const GammaForms g2 = gamma_forms(surface, space, v, v, 14);
  const double av = v.dot(forms.stiffness * v);
  const double mv = v.dot(forms.mass * v);
  ConsistencyMismatch out{std::abs(g2.a - av), std::abs(g2.m - mv)};
  const double floor = 1e-13 * std::max(1.0, std::abs(mv) + std::abs(av));
  if (std::abs(g1.a - g2.a) > 0.01 * out.stiffness + floor || std::abs(g1.m - g2.m) > 0.01 * out.mass + floor)
    throw Error(ErrorKind::OracleInsufficient, "oracle rules disagree on the exact-surface forms");
  return out;
}

double distance_curvature_surrogate(const SurfaceDescription& surface, const FeSpace& space) {
  const LiftedMesh& lifted = *space.lifted;
  const QuadratureRule rule = default_assembly_rule(space);
  const TabulatedBasis lift_tab = lifted.element.tabulate(rule);
  double dmax = 0.0, hmax = 0.0;
  CellGeometry geo;
  for (std::size_t c = 0; c < lifted.num_cells(); ++c) {
    evaluate_cell_geometry(lifted, static_cast<int>(c), lift_tab, geo);
    for (const Vec3& x : geo.x) {
      dmax = std::max(dmax, std::abs(signed_distance(surface, x)));
      hmax = std::max(hmax, distance_hessian(surface, x).norm());
    }
  }
  return dmax * hmax;
}

Extrapolated richardson(const std::vector<double>& values, double rate) {
  if (values.size() < 3) throw Error(ErrorKind::InsufficientData, "Richardson extrapolation needs >= 3 levels");
  const double f = std::pow(2.0, rate) - 1.0;
  const std::size_t n = values.size();
  const double e_last = values[n - 1] + (values[n - 1] - values[n - 2]) / f;
  const double e_prev = values[n - 2] + (values[n - 2] - values[n - 3]) / f;
  return {e_last, std::abs(e_last - e_prev)};
}

std::vector<Extrapolated> reference_spectrum_extrapolated(const SurfaceDescription& surface,
                                                          const std::vector<int>& indices,
                                                          const ReferenceSettings& s) {
  if (indices.empty()) return {};
  if (s.level_max - s.level_min < 2)
    throw Error(ErrorKind::InsufficientData, "reference extrapolation needs >= 3 levels");
  const int m = *std::max_element(indices.begin(), indices.end()) + 4;
  const CellKind kind = surface.kind() == SurfaceKind::Circle ? CellKind::Segment : s.cell_kind;
  const InterpolationPointSet pts = default_node_family(kind) == NodeFamily::GaussLobatto
                                        ? InterpolationPointSet::gauss_lobatto(s.k)
                                        : InterpolationPointSet::equispaced(s.k);
  std::vector<std::vector<double>> seq(indices.size());
  int ell = 0;
  BaseMeshOptions opts;
  opts.cell_kind = kind;
  opts.circle_segments = s.circle_segments;
  for (int level = s.level_min; level <= s.level_max; ++level) {
    // same mesh family as the study levels (matters for implicit surfaces,
    // whose bases are radial projections rather than nested refinements)
    opts.level = level;
    const BaseMesh base = make_base(surface, opts);
    auto lifted = std::make_shared<LiftedMesh>(build_lift(surface, base, s.k, pts));
    ell = lifted->quadrature_order_ell;
    const FeSpace space = build_space(lifted, s.r);
    const AssembledForms forms = assemble(space, std::nullopt, s.threads);
    const SpectralResult res = solve_smallest(forms, std::min(m, space.n_dofs() - 1), s.solver);
    for (std::size_t i = 0; i < indices.size(); ++i) {
      if (indices[i] < 1 || indices[i] > res.size())
        throw Error(ErrorKind::InvalidArgument, "reference index out of range");
      seq[i].push_back(res.eigenvalues(indices[i] - 1));
    }
  }
  const double rate = std::min(2.0 * s.r, static_cast<double>(ell));
  std::vector<Extrapolated> out;
  for (const auto& v : seq) out.push_back(richardson(v, rate));
  return out;
}

void check_reference(const Extrapolated& ref, double smallest_error) {
  if (!(ref.estimate <= 0.01 * smallest_error)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "reference estimate %.3e exceeds 1%% of the smallest error %.3e", ref.estimate,
                  smallest_error);
    throw Error(ErrorKind::ExtrapolationUnstable, buf);
  }
}

}  // namespace lbs
