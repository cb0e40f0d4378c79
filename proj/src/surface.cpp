#include "lbs/surface.hpp"

#include "lbs/error.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace lbs {

std::string_view to_string(SurfaceKind kind) {
  switch (kind) {
    case SurfaceKind::Circle: return "circle";
    case SurfaceKind::Sphere: return "sphere";
    case SurfaceKind::Torus: return "torus";
    case SurfaceKind::Implicit: return "implicit";
  }
  return "unknown";
}

namespace {

// (x - z^2)^2 + y^2 + z^2 + c (x - 0.1)(y + 0.1)(z + 0.2) - 1
LevelSetFunction make_heart(std::string name, double c, double strip) {
  LevelSetFunction f;
  f.name = std::move(name);
  f.value = [c](const Vec3& p) {
    const double x = p.x(), y = p.y(), z = p.z();
    const double s = x - z * z;
    return s * s + y * y + z * z + c * (x - 0.1) * (y + 0.1) * (z + 0.2) - 1.0;
  };
  f.gradient = [c](const Vec3& p) {
    const double x = p.x(), y = p.y(), z = p.z();
    const double s = x - z * z;
    return Vec3(2.0 * s + c * (y + 0.1) * (z + 0.2),
                2.0 * y + c * (x - 0.1) * (z + 0.2),
                -4.0 * z * s + 2.0 * z + c * (x - 0.1) * (y + 0.1));
  };
  f.hessian = [c](const Vec3& p) {
    const double x = p.x(), y = p.y(), z = p.z();
    Mat3 h;
    h(0, 0) = 2.0;
    h(1, 1) = 2.0;
    h(2, 2) = -4.0 * x + 12.0 * z * z + 2.0;
    h(0, 1) = h(1, 0) = c * (z + 0.2);
    h(0, 2) = h(2, 0) = -4.0 * z + c * (y + 0.1);
    h(1, 2) = h(2, 1) = c * (x - 0.1);
    return h;
  };
  f.default_strip_halfwidth = strip;
  return f;
}

LevelSetFunction make_unit_sphere() {
  LevelSetFunction f;
  f.name = "unit_sphere";
  f.value = [](const Vec3& p) { return p.squaredNorm() - 1.0; };
  f.gradient = [](const Vec3& p) { return Vec3(2.0 * p); };
  f.hessian = [](const Vec3&) { return Mat3(2.0 * Mat3::Identity()); };
  f.default_strip_halfwidth = 0.5;
  return f;
}

const std::map<std::string, LevelSetFunction, std::less<>>& registry() {
  // Strip widths are half the smallest radius of curvature found by sampling
  // each surface densely.
  static const std::map<std::string, LevelSetFunction, std::less<>> table = {
      {"heart", make_heart("heart", 0.0, 0.09)},
      {"heart_perturbed", make_heart("heart_perturbed", 0.5, 0.06)},
      {"unit_sphere", make_unit_sphere()},
  };
  return table;
}

Vec3 planar(const Vec3& x) { return Vec3(x.x(), x.y(), 0.0); }

// Any unit vector orthogonal to n.
Vec3 orthogonal_unit(const Vec3& n) {
  const Vec3 a = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  return (a - a.dot(n) * n).normalized();
}

SurfacePoint project_implicit(const SurfaceDescription& s, const Vec3& x) {
  const auto& f = s.level_set();
  const auto& cfg = s.projection_settings();

  // Foot-point system: y - x + mu grad phi(y) = 0, phi(y) = 0.
  auto residual = [&](const Vec3& y, double mu) {
    Eigen::Vector4d r;
    r.head<3>() = y - x + mu * f.gradient(y);
    r(3) = f.value(y);
    return r;
  };

  const double scale = std::max(1.0, x.norm());

  // Phase 1: pull x onto the zero set along the gradient.
  Vec3 y = x;
  for (int it = 0; it < cfg.max_iter; ++it) {
    const Vec3 g = f.gradient(y);
    const double g2 = g.squaredNorm();
    if (!(g2 > 0)) break;
    const double v = f.value(y);
    y -= (v / g2) * g;
    if (std::abs(v) <= 1e-3 * cfg.tol_surface * std::sqrt(g2)) break;
  }
  double mu = 0.0;
  {
    const Vec3 g = f.gradient(y);
    if (g.squaredNorm() > 0) mu = (x - y).dot(g) / g.squaredNorm();
  }

  // Phase 2: Newton on the coupled system, damped by backtracking.
  Eigen::Vector4d r = residual(y, mu);
  bool converged = false;
  for (int it = 0; it < cfg.max_iter; ++it) {
    if (r.norm() <= cfg.tol_surface * scale) {
      converged = true;
      break;
    }
    const Vec3 g = f.gradient(y);
    Eigen::Matrix4d jac = Eigen::Matrix4d::Zero();
    jac.topLeftCorner<3, 3>() = Mat3::Identity() + mu * f.hessian(y);
    jac.topRightCorner<3, 1>() = g;
    jac.bottomLeftCorner<1, 3>() = g.transpose();
    const Eigen::Vector4d step = jac.fullPivLu().solve(-r);
    if (!step.allFinite()) break;

    double t = 1.0;
    const double r0 = r.norm();
    bool moved = false;
    for (int ls = 0; ls < 30; ++ls) {
      const Vec3 y_try = y + t * step.head<3>();
      const double mu_try = mu + t * step(3);
      const Eigen::Vector4d r_try = residual(y_try, mu_try);
      if (r_try.norm() < (1.0 - 1e-4 * t) * r0) {
        y = y_try;
        mu = mu_try;
        r = r_try;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;
  }

  // Fallback: tangential fixed point y <- pull(y + P(y)(x - y)).
  for (int it = 0; !converged && it < 20 * cfg.max_iter; ++it) {
    Vec3 g = f.gradient(y);
    const Vec3 n = g.normalized();
    Vec3 z = y + (x - y) - (x - y).dot(n) * n;
    for (int k = 0; k < cfg.max_iter; ++k) {
      g = f.gradient(z);
      const double v = f.value(z);
      z -= (v / g.squaredNorm()) * g;
      if (std::abs(v) <= 1e-3 * cfg.tol_surface * g.norm()) break;
    }
    y = z;
    g = f.gradient(y);
    mu = (x - y).dot(g) / g.squaredNorm();
    r = residual(y, mu);
    if (r.norm() <= cfg.tol_surface * scale) converged = true;
  }
  if (!converged && r.norm() <= cfg.tol_surface * scale) converged = true;
  if (!converged) {
    std::ostringstream os;
    os << "foot-point Newton did not converge for x = (" << x.transpose()
       << "), residual " << r.norm();
    throw Error(ErrorKind::NonConvergence, os.str());
  }

  SurfacePoint sp;
  sp.foot = y;
  sp.normal = f.gradient(y).normalized();
  sp.distance = (x - y).dot(sp.normal);
  if (std::abs(sp.distance) >= s.strip_halfwidth()) {
    std::ostringstream os;
    os << "|d| = " << std::abs(sp.distance) << " exceeds strip half-width "
       << s.strip_halfwidth();
    throw Error(ErrorKind::OutsideStrip, os.str());
  }
  return sp;
}

}  // namespace

const LevelSetFunction& implicit_registry(std::string_view name) {
  const auto& table = registry();
  auto it = table.find(name);
  if (it == table.end())
    throw Error(ErrorKind::UnsupportedSurface, "unknown implicit surface '" + std::string(name) + "'");
  return it->second;
}

std::vector<std::string> implicit_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : registry()) names.push_back(k);
  return names;
}

SurfaceDescription SurfaceDescription::circle(double radius) {
  SurfaceDescription s;
  s.kind_ = SurfaceKind::Circle;
  s.radius_ = radius;
  s.strip_ = 0.5 * radius;
  return s;
}

SurfaceDescription SurfaceDescription::sphere(double radius) {
  SurfaceDescription s;
  s.kind_ = SurfaceKind::Sphere;
  s.radius_ = radius;
  s.strip_ = 0.5 * radius;
  return s;
}

SurfaceDescription SurfaceDescription::torus(double major_radius, double minor_radius) {
  if (!(major_radius > minor_radius && minor_radius > 0))
    throw Error(ErrorKind::InvalidArgument, "torus requires R > r > 0");
  SurfaceDescription s;
  s.kind_ = SurfaceKind::Torus;
  s.major_ = major_radius;
  s.radius_ = minor_radius;
  s.strip_ = 0.5 * minor_radius;
  return s;
}

SurfaceDescription SurfaceDescription::implicit(const LevelSetFunction& level_set) {
  SurfaceDescription s;
  s.kind_ = SurfaceKind::Implicit;
  s.level_set_ = level_set;
  s.strip_ = level_set.default_strip_halfwidth;
  return s;
}

SurfaceDescription SurfaceDescription::implicit(std::string_view registry_name) {
  return implicit(implicit_registry(registry_name));
}

std::string SurfaceDescription::name() const {
  if (kind_ == SurfaceKind::Implicit) return "implicit:" + level_set_.name;
  return std::string(to_string(kind_));
}

SurfaceDescription& SurfaceDescription::set_strip_halfwidth(double w) {
  if (!(w > 0)) throw Error(ErrorKind::InvalidArgument, "strip half-width must be positive");
  strip_ = w;
  return *this;
}

SurfaceDescription& SurfaceDescription::set_projection_settings(const ProjectionSettings& s) {
  settings_ = s;
  return *this;
}

SurfacePoint project(const SurfaceDescription& s, const Vec3& x) {
  SurfacePoint sp;
  switch (s.kind()) {
    case SurfaceKind::Circle:
    case SurfaceKind::Sphere: {
      const Vec3 p = s.kind() == SurfaceKind::Circle ? planar(x) : x;
      const double rho = p.norm();
      if (rho < 1e-14 * s.radius())
        throw Error(ErrorKind::OutsideStrip, "closest point undefined at the center");
      sp.normal = p / rho;
      sp.foot = s.radius() * sp.normal;
      sp.distance = rho - s.radius();
      return sp;
    }
    case SurfaceKind::Torus: {
      const double rho = std::hypot(x.x(), x.y());
      if (rho < 1e-14 * s.major_radius())
        throw Error(ErrorKind::OutsideStrip, "closest point undefined on the torus axis");
      const Vec3 ring(s.major_radius() * x.x() / rho, s.major_radius() * x.y() / rho, 0.0);
      const Vec3 q = x - ring;
      const double qn = q.norm();
      if (qn < 1e-14 * s.minor_radius())
        throw Error(ErrorKind::OutsideStrip, "closest point undefined on the core circle");
      sp.normal = q / qn;
      sp.foot = ring + s.minor_radius() * sp.normal;
      sp.distance = qn - s.minor_radius();
      return sp;
    }
    case SurfaceKind::Implicit:
      return project_implicit(s, x);
  }
  return sp;
}

double signed_distance(const SurfaceDescription& surface, const Vec3& x) {
  return project(surface, x).distance;
}

Vec3 closest_point(const SurfaceDescription& surface, const Vec3& x) {
  return project(surface, x).foot;
}

Mat3 tangent_projector(const SurfaceDescription& surface, const Vec3& normal) {
  Mat3 p = Mat3::Identity() - normal * normal.transpose();
  if (surface.ambient_dim() == 2) p -= Vec3::UnitZ() * Vec3::UnitZ().transpose();
  return p;
}

CurvatureData curvature_at(const SurfaceDescription& s, const Vec3& p) {
  CurvatureData c;
  switch (s.kind()) {
    case SurfaceKind::Circle: {
      const SurfacePoint sp = project(s, p);
      const Vec3 t(-sp.normal.y(), sp.normal.x(), 0.0);
      c.principal_curvatures = {1.0 / s.radius()};
      c.principal_directions = {t};
      break;
    }
    case SurfaceKind::Sphere: {
      const SurfacePoint sp = project(s, p);
      const Vec3 t1 = orthogonal_unit(sp.normal);
      const Vec3 t2 = sp.normal.cross(t1);
      c.principal_curvatures = {1.0 / s.radius(), 1.0 / s.radius()};
      c.principal_directions = {t1, t2};
      break;
    }
    case SurfaceKind::Torus: {
      const SurfacePoint sp = project(s, p);
      const double rho = std::hypot(sp.foot.x(), sp.foot.y());
      const Vec3 e_phi(-sp.foot.y() / rho, sp.foot.x() / rho, 0.0);
      const Vec3 e_mer = sp.normal.cross(e_phi).normalized();
      // cos(theta) = (rho - R) / r
      const double k_parallel = (rho - s.major_radius()) / (s.minor_radius() * rho);
      c.principal_curvatures = {1.0 / s.minor_radius(), k_parallel};
      c.principal_directions = {e_mer, e_phi};
      break;
    }
    case SurfaceKind::Implicit: {
      const auto& f = s.level_set();
      const Vec3 g = f.gradient(p);
      const double gn = g.norm();
      if (!(gn > 0)) throw Error(ErrorKind::DegenerateHessian, "vanishing level-set gradient");
      const Vec3 n = g / gn;
      Eigen::Matrix<double, 3, 2> t;
      t.col(0) = orthogonal_unit(n);
      t.col(1) = n.cross(t.col(0));
      const Eigen::Matrix2d w = t.transpose() * f.hessian(p) * t / gn;
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(w);
      if (eig.info() != Eigen::Success || !eig.eigenvalues().allFinite())
        throw Error(ErrorKind::DegenerateHessian, "tangential Hessian eigen-decomposition failed");
      for (int i = 0; i < 2; ++i) {
        c.principal_curvatures.push_back(eig.eigenvalues()(i));
        c.principal_directions.push_back((t * eig.eigenvectors().col(i)).normalized());
      }
      break;
    }
  }
  c.mean_curvature_sum = 0.0;
  for (std::size_t i = 0; i < c.principal_curvatures.size(); ++i) {
    const Vec3& e = c.principal_directions[i];
    c.mean_curvature_sum += c.principal_curvatures[i];
    c.hessian += c.principal_curvatures[i] * e * e.transpose();
  }
  return c;
}

Mat3 distance_hessian(const SurfaceDescription& surface, const Vec3& x) {
  const SurfacePoint sp = project(surface, x);
  const CurvatureData c = curvature_at(surface, sp.foot);
  Mat3 h = Mat3::Zero();
  for (std::size_t i = 0; i < c.principal_curvatures.size(); ++i) {
    const double k = c.principal_curvatures[i];
    const Vec3& e = c.principal_directions[i];
    h += k / (1.0 + sp.distance * k) * e * e.transpose();
  }
  return h;
}

Mat3 closest_point_jacobian(const SurfaceDescription& surface, const Vec3& x) {
  const SurfacePoint sp = project(surface, x);
  const CurvatureData c = curvature_at(surface, sp.foot);
  Mat3 j = Mat3::Zero();
  for (std::size_t i = 0; i < c.principal_curvatures.size(); ++i) {
    const Vec3& e = c.principal_directions[i];
    j += e * e.transpose() / (1.0 + sp.distance * c.principal_curvatures[i]);
  }
  return j;
}

}  // namespace lbs
