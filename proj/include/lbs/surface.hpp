#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace lbs {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

enum class SurfaceKind { Circle, Sphere, Torus, Implicit };

std::string_view to_string(SurfaceKind kind);

/// A level set {phi = 0} with analytic first and second derivatives.
/// phi must be negative inside the bounded component.
struct LevelSetFunction {
  std::string name;
  std::function<double(const Vec3&)> value;
  std::function<Vec3(const Vec3&)> gradient;
  std::function<Mat3(const Vec3&)> hessian;
  /// Default admissible tube radius around the zero set.
  double default_strip_halfwidth = 0.1;
};

/// Built-in level sets. Known names: "heart", "heart_perturbed", "unit_sphere".
const LevelSetFunction& implicit_registry(std::string_view name);
std::vector<std::string> implicit_names();

struct ProjectionSettings {
  double tol_surface = 1e-12;
  int max_iter = 50;
};

/// Exact description of a smooth closed curve in the plane (z = 0) or a closed
/// surface in R^3. All points are carried as 3-vectors; planar curves keep z = 0.
class SurfaceDescription {
 public:
  static SurfaceDescription circle(double radius = 1.0);
  static SurfaceDescription sphere(double radius = 1.0);
  static SurfaceDescription torus(double major_radius = 2.0, double minor_radius = 1.0);
  static SurfaceDescription implicit(const LevelSetFunction& level_set);
  static SurfaceDescription implicit(std::string_view registry_name);

  SurfaceKind kind() const { return kind_; }
  int ambient_dim() const { return kind_ == SurfaceKind::Circle ? 2 : 3; }
  int dim() const { return ambient_dim() - 1; }
  std::string name() const;

  double radius() const { return radius_; }
  double major_radius() const { return major_; }
  double minor_radius() const { return radius_; }
  const LevelSetFunction& level_set() const { return level_set_; }

  double strip_halfwidth() const { return strip_; }
  SurfaceDescription& set_strip_halfwidth(double w);

  const ProjectionSettings& projection_settings() const { return settings_; }
  SurfaceDescription& set_projection_settings(const ProjectionSettings& s);

  bool has_closed_form_distance() const { return kind_ != SurfaceKind::Implicit; }

 private:
  SurfaceKind kind_ = SurfaceKind::Sphere;
  double radius_ = 1.0;  // circle/sphere radius, torus tube radius
  double major_ = 0.0;
  double strip_ = 0.5;
  LevelSetFunction level_set_;
  ProjectionSettings settings_;
};

/// Decomposition x = foot + distance * normal.
struct SurfacePoint {
  Vec3 foot;
  double distance = 0.0;
  Vec3 normal;  // outward unit normal at foot
};

struct CurvatureData {
  std::vector<double> principal_curvatures;
  std::vector<Vec3> principal_directions;
  double mean_curvature_sum = 0.0;
  Mat3 hessian = Mat3::Zero();  // Hessian of d at the point
};

SurfacePoint project(const SurfaceDescription& surface, const Vec3& x);
double signed_distance(const SurfaceDescription& surface, const Vec3& x);
Vec3 closest_point(const SurfaceDescription& surface, const Vec3& x);

/// Principal curvatures of a point on the surface, signed so that the unit
/// sphere has curvature +1 with the outward normal.
CurvatureData curvature_at(const SurfaceDescription& surface, const Vec3& p);

/// Orthogonal projector onto the tangent space at a surface point with outward
/// normal n. For planar curves the out-of-plane direction is removed as well.
Mat3 tangent_projector(const SurfaceDescription& surface, const Vec3& normal);

/// Hessian of d at an arbitrary strip point x:
///   sum_i kappa_i / (1 + d kappa_i) e_i e_i^T, curvatures taken at psi(x).
Mat3 distance_hessian(const SurfaceDescription& surface, const Vec3& x);

/// Jacobian of the closest-point map, P(psi(x)) - d(x) H(x).
Mat3 closest_point_jacobian(const SurfaceDescription& surface, const Vec3& x);

}  // namespace lbs
