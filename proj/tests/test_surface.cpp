#include "lbs/error.hpp"
#include "lbs/surface.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace lbs;

namespace {

// Uniform random point in the shell |d| < w around the surface, found by
// rejection from a bounding box.
Vec3 random_strip_point(const SurfaceDescription& s, std::mt19937_64& rng, double w, double box) {
  std::uniform_real_distribution<double> u(-box, box);
  for (;;) {
    Vec3 x(u(rng), u(rng), s.ambient_dim() == 2 ? 0.0 : u(rng));
    const double phi = s.kind() == SurfaceKind::Implicit ? s.level_set().value(x) : signed_distance(s, x);
    if (s.kind() == SurfaceKind::Implicit) {
      // crude pre-filter: level-set value over gradient norm
      const double g = s.level_set().gradient(x).norm();
      if (g < 1e-3 || std::abs(phi / g) > 0.8 * w) continue;
      if (std::abs(signed_distance(s, x)) >= w) continue;
      return x;
    }
    if (std::abs(phi) < w) return x;
  }
}

double decomposition_residual(const SurfaceDescription& s, const Vec3& x) {
  const SurfacePoint p = project(s, x);
  return (x - p.foot - p.distance * p.normal).norm();
}

}  // namespace

TEST_CASE("signed distance of closed-form surfaces") {
  const auto sphere = SurfaceDescription::sphere();
  CHECK(signed_distance(sphere, Vec3(2, 0, 0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(signed_distance(sphere, Vec3(1, 0, 0))) < 1e-15);
  CHECK(signed_distance(sphere, Vec3(0.25, 0, 0)) < 0);

  const auto torus = SurfaceDescription::torus(2.0, 1.0);
  CHECK(std::abs(signed_distance(torus, Vec3(3, 0, 0))) < 1e-15);
  CHECK(signed_distance(torus, Vec3(0, 2.5, 0)) == doctest::Approx(-0.5));
  CHECK(signed_distance(torus, Vec3(0, 4.5, 0)) == doctest::Approx(1.5));
}

TEST_CASE("closest point examples") {
  const auto sphere = SurfaceDescription::sphere();
  CHECK((closest_point(sphere, Vec3(2, 0, 0)) - Vec3(1, 0, 0)).norm() < 1e-15);

  const auto circle = SurfaceDescription::circle();
  const Vec3 c = closest_point(circle, Vec3(0.5, 0.5, 0));
  CHECK((c - Vec3(1 / std::sqrt(2.0), 1 / std::sqrt(2.0), 0)).norm() < 1e-15);

  // (x - z^2)^2 + y^2 + z^2 = 1; z = 0.6, y = 0, x = z^2 + 0.8 lies on it.
  LevelSetFunction ls;
  ls.name = "bulge";
  ls.value = [](const Vec3& x) { return std::pow(x.x() - x.z() * x.z(), 2) + x.y() * x.y() + x.z() * x.z() - 1; };
  ls.gradient = [](const Vec3& x) {
    const double a = x.x() - x.z() * x.z();
    return Vec3(2 * a, 2 * x.y(), -4 * x.z() * a + 2 * x.z());
  };
  ls.hessian = [](const Vec3& x) {
    const double a = x.x() - x.z() * x.z();
    Mat3 h = Mat3::Zero();
    h(0, 0) = 2;
    h(0, 2) = h(2, 0) = -4 * x.z();
    h(1, 1) = 2;
    h(2, 2) = 8 * x.z() * x.z() - 4 * a + 2;
    return h;
  };
  ls.default_strip_halfwidth = 0.1;
  const auto bulge = SurfaceDescription::implicit(ls);
  const Vec3 on(0.36 + 0.8, 0.0, 0.6);
  CHECK(std::abs(ls.value(on)) < 1e-15);
  CHECK((closest_point(bulge, on) - on).norm() < 1e-12);
}

TEST_CASE("curvatures") {
  const auto sphere = SurfaceDescription::sphere();
  const Vec3 p = Vec3(1, 2, -2).normalized();
  const CurvatureData cs = curvature_at(sphere, p);
  REQUIRE(cs.principal_curvatures.size() == 2);
  CHECK(cs.principal_curvatures[0] == doctest::Approx(1.0));
  CHECK(cs.principal_curvatures[1] == doctest::Approx(1.0));
  CHECK(cs.mean_curvature_sum == doctest::Approx(2.0));

  const auto circle = SurfaceDescription::circle();
  const CurvatureData cc = curvature_at(circle, Vec3(0.6, 0.8, 0));
  REQUIRE(cc.principal_curvatures.size() == 1);
  CHECK(cc.principal_curvatures[0] == doctest::Approx(1.0));

  const auto torus = SurfaceDescription::torus(2.0, 1.0);
  CurvatureData ct = curvature_at(torus, Vec3(3, 0, 0));
  std::vector<double> k = ct.principal_curvatures;
  std::sort(k.begin(), k.end());
  CHECK(k[0] == doctest::Approx(1.0 / 3.0));
  CHECK(k[1] == doctest::Approx(1.0));

  // second differences of d at the same point
  const double e = 1e-4;
  const Vec3 x0(3, 0, 0);
  auto d = [&](const Vec3& x) { return signed_distance(torus, x); };
  const double dyy = (d(x0 + Vec3(0, e, 0)) - 2 * d(x0) + d(x0 - Vec3(0, e, 0))) / (e * e);
  const double dzz = (d(x0 + Vec3(0, 0, e)) - 2 * d(x0) + d(x0 - Vec3(0, 0, e))) / (e * e);
  CHECK(dyy == doctest::Approx(1.0 / 3.0).epsilon(1e-5));
  CHECK(dzz == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("distance Hessian matches finite differences off the surface") {
  std::mt19937_64 rng(7);
  for (const auto& s : {SurfaceDescription::torus(2.0, 1.0), SurfaceDescription::implicit("heart")}) {
    const double w = s.kind() == SurfaceKind::Implicit ? 0.05 : 0.3;
    for (int t = 0; t < 20; ++t) {
      const Vec3 x = random_strip_point(s, rng, w, 2.2 + (s.kind() == SurfaceKind::Torus ? 1.0 : 0.0));
      const Mat3 h = distance_hessian(s, x);
      const double e = 1e-4;
      Mat3 fd;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          const Vec3 ei = e * Vec3::Unit(i), ej = e * Vec3::Unit(j);
          fd(i, j) = (signed_distance(s, x + ei + ej) - signed_distance(s, x + ei - ej) -
                      signed_distance(s, x - ei + ej) + signed_distance(s, x - ei - ej)) /
                     (4 * e * e);
        }
      CHECK((fd - h).norm() < 1e-5 * std::max(1.0, h.norm()));

      // gradient of d is the normal at the foot
      const SurfacePoint p = project(s, x);
      Vec3 g;
      for (int i = 0; i < 3; ++i)
        g(i) = (signed_distance(s, x + e * Vec3::Unit(i)) - signed_distance(s, x - e * Vec3::Unit(i))) / (2 * e);
      CHECK((g - p.normal).norm() < 1e-7);

      // closest-point Jacobian against central differences of psi
      const Mat3 jac = closest_point_jacobian(s, x);
      Mat3 jfd;
      for (int i = 0; i < 3; ++i)
        jfd.col(i) =
            (closest_point(s, x + e * Vec3::Unit(i)) - closest_point(s, x - e * Vec3::Unit(i))) / (2 * e);
      CHECK((jfd - jac).norm() < 1e-6);
    }
  }
}

TEST_CASE("tangent projector") {
  const auto sphere = SurfaceDescription::sphere();
  const Vec3 n = Vec3(1, 1, 1).normalized();
  const Mat3 p = tangent_projector(sphere, n);
  CHECK((p * n).norm() < 1e-15);
  CHECK((p * p - p).norm() < 1e-15);
  const Mat3 pc = tangent_projector(SurfaceDescription::circle(), Vec3(1, 0, 0));
  CHECK((pc * Vec3(0, 0, 1)).norm() < 1e-15);
  CHECK((pc * Vec3(0, 1, 0) - Vec3(0, 1, 0)).norm() < 1e-15);
}

TEST_CASE("decomposition identity at 10^6 strip points") {
  std::mt19937_64 rng(20240611);
  const int n = 1000000;
  struct Case {
    SurfaceDescription s;
    double w, box, tol;
  };
  std::vector<Case> cases = {{SurfaceDescription::circle(), 0.5, 1.5, 1e-10},
                             {SurfaceDescription::sphere(), 0.5, 1.5, 1e-10},
                             {SurfaceDescription::torus(2.0, 1.0), 0.5, 3.5, 1e-10},
                             {SurfaceDescription::implicit("heart"), 0.08, 2.0, 1e-8}};
  for (const Case& c : cases) {
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      const Vec3 x = random_strip_point(c.s, rng, c.w, c.box);
      worst = std::max(worst, decomposition_residual(c.s, x));
    }
    INFO(c.s.name());
    CHECK(worst < c.tol);
  }
}

TEST_CASE("implicit surface errors") {
  const auto heart = SurfaceDescription::implicit("heart");
  bool thrown = false;
  try {
    signed_distance(heart, Vec3(0.0, 0.0, 0.05));
  } catch (const Error& e) {
    thrown = true;
    CHECK((e.kind() == ErrorKind::OutsideStrip || e.kind() == ErrorKind::NonConvergence));
  }
  CHECK(thrown);
  CHECK_THROWS_AS(SurfaceDescription::implicit("nope"), Error);
}
