#pragma once

#include "lbs/surface.hpp"

namespace lbs {

/// Value and gradient of a function at one point.
struct FunctionSample {
  double value = 0.0;
  Vec3 gradient = Vec3::Zero();
};

/// Real solid harmonic r^l Y_lm(x/|x|), orthonormal on the unit sphere.
/// m ranges over -l..l; m < 0 selects the sine family. The gradient is the
/// ambient one.
FunctionSample solid_harmonic(int l, int m, const Vec3& x);

/// L2-normalized eigenfunction of the sphere of radius R at a point y on it;
/// the gradient is tangential.
FunctionSample sphere_harmonic(int l, int m, double radius, const Vec3& y);

/// cos(n theta) (sine = false) or sin(n theta), normalized on the circle of
/// radius R, at a point y on it (z ignored).
FunctionSample circle_mode(int n, bool sine, double radius, const Vec3& y);

}  // namespace lbs
