#include "lbs/harmonics.hpp"

#include "lbs/error.hpp"

#include <cmath>
#include <numbers>

namespace lbs {

namespace {

// Forward-mode dual number with a 3-vector of partials.
struct Dual {
  double v = 0.0;
  Vec3 d = Vec3::Zero();
};

Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, a.d + b.d}; }
Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, a.d - b.d}; }
Dual operator*(const Dual& a, const Dual& b) { return {a.v * b.v, a.v * b.d + b.v * a.d}; }
Dual operator*(double s, const Dual& a) { return {s * a.v, s * a.d}; }

Dual dual_pow(const Dual& a, int n) {
  Dual out{1.0, Vec3::Zero()};
  for (int i = 0; i < n; ++i) out = out * a;
  return out;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double binomial(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

}  // namespace

FunctionSample solid_harmonic(int l, int m, const Vec3& p) {
  if (l < 0 || std::abs(m) > l) throw Error(ErrorKind::InvalidArgument, "harmonic index out of range");
  const int am = std::abs(m);
  const Dual x{p.x(), Vec3::UnitX()};
  const Dual y{p.y(), Vec3::UnitY()};
  const Dual z{p.z(), Vec3::UnitZ()};
  const Dual r2 = x * x + y * y + z * z;

  // Re and Im of (x + i y)^|m|
  Dual re{1.0, Vec3::Zero()}, im{0.0, Vec3::Zero()};
  for (int i = 0; i < am; ++i) {
    const Dual nre = x * re - y * im;
    const Dual nim = x * im + y * re;
    re = nre;
    im = nim;
  }

  Dual pi_lm{0.0, Vec3::Zero()};
  for (int k = 0; 2 * k <= l - am; ++k) {
    const double c = (k % 2 ? -1.0 : 1.0) * std::ldexp(1.0, -l) * binomial(l, k) * binomial(2 * l - 2 * k, l) *
                     factorial(l - 2 * k) / factorial(l - 2 * k - am);
    pi_lm = pi_lm + c * (dual_pow(r2, k) * dual_pow(z, l - 2 * k - am));
  }
  pi_lm = std::sqrt(factorial(l - am) / factorial(l + am)) * pi_lm;

  Dual out;
  if (m == 0) {
    out = std::sqrt((2 * l + 1) / (4 * std::numbers::pi)) * pi_lm;
  } else {
    out = std::sqrt((2 * l + 1) / (2 * std::numbers::pi)) * (pi_lm * (m > 0 ? re : im));
  }
  return {out.v, out.d};
}

FunctionSample sphere_harmonic(int l, int m, double radius, const Vec3& y) {
  const Vec3 unit = y / radius;
  FunctionSample s = solid_harmonic(l, m, unit);
  const Vec3 n = unit.normalized();
  s.value /= radius;
  s.gradient = (s.gradient - n * n.dot(s.gradient)) / (radius * radius);
  return s;
}

FunctionSample circle_mode(int n, bool sine, double radius, const Vec3& y) {
  const double theta = std::atan2(y.y(), y.x());
  const double c = 1.0 / std::sqrt(std::numbers::pi * radius);
  const Vec3 t(-std::sin(theta), std::cos(theta), 0.0);
  FunctionSample s;
  if (n == 0) {
    s.value = 1.0 / std::sqrt(2 * std::numbers::pi * radius);
    return s;
  }
  if (sine) {
    s.value = c * std::sin(n * theta);
    s.gradient = c * n * std::cos(n * theta) / radius * t;
  } else {
    s.value = c * std::cos(n * theta);
    s.gradient = -c * n * std::sin(n * theta) / radius * t;
  }
  return s;
}

}  // namespace lbs
