#include "lbs/reference_fem.hpp"

#include "lbs/error.hpp"

#include <cmath>
#include <numbers>

namespace lbs {

double reference_measure(CellKind kind) { return kind == CellKind::Triangle ? 0.5 : 1.0; }

std::string_view to_string(QuadratureFamily family) {
  switch (family) {
    case QuadratureFamily::GaussLegendre: return "gauss_legendre";
    case QuadratureFamily::GaussLobatto: return "gauss_lobatto";
    case QuadratureFamily::NewtonCotes: return "newton_cotes";
    case QuadratureFamily::SymmetricTriangle: return "symmetric_triangle";
  }
  return "unknown";
}

QuadratureFamily quadrature_family_from_string(std::string_view name) {
  if (name == "gauss_legendre") return QuadratureFamily::GaussLegendre;
  if (name == "gauss_lobatto") return QuadratureFamily::GaussLobatto;
  if (name == "newton_cotes") return QuadratureFamily::NewtonCotes;
  if (name == "symmetric_triangle") return QuadratureFamily::SymmetricTriangle;
  throw Error(ErrorKind::InvalidArgument, "unknown quadrature family '" + std::string(name) + "'");
}

double QuadratureRule::apply(const std::function<double(const RefPoint&)>& f) const {
  double s = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) s += weights[i] * f(points[i]);
  return s;
}

namespace {

// Legendre P_n and P_{n-1} at x in [-1, 1].
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, p0};
}

}  // namespace

void gauss_legendre_1d(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw Error(ErrorKind::UnsupportedCombination, "Gauss-Legendre needs n >= 1");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, pm] = legendre(n, t);
      const double dp = n * (t * p - pm) / (t * t - 1.0);
      const double dt = p / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    const auto [p, pm] = legendre(n, t);
    const double dp = n * (t * p - pm) / (t * t - 1.0);
    // map [-1,1] -> [0,1]; descending t gives ascending x after reflection
    x[i] = 0.5 * (1.0 - t);
    w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
  }
}

void gauss_lobatto_1d(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 2) throw Error(ErrorKind::UnsupportedCombination, "Gauss-Lobatto needs n >= 2");
  const int N = n - 1;
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(std::numbers::pi * i / N);
    if (i > 0 && i < N) {
      for (int it = 0; it < 100; ++it) {
        const auto [p, pm] = legendre(N, t);
        const double dt = (t * p - pm) / (n * p);
        t -= dt;
        if (std::abs(dt) < 1e-16) break;
      }
    }
    const double p = legendre(N, t).first;
    x[i] = 0.5 * (1.0 - t);
    w[i] = 1.0 / (N * n * p * p);
  }
  x.front() = 0.0;
  x.back() = 1.0;
  // symmetrize
  for (int i = 0; i < n / 2; ++i) {
    const double xs = 0.5 * (x[i] + 1.0 - x[n - 1 - i]);
    x[i] = xs;
    x[n - 1 - i] = 1.0 - xs;
    const double ws = 0.5 * (w[i] + w[n - 1 - i]);
    w[i] = w[n - 1 - i] = ws;
  }
  if (n % 2 == 1) x[n / 2] = 0.5;
}

void newton_cotes_1d(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 2) throw Error(ErrorKind::UnsupportedCombination, "closed Newton-Cotes needs n >= 2");
  x.resize(n);
  for (int i = 0; i < n; ++i) x[i] = static_cast<double>(i) / (n - 1);
  Eigen::MatrixXd v(n, n);
  Eigen::VectorXd m(n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) v(j, i) = std::pow(x[i], j);
    m(j) = 1.0 / (j + 1);
  }
  const Eigen::VectorXd sol = v.fullPivLu().solve(m);
  w.assign(sol.data(), sol.data() + n);
  for (int i = 0; i < n / 2; ++i) w[i] = w[n - 1 - i] = 0.5 * (w[i] + w[n - 1 - i]);
}

namespace {

struct SymmetricTable {
  int n_points;
  int degree;
  // (x, y, weight) with weights normalized to unit area
  std::vector<std::array<double, 3>> pts;
};

void add_orbit3(std::vector<std::array<double, 3>>& p, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  p.push_back({a, a, w});
  p.push_back({a, b, w});
  p.push_back({b, a, w});
}

void add_orbit6(std::vector<std::array<double, 3>>& p, double a, double b, double w) {
  const double c = 1.0 - a - b;
  p.push_back({a, b, w});
  p.push_back({b, a, w});
  p.push_back({a, c, w});
  p.push_back({c, a, w});
  p.push_back({b, c, w});
  p.push_back({c, b, w});
}

// Dunavant (1985) and Radon rules.
const std::vector<SymmetricTable>& symmetric_tables() {
  static const std::vector<SymmetricTable> tables = [] {
    std::vector<SymmetricTable> t;
    {
      SymmetricTable s{1, 1, {{1.0 / 3.0, 1.0 / 3.0, 1.0}}};
      t.push_back(s);
    }
    {
      SymmetricTable s{3, 2, {}};
      add_orbit3(s.pts, 1.0 / 6.0, 1.0 / 3.0);
      t.push_back(s);
    }
    {
      SymmetricTable s{4, 3, {{1.0 / 3.0, 1.0 / 3.0, -27.0 / 48.0}}};
      add_orbit3(s.pts, 0.2, 25.0 / 48.0);
      t.push_back(s);
    }
    {
      SymmetricTable s{6, 4, {}};
      add_orbit3(s.pts, 0.44594849091596488632, 0.22338158967801146570);
      add_orbit3(s.pts, 0.09157621350977074346, 0.10995174365532186764);
      t.push_back(s);
    }
    {
      const double r15 = std::sqrt(15.0);
      SymmetricTable s{7, 5, {{1.0 / 3.0, 1.0 / 3.0, 9.0 / 40.0}}};
      add_orbit3(s.pts, (6.0 - r15) / 21.0, (155.0 - r15) / 1200.0);
      add_orbit3(s.pts, (6.0 + r15) / 21.0, (155.0 + r15) / 1200.0);
      t.push_back(s);
    }
    {
      SymmetricTable s{12, 6, {}};
      add_orbit3(s.pts, 0.24928674517091042129, 0.11678627572637936603);
      add_orbit3(s.pts, 0.06308901449150222834, 0.050844906370206816921);
      add_orbit6(s.pts, 0.053145049844816947353, 0.31035245103378440542,
                 0.082851075618373575194);
      t.push_back(s);
    }
    {
      SymmetricTable s{13, 7, {{1.0 / 3.0, 1.0 / 3.0, -0.14957004446768175063}}};
      add_orbit3(s.pts, 0.26034596607903982693, 0.17561525743320781175);
      add_orbit3(s.pts, 0.065130102902215811538, 0.05334723560883849127);
      add_orbit6(s.pts, 0.048690315425316411793, 0.31286549600487386141,
                 0.07711376089025714026);
      t.push_back(s);
    }
    return t;
  }();
  return tables;
}

}  // namespace

QuadratureRule make_rule(CellKind kind, QuadratureFamily family, int n) {
  QuadratureRule rule;
  rule.cell_kind = kind;
  rule.family = family;
  auto unsupported = [&] {
    return Error(ErrorKind::UnsupportedCombination,
                 std::string(to_string(family)) + " with " + std::to_string(n) + " points on " +
                     std::string(to_string(kind)));
  };

  if (kind == CellKind::Segment || kind == CellKind::Quad) {
    std::vector<double> x, w;
    switch (family) {
      case QuadratureFamily::GaussLegendre:
        gauss_legendre_1d(n, x, w);
        rule.exactness_degree = 2 * n - 1;
        break;
      case QuadratureFamily::GaussLobatto:
        gauss_lobatto_1d(n, x, w);
        rule.exactness_degree = 2 * n - 3;
        break;
      case QuadratureFamily::NewtonCotes:
        newton_cotes_1d(n, x, w);
        rule.exactness_degree = (n % 2 == 1) ? n : n - 1;
        break;
      case QuadratureFamily::SymmetricTriangle:
        throw unsupported();
    }
    if (kind == CellKind::Segment) {
      for (int i = 0; i < n; ++i) {
        rule.points.emplace_back(x[i], 0.0);
        rule.weights.push_back(w[i]);
      }
    } else {
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          rule.points.emplace_back(x[i], x[j]);
          rule.weights.push_back(w[i] * w[j]);
        }
    }
    return rule;
  }

  // triangles
  switch (family) {
    case QuadratureFamily::GaussLegendre: {
      // Collapsed tensor rule: x = u (1 - v), y = v, Jacobian (1 - v).
      std::vector<double> x, w;
      gauss_legendre_1d(n, x, w);
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          rule.points.emplace_back(x[i] * (1.0 - x[j]), x[j]);
          rule.weights.push_back(w[i] * w[j] * (1.0 - x[j]));
        }
      rule.exactness_degree = 2 * n - 2;
      return rule;
    }
    case QuadratureFamily::SymmetricTriangle: {
      for (const auto& t : symmetric_tables()) {
        if (t.n_points != n) continue;
        for (const auto& p : t.pts) {
          rule.points.emplace_back(p[0], p[1]);
          rule.weights.push_back(0.5 * p[2]);
        }
        rule.exactness_degree = t.degree;
        return rule;
      }
      throw unsupported();
    }
    case QuadratureFamily::NewtonCotes: {
      if (n < 2) throw unsupported();
      const ReferenceElement el(CellKind::Triangle, n - 1, NodeFamily::Equispaced);
      return induced_rule(el);
    }
    case QuadratureFamily::GaussLobatto:
      throw unsupported();
  }
  throw unsupported();
}

QuadratureRule gauss_rule_for_degree(CellKind kind, int degree) {
  degree = std::max(degree, 1);
  if (kind == CellKind::Triangle) return make_rule(kind, QuadratureFamily::GaussLegendre, (degree + 3) / 2);
  return make_rule(kind, QuadratureFamily::GaussLegendre, (degree + 2) / 2);
}

double reference_monomial_integral(CellKind kind, int a, int b) {
  switch (kind) {
    case CellKind::Segment: return b == 0 ? 1.0 / (a + 1) : 0.0;
    case CellKind::Quad: return 1.0 / ((a + 1.0) * (b + 1.0));
    case CellKind::Triangle: {
      // a! b! / (a + b + 2)!
      double v = 1.0;
      for (int i = 1; i <= a; ++i) v *= static_cast<double>(i) / (b + 2 + i);
      for (int i = 1; i <= b + 2; ++i) v /= i;
      for (int i = 1; i <= b; ++i) v *= i;
      return v;
    }
  }
  return 0.0;
}

int measured_exactness(const QuadratureRule& rule, int max_degree, double tol) {
  const double scale = reference_measure(rule.cell_kind);
  for (int d = 0; d <= max_degree; ++d) {
    std::vector<std::array<int, 2>> monos;
    if (rule.cell_kind == CellKind::Segment) {
      monos.push_back({d, 0});
    } else if (rule.cell_kind == CellKind::Triangle) {
      for (int a = 0; a <= d; ++a) monos.push_back({a, d - a});
    } else {
      // tensor degree: max(a, b) = d
      for (int a = 0; a <= d; ++a) {
        monos.push_back({a, d});
        monos.push_back({d, a});
      }
    }
    for (const auto& m : monos) {
      const double q = rule.apply([&](const RefPoint& p) {
        return std::pow(p.x(), m[0]) * std::pow(p.y(), m[1]);
      });
      if (std::abs(q - reference_monomial_integral(rule.cell_kind, m[0], m[1])) > tol * scale)
        return d - 1;
    }
  }
  return max_degree;
}

double quadrature_error(const QuadratureRule& rule,
                        const std::function<double(const RefPoint&)>& f,
                        const QuadratureErrorSettings& settings) {
  const int target = 2 * std::max(rule.exactness_degree, 1) + 6;
  const QuadratureRule oracle = gauss_rule_for_degree(rule.cell_kind, target);
  const QuadratureRule refined = gauss_rule_for_degree(rule.cell_kind, target + 10);
  const double exact = oracle.apply(f);
  const double check = refined.apply(f);
  if (std::abs(exact - check) > settings.oracle_tol * std::max(1.0, std::abs(check)))
    throw Error(ErrorKind::OracleInsufficient, "oracle and refined oracle disagree by " +
                                                   std::to_string(std::abs(exact - check)));
  return check - rule.apply(f);
}

}  // namespace lbs
