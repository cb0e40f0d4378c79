// Acceptance checks: one PASS/FAIL line per criterion, with timings.

#include "lbs/error.hpp"
#include "lbs/presets.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

using namespace lbs;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool in_time = secs <= budget_s;
  const bool pass = out.pass && in_time;
  if (!pass) ++failures;
  std::printf("%s criterion %d: %s (%.1f s of %.0f s budget) %s%s\n", pass ? "PASS" : "FAIL", id, title, secs,
              budget_s, out.detail.c_str(), in_time ? "" : " [over budget]");
  std::fflush(stdout);
}

StudyResult run_preset(const std::string& name) {
  StudyConfig c = preset_config(name);
  c.write_files = false;
  return run_study(c);
}

const SlopeVerdict& verdict(const StudyResult& r, const std::string& quantity, double lambda) {
  for (const auto& v : r.slopes)
    if (v.quantity == quantity && v.lambda == lambda) return v;
  throw Error(ErrorKind::InsufficientData, "no " + quantity + " slope for lambda " + std::to_string(lambda));
}

std::string fmt_slope(const char* label, double s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s=%.3f ", label, s);
  return buf;
}

bool within(double v, double target, double window) { return std::abs(v - target) <= window; }

FeSpace space_on(const SurfaceDescription& s, CellKind kind, int level, int k, int r, int segments = 4) {
  BaseMeshOptions o;
  o.cell_kind = kind;
  o.level = level;
  o.circle_segments = segments;
  const auto pts = default_node_family(kind) == NodeFamily::GaussLobatto ? InterpolationPointSet::gauss_lobatto(k)
                                                                        : InterpolationPointSet::equispaced(k);
  auto lifted = std::make_shared<LiftedMesh>(build_lift(s, make_base(s, o), k, pts));
  return build_space(lifted, r);
}

double max_abs(const SparseMatrix& a) {
  double v = 0.0;
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) v = std::max(v, std::abs(it.value()));
  return v;
}

// Fit over every level of a single-target eigenvalue study.
Outcome eigenvalue_slope(const std::string& preset, double expected, double window) {
  const StudyResult r = run_preset(preset);
  const SlopeVerdict& v = verdict(r, "eigenvalue", r.rows.front().lambda);
  Outcome o;
  o.pass = r.completed && within(v.all.slope, expected, window);
  o.detail = preset + ": " + fmt_slope("slope", v.all.slope) + (v.tail ? fmt_slope("last3", v.tail->slope) : "") +
             "expected " + std::to_string(expected).substr(0, 4);
  if (!v.all.excluded.empty()) o.detail += " (" + std::to_string(v.all.excluded.size()) + " level(s) below noise floor)";
  return o;
}

Outcome merge(const std::vector<Outcome>& parts) {
  Outcome o{true, ""};
  for (const auto& p : parts) {
    o.pass = o.pass && p.pass;
    o.detail += (o.detail.empty() ? "" : "; ") + p.detail;
  }
  return o;
}

Outcome eigfun_slopes(const std::string& preset, double l2, double energy) {
  const StudyResult r = run_preset(preset);
  const double lam = r.rows.front().lambda;
  const SlopeVerdict& vl = verdict(r, "l2", lam);
  const SlopeVerdict& ve = verdict(r, "energy", lam);
  Outcome o;
  o.pass = r.completed && vl.tail && ve.tail && within(vl.tail->slope, l2, 0.25) && within(ve.tail->slope, energy, 0.25);
  o.detail = preset + ": " + (vl.tail ? fmt_slope("l2", vl.tail->slope) : "l2=none ") +
             (ve.tail ? fmt_slope("energy", ve.tail->slope) : "energy=none ");
  o.detail.pop_back();
  return o;
}

Outcome property_suites() {
  std::vector<std::string> failed;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) failed.push_back(what);
  };

  // quadrature moment tables
  std::vector<QuadratureRule> rules;
  for (int n = 1; n <= 10; ++n)
    for (CellKind kind : {CellKind::Segment, CellKind::Quad, CellKind::Triangle})
      rules.push_back(make_rule(kind, QuadratureFamily::GaussLegendre, n));
  for (int n = 2; n <= 8; ++n)
    for (CellKind kind : {CellKind::Segment, CellKind::Quad}) {
      rules.push_back(make_rule(kind, QuadratureFamily::GaussLobatto, n));
      rules.push_back(make_rule(kind, QuadratureFamily::NewtonCotes, n));
    }
  for (int n : {1, 3, 4, 6, 7, 12, 13}) rules.push_back(make_rule(CellKind::Triangle, QuadratureFamily::SymmetricTriangle, n));
  for (const auto& r : rules) check(measured_exactness(r, r.exactness_degree, 1e-13) == r.exactness_degree, "moments");

  // assembly and solver invariants, structural identity
  const auto sphere = SurfaceDescription::sphere();
  for (CellKind kind : {CellKind::Triangle, CellKind::Quad}) {
    const FeSpace space = space_on(sphere, kind, 2, 2, 2);
    const AssembledForms f = assemble(space);
    const double na = max_abs(f.stiffness);
    check((f.stiffness * Eigen::VectorXd::Ones(space.n_dofs())).cwiseAbs().maxCoeff() <= 1e-12 * na, "A1=0");
    check(max_abs(SparseMatrix(f.stiffness - SparseMatrix(f.stiffness.transpose()))) <= 1e-12 * na, "A symmetric");
    check(max_abs(SparseMatrix(f.mass - SparseMatrix(f.mass.transpose()))) <= 1e-12 * max_abs(f.mass), "M symmetric");
    for (EigenMethod method : {EigenMethod::Dense, EigenMethod::ShiftInvertLanczos}) {
      SolverSettings s;
      s.method = method;
      const SpectralResult res = solve_smallest(f, 10, s);
      const Eigen::MatrixXd g = res.eigenvectors.transpose() * (f.mass * res.eigenvectors);
      check((g - Eigen::MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff() <= 1e-10, "M-orthonormality");
      for (int i = 0; i < res.size(); ++i)
        check(res.residual_norms(i) <= std::max(1e-10, res.residual_floor(i)), "residual");
      if (method == EigenMethod::Dense) {
        const Eigen::VectorXd v = res.eigenvectors.col(0) - 0.4 * res.eigenvectors.col(5);
        const Eigen::VectorXd w = res.eigenvectors.col(2) + res.eigenvectors.col(7);
        // exact-integral identity: compare with forms assembled on the same fine rule
        const AssembledForms fine = assemble(space, gauss_rule_for_degree(kind, 2 * 2 + 2 * 2 + 14));
        for (const Eigen::VectorXd& x : {v, w}) {
          const GammaForms gf = gamma_forms(sphere, space, v, x, 14);
          const double a = v.dot(fine.stiffness * x), m = v.dot(fine.mass * x);
          check(std::abs(gf.a_tilde - a) <= 1e-11 * std::max(1.0, std::abs(a)), "A(V,W) = A~");
          check(std::abs(gf.m_tilde - m) <= 1e-11 * std::max(1.0, std::abs(m)), "M(V,W) = M~");
        }
      }
    }
  }

  // regular polygon degeneracy pairs
  for (int n : {16, 64}) {
    const AssembledForms f = assemble(space_on(SurfaceDescription::circle(), CellKind::Segment, 0, 1, 1, n));
    const SpectralResult res = solve_smallest(f, 6);
    for (int j = 0; j < 6; j += 2)
      check(std::abs(res.eigenvalues(j) - res.eigenvalues(j + 1)) <= 1e-10 * res.eigenvalues(j), "polygon pairs");
  }

  // decomposition residual at 10^6 strip points per surface
  std::mt19937_64 rng(1);
  double worst_closed = 0.0, worst_implicit = 0.0;
  for (const auto& s : {SurfaceDescription::sphere(), SurfaceDescription::torus(2.0, 1.0),
                        SurfaceDescription::implicit("heart")}) {
    const bool imp = s.kind() == SurfaceKind::Implicit;
    const double box = s.kind() == SurfaceKind::Torus ? 3.5 : 2.0, w = imp ? 0.1 : 0.5;
    std::uniform_real_distribution<double> u(-box, box);
    int count = 0;
    while (count < 1000000) {
      const Vec3 x(u(rng), u(rng), u(rng));
      if (imp) {
        const double g = s.level_set().gradient(x).norm();
        if (g < 1e-3 || std::abs(s.level_set().value(x) / g) > 0.8 * w) continue;
      } else if (std::abs(signed_distance(s, x)) >= w) {
        continue;
      }
      SurfacePoint p;
      try {
        p = project(s, x);
      } catch (const Error&) {
        continue;  // outside the admissible strip
      }
      if (std::abs(p.distance) >= w) continue;
      const double res = (x - p.foot - p.distance * p.normal).norm();
      (imp ? worst_implicit : worst_closed) = std::max(imp ? worst_implicit : worst_closed, res);
      ++count;
    }
  }
  check(worst_closed <= 1e-10, "decomposition (closed form)");
  check(worst_implicit <= 1e-8, "decomposition (implicit)");

  Outcome o;
  o.pass = failed.empty();
  char buf[200];
  std::snprintf(buf, sizeof buf, "%zu rules; decomposition residual %.1e closed form, %.1e implicit", rules.size(),
                worst_closed, worst_implicit);
  o.detail = buf;
  for (const auto& f : failed) o.detail += "; failed: " + f;
  return o;
}

Outcome p1_pencil() {
  double worst = 0.0;
  for (int n : {8, 16}) {
    const AssembledForms f = assemble(space_on(SurfaceDescription::circle(), CellKind::Segment, 0, 1, 1, n));
    SolverSettings s;
    s.method = EigenMethod::Dense;
    const SpectralResult res = solve_smallest(f, n - 1, s);
    const double side = 2 * std::sin(M_PI / n);
    std::vector<double> sym;
    for (int j = 1; j < n; ++j) {
      const double th = 2 * M_PI * j / n;
      sym.push_back(6 * (1 - std::cos(th)) / (side * side * (2 + std::cos(th))));
    }
    std::sort(sym.begin(), sym.end());
    for (int j = 0; j < n - 1; ++j) worst = std::max(worst, std::abs(res.eigenvalues(j) - sym[j]) / sym[j]);
  }
  char buf[80];
  std::snprintf(buf, sizeof buf, "max relative deviation %.2e", worst);
  return {worst <= 1e-10, buf};
}

Outcome constant_stability() {
  const StudyResult r = run_preset("sphere-constants-k1r3");
  double lo = INFINITY, hi = 0.0;
  std::string vals;
  for (const auto& row : r.rows) {
    if (row.level != r.config.level_max) continue;
    const double c = row.eigenvalue_error / (row.lambda * row.h * row.h);
    lo = std::min(lo, c);
    hi = std::max(hi, c);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g ", c);
    vals += buf;
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "ratios for l=1..6: %smax/min=%.2f", vals.c_str(), hi / lo);
  return {r.completed && hi / lo < 3.0, buf};
}

}  // namespace

int main() {
  criterion(1, "circle superconvergence, Gauss-Lobatto", 10, [] {
    return merge({eigenvalue_slope("circle-superconv-k2-gl", 4, 0.25), eigenvalue_slope("circle-superconv-k3-gl", 6, 0.25)});
  });
  criterion(2, "circle equispaced even/odd effect", 10, [] {
    return merge({eigenvalue_slope("circle-equispaced-k2", 4, 0.25), eigenvalue_slope("circle-equispaced-k3", 4, 0.25)});
  });
  criterion(3, "sphere eigenfunction rates", 240, [] {
    return merge({eigfun_slopes("sphere-eigfun-r1k2", 2, 1), eigfun_slopes("sphere-eigfun-r3k1", 2, 2)});
  });
  criterion(4, "sphere eigenvalue constant stability", 300, constant_stability);
  criterion(5, "heart implicit surface, quads, Gauss-Lobatto k=2", 600, [] {
    const StudyResult r = run_preset("heart-quad-gl-k2");
    const SlopeVerdict& v = verdict(r, "eigenvalue", r.rows.front().lambda);
    Outcome o;
    o.pass = r.completed && within(v.all.slope, 4, 0.3);
    o.detail = "heart-quad-gl-k2: " + fmt_slope("slope", v.all.slope);
    if (!r.references.empty()) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "reference %.12f +- %.1e", r.references[0].value, r.references[0].estimate);
      o.detail += buf;
    }
    for (const auto& n : r.notes) o.detail += "; " + n;
    return o;
  });
  criterion(6, "sphere perturbation study", 600, [] {
    const StudyResult u = run_preset("sphere-perturbed-unbiased");
    const StudyResult b = run_preset("sphere-perturbed-biased");
    const SlopeVerdict& vu = verdict(u, "eigenvalue", 2.0);
    const SlopeVerdict& vb = verdict(b, "eigenvalue", 2.0);
    const double su = vu.tail ? vu.tail->slope : vu.all.slope;
    const double sb = vb.tail ? vb.tail->slope : vb.all.slope;
    Outcome o;
    o.pass = u.completed && b.completed && within(su, 4, 0.3) && within(sb, 3, 0.3);
    o.detail = fmt_slope("unbiased", su) + fmt_slope("biased", sb);
    o.detail.pop_back();
    return o;
  });
  criterion(7, "property suites", 600, property_suites);
  criterion(8, "circle P1 matches the periodic pencil", 10, p1_pencil);
  std::printf("%s: %d criterion(s) failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
