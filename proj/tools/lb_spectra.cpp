#include "lbs/error.hpp"
#include "lbs/presets.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

using namespace lbs;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalFailure = 3;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigError:
    case ErrorKind::InvalidArgument:
    case ErrorKind::UnsupportedCombination:
    case ErrorKind::UnsupportedSurface:
      return kConfigError;
    default:
      return kNumericalFailure;
  }
}

CellKind parse_cell(const std::string& cell) {
  if (cell == "segment") return CellKind::Segment;
  if (cell == "triangle") return CellKind::Triangle;
  if (cell == "quad") return CellKind::Quad;
  throw Error(ErrorKind::ConfigError, "unknown cell kind '" + cell + "'");
}

void print_summary(const StudyResult& res) {
  std::printf("%-6s %-12s %-8s %-12s %-14s %-14s %-14s %s\n", "level", "h", "n_dofs", "lambda", "eig_error",
              "l2_error", "energy_error", "status");
  for (const auto& row : res.rows)
    std::printf("%-6d %-12.5e %-8d %-12.6g %-14.6e %-14.6e %-14.6e %s\n", row.level, row.h, row.n_dofs, row.lambda,
                row.eigenvalue_error, row.l2_error, row.energy_error, row.status.c_str());
  for (const auto& v : res.slopes) {
    std::printf("slope %-10s lambda=%-10.6g", v.quantity.c_str(), v.lambda);
    if (v.tail)
      std::printf(" last3=%.3f all=%.3f", v.tail->slope, v.all.slope);
    else
      std::printf(" (no fit: %s)", v.note.c_str());
    if (v.expected) std::printf(" expected %.2f +- %.2f -> %s", *v.expected, v.window, v.pass ? "PASS" : "FAIL");
    std::printf("\n");
  }
  for (const auto& n : res.notes) std::printf("note: %s\n", n.c_str());
}

int cmd_study(const std::string& config_path, const std::string& preset, const std::string& out_dir,
              bool timing) {
  StudyConfig cfg = preset.empty() ? load_config(config_path) : preset_config(preset);
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  if (timing) cfg.output_timing = true;
  const StudyResult res = run_study(cfg);
  write_outputs(res);
  print_summary(res);
  std::printf("outputs in %s\n", cfg.output_dir.c_str());
  return res.completed ? kOk : kNumericalFailure;
}

struct SolveOptions {
  std::string surface = "sphere";
  std::string cell;
  std::string points;
  int k = 2;
  int r = 2;
  int level = 2;
  int num_eigs = 12;
  std::string method = "auto";
  std::string export_prefix;
};

int cmd_solve(const SolveOptions& o) {
  StudyConfig cfg;
  cfg.surface = o.surface;
  cfg.cell_kind = o.surface == "circle" ? CellKind::Segment : CellKind::Quad;
  if (!o.cell.empty()) cfg.cell_kind = parse_cell(o.cell);
  cfg.k = o.k;
  cfg.r = o.r;
  cfg.level_min = cfg.level_max = o.level;
  cfg.points = o.points.empty() ? (default_node_family(cfg.cell_kind) == NodeFamily::GaussLobatto
                                       ? PointKind::GaussLobatto
                                       : PointKind::Equispaced)
                                : point_kind_from_string(o.points);
  cfg.reference = ReferencePolicy::Extrapolated;  // no closed form required here
  cfg.reference_settings.level_max = cfg.reference_settings.level_min + 2;
  validate(cfg);
  const SurfaceDescription surface = make_surface(cfg);
  BaseMeshOptions opts;
  opts.cell_kind = cfg.cell_kind;
  opts.level = o.level;
  auto lifted = std::make_shared<LiftedMesh>(build_lift(surface, make_base(surface, opts), cfg.k, make_point_set(cfg)));
  const FeSpace space = build_space(lifted, cfg.r);
  const AssembledForms forms = assemble(space);
  if (!o.export_prefix.empty()) {
    std::ofstream a(o.export_prefix + "_A.mtx"), m(o.export_prefix + "_M.mtx");
    write_matrix_market(a, forms.stiffness);
    write_matrix_market(m, forms.mass);
  }
  SolverSettings s;
  s.method = eigen_method_from_string(o.method);
  const SpectralResult res = solve_smallest(forms, std::min(o.num_eigs, space.n_dofs() - 1), s);
  std::printf("surface %s, %s cells, k=%d, r=%d, level %d, h=%.6e, n_dofs=%d, area=%.15g, method %s\n",
              surface.name().c_str(), std::string(to_string(cfg.cell_kind)).c_str(), cfg.k, cfg.r, o.level,
              lifted->h, space.n_dofs(), forms.area, std::string(to_string(res.method_used)).c_str());
  std::printf("%-4s %-22s %s\n", "i", "Lambda_i", "residual");
  for (int i = 0; i < res.size(); ++i)
    std::printf("%-4d %-22.15g %.2e\n", i + 1, res.eigenvalues(i), res.residual_norms(i));
  return kOk;
}

int cmd_quadcheck(const std::string& rule_name, int n, const std::string& cell) {
  const CellKind kind = parse_cell(cell);
  const QuadratureRule rule = make_rule(kind, quadrature_family_from_string(rule_name), n);
  std::printf("rule %s on %s, %zu points, nominal exactness %d\n", std::string(to_string(rule.family)).c_str(),
              std::string(to_string(kind)).c_str(), rule.size(), rule.exactness_degree);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    if (kind == CellKind::Segment)
      std::printf("  x = %.17f  w = %.17f\n", rule.points[i].x(), rule.weights[i]);
    else
      std::printf("  x = (%.17f, %.17f)  w = %.17f\n", rule.points[i].x(), rule.points[i].y(), rule.weights[i]);
  }
  const int measured = measured_exactness(rule, rule.exactness_degree + 4);
  std::printf("measured exactness %d (%s)\n", measured, measured == rule.exactness_degree ? "matches" : "MISMATCH");
  return measured == rule.exactness_degree ? kOk : kNumericalFailure;
}

int cmd_presets(bool list, const std::string& show) {
  if (!show.empty()) {
    std::cout << find_preset(show).config;
    return kOk;
  }
  (void)list;
  for (const Preset& p : presets()) std::printf("%-28s %s\n", p.name.c_str(), p.description.c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Laplace-Beltrami eigenvalue convergence studies on parametric surface meshes"};
  app.require_subcommand(1);

  auto* study = app.add_subcommand("study", "run a convergence study");
  std::string config_path, preset, out_dir;
  bool timing = false;
  study->add_option("--config", config_path, "flat key = value config file");
  study->add_option("--preset", preset, "run a built-in preset instead of a config file");
  study->add_option("--output-dir", out_dir, "override output.dir");
  study->add_flag("--timing", timing, "include wall-clock seconds in the CSV");

  auto* solve = app.add_subcommand("solve", "assemble one level and print the lowest eigenvalues");
  SolveOptions so;
  solve->add_option("--surface", so.surface, "circle | sphere | torus | implicit name");
  solve->add_option("--cell", so.cell, "segment | triangle | quad");
  solve->add_option("--points", so.points, "equispaced | gauss_lobatto");
  solve->add_option("--k", so.k, "lift degree");
  solve->add_option("--r", so.r, "FE degree");
  solve->add_option("--level", so.level, "refinement level");
  solve->add_option("--num-eigs", so.num_eigs, "number of nonzero eigenvalues");
  solve->add_option("--method", so.method, "auto | dense | shift_invert_lanczos");
  solve->add_option("--export", so.export_prefix, "write <prefix>_A.mtx and <prefix>_M.mtx");

  auto* quad = app.add_subcommand("quadcheck", "print a quadrature rule and verify its exactness");
  std::string rule_name = "gauss_legendre", cell = "segment";
  int npts = 3;
  quad->add_option("--rule", rule_name, "gauss_legendre | gauss_lobatto | newton_cotes | symmetric_triangle");
  quad->add_option("--points", npts, "number of points (per direction for quads)");
  quad->add_option("--cell", cell, "segment | triangle | quad");

  auto* pre = app.add_subcommand("presets", "list built-in study presets");
  bool list = false;
  std::string show;
  pre->add_flag("--list", list, "list preset names");
  pre->add_option("--show", show, "print the config text of a preset");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (*study) {
      if (config_path.empty() == preset.empty()) {
        std::fprintf(stderr, "study: give exactly one of --config or --preset\n");
        return kConfigError;
      }
      return cmd_study(config_path, preset, out_dir, timing);
    }
    if (*solve) return cmd_solve(so);
    if (*quad) return cmd_quadcheck(rule_name, npts, cell);
    if (*pre) return cmd_presets(list, show);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kNumericalFailure;
  }
  return kOk;
}
