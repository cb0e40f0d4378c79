#pragma once

#include "lbs/error_analysis.hpp"
#include "lbs/rate_fit.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lbs {

enum class ReferencePolicy { Analytic, Extrapolated };

struct StudyConfig {
  std::string name = "study";
  std::string surface = "sphere";  // circle | sphere | torus | implicit name
  double radius = 1.0;
  double major_radius = 2.0;
  double minor_radius = 1.0;
  std::optional<double> strip_halfwidth;
  CellKind cell_kind = CellKind::Quad;
  int circle_segments = 4;

  int k = 1;
  PointKind points = PointKind::GaussLobatto;
  std::optional<NodeFamily> perturb_base;  // defaults to the cell's natural family
  PerturbationSpec perturbation;
  int r = 1;

  int level_min = 0;
  int level_max = 2;
  /// Analytic: eigenpair indices (circle n, sphere l). Extrapolated: 1-based
  /// indices of simple discrete eigenvalues.
  std::vector<int> targets{1};
  /// Which eigenfunction of each eigenspace enters the norm errors.
  int target_function = 0;

  std::optional<int> assembly_degree;
  ReferencePolicy reference = ReferencePolicy::Analytic;
  ReferenceSettings reference_settings;

  SolverSettings solver;
  int extra_eigs = 6;
  bool eigenfunction_errors = true;
  bool consistency = true;

  /// Expected slopes; absent entries are reported without a verdict.
  std::optional<double> expect_eigenvalue, expect_l2, expect_energy;
  double expect_window = 0.25;

  std::string output_dir = "lb-spectra-out";
  bool output_timing = false;
  bool write_files = true;
};

/// Flat "key = value" text; '#' starts a comment. Throws ConfigError.
StudyConfig parse_config(std::istream& in);
StudyConfig parse_config_text(const std::string& text);
StudyConfig load_config(const std::string& path);
/// Checks ranges and supported combinations; throws ConfigError.
void validate(const StudyConfig& config);

SurfaceDescription make_surface(const StudyConfig& config);
InterpolationPointSet make_point_set(const StudyConfig& config);

/// One (level, target) result. Missing values are NaN with `status` naming
/// the reason.
struct StudyRow {
  int level = 0;
  double h = 0.0;
  int n_dofs = 0;
  double lambda = 0.0;
  std::vector<int> cluster;  // 1-based indices into the deflated spectrum
  std::vector<double> cluster_values;
  double eigenvalue_error = 0.0;
  double l2_error = 0.0;
  double energy_error = 0.0;
  double mu = 0.0;
  double consistency_stiffness = 0.0;
  double consistency_mass = 0.0;
  double wall_clock = 0.0;
  std::string status = "ok";
  // not part of the CSV
  double energy_error_z = 0.0;
  int target = 0;
};

struct SlopeVerdict {
  std::string quantity;  // eigenvalue | l2 | energy
  double lambda = 0.0;
  RateFit all;
  std::optional<RateFit> tail;  // last three levels
  std::optional<double> expected;
  double window = 0.25;
  bool pass = true;
  std::string note;
};

struct StudyResult {
  StudyConfig config;
  std::vector<StudyRow> rows;  // level-major, targets in order
  std::vector<SlopeVerdict> slopes;
  std::vector<Extrapolated> references;
  bool completed = true;  // every level finished without numerical failure
  bool pass = true;       // completed and every expected slope inside its window
  std::vector<std::string> notes;
};

StudyResult run_study(const StudyConfig& config);

void write_csv(std::ostream& os, const StudyResult& result);
std::string summary_json(const StudyResult& result);
/// CSV, JSON summary and gnuplot .dat files into config.output_dir.
void write_outputs(const StudyResult& result);

}  // namespace lbs
