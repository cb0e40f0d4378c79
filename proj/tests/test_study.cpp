#include "lbs/error.hpp"
#include "lbs/presets.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

using namespace lbs;

namespace {

const char* kSmallCircle = R"(
# quick circle study
name = small
surface = circle
cell_kind = segment
circle.segments = 8
lift.k = 2
lift.points = gauss_lobatto
fe.r = 3
levels.min = 0
levels.max = 3
targets = 1, 2
expect.eigenvalue = 4
)";

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::NonConvergence;  // sentinel: nothing thrown
}

std::string csv_of(const StudyResult& r) {
  std::ostringstream os;
  write_csv(os, r);
  return os.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(LBS_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("config parsing") {
  const StudyConfig c = parse_config_text(kSmallCircle);
  CHECK(c.name == "small");
  CHECK(c.surface == "circle");
  CHECK(c.cell_kind == CellKind::Segment);
  CHECK(c.circle_segments == 8);
  CHECK(c.k == 2);
  CHECK(c.r == 3);
  CHECK(c.points == PointKind::GaussLobatto);
  CHECK(c.targets == std::vector<int>{1, 2});
  REQUIRE(c.expect_eigenvalue);
  CHECK(*c.expect_eigenvalue == 4.0);
  CHECK(c.reference_settings.cell_kind == CellKind::Segment);

  const StudyConfig r = parse_config_text("surface = sphere\ntargets = 1..6\nlift.k = 1\nfe.r = 3\n");
  CHECK(r.targets == std::vector<int>{1, 2, 3, 4, 5, 6});

  const StudyConfig p = parse_config_text(
      "surface = sphere\ncell_kind = triangle\nlift.points = perturbed\nlift.k = 2\nlift.perturb.center = 0.5\n"
      "lift.perturb.seed = 42\nfe.r = 3\n");
  CHECK(p.points == PointKind::Perturbed);
  CHECK(p.perturbation.center == 0.5);
  CHECK(p.perturbation.seed == 42u);
  CHECK(make_point_set(p).base_family == NodeFamily::Equispaced);
}

TEST_CASE("config errors") {
  CHECK(kind_of([] { parse_config_text("bogus = 1\n"); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { parse_config_text("lift.k = 2\nlift.k = 3\n"); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { parse_config_text("lift.k\n"); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { parse_config_text("lift.k = \n"); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { parse_config_text("lift.k = two\n"); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { parse_config_text("fe.r = 0\n"); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { parse_config_text("levels.min = 3\nlevels.max = 2\n"); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { parse_config_text("targets = 2, 1\n"); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { parse_config_text("surface = torus\n"); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { parse_config_text("surface = klein\n"); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { parse_config_text("surface = circle\ncell_kind = quad\n"); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { parse_config_text("cell_kind = triangle\nlift.points = gauss_lobatto\n"); }) ==
        ErrorKind::ConfigError);
  CHECK(kind_of([] {
          parse_config_text("surface = heart\nreference = extrapolated\nreference.levels.min = 1\n"
                            "reference.levels.max = 2\n");
        }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { load_config("/nonexistent/config.txt"); }) == ErrorKind::ConfigError);
  CHECK_NOTHROW(parse_config_text("surface = implicit:heart\nreference = extrapolated\n"));
}

TEST_CASE("every preset parses and validates") {
  CHECK(presets().size() >= 12);
  for (const Preset& p : presets()) {
    INFO(p.name);
    CHECK_NOTHROW(preset_config(p.name));
    CHECK(preset_config(p.name).name == p.name);
  }
  for (const char* name : {"sphere-eigfun-r1k2", "circle-superconv-k2-gl", "sphere-perturbed-biased",
                           "sphere-perturbed-unbiased", "heart-quad-gl-k2", "sphere-constants-k1r3"})
    CHECK_NOTHROW(find_preset(name));
  CHECK(kind_of([] { find_preset("nope"); }) == ErrorKind::ConfigError);
}

TEST_CASE("small circle study: rows, slopes, determinism") {
  StudyConfig c = parse_config_text(kSmallCircle);
  c.write_files = false;
  const StudyResult a = run_study(c);
  CHECK(a.completed);
  REQUIRE(a.rows.size() == 8);
  for (const StudyRow& row : a.rows) {
    CHECK(row.n_dofs == 3 * 8 * (1 << row.level));
    CHECK(row.cluster.size() == 2);
    CHECK(row.status == "ok");
    CHECK(row.l2_error > 0.0);
    CHECK(row.energy_error_z <= row.energy_error * (1 + 1e-8));
  }
  CHECK(a.rows[0].lambda == 1.0);
  CHECK(a.rows[1].lambda == 4.0);
  CHECK(a.rows[0].cluster == std::vector<int>{1, 2});
  CHECK(a.rows[1].cluster == std::vector<int>{3, 4});
  bool found = false;
  for (const SlopeVerdict& v : a.slopes)
    if (v.quantity == "eigenvalue" && v.lambda == 1.0) {
      found = true;
      REQUIRE(v.tail);
      CHECK(v.tail->slope == doctest::Approx(4.0).epsilon(0.06));
      CHECK(v.pass);
    }
  CHECK(found);

  const std::string csv = csv_of(a);
  CHECK(csv.rfind("level,h,n_dofs,lambda,cluster,Lambda,eigenvalue_error,l2_error,energy_error,mu,"
                  "consistency_stiffness,consistency_mass,wall_clock,status\n",
                  0) == 0);
  CHECK(csv.find(",null,ok") != std::string::npos);
  CHECK(csv_of(run_study(c)) == csv);

  const nlohmann::json j = nlohmann::json::parse(summary_json(a));
  CHECK(j["completed"] == true);
  CHECK(j["slopes"].size() >= 2);
  CHECK(j["constants"].size() == 2);
}

TEST_CASE("sphere study with two targets and consistency") {
  StudyConfig c = parse_config_text(
      "name = s\nsurface = sphere\ncell_kind = quad\nlift.k = 2\nfe.r = 2\nlevels.min = 0\nlevels.max = 2\n"
      "targets = 1, 2\n");
  c.write_files = false;
  const StudyResult r = run_study(c);
  CHECK(r.completed);
  REQUIRE(r.rows.size() == 6);
  CHECK(r.rows[4].cluster == std::vector<int>{1, 2, 3});
  CHECK(r.rows[5].cluster == std::vector<int>{4, 5, 6, 7, 8});
  for (const StudyRow& row : r.rows) {
    CHECK(row.mu > 0.0);
    CHECK(std::isfinite(row.consistency_mass));
  }
  // level errors decrease
  CHECK(r.rows[4].eigenvalue_error < r.rows[2].eigenvalue_error);
}

TEST_CASE("non-closed-form surfaces report eigenfunction errors as null") {
  StudyConfig c = parse_config_text(
      "name = t\nsurface = torus\ncell_kind = quad\nlift.k = 2\nfe.r = 2\nlevels.min = 0\nlevels.max = 2\n"
      "reference = extrapolated\nreference.r = 3\nreference.k = 3\nreference.levels.min = 0\n"
      "reference.levels.max = 2\n");
  c.write_files = false;
  const StudyResult r = run_study(c);
  REQUIRE(r.rows.size() == 3);
  for (const StudyRow& row : r.rows) {
    CHECK(std::isnan(row.l2_error));
    CHECK(row.status.find("eigenfunction_errors:no_closed_form") != std::string::npos);
  }
  const std::string csv = csv_of(r);
  CHECK(csv.find("null") != std::string::npos);
}

TEST_CASE("output files") {
  const auto dir = std::filesystem::temp_directory_path() / "lbs_test_outputs";
  std::filesystem::remove_all(dir);
  StudyConfig c = parse_config_text(kSmallCircle);
  c.output_dir = dir.string();
  c.level_max = 2;
  write_outputs(run_study(c));
  for (const char* f : {"small.csv", "small.json", "small_eigenvalue_t1.dat", "small_l2_t1.dat",
                        "small_energy_t1.dat", "small_constants.dat"})
    CHECK(std::filesystem::exists(dir / f));
  std::filesystem::remove_all(dir);
}

TEST_CASE("CLI exit codes") {
  CHECK(run_cli("presets --list") == 0);
  CHECK(run_cli("presets --show sphere-eigfun-r1k2") == 0);
  CHECK(run_cli("quadcheck --rule gauss_lobatto --points 4") == 0);
  CHECK(run_cli("quadcheck --rule symmetric_triangle --points 7 --cell triangle") == 0);
  CHECK(run_cli("quadcheck --rule gauss_lobatto --points 3 --cell triangle") == 2);
  CHECK(run_cli("solve --surface sphere --k 2 --r 2 --level 1 --num-eigs 12") == 0);
  CHECK(run_cli("solve --surface torus --k 2 --r 1 --level 0 --num-eigs 4") == 0);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("study") == 2);
  CHECK(run_cli("study --preset no-such-preset") == 2);
  CHECK(run_cli("study --config /nonexistent.cfg") == 2);

  const auto dir = std::filesystem::temp_directory_path() / "lbs_cli_test";
  std::filesystem::create_directories(dir);
  const auto cfg = dir / "bad.cfg";
  std::ofstream(cfg) << "surface = sphere\nlift.k = 0\n";
  CHECK(run_cli("study --config " + cfg.string()) == 2);
  const auto ok = dir / "ok.cfg";
  std::ofstream(ok) << "name = cli\nsurface = circle\ncell_kind = segment\nlift.k = 1\nfe.r = 1\nlevels.max = 2\n";
  CHECK(run_cli("study --config " + ok.string() + " --output-dir " + (dir / "out").string()) == 0);
  CHECK(std::filesystem::exists(dir / "out" / "cli.csv"));
  // a study whose clusters cannot be separated fails numerically
  const auto coarse = dir / "coarse.cfg";
  std::ofstream(coarse) << "name = coarse\nsurface = circle\ncell_kind = segment\ncircle.segments = 3\nlift.k = 1\n"
                           "fe.r = 1\nlevels.min = 0\nlevels.max = 0\ntargets = 2\n";
  CHECK(run_cli("study --config " + coarse.string() + " --output-dir " + (dir / "out").string()) == 3);
  std::filesystem::remove_all(dir);
}
