#include "lbs/presets.hpp"

#include "lbs/error.hpp"

namespace lbs {

const std::vector<Preset>& presets() {
  static const std::vector<Preset> table = {
      {"circle-superconv-k2-gl", "circle, Gauss-Lobatto lift k=2, r=3, n=16..256: eigenvalue rate 2k",
       R"(name = circle-superconv-k2-gl
surface = circle
cell_kind = segment
lift.k = 2
lift.points = gauss_lobatto
fe.r = 3
levels.min = 2
levels.max = 6
targets = 1
expect.eigenvalue = 4
)"},
      {"circle-superconv-k3-gl", "circle, Gauss-Lobatto lift k=3, r=4, n=16..256: eigenvalue rate 2k",
       R"(name = circle-superconv-k3-gl
surface = circle
cell_kind = segment
lift.k = 3
lift.points = gauss_lobatto
fe.r = 4
levels.min = 2
levels.max = 6
targets = 1
expect.eigenvalue = 6
)"},
      {"circle-superconv-k1-gl", "circle, k=1, r=2: eigenvalue rate 2",
       R"(name = circle-superconv-k1-gl
surface = circle
cell_kind = segment
lift.k = 1
lift.points = gauss_lobatto
fe.r = 2
levels.min = 2
levels.max = 6
targets = 1
expect.eigenvalue = 2
)"},
      {"circle-equispaced-k2", "circle, equispaced lift k=2, r=3: Simpson rule rate k+2",
       R"(name = circle-equispaced-k2
surface = circle
cell_kind = segment
lift.k = 2
lift.points = equispaced
fe.r = 3
levels.min = 2
levels.max = 6
targets = 1
expect.eigenvalue = 4
)"},
      {"circle-equispaced-k3", "circle, equispaced lift k=3, r=4: Newton-Cotes rate k+1",
       R"(name = circle-equispaced-k3
surface = circle
cell_kind = segment
lift.k = 3
lift.points = equispaced
fe.r = 4
levels.min = 2
levels.max = 6
targets = 1
expect.eigenvalue = 4
)"},
      {"sphere-eigfun-r1k2", "sphere quads, lambda=2, r=1, k=2: L2 rate 2, energy rate 1 (Galerkin dominated)",
       R"(name = sphere-eigfun-r1k2
surface = sphere
cell_kind = quad
lift.k = 2
lift.points = gauss_lobatto
fe.r = 1
levels.min = 1
levels.max = 4
targets = 1
expect.l2 = 2
expect.energy = 1
)"},
      {"sphere-eigfun-r3k1", "sphere quads, lambda=2, r=3, k=1: L2 and energy rate 2 (geometry dominated)",
       R"(name = sphere-eigfun-r3k1
surface = sphere
cell_kind = quad
lift.k = 1
lift.points = gauss_lobatto
fe.r = 3
levels.min = 2
levels.max = 5
targets = 1
errors.consistency = false
expect.eigenvalue = 2
expect.l2 = 2
expect.energy = 2
)"},
      {"sphere-constants-k1r3", "sphere quads, k=1, r=3, l=1..6: eigenvalue and energy constants versus lambda",
       R"(name = sphere-constants-k1r3
surface = sphere
cell_kind = quad
lift.k = 1
lift.points = gauss_lobatto
fe.r = 3
levels.min = 2
levels.max = 4
targets = 1..6
errors.consistency = false
)"},
      {"heart-quad-gl-k2", "perturbed heart surface, quads, Gauss-Lobatto k=2, r=2: rate 2k against a Richardson reference",
       R"(name = heart-quad-gl-k2
surface = heart_perturbed
cell_kind = quad
lift.k = 2
lift.points = gauss_lobatto
fe.r = 2
levels.min = 5
levels.max = 7
targets = 1
reference = extrapolated
reference.r = 3
reference.k = 4
reference.levels.min = 5
reference.levels.max = 7
errors.consistency = false
expect.eigenvalue = 4
expect.window = 0.3
)"},
      {"heart-tri-equispaced-k2", "heart surface, triangles, equispaced k=2, r=3: observed rate k+2",
       R"(name = heart-tri-equispaced-k2
surface = heart
cell_kind = triangle
lift.k = 2
lift.points = equispaced
fe.r = 3
levels.min = 3
levels.max = 5
targets = 1
reference = extrapolated
reference.r = 3
reference.k = 4
reference.levels.min = 4
reference.levels.max = 6
errors.consistency = false
expect.eigenvalue = 4
expect.window = 0.3
)"},
      {"heart-tri-equispaced-k3", "heart surface, triangles, equispaced k=3, r=4: observed rate k+1",
       R"(name = heart-tri-equispaced-k3
surface = heart
cell_kind = triangle
lift.k = 3
lift.points = equispaced
fe.r = 4
levels.min = 3
levels.max = 5
targets = 1
reference = extrapolated
reference.r = 3
reference.k = 4
reference.levels.min = 4
reference.levels.max = 6
errors.consistency = false
expect.eigenvalue = 4
expect.window = 0.3
)"},
      {"sphere-unperturbed-tri", "sphere triangles, equispaced k=2, r=3, no perturbation",
       R"(name = sphere-unperturbed-tri
surface = sphere
cell_kind = triangle
lift.k = 2
lift.points = equispaced
fe.r = 3
levels.min = 1
levels.max = 4
targets = 1
errors.eigenfunctions = false
errors.consistency = false
expect.eigenvalue = 4
expect.window = 0.3
)"},
      {"sphere-perturbed-unbiased", "sphere triangles, k=2, r=3, normal perturbation h^{k+1} U(-1,1)",
       R"(name = sphere-perturbed-unbiased
surface = sphere
cell_kind = triangle
lift.k = 2
lift.points = perturbed
lift.perturb.center = 0
lift.perturb.width = 1
lift.perturb.seed = 20140611
fe.r = 3
levels.min = 3
levels.max = 6
targets = 1
errors.eigenfunctions = false
errors.consistency = false
expect.eigenvalue = 4
expect.window = 0.3
)"},
      {"sphere-perturbed-biased", "sphere triangles, k=2, r=3, normal perturbation h^{k+1} U(-0.5,1.5)",
       R"(name = sphere-perturbed-biased
surface = sphere
cell_kind = triangle
lift.k = 2
lift.points = perturbed
lift.perturb.center = 0.5
lift.perturb.width = 1
lift.perturb.seed = 20140611
fe.r = 3
levels.min = 3
levels.max = 6
targets = 1
errors.eigenfunctions = false
errors.consistency = false
expect.eigenvalue = 3
expect.window = 0.3
)"},
  };
  return table;
}

const Preset& find_preset(const std::string& name) {
  for (const Preset& p : presets())
    if (p.name == name) return p;
  throw Error(ErrorKind::ConfigError, "unknown preset '" + name + "'");
}

StudyConfig preset_config(const std::string& name) { return parse_config_text(find_preset(name).config); }

}  // namespace lbs
