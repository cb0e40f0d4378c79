#include "lbs/base_mesh.hpp"

#include "lbs/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <set>

namespace lbs {

std::string_view to_string(CellKind kind) {
  switch (kind) {
    case CellKind::Segment: return "segment";
    case CellKind::Triangle: return "triangle";
    case CellKind::Quad: return "quad";
  }
  return "unknown";
}

int vertices_per_cell(CellKind kind) {
  switch (kind) {
    case CellKind::Segment: return 2;
    case CellKind::Triangle: return 3;
    case CellKind::Quad: return 4;
  }
  return 0;
}

int reference_dim(CellKind kind) { return kind == CellKind::Segment ? 1 : 2; }

std::vector<std::array<int, 2>> local_edges(CellKind kind) {
  switch (kind) {
    case CellKind::Segment: return {{0, 1}};
    case CellKind::Triangle: return {{0, 1}, {1, 2}, {2, 0}};
    case CellKind::Quad: return {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  }
  return {};
}

namespace {

Vec3 snap(const SurfaceDescription& surface, const Vec3& x) {
  try {
    return closest_point(surface, x);
  } catch (const Error& e) {
    throw Error(ErrorKind::ProjectionFailure, e.what());
  }
}

// Orient each cell of a star-shaped (about the origin) mesh outward.
void orient_outward(BaseMesh& mesh) {
  for (auto& c : mesh.cells) {
    const Vec3& a = mesh.vertices[c[0]];
    const Vec3& b = mesh.vertices[c[1]];
    const Vec3& d = mesh.vertices[c[2]];
    const Vec3 centroid = (a + b + d) / 3.0;
    if ((b - a).cross(d - a).dot(centroid) < 0) {
      if (mesh.cell_kind == CellKind::Triangle) {
        std::swap(c[1], c[2]);
      } else {
        std::swap(c[1], c[3]);
      }
    }
  }
}

BaseMesh polygon(const SurfaceDescription& surface, int n) {
  BaseMesh m;
  m.cell_kind = CellKind::Segment;
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * std::numbers::pi * i / n;
    m.vertices.emplace_back(surface.radius() * std::cos(t), surface.radius() * std::sin(t), 0.0);
    m.cells.push_back({i, (i + 1) % n, -1, -1});
  }
  return m;
}

BaseMesh icosahedron() {
  const double p = (1.0 + std::sqrt(5.0)) / 2.0;
  BaseMesh m;
  m.cell_kind = CellKind::Triangle;
  m.vertices = {{-1, p, 0}, {1, p, 0}, {-1, -p, 0}, {1, -p, 0},
                {0, -1, p}, {0, 1, p}, {0, -1, -p}, {0, 1, -p},
                {p, 0, -1}, {p, 0, 1}, {-p, 0, -1}, {-p, 0, 1}};
  for (auto& v : m.vertices) v.normalize();
  const int f[20][3] = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (const auto& t : f) m.cells.push_back({t[0], t[1], t[2], -1});
  orient_outward(m);
  return m;
}

BaseMesh cube() {
  BaseMesh m;
  m.cell_kind = CellKind::Quad;
  const double s = 1.0 / std::sqrt(3.0);
  for (int i = 0; i < 8; ++i)
    m.vertices.emplace_back((i & 1 ? s : -s), (i & 2 ? s : -s), (i & 4 ? s : -s));
  m.cells = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4},
             {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
  orient_outward(m);
  return m;
}

BaseMesh torus_grid(const SurfaceDescription& s, CellKind kind, int nu, int nv) {
  BaseMesh m;
  m.cell_kind = kind;
  const double R = s.major_radius(), r = s.minor_radius();
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      const double phi = 2.0 * std::numbers::pi * i / nu;
      const double th = 2.0 * std::numbers::pi * j / nv;
      m.vertices.emplace_back((R + r * std::cos(th)) * std::cos(phi),
                              (R + r * std::cos(th)) * std::sin(phi), r * std::sin(th));
    }
  }
  auto id = [&](int i, int j) { return ((i + nu) % nu) * nv + (j + nv) % nv; };
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if (kind == CellKind::Quad) {
        m.cells.push_back({a, b, c, d});
      } else {
        m.cells.push_back({a, b, c, -1});
        m.cells.push_back({a, c, d, -1});
      }
    }
  }
  return m;
}

// Moves each vertex along its ray from the origin onto the zero level set.
void project_radially(const SurfaceDescription& s, BaseMesh& m) {
  const auto& f = s.level_set();
  for (auto& v : m.vertices) {
    const Vec3 u = v.normalized();
    double lo = 0.0, hi = 0.5;
    if (f.value(Vec3::Zero()) >= 0)
      throw Error(ErrorKind::UnsupportedCombination, "implicit surface must enclose the origin");
    int guard = 0;
    while (f.value(hi * u) < 0) {
      lo = hi;
      hi *= 2.0;
      if (++guard > 60) throw Error(ErrorKind::ProjectionFailure, "ray never leaves the surface");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (f.value(mid * u) < 0 ? lo : hi) = mid;
    }
    v = snap(s, 0.5 * (lo + hi) * u);
  }
}

}  // namespace

BaseMesh make_base(const SurfaceDescription& surface, const BaseMeshOptions& options) {
  if (options.level < 0) throw Error(ErrorKind::InvalidArgument, "mesh level must be >= 0");
  const CellKind kind = options.cell_kind;
  const bool planar = surface.ambient_dim() == 2;
  if (planar != (kind == CellKind::Segment)) {
    throw Error(ErrorKind::UnsupportedCombination,
                std::string(to_string(kind)) + " cells on " + surface.name());
  }

  BaseMesh m;
  switch (surface.kind()) {
    case SurfaceKind::Circle:
      if (options.circle_segments < 3)
        throw Error(ErrorKind::InvalidArgument, "polygon needs at least 3 edges");
      return polygon(surface, options.circle_segments << options.level);
    case SurfaceKind::Sphere:
      m = kind == CellKind::Triangle ? icosahedron() : cube();
      for (auto& v : m.vertices) v *= surface.radius();
      for (int l = 0; l < options.level; ++l) m = refine_uniform(surface, m);
      return m;
    case SurfaceKind::Torus:
      return torus_grid(surface, kind, options.torus_major_cells << options.level,
                        options.torus_minor_cells << options.level);
    case SurfaceKind::Implicit: {
      const SurfaceDescription unit = SurfaceDescription::sphere(1.0);
      m = kind == CellKind::Triangle ? icosahedron() : cube();
      for (int l = 0; l < options.level; ++l) m = refine_uniform(unit, m);
      project_radially(surface, m);
      return m;
    }
  }
  return m;
}

BaseMesh refine_uniform(const SurfaceDescription& surface, const BaseMesh& mesh) {
  BaseMesh out;
  out.cell_kind = mesh.cell_kind;
  out.vertices = mesh.vertices;
  std::map<FacetKey, int> edge_mid;
  auto midpoint = [&](int a, int b) {
    const FacetKey key{std::min(a, b), std::max(a, b)};
    auto it = edge_mid.find(key);
    if (it != edge_mid.end()) return it->second;
    const int id = static_cast<int>(out.vertices.size());
    out.vertices.push_back(snap(surface, 0.5 * (mesh.vertices[a] + mesh.vertices[b])));
    edge_mid.emplace(key, id);
    return id;
  };

  for (const auto& c : mesh.cells) {
    switch (mesh.cell_kind) {
      case CellKind::Segment: {
        const int m = midpoint(c[0], c[1]);
        out.cells.push_back({c[0], m, -1, -1});
        out.cells.push_back({m, c[1], -1, -1});
        break;
      }
      case CellKind::Triangle: {
        const int m01 = midpoint(c[0], c[1]);
        const int m12 = midpoint(c[1], c[2]);
        const int m20 = midpoint(c[2], c[0]);
        out.cells.push_back({c[0], m01, m20, -1});
        out.cells.push_back({m01, c[1], m12, -1});
        out.cells.push_back({m20, m12, c[2], -1});
        out.cells.push_back({m01, m12, m20, -1});
        break;
      }
      case CellKind::Quad: {
        const int m01 = midpoint(c[0], c[1]);
        const int m12 = midpoint(c[1], c[2]);
        const int m23 = midpoint(c[2], c[3]);
        const int m30 = midpoint(c[3], c[0]);
        const int ctr = static_cast<int>(out.vertices.size());
        out.vertices.push_back(snap(surface, 0.25 * (mesh.vertices[c[0]] + mesh.vertices[c[1]] +
                                                     mesh.vertices[c[2]] + mesh.vertices[c[3]])));
        out.cells.push_back({c[0], m01, ctr, m30});
        out.cells.push_back({m01, c[1], m12, ctr});
        out.cells.push_back({ctr, m12, c[2], m23});
        out.cells.push_back({m30, ctr, m23, c[3]});
        break;
      }
    }
  }
  return out;
}

MeshMetrics metrics(const BaseMesh& mesh) {
  MeshMetrics mm;
  mm.h = 0.0;
  mm.h_min = std::numeric_limits<double>::infinity();
  mm.rho = 1.0;
  const int nv = mesh.vertices_in_cell();
  for (const auto& c : mesh.cells) {
    double diam = 0.0;
    for (int a = 0; a < nv; ++a)
      for (int b = a + 1; b < nv; ++b)
        diam = std::max(diam, (mesh.vertices[c[a]] - mesh.vertices[c[b]]).norm());
    mm.h = std::max(mm.h, diam);
    mm.h_min = std::min(mm.h_min, diam);

    // Singular values of the affine (or bilinear, sampled at the corners)
    // map from the reference cell.
    auto ratio = [](const Eigen::Matrix<double, 3, 2>& j) {
      Eigen::JacobiSVD<Eigen::Matrix<double, 3, 2>> svd(j);
      const auto s = svd.singularValues();
      return s(1) / s(0);
    };
    const auto& v = mesh.vertices;
    if (mesh.cell_kind == CellKind::Triangle) {
      Eigen::Matrix<double, 3, 2> j;
      j << v[c[1]] - v[c[0]], v[c[2]] - v[c[0]];
      mm.rho = std::min(mm.rho, ratio(j));
    } else if (mesh.cell_kind == CellKind::Quad) {
      for (int corner = 0; corner < 4; ++corner) {
        const int prev = (corner + 3) % 4, next = (corner + 1) % 4;
        Eigen::Matrix<double, 3, 2> j;
        j << v[c[next]] - v[c[corner]], v[c[prev]] - v[c[corner]];
        mm.rho = std::min(mm.rho, ratio(j));
      }
    }
  }
  mm.eta = mm.h / mm.h_min;
  return mm;
}

std::map<FacetKey, std::vector<int>> facet_incidence(const BaseMesh& mesh) {
  std::map<FacetKey, std::vector<int>> inc;
  for (std::size_t ci = 0; ci < mesh.cells.size(); ++ci) {
    const auto& c = mesh.cells[ci];
    if (mesh.cell_kind == CellKind::Segment) {
      inc[{c[0], c[0]}].push_back(static_cast<int>(ci));
      inc[{c[1], c[1]}].push_back(static_cast<int>(ci));
      continue;
    }
    for (const auto& e : local_edges(mesh.cell_kind)) {
      const int a = c[e[0]], b = c[e[1]];
      inc[{std::min(a, b), std::max(a, b)}].push_back(static_cast<int>(ci));
    }
  }
  return inc;
}

bool is_watertight_and_oriented(const BaseMesh& mesh) {
  if (mesh.cell_kind == CellKind::Segment) {
    std::map<int, int> starts, ends;
    for (const auto& c : mesh.cells) {
      ++starts[c[0]];
      ++ends[c[1]];
    }
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v)
      if (starts[static_cast<int>(v)] != 1 || ends[static_cast<int>(v)] != 1) return false;
    return true;
  }
  std::map<FacetKey, int> directed;
  for (const auto& c : mesh.cells)
    for (const auto& e : local_edges(mesh.cell_kind)) ++directed[{c[e[0]], c[e[1]]}];
  for (const auto& [edge, count] : directed) {
    if (count != 1) return false;
    auto rev = directed.find({edge.second, edge.first});
    if (rev == directed.end() || rev->second != 1) return false;
  }
  return true;
}

int euler_characteristic(const BaseMesh& mesh) {
  const auto inc = facet_incidence(mesh);
  const int v = static_cast<int>(mesh.vertices.size());
  const int c = static_cast<int>(mesh.cells.size());
  if (mesh.cell_kind == CellKind::Segment) return v - c;
  return v - static_cast<int>(inc.size()) + c;
}

void write_off(std::ostream& os, const BaseMesh& mesh) {
  os << "OFF\n" << mesh.vertices.size() << ' ' << mesh.cells.size() << " 0\n";
  os.precision(17);
  for (const auto& v : mesh.vertices) os << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  const int nv = mesh.vertices_in_cell();
  for (const auto& c : mesh.cells) {
    os << nv;
    for (int i = 0; i < nv; ++i) os << ' ' << c[i];
    os << '\n';
  }
}

}  // namespace lbs
