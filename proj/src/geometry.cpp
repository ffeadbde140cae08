#include "fplap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "fplap/errors.hpp"
#include "fplap/rng.hpp"
#include "fplap/summation.hpp"

namespace fplap {

namespace {

double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

Vec3 sub(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

Vec3 normalized(const Vec3& a) {
  const double s = 1.0 / norm(a);
  return {a[0] * s, a[1] * s, a[2] * s};
}

double arc_distance(const Vec3& a, const Vec3& b) {
  return std::acos(std::clamp(dot(a, b), -1.0, 1.0));
}

// Spherical triangle area on the unit sphere from side arcs, via l'Huilier;
// Girard's angle-sum formula loses all precision on the small triangles of a
// refined icosphere.
double spherical_area(double a, double b, double c) {
  const double s = 0.5 * (a + b + c);
  const double t = std::tan(0.5 * s) * std::tan(0.5 * (s - a)) *
                   std::tan(0.5 * (s - b)) * std::tan(0.5 * (s - c));
  return 4.0 * std::atan(std::sqrt(std::max(t, 0.0)));
}

double flat_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * norm(cross(sub(b, a), sub(c, a)));
}

}  // namespace

double ManifoldMesh::total_measure() const {
  NeumaierSum s;
  for (double m : mu) s.add(m);
  return s.value();
}

std::vector<double> ManifoldMesh::mean_edge_length() const {
  const std::size_t nv = n();
  std::vector<double> h(nv, 0.0);
  if (!tris.empty()) {
    std::vector<int> degree(nv, 0);
    std::map<std::pair<int, int>, bool> seen;
    for (const auto& t : tris) {
      const int e[3][2] = {{t[0], t[1]}, {t[1], t[2]}, {t[2], t[0]}};
      for (const auto& ed : e) {
        const auto key = std::minmax(ed[0], ed[1]);
        if (seen.emplace(key, true).second) {
          const double len = d(key.first, key.second);
          h[key.first] += len;
          h[key.second] += len;
          ++degree[key.first];
          ++degree[key.second];
        }
      }
    }
    for (std::size_t i = 0; i < nv; ++i)
      if (degree[i] > 0) h[i] /= degree[i];
    return h;
  }
  // No connectivity: nearest neighbor distance.
  for (std::size_t i = 0; i < nv; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < nv; ++j)
      if (j != i) best = std::min(best, d(i, j));
    h[i] = best;
  }
  return h;
}

ManifoldMesh build_sphere(int subdivision_level, int max_level) {
  if (subdivision_level < 0)
    throw std::invalid_argument("sphere subdivision level must be >= 0");
  if (subdivision_level > max_level)
    throw ResourceLimitError("sphere subdivision level " +
                             std::to_string(subdivision_level) +
                             " exceeds the cap of " + std::to_string(max_level) +
                             " (vertex count grows as 4^level)");

  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> verts = {
      {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
      {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
      {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : verts) v = normalized(v);
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (int level = 0; level < subdivision_level; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const Vec3 m = normalized({verts[a][0] + verts[b][0],
                                 verts[a][1] + verts[b][1],
                                 verts[a][2] + verts[b][2]});
      verts.push_back(m);
      const int idx = static_cast<int>(verts.size()) - 1;
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      const int ab = mid(f[0], f[1]);
      const int bc = mid(f[1], f[2]);
      const int ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }

  ManifoldMesh mesh;
  mesh.coords = std::move(verts);
  mesh.tris = std::move(faces);
  mesh.dim = 2;
  mesh.source = "sphere level " + std::to_string(subdivision_level);
  const std::size_t nv = mesh.coords.size();
  mesh.dist.assign(nv * nv, 0.0);
  for (std::size_t i = 0; i < nv; ++i)
    for (std::size_t j = 0; j < nv; ++j)
      if (i != j) mesh.dist[i * nv + j] = arc_distance(mesh.coords[i], mesh.coords[j]);
  mesh.mu.assign(nv, 0.0);
  for (const auto& f : mesh.tris) {
    const double a = mesh.d(f[1], f[2]);
    const double b = mesh.d(f[0], f[2]);
    const double c = mesh.d(f[0], f[1]);
    const double area = spherical_area(a, b, c) / 3.0;
    mesh.mu[f[0]] += area;
    mesh.mu[f[1]] += area;
    mesh.mu[f[2]] += area;
  }
  return mesh;
}

ManifoldMesh build_flat_torus(int n_per_side) {
  if (n_per_side < 3)
    throw std::invalid_argument(
        "flat torus needs n_per_side >= 3 (wraparound would duplicate edges)");
  const int n = n_per_side;
  const std::size_t nv = static_cast<std::size_t>(n) * n;

  ManifoldMesh mesh;
  mesh.dim = 2;
  mesh.source = "torus " + std::to_string(n) + "x" + std::to_string(n);
  mesh.coords.resize(nv);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      mesh.coords[static_cast<std::size_t>(i) * n + j] = {
          static_cast<double>(i) / n, static_cast<double>(j) / n, 0.0};

  auto vid = [n](int i, int j) {
    return ((i % n + n) % n) * n + ((j % n + n) % n);
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      mesh.tris.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      mesh.tris.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }

  mesh.mu.assign(nv, 1.0 / (static_cast<double>(n) * n));

  // Flat metric: per-axis wrapped difference, i.e. the minimum over the nine
  // period shifts.
  auto wrap = [](double dx) {
    dx = std::fabs(dx);
    return std::min(dx, 1.0 - dx);
  };
  mesh.dist.assign(nv * nv, 0.0);
  for (std::size_t a = 0; a < nv; ++a)
    for (std::size_t b = 0; b < nv; ++b) {
      if (a == b) continue;
      const double dx = wrap(mesh.coords[a][0] - mesh.coords[b][0]);
      const double dy = wrap(mesh.coords[a][1] - mesh.coords[b][1]);
      mesh.dist[a * nv + b] = std::hypot(dx, dy);
    }
  return mesh;
}

namespace {

// All-pairs shortest paths over the edge graph (Dijkstra per source).
// Results are symmetrized with min() afterwards: path sums accumulate in
// opposite edge order from the two endpoints, which can differ by an ulp.
std::vector<double> graph_distances(
    std::size_t nv, const std::vector<std::vector<std::pair<int, double>>>& adj) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(nv * nv, inf);
  for (std::size_t src = 0; src < nv; ++src) {
    std::vector<double> dd(nv, inf);
    dd[src] = 0.0;
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    pq.emplace(0.0, static_cast<int>(src));
    while (!pq.empty()) {
      const auto [du, u] = pq.top();
      pq.pop();
      if (du > dd[u]) continue;
      for (const auto& [v, w] : adj[u]) {
        const double cand = du + w;
        if (cand < dd[v]) {
          dd[v] = cand;
          pq.emplace(cand, v);
        }
      }
    }
    for (std::size_t j = 0; j < nv; ++j) dist[src * nv + j] = dd[j];
  }
  for (std::size_t i = 0; i < nv; ++i)
    for (std::size_t j = i + 1; j < nv; ++j) {
      const double m = std::min(dist[i * nv + j], dist[j * nv + i]);
      dist[i * nv + j] = dist[j * nv + i] = m;
    }
  return dist;
}

}  // namespace

ManifoldMesh parse_mesh(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto next_data_line = [&](std::istringstream& fields) {
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
      fields.clear();
      fields.str(line);
      return true;
    }
    return false;
  };

  std::istringstream fields;
  if (!next_data_line(fields))
    throw ParseError(origin + ": empty mesh file");
  long nv = -1, nt = -1;
  if (!(fields >> nv >> nt) || nv <= 0 || nt <= 0)
    throw ParseError(origin + ": line " + std::to_string(lineno) +
                     ": expected 'nv nt' counts");

  ManifoldMesh mesh;
  mesh.dim = 2;
  mesh.source = origin;
  mesh.coords.resize(nv);
  for (long i = 0; i < nv; ++i) {
    if (!next_data_line(fields))
      throw ParseError(origin + ": unexpected end of file, expected " +
                       std::to_string(nv) + " vertex lines");
    if (!(fields >> mesh.coords[i][0] >> mesh.coords[i][1] >> mesh.coords[i][2]))
      throw ParseError(origin + ": line " + std::to_string(lineno) +
                       ": expected 3 vertex coordinates");
  }
  mesh.tris.resize(nt);
  for (long t = 0; t < nt; ++t) {
    if (!next_data_line(fields))
      throw ParseError(origin + ": unexpected end of file, expected " +
                       std::to_string(nt) + " triangle lines");
    auto& tri = mesh.tris[t];
    if (!(fields >> tri[0] >> tri[1] >> tri[2]))
      throw ParseError(origin + ": line " + std::to_string(lineno) +
                       ": expected 3 vertex indices");
    for (int k = 0; k < 3; ++k)
      if (tri[k] < 0 || tri[k] >= nv)
        throw ParseError(origin + ": line " + std::to_string(lineno) +
                         ": vertex index " + std::to_string(tri[k]) +
                         " out of range [0," + std::to_string(nv) + ")");
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
      throw ValidationError(origin + ": line " + std::to_string(lineno) +
                            ": degenerate triangle with repeated vertex");
  }

  // Closed-surface check: compactness without boundary requires every edge in
  // exactly two triangles.
  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& tri : mesh.tris) {
    edge_count[std::minmax(tri[0], tri[1])]++;
    edge_count[std::minmax(tri[1], tri[2])]++;
    edge_count[std::minmax(tri[0], tri[2])]++;
  }
  for (const auto& [edge, count] : edge_count) {
    if (count != 2)
      throw ValidationError(
          origin + ": edge (" + std::to_string(edge.first) + "," +
          std::to_string(edge.second) + ") used by " + std::to_string(count) +
          " triangle(s); a closed surface requires exactly 2");
  }

  std::vector<std::vector<std::pair<int, double>>> adj(nv);
  for (const auto& [edge, count] : edge_count) {
    (void)count;
    const double len = norm(sub(mesh.coords[edge.first], mesh.coords[edge.second]));
    if (!(len > 0.0))
      throw ValidationError(origin + ": edge (" + std::to_string(edge.first) +
                            "," + std::to_string(edge.second) +
                            ") has zero length (coincident vertices)");
    adj[edge.first].emplace_back(edge.second, len);
    adj[edge.second].emplace_back(edge.first, len);
  }

  mesh.dist = graph_distances(nv, adj);
  for (long i = 0; i < nv; ++i)
    for (long j = 0; j < nv; ++j)
      if (i != j && !std::isfinite(mesh.dist[i * nv + j]))
        throw ValidationError(origin +
                              ": mesh is disconnected; geodesic distances are "
                              "undefined between components");

  mesh.mu.assign(nv, 0.0);
  for (const auto& tri : mesh.tris) {
    const double area =
        flat_area(mesh.coords[tri[0]], mesh.coords[tri[1]], mesh.coords[tri[2]]) / 3.0;
    mesh.mu[tri[0]] += area;
    mesh.mu[tri[1]] += area;
    mesh.mu[tri[2]] += area;
  }
  for (long i = 0; i < nv; ++i)
    if (!(mesh.mu[i] > 0.0))
      throw ValidationError(origin + ": vertex " + std::to_string(i) +
                            " has nonpositive measure (degenerate incident "
                            "triangles)");
  return mesh;
}

ManifoldMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open mesh file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_mesh(buf.str(), path);
}

void save_mesh(const ManifoldMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "# fplap mesh: " << mesh.source << "\n";
  out << mesh.n() << " " << mesh.tris.size() << "\n";
  out.precision(17);
  for (const auto& v : mesh.coords)
    out << v[0] << " " << v[1] << " " << v[2] << "\n";
  for (const auto& t : mesh.tris)
    out << t[0] << " " << t[1] << " " << t[2] << "\n";
  if (!out) throw std::runtime_error(path + ": write failed");
}

namespace {

DirichletDomain make_domain(const ManifoldMesh& mesh,
                            std::vector<std::uint8_t> inside) {
  DirichletDomain dom;
  dom.inside = std::move(inside);
  for (std::size_t i = 0; i < mesh.n(); ++i) {
    if (dom.inside[i])
      dom.interior.push_back(static_cast<int>(i));
    else
      dom.exterior.push_back(static_cast<int>(i));
  }
  if (dom.interior.empty())
    throw ValidationError("domain selection has an empty interior");
  if (dom.exterior.empty())
    throw ValidationError(
        "domain selection has an empty exterior; the Dirichlet condition "
        "u=0 on M\\Omega needs exterior vertices");
  return dom;
}

}  // namespace

DirichletDomain select_domain(const ManifoldMesh& mesh, const CapSpec& cap) {
  if (cap.center < 0 || static_cast<std::size_t>(cap.center) >= mesh.n())
    throw std::invalid_argument("cap center vertex " +
                                std::to_string(cap.center) + " out of range");
  std::vector<std::uint8_t> inside(mesh.n(), 0);
  for (std::size_t i = 0; i < mesh.n(); ++i)
    inside[i] = mesh.d(i, cap.center) < cap.radius ? 1 : 0;
  return make_domain(mesh, std::move(inside));
}

DirichletDomain select_domain(const ManifoldMesh& mesh,
                              const std::vector<int>& interior) {
  std::vector<std::uint8_t> inside(mesh.n(), 0);
  for (int i : interior) {
    if (i < 0 || static_cast<std::size_t>(i) >= mesh.n())
      throw std::invalid_argument("interior vertex index " + std::to_string(i) +
                                  " out of range");
    inside[i] = 1;
  }
  return make_domain(mesh, std::move(inside));
}

MeshValidation validate_mesh(const ManifoldMesh& mesh, int n_triples,
                             std::uint64_t seed, double tol) {
  MeshValidation rep;
  const std::size_t n = mesh.n();
  rep.min_offdiag = std::numeric_limits<double>::infinity();
  rep.min_measure = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    rep.min_measure = std::min(rep.min_measure, mesh.mu[i]);
    if (mesh.mu[i] <= 0.0) ++rep.nonpositive_measures;
    if (mesh.dist[i * n + i] != 0.0) ++rep.zero_diagonal_defects;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      rep.symmetry_defect = std::max(
          rep.symmetry_defect, std::fabs(mesh.dist[i * n + j] - mesh.dist[j * n + i]));
      rep.min_offdiag = std::min(rep.min_offdiag, mesh.dist[i * n + j]);
    }
  }

  // Triangle inequality over sampled triples; 1e-12 absorbs the rounding of
  // arccos/path sums so analytic builders pass at tol=0.
  const double slack = tol + 1e-12;
  rep.worst_triangle_margin = -std::numeric_limits<double>::infinity();
  auto check_triple = [&](std::size_t i, std::size_t j, std::size_t k) {
    const double margin = mesh.d(i, k) - mesh.d(i, j) - mesh.d(j, k);
    rep.worst_triangle_margin = std::max(rep.worst_triangle_margin, margin);
    if (margin > slack) ++rep.triangle_violations;
    ++rep.triples_checked;
  };
  const long total_triples = static_cast<long>(n) * (n - 1) * (n - 2);
  if (n >= 3 && total_triples <= n_triples) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
          if (i != j && j != k && i != k) check_triple(i, j, k);
  } else if (n >= 3) {
    Rng rng(seed);
    for (int s = 0; s < n_triples; ++s) {
      std::size_t i = rng.index(n), j = rng.index(n), k = rng.index(n);
      if (i == j || j == k || i == k) continue;
      check_triple(i, j, k);
    }
  }
  rep.pass = rep.symmetry_defect == 0.0 && rep.min_offdiag > 0.0 &&
             rep.nonpositive_measures == 0 && rep.zero_diagonal_defects == 0 &&
             rep.triangle_violations == 0;
  return rep;
}

}
