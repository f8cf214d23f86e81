#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gktab {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }

/// Planar triangle surface mesh; the benchmark's geometry carrier.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;

  std::size_t triangle_count() const { return triangles.size(); }

  double triangle_area(std::size_t i) const {
    const auto& tri = triangles[i];
    const Vec3 e1 = vertices[tri[1]] - vertices[tri[0]];
    const Vec3 e2 = vertices[tri[2]] - vertices[tri[0]];
    return 0.5 * norm(cross(e1, e2));
  }

  void validate() const {
    for (std::size_t i = 0; i < triangles.size(); ++i) {
      for (std::uint32_t v : triangles[i])
        if (v >= vertices.size())
          throw std::invalid_argument("TriangleMesh: triangle " + std::to_string(i) +
                                      " references vertex " + std::to_string(v) +
                                      " out of range");
      if (!(triangle_area(i) > 1e-12))
        throw std::invalid_argument("TriangleMesh: triangle " + std::to_string(i) +
                                    " is degenerate (area <= 1e-12)");
    }
  }
};

/// Largest pairwise vertex distance. Quadrature points are convex
/// combinations of vertices, so this also bounds every point-pair distance.
inline double max_vertex_distance(const TriangleMesh& mesh) {
  double best = 0.0;
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
    for (std::size_t j = i + 1; j < mesh.vertices.size(); ++j)
      best = std::max(best, distance(mesh.vertices[i], mesh.vertices[j]));
  return best;
}

namespace detail {

inline std::string next_content_line(std::istream& in, std::size_t& line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos) continue;
    if (line[pos] == '#') continue;
    return line;
  }
  return {};
}

}  // namespace detail

/// Reads an OFF file: "OFF" header, "V F E" counts, V vertex lines, F face
/// lines of the form "3 a b c". Triangles only.
inline TriangleMesh load_off(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_off: cannot open '" + path + "'");
  std::size_t line_no = 0;

  std::string header = detail::next_content_line(in, line_no);
  {
    std::istringstream hs(header);
    std::string tag;
    hs >> tag;
    if (tag != "OFF")
      throw std::runtime_error("load_off: " + path + ":" + std::to_string(line_no) +
                               ": missing OFF header");
  }

  std::size_t n_vertices = 0, n_faces = 0, n_edges = 0;
  {
    std::istringstream cs(detail::next_content_line(in, line_no));
    if (!(cs >> n_vertices >> n_faces >> n_edges))
      throw std::runtime_error("load_off: " + path + ":" + std::to_string(line_no) +
                               ": malformed counts line");
  }

  TriangleMesh mesh;
  mesh.vertices.reserve(n_vertices);
  for (std::size_t i = 0; i < n_vertices; ++i) {
    std::istringstream vs(detail::next_content_line(in, line_no));
    Vec3 v;
    if (!(vs >> v.x >> v.y >> v.z))
      throw std::runtime_error("load_off: " + path + ":" + std::to_string(line_no) +
                               ": malformed vertex line");
    mesh.vertices.push_back(v);
  }
  mesh.triangles.reserve(n_faces);
  for (std::size_t i = 0; i < n_faces; ++i) {
    std::istringstream fs(detail::next_content_line(in, line_no));
    std::size_t arity = 0;
    if (!(fs >> arity))
      throw std::runtime_error("load_off: " + path + ":" + std::to_string(line_no) +
                               ": malformed face line");
    if (arity != 3)
      throw std::runtime_error("load_off: " + path + ":" + std::to_string(line_no) +
                               ": unsupported polygon with " + std::to_string(arity) +
                               " vertices (triangles only)");
    std::array<std::uint32_t, 3> tri{};
    if (!(fs >> tri[0] >> tri[1] >> tri[2]))
      throw std::runtime_error("load_off: " + path + ":" + std::to_string(line_no) +
                               ": malformed face line");
    mesh.triangles.push_back(tri);
  }
  mesh.validate();
  return mesh;
}

inline void save_off(const TriangleMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_off: cannot open '" + path + "'");
  out << "OFF\n" << mesh.vertices.size() << ' ' << mesh.triangles.size() << " 0\n";
  out.precision(17);
  for (const auto& v : mesh.vertices) out << v.x << ' ' << v.y << ' ' << v.z << '\n';
  for (const auto& t : mesh.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  if (!out) throw std::runtime_error("save_off: write failed for '" + path + "'");
}

/// Icosphere: regular icosahedron subdivided `subdivisions` times, midpoints
/// projected onto the sphere. Triangle count is 20 * 4^subdivisions.
inline TriangleMesh generate_sphere_mesh(double radius, int subdivisions) {
  if (!(radius > 0.0)) throw std::invalid_argument("generate_sphere_mesh: radius must be > 0");
  if (subdivisions < 0 || subdivisions > 6)
    throw std::invalid_argument("generate_sphere_mesh: subdivisions must be in [0, 6]");

  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  TriangleMesh mesh;
  mesh.vertices = {
      {-1, phi, 0}, {1, phi, 0},   {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi},   {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1},   {-phi, 0, -1}, {-phi, 0, 1},
  };
  mesh.triangles = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
  };

  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoint;
    auto mid = [&](std::uint32_t a, std::uint32_t b) {
      const auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
      const auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const Vec3 m = (mesh.vertices[a] + mesh.vertices[b]) * 0.5;
      mesh.vertices.push_back(m);
      const auto idx = static_cast<std::uint32_t>(mesh.vertices.size() - 1);
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<std::uint32_t, 3>> next;
    next.reserve(mesh.triangles.size() * 4);
    for (const auto& t : mesh.triangles) {
      const std::uint32_t ab = mid(t[0], t[1]);
      const std::uint32_t bc = mid(t[1], t[2]);
      const std::uint32_t ca = mid(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    mesh.triangles = std::move(next);
  }

  for (auto& v : mesh.vertices) v = v * (radius / norm(v));
  mesh.validate();
  return mesh;
}

}  // namespace gktab
