#include "cflow/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace cflow {
namespace {

Mesh::Edge sorted(int a, int b) { return a < b ? Mesh::Edge{a, b} : Mesh::Edge{b, a}; }

double signed_area(Point a, Point b, Point c) { return 0.5 * cross(b - a, c - a); }

// Concentric-ring triangulation of the unit disc pushed onto a star-shaped
// domain: the vertex at relative radius rho and angle theta maps to
// rho * boundary_point(theta). Ring j holds 6j vertices.
MeshPtr ring_mesh(const DomainSpec& spec, int rings) {
  constexpr double kTwoPi = 2.0 * 3.14159265358979323846;
  std::vector<Point> vertices;
  std::vector<int> ring_start(rings + 1);
  vertices.push_back(spec.boundary_point(0.0) - spec.boundary_point(0.0));  // origin
  ring_start[0] = 0;
  for (int j = 1; j <= rings; ++j) {
    ring_start[j] = static_cast<int>(vertices.size());
    const int count = 6 * j;
    const double rho = static_cast<double>(j) / rings;
    for (int k = 0; k < count; ++k) {
      const double theta = kTwoPi * k / count;
      const Point b = spec.boundary_point(theta);
      vertices.push_back(j == rings ? b : rho * b);
    }
  }

  std::vector<Mesh::Triangle> triangles;
  triangles.reserve(6 * static_cast<std::size_t>(rings) * rings);
  for (int k = 0; k < 6; ++k) triangles.push_back({0, ring_start[1] + k, ring_start[1] + (k + 1) % 6});
  for (int j = 2; j <= rings; ++j) {
    const int m = 6 * (j - 1);
    const int big_m = 6 * j;
    auto inner = [&](int a) { return ring_start[j - 1] + a % m; };
    auto outer = [&](int b) { return ring_start[j] + b % big_m; };
    int a = 0;
    int b = 0;
    while (a < m || b < big_m) {
      // Advance along whichever ring has the smaller next angle; ties go to
      // the outer ring. Integer comparison of (b+1)/M against (a+1)/m.
      const bool take_outer =
          a == m || (b < big_m && static_cast<long>(b + 1) * m <= static_cast<long>(a + 1) * big_m);
      if (take_outer) {
        triangles.push_back({inner(a), outer(b), outer(b + 1)});
        ++b;
      } else {
        triangles.push_back({inner(a), outer(b), inner(a + 1)});
        ++a;
      }
    }
  }

  const int count = 6 * rings;
  std::vector<int> boundary(count);
  std::vector<double> params(count);
  for (int k = 0; k < count; ++k) {
    boundary[k] = ring_start[rings] + k;
    params[k] = kTwoPi * k / count;
  }
  return std::make_shared<const Mesh>(spec, std::move(vertices), std::move(triangles), std::move(boundary),
                                      std::move(params));
}

MeshPtr grid_mesh(const DomainSpec& spec, const Rectangle& rect, double target_h) {
  const int nx = static_cast<int>(std::ceil(rect.a / target_h - 1e-9));
  const int ny = static_cast<int>(std::ceil(rect.b / target_h - 1e-9));
  const double dx = rect.a / nx;
  const double dy = rect.b / ny;
  const double c = std::cos(spec.rotation());
  const double s = std::sin(spec.rotation());
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };

  std::vector<Point> vertices;
  vertices.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      // Exact multiples on the far sides so boundary vertices sit on the curve.
      const double x = i == nx ? rect.a : i * dx;
      const double y = j == ny ? rect.b : j * dy;
      vertices.push_back({c * x - s * y, s * x + c * y});
    }
  }

  std::vector<Mesh::Triangle> triangles;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int p00 = id(i, j), p10 = id(i + 1, j), p11 = id(i + 1, j + 1), p01 = id(i, j + 1);
      // Flip the diagonal in the two corner cells where it would otherwise
      // leave a triangle with every vertex on the boundary.
      const bool flip = (i == nx - 1 && j == 0) || (i == 0 && j == ny - 1);
      if (!flip) {
        triangles.push_back({p00, p10, p11});
        triangles.push_back({p00, p11, p01});
      } else {
        triangles.push_back({p00, p10, p01});
        triangles.push_back({p10, p11, p01});
      }
    }
  }

  std::vector<int> boundary;
  std::vector<double> params;
  for (int i = 0; i < nx; ++i) {
    boundary.push_back(id(i, 0));
    params.push_back(i * dx);
  }
  for (int j = 0; j < ny; ++j) {
    boundary.push_back(id(nx, j));
    params.push_back(rect.a + j * dy);
  }
  for (int i = nx; i > 0; --i) {
    boundary.push_back(id(i, ny));
    params.push_back(rect.a + rect.b + (nx - i) * dx);
  }
  for (int j = ny; j > 0; --j) {
    boundary.push_back(id(0, j));
    params.push_back(2.0 * rect.a + rect.b + (ny - j) * dy);
  }
  return std::make_shared<const Mesh>(spec, std::move(vertices), std::move(triangles), std::move(boundary),
                                      std::move(params));
}

}  // namespace

Mesh::Mesh(DomainSpec domain, std::vector<Point> vertices, std::vector<Triangle> triangles,
           std::vector<int> boundary_loop, std::vector<double> boundary_param)
    : domain_(std::move(domain)),
      vertices_(std::move(vertices)),
      triangles_(std::move(triangles)),
      boundary_(std::move(boundary_loop)),
      boundary_param_(std::move(boundary_param)) {
  if (boundary_.size() != boundary_param_.size())
    throw std::invalid_argument("mesh: boundary loop and parameter list differ in length");
  build_topology();
  validate();
}

void Mesh::build_topology() {
  const int nv = vertex_count();
  vertex_edges_.assign(nv, {});
  triangle_edges_.resize(triangles_.size());
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (int i = 0; i < 3; ++i) {
      const int a = tri[(i + 1) % 3];
      const int b = tri[(i + 2) % 3];
      if (a < 0 || b < 0 || a >= nv || b >= nv) throw std::invalid_argument("mesh: vertex index out of range");
      int e = find_edge(a, b);
      if (e < 0) {
        e = static_cast<int>(edges_.size());
        edges_.push_back(sorted(a, b));
        edge_triangles_.push_back({static_cast<int>(t), -1});
        vertex_edges_[a].emplace_back(b, e);
        vertex_edges_[b].emplace_back(a, e);
      } else {
        if (edge_triangles_[e][1] >= 0)
          throw std::invalid_argument("mesh: edge shared by more than two triangles");
        edge_triangles_[e][1] = static_cast<int>(t);
      }
      triangle_edges_[t][i] = e;
    }
  }

  boundary_vertex_.assign(nv, false);
  for (int v : boundary_) {
    if (v < 0 || v >= nv) throw std::invalid_argument("mesh: boundary vertex out of range");
    boundary_vertex_[v] = true;
  }
  const std::size_t nb = boundary_.size();
  boundary_edges_.resize(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    const int e = find_edge(boundary_[i], boundary_[(i + 1) % nb]);
    if (e < 0) throw std::invalid_argument("mesh: boundary loop segment is not a mesh edge");
    boundary_edges_[i] = e;
  }

  h_ = 0.0;
  for (const auto& e : edges_) h_ = std::max(h_, norm(vertices_[e[1]] - vertices_[e[0]]));
}

void Mesh::validate() const {
  for (std::size_t t = 0; t < triangles_.size(); ++t)
    if (!(triangle_area(static_cast<int>(t)) > 0.0))
      throw std::invalid_argument("mesh: triangle " + std::to_string(t) + " is not positively oriented");

  // Conformity plus a single loop: the edges with one neighbour must be
  // exactly the loop segments, each traversed once.
  std::size_t open_edges = 0;
  for (std::size_t e = 0; e < edges_.size(); ++e)
    if (edge_triangles_[e][1] < 0) ++open_edges;
  if (open_edges != boundary_.size()) throw std::invalid_argument("mesh: boundary loop does not match open edges");
  std::vector<int> seen(edges_.size(), 0);
  for (int e : boundary_edges_) {
    if (edge_triangles_[e][1] >= 0) throw std::invalid_argument("mesh: boundary loop uses an interior edge");
    if (++seen[e] > 1) throw std::invalid_argument("mesh: boundary loop is not simple");
  }
  std::vector<int> vseen(vertices_.size(), 0);
  for (int v : boundary_)
    if (++vseen[v] > 1) throw std::invalid_argument("mesh: boundary loop revisits a vertex");

  double loop_area = 0.0;
  for (std::size_t i = 0; i < boundary_.size(); ++i)
    loop_area += 0.5 * cross(vertices_[boundary_[i]], vertices_[boundary_[(i + 1) % boundary_.size()]]);
  if (!(loop_area > 0.0)) throw std::invalid_argument("mesh: boundary loop is not counterclockwise");

  const double tol = 1e-12 * domain_.diameter();
  for (std::size_t i = 0; i < boundary_.size(); ++i) {
    const Point exact = domain_.boundary_point(boundary_param_[i]);
    if (norm(exact - vertices_[boundary_[i]]) > tol)
      throw std::invalid_argument("mesh: boundary vertex is off the exact boundary curve");
  }
}

int Mesh::find_edge(int a, int b) const {
  if (a < 0 || a >= static_cast<int>(vertex_edges_.size())) return -1;
  for (const auto& [other, e] : vertex_edges_[a])
    if (other == b) return e;
  return -1;
}

double Mesh::triangle_area(int t) const {
  const auto& tri = triangles_[t];
  return signed_area(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
}

double Mesh::total_area() const {
  double sum = 0.0;
  for (int t = 0; t < triangle_count(); ++t) sum += triangle_area(t);
  return sum;
}

nlohmann::json Mesh::to_json() const {
  nlohmann::json j;
  auto& verts = j["vertices"] = nlohmann::json::array();
  for (const auto& p : vertices_) verts.push_back({p.x, p.y});
  auto& tris = j["triangles"] = nlohmann::json::array();
  for (const auto& t : triangles_) tris.push_back({t[0], t[1], t[2]});
  j["boundary"] = boundary_;
  return j;
}

MeshPtr build_mesh(const DomainSpec& spec, double target_h) {
  if (!(target_h > 0.0)) throw std::invalid_argument("build_mesh: target_h must be positive");
  if (target_h > spec.feature_size() / 4.0 * (1.0 + 1e-12))
    throw std::invalid_argument("build_mesh: target_h too coarse for the domain (must be <= feature size / 4)");
  if (const auto* rect = std::get_if<Rectangle>(&spec.kind())) return grid_mesh(spec, *rect, target_h);

  int rings = std::max(4, static_cast<int>(std::ceil(0.5 * spec.diameter() / target_h - 1e-9)));
  for (;;) {
    auto mesh = ring_mesh(spec, rings);
    if (mesh->h() <= 1.5 * target_h) return mesh;
    rings = static_cast<int>(std::ceil(rings * mesh->h() / (1.4 * target_h)));
  }
}

MeshPtr refine(const Mesh& mesh) {
  const int nv = mesh.vertex_count();
  std::vector<Point> vertices = mesh.vertices();
  vertices.reserve(nv + mesh.edge_count());
  for (const auto& e : mesh.edges()) vertices.push_back(0.5 * (mesh.vertices()[e[0]] + mesh.vertices()[e[1]]));

  const auto& loop = mesh.boundary();
  const auto& params = mesh.boundary_param();
  const double period = mesh.domain().period();
  const std::size_t nb = loop.size();
  std::vector<int> boundary;
  std::vector<double> boundary_param;
  boundary.reserve(2 * nb);
  boundary_param.reserve(2 * nb);
  for (std::size_t i = 0; i < nb; ++i) {
    const double t0 = params[i];
    double t1 = params[(i + 1) % nb];
    if (t1 <= t0) t1 += period;
    double tm = 0.5 * (t0 + t1);
    if (tm >= period) tm -= period;
    const int mid = nv + mesh.boundary_edges()[i];
    vertices[mid] = mesh.domain().boundary_point(tm);
    boundary.push_back(loop[i]);
    boundary_param.push_back(t0);
    boundary.push_back(mid);
    boundary_param.push_back(tm);
  }

  std::vector<Mesh::Triangle> triangles;
  triangles.reserve(4 * mesh.triangles().size());
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& v = mesh.triangles()[t];
    const auto& e = mesh.triangle_edges(t);
    const int m0 = nv + e[0], m1 = nv + e[1], m2 = nv + e[2];
    triangles.push_back({v[0], m2, m1});
    triangles.push_back({m2, v[1], m0});
    triangles.push_back({m1, m0, v[2]});
    triangles.push_back({m0, m1, m2});
  }
  return std::make_shared<const Mesh>(mesh.domain(), std::move(vertices), std::move(triangles), std::move(boundary),
                                      std::move(boundary_param));
}

std::vector<double> boundary_arc_measure(const Mesh& mesh) {
  const auto& loop = mesh.boundary();
  std::vector<double> lengths(loop.size());
  for (std::size_t i = 0; i < loop.size(); ++i)
    lengths[i] = norm(mesh.vertices()[loop[(i + 1) % loop.size()]] - mesh.vertices()[loop[i]]);
  return lengths;
}

std::vector<MeshPtr> mesh_hierarchy(const DomainSpec& spec, double h, int levels) {
  if (levels < 1) throw std::invalid_argument("mesh_hierarchy: levels must be >= 1");
  std::vector<MeshPtr> out{build_mesh(spec, h)};
  for (int l = 1; l < levels; ++l) out.push_back(refine(*out.back()));
  return out;
}

}  // namespace cflow
