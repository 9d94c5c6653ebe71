#include "okdrop/droplet.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include "okdrop/error.hpp"
#include "okdrop/format.hpp"

namespace okdrop {

namespace {
constexpr double kPi = std::numbers::pi;
}

Droplet Droplet::disk(const Vec2& center, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw GeometryError("disk radius must be > 0");
  Droplet d;
  d.center = center;
  d.kind = ShapeKind::Disk;
  d.radius = radius;
  return d;
}

Droplet Droplet::polygon(const Vec2& center, Polygon relative_vertices) {
  if (relative_vertices.size() < 3) throw GeometryError("polygon needs at least 3 vertices");
  if (polygon_signed_area(relative_vertices) < 0.0)
    std::reverse(relative_vertices.begin(), relative_vertices.end());
  Droplet d;
  d.center = center;
  d.kind = ShapeKind::Polygon;
  d.vertices = std::move(relative_vertices);
  return d;
}

double Droplet::area() const {
  if (is_disk()) return kPi * radius * radius;
  return polygon_signed_area(vertices);
}

double Droplet::perimeter() const {
  if (is_disk()) return 2.0 * kPi * radius;
  return polygon_perimeter(vertices);
}

double Droplet::diameter() const {
  if (is_disk()) return 2.0 * radius;
  return polygon_diameter(vertices);
}

double Droplet::bounding_radius() const {
  if (is_disk()) return radius;
  double r = 0.0;
  for (const auto& v : vertices) r = std::max(r, v.norm());
  return r;
}

double Droplet::signed_distance(const Vec2& rel) const {
  if (is_disk()) return radius - rel.norm();
  const double d = distance_to_boundary(vertices, rel);
  return point_in_polygon(vertices, rel) ? d : -d;
}

Polygon Droplet::absolute_vertices() const {
  Polygon out;
  out.reserve(vertices.size());
  for (const auto& v : vertices) out.push_back(center + v);
  return out;
}

bool droplets_overlap(const Droplet& a, const Droplet& b, double ell) {
  const Vec2 d = min_image(b.center - a.center, ell);
  if (d.norm() > a.bounding_radius() + b.bounding_radius()) return false;
  if (a.is_disk() && b.is_disk()) return d.norm() <= a.radius + b.radius;
  if (a.is_disk() || b.is_disk()) {
    const Droplet& disk = a.is_disk() ? a : b;
    const Droplet& poly = a.is_disk() ? b : a;
    // Disk center relative to the polygon center.
    const Vec2 c = a.is_disk() ? -d : d;
    return poly.signed_distance(c) > -disk.radius;
  }
  Polygon pb;
  for (const auto& v : b.vertices) pb.push_back(v + d);
  const Polygon& pa = a.vertices;
  for (std::size_t i = 0; i < pa.size(); ++i)
    for (std::size_t j = 0; j < pb.size(); ++j)
      if (segments_intersect(pa[i], pa[(i + 1) % pa.size()], pb[j], pb[(j + 1) % pb.size()]))
        return true;
  return point_in_polygon(pa, pb[0]) || point_in_polygon(pb, pa[0]);
}

void DropletConfig::validate() const {
  params.validate();
  if (!(epsilon > 0.0) || !(epsilon < std::exp(-1.0)))
    throw ParameterError("epsilon must lie in (0, 1/e)");
  const double quarter = 0.25 * params.ell;
  for (std::size_t i = 0; i < droplets.size(); ++i) {
    const Droplet& d = droplets[i];
    if (!std::isfinite(d.center.x) || !std::isfinite(d.center.y))
      throw GeometryError("droplet " + std::to_string(i) + " has a non-finite center");
    if (d.is_disk()) {
      if (!(d.radius > 0.0) || !(d.radius < quarter))
        throw GeometryError("droplet " + std::to_string(i) + ": disk radius must lie in (0, ell/4)");
    } else {
      if (!polygon_is_simple(d.vertices))
        throw GeometryError("droplet " + std::to_string(i) + ": polygon is not simple");
      if (!(polygon_signed_area(d.vertices) > 0.0))
        throw GeometryError("droplet " + std::to_string(i) + ": polygon must be counter-clockwise with area > 0");
      if (!(d.diameter() < quarter) || !(d.bounding_radius() < quarter))
        throw GeometryError("droplet " + std::to_string(i) + ": polygon must fit in ell/4");
    }
  }
  for (std::size_t i = 0; i < droplets.size(); ++i)
    for (std::size_t j = i + 1; j < droplets.size(); ++j)
      if (droplets_overlap(droplets[i], droplets[j], params.ell))
        throw GeometryError("droplets " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
}

RescaledStats rescaled_stats(const DropletConfig& config) {
  const Scaling s = config.scaling();
  RescaledStats out;
  for (const auto& d : config.droplets) {
    const double a = d.area();
    if (!(a > 0.0)) throw GeometryError("degenerate droplet with zero area");
    out.areas.push_back(s.area * a);
    out.perimeters.push_back(s.length * d.perimeter());
  }
  return out;
}

DensityMeasure DensityMeasure::from_grid(double ell, int n, std::vector<double> samples) {
  if (!(ell > 0.0)) throw ParameterError("ell must be > 0");
  if (n < 1 || samples.size() != static_cast<std::size_t>(n) * n)
    throw ParameterError("density grid has the wrong size");
  for (double v : samples)
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("density samples must be finite and >= 0");
  DensityMeasure m;
  m.ell = ell;
  m.n = n;
  m.grid = std::move(samples);
  m.refresh_mass();
  return m;
}

DensityMeasure DensityMeasure::constant(double ell, int n, double value) {
  return from_grid(ell, n, std::vector<double>(static_cast<std::size_t>(n) * n, value));
}

double DensityMeasure::grid_mass() const {
  double s = 0.0;
  for (double v : grid) s += v;
  return s * cell_area();
}

void DensityMeasure::refresh_mass() {
  double s = grid_mass();
  for (const auto& a : atoms) s += a.weight;
  total_mass = s;
}

DensityMeasure DensityMeasure::smeared() const {
  DensityMeasure m = *this;
  m.atoms.clear();
  const double h = cell_size();
  for (const auto& a : atoms) {
    const Vec2 p = wrap_point(a.position, ell);
    const int i = std::min(n - 1, static_cast<int>(p.x / h));
    const int j = std::min(n - 1, static_cast<int>(p.y / h));
    m.grid[static_cast<std::size_t>(i) * n + j] += a.weight / cell_area();
  }
  m.refresh_mass();
  return m;
}

void rasterize_droplet(const Droplet& d, double ell, int n, std::vector<double>& cover) {
  const double h = ell / n;
  const double rb = d.bounding_radius();
  const int i0 = static_cast<int>(std::floor((d.center.x - rb) / h));
  const int i1 = static_cast<int>(std::floor((d.center.x + rb) / h));
  const int j0 = static_cast<int>(std::floor((d.center.y - rb) / h));
  const int j1 = static_cast<int>(std::floor((d.center.y + rb) / h));
  const Polygon abs = d.is_disk() ? Polygon{} : d.absolute_vertices();
  for (int i = i0; i <= i1; ++i)
    for (int j = j0; j <= j1; ++j) {
      const double x0 = i * h;
      const double y0 = j * h;
      const double a = d.is_disk() ? disk_rect_overlap(d.center, d.radius, x0, x0 + h, y0, y0 + h)
                                   : polygon_rect_overlap(abs, x0, x0 + h, y0, y0 + h);
      if (a <= 0.0) continue;
      const int ii = ((i % n) + n) % n;
      const int jj = ((j % n) + n) % n;
      cover[static_cast<std::size_t>(ii) * n + jj] += a;
    }
}

DensityMeasure droplet_measure(const DropletConfig& config, int grid_n) {
  config.params.validate();
  if (grid_n < 128) throw ParameterError("grid_n must be >= 128");
  const Scaling s = config.scaling();
  const double ell = config.params.ell;
  std::vector<double> cover(static_cast<std::size_t>(grid_n) * grid_n, 0.0);
  for (const auto& d : config.droplets) rasterize_droplet(d, ell, grid_n, cover);
  const double h = ell / grid_n;
  const double scale = s.density / (h * h);
  for (double& v : cover) v = std::min(v, h * h) * scale;
  return DensityMeasure::from_grid(ell, grid_n, std::move(cover));
}

double fraenkel_asymmetry(const Polygon& poly) {
  const double area = polygon_signed_area(poly);
  if (!(area > 0.0)) throw GeometryError("degenerate polygon");
  const double rho = std::sqrt(area / kPi);
  auto overlap = [&](const Vec2& c) { return disk_polygon_overlap(c, rho, poly); };

  Vec2 best = polygon_centroid(poly);
  double best_val = overlap(best);
  double xmin = poly[0].x, xmax = poly[0].x, ymin = poly[0].y, ymax = poly[0].y;
  for (const auto& v : poly) {
    xmin = std::min(xmin, v.x);
    xmax = std::max(xmax, v.x);
    ymin = std::min(ymin, v.y);
    ymax = std::max(ymax, v.y);
  }
  // Coarse grid fallback in case the centroid sits in a poor basin.
  const int g = 16;
  for (int i = 0; i <= g; ++i)
    for (int j = 0; j <= g; ++j) {
      const Vec2 c{xmin + (xmax - xmin) * i / g, ymin + (ymax - ymin) * j / g};
      const double v = overlap(c);
      if (v > best_val) {
        best_val = v;
        best = c;
      }
    }
  double step = 0.25 * rho;
  while (step > 1e-12 * rho) {
    bool moved = false;
    for (const Vec2 dir : {Vec2{1, 0}, Vec2{-1, 0}, Vec2{0, 1}, Vec2{0, -1}}) {
      const Vec2 c = best + dir * step;
      const double v = overlap(c);
      if (v > best_val) {
        best_val = v;
        best = c;
        moved = true;
      }
    }
    if (!moved) step *= 0.5;
  }
  return std::clamp(2.0 * (1.0 - best_val / area), 0.0, 2.0);
}

ShapeMetrics shape_metrics(const Droplet& d, double epsilon) {
  const Scaling s(epsilon);
  ShapeMetrics m;
  if (d.is_disk()) {
    if (!(d.radius > 0.0)) throw GeometryError("degenerate disk");
    return m;
  }
  const double a = polygon_signed_area(d.vertices);
  if (!(a > 0.0)) throw GeometryError("degenerate polygon");
  m.fraenkel = fraenkel_asymmetry(d.vertices);
  m.deficit = s.length * (polygon_perimeter(d.vertices) - std::sqrt(4.0 * kPi * a));
  return m;
}

double truncated_area(double area, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ParameterError("gamma must lie in (0, 1)");
  if (!(area > 0.0)) throw DomainError("area must be > 0");
  const double cap = kOptimalArea / gamma;
  if (area < cap) return area;
  return std::sqrt(cap) * std::sqrt(area);
}

namespace {

struct UnionFind {
  std::vector<std::int64_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::int64_t find(std::int64_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::int64_t a, std::int64_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent[a] = b;
  }
};

}  // namespace

std::vector<Component> label_components(const std::vector<std::uint8_t>& binary, int n, double ell) {
  if (n < 1 || binary.size() != static_cast<std::size_t>(n) * n)
    throw ParameterError("binary grid has the wrong size");
  const double h = ell / n;
  auto at = [&](int i, int j) -> std::int64_t { return static_cast<std::int64_t>(i) * n + j; };
  UnionFind uf(binary.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (!binary[at(i, j)]) continue;
      const int ip = (i + 1) % n;
      const int jp = (j + 1) % n;
      if (binary[at(ip, j)]) uf.unite(at(i, j), at(ip, j));
      if (binary[at(i, jp)]) uf.unite(at(i, j), at(i, jp));
    }
  std::vector<std::int64_t> slot(binary.size(), -1);
  std::vector<Component> comps;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const std::int64_t k = at(i, j);
      if (!binary[k]) continue;
      const std::int64_t root = uf.find(k);
      if (slot[root] < 0) {
        slot[root] = static_cast<std::int64_t>(comps.size());
        comps.emplace_back();
      }
      Component& c = comps[slot[root]];
      c.cells.push_back(k);
      int edges = 0;
      edges += !binary[at((i + 1) % n, j)];
      edges += !binary[at((i + n - 1) % n, j)];
      edges += !binary[at(i, (j + 1) % n)];
      edges += !binary[at(i, (j + n - 1) % n)];
      c.perimeter += edges * h;
      if (i == n - 1 && binary[at(0, j)]) c.wraps_x = true;
      if (j == n - 1 && binary[at(i, 0)]) c.wraps_y = true;
    }
  for (auto& c : comps) c.area = static_cast<double>(c.cells.size()) * h * h;
  return comps;
}

void write_config(std::ostream& out, const DropletConfig& config) {
  out << "# ell kappa delta_bar epsilon\n";
  out << fmt17(config.params.ell) << ' ' << fmt17(config.params.kappa) << ' '
      << fmt17(config.params.delta_bar) << ' ' << fmt17(config.epsilon) << '\n';
  out << "# disk cx cy radius | polygon cx cy count dx dy ...\n";
  for (const auto& d : config.droplets) {
    if (d.is_disk()) {
      out << "disk " << fmt17(d.center.x) << ' ' << fmt17(d.center.y) << ' ' << fmt17(d.radius) << '\n';
    } else {
      out << "polygon " << fmt17(d.center.x) << ' ' << fmt17(d.center.y) << ' ' << d.vertices.size();
      for (const auto& v : d.vertices) out << ' ' << fmt17(v.x) << ' ' << fmt17(v.y);
      out << '\n';
    }
  }
}

DropletConfig read_config(std::istream& in) {
  DropletConfig cfg;
  std::string line;
  bool have_header = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    if (!have_header) {
      if (!(ss >> cfg.params.ell >> cfg.params.kappa >> cfg.params.delta_bar >> cfg.epsilon))
        throw IoError("config line " + std::to_string(lineno) + ": bad header");
      have_header = true;
      continue;
    }
    std::string kind;
    Vec2 c;
    if (!(ss >> kind >> c.x >> c.y)) throw IoError("config line " + std::to_string(lineno) + ": bad droplet");
    if (kind == "disk") {
      double r = 0.0;
      if (!(ss >> r)) throw IoError("config line " + std::to_string(lineno) + ": missing radius");
      cfg.droplets.push_back(Droplet::disk(c, r));
    } else if (kind == "polygon") {
      std::size_t count = 0;
      if (!(ss >> count) || count < 3)
        throw IoError("config line " + std::to_string(lineno) + ": bad vertex count");
      Polygon v(count);
      for (auto& p : v)
        if (!(ss >> p.x >> p.y)) throw IoError("config line " + std::to_string(lineno) + ": missing vertex");
      cfg.droplets.push_back(Droplet::polygon(c, std::move(v)));
    } else {
      throw IoError("config line " + std::to_string(lineno) + ": unknown droplet kind '" + kind + "'");
    }
  }
  if (!have_header) throw IoError("config has no header line");
  return cfg;
}

void save_config(const std::string& path, const DropletConfig& config) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path);
  write_config(f, config);
  if (!f) throw IoError("write failed for " + path);
}

DropletConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read " + path);
  return read_config(f);
}

}  // namespace okdrop
