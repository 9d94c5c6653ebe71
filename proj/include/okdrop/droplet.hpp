#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "okdrop/geometry.hpp"
#include "okdrop/params.hpp"
#include "okdrop/vec2.hpp"

namespace okdrop {

enum class ShapeKind { Disk, Polygon };

/// One connected minority-phase component. Polygon vertices are stored
/// relative to the center, counter-clockwise.
struct Droplet {
  Vec2 center;
  ShapeKind kind = ShapeKind::Disk;
  double radius = 0.0;
  Polygon vertices;

  static Droplet disk(const Vec2& center, double radius);
  /// Accepts either orientation; stores counter-clockwise.
  static Droplet polygon(const Vec2& center, Polygon relative_vertices);

  bool is_disk() const { return kind == ShapeKind::Disk; }
  double area() const;
  double perimeter() const;
  double diameter() const;
  /// Largest distance from the center to a point of the droplet.
  double bounding_radius() const;
  /// Signed distance to the boundary of a point given relative to the center (positive inside).
  double signed_distance(const Vec2& rel) const;
  bool contains(const Vec2& rel) const { return signed_distance(rel) > 0.0; }
  /// Vertices in absolute coordinates (polygon only; not wrapped).
  Polygon absolute_vertices() const;
};

struct DropletConfig {
  TorusParams params;
  double epsilon = 1e-3;
  std::vector<Droplet> droplets;

  /// Checks params, epsilon, per-droplet shape invariants and pairwise disjointness.
  void validate() const;
  Scaling scaling() const { return Scaling(epsilon); }
};

/// True if the two droplets (with periodic images) overlap.
bool droplets_overlap(const Droplet& a, const Droplet& b, double ell);

struct RescaledStats {
  std::vector<double> areas;
  std::vector<double> perimeters;
};

RescaledStats rescaled_stats(const DropletConfig& config);

struct Atom {
  double weight = 0.0;
  Vec2 position;
};

/// Nonnegative density on an n x n periodic grid (cell (i, j) is
/// [i h, (i+1) h) x [j h, (j+1) h), the sample is the cell average) plus atoms.
struct DensityMeasure {
  double ell = 1.0;
  int n = 0;
  std::vector<double> grid;
  std::vector<Atom> atoms;
  double total_mass = 0.0;

  static DensityMeasure from_grid(double ell, int n, std::vector<double> samples);
  static DensityMeasure constant(double ell, int n, double value);

  double cell_size() const { return ell / n; }
  double cell_area() const { return cell_size() * cell_size(); }
  Vec2 cell_center(int i, int j) const {
    return {(i + 0.5) * cell_size(), (j + 0.5) * cell_size()};
  }
  double grid_mass() const;
  /// Recomputes total_mass from samples and atoms.
  void refresh_mass();
  /// Returns a pure grid density with each atom spread over the cell holding it.
  DensityMeasure smeared() const;
};

/// mu^eps = eps^{-2/3} |ln eps|^{-1/3} sum chi_{Omega_i}, rasterized with exact cell coverage.
DensityMeasure droplet_measure(const DropletConfig& config, int grid_n);

/// Area coverage of one droplet on the grid, added into cover (length n*n).
void rasterize_droplet(const Droplet& d, double ell, int n, std::vector<double>& cover);

struct ShapeMetrics {
  double fraenkel = 0.0;
  double deficit = 0.0;  // P - sqrt(4 pi A) in rescaled units
};

/// Fraenkel asymmetry min_B |E sym-diff B| / |E| over equal-area balls and
/// the rescaled isoperimetric deficit at the given epsilon.
ShapeMetrics shape_metrics(const Droplet& d, double epsilon);

/// Fraenkel asymmetry of a counter-clockwise polygon (scale free).
double fraenkel_asymmetry(const Polygon& poly);

/// A if A < 3^{2/3} pi / gamma, else sqrt(3^{2/3} pi / gamma) sqrt(A).
double truncated_area(double area, double gamma);

struct Component {
  std::vector<std::int64_t> cells;  // flat indices i*n + j
  double area = 0.0;
  double perimeter = 0.0;
  bool wraps_x = false;  // connected across the i = n-1 | i = 0 seam
  bool wraps_y = false;
};

/// Periodic 4-connected components of the true cells of an n x n grid.
std::vector<Component> label_components(const std::vector<std::uint8_t>& binary, int n, double ell);

/// Text format:
///   line 1: ell kappa delta_bar epsilon
///   then one droplet per line:
///     disk cx cy radius
///     polygon cx cy count dx_1 dy_1 ... dx_count dy_count
/// Lines starting with '#' are comments. Decimals use 17 significant digits.
void write_config(std::ostream& out, const DropletConfig& config);
DropletConfig read_config(std::istream& in);
void save_config(const std::string& path, const DropletConfig& config);
DropletConfig load_config(const std::string& path);

}  // namespace okdrop
