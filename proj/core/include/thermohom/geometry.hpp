#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace thermohom {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
double distance(Point a, Point b);

/// Circular void inside the cell (mm).
struct Pore {
  Point center;
  double radius = 0.0;
};

/// Axis-aligned square cell [center - L/2, center + L/2]^2.
struct Square {
  Point center{0.5, 0.5};
  double edge_length = 1.0;

  double x_min() const { return center.x - 0.5 * edge_length; }
  double x_max() const { return center.x + 0.5 * edge_length; }
  double y_min() const { return center.y - 0.5 * edge_length; }
  double y_max() const { return center.y + 0.5 * edge_length; }
  double area() const { return edge_length * edge_length; }
};

/// Geometric description of the periodic cell.
struct RveSpec {
  Square cell;
  std::vector<Pore> pores;
  /// Ratio of micro to macro length; 1 models the cell in real dimensions.
  double homothetic_ratio = 1.0;

  /// Throws GeometryError on a nonpositive size or ratio, a pore touching or
  /// crossing the cell boundary, or overlapping pores.
  void validate() const;
};

/// Void area fraction sum(pi r^2) / L^2. Throws GeometryError for overlapping
/// pores.
double porosity(const RveSpec& spec);

/// Radius of one of `count` equal pores giving `target_porosity` in a cell of
/// edge `edge_length`.
double pore_radius_for_porosity(double edge_length, double target_porosity, int count = 1);

enum class Preset { homogeneous, single, uniform4, random4 };

std::optional<Preset> preset_from_string(const std::string& name);
std::string to_string(Preset preset);

/// Expands a preset into an explicit pore list. `random4` is not expandable
/// here; it needs explicit coordinates or `random_pores`.
RveSpec make_preset(Preset preset, double edge_length = 1.0, double target_porosity = 0.2);

/// `count` equal pores at `target_porosity`, placed by rejection sampling with
/// a fixed seed. Pores keep `clearance` (absolute, mm) from each other and from
/// the cell boundary.
RveSpec random_pores(std::uint64_t seed, int count = 4, double edge_length = 1.0,
                     double target_porosity = 0.2, double clearance = 0.03);

/// True if the pore layout maps onto itself under point reflection about the
/// cell center, within `tol` (absolute, mm).
bool is_centrosymmetric(const RveSpec& spec, double tol = 1e-9);

}  // namespace thermohom
