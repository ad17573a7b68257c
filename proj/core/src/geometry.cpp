#include "thermohom/geometry.hpp"

#include "thermohom/errors.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace thermohom {

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

void RveSpec::validate() const {
  if (!(cell.edge_length > 0.0)) throw GeometryError("cell edge length must be positive");
  if (!(homothetic_ratio > 0.0)) throw GeometryError("homothetic ratio must be positive");
  for (std::size_t i = 0; i < pores.size(); ++i) {
    const Pore& p = pores[i];
    if (!(p.radius > 0.0)) {
      throw GeometryError("pore " + std::to_string(i) + " has nonpositive radius");
    }
    if (p.center.x - p.radius <= cell.x_min() || p.center.x + p.radius >= cell.x_max() ||
        p.center.y - p.radius <= cell.y_min() || p.center.y + p.radius >= cell.y_max()) {
      std::ostringstream msg;
      msg << "pore " << i << " at (" << p.center.x << ", " << p.center.y << ") with radius "
          << p.radius << " touches or crosses the cell boundary";
      throw GeometryError(msg.str());
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (distance(p.center, pores[j].center) <= p.radius + pores[j].radius) {
        throw GeometryError("pores " + std::to_string(j) + " and " + std::to_string(i) +
                            " overlap");
      }
    }
  }
}

double porosity(const RveSpec& spec) {
  for (std::size_t i = 0; i < spec.pores.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (distance(spec.pores[i].center, spec.pores[j].center) <=
          spec.pores[i].radius + spec.pores[j].radius) {
        throw GeometryError("pores " + std::to_string(j) + " and " + std::to_string(i) +
                            " overlap");
      }
  double void_area = 0.0;
  for (const Pore& p : spec.pores) void_area += std::numbers::pi * p.radius * p.radius;
  return void_area / spec.cell.area();
}

double pore_radius_for_porosity(double edge_length, double target_porosity, int count) {
  return edge_length * std::sqrt(target_porosity / (count * std::numbers::pi));
}

std::optional<Preset> preset_from_string(const std::string& name) {
  if (name == "homogeneous") return Preset::homogeneous;
  if (name == "single") return Preset::single;
  if (name == "uniform4") return Preset::uniform4;
  if (name == "random4") return Preset::random4;
  return std::nullopt;
}

std::string to_string(Preset preset) {
  switch (preset) {
    case Preset::homogeneous: return "homogeneous";
    case Preset::single: return "single";
    case Preset::uniform4: return "uniform4";
    case Preset::random4: return "random4";
  }
  return "unknown";
}

RveSpec make_preset(Preset preset, double edge_length, double target_porosity) {
  RveSpec spec;
  spec.cell = Square{{0.5 * edge_length, 0.5 * edge_length}, edge_length};
  switch (preset) {
    case Preset::homogeneous:
      break;
    case Preset::single:
      spec.pores.push_back(
          {spec.cell.center, pore_radius_for_porosity(edge_length, target_porosity, 1)});
      break;
    case Preset::uniform4: {
      const double r = pore_radius_for_porosity(edge_length, target_porosity, 4);
      for (double fy : {0.25, 0.75})
        for (double fx : {0.25, 0.75}) spec.pores.push_back({{fx * edge_length, fy * edge_length}, r});
      break;
    }
    case Preset::random4:
      throw ConfigError(
          "preset random4 needs explicit pore coordinates or an explicitly seeded generator");
  }
  return spec;
}

RveSpec random_pores(std::uint64_t seed, int count, double edge_length, double target_porosity,
                     double clearance) {
  RveSpec spec;
  spec.cell = Square{{0.5 * edge_length, 0.5 * edge_length}, edge_length};
  const double r = pore_radius_for_porosity(edge_length, target_porosity, count);
  const double lo = r + clearance;
  const double hi = edge_length - r - clearance;
  if (lo >= hi) throw GeometryError("pores do not fit into the cell with the requested clearance");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(lo, hi);
  constexpr int kMaxAttempts = 100000;
  for (int attempt = 0; attempt < kMaxAttempts && static_cast<int>(spec.pores.size()) < count;
       ++attempt) {
    const Point c{coord(rng), coord(rng)};
    bool ok = true;
    for (const Pore& p : spec.pores) ok = ok && distance(c, p.center) > 2.0 * r + clearance;
    if (ok) spec.pores.push_back({c, r});
  }
  if (static_cast<int>(spec.pores.size()) < count) {
    throw GeometryError("could not place " + std::to_string(count) + " pores without overlap");
  }
  return spec;
}

bool is_centrosymmetric(const RveSpec& spec, double tol) {
  const Point c = spec.cell.center;
  for (const Pore& p : spec.pores) {
    const Point mirrored = 2.0 * c - p.center;
    bool found = false;
    for (const Pore& q : spec.pores)
      found = found || (distance(q.center, mirrored) <= tol && std::abs(q.radius - p.radius) <= tol);
    if (!found) return false;
  }
  return true;
}

}  // namespace thermohom
