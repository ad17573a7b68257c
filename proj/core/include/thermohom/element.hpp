#pragma once

// Lagrange triangles of order 1 and 2 with isoparametric geometry.
// Local node order: three vertices counter-clockwise, then the midside nodes of
// edges (0,1), (1,2), (2,0).

#include "thermohom/geometry.hpp"

#include <array>
#include <span>

namespace thermohom {

inline constexpr int kMaxElementNodes = 6;

constexpr int nodes_per_element(int order) { return order == 1 ? 3 : 6; }

struct QuadraturePoint {
  double xi;
  double eta;
  double weight;  // reference triangle has area 1/2
};

/// 3-point rule (degree 2) for order 1, 6-point rule (degree 4) for order 2.
std::span<const QuadraturePoint> triangle_rule(int order);

/// Values and physical gradients of the shape functions at one point.
struct ElementPoint {
  Point x;
  double det_jacobian = 0.0;
  double jxw = 0.0;  // det(J) * weight
  std::array<double, kMaxElementNodes> N{};
  std::array<std::array<double, 2>, kMaxElementNodes> dN{};  // dN/dx, dN/dy
};

void reference_shape(int order, double xi, double eta, std::span<double> N,
                     std::span<std::array<double, 2>> dN_ref);

/// Maps a reference point through the element with node coordinates `coords`
/// (size nodes_per_element(order)). Gradients are left unset when det <= 0.
ElementPoint map_point(std::span<const Point> coords, int order, const QuadraturePoint& qp);

/// Inradius over circumradius of the vertex triangle: 0.5 for equilateral.
double triangle_quality(Point a, Point b, Point c);

double signed_area(Point a, Point b, Point c);

}  // namespace thermohom
