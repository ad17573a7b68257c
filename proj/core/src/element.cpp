#include "thermohom/element.hpp"

#include <cmath>

namespace thermohom {
namespace {

constexpr double kA6 = 0.445948490915965;
constexpr double kB6 = 0.091576213509771;
constexpr double kWA6 = 0.223381589678011 / 2.0;
constexpr double kWB6 = 0.109951743655322 / 2.0;

constexpr std::array<QuadraturePoint, 3> kRule3{{
    {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0},
    {2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0},
    {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0},
}};

constexpr std::array<QuadraturePoint, 6> kRule6{{
    {kA6, kA6, kWA6},
    {1.0 - 2.0 * kA6, kA6, kWA6},
    {kA6, 1.0 - 2.0 * kA6, kWA6},
    {kB6, kB6, kWB6},
    {1.0 - 2.0 * kB6, kB6, kWB6},
    {kB6, 1.0 - 2.0 * kB6, kWB6},
}};

}  // namespace

std::span<const QuadraturePoint> triangle_rule(int order) {
  if (order == 1) return kRule3;
  return kRule6;
}

void reference_shape(int order, double xi, double eta, std::span<double> N,
                     std::span<std::array<double, 2>> dN) {
  const double l0 = 1.0 - xi - eta;
  const double l1 = xi;
  const double l2 = eta;
  constexpr std::array<double, 2> d0{-1.0, -1.0};
  constexpr std::array<double, 2> d1{1.0, 0.0};
  constexpr std::array<double, 2> d2{0.0, 1.0};
  if (order == 1) {
    N[0] = l0;
    N[1] = l1;
    N[2] = l2;
    dN[0] = d0;
    dN[1] = d1;
    dN[2] = d2;
    return;
  }
  N[0] = l0 * (2.0 * l0 - 1.0);
  N[1] = l1 * (2.0 * l1 - 1.0);
  N[2] = l2 * (2.0 * l2 - 1.0);
  N[3] = 4.0 * l0 * l1;
  N[4] = 4.0 * l1 * l2;
  N[5] = 4.0 * l2 * l0;
  for (int k = 0; k < 2; ++k) {
    dN[0][k] = (4.0 * l0 - 1.0) * d0[k];
    dN[1][k] = (4.0 * l1 - 1.0) * d1[k];
    dN[2][k] = (4.0 * l2 - 1.0) * d2[k];
    dN[3][k] = 4.0 * (l1 * d0[k] + l0 * d1[k]);
    dN[4][k] = 4.0 * (l2 * d1[k] + l1 * d2[k]);
    dN[5][k] = 4.0 * (l0 * d2[k] + l2 * d0[k]);
  }
}

ElementPoint map_point(std::span<const Point> coords, int order, const QuadraturePoint& qp) {
  const int n = nodes_per_element(order);
  ElementPoint p;
  std::array<std::array<double, 2>, kMaxElementNodes> dref{};
  reference_shape(order, qp.xi, qp.eta, p.N, dref);

  // J = dx/dxi
  double j00 = 0.0, j01 = 0.0, j10 = 0.0, j11 = 0.0;
  for (int a = 0; a < n; ++a) {
    p.x.x += p.N[a] * coords[a].x;
    p.x.y += p.N[a] * coords[a].y;
    j00 += coords[a].x * dref[a][0];
    j01 += coords[a].x * dref[a][1];
    j10 += coords[a].y * dref[a][0];
    j11 += coords[a].y * dref[a][1];
  }
  p.det_jacobian = j00 * j11 - j01 * j10;
  p.jxw = p.det_jacobian * qp.weight;
  if (p.det_jacobian <= 0.0) return p;
  const double inv = 1.0 / p.det_jacobian;
  for (int a = 0; a < n; ++a) {
    // grad_x N = J^{-T} grad_xi N
    p.dN[a][0] = inv * (j11 * dref[a][0] - j10 * dref[a][1]);
    p.dN[a][1] = inv * (-j01 * dref[a][0] + j00 * dref[a][1]);
  }
  return p;
}

double signed_area(Point a, Point b, Point c) {
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

double triangle_quality(Point a, Point b, Point c) {
  const double la = distance(b, c);
  const double lb = distance(c, a);
  const double lc = distance(a, b);
  const double area = std::abs(signed_area(a, b, c));
  const double s = 0.5 * (la + lb + lc);
  if (area <= 0.0 || s <= 0.0) return 0.0;
  const double inradius = area / s;
  const double circumradius = la * lb * lc / (4.0 * area);
  return inradius / circumradius;
}

}  // namespace thermohom
