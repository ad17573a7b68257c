#include "thermohom/tensor.hpp"

#include "thermohom/errors.hpp"

#include <string>

namespace thermohom {
namespace {

void require_close(double a, double b, double scale, const char* what) {
  if (std::abs(a - b) > kPackSymmetryTolerance * std::max(scale, 1e-300)) {
    throw Error(std::string("symmetry violation while packing ") + what + ": " +
                std::to_string(a) + " vs " + std::to_string(b));
  }
}

}  // namespace

Matrix2 pack2(const Tensor2& t) {
  Matrix2 m;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) m(i, j) = t(i, j);
  return m;
}

Tensor2 unpack2(const Matrix2& m) {
  Tensor2 t;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) t(i, j) = m(i, j);
  return t;
}

Matrix3 pack_stiffness(const Tensor4& c, double reference_scale) {
  const double scale = std::max(c.max_abs(), reference_scale);
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k)
        for (int l = 0; l < kDim; ++l) {
          require_close(c(i, j, k, l), c(j, i, k, l), scale, "stiffness");
          require_close(c(i, j, k, l), c(i, j, l, k), scale, "stiffness");
          require_close(c(i, j, k, l), c(k, l, i, j), scale, "stiffness");
        }
  Matrix3 m;
  for (int r = 0; r < 3; ++r)
    for (int s = 0; s < 3; ++s) m(r, s) = c(kPairs[r].a, kPairs[r].b, kPairs[s].a, kPairs[s].b);
  return m;
}

Tensor4 unpack_stiffness(const Matrix3& m) {
  Tensor4 c;
  for (int r = 0; r < 3; ++r)
    for (int s = 0; s < 3; ++s) {
      const auto [i, j] = kPairs[r];
      const auto [k, l] = kPairs[s];
      c(i, j, k, l) = c(j, i, k, l) = c(i, j, l, k) = c(j, i, l, k) = m(r, s);
    }
  return c;
}

Matrix36 pack_coupling(const Tensor5& g, double reference_scale) {
  const double scale = std::max(g.max_abs(), reference_scale);
  for (std::size_t f = 0; f < Tensor5::kSize; ++f) {
    const auto [a, b, c, d, e] = Tensor5::indices(f);
    require_close(g(a, b, c, d, e), g(b, a, c, d, e), scale, "coupling");
    require_close(g(a, b, c, d, e), g(a, b, d, c, e), scale, "coupling");
  }
  Matrix36 m;
  for (int r = 0; r < 3; ++r)
    for (int s = 0; s < 6; ++s) {
      const auto t = kTriples[s];
      m(r, s) = g(kPairs[r].a, kPairs[r].b, t.a, t.b, t.c);
    }
  return m;
}

Tensor5 unpack_coupling(const Matrix36& m) {
  Tensor5 g;
  for (int r = 0; r < 3; ++r)
    for (int s = 0; s < 6; ++s) {
      const auto [a, b] = kPairs[r];
      const auto t = kTriples[s];
      g(a, b, t.a, t.b, t.c) = g(b, a, t.a, t.b, t.c) = g(a, b, t.b, t.a, t.c) =
          g(b, a, t.b, t.a, t.c) = m(r, s);
    }
  return g;
}

Matrix6 pack_gradient_stiffness(const Tensor6& d, double reference_scale) {
  const double scale = std::max(d.max_abs(), reference_scale);
  for (std::size_t f = 0; f < Tensor6::kSize; ++f) {
    const auto [a, b, c, e, g, h] = Tensor6::indices(f);
    require_close(d(a, b, c, e, g, h), d(b, a, c, e, g, h), scale, "gradient stiffness");
    require_close(d(a, b, c, e, g, h), d(a, b, c, g, e, h), scale, "gradient stiffness");
    require_close(d(a, b, c, e, g, h), d(e, g, h, a, b, c), scale, "gradient stiffness");
  }
  Matrix6 m;
  for (int r = 0; r < 6; ++r)
    for (int s = 0; s < 6; ++s) {
      const auto p = kTriples[r];
      const auto q = kTriples[s];
      m(r, s) = d(p.a, p.b, p.c, q.a, q.b, q.c);
    }
  return m;
}

Tensor6 unpack_gradient_stiffness(const Matrix6& m) {
  Tensor6 d;
  for (int r = 0; r < 6; ++r)
    for (int s = 0; s < 6; ++s) {
      const auto p = kTriples[r];
      const auto q = kTriples[s];
      for (const auto& [a, b] : {std::pair{p.a, p.b}, std::pair{p.b, p.a}})
        for (const auto& [e, g] : {std::pair{q.a, q.b}, std::pair{q.b, q.a}})
          d(a, b, p.c, e, g, q.c) = m(r, s);
    }
  return d;
}

Matrix32 pack_gradient_thermal(const Tensor3& gamma, double reference_scale) {
  const double scale = std::max(gamma.max_abs(), reference_scale);
  for (std::size_t f = 0; f < Tensor3::kSize; ++f) {
    const auto [a, b, c] = Tensor3::indices(f);
    require_close(gamma(a, b, c), gamma(b, a, c), scale, "gradient thermal coupling");
  }
  Matrix32 m;
  for (int r = 0; r < 3; ++r)
    for (int k = 0; k < kDim; ++k) m(r, k) = gamma(kPairs[r].a, kPairs[r].b, k);
  return m;
}

Tensor3 unpack_gradient_thermal(const Matrix32& m) {
  Tensor3 g;
  for (int r = 0; r < 3; ++r)
    for (int k = 0; k < kDim; ++k) {
      g(kPairs[r].a, kPairs[r].b, k) = m(r, k);
      g(kPairs[r].b, kPairs[r].a, k) = m(r, k);
    }
  return g;
}

}  // namespace thermohom
