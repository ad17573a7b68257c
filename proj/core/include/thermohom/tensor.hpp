#pragma once

// Full-index Cartesian tensors in two dimensions and the matrix packings used
// to report the effective parameters.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>

namespace thermohom {

inline constexpr int kDim = 2;

/// Rank-N tensor over R^2 stored densely, last index fastest.
template <std::size_t Rank>
class Tensor {
 public:
  static constexpr std::size_t kRank = Rank;
  static constexpr std::size_t kSize = std::size_t{1} << Rank;

  constexpr Tensor() { data_.fill(0.0); }

  template <typename... Idx>
    requires(sizeof...(Idx) == Rank)
  constexpr double& operator()(Idx... idx) {
    return data_[flat(static_cast<std::size_t>(idx)...)];
  }
  template <typename... Idx>
    requires(sizeof...(Idx) == Rank)
  constexpr double operator()(Idx... idx) const {
    return data_[flat(static_cast<std::size_t>(idx)...)];
  }

  constexpr double& operator[](std::size_t i) { return data_[i]; }
  constexpr double operator[](std::size_t i) const { return data_[i]; }

  constexpr auto begin() { return data_.begin(); }
  constexpr auto end() { return data_.end(); }
  constexpr auto begin() const { return data_.begin(); }
  constexpr auto end() const { return data_.end(); }

  /// Unpacks a flat position into its index tuple.
  static constexpr std::array<int, Rank> indices(std::size_t flat_index) {
    std::array<int, Rank> out{};
    for (std::size_t k = 0; k < Rank; ++k) {
      out[Rank - 1 - k] = static_cast<int>(flat_index & 1U);
      flat_index >>= 1U;
    }
    return out;
  }

  Tensor& operator+=(const Tensor& o) {
    for (std::size_t i = 0; i < kSize; ++i) data_[i] += o.data_[i];
    return *this;
  }
  Tensor& operator-=(const Tensor& o) {
    for (std::size_t i = 0; i < kSize; ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Tensor& operator*=(double s) {
    for (auto& v : data_) v *= s;
    return *this;
  }
  friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
  friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
  friend Tensor operator*(Tensor a, double s) { return a *= s; }
  friend Tensor operator*(double s, Tensor a) { return a *= s; }

  /// Frobenius norm.
  double norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
  }
  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  template <typename... Idx>
  static constexpr std::size_t flat(Idx... idx) {
    std::size_t f = 0;
    ((f = (f << 1U) | idx), ...);
    return f;
  }

  std::array<double, kSize> data_{};
};

using Tensor1 = Tensor<1>;
using Tensor2 = Tensor<2>;
using Tensor3 = Tensor<3>;
using Tensor4 = Tensor<4>;
using Tensor5 = Tensor<5>;
using Tensor6 = Tensor<6>;

constexpr double kronecker(int i, int j) { return i == j ? 1.0 : 0.0; }

inline Tensor2 identity2() {
  Tensor2 t;
  t(0, 0) = t(1, 1) = 1.0;
  return t;
}

/// Symmetric second-order basis tensor for the strain pair (a, b).
inline Tensor2 symmetric_unit(int a, int b) {
  Tensor2 e;
  e(a, b) += 0.5;
  e(b, a) += 0.5;
  return e;
}

/// C_ijkl * E_kl
inline Tensor2 contract(const Tensor4& c, const Tensor2& e) {
  Tensor2 out;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      double s = 0.0;
      for (int k = 0; k < kDim; ++k)
        for (int l = 0; l < kDim; ++l) s += c(i, j, k, l) * e(k, l);
      out(i, j) = s;
    }
  return out;
}

inline double double_dot(const Tensor2& a, const Tensor2& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < Tensor2::kSize; ++i) s += a[i] * b[i];
  return s;
}

// ---------------------------------------------------------------------------
// Matrix packings.
//
// Strain pairs A = {11, 22, 12}; strain-gradient triples
// theta = {111, 112, 221, 222, 121, 122}, read as (pair ab, gradient c).
// Entries are copied verbatim, without shear weights.

struct Pair {
  int a, b;
};
struct Triple {
  int a, b, c;
};

inline constexpr std::array<Pair, 3> kPairs{{{0, 0}, {1, 1}, {0, 1}}};
inline constexpr std::array<Triple, 6> kTriples{
    {{0, 0, 0}, {0, 0, 1}, {1, 1, 0}, {1, 1, 1}, {0, 1, 0}, {0, 1, 1}}};

using Matrix3 = Eigen::Matrix<double, 3, 3>;
using Matrix36 = Eigen::Matrix<double, 3, 6>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;
using Matrix32 = Eigen::Matrix<double, 3, 2>;
using Matrix2 = Eigen::Matrix<double, 2, 2>;

/// Relative tolerance above which a packing rejects a tensor as lacking the
/// symmetry its packed form assumes. The scale is the larger of the tensor's
/// max entry and `reference_scale`, so that round-off sized tensors pass.
inline constexpr double kPackSymmetryTolerance = 1e-8;

Matrix2 pack2(const Tensor2& t);
/// Requires minor and major symmetry.
Matrix3 pack_stiffness(const Tensor4& c, double reference_scale = 0.0);
/// Requires symmetry in the first pair and in the pair of the triple.
Matrix36 pack_coupling(const Tensor5& g, double reference_scale = 0.0);
/// Requires pair symmetry on both triples and triple exchange symmetry.
Matrix6 pack_gradient_stiffness(const Tensor6& d, double reference_scale = 0.0);
/// Requires symmetry in the first pair.
Matrix32 pack_gradient_thermal(const Tensor3& gamma, double reference_scale = 0.0);

Tensor2 unpack2(const Matrix2& m);
Tensor4 unpack_stiffness(const Matrix3& m);
Tensor5 unpack_coupling(const Matrix36& m);
Tensor6 unpack_gradient_stiffness(const Matrix6& m);
Tensor3 unpack_gradient_thermal(const Matrix32& m);

}  // namespace thermohom
