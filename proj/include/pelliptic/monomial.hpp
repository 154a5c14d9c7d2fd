#pragma once

#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "pelliptic/types.hpp"

namespace pell {

// Value, real gradient and real Hessian of a function on C^N = R^{2N},
// coordinates ordered (Re z1, Im z1, Re z2, ...).
template <int N>
struct Jet {
  using Vec = Eigen::Matrix<double, 2 * N, 1>;
  using Mat = Eigen::Matrix<double, 2 * N, 2 * N>;
  double value = 0;
  Vec grad = Vec::Zero();
  Mat hess = Mat::Zero();

  Jet& operator+=(const Jet& o) {
    value += o.value;
    grad += o.grad;
    hess += o.hess;
    return *this;
  }
  Jet& operator*=(double s) {
    value *= s;
    grad *= s;
    hess *= s;
    return *this;
  }
};

// coef * prod_j |z_j|^{a_j}
template <int N>
struct Monomial {
  double coef = 0;
  std::array<double, N> a{};
};

// Builds |z|^a/a products, the bracket notation [x]^a := |x|^a / a.
template <int N>
Monomial<N> bracket(double coef, const std::array<double, N>& a) {
  Monomial<N> m{coef, a};
  for (int j = 0; j < N; ++j)
    if (a[j] != 0) m.coef /= a[j];
  return m;
}

// order: 0 value, 1 adds gradient, 2 adds Hessian. A slot sitting at zero has zero
// gradient (the function depends on moduli only); its Hessian block is 2I only when
// the exponent is exactly 2, otherwise left at zero.
template <int N>
void accumulate(const Monomial<N>& m, const std::array<Complex, N>& z, Jet<N>& jet, int order) {
  std::array<double, N> f;
  std::array<Eigen::Vector2d, N> g;
  std::array<Eigen::Matrix2d, N> H;
  bool any_zero = false;
  for (int j = 0; j < N; ++j) {
    const double a = m.a[j];
    const Eigen::Vector2d x(z[j].real(), z[j].imag());
    const double r2 = x.squaredNorm();
    if (a == 0) {
      f[j] = 1;
      g[j].setZero();
      H[j].setZero();
    } else if (r2 == 0) {
      any_zero = true;
      f[j] = 0;
      g[j].setZero();
      H[j] = (a == 2) ? Eigen::Matrix2d(2 * Eigen::Matrix2d::Identity()) : Eigen::Matrix2d::Zero();
    } else {
      f[j] = std::exp(0.5 * a * std::log(r2));
      const double s = a * f[j] / r2;
      g[j] = s * x;
      if (order >= 2)
        H[j] = s * Eigen::Matrix2d::Identity() + (a - 2) * s / r2 * (x * x.transpose());
    }
  }
  double prod = m.coef;
  for (int j = 0; j < N; ++j) prod *= f[j];
  jet.value += prod;
  if (order < 1) return;
  auto others = [&](int skip1, int skip2) {
    double p = m.coef;
    for (int j = 0; j < N; ++j)
      if (j != skip1 && j != skip2) p *= f[j];
    return p;
  };
  if (!any_zero) {
    for (int j = 0; j < N; ++j) jet.grad.template segment<2>(2 * j) += others(j, -1) * g[j];
  }
  if (order < 2) return;
  for (int j = 0; j < N; ++j) {
    jet.hess.template block<2, 2>(2 * j, 2 * j) += others(j, -1) * H[j];
    for (int k = 0; k < N; ++k)
      if (k != j)
        jet.hess.template block<2, 2>(2 * j, 2 * k) += others(j, k) * (g[j] * g[k].transpose());
  }
}

template <int N>
Jet<N> evaluate(const std::vector<Monomial<N>>& ms, const std::array<Complex, N>& z, int order) {
  Jet<N> jet;
  for (const auto& m : ms) accumulate<N>(m, z, jet, order);
  return jet;
}

}  // namespace pell
