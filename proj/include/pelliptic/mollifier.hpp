#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "pelliptic/monomial.hpp"
#include "pelliptic/quadrature.hpp"

namespace pell {

template <int N>
using CPoint = std::array<Complex, N>;

// Radial bump c exp(-kappa / (1 - |y|^2)) on the unit ball of C^N with unit mass.
// kappa starts at 1 and is halved until the peak value c exp(-kappa) is at most 1.
template <int N>
struct BumpKernel {
  using Vec = Eigen::Matrix<double, 2 * N, 1>;
  using Mat = Eigen::Matrix<double, 2 * N, 2 * N>;
  double kappa = 1, c = 1;

  // int_0^1 t^{N-1} exp(-kappa/(1-t)) dt on a fine Gauss-Legendre grid
  static double radial_mass(double kappa) {
    static const Rule1D g = gauss_legendre(400);
    double s = 0;
    for (std::size_t i = 0; i < g.x.size(); ++i)
      s += g.w[i] * std::pow(g.x[i], N - 1) * std::exp(-kappa / (1 - g.x[i]));
    return s;
  }
  // pi^N / (N-1)!, the factor between the radial t-integral and the volume integral
  static double sphere_factor() {
    double f = std::pow(M_PI, N);
    for (int k = 2; k < N; ++k) f /= k;
    return f;
  }

  static BumpKernel make() {
    BumpKernel b;
    for (;;) {
      b.c = 1 / (sphere_factor() * radial_mass(b.kappa));
      if (b.c * std::exp(-b.kappa) <= 1) return b;
      b.kappa /= 2;
    }
  }

  double profile(double t) const { return t < 1 ? c * std::exp(-kappa / (1 - t)) : 0.0; }
  double operator()(const Vec& y) const { return profile(y.squaredNorm()); }
  Vec gradient(const Vec& y) const {
    const double t = y.squaredNorm();
    if (t >= 1) return Vec::Zero();
    return profile(t) * (-kappa / ((1 - t) * (1 - t))) * 2 * y;
  }
  Mat hessian(const Vec& y) const {
    const double t = y.squaredNorm();
    if (t >= 1) return Mat::Zero();
    const double u = 1 - t, g1 = -kappa / (u * u), g2 = -2 * kappa / (u * u * u);
    return profile(t) * (4 * (g1 * g1 + g2) * y * y.transpose() + 2 * g1 * Mat::Identity());
  }
};

template <int N>
struct BallRule {
  using Vec = Eigen::Matrix<double, 2 * N, 1>;
  std::vector<Vec> nodes;
  std::vector<double> weights;
  int order = 0;
};

// Per-slot polar coordinates y_j = sqrt(t s_j) e^{i theta_j}: the radial rule integrates
// in t against t^{N-1} (any extra weight already folded in), s runs over the simplex and
// each theta_j over a trapezoid rule with m points.
template <int N>
BallRule<N> build_ball_rule(const Rule1D& radial, int simplex_points, int m, int order) {
  BallRule<N> rule;
  rule.order = order;
  const SimplexRule simplex = simplex_rule(N, simplex_points);
  const double dtheta = 2 * M_PI / m;
  const double base = std::pow(0.5 * dtheta, N);
  int total = 1;
  for (int j = 0; j < N; ++j) total *= m;
  for (std::size_t a = 0; a < radial.x.size(); ++a)
    for (std::size_t b = 0; b < simplex.s.size(); ++b)
      for (int idx = 0; idx < total; ++idx) {
        typename BallRule<N>::Vec y;
        int rest = idx;
        for (int j = 0; j < N; ++j) {
          const double th = dtheta * (rest % m + 0.5);
          rest /= m;
          const double rho = std::sqrt(radial.x[a] * simplex.s[b][j]);
          y(2 * j) = rho * std::cos(th);
          y(2 * j + 1) = rho * std::sin(th);
        }
        rule.nodes.push_back(y);
        rule.weights.push_back(base * radial.w[a] * simplex.w[b]);
      }
  return rule;
}

// Plain volume rule on the ball, for kernel-derivative convolutions.
template <int N>
BallRule<N> plain_ball_rule(int radial_points, int simplex_points, int m) {
  Rule1D r = gauss_legendre(radial_points);
  for (std::size_t i = 0; i < r.x.size(); ++i) r.w[i] *= std::pow(r.x[i], N - 1);
  return build_ball_rule<N>(r, simplex_points, m, radial_points);
}

template <int N>
struct MollifyResult {
  Jet<N> jet;
  double error = 0;  // difference to the next lower order
  int order = 0;
  bool converged = false;
};

// phi_nu(y) = nu^{-2N} phi(y / nu); (f * phi_nu)(x0) = int f(x0 - nu y) phi(y) dy.
// Order k uses k+1 radial Gauss nodes for the weight t^{N-1} phi(t), k simplex points
// per direction and 2k angles per slot.
template <int N>
class Mollifier {
 public:
  explicit Mollifier(int max_order = 4) : kernel_(BumpKernel<N>::make()) {
    const Rule1D fine = gauss_legendre(400);
    Rule1D weight;
    for (std::size_t i = 0; i < fine.x.size(); ++i) {
      weight.x.push_back(fine.x[i]);
      weight.w.push_back(fine.w[i] * std::pow(fine.x[i], N - 1) * kernel_.profile(fine.x[i]));
    }
    for (int k = 1; k <= max_order; ++k)
      rules_.push_back(build_ball_rule<N>(gauss_from_discrete(weight, k + 1), k, 2 * k, k));
  }

  const BumpKernel<N>& kernel() const { return kernel_; }
  int max_order() const { return static_cast<int>(rules_.size()); }
  const BallRule<N>& rule(int order) const { return rules_.at(order - 1); }

  // f(z, deriv_order) -> Jet<N>; derivatives of the convolution are convolutions of the
  // derivatives of f.
  template <class F>
  Jet<N> convolve(const F& f, const CPoint<N>& x0, double nu, int deriv_order, int order) const {
    const BallRule<N>& r = rule(order);
    Jet<N> acc;
    CPoint<N> z;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      const auto& y = r.nodes[i];
      for (int j = 0; j < N; ++j) z[j] = x0[j] - nu * Complex(y(2 * j), y(2 * j + 1));
      const Jet<N> v = f(z, deriv_order);
      const double w = r.weights[i];
      acc.value += w * v.value;
      if (deriv_order >= 1) acc.grad += w * v.grad;
      if (deriv_order >= 2) acc.hess += w * v.hess;
    }
    return acc;
  }

  // Raises the order from `start` until two successive orders agree to tol (relative to
  // 1 + size of each requested component).
  template <class F>
  MollifyResult<N> mollify(const F& f, const CPoint<N>& x0, double nu, int deriv_order,
                           double tol = 1e-6, int start = 2) const {
    MollifyResult<N> res;
    Jet<N> prev = convolve(f, x0, nu, deriv_order, start - 1);
    for (int k = start; k <= max_order(); ++k) {
      res.jet = convolve(f, x0, nu, deriv_order, k);
      res.order = k;
      res.error = jet_gap(prev, res.jet, deriv_order);
      if (res.error <= tol) {
        res.converged = true;
        return res;
      }
      prev = res.jet;
    }
    return res;
  }

  static double jet_gap(const Jet<N>& a, const Jet<N>& b, int deriv_order) {
    double e = std::abs(a.value - b.value) / (1 + std::abs(b.value));
    if (deriv_order >= 1) e = std::max(e, (a.grad - b.grad).norm() / (1 + b.grad.norm()));
    if (deriv_order >= 2) e = std::max(e, (a.hess - b.hess).norm() / (1 + b.hess.norm()));
    return e;
  }

  // Differentiates the kernel instead of f, so f only needs values.
  template <class G>
  Jet<N> convolve_kernel_derivative(const G& f, const CPoint<N>& x0, double nu,
                                    const BallRule<N>& plain) const {
    Jet<N> acc;
    CPoint<N> z;
    for (std::size_t i = 0; i < plain.nodes.size(); ++i) {
      const auto& y = plain.nodes[i];
      for (int j = 0; j < N; ++j) z[j] = x0[j] - nu * Complex(y(2 * j), y(2 * j + 1));
      const double fv = plain.weights[i] * f(z);
      acc.value += fv * kernel_(y);
      acc.grad += fv / nu * kernel_.gradient(y);
      acc.hess += fv / (nu * nu) * kernel_.hessian(y);
    }
    return acc;
  }

 private:
  BumpKernel<N> kernel_;
  std::vector<BallRule<N>> rules_;
};

// Smooth radial cutoff: 1 for |w| <= 3, 0 for |w| >= 4, dilated by n.
template <int N>
Jet<N> cutoff_jet(const CPoint<N>& z, double n) {
  using Vec = typename Jet<N>::Vec;
  using Mat = typename Jet<N>::Mat;
  Vec x;
  for (int j = 0; j < N; ++j) {
    x(2 * j) = z[j].real();
    x(2 * j + 1) = z[j].imag();
  }
  const double rho = x.norm();
  const double s = rho / n - 3;
  Jet<N> jet;
  if (s <= 0) {
    jet.value = 1;
    return jet;
  }
  if (s >= 1) return jet;
  // step(s) = g(1-s) / (g(1-s) + g(s)), g(x) = exp(-1/x)
  auto g = [](double x, double& d1, double& d2) {
    const double e = std::exp(-1 / x);
    d1 = e / (x * x);
    d2 = e * (1 - 2 * x) / (x * x * x * x);
    return e;
  };
  double a1, a2, b1, b2;
  const double A = g(1 - s, a1, a2), B = g(s, b1, b2);
  // derivatives of A(1 - s) in s flip the sign of the first derivative
  const double Ap = -a1, App = a2;
  const double Sum = A + B, Sp = Ap + b1, Spp = App + b2;
  const double h = A / Sum;
  const double hp = (Ap * Sum - A * Sp) / (Sum * Sum);
  const double hpp = (App * Sum - A * Spp) / (Sum * Sum) - 2 * Sp * (Ap * Sum - A * Sp) / (Sum * Sum * Sum);
  const double d1 = hp / n, d2 = hpp / (n * n);  // derivatives in rho
  const Vec e = x / rho;
  jet.value = h;
  jet.grad = d1 * e;
  jet.hess = d2 * e * e.transpose() + d1 / rho * (Mat::Identity() - e * e.transpose());
  return jet;
}

// Product rule for jets.
template <int N>
Jet<N> jet_product(const Jet<N>& a, const Jet<N>& b) {
  Jet<N> out;
  out.value = a.value * b.value;
  out.grad = a.value * b.grad + b.value * a.grad;
  out.hess = a.value * b.hess + b.value * a.hess + a.grad * b.grad.transpose() +
             b.grad * a.grad.transpose();
  return out;
}

}  // namespace pell
