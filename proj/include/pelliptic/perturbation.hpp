#pragma once

#include <cstdint>

#include "pelliptic/hessian_form.hpp"
#include "pelliptic/monomial.hpp"

namespace pell {

// D_a(t) = t^a for t <= 1, a t - (a - 1) for t >= 1; derivatives up to order 2.
struct DaValue {
  double v, d1, d2;
};
DaValue D_a(double a, double t);

struct PerturbationFamily {
  double s, n, eps, c;
  int N;

  // F_{s,n,eps}(w) = n^s D_{(s+eps)/2}(|w/n|^2) on C^K, as a radial jet
  double F(const ComplexVector& w) const;
  SmoothFunction F_function(int K) const;
  SmoothFunction P_function() const;  // F(w) + c sum_j F(u_j)
  bool in_theta(const ComplexVector& w, double tol = 1e-12) const;
};

// Jet of P = F(w) + c sum_j F(u_j) in fixed-size form, for quadrature loops.
template <int N>
Jet<N> perturbation_jet(const PerturbationFamily& pf, const std::array<Complex, N>& z, int order) {
  using Vec = typename Jet<N>::Vec;
  Vec x;
  for (int j = 0; j < N; ++j) {
    x(2 * j) = z[j].real();
    x(2 * j + 1) = z[j].imag();
  }
  const double a = 0.5 * (pf.s + pf.eps), n2 = pf.n * pf.n, ns = std::pow(pf.n, pf.s);
  Jet<N> jet;
  auto add = [&](double coef, int first, int len) {
    const double t = x.segment(first, len).squaredNorm() / n2;
    const DaValue dv = D_a(a, t);
    jet.value += coef * ns * dv.v;
    if (order >= 1) jet.grad.segment(first, len) += coef * 2 * ns / n2 * dv.d1 * x.segment(first, len);
    if (order >= 2) {
      auto blk = jet.hess.block(first, first, len, len);
      blk.diagonal().array() += coef * 2 * ns / n2 * dv.d1;
      blk += coef * 4 * ns / (n2 * n2) * dv.d2 * x.segment(first, len) * x.segment(first, len).transpose();
    }
  };
  add(1.0, 0, 2 * N);
  for (int j = 0; j < N; ++j) add(pf.c, 2 * j, 2);
  return jet;
}

struct BuickReport {
  bool i_decay = false;        // |DP| decreasing towards 0 along n
  bool i_c1 = false;           // one-sided derivatives agree across Theta_n
  bool ii_convex = false;      // sampled A-convexity off Theta_n
  bool ii_outer = false;       // H >= (s+eps) n^{s-2} lambda |X|^2 for |u| > n
  bool iii_growth = false;     // |DP| <= C|w|^{s-1}, |D2P| <= C|w|^{s-2}, C from the n-free formula
  bool iv_linear = false;      // |DP| <= C(n)|w|
  bool v_bounded = false;      // |D2P| bounded off Theta_n
  double min_convex_margin = 0, min_outer_margin = 0;
  double growth_ratio1 = 0, growth_ratio2 = 0, linear_ratio = 0, hess_sup = 0;
  double c1_mismatch = 0;
  bool pass() const {
    return i_decay && i_c1 && ii_convex && ii_outer && iii_growth && iv_linear && v_bounded;
  }
};

BuickReport buick_properties_check(double s, double n, double eps, const MatrixTuple& A, double c,
                                   std::int64_t samples, std::uint64_t seed);

}  // namespace pell
