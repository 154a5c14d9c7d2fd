#include "pelliptic/perturbation.hpp"

#include <algorithm>

#include "pelliptic/sampling.hpp"

namespace pell {

DaValue D_a(double a, double t) {
  if (t <= 1) {
    if (t == 0) return {0.0, a == 1 ? 1.0 : 0.0, 0.0};
    const double ta = std::pow(t, a);
    return {ta, a * ta / t, a * (a - 1) * ta / (t * t)};
  }
  return {a * t - (a - 1), a, 0.0};
}

namespace {

struct RadialJet {
  double v;
  RealVector g;
  RealMatrix H;
};

RadialJet radial(const PerturbationFamily& pf, const ComplexVector& w, int order) {
  const int K = static_cast<int>(w.size());
  RealVector x(2 * K);
  for (int j = 0; j < K; ++j) {
    x(2 * j) = w(j).real();
    x(2 * j + 1) = w(j).imag();
  }
  const double a = 0.5 * (pf.s + pf.eps);
  const double n2 = pf.n * pf.n;
  const DaValue dv = D_a(a, x.squaredNorm() / n2);
  const double ns = std::pow(pf.n, pf.s);
  RadialJet j{ns * dv.v, {}, {}};
  if (order >= 1) j.g = 2 * ns / n2 * dv.d1 * x;
  if (order >= 2)
    j.H = 2 * ns / n2 * dv.d1 * RealMatrix::Identity(2 * K, 2 * K) +
          4 * ns / (n2 * n2) * dv.d2 * (x * x.transpose());
  return j;
}

RadialJet family_jet(const PerturbationFamily& pf, const ComplexVector& w, int order) {
  RadialJet j = radial(pf, w, order);
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    ComplexVector wk(1);
    wk(0) = w(k);
    const RadialJet s = radial(pf, wk, order);
    j.v += pf.c * s.v;
    if (order >= 1) j.g.segment<2>(2 * k) += pf.c * s.g;
    if (order >= 2) j.H.block<2, 2>(2 * k, 2 * k) += pf.c * s.H;
  }
  return j;
}

}  // namespace

double PerturbationFamily::F(const ComplexVector& w) const { return radial(*this, w, 0).v; }

SmoothFunction PerturbationFamily::F_function(int K) const {
  const PerturbationFamily self = *this;
  SmoothFunction f;
  f.N = K;
  f.value = [self](const ComplexVector& w) { return radial(self, w, 0).v; };
  f.gradient = [self](const ComplexVector& w) { return radial(self, w, 1).g; };
  f.hessian = [self](const ComplexVector& w) { return radial(self, w, 2).H; };
  f.in_c2_domain = [self](const ComplexVector& w) {
    return std::abs(w.norm() - self.n) > 1e-12 * self.n;
  };
  return f;
}

SmoothFunction PerturbationFamily::P_function() const {
  const PerturbationFamily self = *this;
  SmoothFunction f;
  f.N = N;
  f.value = [self](const ComplexVector& w) { return family_jet(self, w, 0).v; };
  f.gradient = [self](const ComplexVector& w) { return family_jet(self, w, 1).g; };
  f.hessian = [self](const ComplexVector& w) { return family_jet(self, w, 2).H; };
  f.in_c2_domain = [self](const ComplexVector& w) { return !self.in_theta(w); };
  return f;
}

bool PerturbationFamily::in_theta(const ComplexVector& w, double tol) const {
  if (std::abs(w.norm() - n) <= tol * n) return true;
  for (Eigen::Index j = 0; j < w.size(); ++j)
    if (std::abs(std::abs(w(j)) - n) <= tol * n) return true;
  return false;
}

BuickReport buick_properties_check(double s, double n, double eps, const MatrixTuple& A, double c,
                                   std::int64_t samples, std::uint64_t seed) {
  const int N = static_cast<int>(A.size());
  const PerturbationFamily pf{s, n, eps, c, N};
  const SmoothFunction P = pf.P_function();
  const double se = s + eps;
  const double lam = lambda_of(A);
  const double C3a = se * (1 + c);
  const double C3b = se * (se - 1) * (1 + c);
  const double Cn = std::pow(n, s - 2);

  BuickReport rep;
  rep.min_convex_margin = kInfinity;
  rep.min_outer_margin = kInfinity;

  Rng g = make_stream(seed, hash_string("buick"), static_cast<std::uint64_t>(n));
  std::vector<ComplexVector> pts(samples);
  for (auto& w : pts) {
    w = complex_normal_vector(g, N);
    for (int j = 0; j < N; ++j) w(j) *= std::exp(uniform(g, -4.0, 0.0));
    w *= n * std::exp(uniform(g, std::log(1e-3), std::log(10.0))) / w.norm();
  }
  std::vector<double> conv(samples), outer(samples, kInfinity), r1(samples), r2(samples),
      rl(samples), hs(samples);
  parallel_for(samples, [&](std::int64_t i) {
    const ComplexVector& w = pts[i];
    const double r = w.norm();
    const RealVector gr = P.gradient(w);
    r1[i] = gr.norm() / std::pow(r, s - 1);
    rl[i] = gr.norm() / r;
    if (pf.in_theta(w, 1e-9)) {
      conv[i] = kInfinity;
      r2[i] = hs[i] = 0;
      return;
    }
    const RealMatrix H = P.hessian(w);
    const double hn = H.operatorNorm();
    r2[i] = hn / std::pow(r, s - 2);
    hs[i] = hn;
    const double mn = hessian_form_min(H, A);
    conv[i] = mn / std::max(hn, 1e-300);
    if (r > n) outer[i] = (mn - se * Cn * lam) / (se * Cn);
  });
  for (std::int64_t i = 0; i < samples; ++i) {
    rep.min_convex_margin = std::min(rep.min_convex_margin, conv[i]);
    rep.min_outer_margin = std::min(rep.min_outer_margin, outer[i]);
    rep.growth_ratio1 = std::max(rep.growth_ratio1, r1[i]);
    rep.growth_ratio2 = std::max(rep.growth_ratio2, r2[i]);
    rep.linear_ratio = std::max(rep.linear_ratio, rl[i]);
    rep.hess_sup = std::max(rep.hess_sup, hs[i]);
  }
  rep.ii_convex = rep.min_convex_margin >= -1e-10;
  rep.ii_outer = rep.min_outer_margin >= -1e-10;
  rep.iii_growth = rep.growth_ratio1 <= C3a * (1 + 1e-9) && rep.growth_ratio2 <= C3b * (1 + 1e-9);
  rep.iv_linear = rep.linear_ratio <= se * Cn * (1 + c) * (1 + 1e-9);
  rep.v_bounded = std::isfinite(rep.hess_sup) && rep.hess_sup <= C3b * Cn * (1 + 1e-9);

  // (i): derivatives at fixed points shrink as n grows
  rep.i_decay = true;
  Rng gt = make_stream(seed, hash_string("buick-i"));
  for (int k = 0; k < 5; ++k) {
    ComplexVector w = complex_normal_vector(gt, N);
    w *= uniform(gt, 0.5, 3.0) / w.norm();
    double prev1 = kInfinity, prev2 = kInfinity;
    for (int e = 4; e <= 10; ++e) {
      const PerturbationFamily q{s, std::ldexp(1.0, e), eps, c, N};
      const SmoothFunction Q = q.P_function();
      const double g1 = Q.gradient(w).norm(), g2 = Q.hessian(w).operatorNorm();
      rep.i_decay = rep.i_decay && g1 < prev1 && g2 < prev2;
      prev1 = g1;
      prev2 = g2;
    }
    // n^{-eps} rate from n = 16 to n = 1024
    const PerturbationFamily q0{s, 16.0, eps, c, N};
    const double g0 = q0.P_function().gradient(w).norm();
    rep.i_decay = rep.i_decay && prev1 <= g0 * std::pow(64.0, -eps) * (1 + 1e-9);
  }
  // C1 across Theta_n: approach |w| = n and |u_j| = n from both sides
  rep.c1_mismatch = 0;
  for (int k = 0; k < 5; ++k) {
    ComplexVector w = complex_normal_vector(gt, N);
    for (int side = 0; side < 2; ++side) {
      ComplexVector base = w;
      if (side == 0) {
        base *= n / base.norm();
      } else {
        base *= 0.5 * n / base.norm();
        base(0) *= n / std::abs(base(0));
      }
      const double h = 1e-7;
      const RealVector ga = P.gradient(base * (1 + h)), gb = P.gradient(base * (1 - h));
      rep.c1_mismatch = std::max(rep.c1_mismatch, (ga - gb).norm() / ga.norm());
    }
  }
  rep.i_c1 = rep.c1_mismatch <= 1e-5;
  return rep;
}

}  // namespace pell
