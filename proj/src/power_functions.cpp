#include "pelliptic/power_functions.hpp"

#include <algorithm>

#include "pelliptic/monomial.hpp"
#include "pelliptic/sampling.hpp"

namespace pell {

namespace {

RealVector real_coords(const ComplexVector& w) {
  RealVector x(2 * w.size());
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    x(2 * j) = w(j).real();
    x(2 * j + 1) = w(j).imag();
  }
  return x;
}

template <int N>
Jet<N> tensor_jet(const std::vector<double>& s, const ComplexVector& w, int order) {
  std::array<double, N> a;
  std::array<Complex, N> z;
  for (int j = 0; j < N; ++j) {
    a[j] = s[j];
    z[j] = w(j);
  }
  Jet<N> jet;
  accumulate<N>(bracket<N>(1.0, a), z, jet, order);
  return jet;
}

template <typename F>
auto dispatch(int N, F&& f) {
  switch (N) {
    case 1: return f(std::integral_constant<int, 1>{});
    case 2: return f(std::integral_constant<int, 2>{});
    case 3: return f(std::integral_constant<int, 3>{});
  }
  throw SchemaError("tensor_power supports N <= 3");
}

double pair_sum(const ComplexVector& w, const Direction& X, bool ordered) {
  double s = 0;
  const int N = static_cast<int>(X.size());
  for (int j = 0; j < N; ++j)
    for (int k = ordered ? 0 : j + 1; k < N; ++k)
      if (k != j) s += std::abs(w(j)) * std::abs(w(k)) * X[j].norm() * X[k].norm();
  return s;
}

}  // namespace

Eigen::Matrix2d power_hessian_1d(Complex z, double p) {
  const double r = std::abs(z);
  if (r == 0) {
    if (p == 2) return 2 * Eigen::Matrix2d::Identity();
    if (p > 2) return Eigen::Matrix2d::Zero();
    throw DomainError("power_hessian_1d: F_p is not C2 at 0 for p < 2");
  }
  const Complex sg = z / r;
  const double scale = 0.5 * p * p * std::pow(r, p - 2);
  Eigen::Matrix2d H;
  const Complex basis[2] = {Complex(1, 0), Complex(0, 1)};
  for (int c = 0; c < 2; ++c) {
    ComplexVector y(1);
    y(0) = std::conj(sg) * basis[c];
    const Complex out = scale * sg * ip_transform(y, p)(0);
    H(0, c) = out.real();
    H(1, c) = out.imag();
  }
  return H;
}

SmoothFunction power_function(double p, int N) {
  SmoothFunction f;
  f.N = N;
  f.value = [p](const ComplexVector& w) { return std::pow(w.norm(), p); };
  f.gradient = [p](const ComplexVector& w) -> RealVector {
    const double r = w.norm();
    if (r == 0) return RealVector::Zero(2 * w.size());
    return p * std::pow(r, p - 2) * real_coords(w);
  };
  f.hessian = [p, N](const ComplexVector& w) -> RealMatrix {
    if (N == 1) return power_hessian_1d(w(0), p);
    const double r = w.norm();
    if (r == 0) {
      if (p == 2) return 2 * RealMatrix::Identity(2 * N, 2 * N);
      if (p > 2) return RealMatrix::Zero(2 * N, 2 * N);
      throw DomainError("F_p is not C2 at 0 for p < 2");
    }
    const RealVector x = real_coords(w);
    return p * std::pow(r, p - 2) * RealMatrix::Identity(2 * N, 2 * N) +
           p * (p - 2) * std::pow(r, p - 4) * (x * x.transpose());
  };
  f.in_c2_domain = [p](const ComplexVector& w) { return p >= 2 || w.norm() > 0; };
  return f;
}

SmoothFunction tensor_power(const std::vector<double>& s) {
  const int N = static_cast<int>(s.size());
  SmoothFunction f;
  f.N = N;
  f.value = [s, N](const ComplexVector& w) {
    return dispatch(N, [&](auto n) { return tensor_jet<decltype(n)::value>(s, w, 0).value; });
  };
  f.gradient = [s, N](const ComplexVector& w) {
    return dispatch(N, [&](auto n) -> RealVector {
      return tensor_jet<decltype(n)::value>(s, w, 1).grad;
    });
  };
  f.hessian = [s, N](const ComplexVector& w) {
    return dispatch(N, [&](auto n) -> RealMatrix {
      return tensor_jet<decltype(n)::value>(s, w, 2).hess;
    });
  };
  f.in_c2_domain = [s](const ComplexVector& w) {
    for (std::size_t j = 0; j < s.size(); ++j)
      if (w(j) == 0.0 && s[j] < 2) return false;
    return true;
  };
  return f;
}

HessianFormReport vinjerac(const ComplexMatrix& A, double p, Complex u, const ComplexVector& alpha) {
  ComplexVector w(1);
  w(0) = u;
  const double H = hessian_form_tilde(tensor_power({p}), {A}, w, {alpha});
  const double bound = 0.5 * p * delta_p_exact(A, p).value * std::pow(std::abs(u), p) *
                       alpha.squaredNorm();
  return {"vinjerac", H, bound, H - bound};
}

HessianFormReport metajna(const ComplexMatrix& A, const ComplexMatrix& B, double r, double s,
                          const ComplexVector& u, const Direction& alpha) {
  const double H = hessian_form_tilde(tensor_power({r, s}), {A, B}, u, alpha);
  const double a1 = alpha[0].norm(), a2 = alpha[1].norm();
  const double L = std::max(pell::Lambda_of(A), pell::Lambda_of(B));
  const double pref = std::pow(std::abs(u(0)), r) * std::pow(std::abs(u(1)), s) / (r * s);
  const double bound = pref * (0.5 * r * r * delta_p_exact(A, r).value * a1 * a1 +
                               0.5 * s * s * delta_p_exact(B, s).value * a2 * a2 -
                               2 * r * s * L * a1 * a2);
  return {"metajna", H, bound, H - bound};
}

HessianFormReport zhenodraga(const MatrixTuple& A, const std::vector<double>& e,
                             const ComplexVector& u, const Direction& alpha) {
  const double H = hessian_form_tilde(tensor_power(e), A, u, alpha);
  const double L = Lambda_of(A);
  double pref = 1;
  for (int j = 0; j < 3; ++j) pref *= std::pow(std::abs(u(j)), e[j]) / e[j];
  double diag = 0, cross = 0;
  for (int j = 0; j < 3; ++j) {
    diag += 0.5 * e[j] * e[j] * delta_p_exact(A[j], e[j]).value * alpha[j].squaredNorm();
    for (int k = j + 1; k < 3; ++k) cross += e[j] * e[k] * alpha[j].norm() * alpha[k].norm();
  }
  const double bound = pref * (diag - 2 * L * cross);
  return {"zhenodraga", H, bound, H - bound};
}

HessianFormReport debeluh(const MatrixTuple& A, double p, const ComplexVector& w0,
                          const Direction& X) {
  const ComplexVector w = w0 / w0.norm();
  const int N = static_cast<int>(A.size());
  const double H = hessian_form(power_function(p, N), A, w, X) / p;
  double x2 = 0;
  for (const auto& x : X) x2 += x.squaredNorm();
  const double bound = delta_of(A, p) * x2 - (p - 2) * Lambda_of(A) * pair_sum(w, X, true);
  return {"debeluh", H, bound, H - bound};
}

double batman_sum(const MatrixTuple& A, double p, const ComplexVector& w, const Direction& X) {
  const int N = static_cast<int>(A.size());
  std::vector<ComplexVector> Y(N), AY(N);
  for (int j = 0; j < N; ++j) {
    Y[j] = std::conj(w(j)) * X[j];
    AY[j] = A[j] * Y[j];
  }
  double s = 0;
  for (int j = 0; j < N; ++j) {
    // the diagonal term uses X_j; with Y_j it would only hold when every |w_j| = 1
    s += X[j].dot(A[j] * X[j]).real();
    for (int k = 0; k < N; ++k) {
      const ComplexVector reY = Y[k].real().cast<Complex>();
      s += (p - 2) * reY.dot(AY[j]).real();
    }
  }
  return s;
}

double smallest_c(double st, double eps) {
  constexpr double floor = 1e-2;
  if (st <= 0.5) return floor;
  const double k = 1 + eps / 2;
  const double T = 1 / (2 * st * (1 - 1 / k));
  const double c = T <= 1 ? st / (k * std::pow(T, k - 1)) : st - 0.5;
  return std::max(c, floor);
}

SmoothFunction Ps_function(double s, double c, int N) {
  SmoothFunction F = power_function(s, N);
  SmoothFunction P;
  P.N = N;
  P.value = [F, s, c](const ComplexVector& w) {
    double v = F.value(w);
    for (Eigen::Index j = 0; j < w.size(); ++j) v += c * std::pow(std::abs(w(j)), s);
    return v;
  };
  P.gradient = [F, s, c](const ComplexVector& w) {
    RealVector g = F.gradient(w);
    for (Eigen::Index j = 0; j < w.size(); ++j) {
      const double r = std::abs(w(j));
      if (r > 0) {
        g(2 * j) += c * s * std::pow(r, s - 2) * w(j).real();
        g(2 * j + 1) += c * s * std::pow(r, s - 2) * w(j).imag();
      }
    }
    return g;
  };
  P.hessian = [F, s, c](const ComplexVector& w) {
    RealMatrix H = F.hessian(w);
    for (Eigen::Index j = 0; j < w.size(); ++j) H.block<2, 2>(2 * j, 2 * j) += c * power_hessian_1d(w(j), s);
    return H;
  };
  P.in_c2_domain = F.in_c2_domain;
  return P;
}

PsResult build_Ps(double s, const MatrixTuple& A, std::int64_t samples, std::uint64_t seed) {
  if (!(s > 2)) throw PreconditionError("build_Ps: s must exceed 2");
  const double delta = delta_of(A, s);
  if (!(delta > 0)) throw PreconditionError("build_Ps: Delta_s of the tuple is not positive");
  const int N = static_cast<int>(A.size());
  const int d = static_cast<int>(A[0].rows());
  const SmoothFunction F = power_function(s, N);

  // smallest sigma with s^{-1}H/Delta >= |X|^2 - sigma sum_{j<k} |w_j||w_k||X_j||X_k|
  double sigma = 0;
  if (N > 1) {
    Rng g = make_stream(seed, hash_string("build_Ps"));
    for (std::int64_t i = 0; i < samples; ++i) {
      ComplexVector w = complex_normal_vector(g, N);
      for (int j = 0; j < N; ++j) w(j) *= std::exp(uniform(g, -3.0, 0.0));
      w /= w.norm();
      const Direction X = random_direction(g, N, d);
      double x2 = 0;
      for (const auto& x : X) x2 += x.squaredNorm();
      const double lhs = x2 - hessian_form(F, A, w, X) / (s * delta);
      const double den = pair_sum(w, X, false);
      if (lhs > 0 && den > 0) sigma = std::max(sigma, lhs / den);
    }
  }
  PsResult res;
  res.sigma = 1.1 * sigma;
  res.sigma_tilde = (N - 1) * res.sigma / 2;
  res.c = s <= 4 ? std::max(res.sigma_tilde, 1e-2) : smallest_c(res.sigma_tilde, s - 4);
  res.P = Ps_function(s, res.c, N);
  return res;
}

}  // namespace pell
