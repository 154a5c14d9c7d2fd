#include <gtest/gtest.h>

#include "pelliptic/perturbation.hpp"
#include "pelliptic/power_functions.hpp"
#include "pelliptic/sampling.hpp"

using namespace pell;

namespace {

MatrixTuple identities(int N, int d) { return MatrixTuple(N, ComplexMatrix::Identity(d, d)); }

double norm2(const Direction& X) {
  double s = 0;
  for (const auto& x : X) s += x.squaredNorm();
  return s;
}

ComplexVector random_point(Rng& g, int N) {
  ComplexVector w = complex_normal_vector(g, N);
  for (int j = 0; j < N; ++j) w(j) *= std::exp(uniform(g, -2.0, 1.0));
  return w;
}

}  // namespace

TEST(HessianForm, SquareNormGivesTwiceNorm) {
  Rng g = make_stream(1, 2);
  for (int N : {1, 2, 3}) {
    const SmoothFunction F2 = power_function(2.0, N);
    for (int k = 0; k < 20; ++k) {
      const Direction X = random_direction(g, N, 2);
      EXPECT_NEAR(hessian_form(F2, identities(N, 2), random_point(g, N), X), 2 * norm2(X), 1e-10);
    }
  }
}

TEST(HessianForm, ExplicitTwoSlotDisplay) {
  Rng g = make_stream(2, 2);
  for (int k = 0; k < 30; ++k) {
    const int d = 1 + k % 3;
    RealMatrix D2 = RealMatrix::NullaryExpr(4, 4, [&]() { return normal(g); });
    D2 = (D2 + D2.transpose()).eval();
    const MatrixTuple A = {random_complex_matrix(g, d), random_complex_matrix(g, d)};
    const Direction X = random_direction(g, 2, d);
    // four R^d blocks (Re X1, Im X1, Re X2, Im X2)
    std::vector<RealVector> W = {X[0].real(), X[0].imag(), X[1].real(), X[1].imag()};
    std::vector<RealVector> MW = {A[0].real() * W[0] - A[0].imag() * W[1],
                                  A[0].imag() * W[0] + A[0].real() * W[1],
                                  A[1].real() * W[2] - A[1].imag() * W[3],
                                  A[1].imag() * W[2] + A[1].real() * W[3]};
    double expect = 0;
    for (int a = 0; a < 4; ++a) {
      RealVector row = RealVector::Zero(d);
      for (int b = 0; b < 4; ++b) row += D2(a, b) * W[b];
      expect += row.dot(MW[a]);
    }
    EXPECT_NEAR(hessian_form(D2, A, X), expect, 1e-12 * (1 + std::abs(expect)));
    const RealVector w = stack_direction(X);
    EXPECT_NEAR(w.dot(hessian_form_matrix(D2, A) * w), expect, 1e-11 * (1 + std::abs(expect)));
  }
}

TEST(HessianForm, PowerHessianClosedForms) {
  Rng g = make_stream(3, 2);
  for (double p : {1.5, 2.0, 3.0, 6.5}) {
    for (int k = 0; k < 20; ++k) {
      const Complex z = complex_normal(g);
      const double r = std::abs(z);
      const Eigen::Vector2d x(z.real(), z.imag());
      const Eigen::Matrix2d radial = p * std::pow(r, p - 2) * Eigen::Matrix2d::Identity() +
                                     p * (p - 2) * std::pow(r, p - 4) * x * x.transpose();
      EXPECT_LE((power_hessian_1d(z, p) - radial).norm(), 1e-11 * radial.norm());
    }
  }
  EXPECT_THROW(power_hessian_1d(0.0, 1.5), DomainError);
}

TEST(HessianForm, BatmanScaling) {
  Rng g = make_stream(4, 2);
  for (int k = 0; k < 50; ++k) {
    const int N = 1 + k % 3;
    const double p = 1.3 + 0.2 * k;
    MatrixTuple A;
    for (int j = 0; j < N; ++j) A.push_back(random_complex_matrix(g, 2));
    const ComplexVector w = random_point(g, N);
    const Direction X = random_direction(g, N, 2);
    const SmoothFunction F = power_function(p, N);
    const double lhs = hessian_form(F, A, w, X);
    const double rhs = std::pow(w.norm(), p - 2) * hessian_form(F, A, ComplexVector(w / w.norm()), X);
    EXPECT_NEAR(lhs, rhs, 1e-10 * (1 + std::abs(lhs)));
  }
}

TEST(HessianForm, BatmanIdentityOne) {
  Rng g = make_stream(5, 2);
  for (int k = 0; k < 200; ++k) {
    const int N = 1 + k % 3;
    const double p = 1.2 + 0.05 * k;
    MatrixTuple A;
    for (int j = 0; j < N; ++j) A.push_back(random_complex_matrix(g, 1 + k % 2));
    const ComplexVector w = unit_complex_vector(g, N);
    const Direction X = random_direction(g, N, 1 + k % 2);
    const double h = hessian_form(power_function(p, N), A, w, X) / p;
    EXPECT_NEAR(h, batman_sum(A, p, w, X), 1e-10 * (1 + std::abs(h)));
  }
}

TEST(HessianForm, ScalarConvexityMatchesDelta) {
  // min over unit X of H_{F_p}^A at |w| = 1 equals (p^2/2) Delta_p(A)
  Rng g = make_stream(6, 2);
  for (int k = 0; k < 40; ++k) {
    const ComplexMatrix a = random_complex_matrix(g, 1 + k % 3);
    const double p = 1.2 + 0.3 * k;
    ComplexVector w(1);
    w(0) = std::polar(1.0, uniform(g, 0, 6.28));
    const double mn = hessian_form_min(power_function(p, 1).hessian(w), {a});
    EXPECT_NEAR(mn, 0.5 * p * p * delta_p_exact(a, p).value, 1e-9 * (1 + std::abs(mn)));
  }
}

TEST(HessianForm, TildeConventions) {
  Rng g = make_stream(7, 2);
  const SmoothFunction G = tensor_power({3.0, 2.0});
  const MatrixTuple A = {random_accretive(g, 2, 0.3), random_accretive(g, 2, 0.3)};
  ComplexVector w(2);
  w << Complex(1, 0), Complex(1, 0);
  const Direction X = random_direction(g, 2, 2);
  EXPECT_NEAR(hessian_form_tilde(G, A, w, X), hessian_form(G, A, w, X), 1e-12);
  // a zero slot drops out of the tilde form: only the G_2(u2) block survives, times |u1|^3/3 = 0
  w(0) = 0;
  Direction Y = X;
  Y[0].setZero();
  EXPECT_NEAR(hessian_form_tilde(G, A, w, X), hessian_form(G, A, w, Y), 1e-12);
}

TEST(PowerBounds, Examples) {
  Rng g = make_stream(8, 2);
  const ComplexMatrix I = ComplexMatrix::Identity(2, 2);
  const Complex u(0.7, -1.1);
  const ComplexVector a = complex_normal_vector(g, 2);
  const auto v = vinjerac(I, 2.0, u, a);
  // p = 2, A = I is the equality case
  EXPECT_NEAR(v.value, std::norm(u) * a.squaredNorm(), 1e-12);
  EXPECT_NEAR(v.margin, 0.0, 1e-12);

  // vanishing second direction: metajna is the first-slot vinjerac times G_s(u2)
  const ComplexMatrix A = random_accretive(g, 2, 0.3), B = random_accretive(g, 2, 0.3);
  ComplexVector uu(2);
  uu << Complex(0.4, 0.9), Complex(-1.3, 0.2);
  const Direction al = {complex_normal_vector(g, 2), ComplexVector::Zero(2)};
  const auto m = metajna(A, B, 3.0, 2.5, uu, al);
  const auto v1 = vinjerac(A, 3.0, uu(0), al[0]);
  const double Gs = std::pow(std::abs(uu(1)), 2.5) / 2.5;
  EXPECT_NEAR(m.value, Gs * v1.value, 1e-10);
  EXPECT_NEAR(m.bound, Gs * v1.bound, 1e-10);
}

TEST(PowerBounds, SampledMarginsNonnegative) {
  Rng g = make_stream(9, 2);
  for (int k = 0; k < 3000; ++k) {
    const int d = 1 + k % 3;
    const double p = uniform(g, 1.2, 8.0), s = uniform(g, 1.2, 8.0), t = uniform(g, 1.2, 8.0);
    const MatrixTuple A = {random_accretive(g, d, 0.4), random_accretive(g, d, 0.4),
                           random_accretive(g, d, 0.4)};
    const ComplexVector u = random_point(g, 3);
    const Direction X = random_direction(g, 3, d);
    EXPECT_GE(vinjerac(A[0], p, u(0), X[0]).margin, -1e-10);
    EXPECT_GE(metajna(A[0], A[1], p, s, u.head(2), {X[0], X[1]}).margin, -1e-10);
    EXPECT_GE(zhenodraga(A, {p, s, t}, u, X).margin, -1e-10);
    EXPECT_GE(debeluh(A, std::max(p, 2.0), u, X).margin, -1e-10);
  }
}

TEST(Ps, SmallestCRule) {
  for (double st : {0.7, 1.5, 4.0})
    for (double eps : {0.1, 1.0, 3.0}) {
      const double c = smallest_c(st, eps), k = 1 + eps / 2;
      double worst = kInfinity, worst_lower = kInfinity;
      for (int i = 0; i <= 20000; ++i) {
        const double T = i / 20000.0;
        worst = std::min(worst, c * std::pow(T, k) + 0.5 - st * T);
        worst_lower = std::min(worst_lower, 0.98 * c * std::pow(T, k) + 0.5 - st * T);
      }
      EXPECT_GE(worst, -1e-12);
      EXPECT_LT(worst_lower, 0.0);
    }
}

TEST(Ps, IdentityTupleConvex) {
  const MatrixTuple A = identities(3, 2);
  const PsResult res = build_Ps(3.0, A, 5000, 3);
  EXPECT_GT(res.c, 0);
  Rng g = make_stream(10, 2);
  for (int k = 0; k < 5000; ++k) {
    const ComplexVector w = random_point(g, 3);
    EXPECT_GE(hessian_form_min(res.P.hessian(w), A), -1e-10);
  }
}

TEST(Ps, SingleSlotIsScaledPower) {
  const MatrixTuple A = {ComplexMatrix::Identity(1, 1)};
  const PsResult res = build_Ps(3.5, A, 100, 1);
  ComplexVector w(1);
  w(0) = Complex(0.3, 1.7);
  EXPECT_NEAR(res.P.value(w), (1 + res.c) * std::pow(std::abs(w(0)), 3.5), 1e-12);
}

TEST(Ps, RotatedTupleConvex) {
  const double s = 4.0;
  const double phi = std::acos(0.5 + 0.02);  // Delta_4 = 0.02
  MatrixTuple A;
  for (double sg : {1.0, -1.0, 1.0}) {
    ComplexMatrix a(1, 1);
    a(0, 0) = std::polar(1.0, sg * phi);
    A.push_back(a);
  }
  ASSERT_GT(delta_of(A, s), 0);
  Rng g = make_stream(11, 2);
  const PsResult res = build_Ps(s, A, 20000, 4);
  double fixed = kInfinity;
  for (int k = 0; k < 20000; ++k)
    fixed = std::min(fixed, hessian_form_min(res.P.hessian(random_point(g, 3)), A));
  EXPECT_GE(fixed, -1e-10);
}

TEST(Perturbation, DaBranches) {
  for (double a : {1.2, 1.55, 2.5}) {
    const DaValue lo = D_a(a, 1 - 1e-12), hi = D_a(a, 1 + 1e-12);
    EXPECT_NEAR(D_a(a, 1).v, 1.0, 1e-15);
    EXPECT_NEAR(lo.d1, a, 1e-9);
    EXPECT_NEAR(hi.d1, a, 1e-15);
  }
}

TEST(Perturbation, InnerBranchIsScaledPower) {
  const PerturbationFamily pf{3.0, 16.0, 0.1, 0.5, 3};
  Rng g = make_stream(12, 2);
  for (int k = 0; k < 100; ++k) {
    ComplexVector w = complex_normal_vector(g, 3);
    w *= uniform(g, 0.01, 15.9) / w.norm();
    EXPECT_NEAR(pf.F(w), std::pow(16.0, -0.1) * std::pow(w.norm(), 3.1),
                1e-12 * (1 + pf.F(w)));
  }
}

TEST(Perturbation, BuickIdentity) {
  const MatrixTuple A = identities(3, 1);
  for (double s : {3.0, 5.0}) {
    const PsResult ps = build_Ps(s + 0.1, A, 2000, 1);
    for (double n : {4.0, 16.0}) {
      const BuickReport rep = buick_properties_check(s, n, 0.1, A, ps.c, 3000, 7);
      EXPECT_TRUE(rep.pass()) << "s=" << s << " n=" << n << " conv=" << rep.min_convex_margin
                              << " outer=" << rep.min_outer_margin;
    }
  }
}
