#include <gtest/gtest.h>

#include "pelliptic/regularized.hpp"

using namespace pell;

namespace {

template <int N>
double simpson_mass(const BumpKernel<N>& b) {
  const double I = simpson([&](double t) { return std::pow(t, N - 1) * b.profile(t); }, 0, 1, 200000);
  return BumpKernel<N>::sphere_factor() * I;
}

// smooth test function: polynomial plus a Gaussian, with exact jets
template <int N>
Jet<N> smooth_test(const CPoint<N>& z, int) {
  using Vec = typename Jet<N>::Vec;
  Vec x;
  for (int j = 0; j < N; ++j) {
    x(2 * j) = z[j].real();
    x(2 * j + 1) = z[j].imag();
  }
  Jet<N> jet;
  const double e = std::exp(-x.squaredNorm());
  jet.value = x(0) * x(0) * x(1) + e;
  jet.grad = -2 * e * x;
  jet.grad(0) += 2 * x(0) * x(1);
  jet.grad(1) += x(0) * x(0);
  jet.hess = 4 * e * x * x.transpose() - 2 * e * Jet<N>::Mat::Identity();
  jet.hess(0, 0) += 2 * x(1);
  jet.hess(0, 1) += 2 * x(0);
  jet.hess(1, 0) += 2 * x(0);
  return jet;
}

}  // namespace

TEST(Bump, NormalizedAndBounded) {
  const BumpKernel<1> b1 = BumpKernel<1>::make();
  const BumpKernel<2> b2 = BumpKernel<2>::make();
  const BumpKernel<3> b3 = BumpKernel<3>::make();
  EXPECT_NEAR(simpson_mass(b1), 1.0, 1e-8);
  EXPECT_NEAR(simpson_mass(b2), 1.0, 1e-8);
  EXPECT_NEAR(simpson_mass(b3), 1.0, 1e-8);
  EXPECT_DOUBLE_EQ(b1.kappa, 1.0);
  for (double peak : {b1.profile(0), b2.profile(0), b3.profile(0)}) {
    EXPECT_LE(peak, 1.0);
    EXPECT_GT(peak, 0.0);
  }
  EXPECT_EQ(b3.profile(1.0), 0.0);
}

TEST(Bump, KernelDerivativesMatchFiniteDifferences) {
  const BumpKernel<2> b = BumpKernel<2>::make();
  BumpKernel<2>::Vec y;
  y << 0.3, -0.2, 0.1, 0.4;
  const double h = 1e-5;
  for (int k = 0; k < 4; ++k) {
    BumpKernel<2>::Vec e = BumpKernel<2>::Vec::Zero();
    e(k) = h;
    EXPECT_NEAR((b(y + e) - b(y - e)) / (2 * h), b.gradient(y)(k), 1e-8);
    const BumpKernel<2>::Vec col = (b.gradient(y + e) - b.gradient(y - e)) / (2 * h);
    EXPECT_LE((col - b.hessian(y).col(k)).norm(), 1e-7);
  }
}

TEST(BallRule, WeightsSumToOne) {
  const Mollifier<3> mol(4);
  for (int k = 1; k <= 4; ++k) {
    double s = 0;
    for (double w : mol.rule(k).weights) {
      EXPECT_GT(w, 0.0);
      s += w;
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
    for (const auto& y : mol.rule(k).nodes) EXPECT_LT(y.norm(), 1.0);
  }
  // plain rule integrates the volume of the unit ball in R^4: pi^2 / 2
  const BallRule<2> plain = plain_ball_rule<2>(6, 4, 8);
  double vol = 0;
  for (double w : plain.weights) vol += w;
  EXPECT_NEAR(vol, M_PI * M_PI / 2, 1e-12);
}

TEST(Mollify, ConstantsAndLinearFunctions) {
  const Mollifier<2> mol(3);
  const CPoint<2> x0 = {Complex(0.4, -1.1), Complex(2.0, 0.3)};
  auto constant = [](const CPoint<2>&, int) {
    Jet<2> j;
    j.value = 3.5;
    return j;
  };
  auto linear = [](const CPoint<2>& z, int) {
    Jet<2> j;
    j.value = 2 * z[0].real() - z[0].imag() + 0.5 * z[1].imag();
    j.grad << 2, -1, 0, 0.5;
    return j;
  };
  for (double nu : {1.0, 0.3, 0.01}) {
    EXPECT_NEAR(mol.convolve(constant, x0, nu, 0, 2).value, 3.5, 1e-12);
    EXPECT_NEAR(mol.convolve(linear, x0, nu, 0, 2).value, linear(x0, 0).value, 1e-12);
  }
}

TEST(Mollify, SecondMomentOneSlot) {
  const Mollifier<1> mol(4);
  const BumpKernel<1>& b = mol.kernel();
  const double m2 = M_PI * simpson([&](double t) { return t * b.profile(t); }, 0, 1, 200000);
  auto sq = [](const CPoint<1>& z, int) {
    Jet<1> j;
    j.value = std::norm(z[0]);
    return j;
  };
  for (double nu : {1.0, 0.5, 0.1}) {
    const MollifyResult<1> r = mol.mollify(sq, CPoint<1>{}, nu, 0, 1e-12);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.jet.value, nu * nu * m2, 1e-12);
  }
  // two orders agree on the moment
  EXPECT_NEAR(mol.convolve(sq, CPoint<1>{}, 1.0, 0, 2).value,
              mol.convolve(sq, CPoint<1>{}, 1.0, 0, 4).value, 1e-13);
}

TEST(Mollify, KernelDerivativeMatchesFunctionDerivative) {
  const Mollifier<2> mol(4);
  const BallRule<2> plain = plain_ball_rule<2>(40, 8, 16);
  const CPoint<2> x0 = {Complex(0.3, -0.2), Complex(-0.4, 0.5)};
  for (double nu : {0.5, 0.2}) {
    const Jet<2> fun = mol.convolve(smooth_test<2>, x0, nu, 2, 4);
    const Jet<2> ker = mol.convolve_kernel_derivative(
        [](const CPoint<2>& z) { return smooth_test<2>(z, 0).value; }, x0, nu, plain);
    EXPECT_NEAR(ker.value, fun.value, 1e-6);
    EXPECT_LE((ker.grad - fun.grad).norm(), 1e-6);
    EXPECT_LE((ker.hess - fun.hess).norm(), 1e-5);
  }
}

TEST(Mollify, AdaptiveReportsNonconvergence) {
  const Mollifier<3> mol(3);
  const BellmanParams bp = BellmanParams::make(HolderTriple::from_pq(4, 4), 0, 4);
  const BellmanEvaluator X(bp);
  const CPoint<3> z = {Complex(0.3, 0.2), Complex(-0.5, 0.1), Complex(0.2, 0.7)};
  const MollifyResult<3> r = mol.mollify(X, z, 0.5, 2, 1e-12);
  EXPECT_FALSE(r.converged);
  EXPECT_GT(r.error, 0.0);
  const MollifyResult<3> loose = mol.mollify(X, z, 0.02, 0, 1e-6);
  EXPECT_TRUE(loose.converged);
}

TEST(Mollify, BellmanLimitAsNuShrinks) {
  const Mollifier<3> mol(3);
  const BellmanParams bp = BellmanParams::make(HolderTriple::from_pq(6, 4), 1, 8);
  const BellmanEvaluator X(bp);
  const CPoint<3> z = {Complex(0.9, 0.2), Complex(-0.5, 0.4), Complex(0.3, 0.6)};
  double prev = kInfinity;
  for (double nu : {0.5, 0.1, 0.02, 0.004}) {
    const double gap = std::abs(mol.convolve(X, z, nu, 0, 3).value - X(z, 0).value);
    EXPECT_LT(gap, prev);
    prev = gap;
  }
  EXPECT_LT(prev, 1e-4);
}

TEST(Cutoff, PlateauAndDerivatives) {
  const double n = 1.7;
  EXPECT_EQ(cutoff_jet<3>({Complex(3, 0), Complex(2, 0), Complex(0, 0)}, n).value, 1.0);
  EXPECT_EQ(cutoff_jet<3>({Complex(6.9, 0), Complex(0, 0), Complex(0, 0)}, n).value, 0.0);
  const CPoint<3> z = {Complex(4.0, 1.0), Complex(-3.0, 2.5), Complex(1.0, -1.0)};
  const Jet<3> j = cutoff_jet<3>(z, n);
  EXPECT_GT(j.value, 0.0);
  EXPECT_LT(j.value, 1.0);
  const double h = 1e-5;
  for (int k = 0; k < 6; ++k) {
    CPoint<3> zp = z, zm = z;
    const Complex step = k % 2 ? Complex(0, h) : Complex(h, 0);
    zp[k / 2] += step;
    zm[k / 2] -= step;
    const Jet<3> a = cutoff_jet<3>(zp, n), b = cutoff_jet<3>(zm, n);
    EXPECT_NEAR((a.value - b.value) / (2 * h), j.grad(k), 1e-8);
    EXPECT_LE(((a.grad - b.grad) / (2 * h) - j.hess.col(k)).norm(), 1e-7);
  }
}

class Regularized : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { mol = new Mollifier<3>(3); }
  static void TearDownTestSuite() { delete mol; }
  static Mollifier<3>* mol;
};
Mollifier<3>* Regularized::mol = nullptr;

TEST_F(Regularized, NaklofenAndIzumrudSmallRun) {
  const ComplexMatrix I = ComplexMatrix::Identity(1, 1);
  const CoefficientTriple abc = {I, I, I};
  const BellmanParams bp = BellmanParams::make(HolderTriple::from_pq(4, 4), 0, 4);
  const VoltarenConstants k = voltaren_constants(bp, abc, 4000, 1);
  EXPECT_GT(k.convexity, 0.0);
  std::vector<double> ca, cc, c3;
  for (double nu : {0.5, 0.1, 0.02}) {
    const NaklofenReport r = naklofen_check(bp, abc, k, *mol, nu, 48, 2);
    EXPECT_TRUE(r.pass()) << nu << " a=" << r.a_margin << " b=" << r.b_margin << " c=" << r.c_margin;
    const IzumrudReport z = izumrud_check(bp, *mol, nu, 48, 3);
    EXPECT_TRUE(z.pass());
    ca.push_back(r.a_constant);
    cc.push_back(r.c_constant);
    c3.push_back(z.constants[2]);
  }
  EXPECT_LE(spread(ca), 2.0);
  EXPECT_LE(spread(cc), 2.0);
  EXPECT_LE(spread(c3), 2.0);
}

TEST_F(Regularized, ShellConvexityAfterDoubling) {
  const ComplexMatrix I = ComplexMatrix::Identity(1, 1);
  const BellmanParams bp = BellmanParams::make(HolderTriple::from_pq(4, 4), 0, 4);
  const JugoplastikaReport r = jugoplastika_check(bp, {I, I, I}, 4.0, 0.5, 0.1, *mol, 200, 1);
  EXPECT_TRUE(r.pass());
  EXPECT_GE(r.C_accepted, r.C_required);
  EXPECT_GT(r.C_required, 0.0);
}

TEST_F(Regularized, PerturbationGradientFadesWithN) {
  const ComplexMatrix I = ComplexMatrix::Identity(1, 1);
  const BellmanParams bp = BellmanParams::make(HolderTriple::from_pq(4, 4), 0, 4);
  const ComplexTriple z = {Complex(0.5, 0.1), Complex(0.2, -0.3), Complex(0.4, 0.4)};
  double prev = kInfinity;
  for (double n : {4.0, 16.0, 64.0, 256.0}) {
    const Xnnu xn(bp, {I, I, I}, n, 0.5, 0.1, 1.0, *mol);
    const double g = (xn(z).grad - xn.mollified_bellman(z).grad).norm();
    EXPECT_LT(g, prev);
    prev = g;
  }
}
