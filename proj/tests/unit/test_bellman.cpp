#include <gtest/gtest.h>

#include "pelliptic/bellman.hpp"
#include "pelliptic/sampling.hpp"

using namespace pell;

namespace {

BellmanParams params_pq(double p, double q, double D, double E) {
  return BellmanParams::make(HolderTriple::from_pq(p, q), D, E);
}

ComplexTriple random_point(Rng& g) {
  ComplexTriple z;
  for (auto& c : z) c = complex_normal(g) * std::exp(uniform(g, -1.5, 1.5));
  return z;
}

// central differences in the six real coordinates, evaluated on a fixed formula
Vec6 fd_gradient(const BellmanParams& bp, DomainLabel d, const ComplexTriple& z, double h) {
  Vec6 g;
  for (int k = 0; k < 6; ++k) {
    ComplexTriple a = z, b = z;
    const Complex e = (k % 2 == 0) ? Complex(h, 0) : Complex(0, h);
    a[k / 2] += e;
    b[k / 2] -= e;
    g(k) = (formula_jet(bp, d, a, 0).value - formula_jet(bp, d, b, 0).value) / (2 * h);
  }
  return g;
}

}  // namespace

TEST(Bellman, ClassifyExamples) {
  auto bp = params_pq(4, 4, 0, 2);
  EXPECT_EQ(classify(bp, {1.0, 1.0, 0.0}), DomainLabel::OnUpsilon);
  auto b6 = params_pq(6, 3, 1, 2);
  EXPECT_EQ(classify(b6, {2.0, 1.2, 1.0}), DomainLabel::Omega1);
  EXPECT_EQ(classify(b6, {0.5, 0.6, 2.0}), DomainLabel::Omega4);
}

TEST(Bellman, EqualExponentValues) {
  const double E = 3;
  auto bp = params_pq(4, 4, 0, E);
  EXPECT_NEAR(bellman_value(bp, {1.0, 1.0, 0.0}), 0.5, 1e-15);
  EXPECT_NEAR(bellman_value(bp, {0.0, 0.0, 1.0}), (E - 1) * 0.5, 1e-15);
  auto rep = bound_checks(bp, {1.0, 1.0, 0.0});
  EXPECT_NEAR(rep.upper_margin, 0.0, 1e-15);
  EXPECT_NEAR(bound_checks(bp, {0.0, 0.0, 0.0}).upper_margin, 0.0, 1e-15);
}

TEST(Bellman, GradientAtOriginAndMonomialRule) {
  auto bp = params_pq(4, 4, 0, 3);
  EXPECT_EQ(bellman_gradient(bp, {0.0, 0.0, 0.0}).norm(), 0.0);
  const ComplexTriple z = {Complex(1.5, 0.0), Complex(0.9, 0.3), Complex(0.4, 0.1)};
  ASSERT_EQ(classify(bp, z), DomainLabel::Omega1);
  // d/d|u| of |u|^4/4 is |u|^3; along the real axis that is the first partial
  EXPECT_NEAR(bellman_gradient(bp, z)(0), std::pow(1.5, 3), 1e-12);
}

TEST(Bellman, SeparableHessianInOmega1) {
  auto bp = params_pq(4, 4, 0, 3);
  const ComplexTriple z = {Complex(1.5, 0.2), Complex(0.9, 0.3), Complex(0.4, 0.1)};
  const Mat6 H = bellman_hessian(bp, z);
  EXPECT_EQ((H - H.transpose()).norm(), 0.0);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      if (a != b) EXPECT_EQ((H.block<2, 2>(2 * a, 2 * b).norm()), 0.0);
}

TEST(Bellman, PureWBlockHessianIsIdentity) {
  // r = 2: the w part of the first formula is E|w|^2/2
  auto bp = params_pq(4, 4, 0, 1.0 + 1e-9);
  const ComplexTriple z = {Complex(3, 0), Complex(2.5, 1), Complex(0.3, 0.2)};
  const Mat6 H = bellman_hessian(bp, z);
  EXPECT_LE((H.block<2, 2>(4, 4) - bp.E * Eigen::Matrix2d::Identity()).norm(), 1e-12);
}

TEST(Bellman, HomogeneityEvennessNonnegativity) {
  Rng g = make_stream(1, 1);
  std::vector<BellmanParams> ps = {params_pq(6, 3, 2, 4), params_pq(4, 4, 0, 2),
                                   params_pq(3, 6, 2, 4), params_pq(10, 2.5, 3, 5)};
  for (const auto& bp : ps)
    for (int k = 0; k < 500; ++k) {
      const ComplexTriple z = random_point(g);
      const double X = bellman_value(bp, z);
      EXPECT_GE(X, 0.0);
      for (double t : {0.5, 2.0, 10.0}) {
        const ComplexTriple zt = {std::pow(t, 1 / bp.triple.p) * z[0],
                                  std::pow(t, 1 / bp.triple.q) * z[1],
                                  std::pow(t, 1 / bp.triple.r) * z[2]};
        EXPECT_LE(std::abs(bellman_value(bp, zt) - t * X), 1e-10 * (1 + t * X));
      }
      const ComplexTriple m = {std::abs(z[0]), std::abs(z[1]), std::abs(z[2])};
      EXPECT_NEAR(bellman_value(bp, m), X, 1e-12 * (1 + X));
    }
  EXPECT_EQ(bellman_value(ps[0], {0.0, 0.0, 0.0}), 0.0);
}

TEST(Bellman, SwappedExponentsMirror) {
  auto a = params_pq(6, 3, 2, 4), b = params_pq(3, 6, 2, 4);
  Rng g = make_stream(2, 1);
  for (int k = 0; k < 200; ++k) {
    const ComplexTriple z = random_point(g);
    const ComplexTriple s = {z[1], z[0], z[2]};
    EXPECT_NEAR(bellman_value(a, z), bellman_value(b, s), 1e-12 * (1 + bellman_value(a, z)));
    Vec6 ga = bellman_gradient(a, z), gb = bellman_gradient(b, s);
    EXPECT_LE((ga.segment<2>(0) - gb.segment<2>(2)).norm(), 1e-10 * (1 + ga.norm()));
  }
}

TEST(Bellman, GradientMatchesFiniteDifferences) {
  Rng g = make_stream(3, 1);
  for (const auto& bp : {params_pq(6, 3, 2, 4), params_pq(4, 4, 0, 2), params_pq(12, 2.2, 3, 6)})
    for (int k = 0; k < 300; ++k) {
      const ComplexTriple z = random_point(g);
      const DomainLabel d = classify(bp, z, 1e-3);
      if (d == DomainLabel::OnUpsilon) continue;
      const Vec6 exact = formula_jet(bp, d, z, 1).grad;
      const Vec6 fd = fd_gradient(bp, d, z, 1e-6);
      EXPECT_LE((exact - fd).norm(), 1e-6 * std::max(1.0, exact.norm()));
    }
}

TEST(Bellman, HessianMatchesFiniteDifferences) {
  Rng g = make_stream(4, 1);
  for (const auto& bp : {params_pq(6, 3, 2, 4), params_pq(4, 4, 0, 2)})
    for (int k = 0; k < 200; ++k) {
      const ComplexTriple z = random_point(g);
      const DomainLabel d = classify(bp, z, 1e-3);
      if (d == DomainLabel::OnUpsilon) continue;
      const Mat6 H = formula_jet(bp, d, z, 2).hess;
      const double h = 1e-5;
      for (int k2 = 0; k2 < 6; ++k2) {
        ComplexTriple a = z, b = z;
        const Complex e = (k2 % 2 == 0) ? Complex(h, 0) : Complex(0, h);
        a[k2 / 2] += e;
        b[k2 / 2] -= e;
        const Vec6 col = (formula_jet(bp, d, a, 1).grad - formula_jet(bp, d, b, 1).grad) / (2 * h);
        EXPECT_LE((col - H.col(k2)).norm(), 1e-5 * std::max(1.0, H.norm()));
      }
    }
}

TEST(Bellman, HessianRejectsUpsilon) {
  auto bp = params_pq(6, 3, 2, 4);
  EXPECT_THROW(bellman_hessian(bp, {1.0, 1.0, 0.5}), UpsilonError);
  EXPECT_THROW(bellman_hessian(bp, {0.0, 1.0, 0.5}), UpsilonError);
}

TEST(Bellman, UpperBound) {
  Rng g = make_stream(5, 1);
  for (const auto& bp : {params_pq(6, 3, 2, 4), params_pq(4, 4, 0, 2), params_pq(3, 8, 3, 5)})
    for (int k = 0; k < 2000; ++k) {
      const ComplexTriple z = random_point(g);
      EXPECT_LE(bound_checks(bp, z).upper_margin, 1e-12 * (1 + bellman_majorant(bp, z)));
    }
}

TEST(Bellman, ParameterFloors) {
  auto t = HolderTriple::from_pq(6, 3);
  EXPECT_THROW(BellmanParams::make(t, 0.2, 10), SchemaError);  // D <= (1 - 1/2)/2
  EXPECT_THROW(BellmanParams::make(HolderTriple(4, 4, 2), 0, 1.0), SchemaError);
  EXPECT_NO_THROW(BellmanParams::make(t, 1, 2));
}
