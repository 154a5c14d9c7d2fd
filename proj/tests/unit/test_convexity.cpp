#include <gtest/gtest.h>

#include "pelliptic/convexity.hpp"

using namespace pell;

namespace {

std::vector<DomainLabel> all_domains(const BellmanParams& bp) {
  std::vector<DomainLabel> out;
  for (int k = 1; k <= domain_count(bp); ++k) out.push_back(static_cast<DomainLabel>(k));
  return out;
}

}  // namespace

TEST(Convexity, DomainSamplerHitsTarget) {
  const BellmanParams bp = BellmanParams::make(HolderTriple::from_pq(6, 4), 1, 8);
  Rng g = make_stream(1, 3);
  for (DomainLabel dom : all_domains(bp))
    for (int k = 0; k < 50; ++k) {
      const ComplexTriple z = sample_domain_point(g, bp, dom);
      EXPECT_EQ(classify(bp, z), dom);
      const double top = std::max({std::pow(std::abs(z[0]), 6.0), std::pow(std::abs(z[1]), 4.0),
                                   std::pow(std::abs(z[2]), bp.r())});
      EXPECT_NEAR(top, 1.0, 1e-12);
    }
}

TEST(Convexity, IdentityTripleAcceptsSmallE) {
  const ComplexMatrix I = ComplexMatrix::Identity(2, 2);
  const SelectResult res = select_params({{I, I, I}}, HolderTriple::from_pq(4, 4));
  EXPECT_LE(res.params.E, 64.0);
  EXPECT_DOUBLE_EQ(res.params.E, 4.0);  // regression baseline
  EXPECT_TRUE(res.verification.pass());
  EXPECT_GT(res.verification.c_empirical, 0.0);
}

TEST(Convexity, SwapSymmetric) {
  const ComplexMatrix I = ComplexMatrix::Identity(1, 1);
  const SelectResult a = select_params({{I, I, I}}, HolderTriple::from_pq(6, 4));
  const SelectResult b = select_params({{I, I, I}}, HolderTriple::from_pq(4, 6));
  EXPECT_DOUBLE_EQ(a.params.D, b.params.D);
  EXPECT_DOUBLE_EQ(a.params.E, b.params.E);
}

TEST(Convexity, ScalingCByDelta) {
  Rng g = make_stream(2, 3);
  const HolderTriple t = HolderTriple::from_pq(3, 4);
  const ComplexMatrix A = random_elliptic(g, 2, {t.p, 1 + t.p / t.q}, 0.05);
  const ComplexMatrix B = random_elliptic(g, 2, {t.q, 1 + t.q / t.p}, 0.05);
  const ComplexMatrix C = random_elliptic(g, 2, {t.r}, 0.05);
  const SelectResult res = select_params({{A, B, C}}, t);
  for (double delta : {0.5, 0.1}) {
    const BellmanParams bp = BellmanParams::make(t, res.params.D, res.params.E / delta);
    const CoefficientTriple scaled = {A, B, ComplexMatrix(delta * C)};
    EXPECT_TRUE(convexity_check(bp, {scaled}, all_domains(bp), 6000, 5).pass()) << delta;
  }
}

TEST(Convexity, NonStarTripleExhaustsBudget) {
  const HolderTriple t = HolderTriple::from_pq(4, 4);
  ComplexMatrix A(1, 1);
  A(0, 0) = std::polar(1.0, std::acos(0.3));  // Delta_4 = -0.2
  const ComplexMatrix I = ComplexMatrix::Identity(1, 1);
  SelectOptions opt;
  opt.samples_per_domain = 200;
  opt.max_doublings = 4;
  try {
    select_params({{A, I, I}}, t, opt);
    FAIL() << "expected budget exhaustion";
  } catch (const BudgetExhausted& e) {
    EXPECT_LT(e.best_margin, 0.0);
  }
  GridDomain grid = GridDomain::interval(4, 1.0);
  EXPECT_THROW(select_params(MatrixField::constant(grid, A), MatrixField::constant(grid, I),
                             MatrixField::constant(grid, I), t),
               PreconditionError);
}

TEST(Convexity, NegativeDeltaFoundBySampler) {
  Rng g = make_stream(3, 3);
  for (int k = 0; k < 5; ++k) {
    const double p = 3 + k;
    ComplexMatrix A(1, 1);
    A(0, 0) = std::polar(1.0, std::acos(1 - 2 / p - 0.15));
    ASSERT_LE(delta_p_exact(A, p).value, -0.1);
    EXPECT_LT(power_convexity_search(A, p, 20000, k), 0.0);
  }
}
