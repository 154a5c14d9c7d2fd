#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "pelliptic/applications.hpp"
#include "pelliptic/convexity.hpp"

using namespace pell;

namespace {

MatrixField scalar_field(const GridDomain& g, Complex a) {
  return MatrixField::constant(g, ComplexMatrix::Constant(1, 1, a));
}

MatrixField identity_field(const GridDomain& g) {
  return MatrixField::constant(g, ComplexMatrix::Identity(g.dim, g.dim));
}

ComplexMatrix dense(const SparseMatrix& s) { return ComplexMatrix(s); }

const GridFunction kSine = [](double x, double) { return Complex(std::sin(M_PI * x)); };

}  // namespace

TEST(Operator, DirichletStencilIsTheLaplacian) {
  const GridDomain g = GridDomain::interval(8);
  const DiscreteOperator op = assemble_operator(identity_field(g), g, BoundaryCondition::dirichlet());
  ASSERT_EQ(op.size(), 7);
  const ComplexMatrix L = op.dense();
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) {
      const double want = i == j ? 2.0 : (std::abs(i - j) == 1 ? -1.0 : 0.0);
      EXPECT_NEAR(std::abs(L(i, j) - want / (g.h * g.h)), 0.0, 1e-9);
    }
}

TEST(Operator, NeumannAnnihilatesConstants) {
  const GridDomain g = GridDomain::interval(10);
  const DiscreteOperator op = assemble_operator(scalar_field(g, {1.0, 0.4}), g, BoundaryCondition::neumann());
  EXPECT_EQ(op.size(), 11);
  EXPECT_LT(operator_checks(op, 5, 1).constant_residual, 1e-10);
}

TEST(Operator, MixedLimitsMatchPureConditions) {
  const GridDomain g = GridDomain::box(5, 4, 1.0);
  Rng rng = make_stream(3, 0);
  const MatrixField A = MatrixField::from_function(g, random_smooth_field(rng, 2, {2.0}, 0.05));
  const auto none = BoundaryCondition::mixed(g, [](double, double) { return false; });
  const auto all = BoundaryCondition::mixed(g, [](double, double) { return true; });
  const auto n = assemble_operator(A, g, BoundaryCondition::neumann());
  const auto d = assemble_operator(A, g, BoundaryCondition::dirichlet());
  const auto mn = assemble_operator(A, g, none), md = assemble_operator(A, g, all);
  EXPECT_EQ((dense(n.K) - dense(mn.K)).norm(), 0.0);
  EXPECT_EQ((dense(d.K) - dense(md.K)).norm(), 0.0);
  const auto left = BoundaryCondition::mixed(g, [](double x, double) { return x < 1e-12; });
  const auto ml = assemble_operator(A, g, left);
  EXPECT_GT(ml.size(), d.size());
  EXPECT_LT(ml.size(), n.size());
}

TEST(Operator, FormIdentityAndAccretivity) {
  const GridDomain g = GridDomain::box(12, 10, 1.0);
  Rng rng = make_stream(5, 0);
  const MatrixField A = MatrixField::from_function(g, random_smooth_field(rng, 2, {2.0, 4.0}, 0.05, 0.5));
  for (auto bc : {BoundaryCondition::dirichlet(), BoundaryCondition::neumann()}) {
    const DiscreteOperator op = assemble_operator(A, g, bc);
    const OperatorChecks c = operator_checks(op, 100, 11);
    EXPECT_LT(c.form_identity_error, 1e-12);
    EXPECT_GE(c.accretivity_margin, -1e-12);
  }
}

TEST(Operator, Errors) {
  GridDomain g = GridDomain::interval(4);
  g.active.assign(4, 0);
  EXPECT_THROW(assemble_operator(MatrixField{}, g, BoundaryCondition::neumann()), SchemaError);
  const GridDomain b = GridDomain::box(3, 3);
  BoundaryCondition bad{BCKind::Mixed, std::vector<std::uint8_t>(3 * 3 * 4, 0)};
  bad.gamma[4 * 4 + 1] = 1;  // centre cell, interior facet
  EXPECT_THROW(assemble_operator(identity_field(b), b, bad), SchemaError);
}

TEST(Evolve, EigenfunctionDecay) {
  const GridDomain g = GridDomain::interval(257);
  const DiscreteOperator op = assemble_operator(identity_field(g), g, BoundaryCondition::dirichlet());
  const TimeGrid tg = geometric_time_grid(g.h, 0.1, 1.25, 0.005);
  const SemigroupTrace tr = evolve(op, op.sample(kSine), tg);
  EXPECT_DOUBLE_EQ(tr.times.back(), 0.1);
  const ComplexVector exact = op.to_nodes(op.sample(kSine)) * std::exp(-M_PI * M_PI * 0.1);
  const RealVector m = node_masses(g);
  const double err = lp_norm(m, tr.u.back() - exact, 2) / lp_norm(m, exact, 2);
  EXPECT_LT(err, 1e-3);
  EXPECT_LE(tr.contractivity_excess, 1e-10);
}

TEST(Evolve, ContractiveForComplexFields) {
  const GridDomain g = GridDomain::box(10, 10);
  Rng rng = make_stream(7, 0);
  const MatrixField A = MatrixField::from_function(g, random_smooth_field(rng, 2, {3.0}, 0.05, 0.6));
  const DiscreteOperator op = assemble_operator(A, g, BoundaryCondition::neumann());
  for (auto scheme : {Scheme::BackwardEuler, Scheme::CrankNicolson}) {
    const ComplexVector f = complex_normal_vector(rng, op.size());
    const SemigroupTrace tr = evolve(op, f, geometric_time_grid(g.h, 5.0), scheme);
    EXPECT_LE(tr.contractivity_excess, 1e-10);
  }
}

TEST(Evolve, NeumannTendsToMean) {
  const GridDomain g = GridDomain::interval(40);
  const DiscreteOperator op = assemble_operator(scalar_field(g, {1.0, 0.5}), g, BoundaryCondition::neumann());
  Rng rng = make_stream(9, 0);
  // once lambda dt >> 1 the Crank-Nicolson factor tends to -1 and decay stalls near 1e-6
  const ComplexVector f = complex_normal_vector(rng, op.size());
  const Complex mean = op.mass.cast<Complex>().dot(f) / op.mass.sum();
  const std::pair<Scheme, double> runs[] = {{Scheme::BackwardEuler, 1e-8},
                                            {Scheme::CrankNicolson, 1e-5}};
  for (const auto& [scheme, tol] : runs) {
    const SemigroupTrace tr = evolve(op, f, geometric_time_grid(g.h, 20.0), scheme);
    EXPECT_LT((tr.u.back().array() - mean).abs().maxCoeff(), tol) << int(scheme);
  }
}

TEST(Calculus, IdentityAndConstant) {
  const GridDomain g = GridDomain::box(6, 6);
  Rng rng = make_stream(13, 0);
  const MatrixField A = MatrixField::from_function(g, random_smooth_field(rng, 2, {2.0}, 0.05, 0.5));
  const DiscreteOperator op = assemble_operator(A, g, BoundaryCondition::dirichlet());
  const FunctionalCalculus fc(op);
  EXPECT_LT((fc(fn::identity()) - op.dense()).norm() / op.dense().norm(), 1e-10);
  EXPECT_LT((fc(fn::one()) - ComplexMatrix::Identity(op.size(), op.size())).norm(), 1e-10);
}

TEST(Calculus, ExponentialMatchesPadeOracle) {
  const GridDomain g = GridDomain::interval(24);
  const DiscreteOperator op = assemble_operator(scalar_field(g, {1.0, 0.6}), g, BoundaryCondition::dirichlet());
  const FunctionalCalculus fc(op);
  for (double t : {1e-3, 0.02, 0.3}) {
    const ComplexMatrix oracle = (-t * op.dense()).exp();
    EXPECT_LT((fc(fn::exp_decay(t)) - oracle).norm() / oracle.norm(), 1e-8);
  }
  const ComplexMatrix lhs = fc(fn::exp_decay(0.01)) * fc(fn::exp_decay(0.02));
  EXPECT_LT((lhs - fc(fn::exp_decay(0.03))).norm(), 1e-8);
}

TEST(Calculus, PhiClosedForms) {
  const GridDomain g = GridDomain::interval(32);
  const DiscreteOperator op = assemble_operator(scalar_field(g, {1.0, 0.3}), g, BoundaryCondition::dirichlet());
  const FunctionalCalculus fc(op);
  const double t = 0.01;
  const ComplexMatrix T = fc(fn::exp_decay(t));
  const ComplexMatrix I = ComplexMatrix::Identity(op.size(), op.size());
  EXPECT_LT((fc(fn::phi(1, t)) - T).norm() / T.norm(), 1e-10);
  EXPECT_LT((fc(fn::phi(2, t)) - (I + t * op.dense()) * T).norm() / T.norm(), 1e-10);
  for (int alpha : {1, 2, 3})
    for (double tt : {1e-4, 1e-2, 1.0}) EXPECT_LT(phi_sum_identity_error(op, fc, alpha, tt), 1e-10);
  EXPECT_LT((fc(fn::phi(2.5, 0.0)) - I).norm(), 1e-12);
}

TEST(Calculus, PowersCompose) {
  const GridDomain g = GridDomain::interval(20);
  const DiscreteOperator op = assemble_operator(scalar_field(g, {1.0, 0.4}), g, BoundaryCondition::dirichlet());
  const FunctionalCalculus fc(op);
  const ComplexMatrix half = fc(fn::power(0.5));
  EXPECT_LT((half * half - op.dense()).norm() / op.dense().norm(), 1e-9);
  const ComplexMatrix it = fc(fn::imaginary_power(0.7)) * fc(fn::imaginary_power(-0.7));
  EXPECT_LT((it - ComplexMatrix::Identity(op.size(), op.size())).norm(), 1e-9);
}

TEST(Functionals, TrivialCases) {
  const GridDomain g = GridDomain::interval(32);
  const DiscreteOperator d = assemble_operator(identity_field(g), g, BoundaryCondition::dirichlet());
  const DiscreteOperator n = assemble_operator(identity_field(g), g, BoundaryCondition::neumann());
  const TimeGrid tg = geometric_time_grid(g.h, 2.0);
  const SemigroupTrace tf = evolve(d, d.sample(kSine), tg);
  const SemigroupTrace zero = evolve(d, ComplexVector::Zero(d.size()), tg);
  EXPECT_EQ(trilinear_functional(tf, tf, zero).value, 0.0);
  EXPECT_EQ(bilinear_functional(tf, zero).value, 0.0);
  const SemigroupTrace c = evolve(n, ComplexVector::Constant(n.size(), 2.0), tg);
  EXPECT_LT(trilinear_functional(c, c, c).value, 1e-20);
}

TEST(Functionals, BilinearMatchesClosedForm) {
  // int int |d/dx e^{-pi^2 t} sin(pi x)|^2 = 1/4 and |sin|_2^2 = 1/2
  const GridDomain g = GridDomain::interval(256);
  const MatrixField I = identity_field(g);
  const auto bc = BoundaryCondition::dirichlet();
  const BilinearResult r = bilinear_ratio(g, I, I, bc, bc, 2, 2, kSine, kSine);
  EXPECT_NEAR(r.ratio, 0.5, 0.005);
  EXPECT_THROW(bilinear_ratio(g, I, I, bc, bc, 2, 3, kSine, kSine), SchemaError);
}

TEST(Functionals, TrilinearMatchesClosedForm) {
  // int_0^1 cos^2(pi x) |sin(pi x)| dx / 3 = 2 / (9 pi)
  const GridDomain g = GridDomain::interval(256);
  const DiscreteOperator op = assemble_operator(identity_field(g), g, BoundaryCondition::dirichlet());
  const SemigroupTrace tr = evolve(op, op.sample(kSine), geometric_time_grid(g.h, 4.0));
  EXPECT_NEAR(trilinear_functional(tr, tr, tr).value / (2 / (9 * M_PI)), 1.0, 0.01);
}

TEST(MosDef, ClosedFormMatchesMinimization) {
  EXPECT_NEAR(mos_def_minimum({2, 2}, {3, 4}), 24.0, 1e-12);
  EXPECT_NEAR(mos_def_numeric({2, 2}, {3, 4}), 24.0, 1e-9);
  Rng rng = make_stream(17, 0);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const int n = i % 2 ? 3 : 2;
    std::vector<double> w(n), p(n), f(n);
    for (double& x : w) x = uniform(rng, 0.1, 1.0);
    const double s = std::accumulate(w.begin(), w.end(), 0.0);
    for (int j = 0; j < n; ++j) {
      p[j] = s / w[j];
      f[j] = std::exp(uniform(rng, -2.0, 2.0));
    }
    const double a = mos_def_minimum(p, f), b = mos_def_numeric(p, f);
    worst = std::max(worst, std::abs(a - b) / a);
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(Embedding, GatingAndRatio) {
  const GridDomain g = GridDomain::interval(32);
  EmbeddingInput in;
  in.grid = g;
  in.triple = HolderTriple(4, 4, 2);
  in.fields = {identity_field(g), identity_field(g), identity_field(g)};
  in.bcs = {BoundaryCondition::dirichlet(), BoundaryCondition::dirichlet(), BoundaryCondition::dirichlet()};
  in.inputs = {kSine, kSine, kSine};
  const EmbeddingResult r = embedding_ratio(in);
  EXPECT_TRUE(std::isfinite(r.ratio));
  EXPECT_GT(r.ratio, 0.0);
  EXPECT_LE(r.contractivity_excess, 1e-10);
  EXPECT_GT(r.ratio, r.sum_form_ratio);

  EmbeddingInput bad = in;
  bad.fields[0] = scalar_field(g, std::polar(1.0, 1.4));
  EXPECT_THROW(embedding_ratio(bad), PreconditionError);
  EmbeddingInput zero = in;
  zero.inputs[2] = [](double, double) { return Complex(0); };
  EXPECT_THROW(embedding_ratio(zero), SchemaError);
}

TEST(Paraproduct, FormsAgree) {
  const GridDomain g = GridDomain::interval(48);
  const auto bc = BoundaryCondition::dirichlet();
  const DiscreteOperator A = assemble_operator(identity_field(g), g, bc);
  const ComplexVector f = A.sample(kSine);
  const ParaproductResult r = paraproduct(A, A, A, f, f, f, HolderTriple(3, 3, 3));
  EXPECT_LT(r.relative_gap, 1e-6);
  EXPECT_GT(std::abs(r.derivative_form), 0.0);

  Rng rng = make_stream(19, 0);
  const DiscreteOperator B = assemble_operator(scalar_field(g, {1.0, 0.3}), g, bc);
  const DiscreteOperator C = assemble_operator(scalar_field(g, {0.7, -0.2}), g, bc);
  const ComplexVector u = B.sample(random_smooth_function(rng, BCKind::Dirichlet, 1));
  const ComplexVector v = B.sample(random_smooth_function(rng, BCKind::Dirichlet, 1));
  const ParaproductResult s = paraproduct(B, C, A, u, v, f, HolderTriple(3, 3, 3));
  EXPECT_LT(s.relative_gap, 1e-6);
  EXPECT_LT(telescoping_gap(B, C, A, u, v, f, 0.05), 1e-8);
}

TEST(Paraproduct, ConstantUnderNeumannVanishes) {
  const GridDomain g = GridDomain::interval(24);
  const DiscreteOperator N = assemble_operator(identity_field(g), g, BoundaryCondition::neumann());
  const ComplexVector one = ComplexVector::Ones(N.size());
  Rng rng = make_stream(2, 0);
  const ComplexVector s = N.sample(random_smooth_function(rng, BCKind::Neumann, 1));
  const ParaproductResult r = paraproduct(N, N, N, one, s, s, HolderTriple(3, 3, 3));
  EXPECT_LT(std::abs(r.derivative_form), 1e-10);
  EXPECT_LT(std::abs(r.gradient_form), 1e-10);
}

TEST(KatoPonce, PreconditionsAndLimit) {
  const GridDomain g = GridDomain::interval(64);
  const DiscreteOperator op = assemble_operator(scalar_field(g, {1.0, 0.2}), g, BoundaryCondition::dirichlet());
  const FunctionalCalculus fc(op);
  const KatoPonceExponents e{3, 3, 2, 6, 3};
  Rng rng = make_stream(23, 0);
  const ComplexVector f = op.sample(random_smooth_function(rng, BCKind::Dirichlet, 1));
  const ComplexVector eig = op.sample(kSine);
  EXPECT_THROW(kato_ponce_check(op, fc, 0.7, e, f, eig), PreconditionError);
  EXPECT_THROW(kato_ponce_check(op, fc, 0.0, e, f, eig), PreconditionError);
  EXPECT_THROW(kato_ponce_check(op, fc, 0.1, {3, 3, 2, 5, 3}, f, eig), SchemaError);
  const KatoPonceResult r = kato_ponce_check(op, fc, 0.3, e, f, eig);
  EXPECT_TRUE(std::isfinite(r.ratio));
  const KatoPonceResult tiny = kato_ponce_check(op, fc, 1e-6, e, f, eig);
  EXPECT_LT(tiny.ratio, 1.0 + 1e-3);
  EXPECT_NEAR(tiny.ratio, tiny.holder_ratio, 1e-3);
}

TEST(Calderon, CurvesAndLimits) {
  const GridDomain g = GridDomain::interval(64);
  const DiscreteOperator op = assemble_operator(identity_field(g), g, BoundaryCondition::dirichlet());
  const FunctionalCalculus fc(op);
  const ComplexVector f = op.sample(kSine);
  for (int alpha : {1, 2, 3}) {
    const CalderonCurves c = calderon_check(op, fc, alpha, f);
    EXPECT_TRUE(c.gap_monotone);
    EXPECT_TRUE(c.tail_monotone);
    EXPECT_LT(c.extrapolated_gap, 1e-6);
    EXPECT_LT(c.tail.back(), 1e-6);
  }
  const ComplexVector a = fc.apply(fn::phi(1, 0.05), f), b = fc.apply(fn::exp_decay(0.05), f);
  EXPECT_LT((a - b).norm(), 1e-12);
}

TEST(SquareFunction, TrivialAndConical) {
  const GridDomain g = GridDomain::interval(96);
  const DiscreteOperator op = assemble_operator(identity_field(g), g, BoundaryCondition::neumann());
  const TimeGrid tg = geometric_time_grid(g.h, 4.0);
  const SquareFunctionResult z = modified_square_function(op, ComplexVector::Zero(op.size()), 4, tg);
  EXPECT_EQ(z.norm_G, 0.0);
  EXPECT_THROW(modified_square_function(op, ComplexVector::Zero(op.size()), 1.5, tg), PreconditionError);

  // bump in the middle of a Neumann interval
  const ComplexVector f = op.sample([](double x, double) {
    const double s = (x - 0.5) / 0.1;
    return Complex(std::exp(-s * s));
  });
  const SquareFunctionResult G = modified_square_function(op, f, 4, tg);
  const RealVector C = conical_functional(evolve(op, f, tg));
  const double K = std::exp(0.125) * std::pow(4 * M_PI, 0.25);
  for (int i = 0; i < g.num_nodes(); ++i) EXPECT_LE(C(i), K * G.G(i) + 1e-12) << i;
}

TEST(EnergyFlow, ZeroAndMonotone) {
  const GridDomain g = GridDomain::interval(64);
  const HolderTriple t(4, 4, 2);
  const ComplexMatrix a = ComplexMatrix::Constant(1, 1, std::polar(1.0, 0.3));
  const ComplexMatrix b = ComplexMatrix::Constant(1, 1, std::polar(0.8, -0.2));
  const ComplexMatrix c = ComplexMatrix::Constant(1, 1, Complex(1.0));
  SelectOptions so;
  so.samples_per_domain = 400;
  const BellmanParams bp = select_params({{a, b, c}}, t, so).params;
  const auto bc = BoundaryCondition::dirichlet();
  const DiscreteOperator A = assemble_operator(MatrixField::constant(g, a), g, bc);
  const DiscreteOperator B = assemble_operator(MatrixField::constant(g, b), g, bc);
  const DiscreteOperator C = assemble_operator(MatrixField::constant(g, c), g, bc);
  const TimeGrid tg = geometric_time_grid(g.h, 10.0);
  const ComplexVector zero = ComplexVector::Zero(A.size());
  const EnergyFlowReport z = energy_flow(bp, evolve(A, zero, tg), evolve(B, zero, tg), evolve(C, zero, tg));
  for (double e : z.energy) EXPECT_EQ(e, 0.0);

  Rng rng = make_stream(29, 0);
  for (int draw = 0; draw < 3; ++draw) {
    const auto ta = evolve(A, A.sample(random_smooth_function(rng, BCKind::Dirichlet, 1)), tg);
    const auto tb = evolve(B, B.sample(random_smooth_function(rng, BCKind::Dirichlet, 1)), tg);
    const auto tc = evolve(C, C.sample(random_smooth_function(rng, BCKind::Dirichlet, 1)), tg);
    const EnergyFlowReport r = energy_flow(bp, ta, tb, tc);
    EXPECT_GE(r.bound_margin, -1e-12);
    EXPECT_LE(r.max_increase, 1e-8);
    EXPECT_GT(r.c_empirical, 0.0);
  }
}
