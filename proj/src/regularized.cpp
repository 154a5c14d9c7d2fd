#include "pelliptic/regularized.hpp"

#include <algorithm>

#include "pelliptic/power_functions.hpp"

namespace pell {

namespace {

MatrixTuple tuple_of(const CoefficientTriple& abc) { return {abc[0], abc[1], abc[2]}; }

std::array<double, 3> exponents(const BellmanParams& bp) {
  return {bp.triple.p, bp.triple.q, bp.triple.r};
}

// Point with each modulus log-uniform in [lo, hi] and uniform phases.
ComplexTriple spread_point(Rng& g, double lo, double hi) {
  ComplexTriple z;
  for (auto& c : z)
    c = std::polar(std::exp(uniform(g, std::log(lo), std::log(hi))), uniform(g, 0.0, 2 * M_PI));
  return z;
}

double modulus(const ComplexTriple& z) {
  return std::sqrt(std::norm(z[0]) + std::norm(z[1]) + std::norm(z[2]));
}

// |d_{conj z_j} f| from the real gradient
double wirtinger(const Jet<3>& jet, int j) { return 0.5 * jet.grad.segment<2>(2 * j).norm(); }

struct DirectionStats {
  double min_rel_eig;
  double ratio;
};

// lambda_min of the form matrix and min over directions of H / (weight |zeta||eta|)
DirectionStats direction_stats(const Mat6& D2, const CoefficientTriple& abc, double weight, Rng& g,
                               int directions) {
  const int d = static_cast<int>(abc[0].rows());
  const MatrixTuple A = tuple_of(abc);
  const RealMatrix S = hessian_form_matrix(D2, A);
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(S);
  if (es.info() != Eigen::Success) throw SolverError("direction_stats: eigen solver failed");
  const double scale = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
  DirectionStats out{es.eigenvalues()(0) / scale, kInfinity};
  auto try_dir = [&](const Direction& X) {
    double total = 0;
    for (const auto& x : X) total += x.squaredNorm();
    const double prod = X[0].norm() * X[1].norm();
    if (prod < 1e-8 * total) return;
    out.ratio = std::min(out.ratio, hessian_form(RealMatrix(D2), A, X) / (weight * prod));
  };
  try_dir(unstack_direction(es.eigenvectors().col(0), 3, d));
  for (int k = 0; k < directions; ++k) {
    Direction X = random_direction(g, 3, d);
    for (auto& x : X) x *= std::exp(uniform(g, -3.0, 3.0));
    try_dir(X);
  }
  return out;
}

}  // namespace

VoltarenConstants voltaren_constants(const BellmanParams& bp, const CoefficientTriple& abc,
                                     std::int64_t samples, std::uint64_t seed) {
  VoltarenConstants k;
  std::vector<DomainLabel> doms;
  for (int j = 1; j <= domain_count(bp); ++j) doms.push_back(static_cast<DomainLabel>(j));
  std::vector<std::array<double, 3>> ratios(samples);
  parallel_for(samples, [&](std::int64_t i) {
    Rng g = make_stream(seed, hash_string("voltaren-grad"), static_cast<std::uint64_t>(i));
    ratios[i] = bound_checks(bp, sample_domain_point(g, bp, doms[i % doms.size()])).gradient_ratio;
  });
  for (const auto& r : ratios)
    for (int j = 0; j < 3; ++j) k.gradient[j] = std::max(k.gradient[j], r[j]);
  k.convexity = convexity_check(bp, {abc}, doms, samples, seed ^ 0xABCD).c_empirical;
  return k;
}

NaklofenReport naklofen_check(const BellmanParams& bp, const CoefficientTriple& abc,
                              const VoltarenConstants& k, const Mollifier<3>& mol, double nu,
                              std::int64_t samples, std::uint64_t seed, int order) {
  const BellmanEvaluator X(bp);
  const auto s = exponents(bp);
  // majorant coefficients; the D coefficient sits on the smaller of p, q
  const double Dc = bp.variant == BellmanVariant::PEqualQ ? 1.0 : bp.D;
  const double cf[3] = {(bp.swapped() ? Dc : 1.0) / s[0], (bp.swapped() ? 1.0 : Dc) / s[1],
                        bp.E / s[2]};
  struct Row {
    double a_margin, a_ratio;
    std::array<double, 3> b;
    double c_ratio, c_eig, err;
  };
  std::vector<Row> rows(samples);
  parallel_for(samples, [&](std::int64_t i) {
    Rng g = make_stream(seed, hash_string("naklofen"), static_cast<std::uint64_t>(i));
    ComplexTriple z = spread_point(g, nu / 8, 8.0);
    Row row{};
    const Jet<3> j = mol.convolve(X, z, nu, 2, order);
    double maj = 0, sum = 0, mx = 0;
    for (int a = 0; a < 3; ++a) {
      const double t = std::pow(std::abs(z[a]) + nu, s[a]);
      maj += cf[a] * t;
      sum += t;
      mx = std::max(mx, t);
    }
    row.a_margin = (maj - j.value) / maj;
    row.a_ratio = j.value / sum;
    for (int a = 0; a < 2; ++a) row.b[a] = wirtinger(j, a) / std::pow(mx, 1 - 1 / s[a]);
    row.b[2] = wirtinger(j, 2) / std::pow(std::abs(z[2]) + nu, s[2] - 1);
    // (c') on points with |w| >= 2 nu
    const double wmod = std::exp(uniform(g, std::log(2 * nu), std::log(8.0)));
    z[2] *= wmod / std::abs(z[2]);
    const Jet<3> jc = mol.convolve(X, z, nu, 2, order);
    const DirectionStats ds = direction_stats(jc.hess, abc, wmod - nu, g, 4);
    row.c_ratio = ds.ratio;
    row.c_eig = ds.min_rel_eig;
    if (i % 16 == 0) row.err = Mollifier<3>::jet_gap(mol.convolve(X, z, nu, 2, order - 1), jc, 2);
    rows[i] = row;
  });
  NaklofenReport rep;
  rep.nu = nu;
  rep.samples = samples;
  for (const auto& r : rows) {
    rep.a_margin = std::min(rep.a_margin, r.a_margin);
    rep.a_constant = std::max(rep.a_constant, r.a_ratio);
    for (int a = 0; a < 3; ++a) rep.b_constant[a] = std::max(rep.b_constant[a], r.b[a]);
    rep.c_constant = std::min(rep.c_constant, r.c_ratio);
    rep.c_min_rel_eig = std::min(rep.c_min_rel_eig, r.c_eig);
    rep.quad_error = std::max(rep.quad_error, r.err);
  }
  for (int a = 0; a < 3; ++a) {
    const double lim = 1.05 * k.gradient[a];
    rep.b_margin = std::min(rep.b_margin, (lim - rep.b_constant[a]) / lim);
  }
  const double c_lim = k.convexity / 1.05;
  rep.c_margin = (rep.c_constant - c_lim) / c_lim;
  return rep;
}

IzumrudReport izumrud_check(const BellmanParams& bp, const Mollifier<3>& mol, double nu,
                            std::int64_t samples, std::uint64_t seed, int order) {
  const BellmanEvaluator X(bp);
  const auto s = exponents(bp);
  const double m = bp.triple.m(), M = bp.triple.M();
  std::vector<std::array<double, 4>> rows(samples);
  parallel_for(samples, [&](std::int64_t i) {
    Rng g = make_stream(seed, hash_string("izumrud"), static_cast<std::uint64_t>(i));
    const ComplexTriple z = spread_point(g, nu / 8, 8.0);
    const Jet<3> j = mol.convolve(X, z, nu, 2, order);
    const double w = modulus(z);
    double lv = 1;
    for (int a = 0; a < 3; ++a) lv += std::pow(std::abs(z[a]), s[a]);
    std::array<double, 4> row{};
    row[0] = std::abs(j.value) / lv;
    row[1] = j.grad.norm() / (std::pow(w, m - 1) + std::pow(w, M - 1));
    row[2] = j.hess.norm() / (std::pow(nu, m - 2) * (std::pow(w, M - 2) + w + 1));
    if (i % 16 == 0) row[3] = Mollifier<3>::jet_gap(mol.convolve(X, z, nu, 2, order - 1), j, 2);
    rows[i] = row;
  });
  IzumrudReport rep;
  rep.nu = nu;
  rep.samples = samples;
  for (const auto& r : rows) {
    for (int a = 0; a < 3; ++a) rep.constants[a] = std::max(rep.constants[a], r[a]);
    rep.quad_error = std::max(rep.quad_error, r[3]);
  }
  rep.origin_gradient = mol.convolve(X, ComplexTriple{}, nu, 1, order).grad.norm();
  return rep;
}

double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi / *lo;
}

Xnnu::Xnnu(const BellmanParams& bp, const CoefficientTriple& abc, double n, double nu, double eps,
           double C, const Mollifier<3>& mol, int order)
    : X_(bp), n_(n), nu_(nu), C_(C), mol_(mol), order_(order) {
  const double M = bp.triple.M();
  const MatrixTuple A = tuple_of(abc);
  if (!(delta_of(A, M + eps) > 0))
    throw PreconditionError("Xnnu: the triple is not (M + eps)-elliptic");
  const PsResult ps = build_Ps(M + eps, A, 4000, 1);
  pf_ = PerturbationFamily{M, n, eps, ps.c, 3};
  scale_ = std::pow(nu, bp.triple.m() - 2);
}

Jet<3> Xnnu::mollified_bellman(const ComplexTriple& z) const {
  return mol_.convolve(X_, z, nu_, 2, order_);
}

Jet<3> Xnnu::main_part(const ComplexTriple& z) const {
  const Jet<3> cut = cutoff_jet<3>(z, n_);
  if (cut.value == 0 && cut.grad.isZero()) return Jet<3>{};
  return jet_product(cut, mollified_bellman(z));
}

Jet<3> Xnnu::perturbation_part(const ComplexTriple& z) const {
  const PerturbationFamily pf = pf_;
  Jet<3> j = mol_.convolve(
      [&pf](const ComplexTriple& x, int o) { return perturbation_jet<3>(pf, x, o); }, z, nu_, 2,
      order_);
  j *= scale_;
  return j;
}

Jet<3> Xnnu::operator()(const ComplexTriple& z) const {
  Jet<3> j = perturbation_part(z);
  j *= C_;
  j += main_part(z);
  return j;
}

JugoplastikaReport jugoplastika_check(const BellmanParams& bp, const CoefficientTriple& abc,
                                      double n, double nu, double eps, const Mollifier<3>& mol,
                                      std::int64_t samples, std::uint64_t seed, double C0,
                                      int max_doublings) {
  Xnnu xn(bp, abc, n, nu, eps, 1.0, mol);
  const MatrixTuple A = tuple_of(abc);
  JugoplastikaReport rep;
  rep.n = n;
  rep.nu = nu;
  rep.samples = samples;
  std::vector<RealMatrix> S1(samples), S2(samples);
  std::vector<double> Cmin(samples), err(samples, 0.0);
  parallel_for(samples, [&](std::int64_t i) {
    Rng g = make_stream(seed, hash_string("shell"), static_cast<std::uint64_t>(i));
    ComplexTriple z;
    for (auto& c : z) c = complex_normal(g) * std::exp(uniform(g, -3.0, 0.0));
    const double rho = uniform(g, 3 * n, 4 * n);
    const double mod = modulus(z);
    for (auto& c : z) c *= rho / mod;
    S1[i] = hessian_form_matrix(xn.main_part(z).hess, A);
    S2[i] = hessian_form_matrix(xn.perturbation_part(z).hess, A);
    Eigen::LLT<RealMatrix> llt(S2[i]);
    if (llt.info() != Eigen::Success) {
      Cmin[i] = kInfinity;
      return;
    }
    const RealMatrix Linv = llt.matrixL().solve(RealMatrix::Identity(S2[i].rows(), S2[i].cols()));
    const RealMatrix T = -Linv * S1[i] * Linv.transpose();
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (T + T.transpose()));
    Cmin[i] = std::max(0.0, es.eigenvalues().maxCoeff());
    if (i % 64 == 0) {
      const Jet<3> hi = mol.convolve(BellmanEvaluator(bp), z, nu, 2, 3);
      err[i] = Mollifier<3>::jet_gap(xn.mollified_bellman(z), hi, 2);
    }
  });
  rep.C_required = *std::max_element(Cmin.begin(), Cmin.end());
  rep.quad_error = *std::max_element(err.begin(), err.end());
  double C = C0;
  while (C < rep.C_required) {
    if (++rep.doublings > max_doublings) {
      rep.C_accepted = C;
      break;
    }
    C *= 2;
  }
  rep.C_accepted = C;
  for (std::int64_t i = 0; i < samples; ++i) {
    const RealMatrix S = S1[i] + C * S2[i];
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(S);
    const double sc = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
    rep.min_rel_eig = std::min(rep.min_rel_eig, es.eigenvalues()(0) / sc);
  }
  // plateau and evenness
  xn.set_C(C);
  Rng g = make_stream(seed, hash_string("plateau"));
  for (int k = 0; k < 8; ++k) {
    ComplexTriple z = spread_point(g, 0.05, 1.0);
    const double mod = modulus(z);
    for (auto& c : z) c *= uniform(g, 0.1, 1.0) * n / mod;
    const Jet<3> full = xn(z);
    Jet<3> parts = xn.perturbation_part(z);
    parts *= C;
    parts += xn.mollified_bellman(z);
    rep.plateau_gap = std::max(rep.plateau_gap,
                               std::abs(full.value - parts.value) / (1 + std::abs(parts.value)));
    for (int j = 0; j < 3; ++j) {
      ComplexTriple zz = z;
      zz[j] = 0;
      const Jet<3> e = xn(zz);
      rep.evenness = std::max(rep.evenness, wirtinger(e, j) / (1 + e.grad.norm()));
    }
  }
  return rep;
}

}  // namespace pell
