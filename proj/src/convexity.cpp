#include "pelliptic/convexity.hpp"

#include <algorithm>
#include <mutex>

#include "pelliptic/power_functions.hpp"

namespace pell {

std::vector<CoefficientTriple> coefficient_triples(const MatrixField& A, const MatrixField& B,
                                                  const MatrixField& C) {
  if (A.cells.size() != B.cells.size() || A.cells.size() != C.cells.size() ||
      A.grid_id != B.grid_id || A.grid_id != C.grid_id)
    throw SchemaError("coefficient fields live on different grids");
  std::vector<CoefficientTriple> out;
  for (std::size_t i = 0; i < A.cells.size(); ++i) {
    if (A.cells[i].size() == 0) continue;
    CoefficientTriple t = {A.cells[i], B.cells[i], C.cells[i]};
    const bool seen = std::any_of(out.begin(), out.end(), [&](const CoefficientTriple& o) {
      return o[0] == t[0] && o[1] == t[1] && o[2] == t[2];
    });
    if (!seen) out.push_back(t);
  }
  return out;
}

namespace {

double sample_log_level(Rng& g, const std::array<double, 3>& current, int filled) {
  if (filled > 0 && uniform(g) < 0.3) {
    // near a face: relative gap between 1e-7 and 1e-1
    const double base = current[static_cast<int>(uniform(g) * filled) % filled];
    const double gap = std::exp(uniform(g, std::log(1e-7), std::log(1e-1)));
    return base + (uniform(g) < 0.5 ? gap : -gap);
  }
  return uniform(g, -12.0, 0.0);
}

}  // namespace

ComplexTriple sample_domain_point(Rng& g, const BellmanParams& bp, DomainLabel target) {
  const std::array<double, 3> s = {bp.triple.p, bp.triple.q, bp.triple.r};
  for (int attempt = 0; attempt < 100000; ++attempt) {
    std::array<double, 3> lv{};
    for (int j = 0; j < 3; ++j) lv[j] = sample_log_level(g, lv, j);
    const double top = *std::max_element(lv.begin(), lv.end());
    ComplexTriple z;
    for (int j = 0; j < 3; ++j)
      z[j] = std::polar(std::exp((lv[j] - top) / s[j]), uniform(g, 0.0, 2 * M_PI));
    if (classify(bp, z) == target) return z;
  }
  throw BudgetExhausted("sample_domain_point: target domain not reached", 0.0);
}

ConvexitySample convexity_sample(const BellmanParams& bp, const CoefficientTriple& abc,
                                 const ComplexTriple& z, Rng& g, int directions) {
  const int d = static_cast<int>(abc[0].rows());
  const MatrixTuple A = {abc[0], abc[1], abc[2]};
  const RealMatrix D2 = bellman_hessian(bp, z);
  const RealMatrix S = hessian_form_matrix(D2, A);
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(S);
  if (es.info() != Eigen::Success) throw SolverError("convexity_sample: eigen solver failed");
  const double scale = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
  ConvexitySample out{es.eigenvalues()(0) / scale, kInfinity};
  const double wmod = std::abs(z[2]);
  auto try_direction = [&](const Direction& X) {
    const double prod = wmod * X[0].norm() * X[1].norm();
    double total = 0;
    for (const auto& x : X) total += x.squaredNorm();
    if (prod < 1e-8 * total * std::max(wmod, 1e-300)) return;
    out.ratio = std::min(out.ratio, hessian_form(D2, A, X) / prod);
  };
  try_direction(unstack_direction(es.eigenvectors().col(0), 3, d));
  for (int k = 0; k < directions; ++k) {
    Direction X = random_direction(g, 3, d);
    for (auto& x : X) x *= std::exp(uniform(g, -3.0, 3.0));
    try_direction(X);
  }
  return out;
}

ConvexityReport convexity_check(const BellmanParams& bp, const std::vector<CoefficientTriple>& abc,
                                const std::vector<DomainLabel>& domains, std::int64_t samples,
                                std::uint64_t seed, int directions) {
  if (abc.empty() || domains.empty()) throw SchemaError("convexity_check: nothing to sample");
  ConvexityReport rep;
  rep.domain_min_rel_eig.fill(kInfinity);
  std::vector<ConvexitySample> res(samples);
  parallel_for(samples, [&](std::int64_t i) {
    Rng g = make_stream(seed, 0xC0417E, static_cast<std::uint64_t>(i));
    const DomainLabel dom = domains[i % domains.size()];
    const auto& t = abc[(i / domains.size()) % abc.size()];
    res[i] = convexity_sample(bp, t, sample_domain_point(g, bp, dom), g, directions);
  });
  rep.samples = samples;
  for (std::int64_t i = 0; i < samples; ++i) {
    const int dom = static_cast<int>(domains[i % domains.size()]) - 1;
    rep.min_rel_eig = std::min(rep.min_rel_eig, res[i].rel_min_eig);
    rep.c_empirical = std::min(rep.c_empirical, res[i].ratio);
    rep.domain_min_rel_eig[dom] = std::min(rep.domain_min_rel_eig[dom], res[i].rel_min_eig);
  }
  return rep;
}

namespace {

std::vector<DomainLabel> domain_range(int lo, int hi) {
  std::vector<DomainLabel> out;
  for (int k = lo; k <= hi; ++k) out.push_back(static_cast<DomainLabel>(k));
  return out;
}

}  // namespace

SelectResult select_params(const std::vector<CoefficientTriple>& abc, const HolderTriple& t,
                           const SelectOptions& opt) {
  const bool equal = std::abs(t.p - t.q) <= 1e-12 * std::max(t.p, t.q);
  const int ndom = equal ? 4 : 6;
  const std::int64_t per = opt.samples_per_domain;
  double best = -kInfinity;
  auto passes = [&](const BellmanParams& bp, const std::vector<DomainLabel>& doms,
                    std::uint64_t salt) {
    const ConvexityReport r =
        convexity_check(bp, abc, doms, per * static_cast<std::int64_t>(doms.size()),
                        opt.seed ^ salt, 2);
    best = std::max(best, r.min_rel_eig);
    return r.pass(opt.eig_tol);
  };

  SelectResult out;
  double D = 1.0;
  if (!equal) {
    D = std::max(D, 2 * BellmanParams::D_floor(t));
    const double E_big = 65536.0;
    while (!passes(BellmanParams::make(t, D, std::max(E_big, 2 * BellmanParams::E_floor(t, D))),
                   domain_range(4, 6), 0x11)) {
      if (++out.D_doublings > opt.max_doublings)
        throw BudgetExhausted("select_params: D search exhausted", best);
      D *= 2;
    }
  }
  double E = 2 * BellmanParams::E_floor(t, D);
  const auto all = domain_range(1, ndom);
  for (;;) {
    const BellmanParams bp = BellmanParams::make(t, D, E);
    if (passes(bp, all, 0x22 + out.E_doublings)) {
      // confirm on a fresh stream before accepting
      const ConvexityReport ver =
          convexity_check(bp, abc, all, per * ndom, opt.seed ^ 0x5EED, 4);
      best = std::max(best, ver.min_rel_eig);
      if (ver.pass(opt.eig_tol)) {
        out.params = bp;
        out.verification = ver;
        return out;
      }
    }
    if (++out.E_doublings > opt.max_doublings)
      throw BudgetExhausted("select_params: E search exhausted", best);
    E *= 2;
  }
}

SelectResult select_params(const MatrixField& A, const MatrixField& B, const MatrixField& C,
                           const HolderTriple& t, const SelectOptions& opt) {
  const StarReport star = star_conditions(A, B, C, t);
  if (!star.pass) throw PreconditionError("select_params: (star) conditions fail");
  return select_params(coefficient_triples(A, B, C), t, opt);
}

double power_convexity_search(const ComplexMatrix& A, double p, std::int64_t samples,
                              std::uint64_t seed) {
  const int d = static_cast<int>(A.rows());
  Rng g = make_stream(seed, 0xF0);
  double worst = kInfinity;
  for (std::int64_t i = 0; i < samples; ++i) {
    const Complex w = std::polar(1.0, uniform(g, 0.0, 2 * M_PI));
    const ComplexVector X = complex_normal_vector(g, d);
    const double h = hessian_form(RealMatrix(power_hessian_1d(w, p)), {A}, {X});
    worst = std::min(worst, h / X.squaredNorm());
  }
  return worst;
}

}  // namespace pell
