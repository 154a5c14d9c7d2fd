#include "pelliptic/suite.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <set>

#include "pelliptic/applications.hpp"
#include "pelliptic/convexity.hpp"
#include "pelliptic/perturbation.hpp"
#include "pelliptic/power_functions.hpp"
#include "pelliptic/regularized.hpp"

namespace pell {

bool CriterionOutcome::pass() const {
  if (rows.empty()) return false;
  return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; });
}

std::string criterion_title(int id) {
  static const char* titles[kCriteria] = {
      "delta exactness",         "delta symmetry and monotonicity",
      "bellman consistency",     "generalized convexity",
      "power-function bounds",   "perturbation family",
      "mollifier",               "semigroup accuracy",
      "embedding experiments",   "applications"};
  if (id < 1 || id > kCriteria) throw SchemaError("unknown criterion " + std::to_string(id));
  return titles[id - 1];
}

std::string digest_of(const std::string& text) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, hash_string(text));
  return buf;
}

void write_csv_header(std::ostream& os) {
  os << "experiment_id,metric,value,bound,margin,tolerance,pass,h,n_t,seed,provenance\n";
}

void write_csv_row(std::ostream& os, const ReportRow& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%s,%s,%.17g,%.17g,%.17g,%.3g,%d,%.17g,%d,%" PRIu64 ",%s\n",
                r.experiment_id.c_str(), r.metric.c_str(), r.value, r.bound, r.margin,
                r.tolerance, r.pass ? 1 : 0, r.h, r.n_t, r.seed, r.provenance.c_str());
  os << buf;
}

namespace {

class Rows {
 public:
  Rows(CriterionOutcome& out, const SuiteConfig& cfg) : out_(out), cfg_(cfg) {}

  // value <= bound + tol
  ReportRow& upper(const std::string& id, const std::string& metric, double value, double bound,
                   double tol = 0) {
    return add(id, metric, value, bound, bound - value, tol);
  }
  // value >= bound - tol
  ReportRow& lower(const std::string& id, const std::string& metric, double value, double bound,
                   double tol = 0) {
    return add(id, metric, value, bound, value - bound, tol);
  }
  ReportRow& flag(const std::string& id, const std::string& metric, bool ok) {
    return add(id, metric, ok ? 1 : 0, 1, ok ? 0 : -1, 0);
  }
  ReportRow& finite(const std::string& id, const std::string& metric, double value) {
    ReportRow& r = add(id, metric, value, kInfinity, kInfinity, 0);
    r.pass = std::isfinite(value);
    return r;
  }

 private:
  ReportRow& add(const std::string& id, const std::string& metric, double value, double bound,
                 double margin, double tol) {
    ReportRow r;
    r.experiment_id = "c" + std::to_string(out_.id) + "-" + id;
    r.metric = metric;
    r.value = value;
    r.bound = bound;
    r.margin = margin;
    r.tolerance = tol;
    r.pass = std::isfinite(value) && margin >= -tol;
    r.seed = cfg_.seed;
    r.provenance = cfg_.digest;
    out_.rows.push_back(r);
    return out_.rows.back();
  }
  CriterionOutcome& out_;
  const SuiteConfig& cfg_;
};

Rng stream(const SuiteConfig& cfg, int crit, int sub, std::uint64_t k = 0) {
  return make_stream(cfg.seed, static_cast<std::uint64_t>(crit) * 100 + sub, k);
}

double max_of(const std::vector<double>& v) {
  double m = -kInfinity;
  for (double x : v) m = std::max(m, x);
  return m;
}

double min_of(const std::vector<double>& v) {
  double m = kInfinity;
  for (double x : v) m = std::min(m, x);
  return m;
}

double relative_change(double coarse, double fine) {
  return std::abs(fine - coarse) / std::max(std::abs(fine), 1e-300);
}

// ---- criterion 1 ----

void delta_exactness(const SuiteConfig& cfg, Rows& rows) {
  constexpr int kMatrices = 200;
  std::vector<double> gap(kMatrices);
  parallel_for(kMatrices, [&](std::int64_t k) {
    Rng g = stream(cfg, 1, 0, k);
    const int d = 1 + static_cast<int>(k % 3);
    const ComplexMatrix a = random_complex_matrix(g, d);
    const double p = uniform(g, 1.1, 12.0);
    gap[k] = std::abs(delta_p_exact(a, p).value - delta_p_bruteforce(a, p, 100000, g()));
  });
  rows.upper("bruteforce", "max-abs-gap", max_of(gap), 1e-3);

  double closed = 0;
  for (double p : {1.1, 1.5, 2.0, 3.0, 4.0, 8.0, 20.0, 100.0})
    for (int i = 0; i <= 64; ++i) {
      const double phi = -M_PI + 2 * M_PI * i / 64;
      const ComplexMatrix a = ComplexMatrix::Constant(1, 1, std::polar(1.0, phi));
      closed = std::max(closed, std::abs(delta_p_exact(a, p).value -
                                         (std::cos(phi) - std::abs(1 - 2 / p))));
    }
  rows.upper("closed-form", "max-abs-gap", closed, 1e-10);

  for (double r : {2.0, 3.0, 10.0}) {
    double e = 0;
    for (int d = 1; d <= 3; ++d)
      e = std::max(e, std::abs(r * delta_p_exact(ComplexMatrix::Identity(d, d), r).value - 2));
    char id[32];
    std::snprintf(id, sizeof id, "identity-r%g", r);
    rows.upper(id, "abs-gap-r-delta-to-2", e, 1e-10);
  }
}

// ---- criterion 2 ----

void delta_symmetry(const SuiteConfig& cfg, Rows& rows) {
  constexpr int kMatrices = 100, kGrid = 160;
  std::vector<double> sym(kMatrices), mono(kMatrices);
  for (int k = 0; k < kMatrices; ++k) {
    Rng g = stream(cfg, 2, 0, k);
    const int d = 1 + k % 3;
    const ComplexMatrix a = k % 2 ? random_complex_matrix(g, d) : random_accretive(g, d, 0.8);
    double prev = kInfinity;
    for (int i = 0; i <= kGrid; ++i) {
      const double p = 2 * std::pow(32.0, static_cast<double>(i) / kGrid);
      const double dp = delta_p_exact(a, p).value;
      sym[k] = std::max(sym[k], std::abs(dp - delta_p_exact(a, conjugate_exponent(p)).value));
      mono[k] = std::max(mono[k], dp - prev);
      prev = dp;
    }
  }
  rows.upper("conjugate", "max-abs-gap", max_of(sym), 1e-10);
  rows.upper("monotone-2-64", "max-increase", max_of(mono), 0, 1e-12);
}

// ---- criterion 3 ----

std::vector<BellmanParams> bellman_cases() {
  auto make = [](double p, double q, double D, double E) {
    return BellmanParams::make(HolderTriple::from_pq(p, q), D, E);
  };
  return {make(6, 3, 2, 4), make(4, 4, 0, 2), make(3, 6, 2, 4), make(10, 2.5, 3, 5),
          make(12, 2.2, 3, 6), make(3, 8, 3, 5)};
}

ComplexTriple random_triple(Rng& g) {
  ComplexTriple z;
  for (auto& c : z) c = complex_normal(g) * std::exp(uniform(g, -1.5, 1.5));
  return z;
}

struct InterfaceStats {
  double gap_at = 0;       // exact one-sided gradients at the located interface point
  double fd_mismatch = 0;  // one-sided difference quotients, in units of h times the curvature
  int points = 0;
  std::set<std::pair<int, int>> pairs;
};

InterfaceStats interface_stats(const BellmanParams& bp, Rng& g, int reps, double h) {
  InterfaceStats st;
  const int nd = domain_count(bp);
  for (int i = 1; i <= nd; ++i)
    for (int j = i + 1; j <= nd; ++j)
      for (int rep = 0; rep < reps; ++rep) {
        const ComplexTriple za = sample_domain_point(g, bp, DomainLabel(i));
        const ComplexTriple zb = sample_domain_point(g, bp, DomainLabel(j));
        auto at = [&](double s) {
          ComplexTriple z;
          for (int k = 0; k < 3; ++k) z[k] = (1 - s) * za[k] + s * zb[k];
          return z;
        };
        const DomainLabel la = closed_domain(bp, za);
        if (la == closed_domain(bp, zb)) continue;
        double s0 = 0, s1 = 1;
        for (int it = 0; it < 64; ++it) {
          const double m = 0.5 * (s0 + s1);
          (closed_domain(bp, at(m)) == la ? s0 : s1) = m;
        }
        const DomainLabel lo = closed_domain(bp, at(s0)), hi = closed_domain(bp, at(s1));
        const ComplexTriple z = at(0.5 * (s0 + s1));
        // coordinate zeros belong to the other part of Upsilon
        if (std::min({std::abs(z[0]), std::abs(z[1]), std::abs(z[2])}) < 1e-3) continue;
        double len = 0;
        for (int k = 0; k < 3; ++k) len += std::norm(zb[k] - za[k]);
        len = std::sqrt(len);
        ComplexTriple zp, zm;
        for (int k = 0; k < 3; ++k) {
          const Complex e = (zb[k] - za[k]) / len;
          zp[k] = z[k] + h * e;
          zm[k] = z[k] - h * e;
        }
        const Jet<3> jl = formula_jet(bp, lo, z, 2), jh = formula_jet(bp, hi, z, 2);
        st.gap_at = std::max(st.gap_at, (jl.grad - jh.grad).norm() / std::max(1.0, jl.grad.norm()));
        const double X0 = bellman_value(bp, z);
        const double dplus = (bellman_value(bp, zp) - X0) / h;
        const double dminus = (X0 - bellman_value(bp, zm)) / h;
        const double curv = std::max({1.0, jl.hess.norm(), jh.hess.norm()});
        st.fd_mismatch = std::max(st.fd_mismatch, std::abs(dplus - dminus) / (h * curv));
        st.pairs.insert({static_cast<int>(lo), static_cast<int>(hi)});
        ++st.points;
      }
  return st;
}

Vec6 fd_gradient(const BellmanParams& bp, DomainLabel d, const ComplexTriple& z, double h) {
  Vec6 gr;
  for (int k = 0; k < 6; ++k) {
    ComplexTriple a = z, b = z;
    const Complex e = (k % 2 == 0) ? Complex(h, 0) : Complex(0, h);
    a[k / 2] += e;
    b[k / 2] -= e;
    gr(k) = (formula_jet(bp, d, a, 0).value - formula_jet(bp, d, b, 0).value) / (2 * h);
  }
  return gr;
}

void bellman_consistency(const SuiteConfig& cfg, Rows& rows) {
  const std::vector<BellmanParams> cases = bellman_cases();
  const int nc = static_cast<int>(cases.size());

  constexpr int kHomog = 10000;
  std::vector<double> homog(kHomog);
  parallel_for(kHomog, [&](std::int64_t i) {
    Rng g = stream(cfg, 3, 0, i);
    const BellmanParams& bp = cases[i % nc];
    const ComplexTriple z = random_triple(g);
    const double t = std::exp(uniform(g, std::log(0.05), std::log(20.0)));
    const ComplexTriple zt = {std::pow(t, 1 / bp.triple.p) * z[0], std::pow(t, 1 / bp.triple.q) * z[1],
                              std::pow(t, 1 / bp.triple.r) * z[2]};
    const double X = bellman_value(bp, z);
    homog[i] = std::abs(bellman_value(bp, zt) - t * X) / (1 + t * X);
  });
  rows.upper("homogeneity", "max-rel-gap", max_of(homog), 1e-10);

  const double h = 1e-5;
  double gap_at = 0, fd = 0;
  int points = 0, pairs = 0;
  for (int c = 0; c < nc; ++c) {
    Rng g = stream(cfg, 3, 1, c);
    const InterfaceStats st = interface_stats(cases[c], g, 60, h);
    gap_at = std::max(gap_at, st.gap_at);
    fd = std::max(fd, st.fd_mismatch);
    points += st.points;
    pairs += static_cast<int>(st.pairs.size());
  }
  rows.upper("c1-interface", "max-one-sided-gradient-gap", gap_at, 10 * h).h = h;
  rows.upper("c1-interface", "max-one-sided-difference-mismatch-per-h", fd, 10).h = h;
  rows.lower("c1-interface", "interface-points", points, 1000);
  rows.lower("c1-interface", "adjacent-domain-pairs", pairs, 6);

  constexpr int kGrad = 10000;
  std::vector<double> grad(kGrad, 0.0);
  parallel_for(kGrad, [&](std::int64_t i) {
    Rng g = stream(cfg, 3, 2, i);
    const BellmanParams& bp = cases[i % nc];
    const ComplexTriple z = random_triple(g);
    const DomainLabel d = classify(bp, z, 1e-3);
    if (d == DomainLabel::OnUpsilon) return;
    const Vec6 exact = formula_jet(bp, d, z, 1).grad;
    grad[i] = (exact - fd_gradient(bp, d, z, 1e-6)).norm() / std::max(1.0, exact.norm());
  });
  rows.upper("gradient-fd", "max-rel-error", max_of(grad), 1e-6);

  constexpr int kUpper = 100000;
  std::vector<double> upper(kUpper);
  parallel_for(kUpper, [&](std::int64_t i) {
    Rng g = stream(cfg, 3, 3, i);
    const BellmanParams& bp = cases[i % nc];
    const ComplexTriple z = random_triple(g);
    upper[i] = bound_checks(bp, z).upper_margin / (1 + bellman_majorant(bp, z));
  });
  rows.upper("upper-bound", "max-rel-excess", max_of(upper), 0, 1e-12);
}

// ---- criterion 4 ----

HolderTriple pick_triple(Rng& g) {
  static const double pq[][2] = {{4, 4}, {3, 3}, {6, 3}, {3, 6}, {2.5, 5}, {5, 2.5}, {8, 4}};
  const auto& e = pq[std::uniform_int_distribution<int>(0, 6)(g)];
  return HolderTriple::from_pq(e[0], e[1]);
}

std::vector<double> all_exponents(const HolderTriple& t) { return {2.0, t.p, t.q, t.r}; }

void generalized_convexity(const SuiteConfig& cfg, Rows& rows) {
  constexpr int kTriples = 20;
  double worst_eig = kInfinity, worst_c = kInfinity;
  for (int k = 0; k < kTriples; ++k) {
    Rng g = stream(cfg, 4, 0, k);
    const int d = 1 + k % 2;
    HolderTriple t;
    CoefficientTriple abc;
    for (int attempt = 0;; ++attempt) {
      if (attempt == 1000) throw BudgetExhausted("no star-passing triple drawn", 0);
      t = pick_triple(g);
      for (auto& m : abc) m = random_elliptic(g, d, all_exponents(t), 0.05);
      if (star_conditions(abc[0], abc[1], abc[2], t).pass) break;
    }
    SelectOptions so;
    so.seed = g();
    const SelectResult sel = select_params({abc}, t, so);
    std::vector<DomainLabel> doms;
    for (int j = 1; j <= domain_count(sel.params); ++j) doms.push_back(DomainLabel(j));
    const ConvexityReport rep = convexity_check(sel.params, {abc}, doms, 100000, g());
    worst_eig = std::min(worst_eig, rep.min_rel_eig);
    worst_c = std::min(worst_c, rep.c_empirical);
  }
  rows.lower("star-triples", "min-rel-eigenvalue", worst_eig, 0, 1e-12);
  rows.lower("star-triples", "min-c-empirical", worst_c, 0).pass = worst_c > 0;

  constexpr int kNegative = 10;
  double least_negative = -kInfinity;
  for (int k = 0; k < kNegative; ++k) {
    Rng g = stream(cfg, 4, 1, k);
    ComplexMatrix a;
    double p = 2;
    for (int attempt = 0;; ++attempt) {
      if (attempt == 10000) throw BudgetExhausted("no matrix with Delta_p <= -0.1 drawn", 0);
      p = uniform(g, 1.3, 8.0);
      a = random_complex_matrix(g, 1 + k % 2);
      if (delta_p_exact(a, p).value <= -0.1) break;
    }
    least_negative = std::max(least_negative, power_convexity_search(a, p, 100000, g()));
  }
  ReportRow& r = rows.upper("non-elliptic", "max-of-most-negative-form", least_negative, 0);
  r.pass = least_negative < 0;
}

// ---- criterion 5 ----

ComplexVector spread_point(Rng& g, int N) {
  ComplexVector w = complex_normal_vector(g, N);
  for (int j = 0; j < N; ++j) w(j) *= std::exp(uniform(g, -2.0, 1.0));
  return w;
}

void power_bounds(const SuiteConfig& cfg, Rows& rows) {
  constexpr int kSamples = 100000;
  std::vector<std::array<double, 4>> m(kSamples);
  parallel_for(kSamples, [&](std::int64_t i) {
    Rng g = stream(cfg, 5, 0, i);
    const int d = 1 + static_cast<int>(i % 3);
    const double p = uniform(g, 1.2, 8.0), s = uniform(g, 1.2, 8.0), t = uniform(g, 1.2, 8.0);
    const MatrixTuple A = {random_accretive(g, d, 0.4), random_accretive(g, d, 0.4),
                           random_accretive(g, d, 0.4)};
    const ComplexVector u = spread_point(g, 3);
    const Direction X = random_direction(g, 3, d);
    m[i] = {vinjerac(A[0], p, u(0), X[0]).margin,
            metajna(A[0], A[1], p, s, u.head(2), {X[0], X[1]}).margin,
            zhenodraga(A, {p, s, t}, u, X).margin, debeluh(A, std::max(p, 2.0), u, X).margin};
  });
  const char* names[4] = {"vinjerac", "metajna", "zhenodraga", "debeluh"};
  for (int k = 0; k < 4; ++k) {
    double w = kInfinity;
    for (const auto& a : m) w = std::min(w, a[k]);
    rows.lower(names[k], "min-margin", w, 0, 1e-10);
  }

  constexpr int kBatman = 10000;
  std::vector<double> gap(kBatman);
  parallel_for(kBatman, [&](std::int64_t i) {
    Rng g = stream(cfg, 5, 1, i);
    const int N = 1 + static_cast<int>(i % 3), d = 1 + static_cast<int>((i / 3) % 2);
    const double p = uniform(g, 1.2, 10.0);
    MatrixTuple A;
    for (int j = 0; j < N; ++j) A.push_back(random_complex_matrix(g, d));
    const ComplexVector w = unit_complex_vector(g, N);
    const Direction X = random_direction(g, N, d);
    const double h = hessian_form(power_function(p, N), A, w, X) / p;
    gap[i] = std::abs(h - batman_sum(A, p, w, X)) / (1 + std::abs(h));
  });
  rows.upper("batman", "max-rel-gap", max_of(gap), 1e-10);
}

// ---- criterion 6 ----

void perturbation_family(const SuiteConfig& cfg, Rows& rows) {
  for (double s : {3.0, 5.0}) {
    Rng g = stream(cfg, 6, 0, static_cast<std::uint64_t>(s));
    const double eps = 0.1;
    MatrixTuple A;
    for (int j = 0; j < 3; ++j) A.push_back(random_elliptic(g, 1, {2.0, s + eps}, 0.05));
    const PsResult ps = build_Ps(s + eps, A, 20000, g());
    for (double n : {4.0, 16.0, 64.0}) {
      const BuickReport rep = buick_properties_check(s, n, eps, A, ps.c, 10000, g());
      char id[48];
      std::snprintf(id, sizeof id, "buick-s%g-n%g", s, n);
      rows.flag(id, "i-decay", rep.i_decay);
      rows.upper(id, "i-c1-mismatch", rep.c1_mismatch, 1e-6).pass = rep.i_c1;
      rows.lower(id, "ii-convex-margin", rep.min_convex_margin, 0).pass = rep.ii_convex;
      rows.lower(id, "ii-outer-margin", rep.min_outer_margin, 0).pass = rep.ii_outer;
      rows.flag(id, "iii-growth", rep.iii_growth);
      rows.flag(id, "iv-linear", rep.iv_linear);
      rows.finite(id, "v-hessian-sup", rep.hess_sup).pass = rep.v_bounded;
    }
  }

  const Mollifier<3> mol(3);
  const ComplexMatrix I = ComplexMatrix::Identity(1, 1);
  Rng g = stream(cfg, 6, 1);
  const HolderTriple t(4, 4, 2);
  CoefficientTriple abc = {I, I, I};
  BellmanParams bp = BellmanParams::make(t, 0, 4);
  for (int k = 0; k < 2; ++k) {
    if (k == 1) {
      for (auto& m : abc) m = random_elliptic(g, 1, all_exponents(t), 0.1);
      SelectOptions so;
      so.seed = g();
      bp = select_params({abc}, t, so).params;
    }
    const JugoplastikaReport r = jugoplastika_check(bp, abc, 4.0, 0.5, 0.1, mol, 10000, g());
    const std::string id = k == 0 ? "shell-identity" : "shell-random";
    rows.lower(id, "min-rel-eigenvalue", r.min_rel_eig, 0, 1e-12);
    rows.upper(id, "plateau-gap", r.plateau_gap, 1e-12);
    rows.upper(id, "evenness", r.evenness, 1e-9);
    rows.lower(id, "C-accepted-over-required", r.C_accepted, r.C_required);
  }
}

// ---- criterion 7 ----

template <int N>
double bump_mass() {
  const BumpKernel<N> b = BumpKernel<N>::make();
  return BumpKernel<N>::sphere_factor() *
         simpson([&](double t) { return std::pow(t, N - 1) * b.profile(t); }, 0, 1, 200000);
}

void mollifier_checks(const SuiteConfig& cfg, Rows& rows) {
  const Mollifier<3> mol(3);
  double norm_gap = std::max({std::abs(bump_mass<1>() - 1), std::abs(bump_mass<2>() - 1),
                              std::abs(bump_mass<3>() - 1)});
  for (int k = 1; k <= mol.max_order(); ++k) {
    double s = 0;
    for (double w : mol.rule(k).weights) s += w;
    norm_gap = std::max(norm_gap, std::abs(s - 1));
  }
  rows.upper("normalization", "max-abs-mass-gap", norm_gap, 1e-8);

  const ComplexMatrix I = ComplexMatrix::Identity(1, 1);
  Rng g = stream(cfg, 7, 0);
  const HolderTriple t(4, 4, 2);
  CoefficientTriple abc;
  for (auto& m : abc) m = random_elliptic(g, 1, all_exponents(t), 0.1);
  SelectOptions so;
  so.seed = g();
  const BellmanParams bp = select_params({abc}, t, so).params;
  const VoltarenConstants k = voltaren_constants(bp, abc, 20000, g());
  std::vector<double> ca, cb0, cb1, cb2, cc, z0, z1, z2;
  for (double nu : {0.5, 0.1, 0.02}) {
    char id[32];
    std::snprintf(id, sizeof id, "nu%g", nu);
    const NaklofenReport r = naklofen_check(bp, abc, k, mol, nu, 400, g());
    rows.lower(id, "naklofen-a-margin", r.a_margin, 0, 1e-9);
    rows.lower(id, "naklofen-b-margin", r.b_margin, 0);
    rows.lower(id, "naklofen-c-margin", r.c_margin, 0);
    rows.lower(id, "naklofen-c-min-rel-eigenvalue", r.c_min_rel_eig, 0, 1e-12);
    const IzumrudReport z = izumrud_check(bp, mol, nu, 400, g());
    for (int j = 0; j < 3; ++j) rows.finite(id, "izumrud-constant-" + std::to_string(j + 1), z.constants[j]);
    rows.upper(id, "izumrud-origin-gradient", z.origin_gradient, 1e-10);
    ca.push_back(r.a_constant);
    cb0.push_back(r.b_constant[0]);
    cb1.push_back(r.b_constant[1]);
    cb2.push_back(r.b_constant[2]);
    cc.push_back(r.c_constant);
    z0.push_back(z.constants[0]);
    z1.push_back(z.constants[1]);
    z2.push_back(z.constants[2]);
  }
  const std::pair<const char*, const std::vector<double>*> spreads[] = {
      {"naklofen-a", &ca}, {"naklofen-b-u", &cb0}, {"naklofen-b-v", &cb1}, {"naklofen-b-w", &cb2},
      {"naklofen-c", &cc}, {"izumrud-1", &z0},     {"izumrud-2", &z1},     {"izumrud-3", &z2}};
  for (const auto& [name, v] : spreads) rows.upper("stability", std::string(name) + "-spread", spread(*v), 2);
}

// ---- criterion 8 ----

void semigroup_accuracy(const SuiteConfig& cfg, Rows& rows) {
  {
    const GridDomain g = GridDomain::interval(257);
    const DiscreteOperator op = assemble_operator(
        MatrixField::constant(g, ComplexMatrix::Identity(1, 1)), g, BoundaryCondition::dirichlet());
    const GridFunction sine = [](double x, double) { return Complex(std::sin(M_PI * x)); };
    const TimeGrid tg = geometric_time_grid(g.h, 0.1, 1.25, 0.005);
    const SemigroupTrace tr = evolve(op, op.sample(sine), tg);
    const ComplexVector exact = std::exp(-M_PI * M_PI * 0.1) * op.sample(sine);
    const ComplexVector u = op.from_nodes(tr.u.back());
    ReportRow& r = rows.upper("eigen-decay", "rel-l2-error", op.norm(u - exact) / op.norm(exact), 1e-3);
    r.h = g.h;
    r.n_t = tr.size() - 1;
  }

  double excess = 0, form = 0, accretive = kInfinity;
  for (int k = 0; k < 8; ++k) {
    Rng g = stream(cfg, 8, 0, k);
    const int dim = 1 + k % 2;
    const GridDomain grid = dim == 1 ? GridDomain::interval(96) : GridDomain::box(20, 16);
    const MatrixField A = MatrixField::from_function(grid, random_smooth_field(g, dim, {2.0}, 0.05, 0.6));
    const BCKind kinds[3] = {BCKind::Dirichlet, BCKind::Neumann, BCKind::Mixed};
    const BCKind kind = kinds[k % 3];
    const BoundaryCondition bc =
        kind == BCKind::Mixed ? BoundaryCondition::mixed(grid, [](double x, double) { return x < 1e-12; })
                              : BoundaryCondition{kind, {}};
    const DiscreteOperator op = assemble_operator(A, grid, bc);
    const OperatorChecks oc = operator_checks(op, 100, g());
    form = std::max(form, oc.form_identity_error);
    accretive = std::min(accretive, oc.accretivity_margin);
    const ComplexVector f = op.sample(random_smooth_function(g, kind, dim)) +
                            0.1 * complex_normal_vector(g, op.size());
    const TimeGrid tg = geometric_time_grid(grid.h, decay_horizon(op));
    excess = std::max(excess, evolve(op, f, tg, Scheme::CrankNicolson).contractivity_excess);
    excess = std::max(excess, evolve(op, f, tg, Scheme::BackwardEuler).contractivity_excess);
  }
  rows.upper("contractivity", "max-norm-growth", excess, 1e-10);
  rows.upper("form-identity", "max-rel-gap", form, 1e-12);
  rows.lower("form-identity", "min-accretivity-margin", accretive, 0, 1e-12);
}

// ---- criterion 9 ----

struct EmbeddingDraw {
  HolderTriple t;
  std::array<FieldFunction, 3> fields;
  std::array<GridFunction, 3> inputs;
};

EmbeddingDraw draw_embedding(Rng& g, int dim) {
  EmbeddingDraw e;
  e.t = pick_triple(g);
  for (auto& f : e.fields) f = random_smooth_field(g, dim, all_exponents(e.t), 0.05);
  for (auto& f : e.inputs) f = random_smooth_function(g, BCKind::Dirichlet, dim);
  return e;
}

EmbeddingInput embedding_input(const EmbeddingDraw& e, const GridDomain& grid) {
  EmbeddingInput in;
  in.grid = grid;
  in.triple = e.t;
  for (int j = 0; j < 3; ++j) {
    in.fields[j] = MatrixField::from_function(grid, e.fields[j]);
    in.bcs[j] = BoundaryCondition::dirichlet();
  }
  in.inputs = e.inputs;
  return in;
}

GridDomain square_grid(int dim, int n) { return dim == 1 ? GridDomain::interval(n) : GridDomain::box(n, n); }

void trilinear_refinement(const SuiteConfig& cfg, Rows& rows, int dim, int draws, int n) {
  std::vector<double> change(draws), ratio(draws), excess(draws), trunc(draws);
  std::vector<int> steps(draws);
  for (int k = 0; k < draws; ++k) {
    Rng g = stream(cfg, 9, dim, k);
    EmbeddingResult r[2];
    for (int attempt = 0;; ++attempt) {
      const EmbeddingDraw e = draw_embedding(g, dim);
      try {
        for (int lvl = 0; lvl < 2; ++lvl) r[lvl] = embedding_ratio(embedding_input(e, square_grid(dim, n << lvl)));
        break;
      } catch (const PreconditionError&) {
        if (attempt == 100) throw;
      }
    }
    change[k] = relative_change(r[0].ratio, r[1].ratio);
    ratio[k] = std::max(r[0].ratio, r[1].ratio);
    excess[k] = std::max(r[0].contractivity_excess, r[1].contractivity_excess);
    trunc[k] = r[1].truncation / std::max(r[1].functional, 1e-300);
    steps[k] = r[1].time_steps;
  }
  const std::string id = "trilinear-" + std::to_string(dim) + "d";
  const double h = 1.0 / (n << 1);
  const int nt = *std::max_element(steps.begin(), steps.end());
  auto tag = [&](ReportRow& r) {
    r.h = h;
    r.n_t = nt;
  };
  tag(rows.finite(id, "max-ratio", max_of(ratio)));
  tag(rows.upper(id, "max-refinement-change", max_of(change), 0.15));
  tag(rows.upper(id, "max-contractivity-excess", max_of(excess), 1e-10));
  tag(rows.upper(id, "max-rel-truncation", max_of(trunc), 1e-6));
}

// C = delta I under Neumann with h = 1 keeps T^C h = 1, so the trilinear functional reduces to
// the bilinear one for every delta.
void bilinear_sweep(const SuiteConfig& cfg, Rows& rows) {
  double variation = 0;
  for (int k = 0; k < 5; ++k) {
    Rng g = stream(cfg, 9, 3, k);
    const EmbeddingDraw e = draw_embedding(g, 1);
    const GridDomain grid = GridDomain::interval(64);
    std::vector<double> ratios;
    for (double delta : {1.0, 0.1, 0.01}) {
      EmbeddingInput in = embedding_input(e, grid);
      in.fields[2] = MatrixField::constant(grid, delta * ComplexMatrix::Identity(1, 1));
      in.bcs[2] = BoundaryCondition::neumann();
      in.inputs[2] = [](double, double) { return Complex(1); };
      ratios.push_back(embedding_ratio(in).ratio);
    }
    variation = std::max(variation, max_of(ratios) / min_of(ratios) - 1);
  }
  rows.upper("bilinear-limit", "max-ratio-variation", variation, 0.25).h = 1.0 / 64;
}

void scaled_flow(const SuiteConfig& cfg, Rows& rows) {
  double worst = 0;
  for (int k = 0; k < 5; ++k) {
    Rng g = stream(cfg, 9, 4, k);
    const EmbeddingDraw e = draw_embedding(g, 1);
    const EmbeddingInput in = embedding_input(e, GridDomain::interval(64));
    const double rp = conjugate_exponent(e.t.r);
    const double base = embedding_ratio(in).functional;
    for (double s : {4.0, 16.0}) {
      EmbeddingOptions opt;
      opt.scale_ab = s;
      worst = std::max(worst, embedding_ratio(in, opt).functional * std::pow(s, 1 / rp) / base);
    }
  }
  rows.upper("scaled-flow", "max-scaled-functional-over-unscaled", worst, 2).h = 1.0 / 64;
}

void embedding_experiments(const SuiteConfig& cfg, Rows& rows) {
  trilinear_refinement(cfg, rows, 1, 50, 64);
  trilinear_refinement(cfg, rows, 2, 10, 16);
  bilinear_sweep(cfg, rows);
  scaled_flow(cfg, rows);
}

// ---- criterion 10 ----

MatrixField scalar_field(const GridDomain& g, Complex a) {
  return MatrixField::constant(g, ComplexMatrix::Constant(1, 1, a));
}

void paraproduct_checks(const SuiteConfig& cfg, Rows& rows) {
  double gap = 0, ratio = 0;
  const GridFunction sine = [](double x, double) { return Complex(std::sin(M_PI * x)); };
  {
    const GridDomain g = GridDomain::interval(48);
    const DiscreteOperator L = assemble_operator(scalar_field(g, 1.0), g, BoundaryCondition::dirichlet());
    const ComplexVector f = L.sample(sine);
    const ParaproductResult r = paraproduct(L, L, L, f, f, f, HolderTriple(3, 3, 3));
    gap = r.relative_gap;
    ratio = std::abs(r.ratio);
  }
  for (int k = 0; k < 6; ++k) {
    Rng g = stream(cfg, 10, 0, k);
    const int dim = 1 + k % 2;
    const GridDomain grid = dim == 1 ? GridDomain::interval(40) : GridDomain::box(10, 10);
    const HolderTriple t = pick_triple(g);
    const BoundaryCondition bc = k % 3 == 2 ? BoundaryCondition::neumann() : BoundaryCondition::dirichlet();
    std::array<DiscreteOperator, 3> ops;
    std::array<ComplexVector, 3> in;
    for (int j = 0; j < 3; ++j) {
      ops[j] = assemble_operator(MatrixField::from_function(grid, random_smooth_field(g, dim, all_exponents(t), 0.05)),
                                 grid, bc);
      in[j] = ops[j].sample(random_smooth_function(g, bc.kind, dim));
    }
    const ParaproductResult r = paraproduct(ops[0], ops[1], ops[2], in[0], in[1], in[2], t);
    gap = std::max(gap, r.relative_gap);
    ratio = std::max(ratio, std::abs(r.ratio));
  }
  rows.upper("paraproduct", "max-rel-gap-between-forms", gap, 1e-6);
  rows.finite("paraproduct", "max-abs-ratio", ratio);
}

void square_function_checks(const SuiteConfig& cfg, Rows& rows) {
  constexpr int kDraws = 50;
  double ratio[2] = {0, 0};
  for (int k = 0; k < kDraws; ++k) {
    Rng g = stream(cfg, 10, 1, k);
    const FieldFunction F = random_smooth_field(g, 1, {2.0, 4.0}, 0.05);
    const GridFunction f = random_smooth_function(g, BCKind::Dirichlet, 1);
    for (int lvl = 0; lvl < 2; ++lvl) {
      const GridDomain grid = GridDomain::interval(64 << lvl);
      const DiscreteOperator op =
          assemble_operator(MatrixField::from_function(grid, F), grid, BoundaryCondition::dirichlet());
      const TimeGrid tg = geometric_time_grid(grid.h, decay_horizon(op));
      ratio[lvl] = std::max(ratio[lvl], modified_square_function(op, op.sample(f), 4, tg).ratio);
    }
  }
  rows.finite("square-function-p4", "max-ratio", ratio[1]).h = 1.0 / 128;
  rows.upper("square-function-p4", "refinement-change", relative_change(ratio[0], ratio[1]), 0.15).h = 1.0 / 128;
}

// The eigenvector condition of a non-normal discretization grows quickly with the grid, so the
// field has a constant phase: L is then a rotated self-adjoint operator.
void kato_ponce_checks(const SuiteConfig& cfg, Rows& rows) {
  const KatoPonceExponents e{3, 3, 2, 6, 3};
  Rng g = stream(cfg, 10, 2);
  const double phase = uniform(g, -0.5, 0.5);
  const GridFunction mod = random_smooth_function(g, BCKind::Neumann, 1);
  const FieldFunction F = [=](double x, double y) {
    return ComplexMatrix::Constant(1, 1, std::polar(1.0 + 0.4 * std::tanh(std::abs(mod(x, y))), phase));
  };
  std::vector<std::pair<GridFunction, GridFunction>> inputs;
  for (int k = 0; k < 100; ++k)
    inputs.push_back({random_smooth_function(g, BCKind::Dirichlet, 1), random_smooth_function(g, BCKind::Dirichlet, 1)});
  std::array<std::array<double, 2>, 2> ratio{};
  bool rejected = false;
  for (int lvl = 0; lvl < 2; ++lvl) {
    const GridDomain grid = GridDomain::interval(128 << lvl);
    const DiscreteOperator op =
        assemble_operator(MatrixField::from_function(grid, F), grid, BoundaryCondition::dirichlet());
    const FunctionalCalculus fc(op);
    for (int b = 0; b < 2; ++b) {
      const double beta = b == 0 ? 0.1 : 0.3;
      for (const auto& [f, gf] : inputs)
        ratio[b][lvl] = std::max(ratio[b][lvl], kato_ponce_check(op, fc, beta, e, op.sample(f), op.sample(gf)).ratio);
    }
    if (lvl == 0) {
      try {
        kato_ponce_check(op, fc, 0.7, e, op.sample(inputs[0].first), op.sample(inputs[0].second));
      } catch (const PreconditionError&) {
        rejected = true;
      }
    }
  }
  for (int b = 0; b < 2; ++b) {
    const std::string id = b == 0 ? "kato-ponce-beta0.1" : "kato-ponce-beta0.3";
    rows.finite(id, "max-ratio", ratio[b][1]).h = 1.0 / 256;
    rows.upper(id, "refinement-change", relative_change(ratio[b][0], ratio[b][1]), 0.15).h = 1.0 / 256;
  }
  rows.flag("kato-ponce-beta0.7", "rejected-beta-above-1-over-r-prime", rejected);
}

void calderon_checks(const SuiteConfig& cfg, Rows& rows) {
  const GridDomain grid = GridDomain::interval(64);
  Rng g = stream(cfg, 10, 3);
  const DiscreteOperator op = assemble_operator(
      MatrixField::from_function(grid, random_smooth_field(g, 1, {2.0}, 0.05)), grid,
      BoundaryCondition::dirichlet());
  const FunctionalCalculus fc(op);
  const std::array<ComplexVector, 2> fs = {
      op.sample([](double x, double) { return Complex(std::sin(M_PI * x)); }),
      op.sample(random_smooth_function(g, BCKind::Dirichlet, 1))};
  bool gap_mono = true, tail_mono = true;
  double gap = 0, tail = 0, identity = 0, sum_err = 0;
  for (int alpha : {1, 2, 3}) {
    for (const auto& f : fs) {
      const CalderonCurves c = calderon_check(op, fc, alpha, f);
      gap_mono = gap_mono && c.gap_monotone;
      tail_mono = tail_mono && c.tail_monotone;
      gap = std::max(gap, c.extrapolated_gap);
      tail = std::max(tail, c.tail.back() / op.norm(f));
      identity = std::max(identity, (fc.apply(fn::phi(alpha, 0.0), f) - f).norm() / f.norm());
    }
    for (double t : {1e-3, 1e-2, 0.1, 1.0}) sum_err = std::max(sum_err, phi_sum_identity_error(op, fc, alpha, t));
  }
  rows.flag("calderon", "gap-curves-monotone", gap_mono);
  rows.flag("calderon", "tail-curves-monotone", tail_mono);
  rows.upper("calderon", "max-extrapolated-gap-t-to-0", gap, 1e-6);
  rows.upper("calderon", "max-relative-tail-at-largest-t", tail, 1e-6);
  rows.upper("calderon", "phi-at-zero-identity-gap", identity, 1e-12);
  rows.upper("phi-sum-identity", "max-rel-gap", sum_err, 1e-10);
}

void energy_flow_checks(const SuiteConfig& cfg, Rows& rows) {
  double increase = -kInfinity, bound = kInfinity, c = kInfinity;
  const GridDomain grid = GridDomain::interval(64);
  const auto bc = BoundaryCondition::dirichlet();
  for (int k = 0; k < 4; ++k) {
    Rng g = stream(cfg, 10, 4, k);
    HolderTriple t;
    CoefficientTriple abc;
    for (int attempt = 0;; ++attempt) {
      if (attempt == 1000) throw BudgetExhausted("no star-passing triple drawn", 0);
      t = pick_triple(g);
      for (auto& m : abc) m = random_elliptic(g, 1, all_exponents(t), 0.05);
      if (star_conditions(abc[0], abc[1], abc[2], t).pass) break;
    }
    SelectOptions so;
    so.seed = g();
    const BellmanParams bp = select_params({abc}, t, so).params;
    std::array<SemigroupTrace, 3> tr;
    for (int j = 0; j < 3; ++j) {
      const DiscreteOperator op = assemble_operator(MatrixField::constant(grid, abc[j]), grid, bc);
      const TimeGrid tg = geometric_time_grid(grid.h, 10.0);
      tr[j] = evolve(op, op.sample(random_smooth_function(g, BCKind::Dirichlet, 1)), tg);
    }
    const EnergyFlowReport r = energy_flow(bp, tr[0], tr[1], tr[2]);
    increase = std::max(increase, r.max_increase);
    bound = std::min(bound, r.bound_margin);
    c = std::min(c, r.c_empirical);
  }
  rows.upper("energy-flow", "max-energy-increase", increase, 1e-8).h = grid.h;
  rows.lower("energy-flow", "min-majorant-margin", bound, 0, 1e-12).h = grid.h;
  rows.lower("energy-flow", "min-dissipation-constant", c, 0).h = grid.h;
}

void mos_def_checks(const SuiteConfig& cfg, Rows& rows) {
  constexpr int kInstances = 1000;
  std::vector<double> gap(kInstances);
  parallel_for(kInstances, [&](std::int64_t i) {
    Rng g = stream(cfg, 10, 5, i);
    const int n = 2 + static_cast<int>(i % 3);
    std::vector<double> w(n), p(n), f(n);
    double total = 0;
    for (double& x : w) total += (x = uniform(g, 0.1, 1.0));
    for (int j = 0; j < n; ++j) {
      p[j] = total / w[j];
      f[j] = std::exp(uniform(g, -2.0, 2.0));
    }
    const double a = mos_def_minimum(p, f);
    gap[i] = std::abs(a - mos_def_numeric(p, f)) / a;
  });
  rows.upper("mos-def", "max-rel-gap", max_of(gap), 1e-8);
}

void applications(const SuiteConfig& cfg, Rows& rows) {
  paraproduct_checks(cfg, rows);
  square_function_checks(cfg, rows);
  kato_ponce_checks(cfg, rows);
  calderon_checks(cfg, rows);
  energy_flow_checks(cfg, rows);
  mos_def_checks(cfg, rows);
}

}  // namespace

CriterionOutcome run_criterion(int id, const SuiteConfig& cfg) {
  CriterionOutcome out;
  out.id = id;
  out.title = criterion_title(id);
  Rows rows(out, cfg);
  switch (id) {
    case 1: delta_exactness(cfg, rows); break;
    case 2: delta_symmetry(cfg, rows); break;
    case 3: bellman_consistency(cfg, rows); break;
    case 4: generalized_convexity(cfg, rows); break;
    case 5: power_bounds(cfg, rows); break;
    case 6: perturbation_family(cfg, rows); break;
    case 7: mollifier_checks(cfg, rows); break;
    case 8: semigroup_accuracy(cfg, rows); break;
    case 9: embedding_experiments(cfg, rows); break;
    case 10: applications(cfg, rows); break;
  }
  return out;
}

}  // namespace pell
