#include "pelliptic/bellman.hpp"

#include <algorithm>

#include "pelliptic/ellipticity.hpp"

namespace pell {

namespace {

// normalized coordinates put the larger exponent first
ComplexTriple normalize(const BellmanParams& bp, const ComplexTriple& z) {
  return bp.swapped() ? ComplexTriple{z[1], z[0], z[2]} : z;
}

void denormalize(const BellmanParams& bp, Jet<3>& jet) {
  if (!bp.swapped()) return;
  Eigen::Matrix<int, 6, 1> perm;
  perm << 2, 3, 0, 1, 4, 5;
  Eigen::PermutationMatrix<6> P(perm);
  jet.grad = P * jet.grad;
  jet.hess = P * jet.hess * P.transpose();
}

struct Levels {
  double U, V, W;
};

Levels levels_normalized(const BellmanParams& bp, const ComplexTriple& zn) {
  return {std::pow(std::abs(zn[0]), bp.P()), std::pow(std::abs(zn[1]), bp.Q()),
          std::pow(std::abs(zn[2]), bp.r())};
}

DomainLabel closed_from_levels(const BellmanParams& bp, const Levels& L) {
  const double U = L.U, V = L.V, W = L.W;
  if (bp.variant == BellmanVariant::PEqualQ) {
    if (W <= std::min(U, V)) return DomainLabel::Omega1;
    if (V <= W && W <= U) return DomainLabel::Omega2;
    if (U <= W && W <= V) return DomainLabel::Omega3;
    return DomainLabel::Omega4;
  }
  if (W <= V && V <= U) return DomainLabel::Omega1;
  if (V <= W && W <= U) return DomainLabel::Omega2;
  if (V <= U && U <= W) return DomainLabel::Omega3;
  if (U <= V && V <= W) return DomainLabel::Omega4;
  if (U <= W && W <= V) return DomainLabel::Omega5;
  return DomainLabel::Omega6;
}

bool near(double a, double b, double tau) {
  return std::abs(a - b) <= tau * std::max(std::abs(a), std::abs(b));
}

}  // namespace

BellmanParams BellmanParams::make(const HolderTriple& t, double D, double E) {
  BellmanParams bp;
  bp.triple = t;
  bp.variant = std::abs(t.p - t.q) <= 1e-12 * std::max(t.p, t.q) ? BellmanVariant::PEqualQ
                                                                 : BellmanVariant::PGreaterQ;
  bp.D = bp.variant == BellmanVariant::PEqualQ ? 0.0 : D;
  bp.E = E;
  bp.validate();
  return bp;
}

double BellmanParams::D_floor(const HolderTriple& t) { return 0.5 * (1 - t.Q() / t.P()); }

double BellmanParams::E_floor(const HolderTriple& t, double D) {
  if (std::abs(t.p - t.q) <= 1e-12 * std::max(t.p, t.q)) return 1.0;
  const double k = t.Q() / t.P();
  return std::max(0.5, (D + k) / (1 + k));
}

void BellmanParams::validate() const {
  triple.validate();
  if (!(P() > 2)) throw SchemaError("BellmanParams: the larger of p, q must exceed 2");
  if (!(E > E_floor(triple, D))) throw SchemaError("BellmanParams: E below coefficient floor");
  if (variant == BellmanVariant::PGreaterQ && !(D > D_floor(triple)))
    throw SchemaError("BellmanParams: D below coefficient floor");
}

std::string to_string(DomainLabel d) {
  if (d == DomainLabel::OnUpsilon) return "upsilon";
  return "omega" + std::to_string(static_cast<int>(d));
}

int domain_count(const BellmanParams& bp) { return bp.variant == BellmanVariant::PEqualQ ? 4 : 6; }

DomainLabel classify(const BellmanParams& bp, const ComplexTriple& z, double tau) {
  if (z[0] == 0.0 || z[1] == 0.0 || z[2] == 0.0) return DomainLabel::OnUpsilon;
  const Levels L = levels_normalized(bp, normalize(bp, z));
  if (near(L.U, L.V, tau) || near(L.U, L.W, tau) || near(L.V, L.W, tau))
    return DomainLabel::OnUpsilon;
  return closed_from_levels(bp, L);
}

DomainLabel closed_domain(const BellmanParams& bp, const ComplexTriple& z) {
  return closed_from_levels(bp, levels_normalized(bp, normalize(bp, z)));
}

std::vector<Monomial<3>> domain_monomials(const BellmanParams& bp, DomainLabel d) {
  const double p = bp.P(), q = bp.Q(), r = bp.r(), D = bp.D, E = bp.E;
  using A = std::array<double, 3>;
  std::vector<Monomial<3>> ms;
  auto add = [&](double coef, A a) { ms.push_back(bracket<3>(coef, a)); };
  if (bp.variant == BellmanVariant::PEqualQ) {
    switch (d) {
      case DomainLabel::Omega1:
        add(1, {p, 0, 0});
        add(1, {0, p, 0});
        add(E, {0, 0, r});
        break;
      case DomainLabel::Omega2:
        add(1, {p, 0, 0});
        add(1, {0, 2, 1});
        add(E - 0.5, {0, 0, r});
        break;
      case DomainLabel::Omega3:
        add(1, {2, 0, 1});
        add(1, {0, p, 0});
        add(E - 0.5, {0, 0, r});
        break;
      case DomainLabel::Omega4:
        add(1, {2, 0, 1});
        add(1, {0, 2, 1});
        add(E - 1, {0, 0, r});
        break;
      default: throw UpsilonError("no formula for this label");
    }
    return ms;
  }
  const double k = q / p;
  const double e3 = E - (D + k) / (1 + k);
  switch (d) {
    case DomainLabel::Omega1:
      add(1, {p, 0, 0});
      add(D, {0, q, 0});
      add(E, {0, 0, r});
      break;
    case DomainLabel::Omega2:
      add(1, {p, 0, 0});
      add(D, {0, 1 + k, 1});
      add(E - D / (1 + k), {0, 0, r});
      break;
    case DomainLabel::Omega3:
      add(1, {1 + p / q, 0, 1});
      add(D, {0, 1 + k, 1});
      add(e3, {0, 0, r});
      break;
    case DomainLabel::Omega4:
      add(1 - k, {2, 1 - k, 1});
      add(D - (1 - k) / 2, {0, 1 + k, 1});
      add(e3, {0, 0, r});
      break;
    case DomainLabel::Omega5:
      add(1 - k, {2, q - 2 * k, 0});
      add(1, {2, 0, r - 2 * r / p});
      add(D - (1 - k) / 2, {0, q, 0});
      add(E - 0.5, {0, 0, r});
      break;
    case DomainLabel::Omega6:
      add((1 / r) / (1 - 2 / p), {p, 0, 0});
      add(1 - k, {2, q - 2 * k, 0});
      add(D - (1 - k) / 2, {0, q, 0});
      add(E, {0, 0, r});
      break;
    default: throw UpsilonError("no formula for this label");
  }
  return ms;
}

Jet<3> formula_jet(const BellmanParams& bp, DomainLabel d, const ComplexTriple& z, int order) {
  Jet<3> jet = evaluate<3>(domain_monomials(bp, d), normalize(bp, z), order);
  denormalize(bp, jet);
  return jet;
}

Jet<3> bellman_jet(const BellmanParams& bp, const ComplexTriple& z, int order) {
  return formula_jet(bp, closed_domain(bp, z), z, order);
}

BellmanEvaluator::BellmanEvaluator(const BellmanParams& bp) : bp_(bp) {
  for (int k = 1; k <= domain_count(bp); ++k)
    forms_[k - 1] = domain_monomials(bp, static_cast<DomainLabel>(k));
}

Jet<3> BellmanEvaluator::operator()(const ComplexTriple& z, int order) const {
  const ComplexTriple n = normalize(bp_, z);
  const DomainLabel d = closed_from_levels(bp_, levels_normalized(bp_, n));
  Jet<3> jet = evaluate<3>(forms_[static_cast<int>(d) - 1], n, order);
  denormalize(bp_, jet);
  return jet;
}

double bellman_value(const BellmanParams& bp, const ComplexTriple& z) {
  return bellman_jet(bp, z, 0).value;
}

Vec6 bellman_gradient(const BellmanParams& bp, const ComplexTriple& z) {
  return bellman_jet(bp, z, 1).grad;
}

Mat6 bellman_hessian(const BellmanParams& bp, const ComplexTriple& z) {
  const DomainLabel d = classify(bp, z);
  if (d == DomainLabel::OnUpsilon) throw UpsilonError("Hessian requested on Upsilon");
  return formula_jet(bp, d, z, 2).hess;
}

double bellman_majorant(const BellmanParams& bp, const ComplexTriple& z) {
  const ComplexTriple n = normalize(bp, z);
  const double p = bp.P(), q = bp.Q(), r = bp.r();
  const double D = bp.variant == BellmanVariant::PEqualQ ? 1.0 : bp.D;
  return std::pow(std::abs(n[0]), p) / p + D * std::pow(std::abs(n[1]), q) / q +
         bp.E * std::pow(std::abs(n[2]), r) / r;
}

BoundReport bound_checks(const BellmanParams& bp, const ComplexTriple& z) {
  BoundReport rep;
  const Jet<3> jet = bellman_jet(bp, z, 1);
  rep.upper_margin = jet.value - bellman_majorant(bp, z);
  const std::array<double, 3> s = {bp.triple.p, bp.triple.q, bp.triple.r};
  double mx = 0;
  for (int j = 0; j < 3; ++j) mx = std::max(mx, std::pow(std::abs(z[j]), s[j]));
  for (int j = 0; j < 3; ++j) {
    // |d_{conj z} f| = |grad_z f| / 2 for real-valued f
    const double wirt = 0.5 * jet.grad.segment<2>(2 * j).norm();
    const double den = j < 2 ? std::pow(mx, 1 - 1 / s[j]) : std::pow(std::abs(z[2]), s[2] - 1);
    rep.gradient_ratio[j] = den > 0 ? wirt / den : (wirt > 0 ? kInfinity : 0.0);
  }
  return rep;
}

}  // namespace pell
