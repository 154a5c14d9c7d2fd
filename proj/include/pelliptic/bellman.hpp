#pragma once

#include <string>
#include <vector>

#include "pelliptic/holder.hpp"
#include "pelliptic/monomial.hpp"

namespace pell {

using ComplexTriple = std::array<Complex, 3>;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

enum class BellmanVariant { PGreaterQ, PEqualQ };

struct BellmanParams {
  HolderTriple triple;
  double D = 0;  // unused for p = q
  double E = 0;
  BellmanVariant variant = BellmanVariant::PGreaterQ;

  static BellmanParams make(const HolderTriple& t, double D, double E);

  double P() const { return triple.P(); }
  double Q() const { return triple.Q(); }
  double r() const { return triple.r; }
  bool swapped() const { return triple.swapped(); }
  // smallest admissible E for the given D (coefficient positivity)
  static double E_floor(const HolderTriple& t, double D);
  static double D_floor(const HolderTriple& t);
  void validate() const;
};

enum class DomainLabel { Omega1 = 1, Omega2, Omega3, Omega4, Omega5, Omega6, OnUpsilon };

std::string to_string(DomainLabel d);
int domain_count(const BellmanParams& bp);

struct UpsilonError : std::domain_error {
  using std::domain_error::domain_error;
};

inline constexpr double kUpsilonTol = 1e-9;

// Classification in the caller's coordinates.
DomainLabel classify(const BellmanParams& bp, const ComplexTriple& z, double tau = kUpsilonTol);
// Always returns a domain; ties resolved deterministically.
DomainLabel closed_domain(const BellmanParams& bp, const ComplexTriple& z);

// Monomials of a domain formula in normalized coordinates (slot 0 carries the larger exponent).
std::vector<Monomial<3>> domain_monomials(const BellmanParams& bp, DomainLabel d);

// Jet of a specific domain formula, caller's coordinates.
Jet<3> formula_jet(const BellmanParams& bp, DomainLabel d, const ComplexTriple& z, int order);

double bellman_value(const BellmanParams& bp, const ComplexTriple& z);
Vec6 bellman_gradient(const BellmanParams& bp, const ComplexTriple& z);
Mat6 bellman_hessian(const BellmanParams& bp, const ComplexTriple& z);
// Jet on the closed domain; the Hessian is meaningful off Upsilon only.
Jet<3> bellman_jet(const BellmanParams& bp, const ComplexTriple& z, int order);

// Caches the domain formulas; for inner loops such as quadrature.
class BellmanEvaluator {
 public:
  explicit BellmanEvaluator(const BellmanParams& bp);
  // closed-domain jet, as bellman_jet
  Jet<3> operator()(const ComplexTriple& z, int order) const;
  const BellmanParams& params() const { return bp_; }

 private:
  BellmanParams bp_;
  std::array<std::vector<Monomial<3>>, 6> forms_;
};

struct BoundReport {
  double upper_margin;  // X - [(1/p)|u|^p + (D/q)|v|^q + (E/r)|w|^r], must be <= 0
  // |d_{conj u} X| / max(U,V,W)^{1 - 1/p}, same for v with q, and |d_{conj w} X| / |w|^{r-1}
  std::array<double, 3> gradient_ratio;
};

BoundReport bound_checks(const BellmanParams& bp, const ComplexTriple& z);

// The right side of the upper bound.
double bellman_majorant(const BellmanParams& bp, const ComplexTriple& z);

}  // namespace pell
