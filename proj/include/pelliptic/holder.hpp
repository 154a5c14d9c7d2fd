#pragma once

#include <cmath>

#include "pelliptic/types.hpp"

namespace pell {

// Exponents with 1/p + 1/q + 1/r = 1.
struct HolderTriple {
  double p = 0, q = 0, r = 0;

  HolderTriple() = default;
  HolderTriple(double p_, double q_, double r_) : p(p_), q(q_), r(r_) { validate(); }

  static HolderTriple from_pq(double p, double q) {
    const double s = 1.0 - 1.0 / p - 1.0 / q;
    if (!(s > 0)) throw SchemaError("HolderTriple: 1/p + 1/q must be below 1");
    return HolderTriple(p, q, 1.0 / s);
  }

  void validate() const {
    if (!(p > 1 && q > 1 && r > 1) || !std::isfinite(p) || !std::isfinite(q) || !std::isfinite(r))
      throw SchemaError("HolderTriple: exponents must lie in (1, inf)");
    if (std::abs(1.0 / p + 1.0 / q + 1.0 / r - 1.0) > 1e-12)
      throw SchemaError("HolderTriple: 1/p + 1/q + 1/r != 1");
  }

  bool swapped() const { return p < q; }
  // p >= q after normalization
  double P() const { return swapped() ? q : p; }
  double Q() const { return swapped() ? p : q; }
  double m() const { return std::min(Q() / P() + 1.0, r); }
  double M() const { return std::max(P(), r); }
  double max_exponent() const { return std::max({p, q, r}); }
};

}  // namespace pell
