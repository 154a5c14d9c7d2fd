#pragma once

#include <cstdint>
#include <vector>

#include "pelliptic/bellman.hpp"
#include "pelliptic/field.hpp"
#include "pelliptic/hessian_form.hpp"
#include "pelliptic/sampling.hpp"

namespace pell {

// One coefficient triple (A, B, C) at a point of the domain.
using CoefficientTriple = std::array<ComplexMatrix, 3>;

// Distinct (A, B, C) triples over the active cells of three fields.
std::vector<CoefficientTriple> coefficient_triples(const MatrixField& A, const MatrixField& B,
                                                  const MatrixField& C);

// Point of C^3 in the given domain with max(|u|^p, |v|^q, |w|^r) = 1; some samples sit close
// to the domain's faces.
ComplexTriple sample_domain_point(Rng& g, const BellmanParams& bp, DomainLabel target);

struct ConvexitySample {
  double rel_min_eig;  // lambda_min(S) / ||S||, S the matrix of the form at the point
  double ratio;        // min over tried directions of H / (|w||zeta||eta|)
};

// Exact smallest eigenvalue plus sampled directions (including the extremal eigenvector).
ConvexitySample convexity_sample(const BellmanParams& bp, const CoefficientTriple& abc,
                                 const ComplexTriple& z, Rng& g, int directions);

struct ConvexityReport {
  std::int64_t samples = 0;
  double min_rel_eig = kInfinity;
  double c_empirical = kInfinity;  // inf of H / (|w||zeta||eta|) over the samples
  std::array<double, 6> domain_min_rel_eig{};
  bool pass(double eig_tol = 1e-12) const { return min_rel_eig >= -eig_tol && c_empirical > 0; }
};

// Samples are split evenly over the listed domains and the coefficient triples.
ConvexityReport convexity_check(const BellmanParams& bp, const std::vector<CoefficientTriple>& abc,
                                const std::vector<DomainLabel>& domains, std::int64_t samples,
                                std::uint64_t seed, int directions = 4);

struct SelectOptions {
  std::int64_t samples_per_domain = 2000;
  int max_doublings = 30;
  double eig_tol = 1e-12;
  std::uint64_t seed = 1;
};

struct SelectResult {
  BellmanParams params;
  int D_doublings = 0, E_doublings = 0;
  ConvexityReport verification;
};

// Doubling search: D first (domains 4-6 with E large), then E from its floor.
SelectResult select_params(const std::vector<CoefficientTriple>& abc, const HolderTriple& t,
                           const SelectOptions& opt = {});
SelectResult select_params(const MatrixField& A, const MatrixField& B, const MatrixField& C,
                           const HolderTriple& t, const SelectOptions& opt = {});

// N = 1 search for a negative value of H^A_{F_p}; returns the most negative value found
// normalized by |X|^2 |w|^{p-2}.
double power_convexity_search(const ComplexMatrix& A, double p, std::int64_t samples,
                              std::uint64_t seed);

}  // namespace pell
