#pragma once

#include <array>
#include <vector>

#include "pelliptic/bellman.hpp"
#include "pelliptic/semigroup.hpp"

namespace pell {

// Time quadrature over the shared grid of the traces; the integrand of the last trace is
// taken as |T h| (nodal), the others as |grad T f| (slot-wise).
struct TraceIntegral {
  double value = 0;
  double truncation = 0;  // last panel, an estimate of the neglected tail
  int slices = 0;
  std::vector<double> integrand;
};

TraceIntegral trilinear_functional(const SemigroupTrace& a, const SemigroupTrace& b,
                                   const SemigroupTrace& c);
TraceIntegral bilinear_functional(const SemigroupTrace& a, const SemigroupTrace& b);

// min over a_j > 0 with prod a_j = 1 of sum (a_j f_j)^{p_j}, for sum 1/p_j = 1
double mos_def_minimum(const std::vector<double>& p, const std::vector<double>& f);
double mos_def_numeric(const std::vector<double>& p, const std::vector<double>& f);

struct EmbeddingInput {
  GridDomain grid;
  std::array<MatrixField, 3> fields;
  std::array<BoundaryCondition, 3> bcs;
  HolderTriple triple;
  std::array<GridFunction, 3> inputs;
};

struct EmbeddingOptions {
  double rho = 1.25;
  double t_end = 0;      // 0 picks the slowest decay horizon
  double scale_ab = 1;   // A and B traces run at time s t
  Scheme scheme = Scheme::CrankNicolson;
};

struct EmbeddingResult {
  double functional = 0, truncation = 0;
  std::array<double, 3> norms{};
  double ratio = 0;           // functional / (|f|_p |g|_q |h|_r)
  double sum_form_ratio = 0;  // functional / min_a sum (a_j |f_j|)^{p_j}
  double contractivity_excess = 0;
  int time_steps = 0;
  StarReport star;
};

// Throws PreconditionError when the ellipticity gate fails: the star conditions, or
// max{p,q,r}-ellipticity when any boundary condition is mixed.
EmbeddingResult embedding_ratio(const EmbeddingInput& in, const EmbeddingOptions& opt = {});

struct BilinearResult {
  double functional = 0, truncation = 0, norm_f = 0, norm_g = 0, ratio = 0;
};
BilinearResult bilinear_ratio(const GridDomain& g, const MatrixField& A, const MatrixField& B,
                              const BoundaryCondition& bcA, const BoundaryCondition& bcB,
                              double p, double q, const GridFunction& f, const GridFunction& gf,
                              const EmbeddingOptions& opt = {});

struct SquareFunctionResult {
  RealVector G;  // nodal
  double norm_G = 0, norm_f = 0, ratio = 0;
};
SquareFunctionResult modified_square_function(const DiscreteOperator& opA, const ComplexVector& f,
                                              double p, const TimeGrid& tg);
// Nodal values of the conical functional on a 1D grid, integrated over the trace times.
RealVector conical_functional(const SemigroupTrace& tr);

struct ParaproductResult {
  Complex derivative_form = 0, gradient_form = 0;
  double relative_gap = 0, ratio = 0;
  std::array<double, 3> norms{};
};
// All three operators must share grid and boundary condition.
ParaproductResult paraproduct(const DiscreteOperator& A, const DiscreteOperator& B,
                              const DiscreteOperator& C, const ComplexVector& f,
                              const ComplexVector& g, const ComplexVector& h,
                              const HolderTriple& t);
// int_0^T -d/dt (sum T^A f T^B g T^C h) dt against the telescoped difference
double telescoping_gap(const DiscreteOperator& A, const DiscreteOperator& B,
                       const DiscreteOperator& C, const ComplexVector& f, const ComplexVector& g,
                       const ComplexVector& h, double T);

struct KatoPonceExponents {
  double p1, q1, p2, q2, r;
};
struct KatoPonceResult {
  double lhs = 0, rhs = 0, ratio = 0, holder_ratio = 0;
};
KatoPonceResult kato_ponce_check(const DiscreteOperator& op, const FunctionalCalculus& fc,
                                 double beta, const KatoPonceExponents& e, const ComplexVector& f,
                                 const ComplexVector& g);

struct CalderonCurves {
  std::vector<double> t_small, gap, t_large, tail;
  bool gap_monotone = false, tail_monotone = false;
  double gap_at_min = 0, extrapolated_gap = 0;
};
CalderonCurves calderon_check(const DiscreteOperator& op, const FunctionalCalculus& fc, int alpha,
                              const ComplexVector& f, double t_min = 1e-6);
double phi_sum_identity_error(const DiscreteOperator& op, const FunctionalCalculus& fc, int alpha,
                              double t);

struct EnergyFlowReport {
  std::vector<double> times, energy, dissipation, slices;
  double bound_margin = 0;    // majorant integral minus energy at t = 0
  double max_increase = 0;    // max over k of E_{k+1} - E_k
  double c_empirical = 0;     // min dissipation / trilinear slice
  bool pass(double tol = 1e-8) const {
    return bound_margin >= -tol && max_increase <= tol && c_empirical >= 0;
  }
};
EnergyFlowReport energy_flow(const BellmanParams& bp, const SemigroupTrace& a,
                             const SemigroupTrace& b, const SemigroupTrace& c);

// Trigonometric polynomial compatible with the boundary condition on the unit box.
GridFunction random_smooth_function(Rng& rng, BCKind bc, int dim, int modes = 5);
using FieldFunction = std::function<ComplexMatrix(double, double)>;
// rho(x) e^{i theta(x)} A0 with rho in [1/2, 3/2] and |theta| <= phase; rejection keeps
// Delta_s(e^{i theta} A0) >= floor for every s in exps over the whole phase range.
FieldFunction random_smooth_field(Rng& rng, int d, const std::vector<double>& exps, double floor,
                                  double phase = 0.3);

}  // namespace pell
