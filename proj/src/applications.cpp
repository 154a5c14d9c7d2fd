#include "pelliptic/applications.hpp"

#include <cmath>
#include <numeric>

#include "pelliptic/quadrature.hpp"

namespace pell {

namespace {

void require_aligned(const SemigroupTrace& a, const SemigroupTrace& b) {
  if (a.grid.id != b.grid.id || a.size() != b.size())
    throw SchemaError("traces must share grid and time grid");
}

// Trapezoid in t, stopping once a panel falls below 1e-12 of the running total.
TraceIntegral integrate_slices(const std::vector<double>& t, const std::vector<double>& s) {
  TraceIntegral r;
  r.integrand = s;
  r.slices = 1;
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    const double panel = 0.5 * (s[k] + s[k + 1]) * (t[k + 1] - t[k]);
    r.value += panel;
    r.truncation = panel;
    r.slices = static_cast<int>(k) + 2;
    if (r.value > 0 && panel < 1e-12 * r.value) break;
  }
  return r;
}

}  // namespace

TraceIntegral trilinear_functional(const SemigroupTrace& a, const SemigroupTrace& b,
                                   const SemigroupTrace& c) {
  require_aligned(a, b);
  require_aligned(a, c);
  const GradientSlots slots = gradient_slots(a.grid);
  std::vector<double> s(a.size());
  for (int k = 0; k < a.size(); ++k) {
    const RealVector na = a.grad[k].colwise().norm(), nb = b.grad[k].colwise().norm();
    double v = 0;
    for (int j = 0; j < slots.size(); ++j) v += na(j) * nb(j) * std::abs(c.u[k](slots.node[j]));
    s[k] = v * slots.weight;
  }
  return integrate_slices(c.times, s);
}

TraceIntegral bilinear_functional(const SemigroupTrace& a, const SemigroupTrace& b) {
  require_aligned(a, b);
  const GradientSlots slots = gradient_slots(a.grid);
  std::vector<double> s(a.size());
  for (int k = 0; k < a.size(); ++k)
    s[k] = a.grad[k].colwise().norm().dot(b.grad[k].colwise().norm()) * slots.weight;
  return integrate_slices(a.times, s);
}

double mos_def_minimum(const std::vector<double>& p, const std::vector<double>& f) {
  if (p.size() != f.size() || p.size() < 2) throw SchemaError("mos_def: size mismatch");
  double inv = 0, v = 1;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (!(p[j] > 1) || !(f[j] > 0)) throw SchemaError("mos_def: needs p_j > 1 and f_j > 0");
    inv += 1.0 / p[j];
    v *= std::pow(p[j], 1.0 / p[j]) * f[j];
  }
  if (std::abs(inv - 1.0) > 1e-12) throw SchemaError("mos_def: sum of 1/p_j must be 1");
  return v;
}

// Damped Newton in log a_j with the last coordinate eliminated by the product constraint.
double mos_def_numeric(const std::vector<double>& p, const std::vector<double>& f) {
  mos_def_minimum(p, f);
  const int n = static_cast<int>(p.size()), m = n - 1;
  std::vector<double> c(n);
  for (int j = 0; j < n; ++j) c[j] = std::pow(f[j], p[j]);
  auto terms = [&](const RealVector& s) {
    RealVector e(n);
    double last = 0;
    for (int j = 0; j < m; ++j) {
      e(j) = c[j] * std::exp(p[j] * s(j));
      last -= s(j);
    }
    e(m) = c[m] * std::exp(p[m] * last);
    return e;
  };
  RealVector s = RealVector::Zero(m);
  double F = terms(s).sum();
  for (int it = 0; it < 200; ++it) {
    const RealVector e = terms(s);
    RealVector grad(m);
    RealMatrix H = RealMatrix::Constant(m, m, p[m] * p[m] * e(m));
    for (int j = 0; j < m; ++j) {
      grad(j) = p[j] * e(j) - p[m] * e(m);
      H(j, j) += p[j] * p[j] * e(j);
    }
    const RealVector step = H.ldlt().solve(-grad);
    const double dec = -grad.dot(step);
    if (dec < 1e-30 * F) break;
    double a = 1;
    while (a > 1e-12) {
      const double Fn = terms(s + a * step).sum();
      if (Fn <= F - 0.25 * a * dec) {
        s += a * step;
        F = Fn;
        break;
      }
      a *= 0.5;
    }
    if (a <= 1e-12) break;
  }
  return F;
}

EmbeddingResult embedding_ratio(const EmbeddingInput& in, const EmbeddingOptions& opt) {
  EmbeddingResult res;
  const HolderTriple& t = in.triple;
  t.validate();
  res.star = star_conditions(in.fields[0], in.fields[1], in.fields[2], t);
  bool mixed = false;
  for (const auto& bc : in.bcs) mixed = mixed || bc.kind == BCKind::Mixed;
  if (mixed ? !res.star.max_elliptic : !res.star.pass)
    throw PreconditionError(mixed ? "embedding: fields are not max{p,q,r}-elliptic"
                                  : "embedding: star conditions fail");
  if (!(opt.scale_ab > 0)) throw SchemaError("embedding: time scale must be positive");

  std::array<DiscreteOperator, 3> ops;
  std::array<ComplexVector, 3> data;
  const double exps[3] = {t.p, t.q, t.r};
  for (int k = 0; k < 3; ++k) {
    ops[k] = assemble_operator(in.fields[k], in.grid, in.bcs[k]);
    data[k] = ops[k].sample(in.inputs[k]);
    res.norms[k] = ops[k].norm(data[k], exps[k]);
    if (!(res.norms[k] > 0)) throw SchemaError("embedding: zero-norm input");
  }
  const double t_end = opt.t_end > 0
                           ? opt.t_end
                           : std::max(decay_horizon(ops[0]), decay_horizon(ops[1])) / opt.scale_ab;
  const TimeGrid tg = geometric_time_grid(in.grid.h, t_end, opt.rho);
  const TimeGrid tab = scaled_time_grid(tg, opt.scale_ab);
  const SemigroupTrace ta = evolve(ops[0], data[0], tab, opt.scheme);
  const SemigroupTrace tb = evolve(ops[1], data[1], tab, opt.scheme);
  SemigroupTrace tc = evolve(ops[2], data[2], tg, opt.scheme);
  const TraceIntegral I = trilinear_functional(ta, tb, tc);
  res.functional = I.value;
  res.truncation = I.truncation;
  res.time_steps = static_cast<int>(tg.t.size()) - 1;
  res.contractivity_excess =
      std::max({ta.contractivity_excess, tb.contractivity_excess, tc.contractivity_excess});
  res.ratio = I.value / (res.norms[0] * res.norms[1] * res.norms[2]);
  res.sum_form_ratio =
      I.value / mos_def_minimum({t.p, t.q, t.r}, {res.norms[0], res.norms[1], res.norms[2]});
  return res;
}

BilinearResult bilinear_ratio(const GridDomain& g, const MatrixField& A, const MatrixField& B,
                              const BoundaryCondition& bcA, const BoundaryCondition& bcB,
                              double p, double q, const GridFunction& f, const GridFunction& gf,
                              const EmbeddingOptions& opt) {
  if (!(p > 1 && q > 1) || std::abs(1.0 / p + 1.0 / q - 1.0) > 1e-12)
    throw SchemaError("bilinear: exponents must be conjugate");
  if (!(A.delta(p) > 0) || !(B.delta(q) > 0))
    throw PreconditionError("bilinear: fields must be p-elliptic");
  const DiscreteOperator oa = assemble_operator(A, g, bcA), ob = assemble_operator(B, g, bcB);
  const ComplexVector fa = oa.sample(f), gb = ob.sample(gf);
  BilinearResult r;
  r.norm_f = oa.norm(fa, p);
  r.norm_g = ob.norm(gb, q);
  const double t_end = opt.t_end > 0 ? opt.t_end : std::max(decay_horizon(oa), decay_horizon(ob));
  const TimeGrid tg = geometric_time_grid(g.h, t_end, opt.rho);
  const TraceIntegral I =
      bilinear_functional(evolve(oa, fa, tg, opt.scheme), evolve(ob, gb, tg, opt.scheme));
  r.functional = I.value;
  r.truncation = I.truncation;
  r.ratio = (r.norm_f > 0 && r.norm_g > 0) ? I.value / (r.norm_f * r.norm_g) : 0.0;
  return r;
}

SquareFunctionResult modified_square_function(const DiscreteOperator& opA, const ComplexVector& f,
                                              double p, const TimeGrid& tg) {
  if (!(p >= 2)) throw PreconditionError("square function needs p >= 2");
  if (!(opA.field.delta(p) > 0)) throw PreconditionError("square function needs a p-elliptic field");
  const GridDomain& g = opA.grid;
  const DiscreteOperator heat = assemble_operator(
      MatrixField::constant(g, ComplexMatrix::Identity(g.dim, g.dim)), g, BoundaryCondition::neumann());
  const FunctionalCalculus smoother(heat);
  const SemigroupTrace tr = evolve(opA, f, tg);

  RealVector acc = RealVector::Zero(g.num_nodes()), prev;
  for (int k = 0; k < tr.size(); ++k) {
    ComplexVector slice = ComplexVector::Zero(g.num_nodes());
    const RealVector sq = tr.grad[k].colwise().squaredNorm();
    for (int j = 0; j < opA.slots.size(); ++j) slice(opA.slots.node[j]) += opA.slots.weight * sq(j);
    for (int n = 0; n < g.num_nodes(); ++n)
      if (heat.node_mass(n) > 0) slice(n) /= heat.node_mass(n);
    const RealVector cur =
        heat.to_nodes(smoother.apply(fn::exp_decay(tr.times[k]), heat.from_nodes(slice))).real();
    if (k > 0) acc += 0.5 * (tr.times[k] - tr.times[k - 1]) * (cur + prev);
    prev = cur;
  }
  SquareFunctionResult r;
  r.G = acc.cwiseMax(0.0).cwiseSqrt();
  r.norm_G = lp_norm(heat.node_mass, r.G.cast<Complex>(), p);
  r.norm_f = lp_norm(heat.node_mass, opA.to_nodes(f), p);
  r.ratio = r.norm_f > 0 ? r.norm_G / r.norm_f : 0.0;
  return r;
}

RealVector conical_functional(const SemigroupTrace& tr) {
  const GridDomain& g = tr.grid;
  if (g.dim != 1) throw SchemaError("conical functional is implemented on 1D grids");
  const int nn = g.num_nodes();
  RealVector acc = RealVector::Zero(nn), prev(nn), cur(nn);
  for (int k = 0; k < tr.size(); ++k) {
    // both corner samples of a 1D cell carry the same gradient
    RealVector cell_sq(g.nx);
    for (int c = 0; c < g.nx; ++c) cell_sq(c) = std::norm(tr.grad[k](0, 2 * c));
    const double t = tr.times[k];
    for (int i = 0; i < nn; ++i) {
      if (t == 0) {
        cur(i) = (i > 0 ? cell_sq(i - 1) : 0.0) + (i < g.nx ? cell_sq(i) : 0.0);
        continue;
      }
      const double x = i * g.h, r = std::sqrt(t);
      double v = 0;
      for (int c = 0; c < g.nx; ++c) {
        const double lo = std::max(c * g.h, x - r), hi = std::min((c + 1) * g.h, x + r);
        if (hi > lo) v += (hi - lo) * cell_sq(c);
      }
      cur(i) = v / r;
    }
    if (k > 0) acc += 0.5 * (tr.times[k] - tr.times[k - 1]) * (cur + prev);
    prev = cur;
  }
  return acc.cwiseSqrt();
}

namespace {

void require_same_space(const DiscreteOperator& a, const DiscreteOperator& b) {
  if (a.grid.id != b.grid.id || a.nodes != b.nodes)
    throw SchemaError("paraproduct: operators must share grid and boundary condition");
}

// Composite Gauss-Legendre on [0, T] with panels doubling from t_first.
template <typename F>
Complex integrate_time(const F& f, double T, double t_first) {
  static const Rule1D gl = gauss_legendre(12);
  Complex s = 0;
  double a = 0, b = std::min(t_first, T);
  while (a < T) {
    for (std::size_t i = 0; i < gl.x.size(); ++i) s += gl.w[i] * (b - a) * f(a + (b - a) * gl.x[i]);
    a = b;
    b = std::min(2 * b, T);
  }
  return s;
}

}  // namespace

ParaproductResult paraproduct(const DiscreteOperator& A, const DiscreteOperator& B,
                              const DiscreteOperator& C, const ComplexVector& f,
                              const ComplexVector& g, const ComplexVector& h,
                              const HolderTriple& t) {
  require_same_space(A, B);
  require_same_space(A, C);
  const FunctionalCalculus fa(A), fb(B), fc(C);
  const GridDomain& grid = A.grid;
  const GradientSlots& sl = A.slots;
  const double T = std::max({decay_horizon(A), decay_horizon(B), decay_horizon(C)});

  auto derivative = [&](double tt) {
    const ComplexVector u = fa.apply(fn::exp_decay(tt), f);
    const ComplexVector v = fb.apply(fn::exp_decay(tt), g);
    const ComplexVector w = fc.apply(fn::exp_decay(tt), h);
    return (A.K * u).cwiseProduct(v).cwiseProduct(w).sum();
  };
  auto gradient = [&](double tt) {
    const ComplexVector u = A.to_nodes(fa.apply(fn::exp_decay(tt), f));
    const ComplexVector v = A.to_nodes(fb.apply(fn::exp_decay(tt), g));
    const ComplexVector w = A.to_nodes(fc.apply(fn::exp_decay(tt), h));
    const ComplexMatrix Gu = nodal_gradient(grid, sl, u), Gv = nodal_gradient(grid, sl, v),
                        Gw = nodal_gradient(grid, sl, w);
    Complex s = 0;
    for (int j = 0; j < sl.size(); ++j) {
      const ComplexVector AGu = A.field.cells[sl.cell[j]] * Gu.col(j);
      for (int i = 0; i < grid.dim; ++i) {
        // discrete product rule along the edge: averages of the undifferentiated factor
        const int c = sl.cell[j], k = sl.corner[j];
        const int lo = i == 0 ? grid.corner_node(c, k & 2) : grid.corner_node(c, k & 1);
        const int hi = i == 0 ? grid.corner_node(c, (k & 2) | 1) : grid.corner_node(c, (k & 1) | 2);
        const Complex wbar = 0.5 * (w(lo) + w(hi)), vbar = 0.5 * (v(lo) + v(hi));
        s += AGu(i) * (wbar * Gv(i, j) + vbar * Gw(i, j));
      }
    }
    return s * sl.weight;
  };

  const double t_first = 1e-3 * grid.h * grid.h;
  ParaproductResult r;
  r.derivative_form = integrate_time(derivative, T, t_first);
  r.gradient_form = integrate_time(gradient, T, t_first);
  r.relative_gap = std::abs(r.derivative_form - r.gradient_form) /
                   std::max(std::abs(r.derivative_form), 1e-300);
  if (r.derivative_form == Complex(0) && r.gradient_form == Complex(0)) r.relative_gap = 0;
  r.norms = {A.norm(f, t.p), B.norm(g, t.q), C.norm(h, t.r)};
  const double prod = r.norms[0] * r.norms[1] * r.norms[2];
  r.ratio = prod > 0 ? std::abs(r.derivative_form) / prod : 0.0;
  return r;
}

double telescoping_gap(const DiscreteOperator& A, const DiscreteOperator& B,
                       const DiscreteOperator& C, const ComplexVector& f, const ComplexVector& g,
                       const ComplexVector& h, double T) {
  require_same_space(A, B);
  require_same_space(A, C);
  const FunctionalCalculus fa(A), fb(B), fc(C);
  auto product = [&](double tt) {
    const ComplexVector u = fa.apply(fn::exp_decay(tt), f), v = fb.apply(fn::exp_decay(tt), g),
                        w = fc.apply(fn::exp_decay(tt), h);
    return A.mass.cast<Complex>().cwiseProduct(u).cwiseProduct(v).cwiseProduct(w).sum();
  };
  auto rate = [&](double tt) {
    const ComplexVector u = fa.apply(fn::exp_decay(tt), f), v = fb.apply(fn::exp_decay(tt), g),
                        w = fc.apply(fn::exp_decay(tt), h);
    return ((A.K * u).cwiseProduct(v).cwiseProduct(w) + (B.K * v).cwiseProduct(u).cwiseProduct(w) +
            (C.K * w).cwiseProduct(u).cwiseProduct(v))
        .sum();
  };
  const Complex lhs = integrate_time(rate, T, 1e-3 * A.grid.h * A.grid.h);
  const Complex rhs = product(0) - product(T);
  return std::abs(lhs - rhs) / std::max(std::abs(product(0)), 1e-300);
}

KatoPonceResult kato_ponce_check(const DiscreteOperator& op, const FunctionalCalculus& fc,
                                 double beta, const KatoPonceExponents& e, const ComplexVector& f,
                                 const ComplexVector& g) {
  for (double x : {e.p1, e.q1, e.p2, e.q2, e.r})
    if (!(x > 1) || !std::isfinite(x)) throw SchemaError("kato_ponce: exponents must lie in (1, inf)");
  const double rho = e.r / (e.r - 1);
  if (std::abs(1 / e.p1 + 1 / e.q1 - 1 / rho) > 1e-12 || std::abs(1 / e.p2 + 1 / e.q2 - 1 / rho) > 1e-12)
    throw SchemaError("kato_ponce: exponents do not scale to 1/r'");
  if (!(beta > 0 && beta < 1 / rho)) throw PreconditionError("kato_ponce: beta outside (0, 1/r')");
  if (op.bc.kind != BCKind::Dirichlet) throw PreconditionError("kato_ponce: needs Dirichlet boundary");
  const double mx = std::max({e.p1, e.q1, e.p2, e.q2, e.r});
  if (!(op.field.delta(mx) > 0)) throw PreconditionError("kato_ponce: field is not max-elliptic");
  const ComplexVector fg = f.cwiseProduct(g);
  const auto Lb = fn::power(beta);
  KatoPonceResult r;
  r.lhs = op.norm(fc.apply(Lb, fg), rho);
  r.rhs = op.norm(fc.apply(Lb, f), e.p1) * op.norm(g, e.q1) +
          op.norm(f, e.p2) * op.norm(fc.apply(Lb, g), e.q2);
  r.ratio = r.rhs > 0 ? r.lhs / r.rhs : 0.0;
  const double hold = op.norm(f, e.p1) * op.norm(g, e.q1) + op.norm(f, e.p2) * op.norm(g, e.q2);
  r.holder_ratio = hold > 0 ? op.norm(fg, rho) / hold : 0.0;
  return r;
}

CalderonCurves calderon_check(const DiscreteOperator& op, const FunctionalCalculus& fc, int alpha,
                              const ComplexVector& f, double t_min) {
  if (alpha < 1) throw SchemaError("calderon: alpha must be a positive integer");
  const double nf = op.norm(f);
  if (!(nf > 0)) throw SchemaError("calderon: zero input");
  auto err = [&](double t) -> ComplexVector { return fc.apply(fn::phi(alpha, t), f) - f; };
  CalderonCurves c;
  constexpr int kPoints = 17;
  for (int j = 0; j < kPoints; ++j) {
    const double t = 0.1 * std::pow(t_min / 0.1, double(j) / (kPoints - 1));
    c.t_small.push_back(t);
    c.gap.push_back(op.norm(err(t)) / nf);
  }
  for (int j = 0; j <= 20; ++j) {
    const double t = 0.1 * std::pow(2.0, j);
    c.t_large.push_back(t);
    c.tail.push_back(op.norm(fc.apply(fn::phi(alpha, t), f)) / nf);
  }
  auto nonincreasing = [](const std::vector<double>& v) {
    for (std::size_t j = 0; j + 1 < v.size(); ++j)
      if (v[j + 1] > v[j] * (1 + 1e-9) + 1e-13) return false;
    return true;
  };
  c.gap_monotone = nonincreasing(c.gap);
  c.tail_monotone = nonincreasing(c.tail);
  c.gap_at_min = c.gap.back();
  const double k = std::pow(2.0, alpha);
  const ComplexVector e0 = (k * err(t_min) - err(2 * t_min)) / (k - 1);
  c.extrapolated_gap = op.norm(e0) / nf;
  return c;
}

double phi_sum_identity_error(const DiscreteOperator& op, const FunctionalCalculus& fc, int alpha,
                              double t) {
  const ComplexMatrix lhs = fc(fn::phi(alpha, t));
  ComplexMatrix term = fc(fn::exp_decay(t)), rhs = term;
  for (int j = 1; j < alpha; ++j) {
    term = (t / j) * (op.dense() * term);
    rhs += term;
  }
  return (lhs - rhs).cwiseAbs().maxCoeff() / std::max(1.0, lhs.cwiseAbs().maxCoeff());
}

EnergyFlowReport energy_flow(const BellmanParams& bp, const SemigroupTrace& a,
                             const SemigroupTrace& b, const SemigroupTrace& c) {
  require_aligned(a, b);
  require_aligned(a, c);
  const RealVector m = node_masses(a.grid);
  const GradientSlots slots = gradient_slots(a.grid);
  EnergyFlowReport r;
  r.times = a.times;
  for (int k = 0; k < a.size(); ++k) {
    double e = 0, bound = 0;
    for (int n = 0; n < m.size(); ++n) {
      if (!(m(n) > 0)) continue;
      const ComplexTriple z{a.u[k](n), b.u[k](n), c.u[k](n)};
      e += m(n) * bellman_value(bp, z);
      if (k == 0) bound += m(n) * bellman_majorant(bp, z);
    }
    r.energy.push_back(e);
    if (k == 0) r.bound_margin = bound - e;
    const RealVector na = a.grad[k].colwise().norm(), nb = b.grad[k].colwise().norm();
    double s = 0;
    for (int j = 0; j < slots.size(); ++j) s += na(j) * nb(j) * std::abs(c.u[k](slots.node[j]));
    r.slices.push_back(s * slots.weight);
  }
  const double smax = *std::max_element(r.slices.begin(), r.slices.end());
  r.c_empirical = kInfinity;
  r.max_increase = -kInfinity;
  for (int k = 0; k + 1 < a.size(); ++k) {
    const double dt = r.times[k + 1] - r.times[k];
    const double d = (r.energy[k] - r.energy[k + 1]) / dt;
    r.dissipation.push_back(d);
    r.max_increase = std::max(r.max_increase, r.energy[k + 1] - r.energy[k]);
    const double rk = 0.5 * (r.slices[k] + r.slices[k + 1]);
    if (rk > 1e-10 * smax) r.c_empirical = std::min(r.c_empirical, d / rk);
  }
  if (!std::isfinite(r.c_empirical)) r.c_empirical = 0;
  return r;
}

GridFunction random_smooth_function(Rng& rng, BCKind bc, int dim, int modes) {
  const bool sine = bc == BCKind::Dirichlet;
  const int k0 = sine ? 1 : 0;
  const int ny = dim == 2 ? modes : 1;
  std::vector<Complex> coef;
  for (int k = 0; k < modes; ++k)
    for (int l = 0; l < ny; ++l) coef.push_back(complex_normal(rng) / double(1 + k + l));
  return [=](double x, double y) {
    Complex v = 0;
    std::size_t idx = 0;
    for (int k = 0; k < modes; ++k)
      for (int l = 0; l < ny; ++l, ++idx) {
        const double kx = (k + k0) * M_PI, ly = (l + k0) * M_PI;
        double basis = sine ? std::sin(kx * x) : std::cos(kx * x);
        if (dim == 2) basis *= sine ? std::sin(ly * y) : std::cos(ly * y);
        v += coef[idx] * basis;
      }
    return v;
  };
}

FieldFunction random_smooth_field(Rng& rng, int d, const std::vector<double>& exps, double floor,
                                  double phase) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const ComplexMatrix A0 = random_elliptic(rng, d, exps, floor);
    double ph = phase;
    bool ok = false;
    for (int shrink = 0; shrink < 6 && !ok; ++shrink, ph *= 0.5) {
      ok = true;
      for (int i = 0; i <= 12 && ok; ++i) {
        const double th = ph * (i / 6.0 - 1.0);
        for (double s : exps) ok = ok && delta_p_exact(std::polar(1.0, th) * A0, s).value >= floor;
      }
      if (ok) break;
    }
    if (!ok) continue;
    double w[8];
    for (double& x : w) x = uniform(rng, -1.0, 1.0);
    const double amp = ph;
    return [=](double x, double y) -> ComplexMatrix {
      const double rho = 1.0 + 0.25 * std::sin(2 * M_PI * (w[0] * x + w[1] * y) + 3 * w[2]) +
                         0.25 * std::sin(2 * M_PI * (w[3] * x - w[1] * y) + 3 * w[4]);
      const double th = amp * (0.5 * std::sin(2 * M_PI * (w[5] * x + w[6] * y)) +
                               0.5 * std::cos(2 * M_PI * w[7] * (x + y)));
      return std::polar(rho, th) * A0;
    };
  }
  throw BudgetExhausted("random_smooth_field: no field met the ellipticity floor", 0.0);
}

}  // namespace pell
