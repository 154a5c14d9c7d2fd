// Command-line harness: every subcommand writes <out>/<prefix>.csv and <out>/<prefix>.json.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pelliptic/applications.hpp"
#include "pelliptic/convexity.hpp"
#include "pelliptic/perturbation.hpp"
#include "pelliptic/power_functions.hpp"
#include "pelliptic/regularized.hpp"
#include "pelliptic/suite.hpp"

using namespace pell;
using json = nlohmann::json;

namespace {

enum ExitCode {
  kOk = 0,
  kRowFailed = 1,
  kSchema = 2,
  kNonconvergence = 3,
  kBudget = 4,
  kPrecondition = 5,
  kInternal = 6
};

struct Option {
  std::string name;
  json fallback;  // number or string; also fixes the type
  std::string help;
};

struct Outcome {
  json results = json::object();
  std::string message;  // printed on stdout
};

struct Context {
  json cfg;
  std::string digest;
  std::vector<ReportRow> rows;

  double num(const std::string& k) const { return cfg.at(k).get<double>(); }
  int integer(const std::string& k) const {
    const double v = num(k);
    if (v != std::floor(v)) throw SchemaError(k + " must be an integer");
    return static_cast<int>(v);
  }
  std::string str(const std::string& k) const { return cfg.at(k).get<std::string>(); }
  std::uint64_t seed() const { return static_cast<std::uint64_t>(num("seed")); }

  ReportRow& row(const std::string& id, const std::string& metric, double value, double bound,
                 double margin, double tol) {
    ReportRow r;
    r.experiment_id = id;
    r.metric = metric;
    r.value = value;
    r.bound = bound;
    r.margin = margin;
    r.tolerance = tol;
    r.pass = std::isfinite(value) && margin >= -tol;
    r.seed = seed();
    r.provenance = digest;
    rows.push_back(r);
    return rows.back();
  }
  ReportRow& upper(const std::string& id, const std::string& metric, double v, double bound, double tol = 0) {
    return row(id, metric, v, bound, bound - v, tol);
  }
  ReportRow& lower(const std::string& id, const std::string& metric, double v, double bound, double tol = 0) {
    return row(id, metric, v, bound, v - bound, tol);
  }
  ReportRow& measure(const std::string& id, const std::string& metric, double v) {
    ReportRow& r = row(id, metric, v, kInfinity, kInfinity, 0);
    r.pass = std::isfinite(v);
    return r;
  }
  ReportRow& flag(const std::string& id, const std::string& metric, bool ok) {
    return row(id, metric, ok ? 1 : 0, 1, ok ? 0 : -1, 0);
  }
};

// ---- input specs ----

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);)
    if (!item.empty()) out.push_back(item);
  return out;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw SchemaError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw SchemaError("not a number: '" + s + "'");
  return v;
}

std::vector<double> number_list(const std::string& s) {
  std::vector<double> v;
  for (const auto& item : split(s, ',')) v.push_back(to_double(item));
  return v;
}

std::string prefix_arg(const std::string& spec, const std::string& head) {
  return spec.compare(0, head.size(), head) == 0 ? spec.substr(head.size()) : std::string();
}

// identity | phase:<angle> | random | elliptic | entries:<re>,<im>,... (row major)
ComplexMatrix matrix_spec(const std::string& spec, int d, const std::vector<double>& exps, Rng& g) {
  if (spec == "identity") return ComplexMatrix::Identity(d, d);
  if (spec == "random") return random_complex_matrix(g, d);
  if (spec == "elliptic") return random_elliptic(g, d, exps, 0.05);
  if (const std::string a = prefix_arg(spec, "phase:"); !a.empty())
    return std::polar(1.0, to_double(a)) * ComplexMatrix::Identity(d, d);
  if (const std::string a = prefix_arg(spec, "entries:"); !a.empty()) {
    const std::vector<double> v = number_list(a);
    if (static_cast<int>(v.size()) != 2 * d * d) throw SchemaError("entries: need 2 d^2 numbers");
    ComplexMatrix m(d, d);
    for (int i = 0; i < d * d; ++i) m(i / d, i % d) = Complex(v[2 * i], v[2 * i + 1]);
    return m;
  }
  throw SchemaError("unknown matrix spec '" + spec + "'");
}

// constant matrix specs, or smooth-random for a variable field
FieldFunction field_spec(const std::string& spec, int d, const std::vector<double>& exps, Rng& g) {
  if (spec == "smooth-random") return random_smooth_field(g, d, exps, 0.05);
  const ComplexMatrix m = matrix_spec(spec, d, exps, g);
  return [m](double, double) { return m; };
}

GridFunction input_spec(const std::string& spec, BCKind bc, int dim, Rng& g) {
  if (spec == "random") return random_smooth_function(g, bc, dim);
  if (spec == "sine")
    return [dim](double x, double y) {
      return Complex(std::sin(M_PI * x) * (dim == 2 ? std::sin(M_PI * y) : 1.0));
    };
  if (spec == "cosine")
    return [dim](double x, double y) {
      return Complex(std::cos(M_PI * x) * (dim == 2 ? std::cos(M_PI * y) : 1.0));
    };
  if (spec == "one") return [](double, double) { return Complex(1); };
  throw SchemaError("unknown input spec '" + spec + "'");
}

GridDomain grid_of(const Context& c) {
  const int dim = c.integer("dim"), n = c.integer("n");
  if (dim != 1 && dim != 2) throw SchemaError("dim must be 1 or 2");
  if (n < 2) throw SchemaError("n must be at least 2");
  return dim == 1 ? GridDomain::interval(n) : GridDomain::box(n, n);
}

BoundaryCondition bc_of(const Context& c, const GridDomain& g, const std::string& key = "bc") {
  const BCKind kind = parse_bc(c.str(key));
  if (kind == BCKind::Mixed)
    return BoundaryCondition::mixed(g, [](double x, double) { return x < 1e-12; });
  return {kind, {}};
}

HolderTriple triple_of(const Context& c) { return HolderTriple::from_pq(c.num("p"), c.num("q")); }

BellmanParams bellman_of(const Context& c) { return BellmanParams::make(triple_of(c), c.num("D"), c.num("E")); }

std::vector<double> exps_of(const HolderTriple& t) { return {2.0, t.p, t.q, t.r}; }

CoefficientTriple matrices_of(const Context& c, int d, const HolderTriple& t, Rng& g) {
  return {matrix_spec(c.str("matrix-a"), d, exps_of(t), g), matrix_spec(c.str("matrix-b"), d, exps_of(t), g),
          matrix_spec(c.str("matrix-c"), d, exps_of(t), g)};
}

json complex_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (int j = 0; j < m.cols(); ++j) r.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(r);
  }
  return rows;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// ---- commands ----

const std::vector<Option> kBellmanOpts = {{"p", 4.0, "first exponent"},
                                          {"q", 4.0, "second exponent"},
                                          {"D", 0.0, "Bellman parameter D (unused for p = q)"},
                                          {"E", 4.0, "Bellman parameter E"}};

const std::vector<Option> kTripleMatrices = {{"matrix-a", "identity", "A: identity|phase:<t>|random|elliptic|entries:..."},
                                             {"matrix-b", "identity", "B, same forms as matrix-a"},
                                             {"matrix-c", "identity", "C, same forms as matrix-a"}};

const std::vector<Option> kGridOpts = {{"dim", 1.0, "1 or 2"},
                                       {"n", 64.0, "cells per side"},
                                       {"bc", "dirichlet", "dirichlet|neumann|mixed (Dirichlet on x = 0)"}};

void run_delta(Context& c, Outcome& o) {
  Rng g = make_stream(c.seed(), 1);
  const int d = c.integer("d");
  const double p = c.num("p");
  const ComplexMatrix a = matrix_spec(c.str("matrix"), d, {2.0, p}, g);
  const auto res = delta_p_exact(a, p);
  c.measure("delta", "delta_p", res.value);
  o.results["delta_p"] = res.value;
  o.results["matrix"] = complex_json(a);
  if (const int s = c.integer("samples"); s > 0) {
    const double bf = delta_p_bruteforce(a, p, s, g());
    c.upper("delta-bruteforce", "abs-gap", std::abs(bf - res.value), 1e-3);
    o.results["bruteforce"] = bf;
  }
  o.message = fmt(res.value);
}

void run_bellman_eval(Context& c, Outcome& o) {
  const BellmanParams bp = bellman_of(c);
  const std::vector<double> v = number_list(c.str("point"));
  if (v.size() != 6) throw SchemaError("point needs six numbers: Re u, Im u, Re v, Im v, Re w, Im w");
  const ComplexTriple z = {Complex(v[0], v[1]), Complex(v[2], v[3]), Complex(v[4], v[5])};
  const double X = bellman_value(bp, z);
  const Vec6 grad = bellman_gradient(bp, z);
  const BoundReport b = bound_checks(bp, z);
  c.measure("bellman", "value", X);
  c.upper("bellman", "upper-bound-excess", b.upper_margin / (1 + bellman_majorant(bp, z)), 0, 1e-12);
  o.results["value"] = X;
  o.results["gradient"] = std::vector<double>(grad.data(), grad.data() + 6);
  o.results["domain"] = to_string(classify(bp, z));
  o.results["majorant"] = bellman_majorant(bp, z);
  o.message = fmt(X);
}

void run_convexity(Context& c, Outcome& o) {
  const BellmanParams bp = bellman_of(c);
  Rng g = make_stream(c.seed(), 3);
  const CoefficientTriple abc = matrices_of(c, c.integer("d"), bp.triple, g);
  std::vector<DomainLabel> doms;
  for (int j = 1; j <= domain_count(bp); ++j) doms.push_back(DomainLabel(j));
  const ConvexityReport r = convexity_check(bp, {abc}, doms, c.integer("samples"), g());
  c.lower("convexity", "min-rel-eigenvalue", r.min_rel_eig, 0, 1e-12);
  c.lower("convexity", "c-empirical", r.c_empirical, 0).pass = r.c_empirical > 0;
  o.results["min_rel_eig"] = r.min_rel_eig;
  o.results["c_empirical"] = r.c_empirical;
  o.results["domain_min_rel_eig"] = r.domain_min_rel_eig;
  o.message = "min_rel_eig " + fmt(r.min_rel_eig) + " c " + fmt(r.c_empirical);
}

void run_select_params(Context& c, Outcome& o) {
  const HolderTriple t = triple_of(c);
  Rng g = make_stream(c.seed(), 4);
  const CoefficientTriple abc = matrices_of(c, c.integer("d"), t, g);
  const StarReport star = star_conditions(abc[0], abc[1], abc[2], t);
  if (!star.pass) throw PreconditionError("select-params: star conditions fail");
  SelectOptions so;
  so.samples_per_domain = c.integer("samples-per-domain");
  so.seed = g();
  const SelectResult r = select_params({abc}, t, so);
  c.lower("select-params", "verification-min-rel-eigenvalue", r.verification.min_rel_eig, 0, 1e-12);
  c.lower("select-params", "verification-c-empirical", r.verification.c_empirical, 0).pass =
      r.verification.c_empirical > 0;
  o.results["D"] = r.params.D;
  o.results["E"] = r.params.E;
  o.results["D_doublings"] = r.D_doublings;
  o.results["E_doublings"] = r.E_doublings;
  o.message = "D " + fmt(r.params.D) + " E " + fmt(r.params.E);
}

void run_mollify_check(Context& c, Outcome& o) {
  const BellmanParams bp = bellman_of(c);
  Rng g = make_stream(c.seed(), 5);
  const CoefficientTriple abc = matrices_of(c, 1, bp.triple, g);
  const Mollifier<3> mol(std::max(3, c.integer("order")));
  const VoltarenConstants k = voltaren_constants(bp, abc, 20000, g());
  const int samples = c.integer("samples"), order = c.integer("order");
  json per = json::array();
  for (double nu : number_list(c.str("nu"))) {
    const std::string id = "nu" + fmt(nu);
    const NaklofenReport r = naklofen_check(bp, abc, k, mol, nu, samples, g(), order);
    const IzumrudReport z = izumrud_check(bp, mol, nu, samples, g(), order);
    c.lower(id, "naklofen-a-margin", r.a_margin, 0, 1e-9);
    c.lower(id, "naklofen-b-margin", r.b_margin, 0);
    c.lower(id, "naklofen-c-margin", r.c_margin, 0);
    c.lower(id, "naklofen-c-min-rel-eigenvalue", r.c_min_rel_eig, 0, 1e-12);
    for (int j = 0; j < 3; ++j) c.measure(id, "izumrud-constant-" + std::to_string(j + 1), z.constants[j]);
    c.upper(id, "izumrud-origin-gradient", z.origin_gradient, 1e-10);
    per.push_back({{"nu", nu}, {"a_constant", r.a_constant}, {"b_constant", r.b_constant},
                   {"c_constant", r.c_constant}, {"izumrud", z.constants}, {"quad_error", r.quad_error}});
  }
  o.results["per_nu"] = per;
  o.message = std::to_string(per.size()) + " scales checked";
}

void run_perturb_check(Context& c, Outcome& o) {
  Rng g = make_stream(c.seed(), 6);
  const double s = c.num("s"), n = c.num("n"), eps = c.num("eps");
  MatrixTuple A;
  for (const char* key : {"matrix-a", "matrix-b", "matrix-c"}) A.push_back(matrix_spec(c.str(key), 1, {2.0, s + eps}, g));
  const PsResult ps = build_Ps(s + eps, A, 20000, g());
  const BuickReport r = buick_properties_check(s, n, eps, A, ps.c, c.integer("samples"), g());
  c.flag("buick", "i-decay", r.i_decay);
  c.upper("buick", "i-c1-mismatch", r.c1_mismatch, 1e-6).pass = r.i_c1;
  c.lower("buick", "ii-convex-margin", r.min_convex_margin, 0).pass = r.ii_convex;
  c.lower("buick", "ii-outer-margin", r.min_outer_margin, 0).pass = r.ii_outer;
  c.flag("buick", "iii-growth", r.iii_growth);
  c.flag("buick", "iv-linear", r.iv_linear);
  c.measure("buick", "v-hessian-sup", r.hess_sup).pass = r.v_bounded;
  o.results["c"] = ps.c;
  o.results["growth_ratios"] = {r.growth_ratio1, r.growth_ratio2};
  o.results["linear_ratio"] = r.linear_ratio;
  o.message = r.pass() ? "all properties hold" : "some property fails";
}

EmbeddingInput embedding_of(const Context& c, Rng& g) {
  EmbeddingInput in;
  in.grid = grid_of(c);
  in.triple = triple_of(c);
  const BoundaryCondition bc = bc_of(c, in.grid);
  const char* keys[3] = {"field-a", "field-b", "field-c"};
  for (int j = 0; j < 3; ++j) {
    in.fields[j] = MatrixField::from_function(in.grid, field_spec(c.str(keys[j]), in.grid.dim, exps_of(in.triple), g));
    in.bcs[j] = bc;
    in.inputs[j] = input_spec(c.str("input"), bc.kind, in.grid.dim, g);
  }
  return in;
}

void run_embed(Context& c, Outcome& o) {
  Rng g = make_stream(c.seed(), 7);
  const EmbeddingInput in = embedding_of(c, g);
  EmbeddingOptions opt;
  opt.rho = c.num("rho");
  opt.scale_ab = c.num("scale");
  const EmbeddingResult r = embedding_ratio(in, opt);
  ReportRow& row = c.measure("embed", "ratio", r.ratio);
  row.h = in.grid.h;
  row.n_t = r.time_steps;
  c.measure("embed", "sum-form-ratio", r.sum_form_ratio).h = in.grid.h;
  c.upper("embed", "contractivity-excess", r.contractivity_excess, 1e-10);
  o.results["functional"] = r.functional;
  o.results["truncation"] = r.truncation;
  o.results["norms"] = r.norms;
  o.results["ratio"] = r.ratio;
  o.message = fmt(r.ratio);
}

void run_bilinear(Context& c, Outcome& o) {
  Rng g = make_stream(c.seed(), 8);
  const GridDomain grid = grid_of(c);
  const BoundaryCondition bc = bc_of(c, grid);
  const double p = c.num("p"), q = conjugate_exponent(p);
  const auto fa = MatrixField::from_function(grid, field_spec(c.str("field-a"), grid.dim, {2.0, p, q}, g));
  const auto fb = MatrixField::from_function(grid, field_spec(c.str("field-b"), grid.dim, {2.0, p, q}, g));
  const GridFunction f = input_spec(c.str("input"), bc.kind, grid.dim, g);
  const GridFunction h = input_spec(c.str("input"), bc.kind, grid.dim, g);
  const BilinearResult r = bilinear_ratio(grid, fa, fb, bc, bc, p, q, f, h);
  c.measure("bilinear", "ratio", r.ratio).h = grid.h;
  o.results["functional"] = r.functional;
  o.results["norms"] = {r.norm_f, r.norm_g};
  o.results["ratio"] = r.ratio;
  o.message = fmt(r.ratio);
}

void run_squarefn(Context& c, Outcome& o) {
  Rng g = make_stream(c.seed(), 9);
  const GridDomain grid = grid_of(c);
  const BoundaryCondition bc = bc_of(c, grid);
  const double p = c.num("p");
  if (!(p >= 2)) throw PreconditionError("squarefn: p must be at least 2");
  const DiscreteOperator op = assemble_operator(
      MatrixField::from_function(grid, field_spec(c.str("field-a"), grid.dim, {2.0, p}, g)), grid, bc);
  const TimeGrid tg = geometric_time_grid(grid.h, decay_horizon(op));
  const SquareFunctionResult r =
      modified_square_function(op, op.sample(input_spec(c.str("input"), bc.kind, grid.dim, g)), p, tg);
  c.measure("squarefn", "ratio", r.ratio).h = grid.h;
  o.results["norm_G"] = r.norm_G;
  o.results["norm_f"] = r.norm_f;
  o.results["ratio"] = r.ratio;
  o.message = fmt(r.ratio);
}

void run_paraproduct(Context& c, Outcome& o) {
  Rng g = make_stream(c.seed(), 10);
  const GridDomain grid = grid_of(c);
  const BoundaryCondition bc = bc_of(c, grid);
  const HolderTriple t = triple_of(c);
  std::array<DiscreteOperator, 3> ops;
  std::array<ComplexVector, 3> in;
  const char* keys[3] = {"field-a", "field-b", "field-c"};
  for (int j = 0; j < 3; ++j) {
    ops[j] = assemble_operator(MatrixField::from_function(grid, field_spec(c.str(keys[j]), grid.dim, exps_of(t), g)),
                               grid, bc);
    in[j] = ops[j].sample(input_spec(c.str("input"), bc.kind, grid.dim, g));
  }
  const ParaproductResult r = paraproduct(ops[0], ops[1], ops[2], in[0], in[1], in[2], t);
  c.upper("paraproduct", "rel-gap-between-forms", r.relative_gap, 1e-6).h = grid.h;
  c.measure("paraproduct", "ratio", r.ratio).h = grid.h;
  o.results["derivative_form"] = {r.derivative_form.real(), r.derivative_form.imag()};
  o.results["gradient_form"] = {r.gradient_form.real(), r.gradient_form.imag()};
  o.results["ratio"] = r.ratio;
  o.message = fmt(r.relative_gap);
}

void run_kato_ponce(Context& c, Outcome& o) {
  Rng g = make_stream(c.seed(), 11);
  const int n = c.integer("n");
  if (n < 2) throw SchemaError("n must be at least 2");
  const GridDomain grid = GridDomain::interval(n);
  const KatoPonceExponents e{c.num("p1"), c.num("q1"), c.num("p2"), c.num("q2"), c.num("r")};
  const double top = std::max({e.p1, e.q1, e.p2, e.q2, e.r});
  const DiscreteOperator op = assemble_operator(
      MatrixField::from_function(grid, field_spec(c.str("field-a"), 1, {2.0, top}, g)), grid,
      BoundaryCondition::dirichlet());
  const FunctionalCalculus fc(op);
  double worst = 0, holder = 0;
  for (int k = 0; k < c.integer("draws"); ++k) {
    const ComplexVector f = op.sample(random_smooth_function(g, BCKind::Dirichlet, 1));
    const ComplexVector h = op.sample(random_smooth_function(g, BCKind::Dirichlet, 1));
    const KatoPonceResult r = kato_ponce_check(op, fc, c.num("beta"), e, f, h);
    worst = std::max(worst, r.ratio);
    holder = std::max(holder, r.holder_ratio);
  }
  c.measure("kato-ponce", "max-ratio", worst).h = grid.h;
  o.results["max_ratio"] = worst;
  o.results["max_holder_ratio"] = holder;
  o.message = fmt(worst);
}

void run_calderon(Context& c, Outcome& o) {
  Rng g = make_stream(c.seed(), 12);
  const GridDomain grid = grid_of(c);
  const DiscreteOperator op = assemble_operator(
      MatrixField::from_function(grid, field_spec(c.str("field-a"), grid.dim, {2.0}, g)), grid,
      BoundaryCondition::dirichlet());
  const FunctionalCalculus fc(op);
  const ComplexVector f = op.sample(input_spec(c.str("input"), BCKind::Dirichlet, grid.dim, g));
  const int alpha = c.integer("alpha");
  const CalderonCurves r = calderon_check(op, fc, alpha, f, c.num("t-min"));
  c.flag("calderon", "gap-monotone", r.gap_monotone);
  c.flag("calderon", "tail-monotone", r.tail_monotone);
  c.upper("calderon", "extrapolated-gap", r.extrapolated_gap, 1e-6);
  for (std::size_t k = 0; k < r.t_small.size(); ++k)
    c.measure("calderon-gap-curve", "t=" + fmt(r.t_small[k]), r.gap[k]);
  for (std::size_t k = 0; k < r.t_large.size(); ++k)
    c.measure("calderon-tail-curve", "t=" + fmt(r.t_large[k]), r.tail[k]);
  c.upper("phi-sum-identity", "rel-gap", phi_sum_identity_error(op, fc, alpha, 0.1), 1e-10);
  o.results["extrapolated_gap"] = r.extrapolated_gap;
  o.results["gap_at_min"] = r.gap_at_min;
  o.message = fmt(r.extrapolated_gap);
}

void run_energy_flow(Context& c, Outcome& o) {
  Rng g = make_stream(c.seed(), 13);
  const HolderTriple t = triple_of(c);
  const CoefficientTriple abc = matrices_of(c, 1, t, g);
  if (!star_conditions(abc[0], abc[1], abc[2], t).pass)
    throw PreconditionError("energy-flow: star conditions fail");
  SelectOptions so;
  so.seed = g();
  const BellmanParams bp = select_params({abc}, t, so).params;
  const GridDomain grid = GridDomain::interval(c.integer("n"));
  std::array<SemigroupTrace, 3> tr;
  for (int j = 0; j < 3; ++j) {
    const DiscreteOperator op = assemble_operator(MatrixField::constant(grid, abc[j]), grid, BoundaryCondition::dirichlet());
    tr[j] = evolve(op, op.sample(input_spec(c.str("input"), BCKind::Dirichlet, 1, g)),
                   geometric_time_grid(grid.h, c.num("t-end")));
  }
  const EnergyFlowReport r = energy_flow(bp, tr[0], tr[1], tr[2]);
  c.upper("energy-flow", "max-energy-increase", r.max_increase, 1e-8).n_t = static_cast<int>(r.times.size()) - 1;
  c.lower("energy-flow", "majorant-margin", r.bound_margin, 0, 1e-12);
  c.lower("energy-flow", "dissipation-constant", r.c_empirical, 0);
  for (std::size_t k = 0; k < r.times.size(); ++k) c.measure("energy-curve", "t=" + fmt(r.times[k]), r.energy[k]);
  o.results["D"] = bp.D;
  o.results["E"] = bp.E;
  o.results["c_empirical"] = r.c_empirical;
  o.message = r.pass() ? "energy nonincreasing" : "energy check failed";
}

std::vector<int> criteria_list(const std::string& s) {
  std::vector<int> ids;
  for (const auto& part : split(s, ',')) {
    const auto dash = part.find('-');
    const int lo = static_cast<int>(to_double(part.substr(0, dash)));
    const int hi = dash == std::string::npos ? lo : static_cast<int>(to_double(part.substr(dash + 1)));
    for (int i = lo; i <= hi; ++i) {
      if (i < 1 || i > kCriteria) throw SchemaError("criterion ids run from 1 to 10");
      ids.push_back(i);
    }
  }
  return ids;
}

void run_suite(Context& c, Outcome& o) {
  SuiteConfig sc;
  sc.seed = c.seed();
  sc.digest = c.digest;
  json per = json::array();
  int failed = 0;
  for (int id : criteria_list(c.str("criteria"))) {
    const CriterionOutcome out = run_criterion(id, sc);
    c.rows.insert(c.rows.end(), out.rows.begin(), out.rows.end());
    per.push_back({{"id", id}, {"title", out.title}, {"pass", out.pass()}, {"rows", out.rows.size()}});
    if (!out.pass()) ++failed;
  }
  o.results["criteria"] = per;
  o.message = std::to_string(per.size() - failed) + "/" + std::to_string(per.size()) + " criteria pass";
}

struct Command {
  std::string name, help;
  std::vector<Option> opts;
  std::function<void(Context&, Outcome&)> run;
};

std::vector<Option> concat(std::initializer_list<std::vector<Option>> parts) {
  std::vector<Option> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

std::vector<Command> commands() {
  const std::vector<Option> seed = {{"seed", 42.0, "root seed"}};
  const std::vector<Option> embed_fields = {
      {"field-a", "identity", "matrix spec or smooth-random"},
      {"field-b", "identity", "matrix spec or smooth-random"},
      {"field-c", "identity", "matrix spec or smooth-random"},
      {"input", "random", "random|sine|cosine|one"}};
  return {
      {"delta", "p-ellipticity Delta_p of a matrix",
       concat({{{"matrix", "identity", "identity|phase:<t>|random|elliptic|entries:..."},
                {"d", 2.0, "matrix size"},
                {"p", 4.0, "exponent"},
                {"samples", 0.0, "brute-force samples, 0 skips the comparison"}},
               seed}),
       run_delta},
      {"bellman-eval", "Bellman function value, gradient and upper bound at a point",
       concat({kBellmanOpts, {{"point", "1,0,0.5,0.5,0.2,0", "Re u,Im u,Re v,Im v,Re w,Im w"}}, seed}),
       run_bellman_eval},
      {"convexity", "sampled generalized convexity of the Bellman function",
       concat({kBellmanOpts, kTripleMatrices, {{"d", 1.0, "matrix size"}, {"samples", 20000.0, "samples"}}, seed}),
       run_convexity},
      {"select-params", "doubling search for the Bellman parameters D and E",
       concat({{{"p", 4.0, "first exponent"}, {"q", 4.0, "second exponent"}},
               kTripleMatrices,
               {{"d", 1.0, "matrix size"}, {"samples-per-domain", 2000.0, "samples per domain"}},
               seed}),
       run_select_params},
      {"mollify-check", "regularized Bellman estimates at several mollifier scales",
       concat({kBellmanOpts, kTripleMatrices,
               {{"nu", "0.5,0.1,0.02", "comma-separated scales"},
                {"samples", 200.0, "samples per scale"},
                {"order", 3.0, "ball rule order"}},
               seed}),
       run_mollify_check},
      {"perturb-check", "sampled properties of the perturbed power functions",
       concat({{{"s", 3.0, "exponent"}, {"n", 4.0, "radius"}, {"eps", 0.1, "perturbation"}, {"samples", 10000.0, "samples"}},
               kTripleMatrices, seed}),
       run_perturb_check},
      {"embed", "trilinear embedding ratio",
       concat({{{"p", 4.0, "first exponent"}, {"q", 4.0, "second exponent"}}, kGridOpts, embed_fields,
               {{"rho", 1.25, "time grid ratio"}, {"scale", 1.0, "time scale of the A and B flows"}}, seed}),
       run_embed},
      {"bilinear", "bilinear embedding ratio with q = p'",
       concat({{{"p", 2.0, "exponent"}}, kGridOpts, embed_fields, seed}), run_bilinear},
      {"squarefn", "modified square function ratio",
       concat({{{"p", 4.0, "exponent, at least 2"}}, kGridOpts, embed_fields, seed}), run_squarefn},
      {"paraproduct", "paraproduct in derivative and gradient form",
       concat({{{"p", 3.0, "first exponent"}, {"q", 3.0, "second exponent"}},
               {{"dim", 1.0, "1 or 2"}, {"n", 32.0, "cells per side"}, {"bc", "dirichlet", "dirichlet|neumann|mixed"}},
               embed_fields, seed}),
       run_paraproduct},
      {"kato-ponce", "fractional Leibniz ratio on a Dirichlet interval",
       concat({{{"beta", 0.3, "power of L"},
                {"p1", 3.0, ""}, {"q1", 3.0, ""}, {"p2", 2.0, ""}, {"q2", 6.0, ""}, {"r", 3.0, ""},
                {"n", 128.0, "cells"},
                {"field-a", "identity", "matrix spec or smooth-random"},
                {"draws", 10.0, "random (f, g) pairs"}},
               seed}),
       run_kato_ponce},
      {"calderon", "phi_alpha(tL) f curves for small and large t",
       concat({{{"alpha", 2.0, "positive integer"}, {"dim", 1.0, "1 or 2"}, {"n", 64.0, "cells per side"},
                {"field-a", "identity", "matrix spec or smooth-random"},
                {"input", "sine", "random|sine"},
                {"t-min", 1e-6, "smallest t"}},
               seed}),
       run_calderon},
      {"energy-flow", "Bellman energy along the three flows",
       concat({{{"p", 4.0, "first exponent"}, {"q", 4.0, "second exponent"}}, kTripleMatrices,
               {{"n", 64.0, "cells"}, {"t-end", 10.0, "final time"}, {"input", "random", "random|sine"}}, seed}),
       run_energy_flow},
      {"suite", "all acceptance criteria",
       concat({{{"criteria", "1-10", "ids or ranges, e.g. 1,3,8-10"}}, seed}), run_suite},
  };
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot read config " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("config is not valid JSON: ") + e.what());
  }
}

// Flags first, then the config file on top; every key must belong to the command.
json effective_config(const Command& cmd, const std::map<std::string, std::string>& flags,
                      const std::string& config_path) {
  json cfg = {{"command", cmd.name}};
  std::map<std::string, const Option*> known;
  for (const auto& o : cmd.opts) {
    known[o.name] = &o;
    cfg[o.name] = o.fallback;
    if (auto it = flags.find(o.name); it != flags.end())
      cfg[o.name] = o.fallback.is_number() ? json(to_double(it->second)) : json(it->second);
  }
  if (!config_path.empty()) {
    const json file = load_config(config_path);
    if (!file.is_object()) throw SchemaError("config must be a JSON object");
    for (const auto& [key, value] : file.items()) {
      if (key == "command") {
        if (value != cmd.name) throw SchemaError("config is for command " + value.dump());
        continue;
      }
      auto it = known.find(key);
      if (it == known.end()) throw SchemaError("unknown config key '" + key + "'");
      const bool want_number = it->second->fallback.is_number();
      if (want_number ? !value.is_number() : !value.is_string())
        throw SchemaError("config key '" + key + "' has the wrong type");
      cfg[key] = value;
    }
  }
  return cfg;
}

void write_outputs(const std::string& dir, const std::string& prefix, const Context& c,
                   const Outcome& o, bool pass) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base = std::filesystem::path(dir) / prefix;
  std::ofstream csv(base.string() + ".csv");
  write_csv_header(csv);
  for (const auto& r : c.rows) write_csv_row(csv, r);
  int failed = 0;
  for (const auto& r : c.rows) failed += r.pass ? 0 : 1;
  json summary = {{"command", c.cfg.at("command")}, {"config", c.cfg},      {"config_digest", c.digest},
                  {"rows", c.rows.size()},          {"failed_rows", failed}, {"pass", pass},
                  {"results", o.results}};
  std::ofstream js(base.string() + ".json");
  js << summary.dump(2) << "\n";
  if (!csv || !js) throw std::runtime_error("cannot write reports under " + dir);
}

int run(const Command& cmd, const std::map<std::string, std::string>& flags, const std::string& config,
        const std::string& out_dir, const std::string& prefix) {
  Context c;
  c.cfg = effective_config(cmd, flags, config);
  c.digest = digest_of(c.cfg.dump());
  Outcome o;
  cmd.run(c, o);
  bool pass = true;
  for (const auto& r : c.rows) pass = pass && r.pass;
  write_outputs(out_dir, prefix.empty() ? cmd.name : prefix, c, o, pass);
  std::cout << o.message << "\n";
  return pass ? kOk : kRowFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pelliptic: p-ellipticity, Bellman function and semigroup experiments"};
  app.require_subcommand(1);
  const std::vector<Command> cmds = commands();
  std::map<std::string, std::map<std::string, std::string>> flags;
  std::string config, out_dir = ".", prefix;
  std::vector<CLI::App*> subs;
  for (const auto& cmd : cmds) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("--config", config, "JSON file whose keys override the flags");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--prefix", prefix, "report file name stem (default: command name)");
    for (const auto& o : cmd.opts) {
      const std::string shown = o.fallback.is_string() ? o.fallback.get<std::string>() : o.fallback.dump();
      sub->add_option_function<std::string>(
          "--" + o.name, [&flags, &cmd, name = o.name](const std::string& v) { flags[cmd.name][name] = v; },
          o.help + " [" + shown + "]");
    }
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kSchema;
  }
  for (std::size_t i = 0; i < cmds.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    try {
      return run(cmds[i], flags[cmds[i].name], config, out_dir, prefix);
    } catch (const SchemaError& e) {
      std::cerr << "schema error: " << e.what() << "\n";
      return kSchema;
    } catch (const std::domain_error& e) {
      std::cerr << "invalid input: " << e.what() << "\n";
      return kSchema;
    } catch (const PreconditionError& e) {
      std::cerr << "precondition failed: " << e.what() << "\n";
      return kPrecondition;
    } catch (const NonconvergenceError& e) {
      std::cerr << "nonconvergence: " << e.what() << "\n";
      return kNonconvergence;
    } catch (const SolverError& e) {
      std::cerr << "nonconvergence: " << e.what() << "\n";
      return kNonconvergence;
    } catch (const BudgetExhausted& e) {
      std::cerr << "budget exhausted: " << e.what() << "\n";
      return kBudget;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kInternal;
    }
  }
  return kSchema;
}
