#pragma once

#include <cstdint>
#include <functional>
#include <random>

#include "pelliptic/hessian_form.hpp"

namespace pell {

using Rng = std::mt19937_64;

// Root seed -> independent stream keyed by (a, b).
Rng make_stream(std::uint64_t root, std::uint64_t a, std::uint64_t b = 0);
std::uint64_t hash_string(const std::string& s);

double normal(Rng& g);
double uniform(Rng& g, double lo = 0.0, double hi = 1.0);
Complex complex_normal(Rng& g);
ComplexVector complex_normal_vector(Rng& g, int d);
ComplexVector unit_complex_vector(Rng& g, int d);
Direction random_direction(Rng& g, int N, int d);
ComplexMatrix random_complex_matrix(Rng& g, int d);

// Accretive matrix with a prescribed spread; Lambda is O(1).
ComplexMatrix random_accretive(Rng& g, int d, double imag_scale);
// Rejection sampling until every exponent in `exps` has Delta >= floor.
ComplexMatrix random_elliptic(Rng& g, int d, const std::vector<double>& exps, double floor);

int worker_count();  // PELLIPTIC_THREADS caps the pool

// Calls fn(i) for i in [0, n). Work is split into fixed blocks so results do not
// depend on the number of workers.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn);

}  // namespace pell
