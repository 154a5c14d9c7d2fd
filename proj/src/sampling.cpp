#include "pelliptic/sampling.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace pell {

Rng make_stream(std::uint64_t root, std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(root), static_cast<std::uint32_t>(root >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return Rng(seq);
}

std::uint64_t hash_string(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

double normal(Rng& g) { return std::normal_distribution<double>(0.0, 1.0)(g); }

double uniform(Rng& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

Complex complex_normal(Rng& g) {
  const double a = normal(g);
  return {a, normal(g)};
}

ComplexVector complex_normal_vector(Rng& g, int d) {
  ComplexVector v(d);
  for (int i = 0; i < d; ++i) v(i) = complex_normal(g);
  return v;
}

ComplexVector unit_complex_vector(Rng& g, int d) {
  ComplexVector v = complex_normal_vector(g, d);
  return v / v.norm();
}

Direction random_direction(Rng& g, int N, int d) {
  Direction X(N);
  for (auto& x : X) x = complex_normal_vector(g, d);
  return X;
}

ComplexMatrix random_complex_matrix(Rng& g, int d) {
  ComplexMatrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = complex_normal(g);
  return a;
}

ComplexMatrix random_accretive(Rng& g, int d, double imag_scale) {
  RealMatrix q = RealMatrix::NullaryExpr(d, d, [&]() { return normal(g); });
  RealMatrix spd = q * q.transpose() / d + RealMatrix::Identity(d, d) * uniform(g, 0.3, 1.0);
  RealMatrix skew = RealMatrix::NullaryExpr(d, d, [&]() { return normal(g); });
  skew = 0.5 * (skew - skew.transpose()).eval();
  RealMatrix im = RealMatrix::NullaryExpr(d, d, [&]() { return normal(g); });
  ComplexMatrix a = spd.cast<Complex>() + 0.3 * skew.cast<Complex>() +
                    Complex(0, imag_scale) * im.cast<Complex>();
  return a / pell::Lambda_of(a);
}

ComplexMatrix random_elliptic(Rng& g, int d, const std::vector<double>& exps, double floor) {
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const double scale = uniform(g, 0.0, 0.6);
    ComplexMatrix a = random_accretive(g, d, scale);
    bool ok = true;
    for (double p : exps) ok = ok && delta_p_exact(a, p).value >= floor;
    if (ok) return a;
  }
  throw BudgetExhausted("random_elliptic: no matrix met the ellipticity floor", 0.0);
}

int worker_count() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("PELLIPTIC_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return n;
}

void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn) {
  const int workers = worker_count();
  if (workers <= 1 || n < 64) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  constexpr std::int64_t block = 256;
  const std::int64_t nblocks = (n + block - 1) / block;
  std::atomic<std::int64_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&]() {
      for (std::int64_t b; (b = next.fetch_add(1)) < nblocks;)
        for (std::int64_t i = b * block; i < std::min(n, (b + 1) * block); ++i) fn(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace pell
