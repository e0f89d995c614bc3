#include "comoment/risk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "comoment/accumulators.hpp"
#include "comoment/errors.hpp"
#include "comoment/parallel.hpp"
#include "comoment/rng.hpp"

namespace comoment {

namespace {

// floor/ceil of n*p guarded against the binary representation of p landing
// one ulp on the wrong side of an integer product.
std::uint64_t tail_size(std::uint64_t n, double p) {
  return static_cast<std::uint64_t>(
      std::floor(static_cast<double>(n) * (1.0 - p) + 1e-9));
}

std::uint64_t quantile_rank(std::uint64_t n, double p) {
  auto r = static_cast<std::uint64_t>(
      std::ceil(static_cast<double>(n) * p - 1e-9));
  if (r < 1) r = 1;
  if (r > n) r = n;
  return r;
}

void check_level(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw DomainError("tail level must lie strictly inside (0,1)");
}

// Indices of the k largest values of s, ties broken by index so the
// selected set is unique. Selection runs on one thread over arrays whose
// contents do not depend on the thread count.
std::vector<std::uint64_t> top_k_by_value(const std::vector<double>& s,
                                          std::uint64_t k) {
  std::vector<std::uint64_t> idx(s.size());
  std::iota(idx.begin(), idx.end(), std::uint64_t{0});
  auto before = [&s](std::uint64_t a, std::uint64_t b) {
    if (s[a] != s[b]) return s[a] > s[b];
    return a < b;
  };
  std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k),
                   idx.end(), before);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());  // fixed accumulation order
  return idx;
}

Estimate tail_average(const MixtureParams& params, double p, std::uint64_t n,
                      std::uint64_t seed, unsigned threads, bool average_s,
                      int component) {
  validate_params(params);
  check_level(p);
  std::uint64_t k = tail_size(n, p);
  if (k < 1000)
    throw InsufficientSample(
        "tail estimate needs n(1-p) >= 1000 draws beyond the quantile");
  std::vector<double> s(n);
  std::vector<double> comp;
  if (!average_s) comp.resize(n);
  double* want1 = (!average_s && component == 1) ? comp.data() : nullptr;
  double* want2 = (!average_s && component == 2) ? comp.data() : nullptr;
  mixture_losses(params, n, seed, s.data(), want1, want2, threads);
  std::vector<std::uint64_t> tail = top_k_by_value(s, k);
  StreamingMoments acc(2);
  for (std::uint64_t i : tail) acc.push(average_s ? s[i] : comp[i]);
  return {acc.mean(), acc.stderr_mean(), n, seed, p};
}

}  // namespace

double var_empirical(std::span<const double> losses, double p) {
  check_level(p);
  const std::uint64_t n = losses.size();
  if (n == 0 || tail_size(n, p) < 1)
    throw InsufficientSample("empirical quantile needs n >= 1/(1-p)");
  std::vector<double> work(losses.begin(), losses.end());
  std::uint64_t r = quantile_rank(n, p);
  std::nth_element(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(r - 1),
                   work.end());
  return work[r - 1];
}

void mixture_losses(const MixtureParams& params, std::uint64_t n,
                    std::uint64_t seed, double* s, double* l1, double* l2,
                    unsigned threads) {
  validate_params(params);
  RngStream rng(seed, kMixtureStream);
  parallel_for_index(
      n,
      [&](std::uint64_t i) {
        double w = rng.uniform(3 * i);
        double u = rng.uniform(3 * i + 1);
        double v = rng.uniform(3 * i + 2);
        auto [u1, u2] = mixture_pair(params, w, u, v);
        double a = -std::log1p(-u1) / params.rate1;
        double b = -std::log1p(-u2) / params.rate2;
        if (s) s[i] = a + b;
        if (l1) l1[i] = a;
        if (l2) l2[i] = b;
      },
      threads);
}

Estimate es_mixture(const MixtureParams& params, double p, std::uint64_t n,
                    std::uint64_t seed, unsigned threads) {
  return tail_average(params, p, n, seed, threads, true, 1);
}

Estimate mes_mixture(const MixtureParams& params, double p, std::uint64_t n,
                     std::uint64_t seed, unsigned threads, int component) {
  if (component != 1 && component != 2)
    throw DomainError("loss component must be 1 or 2");
  return tail_average(params, p, n, seed, threads, false, component);
}

}  // namespace comoment
