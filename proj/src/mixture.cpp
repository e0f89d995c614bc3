#include "comoment/mixture.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "comoment/bounds.hpp"
#include "comoment/errors.hpp"
#include "comoment/marginals.hpp"
#include "comoment/parallel.hpp"
#include "comoment/rng.hpp"

namespace comoment {

namespace {

// Constants of the standardized-exponential branch system: the split level
// 1 - e^{-2} above which the map is the identity, and the discriminant
// offset 4e^{-2}.
const double kSplitLevel = 1.0 - std::exp(-2.0);
const double kDiscOffset = 4.0 * std::exp(-2.0);

}  // namespace

void validate_params(const MixtureParams& params) {
  if (!(params.rate1 > 0.0) || !(params.rate2 > 0.0))
    throw DomainError("mixture rates must be positive");
  if (!(params.mix >= 0.0 && params.mix <= 1.0))
    throw DomainError("mixture level must lie in [0,1]");
}

double mixture_u2_even(double u, double v) {
  if (u > kSplitLevel) return u;
  double s = std::sqrt(u * u + kDiscOffset);
  double p = 0.5 * (1.0 + u / s);  // lower-branch probability -f_inv'(u)
  return v > p ? 1.0 + 0.5 * (u - s) : 1.0 - 0.5 * (u + s);
}

std::pair<double, double> mixture_pair(const MixtureParams& params, double w,
                                       double u, double v) {
  double u1 = w < params.mix ? u : 1.0 - u;
  double u2 = params.parity == Parity::OddD ? u : mixture_u2_even(u, v);
  return {u1, u2};
}

std::vector<MixtureDraw> sample_mixture(const MixtureParams& params,
                                        std::uint64_t n, std::uint64_t seed,
                                        unsigned threads) {
  validate_params(params);
  if (n == 0) throw DomainError("sample size must be positive");
  std::vector<MixtureDraw> out(n);
  RngStream rng(seed, kMixtureStream);
  parallel_for_index(
      n,
      [&](std::uint64_t i) {
        double w = rng.uniform(3 * i);
        double u = rng.uniform(3 * i + 1);
        double v = rng.uniform(3 * i + 2);
        auto [u1, u2] = mixture_pair(params, w, u, v);
        out[i] = {u1, u2, -std::log1p(-u1) / params.rate1,
                  -std::log1p(-u2) / params.rate2};
      },
      threads);
  return out;
}

std::pair<double, double> exponential_moment_range(int d) {
  if (d < 1) throw DomainError("moment order must be a positive integer");
  static std::mutex mutex;
  static std::map<int, std::pair<double, double>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(d);
  if (it == cache.end()) {
    BoundsResult r = centered_bounds(Marginal::exponential(1.0),
                                     Marginal::exponential(1.0), d,
                                     Method::Quadrature);
    it = cache.emplace(d, std::pair{r.lower, r.upper}).first;
  }
  return it->second;
}

double moment_of_lambda(const MixtureParams& params, int d) {
  validate_params(params);
  if (d < 1) throw DomainError("moment order must be a positive integer");
  bool even = d % 2 == 0;
  if ((params.parity == Parity::EvenD) != even)
    throw DomainError("moment order parity does not match the mixture parity");
  auto [lo, hi] = exponential_moment_range(d);
  return lo + params.mix * (hi - lo);
}

double lambda_for_moment(const MixtureParams& params, int d, double target) {
  validate_params(params);
  if (d < 1) throw DomainError("moment order must be a positive integer");
  auto [lo, hi] = exponential_moment_range(d);
  if (!(target >= lo && target <= hi))
    throw OutOfRange("target moment outside the attainable interval [" +
                     std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return (target - lo) / (hi - lo);
}

}  // namespace comoment
