#include "comoment/annuity.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "comoment/accumulators.hpp"
#include "comoment/errors.hpp"
#include "comoment/mixture.hpp"
#include "comoment/parallel.hpp"
#include "comoment/rng.hpp"

namespace comoment {

namespace {

// Draw i of the annuity stream reads uniforms (2i, 2i+1) as (u, v); u is
// the common level of both lifetimes, v the even-parity branch split.
constexpr std::uint64_t kAnnuityStream = 7004;

bool independent(AnnuityStatus s) {
  return s == AnnuityStatus::IndependentJointLife ||
         s == AnnuityStatus::IndependentLastSurvivor;
}

bool joint(AnnuityStatus s) {
  return s == AnnuityStatus::JointLife ||
         s == AnnuityStatus::IndependentJointLife;
}

// sum_{k=1..term} q^k
double geometric_sum(double q, int term) {
  NeumaierSum acc;
  double pw = 1.0;
  for (int k = 1; k <= term; ++k) {
    pw *= q;
    acc.add(pw);
  }
  return acc.total();
}

// Completed years min(term, floor(t)) of a lifetime t > 0.
int completed_years(double t, int term) {
  if (t >= static_cast<double>(term)) return term;
  return static_cast<int>(t);
}

}  // namespace

void validate_spec(const AnnuitySpec& spec) {
  if (!(spec.rate_x > 0.0) || !(spec.rate_y > 0.0))
    throw DomainError("mortality rates must be positive");
  if (spec.term < 1) throw DomainError("annuity term must be at least 1 year");
  if (!(spec.interest > -1.0))
    throw DomainError("interest rate must exceed -1");
  if (!(spec.mix >= 0.0 && spec.mix <= 1.0))
    throw DomainError("mixture level must lie in [0,1]");
}

Estimate survival_probability(const AnnuitySpec& spec, double t,
                              std::uint64_t n_mc, std::uint64_t seed,
                              unsigned threads) {
  validate_spec(spec);
  if (!(t > 0.0)) throw DomainError("time horizon must be positive");
  const double ax = std::exp(-spec.rate_x * t);
  const double ay = std::exp(-spec.rate_y * t);
  if (independent(spec.status)) {
    double both = ax * ay;
    double value = joint(spec.status) ? both : ax + ay - both;
    return {value, 0.0, 0, seed, 0.0};
  }
  if (n_mc == 0) throw DomainError("simulation size must be positive");
  const double mix = spec.mix;
  RngStream rng(seed, kAnnuityStream);
  auto fill = [&](StreamingMoments& acc, std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t i = lo; i < hi; ++i) {
      double u = rng.uniform(2 * i);
      double v = rng.uniform(2 * i + 1);
      double u2 = mixture_u2_even(u, v);
      bool y_alive = u2 > 1.0 - ay;
      double h1 = (u > 1.0 - ax && y_alive) ? 1.0 : 0.0;  // comonotone branch
      double h0 = (u < ax && y_alive) ? 1.0 : 0.0;        // antithetic branch
      acc.push((1.0 - mix) * h0 + mix * h1);
    }
  };
  auto merge = [](StreamingMoments& a, const StreamingMoments& b) { a.merge(b); };
  StreamingMoments acc =
      chunked_reduce(n_mc, StreamingMoments(2), fill, merge, threads);
  double joint_mean = acc.mean();
  double se = acc.stderr_mean();
  // Last-survivor is the exact complement on the same draws.
  double value = joint(spec.status) ? joint_mean : ax + ay - joint_mean;
  return {value, se, n_mc, seed, 0.0};
}

Estimate annuity_pv(const AnnuitySpec& spec, std::uint64_t n_mc,
                    std::uint64_t seed, unsigned threads) {
  validate_spec(spec);
  const double nu = 1.0 / (1.0 + spec.interest);
  if (independent(spec.status)) {
    double both = geometric_sum(nu * std::exp(-spec.rate_x - spec.rate_y),
                                spec.term);
    double value = joint(spec.status)
                       ? both
                       : geometric_sum(nu * std::exp(-spec.rate_x), spec.term) +
                             geometric_sum(nu * std::exp(-spec.rate_y),
                                           spec.term) -
                             both;
    return {value, 0.0, 0, seed, 0.0};
  }
  if (n_mc == 0) throw DomainError("simulation size must be positive");
  const int term = spec.term;
  // discount[j] = sum_{k=1..j} nu^k; per-draw PV is discount at the last
  // year both statuses pay.
  std::vector<double> discount(static_cast<std::size_t>(term) + 1, 0.0);
  {
    NeumaierSum acc;
    double pw = 1.0;
    for (int k = 1; k <= term; ++k) {
      pw *= nu;
      acc.add(pw);
      discount[static_cast<std::size_t>(k)] = acc.total();
    }
  }
  const double mix = spec.mix;
  RngStream rng(seed, kAnnuityStream);
  auto fill = [&](StreamingMoments& acc, std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t i = lo; i < hi; ++i) {
      double u = rng.uniform(2 * i);
      double v = rng.uniform(2 * i + 1);
      double u2 = mixture_u2_even(u, v);
      int my = completed_years(-std::log1p(-u2) / spec.rate_y, term);
      int m1 = completed_years(-std::log1p(-u) / spec.rate_x, term);
      int m0 = completed_years(-std::log(u) / spec.rate_x, term);
      double z1 = discount[static_cast<std::size_t>(std::min(m1, my))];
      double z0 = discount[static_cast<std::size_t>(std::min(m0, my))];
      acc.push((1.0 - mix) * z0 + mix * z1);
    }
  };
  auto merge = [](StreamingMoments& a, const StreamingMoments& b) { a.merge(b); };
  StreamingMoments acc =
      chunked_reduce(n_mc, StreamingMoments(2), fill, merge, threads);
  double joint_pv = acc.mean();
  double se = acc.stderr_mean();
  if (joint(spec.status)) return {joint_pv, se, n_mc, seed, 0.0};
  // Exact complement: last-survivor PV = sum of the two single-life PVs
  // minus the joint PV, with the single-life PVs in closed form.
  double singles = geometric_sum(nu * std::exp(-spec.rate_x), term) +
                   geometric_sum(nu * std::exp(-spec.rate_y), term);
  return {singles - joint_pv, se, n_mc, seed, 0.0};
}

std::pair<double, double> calibrate_rates(double remaining_life_x,
                                          double remaining_life_y) {
  if (!(remaining_life_x > 0.0) || !(remaining_life_y > 0.0))
    throw DomainError("expected remaining lifetimes must be positive");
  return {1.0 / remaining_life_x, 1.0 / remaining_life_y};
}

}  // namespace comoment
