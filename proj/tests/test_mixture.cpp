#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "comoment/errors.hpp"
#include "comoment/mixture.hpp"
#include "comoment/rng.hpp"

using namespace comoment;

namespace {

double ks_uniform(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - x[i]);
    d = std::max(d, x[i] - static_cast<double>(i) / n);
  }
  return d;
}

}  // namespace

TEST_CASE("even-parity level map follows the two-branch formulas") {
  const double c = std::exp(-2.0);
  const double split = 1.0 - c;
  for (double u : {0.05, 0.1, 0.4, 0.8, split}) {
    double s = std::sqrt(u * u + 4.0 * c);
    double p = 0.5 * (1.0 + u / s);
    double upper = 1.0 + 0.5 * (u - s);
    double lower = 1.0 - 0.5 * (u + s);
    CHECK(mixture_u2_even(u, p + 0.001) == upper);
    CHECK(mixture_u2_even(u, p - 0.001) == lower);
    // the two branches of one level differ by exactly that level
    CHECK(upper - lower == doctest::Approx(u).epsilon(1e-14));
  }
  for (double u : {0.87, 0.95, 0.999}) {
    CHECK(mixture_u2_even(u, 0.1) == u);
    CHECK(mixture_u2_even(u, 0.9) == u);
  }
}

TEST_CASE("branch levels invert the exponential level maps") {
  // g(x) = c/(1-x) - (1-x) on the upper branch, f(x) = (1-x) - c/(1-x) on
  // the lower; both must return the level that produced the branch value.
  const double c = std::exp(-2.0);
  for (double u : {0.01, 0.2, 0.5, 0.86}) {
    double s = std::sqrt(u * u + 4.0 * c);
    double xu = 1.0 + 0.5 * (u - s);
    double xl = 1.0 - 0.5 * (u + s);
    CHECK(c / (1.0 - xu) - (1.0 - xu) == doctest::Approx(u).epsilon(1e-12));
    CHECK((1.0 - xl) - c / (1.0 - xl) == doctest::Approx(u).epsilon(1e-12));
  }
}

TEST_CASE("pair assembly from the three driver uniforms") {
  MixtureParams even{1.0, 1.0, 0.3, Parity::EvenD};
  auto [a1, a2] = mixture_pair(even, 0.2, 0.4, 0.9);
  CHECK(a1 == 0.4);  // w < mix keeps the level
  CHECK(a2 == mixture_u2_even(0.4, 0.9));
  auto [b1, b2] = mixture_pair(even, 0.7, 0.4, 0.9);
  CHECK(b1 == 0.6);  // w >= mix reflects it
  CHECK(b2 == a2);

  MixtureParams odd{1.0, 1.0, 0.3, Parity::OddD};
  auto [c1, c2] = mixture_pair(odd, 0.7, 0.25, 0.99);
  CHECK(c1 == 0.75);
  CHECK(c2 == 0.25);  // odd parity uses the identity level map
}

TEST_CASE("draws consume stream uniforms (3i, 3i+1, 3i+2)") {
  MixtureParams params{1.5, 2.0, 0.6, Parity::EvenD};
  const std::uint64_t seed = 99;
  auto draws = sample_mixture(params, 50, seed);
  REQUIRE(draws.size() == 50);
  RngStream rng(seed, kMixtureStream);
  for (std::uint64_t i : {std::uint64_t{0}, std::uint64_t{17}, std::uint64_t{49}}) {
    double w = rng.uniform(3 * i);
    double u = rng.uniform(3 * i + 1);
    double v = rng.uniform(3 * i + 2);
    auto [u1, u2] = mixture_pair(params, w, u, v);
    CHECK(draws[i].u1 == u1);
    CHECK(draws[i].u2 == u2);
    CHECK(draws[i].l1 == -std::log1p(-u1) / params.rate1);
    CHECK(draws[i].l2 == -std::log1p(-u2) / params.rate2);
  }
}

TEST_CASE("sampling is independent of the thread count") {
  MixtureParams params{1.0, 0.5, 0.37, Parity::EvenD};
  auto a = sample_mixture(params, 30000, 7, 1);
  auto b = sample_mixture(params, 30000, 7, 4);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].u1 == b[i].u1);
    CHECK(a[i].u2 == b[i].u2);
    CHECK(a[i].l1 == b[i].l1);
    CHECK(a[i].l2 == b[i].l2);
  }
}

TEST_CASE("unit-level marginals stay uniform") {
  MixtureParams params{1.0, 1.0, 0.37, Parity::EvenD};
  const std::size_t n = 20000;
  auto draws = sample_mixture(params, n, 123);
  std::vector<double> u1, u2;
  for (const auto& d : draws) {
    u1.push_back(d.u1);
    u2.push_back(d.u2);
  }
  double crit = 1.62762 / std::sqrt(static_cast<double>(n));  // 1% level
  CHECK(ks_uniform(std::move(u1)) < crit);
  CHECK(ks_uniform(std::move(u2)) < crit);
}

TEST_CASE("moment range matches the frozen extremes") {
  struct Row {
    int d;
    double lower, upper, tol;
  };
  // standardized exponential pair; values pinned from quadrature
  const Row rows[] = {
      {1, -0.644934066848, 1.0, 2e-6},
      {2, -0.813038569250, 2.203362723495, 2e-6},
      {3, -2.428741602812, 9.0, 2e-6},
      {4, -8.826249932605, 44.181859772291, 2e-3},
  };
  for (const Row& r : rows) {
    auto [lo, hi] = exponential_moment_range(r.d);
    CHECK(std::fabs(lo - r.lower) < r.tol);
    CHECK(std::fabs(hi - r.upper) < r.tol);
    auto again = exponential_moment_range(r.d);  // cached second call
    CHECK(again.first == lo);
    CHECK(again.second == hi);
  }
  CHECK_THROWS_AS(exponential_moment_range(0), DomainError);
}

TEST_CASE("model moment is linear in the mixture level") {
  auto [lo, hi] = exponential_moment_range(2);
  CHECK(moment_of_lambda({1.0, 1.0, 0.0, Parity::EvenD}, 2) == lo);
  CHECK(moment_of_lambda({1.0, 1.0, 1.0, Parity::EvenD}, 2) == hi);
  CHECK(moment_of_lambda({1.0, 1.0, 0.37, Parity::EvenD}, 2) ==
        lo + 0.37 * (hi - lo));
  auto [lo3, hi3] = exponential_moment_range(3);
  CHECK(moment_of_lambda({1.0, 1.0, 0.5, Parity::OddD}, 3) ==
        lo3 + 0.5 * (hi3 - lo3));
  // the parity of d must match the mixture parity
  CHECK_THROWS_AS(moment_of_lambda({1.0, 1.0, 0.5, Parity::OddD}, 2),
                  DomainError);
  CHECK_THROWS_AS(moment_of_lambda({1.0, 1.0, 0.5, Parity::EvenD}, 3),
                  DomainError);
}

TEST_CASE("mixture level recovers a target moment") {
  MixtureParams params{1.0, 1.0, 0.0, Parity::EvenD};
  auto [lo, hi] = exponential_moment_range(2);
  for (double lambda : {0.0, 0.25, 0.8, 1.0}) {
    params.mix = lambda;
    double target = moment_of_lambda(params, 2);
    CHECK(lambda_for_moment(params, 2, target) ==
          doctest::Approx(lambda).epsilon(1e-12));
  }
  CHECK(lambda_for_moment(params, 2, lo) == 0.0);
  CHECK(lambda_for_moment(params, 2, hi) == 1.0);
  CHECK_THROWS_AS(lambda_for_moment(params, 2, hi + 0.1), OutOfRange);
  CHECK_THROWS_AS(lambda_for_moment(params, 2, lo - 0.1), OutOfRange);
}

TEST_CASE("parameter guards") {
  CHECK_THROWS_AS(sample_mixture({0.0, 1.0, 0.5, Parity::EvenD}, 10, 1),
                  DomainError);
  CHECK_THROWS_AS(sample_mixture({1.0, -2.0, 0.5, Parity::EvenD}, 10, 1),
                  DomainError);
  CHECK_THROWS_AS(sample_mixture({1.0, 1.0, -0.1, Parity::EvenD}, 10, 1),
                  DomainError);
  CHECK_THROWS_AS(sample_mixture({1.0, 1.0, 1.1, Parity::EvenD}, 10, 1),
                  DomainError);
  CHECK_THROWS_AS(sample_mixture({1.0, 1.0, 0.5, Parity::EvenD}, 0, 1),
                  DomainError);
  CHECK_NOTHROW(sample_mixture({1.0, 1.0, 0.0, Parity::EvenD}, 2, 1));
  CHECK_NOTHROW(sample_mixture({1.0, 1.0, 1.0, Parity::OddD}, 2, 1));
}
