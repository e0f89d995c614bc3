#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "comoment/annuity.hpp"
#include "comoment/errors.hpp"
#include "comoment/mixture.hpp"
#include "comoment/rng.hpp"

using namespace comoment;

namespace {

const double kRateX = 0.0533;
const double kRateY = 0.0434;
const double kInterest = 0.045;

// sum_{k=1..term} q^k in long double, independent of the library helper
double geometric_reference(double q, int term) {
  long double acc = 0.0L, pw = 1.0L;
  for (int k = 1; k <= term; ++k) {
    pw *= q;
    acc += pw;
  }
  return static_cast<double>(acc);
}

double singles_reference(int term) {
  double nu = 1.0 / (1.0 + kInterest);
  return geometric_reference(nu * std::exp(-kRateX), term) +
         geometric_reference(nu * std::exp(-kRateY), term);
}

AnnuitySpec spec(double mix, AnnuityStatus status, int term = 30) {
  return {kRateX, kRateY, kInterest, term, mix, status};
}

}  // namespace

TEST_CASE("rate calibration inverts expected lifetimes") {
  auto [rx, ry] = calibrate_rates(18.76, 23.06);
  CHECK(rx == 1.0 / 18.76);
  CHECK(ry == 1.0 / 23.06);
  CHECK_THROWS_AS(calibrate_rates(0.0, 10.0), DomainError);
  CHECK_THROWS_AS(calibrate_rates(10.0, -1.0), DomainError);
}

TEST_CASE("independent statuses use the closed product form") {
  double nu = 1.0 / (1.0 + kInterest);
  Estimate joint =
      annuity_pv(spec(0.5, AnnuityStatus::IndependentJointLife), 0, 1);
  CHECK(joint.se == 0.0);
  CHECK(joint.n == 0);
  CHECK(joint.value ==
        doctest::Approx(geometric_reference(nu * std::exp(-kRateX - kRateY), 30))
            .epsilon(1e-14));

  Estimate last =
      annuity_pv(spec(0.9, AnnuityStatus::IndependentLastSurvivor), 0, 1);
  CHECK(last.value ==
        doctest::Approx(singles_reference(30) - joint.value).epsilon(1e-14));

  // the mixture level is irrelevant under independence
  Estimate joint2 =
      annuity_pv(spec(0.1, AnnuityStatus::IndependentJointLife), 0, 99);
  CHECK(joint2.value == joint.value);
}

TEST_CASE("joint and last-survivor values add to the single-life sum") {
  for (double mix : {0.0, 0.37, 1.0}) {
    Estimate joint = annuity_pv(spec(mix, AnnuityStatus::JointLife), 40000, 8);
    Estimate last =
        annuity_pv(spec(mix, AnnuityStatus::LastSurvivor), 40000, 8);
    CHECK(joint.value + last.value ==
          doctest::Approx(singles_reference(30)).epsilon(1e-13));
    CHECK(joint.se == last.se);  // complement on the same draws
  }
}

TEST_CASE("present value is linear in the mixture level") {
  auto pv = [&](double mix) {
    return annuity_pv(spec(mix, AnnuityStatus::JointLife), 50000, 40).value;
  };
  double lo = pv(0.0), hi = pv(1.0);
  for (double mix : {0.25, 0.5, 0.75})
    CHECK(pv(mix) ==
          doctest::Approx((1.0 - mix) * lo + mix * hi).epsilon(1e-10));
  // stronger dependence shortens the joint payout and lengthens the last one
  CHECK(hi < lo);
  auto last = [&](double mix) {
    return annuity_pv(spec(mix, AnnuityStatus::LastSurvivor), 50000, 40).value;
  };
  CHECK(last(1.0) > last(0.0));
}

TEST_CASE("longer terms accumulate more value") {
  auto pv = [&](int term) {
    return annuity_pv(spec(0.5, AnnuityStatus::LastSurvivor, term), 30000, 13)
        .value;
  };
  CHECK(pv(10) < pv(30));
  CHECK(pv(30) < pv(50));
}

TEST_CASE("present value draws follow the dedicated stream") {
  AnnuitySpec s = spec(1.0, AnnuityStatus::JointLife);
  const std::uint64_t seed = 77, n = 3;
  std::vector<double> discount(static_cast<std::size_t>(s.term) + 1, 0.0);
  double nu = 1.0 / (1.0 + s.interest);
  for (int k = 1; k <= s.term; ++k)
    discount[static_cast<std::size_t>(k)] =
        discount[static_cast<std::size_t>(k - 1)] + std::pow(nu, k);
  RngStream rng(seed, 7004);
  long double acc = 0.0L;
  for (std::uint64_t i = 0; i < n; ++i) {
    double u = rng.uniform(2 * i);
    double v = rng.uniform(2 * i + 1);
    double u2 = mixture_u2_even(u, v);
    auto years = [&](double t) {
      return t >= static_cast<double>(s.term) ? s.term : static_cast<int>(t);
    };
    int m1 = years(-std::log1p(-u) / s.rate_x);
    int my = years(-std::log1p(-u2) / s.rate_y);
    acc += discount[static_cast<std::size_t>(std::min(m1, my))];
  }
  Estimate e = annuity_pv(s, n, seed);
  CHECK(e.value == doctest::Approx(static_cast<double>(acc / n)).epsilon(1e-12));
}

TEST_CASE("survival probabilities complement on shared draws") {
  const double t = 5.0;
  double ax = std::exp(-kRateX * t), ay = std::exp(-kRateY * t);
  Estimate ind =
      survival_probability(spec(0.5, AnnuityStatus::IndependentJointLife), t, 0, 1);
  CHECK(ind.value == doctest::Approx(ax * ay).epsilon(1e-14));
  Estimate ind_last = survival_probability(
      spec(0.5, AnnuityStatus::IndependentLastSurvivor), t, 0, 1);
  CHECK(ind_last.value == doctest::Approx(ax + ay - ax * ay).epsilon(1e-14));

  for (double mix : {0.0, 0.37, 1.0}) {
    Estimate joint =
        survival_probability(spec(mix, AnnuityStatus::JointLife), t, 30000, 5);
    Estimate last = survival_probability(
        spec(mix, AnnuityStatus::LastSurvivor), t, 30000, 5);
    CHECK(joint.value + last.value == doctest::Approx(ax + ay).epsilon(1e-13));
    // joint survival sits inside the Frechet band whatever the level
    CHECK(joint.value >= ax + ay - 1.0 - 4 * joint.se);
    CHECK(joint.value <= std::min(ax, ay) + 4 * joint.se);
  }
}

TEST_CASE("estimates are deterministic in seed and threads") {
  AnnuitySpec s = spec(0.37, AnnuityStatus::LastSurvivor);
  Estimate a = annuity_pv(s, 30000, 21, 1);
  Estimate b = annuity_pv(s, 30000, 21, 4);
  CHECK(a.value == b.value);
  CHECK(a.se == b.se);
  Estimate c = annuity_pv(s, 30000, 22, 1);
  CHECK(c.value != a.value);
}

TEST_CASE("specification guards") {
  CHECK_THROWS_AS(annuity_pv(spec(-0.1, AnnuityStatus::JointLife), 100, 1),
                  DomainError);
  CHECK_THROWS_AS(annuity_pv(spec(1.1, AnnuityStatus::JointLife), 100, 1),
                  DomainError);
  AnnuitySpec bad_rate = spec(0.5, AnnuityStatus::JointLife);
  bad_rate.rate_x = 0.0;
  CHECK_THROWS_AS(annuity_pv(bad_rate, 100, 1), DomainError);
  AnnuitySpec bad_term = spec(0.5, AnnuityStatus::JointLife);
  bad_term.term = 0;
  CHECK_THROWS_AS(annuity_pv(bad_term, 100, 1), DomainError);
  AnnuitySpec bad_interest = spec(0.5, AnnuityStatus::JointLife);
  bad_interest.interest = -1.0;
  CHECK_THROWS_AS(annuity_pv(bad_interest, 100, 1), DomainError);
  CHECK_THROWS_AS(annuity_pv(spec(0.5, AnnuityStatus::JointLife), 0, 1),
                  DomainError);
  CHECK_THROWS_AS(
      survival_probability(spec(0.5, AnnuityStatus::JointLife), 0.0, 100, 1),
      DomainError);
}
