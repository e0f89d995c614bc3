#include "comoment/couplings.hpp"

#include <cmath>

#include "comoment/errors.hpp"
#include "comoment/parallel.hpp"
#include "comoment/rng.hpp"

namespace comoment {

namespace {

double ipow(double x, int d) {
  double r = 1.0;
  for (int i = 0; i < d; ++i) r *= x;
  return r;
}

// Support classification for even d.
enum class EvenCase { NonNegative, NonPositive, StraddleSmallLeft, StraddleLargeLeft };

EvenCase classify(const Marginal& m2) {
  double lo = m2.support_lo(), hi = m2.support_hi();
  if (lo >= 0.0) return EvenCase::NonNegative;
  if (hi <= 0.0) return EvenCase::NonPositive;
  // |lo| vs hi decides which side survives at high levels; infinities
  // follow the same comparison (inf > finite).
  return (-lo <= hi) ? EvenCase::StraddleSmallLeft : EvenCase::StraddleLargeLeft;
}

BranchSystem trivial_system(bool reflected) {
  BranchSystem bs;
  bs.identity_above = 0.0;
  bs.reflected = reflected;
  bs.g_inv = [](double u) { return u; };
  bs.f_inv = [](double u) { return 1.0 - u; };
  bs.g = [](double x) { return x; };
  bs.f = [](double x) { return 1.0 - x; };
  bs.deriv_ratio_p = [reflected](double) { return reflected ? 1.0 : 0.0; };
  bs.closed_form = true;
  return bs;
}

BranchSystem symmetric_system() {
  BranchSystem bs;
  bs.identity_above = 1.0;
  bs.reflected = false;
  bs.g_inv = [](double u) { return 0.5 * (1.0 + u); };
  bs.f_inv = [](double u) { return 0.5 * (1.0 - u); };
  bs.g = [](double x) { return 2.0 * x - 1.0; };
  bs.f = [](double x) { return 1.0 - 2.0 * x; };
  bs.deriv_ratio_p = [](double) { return 0.5; };
  bs.closed_form = true;
  return bs;
}

BranchSystem uniform_system(double a, double b, EvenCase c) {
  BranchSystem bs;
  double off = -a / (b - a);  // F2(0)
  bs.reflected = (c == EvenCase::StraddleLargeLeft);
  bs.identity_above = bs.reflected ? 2.0 * b / (b - a) : -2.0 * a / (b - a);
  bs.g_inv = [off](double u) { return 0.5 * u + off; };
  bs.f_inv = [off](double u) { return -0.5 * u + off; };
  bs.g = [off](double x) { return 2.0 * (x - off); };
  bs.f = [off](double x) { return 2.0 * (off - x); };
  bs.deriv_ratio_p = [](double) { return 0.5; };
  bs.closed_form = true;
  return bs;
}

// Exponential with negative shift: X2 + a ~ Expon(rate), a = -shift > 0.
// With c = e^{-2 a rate} the level curves solve a quadratic, so both
// branches and the split probability come out in closed form.
BranchSystem shifted_exponential_system(double rate, double shift) {
  BranchSystem bs;
  double c = std::exp(2.0 * rate * shift);
  bs.identity_above = 1.0 - c;
  bs.reflected = false;
  bs.g_inv = [c](double u) {
    double s = std::sqrt(u * u + 4.0 * c);
    return 1.0 + 0.5 * (u - s);
  };
  bs.f_inv = [c](double u) {
    double s = std::sqrt(u * u + 4.0 * c);
    return 1.0 - 0.5 * (u + s);
  };
  bs.g = [c](double x) { return c / (1.0 - x) - (1.0 - x); };
  bs.f = [c](double x) { return (1.0 - x) - c / (1.0 - x); };
  // p = |f_inv'| with |f_inv'| + |g_inv'| = 1; equals the density-ratio form.
  bs.deriv_ratio_p = [c](double u) {
    double s = std::sqrt(u * u + 4.0 * c);
    return 0.5 * (1.0 + u / s);
  };
  bs.closed_form = true;
  return bs;
}

// General continuous marginal: branch levels through the power-law
// quantile, branch probability from cdf finite differences (step 1e-6).
BranchSystem generic_system(const Marginal& m2, int d, EvenCase c) {
  BranchSystem bs;
  double lo = m2.support_lo(), hi = m2.support_hi();
  bs.reflected = (c == EvenCase::StraddleLargeLeft);
  bs.identity_above = bs.reflected ? 1.0 - m2.cdf(-hi) : m2.cdf(-lo);
  Marginal gd = power_law(m2, d);
  auto radius = [gd, d](double u) { return std::pow(gd.quantile(u), 1.0 / d); };
  bs.g_inv = [m2, radius](double u) { return m2.cdf(radius(u)); };
  bs.f_inv = [m2, radius](double u) { return m2.cdf(-radius(u)); };
  bs.g = [m2, gd, d](double x) { return gd.cdf(ipow(m2.quantile(x), d)); };
  bs.f = bs.g;
  bs.deriv_ratio_p = [m2, radius](double u) {
    constexpr double h = 1e-6;
    double r = radius(u);
    double fpos = m2.cdf(r + h) - m2.cdf(r - h);
    double fneg = m2.cdf(-r + h) - m2.cdf(-r - h);
    double denom = fpos + fneg;
    if (!(denom > 0.0) || !std::isfinite(denom)) return 0.5;  // degenerate point
    double p = fneg / denom;
    return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p);
  };
  bs.closed_form = false;
  return bs;
}

}  // namespace

BranchSystem branch_functions(const Marginal& m2, int d) {
  if (d < 1 || d % 2 != 0)
    throw DomainError("branch system is defined for even d >= 2");
  if (m2.is_discrete())
    throw UnsupportedCase("two-branch construction needs a continuous marginal");
  EvenCase c = classify(m2);
  if (c == EvenCase::NonNegative) return trivial_system(false);
  if (c == EvenCase::NonPositive) return trivial_system(true);
  if (m2.symmetric_zero_mean()) return symmetric_system();
  if (auto u = m2.as_uniform()) return uniform_system(u->a, u->b, c);
  if (auto e = m2.as_exponential(); e && e->shift < 0.0)
    return shifted_exponential_system(e->rate, e->shift);
  return generic_system(m2, d, c);
}

namespace {

void check_open(double u, double v) {
  if (!(u > 0.0 && u < 1.0) || !(v > 0.0 && v < 1.0))
    throw DomainError("coupling driver uniforms must lie strictly inside (0,1)");
}

double map_u2_even(const BranchSystem& bs, EvenCase c, double u, double v) {
  if (c == EvenCase::NonNegative || c == EvenCase::NonPositive) return u;
  if (u > bs.identity_above) return bs.reflected ? 1.0 - u : u;
  return v > bs.deriv_ratio_p(u) ? bs.g_inv(u) : bs.f_inv(u);
}

double map_u1_even(EvenCase c, Extreme e, double u) {
  bool flip = (e == Extreme::Min);
  if (c == EvenCase::NonPositive) flip = !flip;
  return flip ? 1.0 - u : u;
}

}  // namespace

std::pair<double, double> sample_pair(const CouplingSpec& spec, double u, double v) {
  check_open(u, v);
  if (spec.d % 2 == 1) {
    double u1 = spec.extreme == Extreme::Max ? u : 1.0 - u;
    return {u1, u};
  }
  BranchSystem bs = branch_functions(spec.marginal2, spec.d);
  EvenCase c = classify(spec.marginal2);
  return {map_u1_even(c, spec.extreme, u), map_u2_even(bs, c, u, v)};
}

std::pair<double, double> sample_xy(const CouplingSpec& spec, double u, double v) {
  auto [u1, u2] = sample_pair(spec, u, v);
  return {spec.marginal1.quantile(u1), spec.marginal2.quantile(u2)};
}

void sample_xy_batch(const CouplingSpec& spec, std::uint64_t n,
                     std::uint64_t seed, std::uint64_t stream_id,
                     double* u1, double* u2, double* x1, double* x2,
                     unsigned threads) {
  RngStream rng(seed, stream_id);
  bool odd = spec.d % 2 == 1;
  BranchSystem bs;
  EvenCase c = EvenCase::NonNegative;
  if (!odd) {
    bs = branch_functions(spec.marginal2, spec.d);
    c = classify(spec.marginal2);
  }
  const Marginal& m1 = spec.marginal1;
  const Marginal& m2 = spec.marginal2;
  Extreme e = spec.extreme;
  parallel_for_index(
      n,
      [&](std::uint64_t i) {
        double u = rng.uniform(2 * i);
        double v = rng.uniform(2 * i + 1);
        double a, b;
        if (odd) {
          a = e == Extreme::Max ? u : 1.0 - u;
          b = u;
        } else {
          a = map_u1_even(c, e, u);
          b = map_u2_even(bs, c, u, v);
        }
        if (u1) u1[i] = a;
        if (u2) u2[i] = b;
        if (x1) x1[i] = m1.quantile(a);
        if (x2) x2[i] = m2.quantile(b);
      },
      threads);
}

}  // namespace comoment
