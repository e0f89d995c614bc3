#include "comoment/bounds.hpp"

#include <cmath>

#include "comoment/accumulators.hpp"
#include "comoment/errors.hpp"
#include "comoment/parallel.hpp"
#include "comoment/quadrature.hpp"
#include "comoment/rng.hpp"

namespace comoment {

namespace {

constexpr std::uint64_t kBoundsStream = 7001;

// E|X1 X2^d| is finite for every coupling iff 1/t1 + d/t2 < 1 where t is
// the power-law tail index (+inf for light tails).
void check_divergence(const Marginal& m1, const Marginal& m2, int d) {
  if (!std::isfinite(m1.mean()) || !std::isfinite(m2.mean()))
    throw DivergentMoment("marginal mean is not finite");
  double t1 = m1.tail_index(), t2 = m2.tail_index();
  double load = (std::isfinite(t1) ? 1.0 / t1 : 0.0) +
                (std::isfinite(t2) ? d / t2 : 0.0);
  if (load >= 1.0)
    throw DivergentMoment("extremal moment E[X1 X2^d] is infinite for these tails");
}

void preflight_grid(const Marginal& m1, const Marginal& g2) {
  constexpr int K = 10000;
  NeumaierSum s;
  for (int k = 1; k <= K; ++k) {
    double u = (k - 0.5) / K;
    s.add(std::abs(m1.quantile(u) * g2.quantile(u)));
  }
  if (!std::isfinite(s.total()))
    throw DivergentMoment("preflight grid sum is not finite");
}

BoundsResult quad_bounds(const Marginal& m1, const Marginal& g2) {
  auto upper = [&](double u) { return m1.quantile(u) * g2.quantile(u); };
  auto lower = [&](double u) { return m1.quantile(1.0 - u) * g2.quantile(u); };
  BoundsResult r;
  r.method = Method::Quadrature;
  r.upper = integrate_unit(upper);
  r.lower = integrate_unit(lower);
  return r;
}

BoundsResult mc_bounds(const Marginal& m1, const Marginal& g2,
                       std::uint64_t n, std::uint64_t seed, unsigned threads) {
  if (n == 0) throw DomainError("Monte Carlo bounds need a positive sample size");
  RngStream rng(seed, kBoundsStream);
  struct State {
    StreamingMoments up{2}, dn{2};
  };
  State acc = chunked_reduce(
      n, State{},
      [&](State& st, std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t i = lo; i < hi; ++i) {
          double u = rng.uniform(i);
          double y2 = g2.quantile(u);
          st.up.push(m1.quantile(u) * y2);
          st.dn.push(m1.quantile(1.0 - u) * y2);
        }
      },
      [](State& a, State& b) {
        a.up.merge(b.up);
        a.dn.merge(b.dn);
      },
      threads);
  BoundsResult r;
  r.method = Method::MonteCarlo;
  r.upper = acc.up.mean();
  r.lower = acc.dn.mean();
  r.upper_stderr = acc.up.stderr_mean();
  r.lower_stderr = acc.dn.stderr_mean();
  return r;
}

// Closed raw bounds for uniform marginal pairs (d = 1, 2).
BoundsResult closed_uniform_raw(double a1, double b1, double a2, double b2, int d) {
  BoundsResult r;
  r.method = Method::ClosedForm;
  if (d == 1) {
    double base = a1 * a2 + 0.5 * (a1 * (b2 - a2) + a2 * (b1 - a1));
    r.upper = base + (b1 - a1) * (b2 - a2) / 3.0;
    r.lower = base + (b1 - a1) * (b2 - a2) / 6.0;
    return r;
  }
  if (d != 2)
    throw UnsupportedCase("closed raw bounds cover uniform marginals with d <= 2");
  auto caseA_upper = [&] {
    return (a2 * a2 * b1 + 2 * a1 * a2 * b2 + 2 * a2 * b1 * b2 + a1 * b2 * b2 +
            3 * a1 * a2 * a2 + 3 * b1 * b2 * b2) / 12.0;
  };
  auto caseA_lower = [&] {
    return (3 * a2 * a2 * b1 + 2 * a1 * a2 * b2 + 2 * a2 * b1 * b2 +
            3 * a1 * b2 * b2 + a1 * a2 * a2 + b1 * b2 * b2) / 12.0;
  };
  if (a2 >= 0.0) {
    r.upper = caseA_upper();
    r.lower = caseA_lower();
  } else if (b2 <= 0.0) {
    r.upper = caseA_lower();
    r.lower = caseA_upper();
  } else {
    double mid = a1 * (a2 * a2 + a2 * b2 + b2 * b2) / 3.0;
    double w = (b1 - a1) / (12.0 * (b2 - a2) * (b2 - a2));
    double a4 = a2 * a2 * a2 * a2, b4 = b2 * b2 * b2 * b2;
    if (-a2 <= b2) {
      r.upper = mid + w * (5 * a4 - 4 * a2 * b2 * b2 * b2 + 3 * b4);
      r.lower = mid + w * (-a4 - 4 * a2 * a2 * a2 * b2 + b4);
    } else {
      r.upper = mid + w * (3 * a4 - 4 * a2 * a2 * a2 * b2 + 5 * b4);
      r.lower = mid + w * (a4 - 4 * a2 * b2 * b2 * b2 - b4);
    }
  }
  return r;
}

// Standardized uniform bound (endpoint-free): 3^{(d+1)/2} d/((d+1)(d+2))
// for even d, 3^{(d+1)/2}/(d+2) for odd d; lower bound is its negative.
double closed_uniform_centered(int d) {
  double scale = std::pow(3.0, 0.5 * (d + 1));
  if (d % 2 == 0) return scale * d / (static_cast<double>(d + 1) * (d + 2));
  return scale / (d + 2);
}

}  // namespace

BoundsResult raw_bounds(const Marginal& m1, const Marginal& m2, int d,
                        Method method, std::uint64_t n, std::uint64_t seed,
                        unsigned threads) {
  if (d < 1) throw DomainError("moment order d must be >= 1");
  check_divergence(m1, m2, d);
  if (method == Method::ClosedForm) {
    auto u1 = m1.as_uniform(), u2 = m2.as_uniform();
    if (!u1 || !u2)
      throw UnsupportedCase("closed raw bounds cover uniform marginals with d <= 2");
    return closed_uniform_raw(u1->a, u1->b, u2->a, u2->b, d);
  }
  Marginal g2 = power_law(m2, d);
  preflight_grid(m1, g2);
  if (method == Method::Quadrature) return quad_bounds(m1, g2);
  return mc_bounds(m1, g2, n, seed, threads);
}

BoundsResult centered_bounds(const Marginal& m1, const Marginal& m2, int d,
                             Method method, std::uint64_t n, std::uint64_t seed,
                             unsigned threads) {
  if (d < 1) throw DomainError("moment order d must be >= 1");
  if (method == Method::ClosedForm) {
    // Validate standardizability first so degenerate marginals are
    // reported as such rather than as a missing closed form.
    standardized(m1);
    standardized(m2);
    if (!m1.as_uniform() || !m2.as_uniform())
      throw UnsupportedCase("closed centered bounds cover uniform marginal pairs");
    BoundsResult r;
    r.method = Method::ClosedForm;
    r.upper = closed_uniform_centered(d);
    r.lower = -r.upper;
    return r;
  }
  return raw_bounds(standardized(m1), standardized(m2), d, method, n, seed, threads);
}

CoskewnessBounds coskewness_bounds(CoskewnessKind kind, double nu) {
  CoskewnessBounds out;
  if (kind == CoskewnessKind::Exponential) {
    // Standardized exponential: H(x) = 1 - e^{-(x+1)}. The two-branch
    // split point is b = 1 - e^{-2}; below it the squared value follows
    // asinh-form level curves.
    double b = 1.0 - std::exp(-2.0);
    auto fsq = [](double x) {
      double r = std::asinh(0.5 * std::exp(1.0) * x);
      return r * r;
    };
    auto g = [](double u) { return -std::log1p(-u) - 1.0; };
    auto h = [](double u) { return -std::log(u) - 1.0; };
    auto upper_lo = [&](double u) { return g(u) * fsq(u); };
    auto upper_hi = [&](double u) { double t = g(u); return t * t * t; };
    auto lower_lo = [&](double u) { return h(u) * fsq(u); };
    auto lower_hi = [&](double u) { double t = g(u); return h(u) * t * t; };
    out.upper = adaptive_gauss_kronrod(upper_lo, kUnitEps, b).value +
                adaptive_gauss_kronrod([&](double t) {
                  double w = std::exp(-t);
                  return upper_hi(1.0 - w) * w;
                }, -std::log1p(-b), -std::log(kUnitEps)).value;
    out.lower = adaptive_gauss_kronrod([&](double t) {
                  double w = std::exp(-t);
                  return lower_lo(w) * w;
                }, -std::log(b), -std::log(kUnitEps)).value +
                adaptive_gauss_kronrod([&](double t) {
                  double w = std::exp(-t);
                  return lower_hi(1.0 - w) * w;
                }, -std::log1p(-b), -std::log(kUnitEps)).value;
    return out;
  }
  Marginal base = [&] {
    switch (kind) {
      case CoskewnessKind::Normal: return Marginal::normal(0.0, 1.0);
      case CoskewnessKind::StudentT:
        if (!(nu > 3.0))
          throw DomainError("coskewness bounds need nu > 3 for a finite third moment");
        return Marginal::student_t(nu);
      default: return Marginal::laplace(0.0, 1.0);
    }
  }();
  Marginal h = standardized(base);
  auto integrand = [&h](double u) {
    double q = h.quantile(0.5 * (1.0 + u));
    return h.quantile(u) * q * q;
  };
  out.upper = integrate_unit(integrand);
  out.lower = -out.upper;
  return out;
}

}  // namespace comoment
