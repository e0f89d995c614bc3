#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace comoment {

// Internal polymorphic distribution; Marginal is the value-semantics facade.
struct MarginalImpl;

// Immutable univariate marginal distribution. Exposes quantile/CDF and the
// summary quantities the bound machinery needs; densities are deliberately
// not part of the interface.
//
// quantile(p) accepts p in [0,1]; p = 0 or 1 returns the corresponding
// support endpoint when finite and throws DomainError when the support is
// unbounded on that side.
class Marginal {
public:
  static Marginal uniform(double a, double b);
  static Marginal exponential(double rate, double shift = 0.0);
  static Marginal normal(double mu, double sigma);
  static Marginal student_t(double nu);  // requires nu > 2
  static Marginal laplace(double mu, double b);
  static Marginal empirical(std::vector<double> values, std::string source = {});
  static Marginal empirical_from_file(const std::string& path);

  // Grammar: kind:key=value[,key=value...] with kinds
  //   unif:a=..,b=..   expon:rate=..[,shift=..]   norm:mu=..,sigma=..
  //   t:nu=..          laplace:mu=..,b=..         empirical:file=path
  static Marginal parse(const std::string& text);

  double quantile(double p) const;
  double cdf(double x) const;
  double mean() const;
  double stddev() const;
  double support_lo() const;
  double support_hi() const;
  // Power-law tail index: nu for Student t, +inf otherwise. E|X|^k is
  // finite iff k < tail_index().
  double tail_index() const;
  bool is_discrete() const;
  std::string describe() const;

  struct UniformParams { double a, b; };
  struct ExponentialParams { double rate, shift; };
  // Parameter views used to select closed-form branch systems; empty for
  // other kinds (including wrappers).
  std::optional<UniformParams> as_uniform() const;
  std::optional<ExponentialParams> as_exponential() const;
  // True when the law is continuous, symmetric about zero. Decided from the
  // quantile function, so standardized symmetric kinds qualify too.
  bool symmetric_zero_mean() const;

private:
  explicit Marginal(std::shared_ptr<const MarginalImpl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const MarginalImpl> impl_;
  friend Marginal standardized(const Marginal&);
  friend Marginal power_law(const Marginal&, int);
};

// (X - mean)/stddev; throws DegenerateMarginal if stddev() == 0.
Marginal standardized(const Marginal& m);

// Law of X^d for integer d >= 1. For an empirical marginal this is the
// empirical law of the d-th powers; for continuous marginals the two-sided
// (even d, straddling support) quantile is resolved by bisection on the
// probability to 1e-12.
Marginal power_law(const Marginal& m, int d);

}  // namespace comoment
