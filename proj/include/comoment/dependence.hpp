#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "comoment/couplings.hpp"
#include "comoment/estimates.hpp"
#include "comoment/mixture.hpp"

namespace comoment {

// Two columns of equal length; the estimators below treat row i of the two
// columns as one joint observation.
struct PairedSample {
  std::vector<double> x1;
  std::vector<double> x2;

  std::size_t size() const noexcept { return x1.size(); }
};

// Strict two-column CSV ('.' decimal, comma separator, optional header row).
PairedSample load_pairs_csv(const std::string& path);

// Normalizer c_d that maps the extremal value of E[(U1-1/2)(U2-1/2)^d] to 1:
// 2^{d+1}(d+1)(d+2)/d for even d, 2^{d+1}(d+2) for odd d.
double rank_normalizer(int d);

// Rank coefficient of order d: c_d * mean[(R1/(n+1)-1/2)(R2/(n+1)-1/2)^d]
// with mid-ranks (ties averaged). d=1 is Spearman's coefficient up to the
// exact factor (n-1)/(n+1). Invariant under strictly increasing per-column
// transforms; |result| <= 1 + 2/n.
double rank_coefficient(const PairedSample& sample, int d);

// Sample standardized mixed moment mean[y1 * y2^d] with yi = (xi - mean_i)/sd_i,
// sample means and divisor-n standard deviations.
double centered_moment(const PairedSample& sample, int d);

// Population rank coefficient of an extremal coupling by Monte Carlo:
// average of c_d(u1-1/2)(u2-1/2)^d over exact unit-level draws.
Estimate rank_coefficient_model(const CouplingSpec& coupling, std::uint64_t n,
                                std::uint64_t seed, unsigned threads = 0);

// Same estimator driven by the exponential mixture copula.
Estimate rank_coefficient_model(const MixtureParams& params, int d, std::uint64_t n,
                                std::uint64_t seed, unsigned threads = 0);

}  // namespace comoment
