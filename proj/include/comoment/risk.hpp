#pragma once

#include <cstdint>
#include <span>

#include "comoment/estimates.hpp"
#include "comoment/mixture.hpp"

namespace comoment {

// Empirical value-at-risk: the ceil(n*p)-th order statistic (generalized
// inverse of the empirical CDF). Requires n*(1-p) >= 1.
double var_empirical(std::span<const double> losses, double p);

// Fill per-draw aggregate losses s[i] = l1 + l2 and optionally the
// components (any pointer may be null) for n mixture draws on stream
// kMixtureStream. Shared by the tail estimators and their tests.
void mixture_losses(const MixtureParams& params, std::uint64_t n,
                    std::uint64_t seed, double* s, double* l1, double* l2,
                    unsigned threads = 0);

// Expected shortfall of S = L1 + L2 at level p: the average of the
// k = floor(n(1-p)) largest draws of S; se is the tail-sample standard
// deviation over sqrt(k). Requires n(1-p) >= 1000.
Estimate es_mixture(const MixtureParams& params, double p, std::uint64_t n,
                    std::uint64_t seed, unsigned threads = 0);

// Marginal expected shortfall: the average of component `component` (1 or
// 2) over the draws whose S ranks in the top k. Same preconditions.
Estimate mes_mixture(const MixtureParams& params, double p, std::uint64_t n,
                     std::uint64_t seed, unsigned threads = 0,
                     int component = 1);

}  // namespace comoment
