#pragma once

#include <cstdint>
#include <utility>

#include "comoment/estimates.hpp"

namespace comoment {

// Survival status priced by the annuity. Joint-life pays while both lives
// survive, last-survivor while at least one does; the Independent variants
// replace the mixture copula with the product copula (closed form).
enum class AnnuityStatus {
  JointLife,
  LastSurvivor,
  IndependentJointLife,
  IndependentLastSurvivor,
};

// Two constant-force lifetimes T_x ~ Exp(rate_x), T_y ~ Exp(rate_y) coupled
// through the even-parity mixture copula at level mix, discounted at flat
// interest; payments of 1 at the end of each surviving year 1..term.
struct AnnuitySpec {
  double rate_x = 1.0;
  double rate_y = 1.0;
  double interest = 0.045;
  int term = 30;
  double mix = 0.5;
  AnnuityStatus status = AnnuityStatus::LastSurvivor;
};

// Throws DomainError unless rates > 0, term >= 1, interest > -1, mix in [0,1].
void validate_spec(const AnnuitySpec& spec);

// P(status still alive at time t). Monte Carlo for the mixture statuses
// (joint and last-survivor share draws, so their estimates add exactly to
// e^{-rate_x t} + e^{-rate_y t}); closed form for the independent ones.
Estimate survival_probability(const AnnuitySpec& spec, double t,
                              std::uint64_t n_mc, std::uint64_t seed,
                              unsigned threads = 0);

// Present value sum_{k=1..term} v^k P(alive at k), v = 1/(1+interest), all
// yearly probabilities evaluated on one shared simulation batch.
Estimate annuity_pv(const AnnuitySpec& spec, std::uint64_t n_mc,
                    std::uint64_t seed, unsigned threads = 0);

// Constant-force rates from expected remaining lifetimes (reciprocals).
std::pair<double, double> calibrate_rates(double remaining_life_x,
                                          double remaining_life_y);

}  // namespace comoment
