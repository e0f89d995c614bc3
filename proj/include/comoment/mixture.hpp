#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace comoment {

// Parity of the moment order the mixture is extremal for; the even branch
// uses the two-branch level map, the odd branch the identity map.
enum class Parity { EvenD, OddD };

// Bernoulli(mix) mixture of the moment-minimizing (B=0) and -maximizing
// (B=1) couplings for a pair of exponential losses. The unit-level copula
// depends only on mix and parity; rate1/rate2 convert levels to losses.
struct MixtureParams {
  double rate1 = 1.0;
  double rate2 = 1.0;
  double mix = 0.5;
  Parity parity = Parity::EvenD;
};

// Throws DomainError unless rates > 0 and mix lies in [0,1].
void validate_params(const MixtureParams& params);

// Stream id consumed by sample_mixture and the loss-based estimators built
// on it; draw i reads uniforms (3i, 3i+1, 3i+2) as (w, u, v). Shared so
// that different estimators can reuse identical draws for a common seed.
inline constexpr std::uint64_t kMixtureStream = 7003;

// Second unit level of the even-parity map. Below the split level
// 1 - e^{-2} the mass divides between an upper branch 1 + (u - s)/2 and a
// lower branch 1 - (u + s)/2, s = sqrt(u^2 + 4e^{-2}), the lower taken
// with probability (1 + u/s)/2; above it the map is the identity.
double mixture_u2_even(double u, double v);

// Unit-level pair (u1, u2) of one draw: w drives the Bernoulli branch
// (u1 = u if w < mix, else 1 - u), u the common level, v the branch split.
std::pair<double, double> mixture_pair(const MixtureParams& params, double w,
                                       double u, double v);

struct MixtureDraw {
  double u1, u2;  // unit levels
  double l1, l2;  // losses -ln(1 - u_i)/rate_i
};

std::vector<MixtureDraw> sample_mixture(const MixtureParams& params,
                                        std::uint64_t n, std::uint64_t seed,
                                        unsigned threads = 0);

// Sharp range [lower, upper] of the standardized moment E[Y1 Y2^d] for two
// exponential marginals (independent of the rates). Quadrature-backed and
// cached per d.
std::pair<double, double> exponential_moment_range(int d);

// Model moment: lower + mix * (upper - lower). Requires the parity of d to
// match params.parity.
double moment_of_lambda(const MixtureParams& params, int d);

// Inverse of the linear map; OutOfRange when target lies outside the
// attainable interval.
double lambda_for_moment(const MixtureParams& params, int d, double target);

}  // namespace comoment
