#pragma once

#include <cstdint>

#include "comoment/marginals.hpp"

namespace comoment {

enum class Method { ClosedForm, Quadrature, MonteCarlo };

struct BoundsResult {
  double lower = 0.0;
  double upper = 0.0;
  double lower_stderr = 0.0;  // zero for deterministic methods
  double upper_stderr = 0.0;
  Method method = Method::Quadrature;
};

// Sharp bounds of E[X1 X2^d] over all couplings of the given marginals.
// Quadrature integrates the rearranged quantile products; Monte Carlo uses
// common random numbers for the two bounds; ClosedForm covers uniform
// marginal pairs with d <= 2 and throws UnsupportedCase otherwise.
// Throws DivergentMoment when the extremal moment is not finite.
BoundsResult raw_bounds(const Marginal& m1, const Marginal& m2, int d,
                        Method method, std::uint64_t n = 0,
                        std::uint64_t seed = 42, unsigned threads = 0);

// Bounds of the standardized moment E[Y1 Y2^d], Yi = (Xi - mean)/stddev.
// ClosedForm covers uniform marginal pairs for any d (the standardized
// bound does not depend on the uniform endpoints).
BoundsResult centered_bounds(const Marginal& m1, const Marginal& m2, int d,
                             Method method, std::uint64_t n = 0,
                             std::uint64_t seed = 42, unsigned threads = 0);

enum class CoskewnessKind { Normal, StudentT, Laplace, Exponential };

struct CoskewnessBounds {
  double lower = 0.0;
  double upper = 0.0;
};

// Standardized coskewness bounds E[Y1 Y2^2] for identically shaped
// marginals. nu applies to the Student t kind only and must exceed 3 so
// that the third moment exists.
CoskewnessBounds coskewness_bounds(CoskewnessKind kind, double nu = 5.0);

}  // namespace comoment
