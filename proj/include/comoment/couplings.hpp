#pragma once

#include <cstdint>
#include <functional>
#include <utility>

#include "comoment/marginals.hpp"

namespace comoment {

enum class Extreme { Max, Min };

// Coupling of (X1, X2) attaining the extreme of E[X1 X2^d] for the given
// marginals. Driven by two independent uniforms (u, v) per draw.
struct CouplingSpec {
  Marginal marginal1;
  Marginal marginal2;
  int d = 1;
  Extreme extreme = Extreme::Max;
};

// Two-branch inverse system for even d over a straddling marginal2. For
// levels u below identity_above the level-u mass splits between an upper
// branch g_inv(u) and a lower branch f_inv(u), the lower taken with
// probability deriv_ratio_p(u); above the threshold a single branch
// remains: u2 = u, or u2 = 1 - u when reflected is set.
struct BranchSystem {
  double identity_above = 0.0;
  bool reflected = false;
  std::function<double(double)> g_inv, f_inv;
  std::function<double(double)> g, f;  // level maps inverting g_inv / f_inv
  std::function<double(double)> deriv_ratio_p;
  bool closed_form = false;
};

// Branch system for marginal2 and even d. Closed forms are used for
// uniform, negatively shifted exponential and continuous symmetric
// zero-mean marginals; otherwise the system is built from power-law
// quantile bisection with finite-difference branch probabilities.
// Throws UnsupportedCase for a discrete marginal2.
BranchSystem branch_functions(const Marginal& marginal2, int d);

// Map driver uniforms to marginal levels (u1, u2). Throws DomainError when
// u or v lies on the boundary {0,1}; v is part of the draw contract even
// where the map ignores it.
std::pair<double, double> sample_pair(const CouplingSpec& spec, double u, double v);

// Quantile-transformed draw (x1, x2).
std::pair<double, double> sample_xy(const CouplingSpec& spec, double u, double v);

// Deterministic batch: draw i consumes stream uniforms (2i, 2i+1). Output
// arrays may be null when a component is not needed.
void sample_xy_batch(const CouplingSpec& spec, std::uint64_t n,
                     std::uint64_t seed, std::uint64_t stream_id,
                     double* u1, double* u2, double* x1, double* x2,
                     unsigned threads = 0);

}  // namespace comoment
