#pragma once

#include <cstdint>

namespace comoment {

// Point estimate together with the provenance needed to reproduce it.
// Closed-form results use se = 0 and n = 0. p carries the tail level for
// quantile-conditional estimates (VaR/ES/MES) and is 0 elsewhere.
struct Estimate {
  double value = 0.0;
  double se = 0.0;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  double p = 0.0;
};

}  // namespace comoment
