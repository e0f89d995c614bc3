#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace comoment {

inline constexpr std::array<double, 5> kLambdaGrid{0.0, 0.25, 0.5, 0.75, 1.0};

struct ValueSe {
  double value = 0.0;
  double se = 0.0;
};

// --- Coskewness interval per marginal family (both marginals identical) ---

struct CoskewnessRow {
  std::string family;
  double lower = 0.0;
  double upper = 0.0;
};

std::vector<CoskewnessRow> coskewness_table();

// --- Mixture moments mu_1..mu_4 and rank coefficients over the mix grid ---

struct MomentTable {
  std::array<std::array<ValueSe, 5>, 4> mu;  // [d-1][lambda index]
  std::array<std::array<ValueSe, 5>, 4> rs;
};

MomentTable moment_table(std::uint64_t n, std::uint64_t seed,
                         unsigned threads = 0);

// --- ES / MES panels over the mix grid ---

struct PanelSpec {
  double rate1, rate2, p;
};

inline constexpr std::array<PanelSpec, 5> kTailPanels{{
    {1.0, 1.0, 0.95},
    {2.0, 1.0, 0.95},
    {1.0, 2.0, 0.95},
    {1.0, 1.0, 0.90},
    {1.0, 1.0, 0.99},
}};

using PanelGrid = std::array<std::array<ValueSe, 5>, 5>;  // [panel][lambda]

PanelGrid es_table(std::uint64_t n, std::uint64_t seed, unsigned threads = 0);
PanelGrid mes_table(std::uint64_t n, std::uint64_t seed, unsigned threads = 0);

// --- Annuity present values for the calibrated lifetimes ---

inline constexpr double kCalibratedRateX = 0.0533;
inline constexpr double kCalibratedRateY = 0.0434;
inline constexpr double kFlatInterest = 0.045;
inline constexpr std::array<int, 3> kAnnuityTerms{30, 10, 50};

struct AnnuityPanel {
  int term = 0;
  std::array<ValueSe, 5> last;   // last-survivor PV per lambda
  std::array<ValueSe, 5> joint;  // joint-life PV per lambda
};

std::array<AnnuityPanel, 3> annuity_table(std::uint64_t n, std::uint64_t seed,
                                          unsigned threads = 0);

// --- CSV emitters for the reproduce command ---
// Deterministic output: shortest round-trip number formatting, comma
// separator, header row, LF endings.

void write_table1(std::ostream& os);
void write_table2(std::ostream& os, std::uint64_t n, std::uint64_t seed,
                  unsigned threads = 0);
void write_table3(std::ostream& os, std::uint64_t n, std::uint64_t seed,
                  unsigned threads = 0);
void write_table4(std::ostream& os, std::uint64_t n, std::uint64_t seed,
                  unsigned threads = 0);
void write_table5(std::ostream& os, std::uint64_t n, std::uint64_t seed,
                  unsigned threads = 0);

// Extremal-coupling supports (branch curves as series of (u1, u2) points):
// fig1 standard normal, fig2 Uniform(-1,3), fig3 Exponential(1) shifted by
// -ln 2, all for d = 2.
void write_fig1(std::ostream& os);
void write_fig2(std::ostream& os);
void write_fig3(std::ostream& os);

// Tail-level sweeps of ES (fig4) and MES (fig5) for rates (1.5, 2) at
// mix 0 and 1, p on a 99-point grid over [0.75, 1).
void write_fig4(std::ostream& os, std::uint64_t n, std::uint64_t seed,
                unsigned threads = 0);
void write_fig5(std::ostream& os, std::uint64_t n, std::uint64_t seed,
                unsigned threads = 0);

// Annuity PV against the term n = 5..80 for the calibrated lifetimes:
// last-survivor and joint-life at mix 0, mix 1 and under independence.
void write_fig6(std::ostream& os, std::uint64_t n, std::uint64_t seed,
                unsigned threads = 0);

// Dispatch by identifier (table1..table5, fig1..fig6); n_override = 0 uses
// the per-target default. Throws UnknownTarget.
void write_reproduction(const std::string& target, std::ostream& os,
                        std::uint64_t n_override, std::uint64_t seed,
                        unsigned threads = 0);

// Per-target default sample size (0 for deterministic targets).
std::uint64_t reproduction_default_n(const std::string& target);

}  // namespace comoment
