#include "comoment/tables.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <ostream>
#include <utility>
#include <vector>

#include "comoment/accumulators.hpp"
#include "comoment/annuity.hpp"
#include "comoment/bounds.hpp"
#include "comoment/couplings.hpp"
#include "comoment/dependence.hpp"
#include "comoment/errors.hpp"
#include "comoment/format.hpp"
#include "comoment/marginals.hpp"
#include "comoment/mixture.hpp"
#include "comoment/parallel.hpp"
#include "comoment/risk.hpp"
#include "comoment/rng.hpp"

namespace comoment {

namespace {

constexpr std::uint64_t kMomentTableStream = 7006;
constexpr std::uint64_t kAnnuityCurveStream = 7004;  // same draws as annuity_pv

double ipow(double x, int k) {
  double r = 1.0;
  for (double b = x;; b *= b) {
    if (k & 1) r *= b;
    k >>= 1;
    if (k == 0) return r;
  }
}

void check_n(std::uint64_t n) {
  if (n == 0) throw DomainError("sample size must be positive");
}

// Joint accumulator for the two per-draw kernels (antithetic h0, comonotone
// h1) whose mix-weighted average gives every cell of one row.
struct KernelPair {
  StreamingMoments lo{2}, hi{2};
  NeumaierSum cross;  // sum of h0*h1 for the mixed-cell variance

  void push(double h0, double h1) {
    lo.push(h0);
    hi.push(h1);
    cross.add(h0 * h1);
  }
  void merge(const KernelPair& o) {
    lo.merge(o.lo);
    hi.merge(o.hi);
    cross.add(o.cross.total());
  }
  ValueSe at(double mix) const {
    double n = static_cast<double>(lo.count());
    double m0 = lo.mean(), m1 = hi.mean();
    double cov = (cross.total() - n * m0 * m1) / (n - 1.0);
    double var = (1.0 - mix) * (1.0 - mix) * lo.variance() +
                 mix * mix * hi.variance() +
                 2.0 * mix * (1.0 - mix) * cov;
    return {(1.0 - mix) * m0 + mix * m1,
            std::sqrt(std::max(var, 0.0) / n)};
  }
};

struct MomentState {
  std::array<KernelPair, 4> mu;
  std::array<StreamingMoments, 4> rs{StreamingMoments(2), StreamingMoments(2),
                                     StreamingMoments(2), StreamingMoments(2)};

  void merge(const MomentState& o) {
    for (int d = 0; d < 4; ++d) {
      mu[static_cast<std::size_t>(d)].merge(o.mu[static_cast<std::size_t>(d)]);
      rs[static_cast<std::size_t>(d)].merge(o.rs[static_cast<std::size_t>(d)]);
    }
  }
};

std::string lambda_tag(double mix) {
  if (mix == 0.0) return "0";
  if (mix == 1.0) return "1";
  return format_double(mix);
}

void write_grid_header(std::ostream& os, const std::string& prefix) {
  os << prefix;
  for (double mix : kLambdaGrid) {
    std::string tag = lambda_tag(mix);
    os << ",value_lambda" << tag << ",stderr_lambda" << tag;
  }
  os << '\n';
}

void write_grid_row(std::ostream& os, const std::string& prefix,
                    const std::array<ValueSe, 5>& row) {
  os << prefix;
  for (const ValueSe& cell : row)
    os << ',' << format_double(cell.value) << ',' << format_double(cell.se);
  os << '\n';
}

PanelGrid tail_table(bool es_mode, std::uint64_t n, std::uint64_t seed,
                     unsigned threads) {
  check_n(n);
  PanelGrid grid{};
  for (std::size_t pi = 0; pi < kTailPanels.size(); ++pi) {
    const PanelSpec& panel = kTailPanels[pi];
    for (std::size_t li = 0; li < kLambdaGrid.size(); ++li) {
      MixtureParams params{panel.rate1, panel.rate2, kLambdaGrid[li],
                           Parity::EvenD};
      Estimate e = es_mode ? es_mixture(params, panel.p, n, seed, threads)
                           : mes_mixture(params, panel.p, n, seed, threads);
      grid[pi][li] = {e.value, e.se};
    }
  }
  return grid;
}

// 512-point parametrization of the extremal support for d = 2: the two
// branch curves below the identity threshold, then the single branch above
// it; the minimizing arrangement is the same system at u1 = 1 - u.
void write_support(std::ostream& os, const Marginal& m2) {
  BranchSystem bs = branch_functions(m2, 2);
  constexpr int kPoints = 512;
  os << "series,u1,u2\n";
  auto emit = [&os](const std::string& name, const std::function<double(double)>& f,
                    double a, double b, bool flip) {
    for (int j = 0; j < kPoints; ++j) {
      double u = a + (b - a) * static_cast<double>(j) / (kPoints - 1.0);
      double u1 = flip ? 1.0 - u : u;
      os << name << ',' << format_double(u1) << ',' << format_double(f(u))
         << '\n';
    }
  };
  const double tau = bs.identity_above;
  auto ident = [&bs](double u) { return bs.reflected ? 1.0 - u : u; };
  emit("max_upper_branch", bs.g_inv, 0.0, tau, false);
  emit("max_lower_branch", bs.f_inv, 0.0, tau, false);
  if (tau < 1.0) emit("max_identity", ident, tau, 1.0, false);
  emit("min_upper_branch", bs.g_inv, 0.0, tau, true);
  emit("min_lower_branch", bs.f_inv, 0.0, tau, true);
  if (tau < 1.0) emit("min_identity", ident, tau, 1.0, true);
}

// ES/MES sweep over the tail-level grid, one simulation per mix endpoint.
void write_tail_sweep(std::ostream& os, bool es_mode, std::uint64_t n,
                      std::uint64_t seed, unsigned threads) {
  check_n(n);
  constexpr int kGrid = 99;
  std::array<double, kGrid> levels;
  for (int j = 0; j < kGrid; ++j)
    levels[static_cast<std::size_t>(j)] = 0.75 + 0.25 * j / static_cast<double>(kGrid);
  struct Column {
    std::array<double, kGrid> value, se;
  };
  std::array<Column, 2> cols;
  for (int li = 0; li < 2; ++li) {
    MixtureParams params{1.5, 2.0, li == 0 ? 0.0 : 1.0, Parity::EvenD};
    std::vector<double> s(n);
    std::vector<double> l1;
    if (!es_mode) l1.resize(n);
    mixture_losses(params, n, seed, s.data(), es_mode ? nullptr : l1.data(),
                   nullptr, threads);
    std::vector<std::uint64_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::uint64_t{0});
    std::sort(idx.begin(), idx.end(), [&s](std::uint64_t a, std::uint64_t b) {
      if (s[a] != s[b]) return s[a] > s[b];
      return a < b;
    });
    // tail sizes are decreasing in p; walk the sorted draws once
    std::array<std::uint64_t, kGrid> ks;
    for (int j = 0; j < kGrid; ++j) {
      double lvl = levels[static_cast<std::size_t>(j)];
      ks[static_cast<std::size_t>(j)] = static_cast<std::uint64_t>(
          std::floor(static_cast<double>(n) * (1.0 - lvl) + 1e-9));
      if (ks[static_cast<std::size_t>(j)] < 2)
        throw InsufficientSample("tail grid needs n(1-p) >= 2 at every level");
    }
    std::vector<std::pair<std::uint64_t, int>> targets;
    for (int j = 0; j < kGrid; ++j)
      targets.emplace_back(ks[static_cast<std::size_t>(j)], j);
    std::sort(targets.begin(), targets.end());
    NeumaierSum sum, sumsq;
    std::size_t t = 0;
    for (std::uint64_t i = 0; i < n && t < targets.size(); ++i) {
      double x = es_mode ? s[idx[i]] : l1[idx[i]];
      sum.add(x);
      sumsq.add(x * x);
      while (t < targets.size() && targets[t].first == i + 1) {
        double k = static_cast<double>(i + 1);
        double mean = sum.total() / k;
        double var = (sumsq.total() - k * mean * mean) / (k - 1.0);
        auto j = static_cast<std::size_t>(targets[t].second);
        cols[static_cast<std::size_t>(li)].value[j] = mean;
        cols[static_cast<std::size_t>(li)].se[j] =
            std::sqrt(std::max(var, 0.0) / k);
        ++t;
      }
    }
  }
  const char* what = es_mode ? "es" : "mes";
  os << "p";
  for (const char* tag : {"0", "1"})
    os << ',' << what << "_lambda" << tag << ",stderr_lambda" << tag;
  os << '\n';
  for (int j = 0; j < kGrid; ++j) {
    auto js = static_cast<std::size_t>(j);
    os << format_double(levels[js]);
    for (auto& col : cols)
      os << ',' << format_double(col.value[js]) << ','
         << format_double(col.se[js]);
    os << '\n';
  }
}

double term_sum(double q, int term) {
  NeumaierSum acc;
  double pw = 1.0;
  for (int k = 1; k <= term; ++k) {
    pw *= q;
    acc.add(pw);
  }
  return acc.total();
}

}  // namespace

std::vector<CoskewnessRow> coskewness_table() {
  std::vector<CoskewnessRow> rows;
  auto add = [&rows](std::string family, CoskewnessBounds b) {
    rows.push_back({std::move(family), b.lower, b.upper});
  };
  add("normal", coskewness_bounds(CoskewnessKind::Normal));
  add("student_t5", coskewness_bounds(CoskewnessKind::StudentT, 5.0));
  add("student_t10", coskewness_bounds(CoskewnessKind::StudentT, 10.0));
  add("laplace", coskewness_bounds(CoskewnessKind::Laplace));
  add("exponential", coskewness_bounds(CoskewnessKind::Exponential));
  return rows;
}

MomentTable moment_table(std::uint64_t n, std::uint64_t seed,
                         unsigned threads) {
  check_n(n);
  RngStream rng(seed, kMomentTableStream);
  auto fill = [&rng](MomentState& st, std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t i = lo; i < hi; ++i) {
      double u = rng.uniform(2 * i);
      double v = rng.uniform(2 * i + 1);
      double u2 = mixture_u2_even(u, v);
      // standardized-exponential quantiles at the levels of the two branches
      double xmax = -std::log1p(-u) - 1.0;
      double xmin = -std::log(u) - 1.0;
      double yodd = xmax;
      double yeven = -std::log1p(-u2) - 1.0;
      double du = u - 0.5;
      double d2 = u2 - 0.5;
      for (int d = 1; d <= 4; ++d) {
        double y = d % 2 == 1 ? ipow(yodd, d) : ipow(yeven, d);
        st.mu[static_cast<std::size_t>(d - 1)].push(xmin * y, xmax * y);
        double r = d % 2 == 1 ? du * ipow(du, d) : du * ipow(d2, d);
        st.rs[static_cast<std::size_t>(d - 1)].push(r);
      }
    }
  };
  auto merge = [](MomentState& a, const MomentState& b) { a.merge(b); };
  MomentState st = chunked_reduce(n, MomentState{}, fill, merge, threads);
  MomentTable out;
  for (int d = 1; d <= 4; ++d) {
    auto di = static_cast<std::size_t>(d - 1);
    double cd = rank_normalizer(d);
    for (std::size_t li = 0; li < kLambdaGrid.size(); ++li) {
      double mix = kLambdaGrid[li];
      out.mu[di][li] = st.mu[di].at(mix);
      // the antithetic kernel is the exact negative of the comonotone one,
      // so the mixed estimator collapses to a (2*mix - 1) scaling
      double w = 2.0 * mix - 1.0;
      out.rs[di][li] = {w * cd * st.rs[di].mean(),
                        std::abs(w) * cd * st.rs[di].stderr_mean()};
    }
  }
  return out;
}

PanelGrid es_table(std::uint64_t n, std::uint64_t seed, unsigned threads) {
  return tail_table(true, n, seed, threads);
}

PanelGrid mes_table(std::uint64_t n, std::uint64_t seed, unsigned threads) {
  return tail_table(false, n, seed, threads);
}

std::array<AnnuityPanel, 3> annuity_table(std::uint64_t n, std::uint64_t seed,
                                          unsigned threads) {
  check_n(n);
  std::array<AnnuityPanel, 3> out{};
  for (std::size_t pi = 0; pi < kAnnuityTerms.size(); ++pi) {
    out[pi].term = kAnnuityTerms[pi];
    for (std::size_t li = 0; li < kLambdaGrid.size(); ++li) {
      AnnuitySpec spec{kCalibratedRateX, kCalibratedRateY, kFlatInterest,
                       kAnnuityTerms[pi], kLambdaGrid[li],
                       AnnuityStatus::LastSurvivor};
      Estimate last = annuity_pv(spec, n, seed, threads);
      spec.status = AnnuityStatus::JointLife;
      Estimate joint = annuity_pv(spec, n, seed, threads);
      out[pi].last[li] = {last.value, last.se};
      out[pi].joint[li] = {joint.value, joint.se};
    }
  }
  return out;
}

void write_table1(std::ostream& os) {
  os << "family,lower,lower_stderr,upper,upper_stderr\n";
  for (const CoskewnessRow& row : coskewness_table())
    os << row.family << ',' << format_double(row.lower) << ",0,"
       << format_double(row.upper) << ",0\n";
}

void write_table2(std::ostream& os, std::uint64_t n, std::uint64_t seed,
                  unsigned threads) {
  MomentTable t = moment_table(n, seed, threads);
  write_grid_header(os, "measure");
  for (int d = 1; d <= 4; ++d)
    write_grid_row(os, "mu" + std::to_string(d),
                   t.mu[static_cast<std::size_t>(d - 1)]);
  for (int d = 1; d <= 4; ++d)
    write_grid_row(os, "rs" + std::to_string(d),
                   t.rs[static_cast<std::size_t>(d - 1)]);
}

namespace {

void write_tail_panels(std::ostream& os, const PanelGrid& grid) {
  write_grid_header(os, "panel,rate1,rate2,p");
  const char* names = "ABCDE";
  for (std::size_t pi = 0; pi < kTailPanels.size(); ++pi) {
    const PanelSpec& panel = kTailPanels[pi];
    std::string prefix;
    prefix += names[pi];
    prefix += ',' + format_double(panel.rate1) + ',' +
              format_double(panel.rate2) + ',' + format_double(panel.p);
    write_grid_row(os, prefix, grid[pi]);
  }
}

}  // namespace

void write_table3(std::ostream& os, std::uint64_t n, std::uint64_t seed,
                  unsigned threads) {
  write_tail_panels(os, es_table(n, seed, threads));
}

void write_table4(std::ostream& os, std::uint64_t n, std::uint64_t seed,
                  unsigned threads) {
  write_tail_panels(os, mes_table(n, seed, threads));
}

void write_table5(std::ostream& os, std::uint64_t n, std::uint64_t seed,
                  unsigned threads) {
  auto panels = annuity_table(n, seed, threads);
  write_grid_header(os, "panel,term,status");
  const char* names = "ABC";
  for (std::size_t pi = 0; pi < panels.size(); ++pi) {
    std::string base;
    base += names[pi];
    base += ',' + std::to_string(panels[pi].term) + ',';
    write_grid_row(os, base + "last_survivor", panels[pi].last);
    write_grid_row(os, base + "joint_life", panels[pi].joint);
  }
}

void write_fig1(std::ostream& os) { write_support(os, Marginal::normal(0.0, 1.0)); }

void write_fig2(std::ostream& os) { write_support(os, Marginal::uniform(-1.0, 3.0)); }

void write_fig3(std::ostream& os) {
  write_support(os, Marginal::exponential(1.0, -std::log(2.0)));
}

void write_fig4(std::ostream& os, std::uint64_t n, std::uint64_t seed,
                unsigned threads) {
  write_tail_sweep(os, true, n, seed, threads);
}

void write_fig5(std::ostream& os, std::uint64_t n, std::uint64_t seed,
                unsigned threads) {
  write_tail_sweep(os, false, n, seed, threads);
}

void write_fig6(std::ostream& os, std::uint64_t n, std::uint64_t seed,
                unsigned threads) {
  check_n(n);
  constexpr int kMaxTerm = 80;
  constexpr int kMinTerm = 5;
  const double nu = 1.0 / (1.0 + kFlatInterest);
  std::vector<double> discount(kMaxTerm + 1, 0.0);
  {
    NeumaierSum acc;
    double pw = 1.0;
    for (int k = 1; k <= kMaxTerm; ++k) {
      pw *= nu;
      acc.add(pw);
      discount[static_cast<std::size_t>(k)] = acc.total();
    }
  }
  // Histogram of the last paying year per branch; counts are exact, so the
  // fold is independent of chunking.
  struct Hist {
    std::array<std::uint64_t, kMaxTerm + 1> anti{}, como{};
    void merge(const Hist& o) {
      for (std::size_t j = 0; j < anti.size(); ++j) {
        anti[j] += o.anti[j];
        como[j] += o.como[j];
      }
    }
  };
  RngStream rng(seed, kAnnuityCurveStream);
  auto fill = [&rng](Hist& h, std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t i = lo; i < hi; ++i) {
      double u = rng.uniform(2 * i);
      double v = rng.uniform(2 * i + 1);
      double u2 = mixture_u2_even(u, v);
      auto years = [](double t) {
        return t >= static_cast<double>(kMaxTerm) ? kMaxTerm
                                                  : static_cast<int>(t);
      };
      int my = years(-std::log1p(-u2) / kCalibratedRateY);
      int m1 = years(-std::log1p(-u) / kCalibratedRateX);
      int m0 = years(-std::log(u) / kCalibratedRateX);
      ++h.como[static_cast<std::size_t>(std::min(m1, my))];
      ++h.anti[static_cast<std::size_t>(std::min(m0, my))];
    }
  };
  auto merge = [](Hist& a, const Hist& b) { a.merge(b); };
  Hist hist = chunked_reduce(n, Hist{}, fill, merge, threads);
  auto stats = [&](const std::array<std::uint64_t, kMaxTerm + 1>& cnt,
                   int term) {
    NeumaierSum sum, sumsq;
    for (std::size_t j = 0; j < cnt.size(); ++j) {
      double z = discount[std::min<std::size_t>(j, static_cast<std::size_t>(term))];
      double c = static_cast<double>(cnt[j]);
      sum.add(c * z);
      sumsq.add(c * z * z);
    }
    double nn = static_cast<double>(n);
    double mean = sum.total() / nn;
    double var = (sumsq.total() - nn * mean * mean) / (nn - 1.0);
    return ValueSe{mean, std::sqrt(std::max(var, 0.0) / nn)};
  };
  os << "term,last_lambda0,stderr_last_lambda0,last_lambda1,stderr_last_"
        "lambda1,last_independent,joint_lambda0,stderr_joint_lambda0,joint_"
        "lambda1,stderr_joint_lambda1,joint_independent\n";
  for (int term = kMinTerm; term <= kMaxTerm; ++term) {
    double singles = term_sum(nu * std::exp(-kCalibratedRateX), term) +
                     term_sum(nu * std::exp(-kCalibratedRateY), term);
    double indep_joint =
        term_sum(nu * std::exp(-kCalibratedRateX - kCalibratedRateY), term);
    ValueSe joint0 = stats(hist.anti, term);
    ValueSe joint1 = stats(hist.como, term);
    os << term;
    os << ',' << format_double(singles - joint0.value) << ','
       << format_double(joint0.se);
    os << ',' << format_double(singles - joint1.value) << ','
       << format_double(joint1.se);
    os << ',' << format_double(singles - indep_joint);
    os << ',' << format_double(joint0.value) << ',' << format_double(joint0.se);
    os << ',' << format_double(joint1.value) << ',' << format_double(joint1.se);
    os << ',' << format_double(indep_joint);
    os << '\n';
  }
}

std::uint64_t reproduction_default_n(const std::string& target) {
  if (target == "table1" || target == "fig1" || target == "fig2" ||
      target == "fig3")
    return 0;
  if (target == "table2") return 10000000;
  if (target == "table3" || target == "table4" || target == "table5" ||
      target == "fig4" || target == "fig5" || target == "fig6")
    return 1000000;
  throw UnknownTarget("unknown reproduction target '" + target +
                      "' (expected table1..table5 or fig1..fig6)");
}

void write_reproduction(const std::string& target, std::ostream& os,
                        std::uint64_t n_override, std::uint64_t seed,
                        unsigned threads) {
  std::uint64_t n = n_override ? n_override : reproduction_default_n(target);
  if (target == "table1") return write_table1(os);
  if (target == "table2") return write_table2(os, n, seed, threads);
  if (target == "table3") return write_table3(os, n, seed, threads);
  if (target == "table4") return write_table4(os, n, seed, threads);
  if (target == "table5") return write_table5(os, n, seed, threads);
  if (target == "fig1") return write_fig1(os);
  if (target == "fig2") return write_fig2(os);
  if (target == "fig3") return write_fig3(os);
  if (target == "fig4") return write_fig4(os, n, seed, threads);
  if (target == "fig5") return write_fig5(os, n, seed, threads);
  if (target == "fig6") return write_fig6(os, n, seed, threads);
  throw UnknownTarget("unknown reproduction target '" + target +
                      "' (expected table1..table5 or fig1..fig6)");
}

}  // namespace comoment
