#include "comoment/dependence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numeric>
#include <utility>

#include "comoment/accumulators.hpp"
#include "comoment/errors.hpp"
#include "comoment/parallel.hpp"
#include "comoment/rng.hpp"

namespace comoment {

namespace {

constexpr std::uint64_t kRankModelStream = 7002;

double ipow(double x, int k) {
  double r = 1.0;
  for (double b = x;; b *= b) {
    if (k & 1) r *= b;
    k >>= 1;
    if (k == 0) return r;
  }
}

// Mid-rank grades R_i/(n+1), ties averaged; throws on a constant column.
std::vector<double> midrank_grades(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  if (x[idx.front()] == x[idx.back()])
    throw DegenerateSample("rank coefficient undefined for a constant column");
  std::vector<double> grade(n);
  const double denom = static_cast<double>(n) + 1.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && x[idx[j + 1]] == x[idx[i]]) ++j;
    double mid = 0.5 * static_cast<double>(i + j) + 1.0;  // average rank of the tie block
    for (std::size_t k = i; k <= j; ++k) grade[idx[k]] = mid / denom;
    i = j + 1;
  }
  return grade;
}

void check_sample(const PairedSample& s, std::size_t min_rows) {
  if (s.x1.size() != s.x2.size())
    throw DomainError("paired sample columns differ in length");
  if (s.size() < min_rows)
    throw InsufficientSample("paired sample needs at least " +
                             std::to_string(min_rows) + " rows");
  for (std::size_t i = 0; i < s.size(); ++i)
    if (!std::isfinite(s.x1[i]) || !std::isfinite(s.x2[i]))
      throw DomainError("paired sample entries must be finite");
}

// Mean of the rank-product kernel scaled by c_d, shared by both model overloads.
Estimate kernel_estimate(int d, std::uint64_t n, std::uint64_t seed,
                         unsigned threads, std::uint64_t stream,
                         const std::function<std::pair<double, double>(
                             const RngStream&, std::uint64_t)>& draw) {
  if (n == 0) throw DomainError("sample size must be positive");
  const double cd = rank_normalizer(d);
  RngStream rng(seed, stream);
  auto fill = [&](StreamingMoments& acc, std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t i = lo; i < hi; ++i) {
      auto [u1, u2] = draw(rng, i);
      acc.push((u1 - 0.5) * ipow(u2 - 0.5, d));
    }
  };
  auto merge = [](StreamingMoments& a, const StreamingMoments& b) { a.merge(b); };
  StreamingMoments acc =
      chunked_reduce(n, StreamingMoments(2), fill, merge, threads);
  return {cd * acc.mean(), cd * acc.stderr_mean(), n, seed, 0.0};
}

}  // namespace

PairedSample load_pairs_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open sample file: " + path);
  PairedSample out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": expected two comma-separated columns");
    const std::string a = line.substr(0, comma);
    const std::string b = line.substr(comma + 1);
    if (b.find(',') != std::string::npos)
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": expected exactly two columns");
    char* enda = nullptr;
    char* endb = nullptr;
    double va = std::strtod(a.c_str(), &enda);
    double vb = std::strtod(b.c_str(), &endb);
    bool numeric = enda != a.c_str() && *enda == '\0' && endb != b.c_str() &&
                   *endb == '\0';
    if (!numeric) {
      if (lineno == 1) continue;  // header row
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": non-numeric value '" + line + "'");
    }
    out.x1.push_back(va);
    out.x2.push_back(vb);
  }
  if (out.size() < 2)
    throw InsufficientSample(path + ": need at least 2 data rows");
  return out;
}

double rank_normalizer(int d) {
  if (d < 1) throw DomainError("moment order must be a positive integer");
  double c = std::ldexp(static_cast<double>(d + 2), d + 1);
  if (d % 2 == 0) c *= static_cast<double>(d + 1) / static_cast<double>(d);
  return c;
}

double rank_coefficient(const PairedSample& sample, int d) {
  const double cd = rank_normalizer(d);
  check_sample(sample, 2);
  std::vector<double> g1 = midrank_grades(sample.x1);
  std::vector<double> g2 = midrank_grades(sample.x2);
  NeumaierSum acc;
  for (std::size_t i = 0; i < sample.size(); ++i)
    acc.add((g1[i] - 0.5) * ipow(g2[i] - 0.5, d));
  return cd * acc.total() / static_cast<double>(sample.size());
}

double centered_moment(const PairedSample& sample, int d) {
  if (d < 1) throw DomainError("moment order must be a positive integer");
  check_sample(sample, 3);
  const double n = static_cast<double>(sample.size());
  auto column_stats = [n](const std::vector<double>& x) {
    NeumaierSum s;
    for (double v : x) s.add(v);
    double mean = s.total() / n;
    NeumaierSum q;
    for (double v : x) q.add((v - mean) * (v - mean));
    double sd = std::sqrt(q.total() / n);
    if (sd == 0.0)
      throw DegenerateSample("centered moment undefined for a constant column");
    return std::pair{mean, sd};
  };
  auto [m1, s1] = column_stats(sample.x1);
  auto [m2, s2] = column_stats(sample.x2);
  NeumaierSum acc;
  for (std::size_t i = 0; i < sample.size(); ++i)
    acc.add((sample.x1[i] - m1) / s1 * ipow((sample.x2[i] - m2) / s2, d));
  return acc.total() / n;
}

Estimate rank_coefficient_model(const CouplingSpec& coupling, std::uint64_t n,
                                std::uint64_t seed, unsigned threads) {
  return kernel_estimate(
      coupling.d, n, seed, threads, kRankModelStream,
      [&coupling](const RngStream& rng, std::uint64_t i) {
        return sample_pair(coupling, rng.uniform(2 * i), rng.uniform(2 * i + 1));
      });
}

Estimate rank_coefficient_model(const MixtureParams& params, int d,
                                std::uint64_t n, std::uint64_t seed,
                                unsigned threads) {
  validate_params(params);
  return kernel_estimate(
      d, n, seed, threads, kMixtureStream,
      [&params](const RngStream& rng, std::uint64_t i) {
        return mixture_pair(params, rng.uniform(3 * i), rng.uniform(3 * i + 1),
                            rng.uniform(3 * i + 2));
      });
}

}  // namespace comoment
