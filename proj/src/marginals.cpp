#include "comoment/marginals.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "comoment/errors.hpp"
#include "comoment/format.hpp"
#include "comoment/quadrature.hpp"

namespace comoment {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double ipow(double x, int d) {
  double r = 1.0;
  for (int i = 0; i < d; ++i) r *= x;
  return r;
}
}  // namespace

struct MarginalImpl {
  virtual ~MarginalImpl() = default;
  // p is guaranteed to lie strictly inside (0,1) by the facade.
  virtual double quantile(double p) const = 0;
  virtual double cdf(double x) const = 0;
  virtual double mean() const = 0;
  virtual double stddev() const = 0;
  virtual double support_lo() const = 0;
  virtual double support_hi() const = 0;
  virtual double tail_index() const { return kInf; }
  virtual bool is_discrete() const { return false; }
  virtual std::string describe() const = 0;
};

namespace {

struct UniformImpl final : MarginalImpl {
  double a, b;
  UniformImpl(double a_, double b_) : a(a_), b(b_) {
    if (!(std::isfinite(a) && std::isfinite(b)) || a >= b)
      throw DomainError("uniform requires finite a < b");
  }
  double quantile(double p) const override { return a + (b - a) * p; }
  double cdf(double x) const override {
    if (x <= a) return 0.0;
    if (x >= b) return 1.0;
    return (x - a) / (b - a);
  }
  double mean() const override { return 0.5 * (a + b); }
  double stddev() const override { return (b - a) / std::sqrt(12.0); }
  double support_lo() const override { return a; }
  double support_hi() const override { return b; }
  bool is_discrete() const override { return a == b; }
  std::string describe() const override {
    return "unif:a=" + format_double(a) + ",b=" + format_double(b);
  }
};

struct ExponentialImpl final : MarginalImpl {
  double rate, shift;
  ExponentialImpl(double r, double s) : rate(r), shift(s) {
    if (!(std::isfinite(rate) && rate > 0.0) || !std::isfinite(shift))
      throw DomainError("exponential requires finite rate > 0");
  }
  double quantile(double p) const override { return shift - std::log1p(-p) / rate; }
  double cdf(double x) const override {
    if (x <= shift) return 0.0;
    return -std::expm1(-rate * (x - shift));
  }
  double mean() const override { return shift + 1.0 / rate; }
  double stddev() const override { return 1.0 / rate; }
  double support_lo() const override { return shift; }
  double support_hi() const override { return kInf; }
  std::string describe() const override {
    std::string s = "expon:rate=" + format_double(rate);
    if (shift != 0.0) s += ",shift=" + format_double(shift);
    return s;
  }
};

struct NormalImpl final : MarginalImpl {
  double mu, sigma;
  boost::math::normal_distribution<double> dist;
  NormalImpl(double m, double s) : mu(m), sigma(s), dist(checked(m, s), s) {}
  static double checked(double m, double s) {
    if (!(std::isfinite(m) && std::isfinite(s) && s > 0.0))
      throw DomainError("normal requires finite mu and sigma > 0");
    return m;
  }
  double quantile(double p) const override { return boost::math::quantile(dist, p); }
  double cdf(double x) const override { return boost::math::cdf(dist, x); }
  double mean() const override { return mu; }
  double stddev() const override { return sigma; }
  double support_lo() const override { return -kInf; }
  double support_hi() const override { return kInf; }
  std::string describe() const override {
    return "norm:mu=" + format_double(mu) + ",sigma=" + format_double(sigma);
  }
};

struct StudentTImpl final : MarginalImpl {
  double nu;
  boost::math::students_t_distribution<double> dist;
  StudentTImpl(double n) : nu(n), dist(checked(n)) {}
  static double checked(double n) {
    if (!(std::isfinite(n) && n > 2.0))
      throw DomainError("student t requires nu > 2 for a finite variance");
    return n;
  }
  double quantile(double p) const override { return boost::math::quantile(dist, p); }
  double cdf(double x) const override { return boost::math::cdf(dist, x); }
  double mean() const override { return 0.0; }
  double stddev() const override { return std::sqrt(nu / (nu - 2.0)); }
  double support_lo() const override { return -kInf; }
  double support_hi() const override { return kInf; }
  double tail_index() const override { return nu; }
  std::string describe() const override { return "t:nu=" + format_double(nu); }
};

struct LaplaceImpl final : MarginalImpl {
  double mu, b;
  LaplaceImpl(double m, double scale) : mu(m), b(scale) {
    if (!(std::isfinite(mu) && std::isfinite(b) && b > 0.0))
      throw DomainError("laplace requires finite mu and b > 0");
  }
  double quantile(double p) const override {
    return p < 0.5 ? mu + b * std::log(2.0 * p) : mu - b * std::log(2.0 * (1.0 - p));
  }
  double cdf(double x) const override {
    double z = (x - mu) / b;
    return z < 0.0 ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
  }
  double mean() const override { return mu; }
  double stddev() const override { return b * std::sqrt(2.0); }
  double support_lo() const override { return -kInf; }
  double support_hi() const override { return kInf; }
  std::string describe() const override {
    return "laplace:mu=" + format_double(mu) + ",b=" + format_double(b);
  }
};

struct EmpiricalImpl final : MarginalImpl {
  std::vector<double> x;  // sorted ascending
  std::string source;
  double mu = 0.0, sd = 0.0;
  EmpiricalImpl(std::vector<double> values, std::string src)
      : x(std::move(values)), source(std::move(src)) {
    if (x.empty()) throw DomainError("empirical marginal needs at least one value");
    for (double v : x)
      if (!std::isfinite(v)) throw DomainError("empirical values must be finite");
    std::sort(x.begin(), x.end());
    double n = static_cast<double>(x.size());
    double s = 0.0;
    for (double v : x) s += v;
    mu = s / n;
    double q = 0.0;
    for (double v : x) q += (v - mu) * (v - mu);
    sd = std::sqrt(q / n);
  }
  // Left-continuous generalized inverse: F^{-1}(p) = x_(ceil(n p)).
  double quantile(double p) const override {
    double n = static_cast<double>(x.size());
    auto k = static_cast<std::size_t>(std::ceil(n * p));
    if (k < 1) k = 1;
    if (k > x.size()) k = x.size();
    return x[k - 1];
  }
  double cdf(double v) const override {
    auto it = std::upper_bound(x.begin(), x.end(), v);
    return static_cast<double>(it - x.begin()) / static_cast<double>(x.size());
  }
  double mean() const override { return mu; }
  double stddev() const override { return sd; }
  double support_lo() const override { return x.front(); }
  double support_hi() const override { return x.back(); }
  bool is_discrete() const override { return true; }
  std::string describe() const override {
    if (!source.empty()) return "empirical:file=" + source;
    return "empirical:n=" + std::to_string(x.size());
  }
};

struct StandardizedImpl final : MarginalImpl {
  std::shared_ptr<const MarginalImpl> base;
  double mu, sd;
  StandardizedImpl(std::shared_ptr<const MarginalImpl> b) : base(std::move(b)) {
    mu = base->mean();
    sd = base->stddev();
    if (sd == 0.0) throw DegenerateMarginal("cannot standardize a zero-variance marginal");
  }
  double quantile(double p) const override { return (base->quantile(p) - mu) / sd; }
  double cdf(double x) const override { return base->cdf(mu + sd * x); }
  double mean() const override { return 0.0; }
  double stddev() const override { return 1.0; }
  double support_lo() const override {
    double lo = base->support_lo();
    return std::isfinite(lo) ? (lo - mu) / sd : -kInf;
  }
  double support_hi() const override {
    double hi = base->support_hi();
    return std::isfinite(hi) ? (hi - mu) / sd : kInf;
  }
  double tail_index() const override { return base->tail_index(); }
  bool is_discrete() const override { return base->is_discrete(); }
  std::string describe() const override {
    return "standardized(" + base->describe() + ")";
  }
};

struct PowerImpl final : MarginalImpl {
  std::shared_ptr<const MarginalImpl> base;
  int d;
  PowerImpl(std::shared_ptr<const MarginalImpl> b, int dd) : base(std::move(b)), d(dd) {
    if (d < 1) throw DomainError("power-law exponent must be >= 1");
  }
  bool straddles() const {
    return d % 2 == 0 && base->support_lo() < 0.0 && base->support_hi() > 0.0;
  }
  double quantile(double p) const override {
    if (d % 2 == 1) return ipow(base->quantile(p), d);
    double lo = base->support_lo(), hi = base->support_hi();
    if (lo >= 0.0) return ipow(base->quantile(p), d);
    if (hi <= 0.0) return ipow(base->quantile(1.0 - p), d);
    return two_sided_quantile(p);
  }
  double cdf(double y) const override {
    if (d % 2 == 1) {
      double r = std::copysign(std::pow(std::abs(y), 1.0 / d), y);
      return base->cdf(r);
    }
    if (y <= 0.0) return 0.0;
    double r = std::pow(y, 1.0 / d);
    return base->cdf(r) - base->cdf(-r);
  }
  double mean() const override {
    auto self = [this](double u) { return quantile(u); };
    return integrate_unit(self, 1e-9, 1e-8);
  }
  double stddev() const override {
    double m = mean();
    auto sq = [this, m](double u) {
      double q = quantile(u) - m;
      return q * q;
    };
    return std::sqrt(integrate_unit(sq, 1e-9, 1e-8));
  }
  double support_lo() const override {
    double lo = base->support_lo(), hi = base->support_hi();
    if (d % 2 == 1) return std::isfinite(lo) ? ipow(lo, d) : -kInf;
    if (lo >= 0.0) return ipow(lo, d);
    if (hi <= 0.0) return ipow(hi, d);
    return 0.0;
  }
  double support_hi() const override {
    double lo = base->support_lo(), hi = base->support_hi();
    if (d % 2 == 1) return std::isfinite(hi) ? ipow(hi, d) : kInf;
    if (lo >= 0.0) return std::isfinite(hi) ? ipow(hi, d) : kInf;
    if (hi <= 0.0) return ipow(lo, d);
    double m = std::max(std::isfinite(lo) ? -lo : kInf, std::isfinite(hi) ? hi : kInf);
    return std::isfinite(m) ? ipow(m, d) : kInf;
  }
  double tail_index() const override {
    double t = base->tail_index();
    return std::isfinite(t) ? t / d : kInf;
  }
  bool is_discrete() const override { return base->is_discrete(); }
  std::string describe() const override {
    return "power(" + base->describe() + ",d=" + std::to_string(d) + ")";
  }

private:
  // G(y) = F(y^{1/d}) - F(-y^{1/d}); bisect on r = y^{1/d} until the
  // bracket collapses to machine precision. A probability-based early exit
  // would leave O(tol / density) value noise in flat tail regions, which
  // the adaptive integrator cannot subdivide away.
  double two_sided_quantile(double p) const {
    auto G = [this](double r) { return base->cdf(r) - base->cdf(-r); };
    double rhi = 1.0;
    double cap_lo = base->support_lo(), cap_hi = base->support_hi();
    double cap = std::max(std::isfinite(cap_lo) ? -cap_lo : kInf,
                          std::isfinite(cap_hi) ? cap_hi : kInf);
    if (std::isfinite(cap)) {
      rhi = cap;
    } else {
      while (G(rhi) < p && rhi < 1e154) rhi *= 2.0;
    }
    double rlo = 0.0;
    for (int it = 0; it < 2200; ++it) {
      double mid = 0.5 * (rlo + rhi);
      if (mid <= rlo || mid >= rhi) break;
      (G(mid) < p ? rlo : rhi) = mid;
    }
    return ipow(0.5 * (rlo + rhi), d);
  }
};

double parse_number(const std::string& text) {
  const char* s = text.c_str();
  char* end = nullptr;
  double v = std::strtod(s, &end);
  if (end == s || *end != '\0' || !std::isfinite(v))
    throw ParseError("invalid numeric value '" + text + "'");
  return v;
}

std::map<std::string, std::string> parse_kv(const std::string& body) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ParseError("expected key=value, got '" + item + "'");
    std::string key = item.substr(0, eq);
    if (!kv.emplace(key, item.substr(eq + 1)).second)
      throw ParseError("duplicate key '" + key + "'");
  }
  return kv;
}

double take(std::map<std::string, std::string>& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw ParseError("missing parameter '" + key + "'");
  double v = parse_number(it->second);
  kv.erase(it);
  return v;
}

// Reject stray keys before complaining about missing ones so the error
// names the token the user actually typed.
void expect_keys(const std::map<std::string, std::string>& kv,
                 std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : kv) {
    bool known = false;
    for (const char* name : allowed) known = known || key == name;
    if (!known) throw ParseError("unknown parameter '" + key + "'");
  }
}

}  // namespace

Marginal Marginal::uniform(double a, double b) {
  return Marginal(std::make_shared<UniformImpl>(a, b));
}
Marginal Marginal::exponential(double rate, double shift) {
  return Marginal(std::make_shared<ExponentialImpl>(rate, shift));
}
Marginal Marginal::normal(double mu, double sigma) {
  return Marginal(std::make_shared<NormalImpl>(mu, sigma));
}
Marginal Marginal::student_t(double nu) {
  return Marginal(std::make_shared<StudentTImpl>(nu));
}
Marginal Marginal::laplace(double mu, double b) {
  return Marginal(std::make_shared<LaplaceImpl>(mu, b));
}
Marginal Marginal::empirical(std::vector<double> values, std::string source) {
  return Marginal(std::make_shared<EmpiricalImpl>(std::move(values), std::move(source)));
}

Marginal Marginal::empirical_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open empirical data file '" + path + "'");
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    values.push_back(parse_number(line));
  }
  if (values.empty()) throw ParseError("empirical data file '" + path + "' is empty");
  return empirical(std::move(values), path);
}

Marginal Marginal::parse(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos)
    throw ParseError("marginal spec must look like kind:key=value[,...]: '" + text + "'");
  std::string kind = text.substr(0, colon);
  std::string body = text.substr(colon + 1);
  if (kind == "empirical") {
    const std::string prefix = "file=";
    if (body.rfind(prefix, 0) != 0)
      throw ParseError("empirical marginal requires file=<path>");
    return empirical_from_file(body.substr(prefix.size()));
  }
  auto kv = parse_kv(body);
  if (kind == "unif") {
    expect_keys(kv, {"a", "b"});
    double a = take(kv, "a"), b = take(kv, "b");
    return uniform(a, b);
  }
  if (kind == "expon") {
    expect_keys(kv, {"rate", "shift"});
    double rate = take(kv, "rate");
    double shift = kv.count("shift") ? take(kv, "shift") : 0.0;
    return exponential(rate, shift);
  }
  if (kind == "norm") {
    expect_keys(kv, {"mu", "sigma"});
    double mu = take(kv, "mu"), sigma = take(kv, "sigma");
    return normal(mu, sigma);
  }
  if (kind == "t") {
    expect_keys(kv, {"nu"});
    double nu = take(kv, "nu");
    return student_t(nu);
  }
  if (kind == "laplace") {
    expect_keys(kv, {"mu", "b"});
    double mu = take(kv, "mu"), b = take(kv, "b");
    return laplace(mu, b);
  }
  throw ParseError("unknown marginal kind '" + kind + "'");
}

double Marginal::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile level must lie in [0,1]");
  if (p == 0.0) {
    double lo = impl_->support_lo();
    if (!std::isfinite(lo)) throw DomainError("quantile(0) of a marginal unbounded below");
    return lo;
  }
  if (p == 1.0) {
    double hi = impl_->support_hi();
    if (!std::isfinite(hi)) throw DomainError("quantile(1) of a marginal unbounded above");
    return hi;
  }
  return impl_->quantile(p);
}

double Marginal::cdf(double x) const { return impl_->cdf(x); }
double Marginal::mean() const { return impl_->mean(); }
double Marginal::stddev() const { return impl_->stddev(); }
double Marginal::support_lo() const { return impl_->support_lo(); }
double Marginal::support_hi() const { return impl_->support_hi(); }
double Marginal::tail_index() const { return impl_->tail_index(); }
bool Marginal::is_discrete() const { return impl_->is_discrete(); }
std::string Marginal::describe() const { return impl_->describe(); }

std::optional<Marginal::UniformParams> Marginal::as_uniform() const {
  if (auto u = dynamic_cast<const UniformImpl*>(impl_.get()))
    return UniformParams{u->a, u->b};
  return std::nullopt;
}

std::optional<Marginal::ExponentialParams> Marginal::as_exponential() const {
  if (auto e = dynamic_cast<const ExponentialImpl*>(impl_.get()))
    return ExponentialParams{e->rate, e->shift};
  return std::nullopt;
}

bool Marginal::symmetric_zero_mean() const {
  if (is_discrete()) return false;
  double s = stddev();
  if (!(s > 0.0) || !std::isfinite(s)) return false;
  if (std::abs(mean()) > 1e-12 * s) return false;
  for (double p : {0.1, 0.25, 0.4}) {
    if (std::abs(impl_->quantile(p) + impl_->quantile(1.0 - p)) > 1e-10 * s)
      return false;
  }
  return true;
}

Marginal standardized(const Marginal& m) {
  // Location-scale families standardize back into the same family; keeping the
  // concrete type preserves closed-form dispatch downstream.
  if (dynamic_cast<const ExponentialImpl*>(m.impl_.get()))
    return Marginal::exponential(1.0, -1.0);
  if (dynamic_cast<const UniformImpl*>(m.impl_.get()))
    return Marginal::uniform(-std::sqrt(3.0), std::sqrt(3.0));
  if (dynamic_cast<const NormalImpl*>(m.impl_.get())) return Marginal::normal(0.0, 1.0);
  return Marginal(std::make_shared<StandardizedImpl>(m.impl_));
}

Marginal power_law(const Marginal& m, int d) {
  if (d < 1) throw DomainError("power-law exponent must be >= 1");
  if (auto emp = dynamic_cast<const EmpiricalImpl*>(m.impl_.get())) {
    std::vector<double> powered;
    powered.reserve(emp->x.size());
    for (double v : emp->x) powered.push_back(ipow(v, d));
    return Marginal::empirical(std::move(powered));
  }
  return Marginal(std::make_shared<PowerImpl>(m.impl_, d));
}

}  // namespace comoment
