#include "comoment/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "comoment/errors.hpp"

namespace comoment {
namespace {

// K15 abscissae on [0,1] (positive half) and weights; odd-indexed nodes are
// the embedded G7 rule.
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct Panel {
  double a, b;
  double value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel evaluate(const std::function<double(double)>& f, double a, double b) {
  double c = 0.5 * (a + b);
  double h = 0.5 * (b - a);
  double fc = f(c);
  double kron = kWgk[7] * fc;
  double gauss = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    double x = h * kXgk[j];
    double fsum = f(c - x) + f(c + x);
    kron += kWgk[j] * fsum;
    if (j % 2 == 1) gauss += kWg[j / 2] * fsum;
  }
  double value = kron * h;
  double err = std::abs((kron - gauss) * h);
  return {a, b, value, err};
}

}  // namespace

QuadResult adaptive_gauss_kronrod(const std::function<double(double)>& f,
                                  double a, double b,
                                  double abs_tol, double rel_tol,
                                  int max_intervals) {
  std::priority_queue<Panel> panels;
  Panel whole = evaluate(f, a, b);
  if (!std::isfinite(whole.value))
    throw QuadratureFailure("non-finite integrand");
  double total = whole.value;
  double total_err = whole.error;
  panels.push(whole);
  int evals = 15;
  int count = 1;
  while (total_err > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (count >= max_intervals)
      throw QuadratureFailure("interval budget exhausted");
    Panel worst = panels.top();
    panels.pop();
    double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b)
      throw QuadratureFailure("interval shrunk to machine precision");
    Panel left = evaluate(f, worst.a, mid);
    Panel right = evaluate(f, mid, worst.b);
    if (!std::isfinite(left.value) || !std::isfinite(right.value))
      throw QuadratureFailure("non-finite integrand");
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    evals += 30;
    ++count;
  }
  // Re-sum panel contributions largest-error-last for a stable total.
  std::vector<Panel> rest;
  rest.reserve(panels.size());
  while (!panels.empty()) {
    rest.push_back(panels.top());
    panels.pop();
  }
  double value = 0.0;
  for (auto it = rest.rbegin(); it != rest.rend(); ++it) value += it->value;
  return {value, total_err, evals};
}

double integrate_unit(const std::function<double(double)>& f,
                      double abs_tol, double rel_tol) {
  const double split = std::log(2.0);
  auto lower = [&f](double t) {
    double u = std::exp(-t);
    return f(u) * u;
  };
  auto upper = [&f](double t) {
    double w = std::exp(-t);
    return f(1.0 - w) * w;
  };
  const double L = -std::log(kUnitEps);
  QuadResult lo = adaptive_gauss_kronrod(lower, split, L, abs_tol / 2, rel_tol);
  QuadResult hi = adaptive_gauss_kronrod(upper, split, L, abs_tol / 2, rel_tol);
  return lo.value + hi.value;
}

}  // namespace comoment
