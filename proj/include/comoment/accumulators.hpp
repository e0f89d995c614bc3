#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>

#include "comoment/errors.hpp"

namespace comoment {

// Neumaier-compensated scalar sum. Exact for sequences whose naive sum
// loses low-order bits to cancellation.
class NeumaierSum {
public:
  void add(double x) noexcept {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double total() const noexcept { return sum_ + comp_; }
  double raw() const noexcept { return sum_; }
  double compensation() const noexcept { return comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Single-pass moment accumulator. State is (count, shift, compensated power
// sums of x - shift up to the requested order); the shift is pinned to the
// first value seen, which keeps the power sums small for concentrated data.
//
// merge() is associative up to roundoff and bitwise commutative: operands
// are combined in a canonical order derived from their state, so
// merge(a,b) and merge(b,a) produce identical bits.
class StreamingMoments {
public:
  static constexpr int kMaxOrder = 8;

  explicit StreamingMoments(int order = 2) : order_(order) {
    if (order < 1 || order > kMaxOrder)
      throw DomainError("StreamingMoments order must be in [1,8]");
  }

  int order() const noexcept { return order_; }
  std::uint64_t count() const noexcept { return n_; }
  double shift() const noexcept { return shift_; }

  void push(double x) noexcept {
    if (n_ == 0) shift_ = x;
    ++n_;
    double dx = x - shift_;
    double p = 1.0;
    for (int j = 0; j < order_; ++j) {
      p *= dx;
      sums_[j].add(p);
    }
  }

  double mean() const noexcept { return shift_ + sums_[0].total() / static_cast<double>(n_); }

  // Population central moment (divisor n) about the sample mean.
  double central_moment(int k) const {
    if (k < 1 || k > order_) throw DomainError("central moment order out of range");
    if (k == 1) return 0.0;
    double n = static_cast<double>(n_);
    double delta = sums_[0].total() / n;  // mean - shift
    // sum (x - mean)^k = sum_{j=0..k} C(k,j) S_j (-delta)^(k-j), S_0 = n
    double acc = 0.0;
    double binom = 1.0;
    double dpow = 1.0;  // (-delta)^(k-j) built from high j down
    // iterate j = k .. 0 so the (-delta) power grows one step at a time
    for (int j = k; j >= 0; --j) {
      double sj = (j == 0) ? n : sums_[j - 1].total();
      acc += binom * sj * dpow;
      binom = binom * j / static_cast<double>(k - j + 1);
      dpow *= -delta;
    }
    return acc / n;
  }

  double population_variance() const { return central_moment(2); }
  double variance() const {
    if (n_ < 2) throw InsufficientSample("variance needs at least 2 observations");
    return central_moment(2) * static_cast<double>(n_) / static_cast<double>(n_ - 1);
  }
  double stddev() const { return std::sqrt(variance()); }
  double stderr_mean() const { return std::sqrt(variance() / static_cast<double>(n_)); }

  void merge(const StreamingMoments& other) {
    if (other.order_ != order_)
      throw OrderMismatch("cannot merge accumulators of different orders");
    if (other.n_ == 0) return;
    if (n_ == 0) { *this = other; return; }
    if (precedes(other, *this)) {
      StreamingMoments tmp = other;
      tmp.absorb(*this);
      *this = tmp;
    } else {
      absorb(other);
    }
  }

private:
  // Canonical total order on accumulator state; ties on all keys mean the
  // states are interchangeable, so either merge order yields the same bits.
  static bool precedes(const StreamingMoments& a, const StreamingMoments& b) noexcept {
    if (a.n_ != b.n_) return a.n_ < b.n_;
    std::uint64_t ka, kb;
    std::memcpy(&ka, &a.shift_, 8);
    std::memcpy(&kb, &b.shift_, 8);
    if (ka != kb) return ka < kb;
    for (int j = 0; j < a.order_; ++j) {
      double ta = a.sums_[j].raw(), tb = b.sums_[j].raw();
      std::memcpy(&ka, &ta, 8);
      std::memcpy(&kb, &tb, 8);
      if (ka != kb) return ka < kb;
    }
    return false;
  }

  // Fold other into this, re-centering other's power sums to this->shift_.
  // (x - c1)^j = sum_i C(j,i) (x - c2)^i (c2 - c1)^(j-i), summed over other.
  void absorb(const StreamingMoments& other) noexcept {
    double dc = other.shift_ - shift_;
    for (int j = order_; j >= 1; --j) {
      double acc = 0.0;
      double binom = 1.0;
      double dpow = 1.0;
      for (int i = j; i >= 0; --i) {
        double si = (i == 0) ? static_cast<double>(other.n_) : other.sums_[i - 1].total();
        acc += binom * si * dpow;
        binom = binom * i / static_cast<double>(j - i + 1);
        dpow *= dc;
      }
      sums_[j - 1].add(acc);
    }
    n_ += other.n_;
  }

  int order_;
  std::uint64_t n_ = 0;
  double shift_ = 0.0;
  NeumaierSum sums_[kMaxOrder];
};

}  // namespace comoment
