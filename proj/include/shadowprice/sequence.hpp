#pragma once

#include <cstddef>
#include <vector>

namespace shadowprice {

/// Infinite real sequence x_0, x_1, ... given by a finite preamble followed by a
/// repeating period. Every such sequence is almost convergent: all Banach limits
/// agree on it and equal the period average.
class AlmostConvergentSequence {
 public:
  /// Throws StructuralError when `period` is empty.
  AlmostConvergentSequence(std::vector<double> preamble, std::vector<double> period);

  static AlmostConvergentSequence constant(double c) { return {{}, {c}}; }
  /// Finite prefix followed by the constant `tail`.
  static AlmostConvergentSequence eventually_constant(std::vector<double> prefix, double tail) {
    return {std::move(prefix), {tail}};
  }

  const std::vector<double>& preamble() const noexcept { return preamble_; }
  const std::vector<double>& period() const noexcept { return period_; }

  double operator[](std::size_t k) const;

  /// The sequence (x_1, x_2, ...).
  AlmostConvergentSequence shifted(std::size_t by = 1) const;

  /// Pointwise a*x + b*y; the result's period is the lcm of both periods.
  static AlmostConvergentSequence combine(double a, const AlmostConvergentSequence& x, double b,
                                          const AlmostConvergentSequence& y);

  /// Pointwise f(x_k). The result keeps the preamble/period layout.
  template <class F>
  AlmostConvergentSequence map(F&& f) const {
    std::vector<double> pre, per;
    pre.reserve(preamble_.size());
    per.reserve(period_.size());
    for (double v : preamble_) pre.push_back(f(v));
    for (double v : period_) per.push_back(f(v));
    return {std::move(pre), std::move(per)};
  }

 private:
  std::vector<double> preamble_;
  std::vector<double> period_;
};

/// Common value of all Banach limits: the period average.
double banach_limit(const AlmostConvergentSequence& seq);

/// max over m in [0, max_offset) of |(1/n) * sum_{k=m}^{m+n-1} x_k - target|.
/// Used to probe uniform Cesaro convergence.
double uniform_cesaro_deviation(const AlmostConvergentSequence& seq, std::size_t n,
                                std::size_t max_offset, double target);

}  // namespace shadowprice
