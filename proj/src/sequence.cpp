#include "shadowprice/sequence.hpp"

#include <cmath>
#include <numeric>

#include "shadowprice/errors.hpp"

namespace shadowprice {

AlmostConvergentSequence::AlmostConvergentSequence(std::vector<double> preamble,
                                                   std::vector<double> period)
    : preamble_(std::move(preamble)), period_(std::move(period)) {
  if (period_.empty()) throw StructuralError("almost convergent sequence needs a non-empty period");
}

double AlmostConvergentSequence::operator[](std::size_t k) const {
  if (k < preamble_.size()) return preamble_[k];
  return period_[(k - preamble_.size()) % period_.size()];
}

AlmostConvergentSequence AlmostConvergentSequence::shifted(std::size_t by) const {
  if (by <= preamble_.size()) {
    return {std::vector<double>(preamble_.begin() + static_cast<std::ptrdiff_t>(by), preamble_.end()),
            period_};
  }
  const std::size_t r = (by - preamble_.size()) % period_.size();
  std::vector<double> rotated(period_.begin() + static_cast<std::ptrdiff_t>(r), period_.end());
  rotated.insert(rotated.end(), period_.begin(), period_.begin() + static_cast<std::ptrdiff_t>(r));
  return {{}, std::move(rotated)};
}

AlmostConvergentSequence AlmostConvergentSequence::combine(double a,
                                                           const AlmostConvergentSequence& x,
                                                           double b,
                                                           const AlmostConvergentSequence& y) {
  const std::size_t pre = std::max(x.preamble_.size(), y.preamble_.size());
  const std::size_t per = std::lcm(x.period_.size(), y.period_.size());
  std::vector<double> preamble(pre), period(per);
  for (std::size_t k = 0; k < pre; ++k) preamble[k] = a * x[k] + b * y[k];
  for (std::size_t k = 0; k < per; ++k) period[k] = a * x[pre + k] + b * y[pre + k];
  return {std::move(preamble), std::move(period)};
}

double banach_limit(const AlmostConvergentSequence& seq) {
  const auto& p = seq.period();
  return std::accumulate(p.begin(), p.end(), 0.0) / static_cast<double>(p.size());
}

double uniform_cesaro_deviation(const AlmostConvergentSequence& seq, std::size_t n,
                                std::size_t max_offset, double target) {
  if (n == 0) throw DomainError("Cesaro window must be positive");
  double worst = 0.0;
  double window = 0.0;
  for (std::size_t k = 0; k < n; ++k) window += seq[k];
  for (std::size_t m = 0; m < max_offset; ++m) {
    if (m > 0) window += seq[m + n - 1] - seq[m - 1];
    worst = std::max(worst, std::abs(window / static_cast<double>(n) - target));
  }
  return worst;
}

}  // namespace shadowprice
