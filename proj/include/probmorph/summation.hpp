#pragma once

#include <span>

namespace probmorph {

/// Neumaier-compensated accumulator. Results do not depend on the order of
/// additions beyond a few ulps of the total.
class CompensatedSum {
 public:
  void add(double v) noexcept;
  CompensatedSum& operator+=(double v) noexcept {
    add(v);
    return *this;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_sum(std::span<const double> values) noexcept;

}  // namespace probmorph
