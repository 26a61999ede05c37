#pragma once

#include <cmath>

namespace sbmlab {

/// Neumaier compensated accumulator: running sum plus a correction term
/// that captures the low-order bits lost at each add. Materially tighter
/// than naive summation when terms differ by many orders of magnitude.
class NeumaierSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace sbmlab
