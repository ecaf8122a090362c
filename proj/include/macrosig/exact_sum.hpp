#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace macrosig {

// Error-free accumulator (Shewchuk expansion, same scheme as Python's
// math.fsum). The returned value is the exact sum rounded once, so it does
// not depend on the order in which terms were added. Used where bitwise
// reproducibility under input permutation is part of the contract.
class ExactSum {
 public:
  void add(double x) {
    std::size_t used = 0;
    for (std::size_t j = 0; j < partials_.size(); ++j) {
      double y = partials_[j];
      if (std::fabs(x) < std::fabs(y)) std::swap(x, y);
      double hi = x + y;
      double lo = y - (hi - x);
      if (lo != 0.0) partials_[used++] = lo;
      x = hi;
    }
    partials_.resize(used);
    partials_.push_back(x);
  }

  void reset() { partials_.clear(); }

  double value() const {
    if (partials_.empty()) return 0.0;
    std::size_t j = partials_.size() - 1;
    double hi = partials_[j];
    double lo = 0.0;
    while (j > 0) {
      double x = hi;
      double y = partials_[--j];
      hi = x + y;
      double yr = hi - x;
      lo = y - yr;
      if (lo != 0.0) break;
    }
    // Round-half-even correction when the residual is exactly half an ulp.
    if (j > 0 && ((lo < 0.0 && partials_[j - 1] < 0.0) ||
                  (lo > 0.0 && partials_[j - 1] > 0.0))) {
      double y2 = lo * 2.0;
      double x2 = hi + y2;
      if (y2 == x2 - hi) hi = x2;
    }
    return hi;
  }

 private:
  std::vector<double> partials_;
};

}  // namespace macrosig
