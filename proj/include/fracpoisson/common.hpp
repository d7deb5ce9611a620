#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace fracpoisson {

/// Knobs shared by every power-series evaluation in the library.
/// `tol` is a relative truncation tolerance; summation stops once
/// |term| <= tol*|partial sum| for `stop_run` consecutive terms.
struct SeriesControl {
    double tol = 1e-12;
    std::size_t max_terms = 10000;
    int stop_run = 3;
};

/// Thrown when a series fails to meet its tolerance within the term cap
/// or when cancellation exceeds what the working precision can absorb.
/// Carries the partial sum and an estimate of the attained error bound.
class series_error : public std::runtime_error {
  public:
    series_error(const std::string& what, double partial, double bound)
        : std::runtime_error(what), partial_sum(partial), error_bound(bound) {}

    double partial_sum;
    double error_bound;
};

/// Neumaier-compensated accumulator.
template <typename T = double>
class CompensatedSum {
  public:
    void add(T x) {
        T t = sum_ + x;
        if (fabs(sum_) >= fabs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    T value() const { return sum_ + comp_; }

  private:
    T sum_ = T(0);
    T comp_ = T(0);
};

inline bool nearly_equal(double a, double b, double rel, double abs_floor = 0.0) {
    double diff = std::fabs(a - b);
    if (diff <= abs_floor) return true;
    return diff <= rel * std::max(std::fabs(a), std::fabs(b));
}

inline void require(bool cond, const char* msg) {
    if (!cond) throw std::domain_error(msg);
}

}  // namespace fracpoisson
