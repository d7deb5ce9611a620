#pragma once

// Test-only reference evaluations, deliberately independent of the library's
// evaluation path: plain term-by-term summation in 100-digit arithmetic with
// a fixed generous term budget.  Coefficient tables are cached per (alpha,
// beta) pair so large randomized batteries stay affordable.

#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

using big = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<100>>;

inline big rgamma_big(const big& x) {
    if (x <= 0 && x == floor(x)) return big(0);
    return 1 / boost::math::tgamma(x);
}

// Reference for sum_k c_k z^k / Gamma(alpha k + beta) where c_k is either
// (gamma)_k / k! (Prabhakar family; gamma=1 gives the plain Mittag-Leffler
// family) or 1/k! (Wright family).
class GammaSeriesRef {
  public:
    GammaSeriesRef(double alpha, double beta, double gamma, bool wright)
        : alpha_(alpha), beta_(beta), gamma_(gamma), wright_(wright) {}

    big operator()(double zd) const {
        const big z(zd);
        big acc = 0, coeff = 1, zk = 1, maxt = 0;
        int tiny_run = 0;
        for (std::size_t k = 0; k < 20000; ++k) {
            if (rg_.size() <= k)
                rg_.push_back(rgamma_big(big(alpha_) * static_cast<unsigned>(k) + big(beta_)));
            big term = coeff * zk * rg_[k];
            acc += term;
            big at = abs(term);
            if (at > maxt) maxt = at;
            if (acc != 0 && at < abs(acc) * big(1e-45))
                ++tiny_run;
            else
                tiny_run = 0;
            if (tiny_run >= 6) break;
            coeff *= wright_ ? big(1) / static_cast<unsigned>(k + 1)
                             : (big(gamma_) + static_cast<unsigned>(k)) /
                                   static_cast<unsigned>(k + 1);
            zk *= z;
            if (k + 1 == 20000) throw std::runtime_error("oracle: no convergence");
        }
        // the oracle itself refuses when its own cancellation headroom is gone
        if (acc != 0 && maxt / abs(acc) > big(1e55))
            throw std::runtime_error("oracle: cancellation beyond reference precision");
        return acc;
    }

  private:
    double alpha_, beta_, gamma_;
    bool wright_;
    mutable std::vector<big> rg_;
};

inline double ml_prabhakar_ref(double alpha, double beta, double gamma, double z) {
    return static_cast<double>(GammaSeriesRef(alpha, beta, gamma, false)(z));
}

inline double ml_two_ref(double alpha, double beta, double z) {
    return ml_prabhakar_ref(alpha, beta, 1.0, z);
}

inline double ml_one_ref(double alpha, double z) { return ml_two_ref(alpha, 1.0, z); }

inline double wright_ref(double alpha, double beta, double z) {
    return static_cast<double>(GammaSeriesRef(alpha, beta, 1.0, true)(z));
}

inline double m_wright_ref(double beta, double z) {
    return wright_ref(-beta, 1.0 - beta, -z);
}

inline double rel_err(double got, double want) {
    double denom = std::max(std::fabs(want), 1e-300);
    return std::fabs(got - want) / denom;
}

}  // namespace oracle
