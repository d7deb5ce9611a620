#pragma once

// Special functions: Mittag-Leffler family (one-, two-, three-parameter),
// Mittag-Leffler waiting-time distribution, Wright and M-Wright functions,
// stable / inverse-stable subordinator densities, and the fractional Poisson
// counting PMF built from them.
//
// Every function here is a single power series of the form
//     prefactor * sum_k c_k z^k / Gamma(alpha k + beta0)
// evaluated by one algorithm at three precision rungs:
//   1. direct double arithmetic with compensated summation,
//   2. log-scaled double arithmetic when magnitudes leave double range,
//   3. 160-digit binary floating point when cancellation exceeds what
//      double can absorb.
// Summation stops once |term| <= tol*|partial| for three consecutive terms
// past the largest term.  If the tolerance is unreachable at rung 3 (the
// cancellation budget is ~130 decimal digits) a series_error carrying the
// partial sum and the attained bound is thrown.  In practice this limits
// strongly negative arguments to roughly |z|^(1/alpha) <= 280; smaller
// orders alpha therefore admit a narrower negative range.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <type_traits>
#include <unordered_map>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "fracpoisson/common.hpp"
#include "fracpoisson/quadrature.hpp"

namespace fracpoisson::specfun {

using ext_real =
    boost::multiprecision::number<boost::multiprecision::cpp_bin_float<160>>;
using ext_real_64 =
    boost::multiprecision::number<boost::multiprecision::cpp_bin_float<64>>;

/// Parameter bundle for the Mittag-Leffler family.
struct MLParams {
    double alpha = 1.0;
    double beta = 1.0;
    double gamma = 1.0;
    SeriesControl series;

    void validate() const {
        require(alpha > 0.0, "MLParams: alpha must be > 0");
        require(beta > 0.0, "MLParams: beta must be > 0");
        require(gamma > 0.0, "MLParams: gamma must be > 0");
        require(series.tol > 0.0, "MLParams: series_tol must be > 0");
        require(series.max_terms >= 1, "MLParams: max_terms must be >= 1");
    }
};

/// Evaluation point for stable / inverse-stable subordinator densities.
struct SubordinatorQuery {
    double beta;
    double t;
    double x;

    void validate() const {
        require(beta > 0.0 && beta < 1.0, "SubordinatorQuery: beta must be in (0,1)");
        require(t > 0.0, "SubordinatorQuery: t must be > 0");
        require(x > 0.0, "SubordinatorQuery: x must be > 0");
    }
};

namespace detail {

inline double sinpi(double x) {
    double r = x - 2.0 * std::round(0.5 * x);  // r in [-1,1], sin(pi x)=sin(pi r)
    if (r > 0.5) r = 1.0 - r;
    if (r < -0.5) r = -1.0 - r;
    return std::sin(M_PI * r);
}

// log|Gamma(x)| and the sign of Gamma(x); works for negative non-integer x.
inline double lgamma_signed(double x, int& sign) {
    if (x > 0.0) {
        sign = 1;
        return std::lgamma(x);
    }
    double s = sinpi(x);
    if (s == 0.0 || x == std::floor(x)) {  // pole
        sign = 0;
        return std::numeric_limits<double>::infinity();
    }
    sign = s > 0.0 ? 1 : -1;
    return std::log(M_PI) - std::log(std::fabs(s)) - std::lgamma(1.0 - x);
}

// 1/Gamma(x) in double; 0 at the poles, +-inf when 1/Gamma overflows.
inline double rgamma(double x) {
    if (x > 0.0) {
        if (x <= 170.0) return 1.0 / std::tgamma(x);
        double lg = std::lgamma(x);
        return lg > 708.0 ? 0.0 : std::exp(-lg);
    }
    int sign;
    double lg = lgamma_signed(x, sign);
    if (sign == 0) return 0.0;
    double mag = std::exp(-lg);
    return sign > 0 ? mag : -mag;
}

// 1/Gamma(x) in extended precision; 0 at the poles.
template <typename E>
inline E rgamma_ext(const E& x) {
    if (x <= 0 && x == floor(x)) return E(0);
    return 1 / boost::math::tgamma(x);
}

// Specification of one Gamma-ratio power series.
struct SeriesSpec {
    double alpha = 1.0;   // Gamma argument slope
    double beta0 = 1.0;   // Gamma argument intercept
    double poch = 1.0;    // Prabhakar parameter: coefficients (poch)_k / k!
    bool wright = false;  // coefficients 1/k! instead
    double pf_base = 1.0; // prefactor pf_base^pf_pow, pf_base > 0
    long pf_pow = 0;
    std::vector<ext_real>* rg_cache = nullptr;  // optional 1/Gamma(alpha k+beta0) cache
};

struct RungOutcome {
    double value = 0.0;
    double max_term = 0.0;
    double err_bound = std::numeric_limits<double>::infinity();
    std::size_t terms = 0;
    bool range_ok = true;     // stayed within the rung's representable range
    bool converged = false;   // stopping rule met before max_terms
};

// Rung 1: plain double arithmetic, values tracked directly.
inline RungOutcome eval_rung_direct(const SeriesSpec& s, double z,
                                    const SeriesControl& c) {
    RungOutcome out;
    double prefix = 1.0;
    for (long i = 0; i < s.pf_pow; ++i) {
        prefix *= s.pf_base;
        if (prefix > 1e250 || (prefix < 1e-250 && prefix > 0.0)) {
            out.range_ok = false;
            return out;
        }
    }
    CompensatedSum<double> acc;
    double coeff = 1.0;  // (poch)_k / k!  or  1/k!
    double zk = 1.0;
    double max_abs = 0.0;
    std::size_t peak_k = 0;
    int small_run = 0;
    for (std::size_t k = 0; k < c.max_terms; ++k) {
        double garg = s.alpha * static_cast<double>(k) + s.beta0;
        if (garg > 170.0 || std::fabs(zk) > 1e250 || coeff > 1e250) {
            out.range_ok = false;
            return out;
        }
        double term = prefix * coeff * zk * rgamma(garg);
        acc.add(term);
        out.terms = k + 1;
        double at = std::fabs(term);
        if (at > max_abs) {
            max_abs = at;
            peak_k = k;
        }
        double asum = std::fabs(acc.value());
        if (at <= c.tol * asum && k >= peak_k + 1)
            ++small_run;
        else
            small_run = 0;
        if (small_run >= c.stop_run) {
            out.converged = true;
            break;
        }
        coeff *= s.wright ? 1.0 / static_cast<double>(k + 1)
                          : (s.poch + static_cast<double>(k)) / static_cast<double>(k + 1);
        zk *= z;
    }
    out.value = acc.value();
    out.max_term = max_abs;
    double asum = std::max(std::fabs(out.value), std::numeric_limits<double>::min());
    out.err_bound =
        max_abs / asum * (2.5e-16 * static_cast<double>(out.terms + 4));
    return out;
}

// Rung 2: terms handled through their logarithms, running rescale of the
// accumulator (for magnitudes beyond double range; cancellation-intolerant).
inline RungOutcome eval_rung_log(const SeriesSpec& s, double z,
                                 const SeriesControl& c) {
    RungOutcome out;
    const double lz = z == 0.0 ? -std::numeric_limits<double>::infinity()
                               : std::log(std::fabs(z));
    const int zsign = z < 0.0 ? -1 : 1;
    double lpf = static_cast<double>(s.pf_pow) * std::log(s.pf_base);
    double acc = 0.0;     // sum * exp(-scale)
    double scale = lpf;   // running log scale
    double lcoeff = 0.0;
    double max_log = -std::numeric_limits<double>::infinity();
    std::size_t peak_k = 0;
    int small_run = 0;
    for (std::size_t k = 0; k < c.max_terms; ++k) {
        double garg = s.alpha * static_cast<double>(k) + s.beta0;
        int gsign;
        double lg = lgamma_signed(garg, gsign);
        double lterm = lcoeff + static_cast<double>(k) * lz - lg;
        int tsign = gsign * (k % 2 == 1 && zsign < 0 ? -1 : 1);
        double full_log = lpf + lterm;
        if (gsign != 0) {
            if (full_log > max_log) {
                max_log = full_log;
                peak_k = k;
            }
            double rel = full_log - scale;
            if (rel > 260.0) {  // rescale so the accumulator stays tame
                acc *= std::exp(scale - full_log);
                scale = full_log;
                rel = 0.0;
            }
            double term = tsign * std::exp(rel);
            acc += term;
            if (std::fabs(acc) > 1e280) {
                acc *= 1e-280;
                scale += std::log(1e280);
            }
            out.terms = k + 1;
            double asum = std::fabs(acc);
            if (std::fabs(term) <= c.tol * asum && k >= peak_k + 1)
                ++small_run;
            else
                small_run = 0;
            if (small_run >= c.stop_run) {
                out.converged = true;
                break;
            }
        } else {
            out.terms = k + 1;
        }
        lcoeff += s.wright
                      ? -std::log(static_cast<double>(k + 1))
                      : std::log((s.poch + static_cast<double>(k)) /
                                 static_cast<double>(k + 1));
    }
    double lsum = scale + std::log(std::max(std::fabs(acc),
                                            std::numeric_limits<double>::min()));
    if (lsum > 709.0) {
        out.value = acc > 0 ? std::numeric_limits<double>::infinity()
                            : -std::numeric_limits<double>::infinity();
        out.max_term = std::numeric_limits<double>::infinity();
        out.err_bound = 0.0;  // overflow is exact in its own way
        return out;
    }
    out.value = acc * std::exp(scale);
    out.max_term = max_log > 709.0 ? std::numeric_limits<double>::infinity()
                                   : std::exp(max_log);
    double cancel = std::exp(std::min(700.0, max_log - lsum));
    // each log-domain term carries ~|log|*eps relative error
    double per_term = (std::fabs(max_log) + 30.0) * 2.0e-16;
    out.err_bound = cancel * per_term * std::sqrt(static_cast<double>(out.terms) + 4.0);
    return out;
}

// Rung 3: extended-precision arithmetic, direct values.  E is a cpp_bin_float
// instantiation; the reciprocal-gamma cache is only consulted when E matches
// the cache's element type (i.e. the 160-digit rung).
template <typename E>
inline RungOutcome eval_rung_ext(const SeriesSpec& s, double z,
                                 const SeriesControl& c) {
    constexpr int kDigits = std::numeric_limits<E>::digits10;
    RungOutcome out;
    E prefix = 1;
    {
        E b(s.pf_base);
        for (long i = 0; i < s.pf_pow; ++i) prefix *= b;
    }
    E acc = 0;
    E coeff = 1;
    E zk = 1;
    const E ez(z);
    E max_abs = 0;
    std::size_t peak_k = 0;
    int small_run = 0;
    const E tol(c.tol);
    for (std::size_t k = 0; k < c.max_terms; ++k) {
        E rg;
        if constexpr (std::is_same_v<E, ext_real>) {
            if (s.rg_cache) {
                auto& cache = *s.rg_cache;
                while (cache.size() <= k)
                    cache.push_back(rgamma_ext(
                        ext_real(s.alpha) * static_cast<unsigned>(cache.size()) +
                        ext_real(s.beta0)));
                rg = cache[k];
            } else {
                rg = rgamma_ext(E(s.alpha) * static_cast<unsigned>(k) + E(s.beta0));
            }
        } else {
            rg = rgamma_ext(E(s.alpha) * static_cast<unsigned>(k) + E(s.beta0));
        }
        E term = prefix * coeff * zk * rg;
        acc += term;
        out.terms = k + 1;
        E at = abs(term);
        if (at > max_abs) {
            max_abs = at;
            peak_k = k;
        }
        E asum = abs(acc);
        if (at <= tol * asum && k >= peak_k + 1)
            ++small_run;
        else
            small_run = 0;
        if (small_run >= c.stop_run) {
            out.converged = true;
            break;
        }
        coeff *= s.wright ? E(1) / static_cast<unsigned>(k + 1)
                          : (E(s.poch) + static_cast<unsigned>(k)) /
                                static_cast<unsigned>(k + 1);
        zk *= ez;
    }
    double lsum = acc == 0 ? -std::numeric_limits<double>::infinity()
                           : static_cast<double>(log(abs(acc)));
    if (lsum > 709.0) {
        out.value = acc > 0 ? std::numeric_limits<double>::infinity()
                            : -std::numeric_limits<double>::infinity();
        out.err_bound = 0.0;
        return out;
    }
    out.value = static_cast<double>(acc);
    double lmax = max_abs == 0 ? -std::numeric_limits<double>::infinity()
                               : static_cast<double>(log(max_abs));
    out.max_term = lmax > 709.0 ? std::numeric_limits<double>::infinity()
                                : std::exp(lmax);
    double cancel_digits = (lmax - lsum) / std::log(10.0);
    out.err_bound = std::pow(10.0, cancel_digits - (kDigits - 10.0)) *
                    std::sqrt(static_cast<double>(out.terms) + 4.0);
    return out;
}

// Extended-precision ladder: 64 digits first (unless a 160-digit coefficient
// cache was supplied), then 160 digits, then give up.
inline double eval_ext_ladder(const SeriesSpec& s, double z, const SeriesControl& c) {
    if (!s.rg_cache) {
        RungOutcome e64 = eval_rung_ext<ext_real_64>(s, z, c);
        if (e64.converged && e64.err_bound <= c.tol) return e64.value;
        if (!e64.converged)
            throw series_error("series: max_terms exhausted", e64.value,
                               e64.err_bound * std::fabs(e64.value));
    }
    RungOutcome e = eval_rung_ext<ext_real>(s, z, c);
    if (!e.converged)
        throw series_error("series: max_terms exhausted", e.value,
                           e.err_bound * std::fabs(e.value));
    if (e.err_bound > c.tol)
        throw series_error("series: cancellation beyond extended precision",
                           e.value, e.err_bound * std::fabs(e.value));
    return e.value;
}

inline double eval_series(const SeriesSpec& s, double z, const SeriesControl& c) {
    RungOutcome r = eval_rung_direct(s, z, c);
    if (r.range_ok && r.converged && r.err_bound <= c.tol) return r.value;
    if (r.range_ok && !r.converged)
        throw series_error("series: max_terms exhausted", r.value,
                           r.err_bound * std::fabs(r.value));
    if (!r.range_ok) {
        RungOutcome l = eval_rung_log(s, z, c);
        if (l.converged && l.err_bound <= c.tol) return l.value;
        if (std::isinf(l.value) && l.converged) return l.value;  // true overflow
        if (!l.converged && l.terms >= c.max_terms)
            throw series_error("series: max_terms exhausted", l.value,
                               l.err_bound * std::fabs(l.value));
    }
    return eval_ext_ladder(s, z, c);
}

}  // namespace detail

/// One-parameter Mittag-Leffler function: sum_k z^k / Gamma(alpha k + 1).
inline double ml_one(double alpha, double z, const SeriesControl& c = {}) {
    require(alpha > 0.0, "ml_one: alpha must be > 0");
    detail::SeriesSpec s;
    s.alpha = alpha;
    s.beta0 = 1.0;
    return detail::eval_series(s, z, c);
}

/// Two-parameter Mittag-Leffler function: sum_k z^k / Gamma(alpha k + beta).
inline double ml_two(double alpha, double beta, double z,
                     const SeriesControl& c = {}) {
    require(alpha > 0.0, "ml_two: alpha must be > 0");
    require(beta > 0.0, "ml_two: beta must be > 0");
    detail::SeriesSpec s;
    s.alpha = alpha;
    s.beta0 = beta;
    return detail::eval_series(s, z, c);
}

/// Prabhakar (three-parameter) Mittag-Leffler function:
/// (1/Gamma(gamma)) sum_k Gamma(gamma+k) z^k / (k! Gamma(alpha k + beta)).
inline double ml_prabhakar(double alpha, double beta, double gamma, double z,
                           const SeriesControl& c = {}) {
    require(alpha > 0.0 && beta > 0.0 && gamma > 0.0,
            "ml_prabhakar: alpha, beta, gamma must be > 0");
    detail::SeriesSpec s;
    s.alpha = alpha;
    s.beta0 = beta;
    s.poch = gamma;
    return detail::eval_series(s, z, c);
}

/// n-th derivative of the two-parameter Mittag-Leffler function via
/// M^(n)_{a,b}(x) = n! M^{n+1}_{a, n a + b}(x); no numerical differentiation.
inline double ml_derivative(double alpha, double beta, unsigned n, double x,
                            const SeriesControl& c = {}) {
    require(alpha > 0.0 && beta > 0.0, "ml_derivative: alpha, beta must be > 0");
    require(n <= 170, "ml_derivative: order too large for double-range factorial");
    double nf = std::tgamma(static_cast<double>(n) + 1.0);
    return nf * ml_prabhakar(alpha, static_cast<double>(n) * alpha + beta,
                             static_cast<double>(n) + 1.0, x, c);
}

/// CDF of the Mittag-Leffler waiting-time law: F(t) = 1 - M_a(-lambda t^a).
inline double ml_dist_cdf(double alpha, double lambda, double t,
                          const SeriesControl& c = {}) {
    require(alpha > 0.0 && alpha <= 1.0, "ml_dist_cdf: alpha must be in (0,1]");
    require(lambda > 0.0, "ml_dist_cdf: lambda must be > 0");
    require(t >= 0.0, "ml_dist_cdf: t must be >= 0");
    if (t == 0.0) return 0.0;
    double f = 1.0 - ml_one(alpha, -lambda * std::pow(t, alpha), c);
    return std::min(1.0, std::max(0.0, f));
}

/// Density of the Mittag-Leffler law: f(t) = lambda t^(a-1) M_{a,a}(-lambda t^a).
inline double ml_dist_pdf(double alpha, double lambda, double t,
                          const SeriesControl& c = {}) {
    require(alpha > 0.0 && alpha <= 1.0, "ml_dist_pdf: alpha must be in (0,1]");
    require(lambda > 0.0, "ml_dist_pdf: lambda must be > 0");
    require(t > 0.0, "ml_dist_pdf: t must be > 0");
    double w = std::pow(t, alpha);
    return lambda * std::pow(t, alpha - 1.0) * ml_two(alpha, alpha, -lambda * w, c);
}

/// Density of the n-fold Mittag-Leffler convolution:
/// f_n(t) = lambda^n t^(a n - 1) M^(n-1)_{a,a}(-lambda t^a) / (n-1)!.
inline double ml_convolution_pdf(double alpha, double lambda, unsigned n, double t,
                                 const SeriesControl& c = {}) {
    require(n >= 1, "ml_convolution_pdf: n must be >= 1");
    require(alpha > 0.0 && alpha <= 1.0, "ml_convolution_pdf: alpha in (0,1]");
    require(lambda > 0.0 && t > 0.0, "ml_convolution_pdf: lambda, t must be > 0");
    // lambda^n t^(an-1) and 1/(n-1)! folded into the series prefactor; the
    // remaining series is M^{n}_{a, (n-1)a + a}(-lambda t^a) * (n-1)!.
    double w = lambda * std::pow(t, alpha);
    detail::SeriesSpec s;
    s.alpha = alpha;
    s.beta0 = static_cast<double>(n - 1) * alpha + alpha;
    s.poch = static_cast<double>(n);
    s.pf_base = w;
    s.pf_pow = static_cast<long>(n - 1);
    double series = detail::eval_series(s, -w, c);
    return lambda * std::pow(t, alpha - 1.0) * series;
}

/// Wright function: sum_n z^n / (n! Gamma(alpha n + beta)), alpha > -1.
inline double wright(double alpha, double beta, double z,
                     const SeriesControl& c = {}) {
    require(alpha > -1.0, "wright: alpha must be > -1");
    detail::SeriesSpec s;
    s.alpha = alpha;
    s.beta0 = beta;
    s.wright = true;
    return detail::eval_series(s, z, c);
}

/// M-Wright function: W_beta(z) = wright(-beta, 1-beta, -z), 0 < beta < 1.
inline double m_wright(double beta, double z, const SeriesControl& c = {}) {
    require(beta > 0.0 && beta < 1.0, "m_wright: beta must be in (0,1)");
    return wright(-beta, 1.0 - beta, -z, c);
}

/// Density of the beta-stable subordinator D_beta(t):
/// g(x;t) = beta t x^-(beta+1) W_beta(t x^-beta).
inline double stable_density(const SubordinatorQuery& q, const SeriesControl& c = {}) {
    q.validate();
    double u = q.t * std::pow(q.x, -q.beta);
    return q.beta * q.t * std::pow(q.x, -(q.beta + 1.0)) * m_wright(q.beta, u, c);
}

/// Density of the inverse beta-stable subordinator E_beta(t):
/// h(x;t) = t^-beta W_beta(t^-beta x).
inline double inv_stable_density(const SubordinatorQuery& q,
                                 const SeriesControl& c = {}) {
    q.validate();
    double tb = std::pow(q.t, -q.beta);
    return tb * m_wright(q.beta, tb * q.x, c);
}

inline double stable_density(double beta, double t, double x,
                             const SeriesControl& c = {}) {
    return stable_density(SubordinatorQuery{beta, t, x}, c);
}

inline double inv_stable_density(double beta, double t, double x,
                                 const SeriesControl& c = {}) {
    return inv_stable_density(SubordinatorQuery{beta, t, x}, c);
}

/// PMF of the time-fractional Poisson process:
/// p(n|t,lambda) = (lambda t^b)^n M^(n)_b(-lambda t^b) / n!.
inline double tfpp_pmf(unsigned n, double t, double lambda, double beta,
                       const SeriesControl& c = {}) {
    require(beta > 0.0 && beta <= 1.0, "tfpp_pmf: beta must be in (0,1]");
    require(t >= 0.0, "tfpp_pmf: t must be >= 0");
    require(lambda >= 0.0, "tfpp_pmf: lambda must be >= 0");
    double w = lambda * std::pow(t, beta);
    if (w == 0.0) return n == 0 ? 1.0 : 0.0;
    // w^n / n! * n! M^{n+1}_{b, n b + 1}(-w)  ==  w^n M^{n+1}_{b, n b + 1}(-w)
    detail::SeriesSpec s;
    s.alpha = beta;
    s.beta0 = static_cast<double>(n) * beta + 1.0;
    s.poch = static_cast<double>(n) + 1.0;
    s.pf_base = w;
    s.pf_pow = static_cast<long>(n);
    double p = detail::eval_series(s, -w, c);
    return std::min(1.0, std::max(0.0, p));
}

/// Power-series evaluator for W_beta with a reusable reciprocal-gamma cache.
/// One instance per (beta); repeated evaluations share the cache, which is
/// what makes quadrature against the inverse-stable density affordable.
class MWrightEvaluator {
  public:
    explicit MWrightEvaluator(double beta, SeriesControl ctrl = {})
        : beta_(beta), ctrl_(ctrl) {
        require(beta > 0.0 && beta < 1.0, "MWrightEvaluator: beta in (0,1)");
    }

    double operator()(double z) const {
        detail::SeriesSpec s;
        s.alpha = -beta_;
        s.beta0 = 1.0 - beta_;
        s.wright = true;
        s.rg_cache = &rg_;
        return detail::eval_series(s, -z, ctrl_);
    }

    double beta() const { return beta_; }

  private:
    double beta_;
    SeriesControl ctrl_;
    mutable std::vector<ext_real> rg_;
};

/// Expectations against the law of E_beta(t).  Uses the exact scaling
/// E_beta(t) = t^beta V with V ~ W_beta, so the density grid in V is shared
/// across every t and every integrand.  Panels are log-spaced near 0 and
/// doubled until all requested integrands stabilise.
class InverseStableKernel {
  public:
    explicit InverseStableKernel(double beta, SeriesControl ctrl = {})
        : w_(beta, ctrl), beta_(beta) {
        // Cut W_beta off where it has decayed ~60 e-folds below O(1).
        double cexp = (1.0 - beta) * std::pow(beta, beta / (1.0 - beta));
        vmax_ = std::pow(60.0 / cexp, 1.0 - beta);
    }

    double beta() const { return beta_; }
    double v_max() const { return vmax_; }

    /// E[g(E_beta(t))] for each integrand in gs, all sharing one node set.
    std::vector<double> expect_batch(
        const std::vector<std::function<double(double)>>& gs, double t,
        double rel_tol = 1e-9, double abs_tol = 1e-14,
        int max_doublings = 7) const {
        require(t > 0.0, "InverseStableKernel: t must be > 0");
        const double tb = std::pow(t, beta_);
        std::vector<double> edges = log_panel_edges(1e-12, vmax_, 3, true);
        auto pass = [&](const std::vector<double>& e) {
            std::vector<CompensatedSum<double>> acc(gs.size());
            for (std::size_t i = 0; i + 1 < e.size(); ++i) {
                double a = e[i], b = e[i + 1];
                double cmid = 0.5 * (a + b), h = 0.5 * (b - a);
                for (int j = 0; j < 15; ++j) {
                    double v = cmid + h * detail_gl_x(j);
                    double wv = density(v);
                    if (wv == 0.0) continue;
                    double base = detail_gl_w(j) * h * wv;
                    for (std::size_t m = 0; m < gs.size(); ++m)
                        acc[m].add(base * gs[m](tb * v));
                }
            }
            std::vector<double> r(gs.size());
            for (std::size_t m = 0; m < gs.size(); ++m) r[m] = acc[m].value();
            return r;
        };
        std::vector<double> prev = pass(edges);
        for (int it = 0; it < max_doublings; ++it) {
            std::vector<double> fine;
            fine.reserve(edges.size() * 2);
            for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
                fine.push_back(edges[i]);
                fine.push_back(0.5 * (edges[i] + edges[i + 1]));
            }
            fine.push_back(edges.back());
            std::vector<double> cur = pass(fine);
            bool ok = true;
            for (std::size_t m = 0; m < gs.size(); ++m)
                if (std::fabs(cur[m] - prev[m]) >
                    std::max(abs_tol, rel_tol * std::fabs(cur[m])))
                    ok = false;
            prev = std::move(cur);
            edges = std::move(fine);
            if (ok) return prev;
        }
        throw series_error("InverseStableKernel: quadrature did not stabilise",
                           prev.empty() ? 0.0 : prev[0], rel_tol);
    }

    double expect(const std::function<double(double)>& g, double t,
                  double rel_tol = 1e-9, double abs_tol = 1e-14) const {
        return expect_batch({g}, t, rel_tol, abs_tol)[0];
    }

    /// W_beta(v), memoised per node value.
    double density(double v) const {
        auto it = cache_.find(v);
        if (it != cache_.end()) return it->second;
        double w = std::max(0.0, w_(v));
        cache_.emplace(v, w);
        return w;
    }

  private:
    static double detail_gl_x(int j) { return fracpoisson::detail::gl15_x[j]; }
    static double detail_gl_w(int j) { return fracpoisson::detail::gl15_w[j]; }

    MWrightEvaluator w_;
    double beta_;
    double vmax_;
    mutable std::unordered_map<double, double> cache_;
};

}  // namespace fracpoisson::specfun
