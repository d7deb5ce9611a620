#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "fracpoisson/common.hpp"

namespace fracpoisson {

namespace detail {

// 15-point Gauss-Legendre rule on [-1,1].
inline const double gl15_x[15] = {
    -0.9879925180204854, -0.9372733924007060, -0.8482065834104272,
    -0.7244177313601701, -0.5709721726085388, -0.3941513470775634,
    -0.2011940939974345, 0.0,                 0.2011940939974345,
    0.3941513470775634,  0.5709721726085388,  0.7244177313601701,
    0.8482065834104272,  0.9372733924007060,  0.9879925180204854};
inline const double gl15_w[15] = {
    0.03075324199611727, 0.07036604748810812, 0.10715922046717194,
    0.13957067792615432, 0.16626920581699392, 0.18616100001556220,
    0.19843148532711158, 0.20257824192556127, 0.19843148532711158,
    0.18616100001556220, 0.16626920581699392, 0.13957067792615432,
    0.10715922046717194, 0.07036604748810812, 0.03075324199611727};

template <typename F>
double gauss15(const F& f, double a, double b) {
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 15; ++i) s += gl15_w[i] * f(c + h * gl15_x[i]);
    return s * h;
}

template <typename F>
double adaptive_simpson_rec(const F& f, double a, double b, double fa, double fm,
                            double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson integration of f over [a,b] to absolute tolerance tol.
template <typename F>
double integrate_adaptive(const F& f, double a, double b, double tol = 1e-12,
                          int max_depth = 48) {
    if (a == b) return 0.0;
    double m = 0.5 * (a + b);
    double fa = f(a), fm = f(m), fb = f(b);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// Composite Gauss-Legendre over a supplied panel partition, doubling panels
/// until two successive refinements agree.  Panel edges must be increasing.
template <typename F>
double integrate_panels(const F& f, std::vector<double> edges, double rel_tol,
                        double abs_tol, int max_doublings = 6) {
    if (edges.size() < 2) throw std::invalid_argument("integrate_panels: need >= 2 edges");
    auto pass = [&](const std::vector<double>& e) {
        CompensatedSum<double> s;
        for (std::size_t i = 0; i + 1 < e.size(); ++i)
            s.add(detail::gauss15(f, e[i], e[i + 1]));
        return s.value();
    };
    double prev = pass(edges);
    for (int it = 0; it < max_doublings; ++it) {
        std::vector<double> fine;
        fine.reserve(edges.size() * 2);
        for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
            fine.push_back(edges[i]);
            fine.push_back(0.5 * (edges[i] + edges[i + 1]));
        }
        fine.push_back(edges.back());
        double cur = pass(fine);
        if (std::fabs(cur - prev) <= std::max(abs_tol, rel_tol * std::fabs(cur)))
            return cur;
        edges = std::move(fine);
        prev = cur;
    }
    return prev;
}

/// Log-spaced panel edges from a (>0) to b, plus a leading [0,a] panel when
/// from_zero is set.  Used for integrands concentrated near the origin.
inline std::vector<double> log_panel_edges(double a, double b, int per_decade,
                                           bool from_zero) {
    if (!(a > 0.0 && b > a)) throw std::invalid_argument("log_panel_edges: need 0<a<b");
    std::vector<double> e;
    if (from_zero) e.push_back(0.0);
    double la = std::log10(a), lb = std::log10(b);
    int n = std::max(1, static_cast<int>(std::ceil((lb - la) * per_decade)));
    for (int i = 0; i <= n; ++i) e.push_back(std::pow(10.0, la + (lb - la) * i / n));
    e.back() = b;
    return e;
}

}  // namespace fracpoisson
