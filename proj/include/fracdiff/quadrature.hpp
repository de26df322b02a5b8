#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "fracdiff/types.hpp"

namespace fracdiff::quad {

struct QuadConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-13;
    int max_intervals = 4000;
};

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int intervals = 0;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes/weights on [-1, 1] (positive half; nodes symmetric).
inline constexpr double gk_nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
inline constexpr double gk_wk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
// Gauss-7 weights aligned with odd Kronrod nodes (indices 1,3,5,7).
inline constexpr double gk_wg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct PanelEstimate {
    double integral;
    double error;
};

inline PanelEstimate gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double hw = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - hw * gk_nodes[i]);
        fv[14 - i] = f(c + hw * gk_nodes[i]);
    }
    fv[7] = f(c);
    double kron = 0.0;
    for (int i = 0; i < 7; ++i) kron += gk_wk[i] * (fv[i] + fv[14 - i]);
    kron += gk_wk[7] * fv[7];
    double gauss = gk_wg[3] * fv[7];
    for (int i = 0; i < 3; ++i) gauss += gk_wg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
    kron *= hw;
    gauss *= hw;
    double diff = std::abs(kron - gauss);
    // standard QUADPACK-style sharpened estimate
    double err = diff;
    if (diff > 0.0) err = diff * std::min(1.0, std::pow(200.0 * diff / std::max(std::abs(kron), 1e-300), 1.5));
    return {kron, err};
}

}  // namespace detail

/// Adaptive Gauss-Kronrod on a finite interval.  Throws ConvergenceError if
/// the tolerance cannot be met within cfg.max_intervals bisections.
inline QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                            const QuadConfig& cfg = {}) {
    struct Panel {
        double a, b, integral, error;
    };
    auto first = detail::gk15(f, a, b);
    std::vector<Panel> panels{{a, b, first.integral, first.error}};
    double total = first.integral;
    double toterr = first.error;
    int splits = 0;
    while (toterr > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total))) {
        if (splits >= cfg.max_intervals)
            throw ConvergenceError("quad::integrate: adaptive subdivision limit reached (error=" +
                                   std::to_string(toterr) + ")");
        // split the worst panel
        size_t worst = 0;
        for (size_t i = 1; i < panels.size(); ++i)
            if (panels[i].error > panels[worst].error) worst = i;
        Panel p = panels[worst];
        double mid = 0.5 * (p.a + p.b);
        if (mid <= p.a || mid >= p.b)
            throw ConvergenceError("quad::integrate: interval too small to bisect");
        auto left = detail::gk15(f, p.a, mid);
        auto right = detail::gk15(f, mid, p.b);
        total += left.integral + right.integral - p.integral;
        toterr += left.error + right.error - p.error;
        panels[worst] = {p.a, mid, left.integral, left.error};
        panels.push_back({mid, p.b, right.integral, right.error});
        ++splits;
    }
    return {total, toterr, static_cast<int>(panels.size())};
}

}  // namespace fracdiff::quad
