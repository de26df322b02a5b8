#include "fracdiff/laplace.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace fracdiff::laplace {

namespace {

constexpr double pi = std::numbers::pi;

// Talbot contour sum.  The trapezoidal rule on s(theta) = r theta(cot theta + i)
// gives
//   f(t) ~ (r/N) [ (1/2) e^{r t} F(r)
//                  + sum_{k=1}^{N-1} Re( e^{t s(theta_k)} F(s(theta_k)) (1 + i sigma_k) ) ],
//   theta_k = k pi / N,  sigma = theta + (theta cot theta - 1) cot theta.
// `term(s)` must return e^{t s} F(s) for the node s.
template <typename TermFn>
InversionResult contour_sum(double t, const InversionConfig& cfg, TermFn&& term) {
    cfg.validate();
    if (!(t > 0.0) || !std::isfinite(t))
        throw DomainError("laplace::invert: t must be finite and positive");
    const int n = cfg.node_count;
    const double r = cfg.contour_scale * 2.0 * n / (5.0 * t);

    double acc = 0.0, comp = 0.0;  // Kahan-compensated
    double abs_sum = 0.0;
    double max_piece = 0.0, wing_piece = 0.0;
    auto add = [&](double piece) {
        double y = piece - comp;
        double t2 = acc + y;
        comp = (t2 - acc) - y;
        acc = t2;
        abs_sum += std::abs(piece);
        max_piece = std::max(max_piece, std::abs(piece));
    };
    {
        std::complex<double> v = term(std::complex<double>(r, 0.0));
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw InversionError("laplace::invert: non-finite value at contour node k=0, s=" +
                                 std::to_string(r));
        add(0.5 * v.real());
    }
    for (int k = 1; k < n; ++k) {
        const double th = k * pi / n;
        const double cot = std::cos(th) / std::sin(th);
        const std::complex<double> s(r * th * cot, r * th);
        const double sigma = th + (th * cot - 1.0) * cot;
        std::complex<double> v = term(s);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw InversionError("laplace::invert: non-finite value at contour node k=" +
                                 std::to_string(k));
        double piece = (v * std::complex<double>(1.0, sigma)).real();
        add(piece);
        if (k == n - 1) wing_piece = std::abs(piece);
    }
    // the deformation is only valid when the integrand has died out by the
    // contour ends; a live wing means the transform grows there
    if (wing_piece > 1e-8 * std::max(max_piece, 1e-300))
        throw InversionError(
            "laplace::invert: integrand does not decay along the contour wings (transform "
            "grows in the left half-plane at this radius)");
    InversionResult out;
    out.value = acc * r / n;
    out.abs_sum = abs_sum * r / n;
    if (out.condition() > cfg.precision_guard)
        throw PrecisionLossError("laplace::invert: contour sum condition " +
                                 std::to_string(out.condition()) + " exceeds guard " +
                                 std::to_string(cfg.precision_guard));
    return out;
}

}  // namespace

InversionResult invert_detailed(const Transform& F, double t, const InversionConfig& cfg) {
    return contour_sum(t, cfg, [&](std::complex<double> s) { return std::exp(t * s) * F(s); });
}

double invert(const Transform& F, double t, const InversionConfig& cfg) {
    return invert_detailed(F, t, cfg).value;
}

InversionResult invert_log_detailed(const Transform& logF, double t, const InversionConfig& cfg) {
    return contour_sum(t, cfg, [&](std::complex<double> s) {
        std::complex<double> w = t * s + logF(s);
        // graceful underflow for strongly damped nodes
        if (w.real() < -745.0) return std::complex<double>(0.0, 0.0);
        return std::exp(w);
    });
}

double invert_log(const Transform& logF, double t, const InversionConfig& cfg) {
    return invert_log_detailed(logF, t, cfg).value;
}

}  // namespace fracdiff::laplace
