#pragma once

#include <utility>

#include "fracdiff/laplace.hpp"
#include "fracdiff/quadrature.hpp"
#include "fracdiff/types.hpp"

namespace fracdiff::specfun {

/// Reciprocal gamma 1/Gamma(x), entire in x; returns exact 0 at the poles
/// x = 0, -1, -2, ...
double rgamma(double x);

/// The pulse delta_mu(t) = t^{mu-1}/Gamma(mu) for mu > 0, t > 0.
/// mu = 0 is the Dirac mass and has no pointwise value; use delta_pulse.
double delta_mu(double mu, double t);

/// Symbolic companion of delta_mu covering mu = 0 (DiracAtZero).
PowerLawPulse delta_pulse(double mu);

struct WrightResult {
    double value = 0.0;
    double max_abs_term = 0.0;
    int terms_used = 0;
    bool overflowed = false;  // a term exceeded the double range; value unusable

    double cancellation() const {
        return max_abs_term / std::max(std::abs(value), 1e-300);
    }
};

/// Wright function W(z; alpha, beta) = sum_j z^j / (j! Gamma(alpha j + beta)),
/// alpha > -1.  Kahan-compensated; reciprocal-gamma makes the Gamma-pole terms
/// exact zeros.  The detailed form reports the largest term so callers can
/// judge cancellation; it throws only on domain/max_terms failures.
WrightResult wright_detailed(double z, double alpha, double beta, const SeriesConfig& cfg = {});
double wright(double z, double alpha, double beta, const SeriesConfig& cfg = {});

/// Mainardi function M(z; nu) = W(-z; -nu, 1-nu), 0 < nu < 1, z >= 0.
double mainardi(double z, double nu, const SeriesConfig& cfg = {});

/// Auxiliary function F(z; nu) = sum_j (-z)^j / (j! Gamma(-nu j)) = W(-z; -nu, 0);
/// satisfies F(a t^-nu; nu) = t R_{0,nu}(a, t).  Requires 0 < nu <= 1/2.
double f_aux(double z, double nu, const SeriesConfig& cfg = {});

enum class RRoute { AZero, Series, Laplace, RealIntegral };

const char* route_name(RRoute r);

/// Contour tuned for the s^-mu e^{-a s^nu} family: the half-scale radius
/// halves the e^{rt} roundoff amplification, which matters for the small
/// values the a-prefactor produces at mu = 0; the saddle escalation in
/// r_laplace supplies radius whenever strong damping needs it.
inline laplace::InversionConfig default_r_inversion() {
    laplace::InversionConfig cfg;
    cfg.contour_scale = 0.5;
    return cfg;
}

/// Evaluation control for R_{mu,nu}: series tolerances, inversion contour,
/// and the series -> Laplace failover thresholds.
struct RConfig {
    SeriesConfig series{};
    laplace::InversionConfig inversion = default_r_inversion();
    quad::QuadConfig quadrature{};
    /// fail over to the Laplace route when a t^-nu exceeds this
    double series_arg_max = 30.0;
    /// ... or when max|term| exceeds this multiple of the final sum
    double series_cancel_max = 1e5;
};

struct REvalResult {
    double value = 0.0;
    RRoute route = RRoute::Series;
    bool series_failed_over = false;
};

/// Series route: R_{mu,nu}(a,t) = t^{mu-1} W(-a t^-nu; -nu, mu), nu <= 1/2.
/// Falls over to r_laplace when the alternating series loses precision; the
/// detailed form records the failover.
REvalResult r_series_detailed(FracIndex idx, double a, double t, const RConfig& cfg = {});
double r_series(FracIndex idx, double a, double t, const RConfig& cfg = {});

/// Real-axis integral route, 0 <= mu < 1, nu <= 1/2 (collapses the inversion
/// contour onto the negative real axis):
///   R_{mu,nu}(a,t) = (1/pi) int_0^inf e^{-t z} z^-mu e^{-a cos(pi nu) z^nu}
///                    sin(pi mu + a sin(pi nu) z^nu) dz.
double r_real_integral(FracIndex idx, double a, double t, const RConfig& cfg = {});

/// Laplace route: numerical inversion of s^-mu e^{-a s^nu}; the only route
/// covering nu > 1/2.  The node count is raised until the contour radius
/// reaches the transform saddle (a nu / t)^{1/(1-nu)}, so strongly damped
/// values keep relative accuracy; nu = 1 collapses to the exact shifted pulse.
double r_laplace(FracIndex idx, double a, double t,
                 laplace::InversionConfig cfg = default_r_inversion());

/// Route dispatcher.  a = 0 delegates to the a->0+ limit delta_mu (mu = 0 is
/// symbolic-only); nu <= 1/2 prefers the series with Laplace failover; nu > 1/2
/// uses Laplace.
REvalResult r_eval_detailed(FracIndex idx, double a, double t, const RConfig& cfg = {});
double r_eval(FracIndex idx, double a, double t, const RConfig& cfg = {});

/// dR/da = -R_{mu-nu,nu}(a,t), valid for mu >= nu.
double r_partial_a(FracIndex idx, double a, double t, const RConfig& cfg = {});

/// Closed forms at nu = 1/2 for mu in {0, 1/2, 1}:
///   a e^{-a^2/4t} / (2 sqrt(pi t^3)),  e^{-a^2/4t} / sqrt(pi t),  erfc(a/(2 sqrt t)).
double r_closed_form_half(double mu, double a, double t);

/// Tail identity R_{mu+nu,nu}(a,t) = int_a^inf R_{mu,nu}(z,t) dz.
/// Returns (lhs, rhs) with rhs by adaptive quadrature.
std::pair<double, double> r_tail_integral_check(FracIndex idx, double a, double t,
                                                const RConfig& cfg = {});

/// Line identity int_-inf^inf (1/2) R_{mu,nu}(|z|,t) dz = delta_{mu+nu}(t).
/// Returns (lhs by quadrature, rhs = delta_{mu+nu}(t)).  Requires mu + nu > 0.
std::pair<double, double> r_line_integral_check(FracIndex idx, double t,
                                                const RConfig& cfg = {});

}  // namespace fracdiff::specfun
