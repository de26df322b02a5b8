#include "fracdiff/specfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace fracdiff::specfun {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double inf = std::numeric_limits<double>::infinity();

// sin(pi x) with exact zeros at integer x (remainder(x,2) is exact).
double sin_pi(double x) {
    double r = std::remainder(x, 2.0);
    if (r == std::floor(r)) return 0.0;
    return std::sin(pi * r);
}

struct LogVal {
    double log_abs;
    double sign;  // 0 at Gamma poles
};

// log|1/Gamma(x)| with sign, defined for all real x.
LogVal rgamma_log(double x) {
    if (x > 0.5) return {-std::lgamma(x), 1.0};
    double s = sin_pi(x);
    if (s == 0.0) return {-inf, 0.0};
    return {std::log(std::abs(s) / pi) + std::lgamma(1.0 - x), s > 0.0 ? 1.0 : -1.0};
}

}  // namespace

double rgamma(double x) {
    if (std::isnan(x)) return quiet_nan;
    if (x > 0.5) {
        if (x <= 170.0) return 1.0 / std::tgamma(x);
        return std::exp(-std::lgamma(x));
    }
    double s = sin_pi(x);
    if (s == 0.0) return 0.0;
    double y = 1.0 - x;
    if (y <= 170.0) return s * std::tgamma(y) / pi;
    LogVal lv = rgamma_log(x);
    if (lv.log_abs > 709.0) return lv.sign * inf;
    return lv.sign * std::exp(lv.log_abs);
}

double delta_mu(double mu, double t) {
    if (!(mu >= 0.0) || !std::isfinite(mu))
        throw DomainError("delta_mu: mu must be finite and >= 0");
    if (!(t > 0.0)) throw DomainError("delta_mu: t must be positive");
    if (mu == 0.0)
        throw SymbolicOnlyError("delta_mu: mu = 0 is the Dirac mass and has no pointwise value");
    return std::pow(t, mu - 1.0) * rgamma(mu);
}

PowerLawPulse delta_pulse(double mu) {
    if (!(mu >= 0.0) || !std::isfinite(mu))
        throw DomainError("delta_pulse: mu must be finite and >= 0");
    return PowerLawPulse{mu};
}

WrightResult wright_detailed(double z, double alpha, double beta, const SeriesConfig& cfg) {
    cfg.validate();
    if (!(alpha > -1.0))
        throw DomainError("wright: alpha must be > -1, got " + std::to_string(alpha));
    WrightResult res;
    double sum = 0.0, comp = 0.0;
    double p = 1.0;  // z^j / j!
    double lp = 0.0;
    const double labsz = (z == 0.0) ? -inf : std::log(std::abs(z));
    int below = 0;
    for (int j = 0; j < cfg.max_terms; ++j) {
        const double x = alpha * j + beta;
        double term;
        if (std::abs(x) <= 170.0 && std::abs(p) < 1e290) {
            term = p * rgamma(x);
        } else {
            // the direct factors would over/underflow; form the term in logs
            LogVal lr = rgamma_log(x);
            if (lr.sign == 0.0) {
                term = 0.0;
            } else {
                double lt = lp + lr.log_abs;
                if (lt > 700.0) {
                    res.overflowed = true;
                    res.terms_used = j;
                    res.value = quiet_nan;
                    return res;
                }
                double sgn = lr.sign * ((z < 0.0 && (j & 1)) ? -1.0 : 1.0);
                term = sgn * std::exp(lt);
            }
        }
        res.max_abs_term = std::max(res.max_abs_term, std::abs(term));
        double y = term - comp;
        double t2 = sum + y;
        comp = (t2 - sum) - y;
        sum = t2;
        if (j >= 2 && std::abs(term) <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(sum))) {
            // Gamma poles give exact zero terms; require two consecutive small
            // terms so a pole cannot terminate the sum early.
            if (++below >= 2) {
                res.value = sum;
                res.terms_used = j + 1;
                return res;
            }
        } else {
            below = 0;
        }
        p *= z / (j + 1);
        lp += labsz - std::log(static_cast<double>(j + 1));
    }
    throw ConvergenceError("wright: series did not meet tolerance within " +
                           std::to_string(cfg.max_terms) + " terms (z=" + std::to_string(z) +
                           ", alpha=" + std::to_string(alpha) + ", beta=" + std::to_string(beta) + ")");
}

double wright(double z, double alpha, double beta, const SeriesConfig& cfg) {
    WrightResult r = wright_detailed(z, alpha, beta, cfg);
    if (r.overflowed)
        throw ConvergenceError("wright: series terms exceed double range (z=" + std::to_string(z) +
                               ")");
    return r.value;
}

double mainardi(double z, double nu, const SeriesConfig& cfg) {
    if (!(nu > 0.0) || !(nu < 1.0))
        throw DomainError("mainardi: nu must lie in (0, 1)");
    if (!(z >= 0.0)) throw DomainError("mainardi: z must be >= 0");
    return wright(-z, -nu, 1.0 - nu, cfg);
}

double f_aux(double z, double nu, const SeriesConfig& cfg) {
    if (!(nu > 0.0) || !(nu <= 0.5))
        throw DomainError("f_aux: nu must lie in (0, 1/2]");
    if (!(z >= 0.0)) throw DomainError("f_aux: z must be >= 0");
    return wright(-z, -nu, 0.0, cfg);
}

const char* route_name(RRoute r) {
    switch (r) {
        case RRoute::AZero: return "a-zero";
        case RRoute::Series: return "series";
        case RRoute::Laplace: return "laplace";
        case RRoute::RealIntegral: return "integral";
    }
    return "?";
}

REvalResult r_series_detailed(FracIndex idx, double a, double t, const RConfig& cfg) {
    if (!(idx.nu <= 0.5))
        throw DomainError("r_series: series representation requires nu <= 1/2");
    if (!(a > 0.0)) throw DomainError("r_series: a must be positive");
    if (!(t > 0.0)) throw DomainError("r_series: t must be positive");
    const double z = a * std::pow(t, -idx.nu);
    if (z <= cfg.series_arg_max) {
        try {
            WrightResult w = wright_detailed(-z, -idx.nu, idx.mu, cfg.series);
            if (!w.overflowed && w.cancellation() <= cfg.series_cancel_max) {
                return {std::pow(t, idx.mu - 1.0) * w.value, RRoute::Series, false};
            }
        } catch (const ConvergenceError&) {
            // fall through to the Laplace route
        }
    }
    return {r_laplace(idx, a, t, cfg.inversion), RRoute::Laplace, true};
}

double r_series(FracIndex idx, double a, double t, const RConfig& cfg) {
    return r_series_detailed(idx, a, t, cfg).value;
}

double r_laplace(FracIndex idx, double a, double t, laplace::InversionConfig cfg) {
    if (!(a > 0.0)) throw DomainError("r_laplace: a must be positive");
    if (!(t > 0.0)) throw DomainError("r_laplace: t must be positive");
    const double mu = idx.mu, nu = idx.nu;
    if (nu == 1.0) {
        // pure transport: the inverse is the shifted pulse delta_mu(t - a),
        // discontinuous at t = a, where no contour quadrature converges
        if (t == a)
            throw DomainError("r_laplace: nu = 1 evaluation on the wavefront t = a");
        if (t < a) return 0.0;
        return (mu == 0.0) ? 0.0 : delta_mu(mu, t - a);
    }
    // Enlarge the contour to reach the saddle of t s - a s^nu so strongly
    // damped values are computed without cancellation.  The radius is
    // r = contour_scale 2N/(5t), so covering the saddle means raising the
    // node count to N >= 2.5 s* t / contour_scale.  Safe only for
    // nu <= 1/2, where Re s^nu > 0 along the whole contour; in the wave
    // regime the transform grows on the wings and a hot contour overflows.
    if (nu <= 0.5) {
        double s_star = std::pow(a * nu / t, 1.0 / (1.0 - nu));
        double needed = std::ceil(2.5 * s_star * t / cfg.contour_scale);
        if (needed > cfg.node_count)
            cfg.node_count = static_cast<int>(std::min(needed, 4000.0));
    }
    auto logF = [mu, nu, a](std::complex<double> s) {
        std::complex<double> ls = std::log(s);  // principal branch, arg in (-pi, pi]
        std::complex<double> s_nu = std::exp(nu * ls);
        return -mu * ls - a * s_nu;
    };
    if (nu <= 0.5) return laplace::invert_log(logF, t, cfg);
    // wave regime: the transform grows off the axis of the principal sector,
    // and the trapezoid can quietly under-resolve the resulting integrand
    // bump; accept only node-count-stable values
    double v1 = laplace::invert_log(logF, t, cfg);
    laplace::InversionConfig finer = cfg;
    finer.node_count = cfg.node_count + cfg.node_count / 2;
    double v2 = laplace::invert_log(logF, t, finer);
    double scale = std::max(std::abs(v1), std::abs(v2));
    if (scale < 1e-250) return 0.0;
    if (std::abs(v1 - v2) > 1e-6 * scale)
        throw InversionError(
            "r_laplace: contour refinement does not stabilize in the wave regime (t too small "
            "for this transform); |v(N) - v(3N/2)| = " +
            std::to_string(std::abs(v1 - v2)));
    return v2;
}

REvalResult r_eval_detailed(FracIndex idx, double a, double t, const RConfig& cfg) {
    if (!(a >= 0.0)) throw DomainError("r_eval: a must be >= 0");
    if (!(t > 0.0)) throw DomainError("r_eval: t must be positive");
    if (a == 0.0) {
        if (idx.mu == 0.0)
            throw SymbolicOnlyError(
                "r_eval: R_{0,nu}(0+,t) is the Dirac mass; use the symbolic pulse form");
        return {delta_mu(idx.mu, t), RRoute::AZero, false};
    }
    if (idx.nu <= 0.5) return r_series_detailed(idx, a, t, cfg);
    return {r_laplace(idx, a, t, cfg.inversion), RRoute::Laplace, false};
}

double r_eval(FracIndex idx, double a, double t, const RConfig& cfg) {
    return r_eval_detailed(idx, a, t, cfg).value;
}

double r_partial_a(FracIndex idx, double a, double t, const RConfig& cfg) {
    if (!(idx.mu >= idx.nu))
        throw DomainError("r_partial_a: requires mu >= nu");
    return -r_eval(FracIndex(idx.mu - idx.nu, idx.nu), a, t, cfg);
}

double r_closed_form_half(double mu, double a, double t) {
    if (!(a > 0.0)) throw DomainError("r_closed_form_half: a must be positive");
    if (!(t > 0.0)) throw DomainError("r_closed_form_half: t must be positive");
    if (mu == 0.0) return a * std::exp(-a * a / (4.0 * t)) / (2.0 * std::sqrt(pi * t * t * t));
    if (mu == 0.5) return std::exp(-a * a / (4.0 * t)) / std::sqrt(pi * t);
    if (mu == 1.0) return std::erfc(a / (2.0 * std::sqrt(t)));
    throw DomainError("r_closed_form_half: mu must be one of {0, 1/2, 1}");
}

double r_real_integral(FracIndex idx, double a, double t, const RConfig& cfg) {
    const double mu = idx.mu, nu = idx.nu;
    if (!(nu <= 0.5))
        throw DomainError("r_real_integral: representation requires nu <= 1/2");
    if (!(mu < 1.0))
        throw DomainError("r_real_integral: route covers 0 <= mu < 1 only");
    if (!(a > 0.0)) throw DomainError("r_real_integral: a must be positive");
    if (!(t > 0.0)) throw DomainError("r_real_integral: t must be positive");

    const double cpn = std::cos(pi * nu);
    const double spn = std::sin(pi * nu);
    auto integrand = [=](double z) {
        return std::exp(-t * z - a * cpn * std::pow(z, nu)) * std::pow(z, -mu) *
               std::sin(pi * mu + a * spn * std::pow(z, nu)) / pi;
    };
    // truncation point: tail bounded by e^{-t Z - a cpn Z^nu} Z^-mu / (pi t)
    double Z = std::max(1.0, 1.0 / t);
    const double tail_target = std::max(cfg.quadrature.abs_tol, 1e-13);
    auto tail_bound = [&](double zz) {
        return std::exp(-t * zz - a * cpn * std::pow(zz, nu)) * std::pow(zz, -mu) / (pi * t);
    };
    int guard = 0;
    while (tail_bound(Z) > tail_target && guard++ < 60) Z *= 2.0;

    quad::QuadConfig qc = cfg.quadrature;
    double total = 0.0;
    double z1 = std::min(1.0, Z);
    if (mu > 0.0) {
        // remove the z^-mu endpoint singularity with z = u^{1/(1-mu)}
        const double q = 1.0 / (1.0 - mu);
        auto smoothed = [&](double u) {
            double z = std::pow(u, q);
            return q * std::exp(-t * z - a * cpn * std::pow(z, nu)) *
                   std::sin(pi * mu + a * spn * std::pow(z, nu)) / pi;
        };
        total += quad::integrate(smoothed, 0.0, std::pow(z1, 1.0 - mu), qc).value;
    } else {
        total += quad::integrate(integrand, 0.0, z1, qc).value;
    }
    // dyadic segments out to the truncation point
    double lo = z1;
    while (lo < Z) {
        double hi = std::min(2.0 * lo, Z);
        total += quad::integrate(integrand, lo, hi, qc).value;
        lo = hi;
    }
    return total;
}

std::pair<double, double> r_tail_integral_check(FracIndex idx, double a, double t,
                                                const RConfig& cfg) {
    if (!(a > 0.0)) throw DomainError("r_tail_integral_check: a must be positive");
    double lhs = r_eval(FracIndex(idx.mu + idx.nu, idx.nu), a, t, cfg);
    auto f = [&](double z) { return r_eval(idx, z, t, cfg); };
    quad::QuadConfig qc = cfg.quadrature;
    qc.rel_tol = std::max(qc.rel_tol, 1e-9);
    const double tol = std::max(qc.abs_tol, 1e-12);
    double total = 0.0;
    double lo = a;
    double len = std::max(1.0, std::pow(t, idx.nu));
    for (int seg = 0; seg < 64; ++seg) {
        double hi = lo + len;
        double piece = quad::integrate(f, lo, hi, qc).value;
        total += piece;
        // superexponential decay: stop once a segment and the local value are negligible
        if (std::abs(piece) < tol && std::abs(f(hi)) * len < tol) break;
        lo = hi;
        len *= 2.0;
    }
    return {lhs, total};
}

std::pair<double, double> r_line_integral_check(FracIndex idx, double t, const RConfig& cfg) {
    if (!(idx.mu + idx.nu > 0.0))
        throw DomainError("r_line_integral_check: requires mu + nu > 0");
    auto f = [&](double z) { return r_eval(idx, z, t, cfg); };
    quad::QuadConfig qc = cfg.quadrature;
    qc.rel_tol = std::max(qc.rel_tol, 1e-9);
    const double tol = std::max(qc.abs_tol, 1e-12);
    double total = 0.0;
    double lo = 0.0;
    double len = std::max(1.0, std::pow(t, idx.nu));
    for (int seg = 0; seg < 64; ++seg) {
        double hi = lo + len;
        total += quad::integrate(f, lo, hi, qc).value;
        if (std::abs(f(hi)) * len < tol && seg > 0) break;
        lo = hi;
        len *= 2.0;
    }
    double rhs = delta_mu(idx.mu + idx.nu, t);
    return {total, rhs};
}

}  // namespace fracdiff::specfun

// ---------------------------------------------------------------------------
// PowerLawPulse / SymbolicDensity (declared in types.hpp)

namespace fracdiff {

double PowerLawPulse::coefficient() const {
    if (is_dirac())
        throw SymbolicOnlyError("PowerLawPulse: DiracAtZero has no power-law coefficient");
    return specfun::rgamma(mu);
}

double PowerLawPulse::operator()(double t) const {
    if (is_dirac())
        throw SymbolicOnlyError("PowerLawPulse: DiracAtZero has no pointwise value");
    if (!(t > 0.0)) throw DomainError("PowerLawPulse: t must be positive");
    return std::pow(t, mu - 1.0) * specfun::rgamma(mu);
}

SymbolicDensity SymbolicDensity::scaled_pulse(double scale, double mu) {
    if (!(mu >= 0.0)) throw DomainError("SymbolicDensity: pulse order must be >= 0");
    SymbolicDensity d;
    if (scale == 0.0) return d;
    if (mu == 0.0) {
        d.dirac_weight = scale;
    } else {
        d.terms.push_back({scale * specfun::rgamma(mu), mu - 1.0});
    }
    return d;
}

double SymbolicDensity::eval(double t) const {
    double out = 0.0;
    for (const auto& term : terms) {
        if (term.exponent < 0.0 && !(t > 0.0))
            throw DomainError("SymbolicDensity: negative-exponent term needs t > 0");
        out += term(t);
    }
    return out;
}

SymbolicDensity& SymbolicDensity::operator+=(const SymbolicDensity& other) {
    for (const auto& term : other.terms) {
        bool merged = false;
        for (auto& mine : terms) {
            if (mine.exponent == term.exponent) {
                mine.coeff += term.coeff;
                merged = true;
                break;
            }
        }
        if (!merged) terms.push_back(term);
    }
    dirac_weight += other.dirac_weight;
    return *this;
}

SymbolicDensity SymbolicDensity::scaled(double s) const {
    SymbolicDensity d = *this;
    for (auto& term : d.terms) term.coeff *= s;
    d.dirac_weight *= s;
    return d;
}

}  // namespace fracdiff
