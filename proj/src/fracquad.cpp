#include "fracdiff/fracquad.hpp"

#include <cmath>
#include <vector>

namespace fracdiff::fracquad {

using specfun::rgamma;

SampledFn sample(const TimeGrid& grid, const std::function<double(double)>& fn,
                 double value_at_zero) {
    SampledFn out(grid);
    out.values[0] = value_at_zero;
    for (int k = 1; k <= grid.n_steps; ++k) out.values[k] = fn(grid.node(k));
    return out;
}

SampledFn sample_singular(const TimeGrid& grid, const std::function<double(double)>& fn,
                          const PowerTerm& origin) {
    if (!(origin.exponent > -1.0) || !(origin.exponent < 0.0))
        throw DomainError("sample_singular: origin exponent must lie in (-1, 0)");
    SampledFn out(grid);
    out.values[0] = quiet_nan;
    out.origin_singularity = origin;
    for (int k = 1; k <= grid.n_steps; ++k) out.values[k] = fn(grid.node(k));
    return out;
}

SampledFn rl_integral(const SampledFn& f, double mu) {
    if (!(mu > 0.0) || !std::isfinite(mu))
        throw DomainError("rl_integral: mu must be finite and positive");
    if (f.first_node_unset && !f.origin_singularity)
        throw DomainError("rl_integral: input has an unset first node and no singularity model");
    const TimeGrid& g = f.grid;
    const int n = g.n_steps;
    const double h = g.h();
    const double rg = rgamma(mu);

    // cached powers: pw[m] = (m h)^mu, pw1[m] = (m h)^{mu+1}
    std::vector<double> pw(n + 1), pw1(n + 1);
    const double hmu = std::pow(h, mu);
    for (int m = 0; m <= n; ++m) {
        double mm = std::pow(static_cast<double>(m), mu);
        pw[m] = hmu * mm;
        pw1[m] = pw[m] * (m * h);
    }

    SampledFn out(g);
    out.values[0] = 0.0;

    // singular first panel model f ~ C tau^p with a linear correction that
    // vanishes at 0 and matches f at t_1
    double sing_c = 0.0, sing_p = 0.0, corr1 = 0.0;
    if (f.origin_singularity) {
        sing_c = f.origin_singularity->coeff;
        sing_p = f.origin_singularity->exponent;
        corr1 = f.values[1] - sing_c * std::pow(h, sing_p);
    }

    for (int k = 1; k <= n; ++k) {
        const double tk = g.node(k);
        double acc = 0.0;
        for (int j = 1; j <= k; ++j) {
            if (f.origin_singularity && j < k) {
                // power-aware panel: f = tau^p g(tau) with g linear between
                // g_{j-1} and g_j, kernel interpolated linearly (smooth here
                // since j < k), integrated against exact moments of tau^p
                const double tl = g.node(j - 1), tr = g.node(j);
                const double g_l = (j == 1) ? sing_c : f.values[j - 1] / std::pow(tl, sing_p);
                const double g_r = f.values[j] / std::pow(tr, sing_p);
                const double k_l = std::pow(tk - tl, mu - 1.0) * rg;
                const double k_r = std::pow(tk - tr, mu - 1.0) * rg;
                const double M0 =
                    (std::pow(tr, sing_p + 1.0) - std::pow(tl, sing_p + 1.0)) / (sing_p + 1.0);
                const double M1 =
                    (std::pow(tr, sing_p + 2.0) - std::pow(tl, sing_p + 2.0)) / (sing_p + 2.0);
                const double M2 =
                    (std::pow(tr, sing_p + 3.0) - std::pow(tl, sing_p + 3.0)) / (sing_p + 3.0);
                // u = tau - t_{j-1}: U0, U1, U2 = int u^q tau^p dtau
                const double U0 = M0;
                const double U1 = M1 - tl * M0;
                const double U2 = M2 - 2.0 * tl * M1 + tl * tl * M0;
                const double dk = k_r - k_l, dg = g_r - g_l;
                acc += k_l * g_l * U0 + (k_l * dg + dk * g_l) * U1 / h + dk * dg * U2 / (h * h);
                continue;
            }
            // sigma = t_k - tau over panel j: [s_lo, s_hi] = [(k-j) h, (k-j+1) h]
            const int mlo = k - j;
            const double s_lo = mlo * h;
            // exact moments of the kernel: int sigma^{mu-1}/Gamma(mu) and
            // int sigma^mu/Gamma(mu) over the panel
            const double I0 = (pw[mlo + 1] - pw[mlo]) / mu * rg;
            const double I1 = (pw1[mlo + 1] - pw1[mlo]) / (mu + 1.0) * rg;
            double fl = f.values[j - 1], fr = f.values[j];
            if (j == 1 && f.origin_singularity) {
                // k == 1: both the kernel and the data meet at the origin
                // panel; the power model integrates to an exact Beta moment,
                // plus a linear correction vanishing at 0
                acc += sing_c * std::pow(h, mu + sing_p) * std::tgamma(sing_p + 1.0) *
                       rgamma(mu + sing_p + 1.0);
                fl = 0.0;
                fr = corr1;
            }
            // piecewise-linear f against the exact kernel moments:
            //   tau - t_{j-1} = s_hi - sigma,  t_j - tau = sigma - s_lo
            const double s_hi = s_lo + h;
            acc += (fl * (I1 - s_lo * I0) + fr * (s_hi * I0 - I1)) / h;
        }
        out.values[k] = acc;
    }
    return out;
}

SampledFn caputo_derivative(const SampledFn& f, double mu) {
    if (!(mu > 0.0) || !(mu < 1.0))
        throw DomainError("caputo_derivative: mu must lie in (0,1)");
    if (!f.value_at_zero_known() || !std::isfinite(f.values[0]))
        throw DomainError("caputo_derivative: f(0) must be finite (singular inputs unsupported)");
    const TimeGrid& g = f.grid;
    const int n = g.n_steps;
    const double h = g.h();
    // L1 scheme: D^mu f(t_k) = h^-mu/Gamma(2-mu) sum_{j=0}^{k-1} a_{k-1-j} (f_{j+1}-f_j),
    // a_m = (m+1)^{1-mu} - m^{1-mu}
    std::vector<double> a(n);
    for (int m = 0; m < n; ++m)
        a[m] = std::pow(m + 1.0, 1.0 - mu) - std::pow(static_cast<double>(m), 1.0 - mu);
    const double scale = std::pow(h, -mu) * rgamma(2.0 - mu);
    SampledFn out(g);
    out.values[0] = quiet_nan;
    out.first_node_unset = true;
    for (int k = 1; k <= n; ++k) {
        double acc = 0.0;
        for (int j = 0; j < k; ++j) acc += a[k - 1 - j] * (f.values[j + 1] - f.values[j]);
        out.values[k] = scale * acc;
    }
    return out;
}

SampledFn rl_derivative(const SampledFn& f, double mu) {
    if (!(mu > 0.0) || !(mu < 1.0))
        throw DomainError("rl_derivative: mu must lie in (0,1)");
    SampledFn g = rl_integral(f, 1.0 - mu);
    const int n = f.grid.n_steps;
    const double h = f.grid.h();
    SampledFn out(f.grid);
    out.values[0] = quiet_nan;
    out.first_node_unset = true;
    for (int k = 1; k < n; ++k) out.values[k] = (g.values[k + 1] - g.values[k - 1]) / (2.0 * h);
    out.values[n] = (3.0 * g.values[n] - 4.0 * g.values[n - 1] + g.values[n - 2]) / (2.0 * h);
    return out;
}

SampledFn residual_int_eq_sampled(const SampledFn& y, FracIndex idx, double a) {
    SampledFn i_nu = rl_integral(y, 1.0 - idx.nu);
    SampledFn i_one = rl_integral(y, 1.0);
    SampledFn out(y.grid);
    for (int k = 0; k <= y.grid.n_steps; ++k) {
        double t = y.grid.node(k);
        out.values[k] =
            a * idx.nu * i_nu.values[k] - t * y.values[k] + idx.mu * i_one.values[k];
    }
    return out;
}

SampledFn residual_int_eq(FracIndex idx, double a, const TimeGrid& grid,
                          const specfun::RConfig& cfg) {
    if (!(idx.mu > 0.0))
        throw DomainError("residual_int_eq: mu = 0 excluded (y singular at the origin)");
    if (!(idx.nu <= 0.5)) throw DomainError("residual_int_eq: requires nu <= 1/2");
    if (!(a > 0.0)) throw DomainError("residual_int_eq: a must be positive");
    SampledFn y = sample(grid, [&](double t) { return specfun::r_eval(idx, a, t, cfg); }, 0.0);
    return residual_int_eq_sampled(y, idx, a);
}

SampledFn residual_ode_sampled(const SampledFn& y, FracIndex idx, double a) {
    SampledFn d_nu = caputo_derivative(y, idx.nu);
    const int n = y.grid.n_steps;
    const double h = y.grid.h();
    SampledFn out(y.grid);
    out.values[0] = quiet_nan;
    out.first_node_unset = true;
    for (int k = 1; k <= n; ++k) {
        double yp = (k < n) ? (y.values[k + 1] - y.values[k - 1]) / (2.0 * h)
                            : (3.0 * y.values[n] - 4.0 * y.values[n - 1] + y.values[n - 2]) /
                                  (2.0 * h);
        double t = y.grid.node(k);
        out.values[k] = a * idx.nu * d_nu.values[k] - t * yp - (1.0 - idx.mu) * y.values[k];
    }
    return out;
}

SampledFn residual_ode(FracIndex idx, double a, const TimeGrid& grid,
                       const specfun::RConfig& cfg) {
    if (!(idx.mu > 0.0)) throw DomainError("residual_ode: mu = 0 excluded");
    if (!(idx.nu <= 0.5)) throw DomainError("residual_ode: requires nu <= 1/2");
    if (!(a > 0.0)) throw DomainError("residual_ode: a must be positive");
    SampledFn y = sample(grid, [&](double t) { return specfun::r_eval(idx, a, t, cfg); }, 0.0);
    return residual_ode_sampled(y, idx, a);
}

double max_norm(const SampledFn& f, int from) {
    return f.max_abs(from);
}

}  // namespace fracdiff::fracquad
