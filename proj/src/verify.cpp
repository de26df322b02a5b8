#include "fracdiff/verify.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <ostream>
#include <sstream>

#include "fracdiff/fracquad.hpp"
#include "fracdiff/ibvp.hpp"
#include "fracdiff/laplace.hpp"
#include "fracdiff/specfun.hpp"
#include "fracdiff/stefan.hpp"
#include "fracdiff/volterra.hpp"

namespace fracdiff::verify {

namespace {

using cplx = std::complex<double>;
using namespace fracdiff::specfun;

struct Runner {
    std::vector<CheckResult> results;

    void check(const std::string& name, const std::function<std::pair<bool, std::string>()>& fn) {
        CheckResult r;
        r.name = name;
        try {
            auto [ok, detail] = fn();
            r.ok = ok;
            r.detail = detail;
        } catch (const std::exception& e) {
            r.ok = false;
            r.detail = std::string("exception: ") + e.what();
        }
        results.push_back(std::move(r));
    }
};

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << x;
    return os.str();
}

std::pair<bool, std::string> bound(double measured, double limit) {
    return {measured <= limit, fmt(measured) + " (limit " + fmt(limit) + ")"};
}

std::pair<bool, std::string> ratio_at_least(double ratio, double limit) {
    return {ratio >= limit, "ratio " + fmt(ratio) + " (needs >= " + fmt(limit) + ")"};
}

// ---------------------------------------------------------------------------

void suite_specfun(Runner& run) {
    run.check("specfun: nu=1/2 closed forms via series and inversion", [] {
        double worst = 0.0;
        for (double mu : {0.0, 0.5, 1.0})
            for (double a : {0.3, 1.0, 2.5, 5.0})
                for (double t : {0.25, 1.0, 4.0}) {
                    double want = r_closed_form_half(mu, a, t);
                    worst = std::max(worst, std::abs(r_series(FracIndex(mu, 0.5), a, t) - want) /
                                                want);
                    worst = std::max(worst, std::abs(r_laplace(FracIndex(mu, 0.5), a, t) - want) /
                                                want);
                }
        return bound(worst, 1e-8);
    });

    run.check("specfun: cross-route agreement over the diffusion grid", [] {
        double worst = 0.0;
        for (double nu : {0.1, 0.25, 0.4, 0.5})
            for (double mu : {0.0, nu, 1.0 - nu, 1.0})
                for (double a : {0.1, 1.0, 3.0})
                    for (double t : {0.2, 1.0, 4.0}) {
                        double s = r_series(FracIndex(mu, nu), a, t);
                        double l = r_laplace(FracIndex(mu, nu), a, t);
                        worst = std::max(worst, std::abs(s - l) / std::max(1.0, std::abs(s)));
                        if (mu < 1.0) {
                            double ri = r_real_integral(FracIndex(mu, nu), a, t);
                            worst = std::max(worst, std::abs(ri - s));
                        }
                    }
        return bound(worst, 1e-6);
    });

    run.check("specfun: semigroup relation through rl_integral", [] {
        const double nu = 0.4, a = 1.5, mu = 0.6;
        auto err_at = [&](int n) {
            TimeGrid g(1.0, n);
            auto y0 = fracquad::sample(
                g, [&](double t) { return r_eval(FracIndex(0.0, nu), a, t); }, 0.0);
            auto lifted = fracquad::rl_integral(y0, mu);
            double m = 0.0;
            for (int k = 1; k <= n; ++k)
                m = std::max(m, std::abs(lifted.values[k] -
                                         r_eval(FracIndex(mu, nu), a, g.node(k))));
            return m;
        };
        double e128 = err_at(128), e256 = err_at(256);
        auto [ok1, d1] = ratio_at_least(e128 / e256, 1.8);
        auto [ok2, d2] = bound(e256, 1e-4);
        return std::pair{ok1 && ok2, d1 + "; e256 " + d2};
    });

    run.check("specfun: dR/da = -R_{mu-nu,nu} vs finite differences", [] {
        double worst = 0.0;
        for (auto [mu, nu, a, t] :
             {std::tuple{0.3, 0.3, 2.0, 1.0}, {0.5, 0.25, 0.5, 2.0}, {1.0, 0.5, 1.0, 1.0}}) {
            double hs = 1e-5;
            double fd = (r_eval(FracIndex(mu, nu), a + hs, t) -
                         r_eval(FracIndex(mu, nu), a - hs, t)) /
                        (2.0 * hs);
            double an = r_partial_a(FracIndex(mu, nu), a, t);
            worst = std::max(worst, std::abs(an - fd) / std::max(1e-300, std::abs(an)));
        }
        return bound(worst, 1e-5);
    });

    run.check("specfun: a->0 pulse limit at a=1e-6", [] {
        double worst = 0.0;
        for (double nu : {0.3, 0.5})
            for (double mu : {0.5, 1.0, 1.5})
                for (double t : {0.5, 2.0}) {
                    double v = r_eval(FracIndex(mu, nu), 1e-6, t);
                    worst = std::max(worst, std::abs(v - delta_mu(mu, t)) / delta_mu(mu, t));
                }
        return bound(worst, 1e-4);
    });

    run.check("specfun: vanishing at t->0 for fixed a", [] {
        double worst = 0.0;
        for (double nu : {0.3, 0.5})
            for (double mu : {0.0, 0.5, 1.0})
                worst = std::max(worst, std::abs(r_eval(FracIndex(mu, nu), 1.0, 1e-6)));
        return bound(worst, 1e-8);
    });

    run.check("specfun: Mainardi relation M(a t^-nu; nu) = t^nu R_{1-nu,nu}", [] {
        double worst = 0.0;
        for (double nu : {0.1, 0.3, 0.5})
            for (double a : {0.5, 2.0})
                for (double t : {0.5, 1.0, 3.0}) {
                    double lhs = mainardi(a * std::pow(t, -nu), nu);
                    double rhs = std::pow(t, nu) * r_eval(FracIndex(1.0 - nu, nu), a, t);
                    worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
                }
        return bound(worst, 1e-8);
    });

    run.check("specfun: tail integral identity R_{mu+nu} = int_a R_mu", [] {
        double worst = 0.0;
        for (auto [mu, nu, a, t] :
             {std::tuple{0.5, 0.5, 1.0, 1.0}, {0.3, 0.3, 2.0, 1.0}, {1.0, 0.4, 0.5, 2.0}}) {
            auto [lhs, rhs] = r_tail_integral_check(FracIndex(mu, nu), a, t);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        return bound(worst, 1e-5);
    });

    run.check("specfun: line integral identity = delta_{mu+nu}", [] {
        double worst = 0.0;
        for (auto [mu, nu, t] :
             {std::tuple{0.5, 0.5, 1.0}, {0.2, 0.3, 2.0}, {1.0, 0.4, 1.0}}) {
            auto [lhs, rhs] = r_line_integral_check(FracIndex(mu, nu), t);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        return bound(worst, 1e-4);
    });

    run.check("specfun: numerical non-negativity at nu <= 1/2", [] {
        double lowest = 0.0;
        for (double nu : {0.1, 0.25, 0.4, 0.5})
            for (double mu : {nu, 2.0 * nu, 1.0 - nu, 1.0})
                for (double a : {0.1, 0.5, 2.0, 5.0})
                    for (double t : {0.1, 1.0, 5.0})
                        lowest = std::min(lowest, r_series(FracIndex(mu, nu), a, t));
        return std::pair{lowest >= -1e-12, "min " + fmt(lowest)};
    });

    run.check("laplace: elementary transforms", [] {
        double worst = std::abs(laplace::invert([](cplx s) { return 1.0 / s; }, 3.7) - 1.0);
        worst = std::max(worst,
                         std::abs(laplace::invert([](cplx s) { return 1.0 / (s * s); }, 2.0) - 2.0) /
                             2.0);
        worst = std::max(worst, std::abs(laplace::invert([](cplx s) { return std::pow(s, -0.5); },
                                                         1.0) -
                                         1.0 / std::sqrt(M_PI)) *
                                    std::sqrt(M_PI));
        return bound(worst, 1e-9);
    });

    run.check("laplace: linearity of the inversion", [] {
        laplace::InversionConfig cfg;
        cfg.node_count = 20;
        auto F = [](cplx s) { return 1.0 / (s + 1.0); };
        auto G = [](cplx s) { return 1.0 / (s * s); };
        double worst = 0.0;
        for (double t : {0.5, 1.0, 2.5}) {
            double combo =
                laplace::invert([&](cplx s) { return 2.0 * F(s) - 3.0 * G(s); }, t, cfg);
            double parts = 2.0 * laplace::invert(F, t, cfg) - 3.0 * laplace::invert(G, t, cfg);
            worst = std::max(worst, std::abs(combo - parts) / std::max(1.0, std::abs(parts)));
        }
        return bound(worst, 1e-12);
    });

    run.check("laplace: node-count convergence within the noise floor", [] {
        struct Case {
            laplace::Transform F;
            double t, exact;
        };
        Case cases[] = {
            {[](cplx s) { return 1.0 / s; }, 3.7, 1.0},
            {[](cplx s) { return 1.0 / (s * s); }, 2.0, 2.0},
            {[](cplx s) { return std::pow(s, -0.5); }, 1.0, 1.0 / std::sqrt(M_PI)},
        };
        for (auto& c : cases) {
            double prev = -1.0;
            for (int n : {16, 32, 64}) {
                laplace::InversionConfig cfg;
                cfg.node_count = n;
                auto r = laplace::invert_detailed(c.F, c.t, cfg);
                double err = std::abs(r.value - c.exact) / std::abs(c.exact);
                double floor = 50.0 * 2.2e-16 * r.condition();
                if (prev >= 0.0 && err > std::max(prev, floor))
                    return std::pair{false, "error grew at n=" + std::to_string(n)};
                prev = err;
            }
        }
        return std::pair{true, std::string("monotone within floor")};
    });

    run.check("laplace: agreement with the nu=1/2 closed forms", [] {
        double worst = 0.0;
        for (double mu : {0.0, 0.5, 1.0})
            for (auto [a, t] : {std::pair{1.0, 1.0}, {2.5, 1.0}, {1.0, 4.0}}) {
                double v = laplace::invert(
                    [mu, a](cplx s) { return std::pow(s, -mu) * std::exp(-a * std::sqrt(s)); },
                    t);
                double want = r_closed_form_half(mu, a, t);
                worst = std::max(worst, std::abs(v - want) / want);
            }
        return bound(worst, 1e-8);
    });
}

// ---------------------------------------------------------------------------

void suite_fracquad(Runner& run) {
    using namespace fracdiff::fracquad;

    run.check("fracquad: power rules for the three operators", [] {
        TimeGrid g(2.0, 128);
        double worst = 0.0;
        auto lin = sample(g, [](double t) { return t; }, 0.0);
        auto I = rl_integral(lin, 0.5);
        for (int k = 1; k <= g.n_steps; ++k)
            worst = std::max(worst, std::abs(I.values[k] - std::pow(g.node(k), 1.5) /
                                                               std::tgamma(2.5)));
        auto D = caputo_derivative(lin, 0.5);
        for (int k = 1; k <= g.n_steps; ++k)
            worst = std::max(worst,
                             std::abs(D.values[k] - std::sqrt(g.node(k)) / std::tgamma(1.5)));
        auto one = sample(g, [](double) { return 1.0; }, 1.0);
        auto Dr = rl_derivative(one, 0.5);
        for (int k = g.n_steps / 2; k <= g.n_steps; ++k)
            worst = std::max(worst, std::abs(Dr.values[k] - 1.0 / std::sqrt(M_PI * g.node(k))) /
                                        0.4);
        return bound(worst, 5e-3);
    });

    run.check("fracquad: integer order collapses to the trapezoidal rule", [] {
        TimeGrid g(1.5, 64);
        auto f = sample(g, [](double t) { return std::exp(-t) * std::sin(3.0 * t) + 0.3; }, 0.3);
        auto I = rl_integral(f, 1.0);
        double acc = 0.0, worst = 0.0;
        for (int k = 1; k <= g.n_steps; ++k) {
            acc += 0.5 * g.h() * (f.values[k - 1] + f.values[k]);
            worst = std::max(worst, std::abs(I.values[k] - acc));
        }
        return bound(worst, 1e-13);
    });

    run.check("fracquad: semigroup I^a I^b = I^{a+b}", [] {
        auto err = [&](int n) {
            TimeGrid g(1.5, n);
            auto f = sample(g, [](double t) { return t * t * t * std::exp(t); }, 0.0);
            auto two = rl_integral(rl_integral(f, 0.4), 0.8);
            auto one = rl_integral(f, 1.2);
            double m = 0.0;
            for (int k = 1; k <= n; ++k)
                m = std::max(m, std::abs(two.values[k] - one.values[k]));
            return m;
        };
        return ratio_at_least(err(128) / err(256), 2.5);
    });

    run.check("fracquad: operators are linear", [] {
        TimeGrid g(1.0, 48);
        SampledFn f(g), h(g);
        unsigned long long s = 12345;
        for (int k = 0; k <= g.n_steps; ++k) {
            s = s * 6364136223846793005ULL + 1442695040888963407ULL;
            f.values[k] = static_cast<double>(s >> 11) / 9007199254740992.0 - 0.5;
            s = s * 6364136223846793005ULL + 1442695040888963407ULL;
            h.values[k] = static_cast<double>(s >> 11) / 9007199254740992.0 - 0.5;
        }
        SampledFn combo(g);
        for (int k = 0; k <= g.n_steps; ++k)
            combo.values[k] = 1.7 * f.values[k] - 0.6 * h.values[k];
        double worst = 0.0;
        auto probe = [&](auto op) {
            auto lhs = op(combo);
            auto va = op(f);
            auto vb = op(h);
            for (int k = 1; k <= g.n_steps; ++k)
                worst = std::max(worst, std::abs(lhs.values[k] - 1.7 * va.values[k] +
                                                 0.6 * vb.values[k]));
        };
        probe([](const SampledFn& x) { return rl_integral(x, 0.5); });
        probe([](const SampledFn& x) { return caputo_derivative(x, 0.3); });
        probe([](const SampledFn& x) { return rl_derivative(x, 0.7); });
        return bound(worst, 1e-11);
    });

    run.check("fracquad: RL and Caputo differ by f(0) delta_{1-mu}", [] {
        TimeGrid g(2.0, 256);
        const double mu = 0.3;
        auto f = sample(g, [](double t) { return 2.0 + t + 0.5 * t * t; }, 2.0);
        auto Dr = rl_derivative(f, mu);
        auto Dc = caputo_derivative(f, mu);
        double worst = 0.0;
        for (int k = g.n_steps / 2; k <= g.n_steps; ++k) {
            double want = 2.0 * std::pow(g.node(k), -mu) / std::tgamma(1.0 - mu);
            worst = std::max(worst, std::abs(Dr.values[k] - Dc.values[k] - want) / want);
        }
        return bound(worst, 5e-3);
    });

    run.check("fracquad: integral-equation residual halving ratios", [] {
        double worst_ratio = 1e30;
        for (auto [mu, nu, a] : {std::tuple{0.25, 0.25, 4.0},
                                 {0.75, 0.25, 4.0},
                                 {1.0, 0.25, 4.0},
                                 {0.4, 0.4, 2.0},
                                 {0.6, 0.4, 2.0},
                                 {1.0, 0.4, 2.0}}) {
            auto r128 = residual_int_eq(FracIndex(mu, nu), a, TimeGrid(1.0, 128));
            auto r256 = residual_int_eq(FracIndex(mu, nu), a, TimeGrid(1.0, 256));
            worst_ratio = std::min(worst_ratio, max_norm(r128, 4) / max_norm(r256, 8));
        }
        return ratio_at_least(worst_ratio, 2.5);
    });

    run.check("fracquad: ODE residual halving ratios", [] {
        double worst_ratio = 1e30;
        for (auto [mu, nu, a] : {std::tuple{0.25, 0.25, 4.0},
                                 {0.75, 0.25, 4.0},
                                 {1.0, 0.25, 4.0},
                                 {0.4, 0.4, 2.0},
                                 {0.6, 0.4, 2.0},
                                 {1.0, 0.4, 2.0}}) {
            auto r128 = residual_ode(FracIndex(mu, nu), a, TimeGrid(1.0, 128));
            auto r256 = residual_ode(FracIndex(mu, nu), a, TimeGrid(1.0, 256));
            worst_ratio = std::min(worst_ratio, max_norm(r128, 4) / max_norm(r256, 8));
        }
        return ratio_at_least(worst_ratio, 2.5);
    });

    run.check("fracquad: ODE residual evaluator exact on constants", [] {
        TimeGrid g(1.0, 64);
        auto one = sample(g, [](double) { return 1.0; }, 1.0);
        auto r = residual_ode_sampled(one, FracIndex(0.25, 0.4), 1.5);
        double worst = 0.0;
        for (int k = 1; k <= g.n_steps; ++k)
            worst = std::max(worst, std::abs(r.values[k] + (1.0 - 0.25)));
        return bound(worst, 1e-12);
    });
}

// ---------------------------------------------------------------------------

void suite_volterra(Runner& run) {
    using namespace fracdiff::volterra;

    auto abel_kernel = [](double two_nu) {
        double c = 0.5 * rgamma(two_nu);
        return KernelEntry::singular(
            [two_nu](double t, double tau) { return 0.5 * delta_mu(two_nu, t - tau); },
            two_nu - 1.0, [c](double) { return c; });
    };
    auto rhs_on = [](const TimeGrid& g, const std::function<double(double)>& h) {
        SampledFn out(g);
        for (int k = 0; k <= g.n_steps; ++k) out.values[k] = h(g.node(k));
        return out;
    };

    run.check("volterra: Abel reduction recovers the closed form", [&] {
        TimeGrid g(1.0, 128);
        auto phi = solve_first_kind_scalar(abel_kernel(0.5),
                                           rhs_on(g, [](double t) { return t; }), g);
        double worst = 0.0;
        for (int j = g.n_steps / 4; j <= g.n_steps; ++j) {
            double mid = 0.5 * (g.node(j - 1) + g.node(j));
            worst = std::max(worst,
                             std::abs(phi.values[j] - 2.0 * std::sqrt(mid) / std::tgamma(1.5)));
        }
        return bound(worst, 2e-3);
    });

    run.check("volterra: backward error of the discrete equations", [&] {
        TimeGrid g(1.0, 64);
        KernelMatrix K;
        K.k11 = abel_kernel(0.6);
        K.k12 = KernelEntry::smooth([](double t, double tau) { return 0.2 + 0.1 * (t - tau); });
        K.k21 = KernelEntry::smooth([](double, double) { return 0.1; });
        K.k22 = abel_kernel(0.8);
        auto sol = solve_first_kind(K, rhs_on(g, [](double t) { return 1.0 + t; }),
                                    rhs_on(g, [](double t) { return t * t; }), g);
        return bound(sol.max_residual, 1e-10);
    });

    run.check("volterra: manufactured densities recovered at first order", [&] {
        auto K11 = [](double t, double tau) { return 1.0 + (t - tau); };
        auto K12 = [](double t, double tau) { return 0.5 * std::exp(-(t - tau)); };
        auto K21 = [](double, double tau) { return 0.3 + 0.1 * tau; };
        auto K22 = [](double t, double tau) { return 1.0 + 0.2 * (t - tau); };
        auto run_once = [&](int n) {
            TimeGrid g(1.0, n);
            SampledFn h1(g), h2(g);
            for (int k = 1; k <= n; ++k) {
                double t = g.node(k);
                // trapezoid-free: exact antiderivatives of the manufactured data
                // int K11 tau + K12 dtau and int K21 tau + K22 dtau
                double I11 = t * t / 2.0 + t * t * t / 6.0;
                double I12 = 0.5 * (1.0 - std::exp(-t));
                double I21 = 0.3 * t * t / 2.0 + 0.1 * t * t * t / 3.0;
                double I22 = t + 0.1 * t * t;
                h1.values[k] = I11 + I12;
                h2.values[k] = I21 + I22;
            }
            KernelMatrix K{KernelEntry::smooth(K11), KernelEntry::smooth(K12),
                           KernelEntry::smooth(K21), KernelEntry::smooth(K22)};
            auto sol = solve_first_kind(K, h1, h2, g);
            double err = 0.0;
            for (int j = 1; j <= n; ++j) {
                double mid = 0.5 * (g.node(j - 1) + g.node(j));
                err = std::max(err, std::abs(sol.phi_minus.values[j] - mid));
                err = std::max(err, std::abs(sol.phi_plus.values[j] - 1.0));
            }
            return err;
        };
        return ratio_at_least(run_once(64) / run_once(128), 1.5);
    });

    run.check("volterra: nu=1/2 degeneracy (bounded kernel)", [&] {
        TimeGrid g(1.0, 128);
        auto phi = solve_first_kind_scalar(abel_kernel(1.0),
                                           rhs_on(g, [](double t) { return t * t; }), g);
        double worst = 0.0;
        for (int j = 1; j <= g.n_steps; ++j) {
            double mid = 0.5 * (g.node(j - 1) + g.node(j));
            worst = std::max(worst, std::abs(phi.values[j] - 4.0 * mid));
        }
        return bound(worst, 1e-10);
    });

    run.check("volterra: linearity in the data", [&] {
        TimeGrid g(1.0, 48);
        KernelMatrix K;
        K.k11 = abel_kernel(0.5);
        K.k12 = KernelEntry::smooth([](double t, double tau) { return 0.3 * std::cos(t - tau); });
        K.k21 = KernelEntry::smooth([](double, double tau) { return 0.2 + tau; });
        K.k22 = abel_kernel(0.7);
        auto h1a = rhs_on(g, [](double t) { return t; });
        auto h2a = rhs_on(g, [](double t) { return 1.0 - t; });
        auto h1b = rhs_on(g, [](double t) { return std::sin(t); });
        auto h2b = rhs_on(g, [](double t) { return t * t; });
        SampledFn h1c(g), h2c(g);
        for (int k = 0; k <= g.n_steps; ++k) {
            h1c.values[k] = 2.0 * h1a.values[k] - 0.5 * h1b.values[k];
            h2c.values[k] = 2.0 * h2a.values[k] - 0.5 * h2b.values[k];
        }
        auto sa = solve_first_kind(K, h1a, h2a, g);
        auto sb = solve_first_kind(K, h1b, h2b, g);
        auto sc = solve_first_kind(K, h1c, h2c, g);
        double worst = 0.0;
        for (int j = 1; j <= g.n_steps; ++j) {
            worst = std::max(worst, std::abs(sc.phi_minus.values[j] - 2.0 * sa.phi_minus.values[j] +
                                             0.5 * sb.phi_minus.values[j]));
            worst = std::max(worst, std::abs(sc.phi_plus.values[j] - 2.0 * sa.phi_plus.values[j] +
                                             0.5 * sb.phi_plus.values[j]));
        }
        return bound(worst, 1e-9);
    });

    run.check("volterra: symbolic Abel inversion algebra", [] {
        const double two_nu = 0.6, u0 = 0.4;
        SymbolicDensity g = SymbolicDensity::constant(2.0);
        g += SymbolicDensity::scaled_pulse(-2.0 * u0, two_nu);
        auto phi = abel_invert(g, two_nu);
        bool ok = phi.terms.size() == 1 &&
                  std::abs(phi.terms[0].coeff - 2.0 / std::tgamma(1.0 - two_nu)) < 1e-14 &&
                  std::abs(phi.dirac_weight + 2.0 * u0) < 1e-14;
        return std::pair{ok, std::string("2 delta_{1-2nu} - 2 u0 delta")};
    });
}

// ---------------------------------------------------------------------------

void suite_ibvp(Runner& run) {
    using namespace fracdiff::ibvp;

    auto half_line = [](DerivativeKind kind, double nu, double g_left, double f_const) {
        IBVPProblem p;
        p.kind = kind;
        p.nu = nu;
        p.kappa = 1.0;
        p.left = {1.0, 0.0, TimeFn::constant(g_left)};
        p.right = {1.0, 0.0, TimeFn::constant(f_const)};
        p.lower = BoundaryPath::constant(0.0);
        p.upper = BoundaryPath::plus_infinity();
        p.f_ext = ExtensionFn::constant(f_const);
        return p;
    };

    run.check("ibvp: kernel entries against the closed forms", [&] {
        IBVPProblem p = half_line(DerivativeKind::Caputo, 0.5, 1.0, 0.0);
        p.upper = BoundaryPath::constant(1.0);
        auto K = kernel_matrix(p, 1.5, 0.5);
        double worst = std::abs(K.k12 - 0.5 * std::erfc(0.5));
        worst = std::max(worst, std::abs(K.k21 - K.k12));
        worst = std::max(worst, std::abs(K.k11 - 0.5));
        return bound(worst, 1e-12);
    });

    run.check("ibvp: h reductions for constant data", [&] {
        const double u0 = 0.35, nu = 0.3;
        IBVPProblem p = half_line(DerivativeKind::Caputo, nu, 1.0, u0);
        auto [hm, hp] = compute_h(p);
        double worst = std::abs(hm(0.7) - (1.0 - u0));
        p.kind = DerivativeKind::RiemannLiouville;
        auto [hm2, hp2] = compute_h(p);
        worst = std::max(worst,
                         std::abs(hm2(0.8) - (1.0 - u0 * delta_mu(2.0 * nu, 0.8))));
        return bound(worst, 1e-12);
    });

    run.check("ibvp: half-line closed-form densities", [&] {
        const double nu = 0.4;
        auto p = half_line(DerivativeKind::Caputo, nu, 1.0, 0.0);
        p.right = {1.0, 0.0, TimeFn::constant(0.0)};
        auto sol = solve(p, TimeGrid(1.0, 64));
        bool ok = sol.phi_minus.symbolic && sol.phi_minus.symbolic->terms.size() == 1 &&
                  std::abs(sol.phi_minus.symbolic->terms[0].coeff -
                           2.0 / std::tgamma(1.0 - 2.0 * nu)) < 1e-13 &&
                  sol.phi_plus.is_zero();
        return std::pair{ok, std::string("phi^- = 2 delta_{1-2nu}")};
    });

    run.check("ibvp: pure IVP preserves constant data", [&] {
        IBVPProblem p = half_line(DerivativeKind::Caputo, 0.35, 3.0, 3.0);
        p.lower = BoundaryPath::minus_infinity();
        p.upper = BoundaryPath::plus_infinity();
        auto sol = solve(p, TimeGrid(1.0, 32));
        double worst = 0.0;
        for (double x : {-2.0, 5.0})
            for (double t : {0.1, 1.0}) worst = std::max(worst, std::abs(eval_u(sol, x, t) - 3.0));
        return bound(worst, 1e-12);
    });

    run.check("ibvp: classical erfc limit at nu = 1/2", [&] {
        auto sol = solve(half_line(DerivativeKind::Caputo, 0.5, 1.0, 0.0), TimeGrid(1.0, 64));
        double worst = 0.0;
        for (double x : {0.1, 0.5, 1.0, 2.0})
            for (double t : {0.25, 0.5, 1.0})
                worst = std::max(worst, std::abs(eval_u(sol, x, t) -
                                                 std::erfc(x / (2.0 * std::sqrt(t)))));
        return bound(worst, 1e-10);
    });

    run.check("ibvp: Caputo and RL pipelines coincide at nu = 1/2", [&] {
        auto ca = solve(half_line(DerivativeKind::Caputo, 0.5, 1.0, 0.2), TimeGrid(1.0, 64));
        auto rl = solve(half_line(DerivativeKind::RiemannLiouville, 0.5, 1.0, 0.2),
                        TimeGrid(1.0, 64));
        double worst = 0.0;
        for (double x : {0.3, 1.2})
            for (double t : {0.3, 0.9})
                worst = std::max(worst, std::abs(eval_u(ca, x, t) - eval_u(rl, x, t)));
        return bound(worst, 1e-6);
    });

    run.check("ibvp: extension invariance of the solution", [&] {
        auto pa = half_line(DerivativeKind::Caputo, 0.5, 1.0, 0.0);
        auto pb = pa;
        pb.f_ext = ExtensionFn::piecewise({0.0}, {5.0, 0.0});
        auto sa = solve(pa, TimeGrid(1.0, 256));
        auto sb = solve(pb, TimeGrid(1.0, 256));
        double worst = 0.0;
        for (double x : {0.2, 0.8, 1.5})
            for (double t : {0.3, 0.7, 1.0})
                worst = std::max(worst, std::abs(eval_u(sa, x, t) - eval_u(sb, x, t)));
        return bound(worst, 5e-3);
    });

    run.check("ibvp: eval_ux consistent with finite differences", [&] {
        auto sol = solve(half_line(DerivativeKind::Caputo, 0.35, 1.0, 0.2), TimeGrid(1.0, 64));
        double worst = 0.0;
        for (double x : {0.5, 1.0})
            for (double t : {0.4, 0.9}) {
                double hs = 1e-4;
                double fd = (eval_u(sol, x + hs, t) - eval_u(sol, x - hs, t)) / (2.0 * hs);
                double ux = eval_ux(sol, x, t);
                worst = std::max(worst, std::abs(ux - fd) / std::max(1e-300, std::abs(ux)));
            }
        return bound(worst, 1e-4);
    });

    run.check("ibvp: boundary conditions met under refinement (2x2 march)", [&] {
        IBVPProblem p = half_line(DerivativeKind::Caputo, 0.3, 1.0, 0.0);
        p.upper = BoundaryPath::constant(1.0);
        p.right = {1.0, 0.0, TimeFn::constant(0.0)};
        auto bc_err = [&](int n) {
            auto sol = solve(p, TimeGrid(0.5, n));
            double m = 0.0;
            for (double t : {0.2, 0.35, 0.5}) {
                m = std::max(m, std::abs(eval_u(sol, 0.0, t) - 1.0));
                m = std::max(m, std::abs(eval_u(sol, 1.0, t)));
            }
            return m;
        };
        double e32 = bc_err(32), e64 = bc_err(64);
        return std::pair{e64 < e32 && e64 < 5e-2,
                         "e32 " + fmt(e32) + " -> e64 " + fmt(e64)};
    });

    run.check("ibvp: initial condition recovery (Caputo and RL)", [&] {
        auto sol = solve(half_line(DerivativeKind::Caputo, 0.4, 1.0, 0.7), TimeGrid(1.0, 64));
        double worst = std::abs(eval_u(sol, 2.0, 1e-4) - 0.7);
        const double nu = 0.3;
        auto solrl =
            solve(half_line(DerivativeKind::RiemannLiouville, nu, 1.0, 0.7), TimeGrid(1.0, 64));
        TimeGrid window(0.02, 64);
        auto slice = fracquad::sample_singular(
            window, [&](double t) { return eval_u(solrl, 2.0, t); },
            {0.7 / std::tgamma(2.0 * nu), 2.0 * nu - 1.0});
        auto I = fracquad::rl_integral(slice, 1.0 - 2.0 * nu);
        worst = std::max(worst, std::abs(I.values[1] - 0.7));
        return bound(worst, 1e-2);
    });
}

// ---------------------------------------------------------------------------

void suite_stefan(Runner& run) {
    using namespace fracdiff::stefan;

    run.check("stefan: front constant matches the classical root", [] {
        // independent bisection on r sqrt(pi) a erf(a) e^{a^2} = 1
        double lo = 1e-6, hi = 3.0;
        auto f = [](double a) {
            return std::sqrt(M_PI) * a * std::erf(a) * std::exp(a * a) - 1.0;
        };
        double flo = f(lo);
        for (int i = 0; i < 200; ++i) {
            double mid = 0.5 * (lo + hi);
            double fm = f(mid);
            if ((fm < 0.0) == (flo < 0.0)) {
                lo = mid;
                flo = fm;
            } else
                hi = mid;
        }
        double oracle = 0.5 * (lo + hi);
        double alpha = stefan1_alpha(0.5, 1.0);
        double worst = std::abs(alpha - oracle);
        worst = std::max(worst, std::abs(alpha - 0.620063) - 1e-4);
        return bound(worst, 1e-6);
    });

    run.check("stefan: classical similarity field at nu = 1/2", [] {
        auto sol = stefan1_solve(0.5, 1.0);
        double worst = std::abs(sol.u0 + std::erfc(sol.alpha) / std::erf(sol.alpha));
        for (double t : {0.25, 1.0, 4.0})
            for (double frac : {0.1, 0.5, 0.9}) {
                double x = frac * sol.eta(t);
                double want = 1.0 - std::erf(x / (2.0 * std::sqrt(t))) / std::erf(sol.alpha);
                worst = std::max(worst, std::abs(sol.u(x, t) - want));
            }
        return bound(worst, 1e-10);
    });

    run.check("stefan: melting residual identities", [] {
        double worst = 0.0;
        double ts[] = {0.5, 1.0, 2.0};
        for (double nu : {0.25, 0.3, 0.4, 0.5}) {
            auto rep = stefan1_residuals(stefan1_solve(nu, 1.0), ts);
            worst = std::max({worst, rep.max_front_bc, rep.max_stefan});
        }
        return bound(worst, 1e-10);
    });

    run.check("stefan: front scaling eta(4t) = 4^nu eta(t)", [] {
        double worst = 0.0;
        for (double nu : {0.25, 0.4, 0.5}) {
            auto sol = stefan1_solve(nu, 1.0);
            worst = std::max(worst,
                             std::abs(sol.eta(4.0) / sol.eta(1.0) - std::pow(4.0, nu)));
        }
        return bound(worst, 1e-12);
    });

    run.check("stefan: RL similarity ansatz certified to fail below 1/2", [] {
        double ts[] = {0.5, 1.0, 2.0};
        auto rep = rl_ansatz_check(0.3, 0.5, -0.5, ts);
        bool rejected = false;
        try {
            stefan1_solve(0.3, 1.0, DerivativeKind::RiemannLiouville);
        } catch (const UnsupportedProblemError&) {
            rejected = true;
        }
        return std::pair{rep.spread > 1e-3 && rejected,
                         "spread " + fmt(rep.spread) + ", solver rejects"};
    });

    run.check("stefan: subcooled marching, Caputo == RL at nu = 1/2", [] {
        TimeGrid g(0.5, 32);
        auto ca = stefan2_solve(DerivativeKind::Caputo, 0.5, 1.0, g);
        auto rl = stefan2_solve(DerivativeKind::RiemannLiouville, 0.5, 1.0, g);
        double worst = 0.0;
        for (int k = 1; k <= g.n_steps; ++k) {
            worst = std::max(worst, std::abs(ca.eta.values[k] - rl.eta.values[k]));
            worst = std::max({worst, ca.residual_bc[k], ca.residual_stefan[k]});
        }
        return bound(worst, 5e-10);
    });

    run.check("stefan: subcooled marching self-convergence", [] {
        auto run_n = [&](int n) {
            return stefan2_solve(DerivativeKind::Caputo, 0.4, 1.0, TimeGrid(0.5, n));
        };
        auto s32 = run_n(32), s64 = run_n(64), s128 = run_n(128);
        double d1 = 0.0, d2 = 0.0;
        for (int k = 1; k <= 32; ++k) {
            d1 = std::max(d1, std::abs(s32.eta.values[k] - s64.eta.values[2 * k]));
            d2 = std::max(d2, std::abs(s64.eta.values[2 * k] - s128.eta.values[4 * k]));
        }
        return ratio_at_least(d1 / d2, 1.5);
    });

    run.check("stefan: subcooled field values", [] {
        TimeGrid g(0.5, 32);
        auto st = stefan2_solve(DerivativeKind::Caputo, 0.5, 1.0, g);
        double worst = std::abs(stefan2_eval_u(st, st.eta_at(0.5), 0.5));
        worst = std::max(worst, 50.0 * std::abs(stefan2_eval_u(st, 50.0, 0.5) + 1.0));
        return bound(worst, 2e-2);
    });
}

}  // namespace

std::vector<CheckResult> run_suite(const std::string& suite) {
    Runner run;
    bool all = (suite == "all");
    bool known = all;
    if (all || suite == "specfun") {
        suite_specfun(run);
        known = true;
    }
    if (all || suite == "fracquad") {
        suite_fracquad(run);
        known = true;
    }
    if (all || suite == "volterra") {
        suite_volterra(run);
        known = true;
    }
    if (all || suite == "ibvp") {
        suite_ibvp(run);
        known = true;
    }
    if (all || suite == "stefan") {
        suite_stefan(run);
        known = true;
    }
    if (!known)
        throw DomainError("verify: unknown suite '" + suite +
                          "' (expected specfun|fracquad|volterra|ibvp|stefan|all)");
    return run.results;
}

int print_tap(std::ostream& os, const std::vector<CheckResult>& results) {
    os << "TAP version 13\n1.." << results.size() << "\n";
    int failures = 0;
    for (size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        if (!r.ok) ++failures;
        os << (r.ok ? "ok " : "not ok ") << (i + 1) << " - " << r.name;
        if (!r.detail.empty()) os << "  # " << r.detail;
        os << "\n";
    }
    return failures;
}

}  // namespace fracdiff::verify
