#include "fracdiff/stefan.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fracdiff/volterra.hpp"

namespace fracdiff::stefan {

using specfun::delta_mu;
using specfun::r_eval;
using specfun::rgamma;

namespace {

// W(-2 alpha; -nu, mu) evaluated through the R-function dispatcher so the
// series -> Laplace failover protects the large-argument regime (the raw
// alternating series is pure cancellation noise for 2 alpha >~ 10)
double wright_front(double alpha, double nu, double mu, const specfun::RConfig& cfg) {
    return r_eval(FracIndex(mu, nu), 2.0 * alpha, 1.0, cfg);
}

double trans3(double alpha, double nu, double r, const specfun::RConfig& cfg) {
    double w1 = wright_front(alpha, nu, 1.0, cfg);
    double w1n = wright_front(alpha, nu, 1.0 - nu, cfg);
    return 2.0 * alpha * r * std::tgamma(1.0 + nu) * rgamma(1.0 - nu) * (1.0 - w1) - w1n;
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double flo,
              double tol) {
    double fhi = f(hi);
    (void)fhi;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (hi - lo <= tol * std::max(1.0, std::abs(mid))) return mid;
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((flo < 0.0) == (fm < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double stefan1_alpha(double nu, double r, const Stefan1Config& cfg) {
    if (!(nu > 0.0) || !(nu <= 0.5))
        throw DomainError("stefan1_alpha: nu must lie in (0, 1/2]");
    if (!(r > 0.0)) throw DomainError("stefan1_alpha: r must be positive");
    auto f = [&](double a) { return trans3(a, nu, r, cfg.reval); };
    // bracket scan; uniqueness asserted by counting sign changes
    std::vector<std::pair<double, double>> brackets;
    double prev_x = cfg.bracket_lo, prev_f = f(prev_x);
    for (int i = 1; i <= cfg.scan_points; ++i) {
        double x = cfg.bracket_lo +
                   (cfg.bracket_hi - cfg.bracket_lo) * static_cast<double>(i) / cfg.scan_points;
        double fx = f(x);
        if ((prev_f < 0.0) != (fx < 0.0)) brackets.emplace_back(prev_x, x);
        prev_x = x;
        prev_f = fx;
    }
    if (brackets.empty())
        throw ConvergenceError("stefan1_alpha: no sign change in [" +
                               std::to_string(cfg.bracket_lo) + ", " +
                               std::to_string(cfg.bracket_hi) + "]");
    if (brackets.size() > 1) {
        std::string msg = "stefan1_alpha: multiple sign changes:";
        for (auto& b : brackets)
            msg += " [" + std::to_string(b.first) + "," + std::to_string(b.second) + "]";
        throw ConvergenceError(msg);
    }
    double lo = brackets[0].first, hi = brackets[0].second;
    return bisect(f, lo, hi, f(lo), cfg.root_tol);
}

double Stefan1Solution::eta(double t) const {
    if (!(t >= 0.0)) throw DomainError("stefan1: t must be >= 0");
    return 2.0 * alpha * std::pow(t, nu);
}

double Stefan1Solution::eta_frac_derivative(double t) const {
    if (!(t > 0.0)) throw DomainError("stefan1: t must be positive");
    return 2.0 * alpha * std::tgamma(1.0 + nu) * rgamma(1.0 - nu) * std::pow(t, -nu);
}

double Stefan1Solution::u(double x, double t) const {
    if (!(t > 0.0)) throw DomainError("stefan1: t must be positive");
    if (!(x >= 0.0)) throw DomainError("stefan1: x must be >= 0");
    double R1 = (x == 0.0) ? 1.0 : r_eval(FracIndex(1.0, nu), x, t, reval);
    return (R1 - wright_at_front) / (1.0 - wright_at_front);
}

double Stefan1Solution::ux(double x, double t) const {
    if (!(t > 0.0)) throw DomainError("stefan1: t must be positive");
    if (!(x > 0.0)) throw DomainError("stefan1: ux needs x > 0");
    return -(1.0 - u0) * r_eval(FracIndex(1.0 - nu, nu), x, t, reval);
}

Stefan1Solution stefan1_solve(double nu, double r, DerivativeKind kind, const Stefan1Config& cfg) {
    if (kind == DerivativeKind::RiemannLiouville && nu < 0.5)
        throw UnsupportedProblemError(
            "stefan1_solve: the similarity ansatz fails for the Riemann-Liouville front "
            "condition when nu < 1/2 (see rl_ansatz_check); only nu = 1/2 coincides with the "
            "Caputo solution");
    double alpha = stefan1_alpha(nu, r, cfg);
    double w1 = wright_front(alpha, nu, 1.0, cfg.reval);
    Stefan1Solution sol;
    sol.nu = nu;
    sol.r = r;
    sol.alpha = alpha;
    sol.wright_at_front = w1;
    sol.u0 = -w1 / (1.0 - w1);
    sol.reval = cfg.reval;
    return sol;
}

Stefan1Inverse stefan1_from_u0(double nu, double u0, const Stefan1Config& cfg) {
    if (!(nu > 0.0) || !(nu <= 0.5))
        throw DomainError("stefan1_from_u0: nu must lie in (0, 1/2]");
    if (!(u0 < 0.0))
        throw DomainError(
            "stefan1_from_u0: the front condition W(-2 alpha; -nu, 1) = -u0/(1-u0) forces "
            "u0 < 0 for a positive front constant");
    const double target = -u0 / (1.0 - u0);  // in (0, 1)
    auto f = [&](double a) { return wright_front(a, nu, 1.0, cfg.reval) - target; };
    double lo = cfg.bracket_lo, hi = cfg.bracket_hi;
    double flo = f(lo);
    if ((flo < 0.0) == (f(hi) < 0.0))
        throw ConvergenceError("stefan1_from_u0: no bracket for alpha");
    double alpha = bisect(f, lo, hi, flo, cfg.root_tol);
    // r from the front dynamics: 2 alpha r Gamma(1+nu)/((1-u0) Gamma(1-nu)) = W(-2a;-nu,1-nu)
    double w1n = wright_front(alpha, nu, 1.0 - nu, cfg.reval);
    double r = w1n * (1.0 - u0) / (2.0 * alpha * std::tgamma(1.0 + nu) * rgamma(1.0 - nu));
    return {alpha, r};
}

Stefan1Residuals stefan1_residuals(const Stefan1Solution& sol, std::span<const double> t_samples) {
    Stefan1Residuals rep;
    for (double t : t_samples) {
        if (!(t > 0.0)) throw DomainError("stefan1_residuals: t samples must be positive");
        double eta = sol.eta(t);
        double r1 = r_eval(FracIndex(1.0, sol.nu), eta, t, sol.reval) +
                    sol.u0 / (1.0 - sol.u0);
        double r2 = -sol.r * sol.eta_frac_derivative(t) +
                    (1.0 - sol.u0) * r_eval(FracIndex(1.0 - sol.nu, sol.nu), eta, t, sol.reval);
        rep.t.push_back(t);
        rep.front_bc.push_back(std::abs(r1));
        rep.stefan_cond.push_back(std::abs(r2));
        rep.max_front_bc = std::max(rep.max_front_bc, std::abs(r1));
        rep.max_stefan = std::max(rep.max_stefan, std::abs(r2));
    }
    return rep;
}

RlAnsatzReport rl_ansatz_check(double nu, double alpha, double u0,
                               std::span<const double> t_samples, const specfun::RConfig& cfg) {
    if (!(nu > 0.0) || !(nu < 0.5))
        throw DomainError("rl_ansatz_check: nu must lie in (0, 1/2); at nu = 1/2 the identity holds");
    if (!(alpha > 0.0)) throw DomainError("rl_ansatz_check: alpha must be positive");
    RlAnsatzReport rep;
    rep.degenerate_u0 = (u0 == 0.0);
    double w1 = wright_front(alpha, nu, 1.0, cfg);
    double w2n = wright_front(alpha, nu, 2.0 * nu, cfg);
    double vmin = 0.0, vmax = 0.0;
    bool first = true;
    for (double t : t_samples) {
        if (!(t > 0.0)) throw DomainError("rl_ansatz_check: t samples must be positive");
        double tp = std::pow(t, 2.0 * nu - 1.0);
        double v = w1 - u0 * tp * w2n + u0 * tp * rgamma(2.0 * nu);
        rep.t.push_back(t);
        rep.value.push_back(v);
        vmin = first ? v : std::min(vmin, v);
        vmax = first ? v : std::max(vmax, v);
        first = false;
    }
    rep.spread = vmax - vmin;
    return rep;
}

// ---------------------------------------------------------------------------
// Example-2 time marching

namespace {

struct March {
    DerivativeKind kind;
    double nu;
    double r;
    specfun::RConfig reval;
    std::vector<double> node_t{0.0};
    std::vector<double> node_eta{0.0};
    std::vector<double> panel_phi;

    double h_minus(double t) const {
        return kind == DerivativeKind::Caputo ? 1.0 : delta_mu(2.0 * nu, t);
    }

    // L1 value of D^{2nu} eta at the trial node (t, e) appended to the history;
    // eta(0) = 0 makes the Caputo and Riemann-Liouville derivatives coincide
    double frac_eta_derivative(double t, double e) const {
        const size_t n = node_t.size();
        if (nu == 0.5) return (e - node_eta[n - 1]) / (t - node_t[n - 1]);
        const double m = 2.0 * nu;
        double acc = 0.0;
        for (size_t k = 0; k + 1 <= n; ++k) {
            double tk = node_t[k], ek = node_eta[k];
            double tk1 = (k + 1 < n) ? node_t[k + 1] : t;
            double ek1 = (k + 1 < n) ? node_eta[k + 1] : e;
            acc += (ek1 - ek) / (tk1 - tk) *
                   (std::pow(t - tk, 1.0 - m) - std::pow(t - tk1, 1.0 - m));
        }
        return acc * rgamma(2.0 - m);
    }

    // product-integration sum of int_0^t K_order(e - eta(tau), t - tau) phi(tau) dtau
    // with the trial (t, e, phi_new) appended; the last panel carries the
    // sigma^{order-1} weak singularity.  The kernels extend to negative
    // arguments (the front may recede through its own history; at nu = 1/2
    // the subcooled problem genuinely starts that way) by the same
    // half-line integration that produced them:
    //   u-kernel (order = 2nu):  z >= 0: (1/2) R(z, s);
    //                            z <  0: delta_{2nu}(s) - (1/2) R(-z, s)
    //   flux kernel (order = nu): even, (1/2) R(|z|, s)
    // x_eval: where the kernel argument x - eta(tau) is anchored (the trial
    // front during marching, any x >= eta(t) for field evaluation);
    // eta_final: eta at tau = t closing the last panel of the interpolant
    double history(double order, double t, double x_eval, double eta_final,
                   double phi_new) const {
        const size_t n = node_t.size();
        const bool complement = order > nu;  // u-kernel vs flux kernel
        double acc = 0.0;
        auto g_of = [&](double eta_tau, double sigma) {
            // bounded factor g(sigma) = K(x - eta(tau), sigma) sigma^{1-order}
            double z = x_eval - eta_tau;
            double az = std::abs(z);
            double R = (az == 0.0) ? delta_mu(order, sigma)
                                   : r_eval(FracIndex(order, nu), az, sigma, reval);
            if (z >= 0.0 || !complement) return 0.5 * R * std::pow(sigma, 1.0 - order);
            return rgamma(order) - 0.5 * R * std::pow(sigma, 1.0 - order);
        };
        const double p = order - 1.0;
        for (size_t j = 0; j < n; ++j) {
            double lo = node_t[j];
            double hi = (j + 1 < n) ? node_t[j + 1] : t;
            double elo = node_eta[j];
            double ehi = (j + 1 < n) ? node_eta[j + 1] : eta_final;
            double phi = (j < panel_phi.size()) ? panel_phi[j] : phi_new;
            double s_hi = t - lo;
            double s_lo = t - hi;
            double g_hi = g_of(elo, s_hi);
            double g_lo;
            if (s_lo <= 0.0) {
                // sigma -> 0 limit: the pulse value on the diagonal
                // (x = eta(t)); off the diagonal R decays superexponentially,
                // leaving 0 on the positive side and the full pulse on the
                // complement side
                double z_diag = x_eval - ehi;
                if (std::abs(z_diag) <= 1e-12 * std::max(1.0, std::abs(x_eval)))
                    g_lo = 0.5 * rgamma(order);
                else
                    g_lo = (z_diag < 0.0 && complement) ? rgamma(order) : 0.0;
            } else {
                g_lo = g_of(ehi, s_lo);
            }
            double m0 = (std::pow(s_hi, p + 1.0) - std::pow(s_lo, p + 1.0)) / (p + 1.0);
            double m1 = (std::pow(s_hi, p + 2.0) - std::pow(s_lo, p + 2.0)) / (p + 2.0);
            double width = s_hi - s_lo;
            acc += phi * (g_lo * m0 + (g_hi - g_lo) * (m1 - s_lo * m0) / width);
        }
        return acc;
    }

    // residuals of the two discretized equations at the trial point
    void residuals(double t, double phi, double e, double& r_bc, double& r_st) const {
        r_bc = history(2.0 * nu, t, e, e, phi) - h_minus(t);
        r_st = r * frac_eta_derivative(t, e) - 1.0 + history(nu, t, e, e, phi);
    }

    void accept(double t, double phi, double e) {
        node_t.push_back(t);
        node_eta.push_back(e);
        panel_phi.push_back(phi);
    }
};

}  // namespace

Stefan2State stefan2_solve(DerivativeKind kind, double nu, double r, const TimeGrid& grid,
                           const Stefan2Config& cfg) {
    if (!(nu > 0.0) || !(nu <= 0.5))
        throw DomainError("stefan2_solve: nu must lie in (0, 1/2]");
    if (!(r > 0.0)) throw DomainError("stefan2_solve: r must be positive");
    if (grid.n_steps < 32) throw DomainError("stefan2_solve: need n_steps >= 32");

    March m{kind, nu, r, cfg.reval, {0.0}, {0.0}, {}};

    Stefan2State state{kind, nu,  r,    grid, SampledFn(grid), SampledFn(grid), {}, {},
                       true, cfg.reval, {},   {},   {}};
    state.residual_bc.assign(static_cast<size_t>(grid.size()), 0.0);
    state.residual_stefan.assign(static_cast<size_t>(grid.size()), 0.0);
    state.eta.values[0] = 0.0;
    state.phi_minus.values[0] = quiet_nan;
    state.phi_minus.first_node_unset = true;

    // target node times: the first main panel is subcycled to absorb the
    // weak-singularity start-up error
    std::vector<std::pair<double, int>> targets;  // (time, main-node index or -1)
    const double h = grid.h();
    const int sub = std::max(1, cfg.first_step_subcycles);
    for (int s = 1; s <= sub; ++s)
        targets.emplace_back(h * s / sub, s == sub ? 1 : -1);
    for (int k = 2; k <= grid.n_steps; ++k) targets.emplace_back(grid.node(k), k);

    double scale_eta = 0.0;
    for (auto [t, main_idx] : targets) {
        // initial guesses: linear continuation, or the small-time similarity
        // shape eta ~ c t^nu on the first step
        double e_guess, phi_guess;
        size_t n = m.node_t.size();
        if (n >= 3) {
            double slope = (m.node_eta[n - 1] - m.node_eta[n - 2]) /
                           (m.node_t[n - 1] - m.node_t[n - 2]);
            e_guess = m.node_eta[n - 1] + slope * (t - m.node_t[n - 1]);
            phi_guess = m.panel_phi.back();
        } else if (n == 2) {
            e_guess = m.node_eta[1] * std::pow(t / m.node_t[1], nu);
            phi_guess = m.panel_phi.back();
        } else {
            e_guess = 0.25 * std::pow(t, nu);
            // with eta frozen the BC is linear in phi; start from the
            // single-panel solve
            phi_guess = 0.0;
        }
        if (n == 1) {
            double w = m.history(2.0 * nu, t, e_guess, e_guess, 1.0);
            phi_guess = m.h_minus(t) / w;
        }

        bool converged = false;
        double phi = phi_guess, e = e_guess;
        const double bc_scale = std::max(1.0, std::abs(m.h_minus(t)));
        for (int attempt = 0; attempt < 4 && !converged; ++attempt) {
            if (attempt > 0) {
                // retry from other similarity amplitudes (the front may start
                // out receding, so negative starts are included)
                double amps[] = {-0.25, 0.6, -1.0};
                e = amps[attempt - 1] * std::pow(t, nu) + m.node_eta.back();
                double w = m.history(2.0 * nu, t, e, e, 1.0);
                phi = m.h_minus(t) / std::max(std::abs(w), 1e-300) * (w < 0 ? -1.0 : 1.0);
            }
            double r1, r2;
            m.residuals(t, phi, e, r1, r2);
            for (int it = 0; it < cfg.newton_max_iter; ++it) {
                double st_scale = std::max({1.0, std::abs(m.r * m.frac_eta_derivative(t, e))});
                if (std::abs(r1) <= cfg.newton_tol * bc_scale &&
                    std::abs(r2) <= cfg.newton_tol * st_scale) {
                    converged = true;
                    break;
                }
                // finite-difference Jacobian
                double dphi = std::max(1e-6 * std::abs(phi), 1e-8);
                double de = std::max(1e-6 * std::abs(e), 1e-8 * std::pow(t, nu));
                double a1, a2, b1, b2;
                m.residuals(t, phi + dphi, e, a1, a2);
                m.residuals(t, phi, e + de, b1, b2);
                double j11 = (a1 - r1) / dphi, j12 = (b1 - r1) / de;
                double j21 = (a2 - r2) / dphi, j22 = (b2 - r2) / de;
                double det = j11 * j22 - j12 * j21;
                if (det == 0.0 || !std::isfinite(det)) break;
                double sphi = (r1 * j22 - r2 * j12) / det;
                double se = (j11 * r2 - j21 * r1) / det;
                // damped update: halve until the residual does not grow
                double lam = 1.0;
                double n1 = std::abs(r1) / bc_scale + std::abs(r2) / st_scale;
                bool improved = false;
                for (int halving = 0; halving < 12; ++halving) {
                    double phi_try = phi - lam * sphi;
                    double e_try = e - lam * se;
                    double t1, t2;
                    try {
                        m.residuals(t, phi_try, e_try, t1, t2);
                    } catch (const DomainError&) {
                        lam *= cfg.damping;
                        continue;
                    }
                    double ntry = std::abs(t1) / bc_scale + std::abs(t2) / st_scale;
                    if (ntry <= n1) {
                        phi = phi_try;
                        e = e_try;
                        r1 = t1;
                        r2 = t2;
                        improved = true;
                        break;
                    }
                    lam *= cfg.damping;
                }
                if (!improved) break;
            }
        }
        if (!converged)
            throw ConvergenceError("stefan2_solve: Newton failed at t=" + std::to_string(t));
        double r1, r2;
        m.residuals(t, phi, e, r1, r2);
        m.accept(t, phi, e);
        scale_eta = std::max(scale_eta, std::abs(e));
        if (main_idx >= 0) {
            state.eta.values[main_idx] = e;
            state.phi_minus.values[main_idx] = phi;
            state.residual_bc[main_idx] = std::abs(r1);
            state.residual_stefan[main_idx] = std::abs(r2);
            if (main_idx >= 1 &&
                state.eta.values[main_idx] <
                    state.eta.values[main_idx - 1] - 1e-12 * std::max(scale_eta, 1e-12))
                state.eta_monotone = false;
        }
    }
    state.node_t = m.node_t;
    state.node_eta = m.node_eta;
    state.panel_phi = m.panel_phi;
    return state;
}

double Stefan2State::eta_at(double t) const {
    if (!(t >= 0.0) || t > node_t.back() * (1.0 + 1e-12))
        throw DomainError("stefan2: t outside the solved span");
    auto it = std::upper_bound(node_t.begin(), node_t.end(), t);
    size_t k = static_cast<size_t>(std::max<std::ptrdiff_t>(1, it - node_t.begin()));
    if (k >= node_t.size()) k = node_t.size() - 1;
    double w = (t - node_t[k - 1]) / (node_t[k] - node_t[k - 1]);
    return node_eta[k - 1] + w * (node_eta[k] - node_eta[k - 1]);
}

double stefan2_eval_u(const Stefan2State& state, double x, double t) {
    if (!(t > 0.0)) throw DomainError("stefan2_eval_u: t must be positive");
    double eta_t = state.eta_at(t);
    if (x < eta_t - 1e-9 * std::max(1.0, std::abs(eta_t)))
        throw DomainError("stefan2_eval_u: x must be >= eta(t)");

    const double nu = state.nu;
    double base = state.kind == DerivativeKind::Caputo ? -1.0 : -delta_mu(2.0 * nu, t);

    // keep the history strictly below t; history() closes the final panel
    // [last node, t] with (eta_final, phi of the covering panel)
    March m{state.kind, nu, state.r, state.reval, {}, {}, {}};
    size_t keep = 0;
    while (keep + 1 < state.node_t.size() && state.node_t[keep + 1] < t) ++keep;
    m.node_t.assign(state.node_t.begin(), state.node_t.begin() + keep + 1);
    m.node_eta.assign(state.node_eta.begin(), state.node_eta.begin() + keep + 1);
    if (keep > 0) m.panel_phi.assign(state.panel_phi.begin(), state.panel_phi.begin() + keep);
    double phi_last = state.panel_phi[std::min(keep, state.panel_phi.size() - 1)];
    return base + m.history(2.0 * nu, t, x, eta_t, phi_last);
}

}  // namespace fracdiff::stefan
