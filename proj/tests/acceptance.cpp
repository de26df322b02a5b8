// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure.  Tolerances are pinned here, not configurable.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fracdiff/fracquad.hpp"
#include "fracdiff/ibvp.hpp"
#include "fracdiff/specfun.hpp"
#include "fracdiff/stefan.hpp"

using namespace fracdiff;
using namespace fracdiff::specfun;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

// deterministic uniform draws for the randomized criteria
struct Lcg {
    unsigned long long state = 0x9e3779b97f4a7c15ULL;
    double uniform(double lo, double hi) {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return lo + (hi - lo) * (static_cast<double>(state >> 11) / 9007199254740992.0);
    }
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

// 1. closed-form recovery at nu = 1/2 within 1e-8 relative
Outcome criterion_closed_forms() {
    Lcg rng;
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        double a = rng.uniform(0.1, 5.0);
        double t = rng.uniform(0.1, 5.0);
        for (double mu : {0.0, 0.5, 1.0}) {
            double want = r_closed_form_half(mu, a, t);
            double es = std::abs(r_series(FracIndex(mu, 0.5), a, t) - want) / want;
            double el = std::abs(r_laplace(FracIndex(mu, 0.5), a, t) - want) / want;
            worst = std::max({worst, es, el});
        }
    }
    return {worst <= 1e-8, "max relative error " + num(worst) + " (limit 1e-8)"};
}

// 2. cross-route consistency on the 5x4x4x4 grid within 1e-6
Outcome criterion_cross_route() {
    double worst = 0.0;
    for (double nu : {0.1, 0.25, 0.4, 0.5}) {
        for (double mu : {0.0, nu, 2.0 * nu, 1.0 - nu, 1.0}) {
            for (double a : {0.1, 0.8, 2.5, 5.0}) {
                for (double t : {0.1, 0.8, 2.5, 5.0}) {
                    double s = r_series(FracIndex(mu, nu), a, t);
                    double l = r_laplace(FracIndex(mu, nu), a, t);
                    worst = std::max(worst, std::abs(s - l) / std::max(1.0, std::abs(s)));
                    if (mu < 1.0)
                        worst = std::max(
                            worst, std::abs(r_real_integral(FracIndex(mu, nu), a, t) - s));
                }
            }
        }
    }
    return {worst <= 1e-6, "max disagreement " + num(worst) + " (limit 1e-6)"};
}

// 3. identity residual norms drop by >= 2.5 when n doubles 128 -> 256
Outcome criterion_identity_residuals() {
    using namespace fracdiff::fracquad;
    double worst_ratio = 1e300;
    for (double nu : {0.25, 0.4}) {
        double a = (nu == 0.25) ? 4.0 : 2.0;  // start-up transient resolved at n = 128
        for (double mu : {nu, 1.0 - nu, 1.0}) {
            auto i128 = residual_int_eq(FracIndex(mu, nu), a, TimeGrid(1.0, 128));
            auto i256 = residual_int_eq(FracIndex(mu, nu), a, TimeGrid(1.0, 256));
            auto o128 = residual_ode(FracIndex(mu, nu), a, TimeGrid(1.0, 128));
            auto o256 = residual_ode(FracIndex(mu, nu), a, TimeGrid(1.0, 256));
            // norm: max over t >= t_end/32 (start-up window excluded)
            worst_ratio = std::min(worst_ratio, max_norm(i128, 4) / max_norm(i256, 8));
            worst_ratio = std::min(worst_ratio, max_norm(o128, 4) / max_norm(o256, 8));
        }
    }
    return {worst_ratio >= 2.5, "min halving ratio " + num(worst_ratio) + " (needs >= 2.5)"};
}

// 4. derivative, limit, and integral identities of R
Outcome criterion_r_identities() {
    std::string detail;
    bool pass = true;

    double worst_fd = 0.0;
    for (auto [mu, nu, a, t] :
         {std::tuple{0.3, 0.3, 2.0, 1.0}, {0.5, 0.25, 0.5, 2.0}, {1.0, 0.5, 1.0, 1.0},
          {0.8, 0.4, 1.5, 0.7}}) {
        double hs = 1e-5;
        double fd = (r_eval(FracIndex(mu, nu), a + hs, t) -
                     r_eval(FracIndex(mu, nu), a - hs, t)) /
                    (2.0 * hs);
        double an = r_partial_a(FracIndex(mu, nu), a, t);
        worst_fd = std::max(worst_fd, std::abs(an - fd) / std::max(1e-300, std::abs(an)));
    }
    pass = pass && worst_fd <= 1e-5;
    detail += "dR/da " + num(worst_fd) + "; ";

    double worst_zero = 0.0;
    for (double nu : {0.3, 0.5})
        for (double mu : {0.5, 1.0, 1.5})
            for (double t : {0.5, 2.0}) {
                double v = r_eval(FracIndex(mu, nu), 1e-6, t);
                worst_zero = std::max(worst_zero, std::abs(v - delta_mu(mu, t)) / delta_mu(mu, t));
            }
    pass = pass && worst_zero <= 1e-4;
    detail += "a->0 " + num(worst_zero) + "; ";

    double worst_line = 0.0;
    for (auto [mu, nu, t] : {std::tuple{0.5, 0.5, 1.0}, {0.2, 0.3, 2.0}, {1.0, 0.4, 1.0}}) {
        auto [lhs, rhs] = r_line_integral_check(FracIndex(mu, nu), t);
        worst_line = std::max(worst_line, std::abs(2.0 * lhs - 2.0 * rhs));
    }
    pass = pass && worst_line <= 1e-4;
    detail += "line " + num(worst_line) + "; ";

    double worst_tail = 0.0;
    for (auto [mu, nu, a, t] :
         {std::tuple{0.5, 0.5, 1.0, 1.0}, {0.25, 0.25, 2.0, 1.0}, {0.4, 0.4, 0.5, 2.0}}) {
        auto [lhs, rhs] = r_tail_integral_check(FracIndex(mu, nu), a, t);
        worst_tail = std::max(worst_tail, std::abs(lhs - rhs));
    }
    pass = pass && worst_tail <= 1e-5;
    detail += "tail " + num(worst_tail);
    return {pass, detail};
}

// 5. classical limit of the IBVP pipeline at nu = 1/2
Outcome criterion_ibvp_classical() {
    using namespace fracdiff::ibvp;
    auto problem = [](DerivativeKind kind) {
        IBVPProblem p;
        p.kind = kind;
        p.nu = 0.5;
        p.kappa = 1.0;
        p.left = {1.0, 0.0, TimeFn::constant(1.0)};
        p.right = {1.0, 0.0, TimeFn::constant(0.0)};
        p.lower = BoundaryPath::constant(0.0);
        p.upper = BoundaryPath::plus_infinity();
        p.f_ext = ExtensionFn::constant(0.0);
        return p;
    };
    TimeGrid grid(1.0, 256);
    auto ca = solve(problem(DerivativeKind::Caputo), grid);
    auto rl = solve(problem(DerivativeKind::RiemannLiouville), grid);
    double worst = 0.0, worst_pair = 0.0;
    for (int ix = 0; ix < 20; ++ix) {
        double x = 0.05 + (3.0 - 0.05) * ix / 19.0;
        for (int it = 0; it < 10; ++it) {
            double t = 0.1 + 0.9 * it / 9.0;
            double uc = eval_u(ca, x, t);
            double ur = eval_u(rl, x, t);
            worst = std::max(worst, std::abs(uc - std::erfc(x / (2.0 * std::sqrt(t)))));
            worst_pair = std::max(worst_pair, std::abs(uc - ur));
        }
    }
    bool pass = worst <= 1e-3 && worst_pair <= 1e-6;
    return {pass, "max |u - erfc| " + num(worst) + " (limit 1e-3); Caputo-RL gap " +
                      num(worst_pair) + " (limit 1e-6)"};
}

// 6. classical front constant and field
Outcome criterion_neumann() {
    // independent bisection oracle on r sqrt(pi) a erf(a) e^{a^2} = 1
    double lo = 1e-6, hi = 3.0;
    auto f = [](double a) { return std::sqrt(M_PI) * a * std::erf(a) * std::exp(a * a) - 1.0; };
    double flo = f(lo);
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if ((f(mid) < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = f(mid);
        } else {
            hi = mid;
        }
    }
    double oracle = 0.5 * (lo + hi);
    auto sol = stefan::stefan1_solve(0.5, 1.0);
    bool pass = std::abs(sol.alpha - oracle) <= 1e-4 && std::abs(sol.alpha - 0.620063) <= 1e-4;
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        double t = 0.2 + 3.8 * (i % 10) / 9.0;
        double x = sol.eta(t) * (i / 10) / 9.0;
        double want = 1.0 - std::erf(x / (2.0 * std::sqrt(t))) / std::erf(sol.alpha);
        worst = std::max(worst, std::abs(sol.u(x, t) - want));
    }
    pass = pass && worst <= 1e-10;
    return {pass, "alpha " + num(sol.alpha) + " vs oracle " + num(oracle) + "; field error " +
                      num(worst) + " (limit 1e-10)"};
}

// 7. fractional melting identities
Outcome criterion_stefan1_residuals() {
    double worst = 0.0;
    double ts[] = {0.5, 1.0, 2.0};
    for (double nu : {0.25, 0.3, 0.4}) {
        auto rep = stefan::stefan1_residuals(stefan::stefan1_solve(nu, 1.0), ts);
        worst = std::max({worst, rep.max_front_bc, rep.max_stefan});
    }
    return {worst <= 1e-10, "max residual " + num(worst) + " (limit 1e-10)"};
}

// 8. RL ansatz exclusion
Outcome criterion_rl_ansatz() {
    double ts[] = {0.5, 1.0, 2.0};
    auto rep = stefan::rl_ansatz_check(0.3, 0.5, -0.5, ts);
    return {rep.spread > 1e-3, "spread " + num(rep.spread) + " (needs > 1e-3)"};
}

// 9. subcooled marching: coincidence, self-convergence, residuals
Outcome criterion_stefan2() {
    using stefan::stefan2_solve;
    const double t_end = 0.5;
    auto ca64 = stefan2_solve(stefan::DerivativeKind::Caputo, 0.5, 1.0, TimeGrid(t_end, 64));
    auto ca128 = stefan2_solve(stefan::DerivativeKind::Caputo, 0.5, 1.0, TimeGrid(t_end, 128));
    auto ca256 = stefan2_solve(stefan::DerivativeKind::Caputo, 0.5, 1.0, TimeGrid(t_end, 256));
    auto rl256 =
        stefan2_solve(stefan::DerivativeKind::RiemannLiouville, 0.5, 1.0, TimeGrid(t_end, 256));
    double gap = 0.0, resid = 0.0;
    for (int k = 1; k <= 256; ++k) {
        gap = std::max(gap, std::abs(ca256.eta.values[k] - rl256.eta.values[k]));
        resid = std::max({resid, ca256.residual_bc[k], ca256.residual_stefan[k],
                          rl256.residual_bc[k], rl256.residual_stefan[k]});
    }
    double d1 = 0.0, d2 = 0.0;
    for (int k = 1; k <= 64; ++k) {
        d1 = std::max(d1, std::abs(ca64.eta.values[k] - ca128.eta.values[2 * k]));
        d2 = std::max(d2, std::abs(ca128.eta.values[2 * k] - ca256.eta.values[4 * k]));
    }
    double ratio = d1 / d2;
    bool pass = gap <= 5.0 * 1e-10 && ratio >= 1.5 && resid <= 1e-8;
    return {pass, "Caputo-RL gap " + num(gap) + " (limit 5e-10); convergence ratio " +
                      num(ratio) + " (needs >= 1.5); residuals " + num(resid) +
                      " (limit 1e-8)"};
}

// 10. profile demo through the CLI: finite, smooth output
Outcome criterion_profiles() {
    std::string csv = "/tmp/fracdiff_acceptance_profiles.csv";
    std::string cmd = std::string(FRACDIFF_CLI_PATH) +
                      " profiles --a 2.5 --nu 0.3,0.4,0.5 --t-max 5 --count 50 --csv " + csv;
    if (std::system(cmd.c_str()) != 0) return {false, "CLI invocation failed"};
    std::ifstream in(csv);
    if (!in) return {false, "no CSV produced"};
    std::string line;
    std::vector<double> values;
    int rows = 0;
    bool finite = true;
    double prev_t = -1.0;
    std::vector<double> profile;
    double max_kink = 0.0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("family", 0) == 0) continue;
        ++rows;
        std::stringstream ls(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        double t = std::stod(cells[4]), v = std::stod(cells[5]);
        if (!std::isfinite(v)) finite = false;
        if (t < prev_t) profile.clear();  // new profile block
        profile.push_back(v);
        prev_t = t;
        if (profile.size() >= 3) {
            size_t n = profile.size();
            max_kink = std::max(max_kink, std::abs(profile[n - 1] - 2.0 * profile[n - 2] +
                                                   profile[n - 3]));
        }
    }
    bool pass = finite && rows == 3 * 2 * 50 && max_kink < 0.05;
    return {pass, std::to_string(rows) + " rows, finite, max second difference " +
                      num(max_kink)};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> fn;
        double budget_s;
    };
    const Criterion criteria[] = {
        {"closed-form recovery at nu=1/2 (series & inversion, 1e-8 rel)", criterion_closed_forms, 5.0},
        {"cross-route consistency on the (mu,nu,a,t) grid (1e-6)", criterion_cross_route, 30.0},
        {"identity residual halving ratios >= 2.5 (128 -> 256)", criterion_identity_residuals, 60.0},
        {"derivative, limit, and integral identities of R", criterion_r_identities, 30.0},
        {"IBVP classical limit: erfc within 1e-3, Caputo==RL within 1e-6", criterion_ibvp_classical, 60.0},
        {"classical front constant & field (1e-4 / 1e-10)", criterion_neumann, 5.0},
        {"fractional melting identities <= 1e-10", criterion_stefan1_residuals, 10.0},
        {"RL similarity-ansatz exclusion (spread > 1e-3)", criterion_rl_ansatz, 2.0},
        {"subcooled marching: coincidence, convergence, residuals", criterion_stefan2, 120.0},
        {"profile demo: finite, smooth CLI output", criterion_profiles, 30.0},
    };

    int failures = 0;
    int index = 0;
    for (const auto& c : criteria) {
        ++index;
        auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.fn();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool in_budget = secs <= c.budget_s;
        bool ok = out.pass && in_budget;
        if (!ok) ++failures;
        std::printf("%s criterion %d: %s -- %s [%.2fs / budget %.0fs]\n", ok ? "PASS" : "FAIL",
                    index, c.name, out.detail.c_str(), secs, c.budget_s);
        std::fflush(stdout);
    }
    if (failures == 0)
        std::printf("acceptance: all %d criteria passed\n", index);
    else
        std::printf("acceptance: %d of %d criteria FAILED\n", failures, index);
    return failures == 0 ? 0 : 1;
}
