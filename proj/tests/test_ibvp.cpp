#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fracdiff/fracquad.hpp"
#include "fracdiff/ibvp.hpp"
#include "oracles.hpp"

using namespace fracdiff;
using namespace fracdiff::ibvp;
using oracles::rel_err;

namespace {

IBVPProblem half_line_dirichlet(DerivativeKind kind, double nu, double g_left, double f_const) {
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
}

}  // namespace

TEST_CASE("problem validation") {
    auto p = half_line_dirichlet(DerivativeKind::Caputo, 0.4, 1.0, 0.0);
    p.validate();
    auto bad = p;
    bad.nu = 0.7;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = p;
    bad.kappa = 0.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = p;
    bad.left = {0.0, 0.0, TimeFn::constant(0.0)};
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = p;
    bad.lower = BoundaryPath::constant(2.0);
    bad.upper = BoundaryPath::constant(1.0);
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("kernel_matrix values") {
    // bounded domain (0, 1), Dirichlet rows, nu = 1/2: K12 picks up
    // (a/2) R_{1,1/2}(eta+(tau) - eta-(t), t - tau) = erfc(1/2)/2 at gap 1, sigma 1
    IBVPProblem p = half_line_dirichlet(DerivativeKind::Caputo, 0.5, 1.0, 0.0);
    p.upper = BoundaryPath::constant(1.0);
    auto K = kernel_matrix(p, 1.5, 0.5);
    CHECK(rel_err(K.k12, 0.5 * std::erfc(0.5)) < 1e-12);
    CHECK(rel_err(K.k21, 0.5 * std::erfc(0.5)) < 1e-12);
    // same-endpoint entries on constant paths degenerate to the pulses
    CHECK(rel_err(K.k11, 0.5 * specfun::delta_mu(1.0, 1.0)) < 1e-14);
    CHECK(rel_err(K.k22, 0.5 * specfun::delta_mu(1.0, 1.0)) < 1e-14);
    // symmetry of the printed formulas under constant paths and b = d = 0
    auto K2 = kernel_matrix(p, 2.0, 0.7);
    CHECK(K2.k12 == doctest::Approx(K2.k21).epsilon(1e-13));
    CHECK_THROWS_AS(kernel_matrix(p, 0.5, 0.5), DomainError);
    // moving paths that cross raise a domain error
    auto cross = p;
    cross.lower = BoundaryPath::finite([](double t) { return -t; });
    CHECK_THROWS_AS(kernel_matrix(cross, 1.0, 0.2), DomainError);
}

TEST_CASE("compute_h reproduces the bounded-melting reductions") {
    const double u0 = 0.35, nu = 0.3;
    // Caputo: h^-(t) = g^- - a u0 = 1 - u0, constant
    IBVPProblem p = half_line_dirichlet(DerivativeKind::Caputo, nu, 1.0, u0);
    p.upper = BoundaryPath::finite([nu](double t) { return 2.0 * 0.5 * std::pow(t, nu); });
    auto [hm, hp] = compute_h(p);
    REQUIRE(hm.symbolic.has_value());
    CHECK(hm(0.7) == doctest::Approx(1.0 - u0).epsilon(1e-13));
    CHECK(hm(2.3) == doctest::Approx(1.0 - u0).epsilon(1e-13));
    // Riemann-Liouville: h^-(t) = 1 - u0 delta_{2nu}(t)
    p.kind = DerivativeKind::RiemannLiouville;
    auto [hm2, hp2] = compute_h(p);
    REQUIRE(hm2.symbolic.has_value());
    for (double t : {0.5, 1.0, 2.0})
        CHECK(rel_err(hm2(t), 1.0 - u0 * specfun::delta_mu(2.0 * nu, t)) < 1e-13);
    // subcooled setup: g^- = 0, f = -1, upper infinite: h^- = 1, h^+ = -1
    IBVPProblem q = half_line_dirichlet(DerivativeKind::Caputo, nu, 0.0, -1.0);
    q.right = {1.0, 0.0, TimeFn::constant(-1.0)};
    auto [hm3, hp3] = compute_h(q);
    CHECK(hm3(1.3) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(hp3(1.3) == doctest::Approx(-1.0).epsilon(1e-13));
    q.kind = DerivativeKind::RiemannLiouville;
    auto [hm4, hp4] = compute_h(q);
    CHECK(rel_err(hm4(0.8), specfun::delta_mu(2.0 * nu, 0.8)) < 1e-13);
    CHECK(hp4(0.8) == doctest::Approx(-1.0).epsilon(1e-13));
}

TEST_CASE("solve: half-line closed forms") {
    const double nu = 0.4;
    // melting-type setup with f = 0: phi^- = 2 delta_{1-2nu}(t)
    auto p = half_line_dirichlet(DerivativeKind::Caputo, nu, 1.0, 0.0);
    p.right = {1.0, 0.0, TimeFn::constant(0.0)};
    auto sol = solve(p, TimeGrid(1.0, 64));
    REQUIRE(sol.phi_minus.symbolic.has_value());
    REQUIRE(sol.phi_minus.symbolic->terms.size() == 1);
    CHECK(rel_err(sol.phi_minus.symbolic->terms[0].coeff,
                  2.0 / std::tgamma(1.0 - 2.0 * nu)) < 1e-13);
    CHECK(sol.phi_minus.symbolic->terms[0].exponent == doctest::Approx(-2.0 * nu));
    CHECK(sol.phi_plus.is_zero());

    // subcooled right side: h^+ = -1 gives phi^+ = -2 delta_{1-2nu}(t)
    auto q = half_line_dirichlet(DerivativeKind::Caputo, nu, 0.0, -1.0);
    q.right = {1.0, 0.0, TimeFn::constant(-1.0)};
    auto sol2 = solve(q, TimeGrid(1.0, 64));
    REQUIRE(sol2.phi_plus.symbolic.has_value());
    REQUIRE(sol2.phi_plus.symbolic->terms.size() == 1);
    CHECK(rel_err(sol2.phi_plus.symbolic->terms[0].coeff,
                  -2.0 / std::tgamma(1.0 - 2.0 * nu)) < 1e-13);
}

TEST_CASE("pure IVP: constant data is preserved") {
    IBVPProblem p = half_line_dirichlet(DerivativeKind::Caputo, 0.35, 3.0, 3.0);
    p.lower = BoundaryPath::minus_infinity();
    p.upper = BoundaryPath::plus_infinity();
    p.f_ext = ExtensionFn::constant(3.0);
    auto sol = solve(p, TimeGrid(1.0, 32));
    CHECK(sol.route == "pure-ivp");
    for (double x : {-2.0, 0.0, 5.0})
        for (double t : {0.1, 1.0}) {
            CHECK(eval_u(sol, x, t) == doctest::Approx(3.0).epsilon(1e-12));
            CHECK(std::abs(eval_ux(sol, x, t)) < 1e-12);
        }
}

TEST_CASE("classical limit: half-line Dirichlet at nu = 1/2 is erfc") {
    auto p = half_line_dirichlet(DerivativeKind::Caputo, 0.5, 1.0, 0.0);
    auto sol = solve(p, TimeGrid(1.0, 64));
    for (double x : {0.1, 0.5, 1.0, 2.0})
        for (double t : {0.25, 0.5, 1.0})
            CHECK(rel_err(eval_u(sol, x, t), std::erfc(x / (2.0 * std::sqrt(t)))) < 1e-10);
    // the Riemann-Liouville pipeline coincides at nu = 1/2
    auto prl = half_line_dirichlet(DerivativeKind::RiemannLiouville, 0.5, 1.0, 0.0);
    auto solrl = solve(prl, TimeGrid(1.0, 64));
    for (double x : {0.3, 1.2})
        for (double t : {0.3, 0.9})
            CHECK(std::abs(eval_u(sol, x, t) - eval_u(solrl, x, t)) < 1e-12);
    // the numeric march reproduces the same field at its own accuracy
    SolveOptions numeric;
    numeric.force_numeric = true;
    auto soln = solve(p, TimeGrid(1.0, 256), numeric);
    CHECK(soln.route.find("march") != std::string::npos);
    double emax = 0.0;
    for (double x : {0.1, 0.5, 1.0, 2.0})
        for (double t : {0.25, 0.5, 1.0})
            emax = std::max(emax,
                            std::abs(eval_u(soln, x, t) - std::erfc(x / (2.0 * std::sqrt(t)))));
    CHECK(emax < 5e-3);
}

TEST_CASE("two extensions of the same data yield the same solution") {
    // half-line problem, f = 0 on [0, inf); extension A: 0 everywhere;
    // extension B: 5 on (-inf, 0).  h^- changes, phi^- compensates.
    auto pa = half_line_dirichlet(DerivativeKind::Caputo, 0.5, 1.0, 0.0);
    auto pb = pa;
    pb.f_ext = ExtensionFn::piecewise({0.0}, {5.0, 0.0});
    SolveOptions opt;
    auto sa = solve(pa, TimeGrid(1.0, 256), opt);
    auto sb = solve(pb, TimeGrid(1.0, 256), opt);
    double emax = 0.0;
    for (double x : {0.2, 0.8, 1.5})
        for (double t : {0.3, 0.7, 1.0})
            emax = std::max(emax, std::abs(eval_u(sa, x, t) - eval_u(sb, x, t)));
    CHECK(emax < 5e-3);
}

TEST_CASE("eval_ux is consistent with finite differences of eval_u") {
    auto p = half_line_dirichlet(DerivativeKind::Caputo, 0.35, 1.0, 0.2);
    auto sol = solve(p, TimeGrid(1.0, 64));
    for (double x : {0.5, 1.0})
        for (double t : {0.4, 0.9}) {
            double h = 1e-4;
            double fd = (eval_u(sol, x + h, t) - eval_u(sol, x - h, t)) / (2.0 * h);
            double ux = eval_ux(sol, x, t);
            CHECK(rel_err(ux, fd) < 1e-4);
        }
}

TEST_CASE("bounded domain: boundary conditions are met under refinement") {
    IBVPProblem p = half_line_dirichlet(DerivativeKind::Caputo, 0.3, 1.0, 0.0);
    p.upper = BoundaryPath::constant(1.0);
    p.right = {1.0, 0.0, TimeFn::constant(0.0)};
    auto bc_err = [&](int n) {
        auto sol = solve(p, TimeGrid(0.5, n));
        CHECK(sol.route == "two-sided-2x2");
        double m = 0.0;
        for (double t : {0.2, 0.35, 0.5}) {
            m = std::max(m, std::abs(eval_u(sol, 0.0, t) - 1.0));
            m = std::max(m, std::abs(eval_u(sol, 1.0, t) - 0.0));
        }
        return m;
    };
    double e32 = bc_err(32), e64 = bc_err(64);
    CHECK(e64 < e32);
    CHECK(e64 < 5e-2);
}

TEST_CASE("initial condition recovery") {
    // Caputo: u(x, t->0) -> f(x) at interior points
    auto p = half_line_dirichlet(DerivativeKind::Caputo, 0.4, 1.0, 0.7);
    auto sol = solve(p, TimeGrid(1.0, 64));
    CHECK(std::abs(eval_u(sol, 2.0, 1e-4) - 0.7) < 1e-2);
    // Riemann-Liouville: D^{-(1-2nu)} u(x, .) -> f(x) as t -> 0, checked by
    // integrating a sampled slice with the declared power-law start
    const double nu = 0.3;
    auto prl = half_line_dirichlet(DerivativeKind::RiemannLiouville, nu, 1.0, 0.7);
    auto solrl = solve(prl, TimeGrid(1.0, 64));
    const double x = 2.0;
    TimeGrid window(0.02, 64);
    auto slice = fracquad::sample_singular(
        window, [&](double t) { return eval_u(solrl, x, t); },
        {0.7 / std::tgamma(2.0 * nu), 2.0 * nu - 1.0});
    auto I = fracquad::rl_integral(slice, 1.0 - 2.0 * nu);
    CHECK(std::abs(I.values[1] - 0.7) < 1e-2);
    CHECK(std::abs(I.values[4] - 0.7) < 1e-2);
}

TEST_CASE("piecewise initial-data traces match a quadrature oracle") {
    // compute_h assembles the traces from exact tail identities; cross-check
    // them against brute-force Simpson integration of the defining integrals
    IBVPProblem p;
    p.kind = DerivativeKind::Caputo;
    p.nu = 0.3;
    p.kappa = 2.0;
    p.left = {1.0, 0.5, TimeFn::constant(1.0)};  // Robin row exercises both traces
    p.right = {1.0, 0.0, TimeFn::constant(0.0)};
    p.lower = BoundaryPath::constant(0.0);
    p.upper = BoundaryPath::plus_infinity();
    p.f_ext = ExtensionFn::piecewise({-1.0, 0.5}, {2.0, -1.0, 0.5});
    auto [hm, hp] = compute_h(p);
    const double t = 0.8, x = 0.0, sqk = std::sqrt(p.kappa);
    const double mu0 = 1.0 - p.nu, mu1 = 1.0 - 2.0 * p.nu;
    // integrate smooth segments only: split at the data jumps and at xi = x
    const double L = 40.0;
    const double splits[] = {x - L, -1.0, 0.0, 0.5, x + L};
    double i_f = 0.0, i_fx = 0.0;
    for (int seg = 0; seg < 4; ++seg) {
        double lo = splits[seg] + 1e-10, hi = splits[seg + 1] - 1e-10;
        i_f += oracles::simpson(
            [&](double xi) {
                double z = std::abs(x - xi) / sqk;
                return specfun::r_eval(FracIndex(mu0, p.nu), z, t) / (2.0 * sqk) * p.f_ext(xi);
            },
            lo, hi, 6000);
        double sign = (lo > x) ? 1.0 : -1.0;
        i_fx += sign * oracles::simpson(
                           [&](double xi) {
                               double z = std::abs(xi - x) / sqk;
                               return specfun::r_eval(FracIndex(mu1, p.nu), z, t) /
                                      (2.0 * p.kappa) * p.f_ext(xi);
                           },
                           lo, hi, 6000);
    }
    double want = 1.0 - 1.0 * i_f - 0.5 * i_fx;
    CHECK(std::abs(hm(t) - want) < 1e-6);
}

TEST_CASE("Neumann boundary data: classical flux solution at nu = 1/2") {
    // u_x(0,t) = -1 on the half line with zero initial data has the closed
    // form u = 2 sqrt(t/pi) e^{-x^2/4t} - x erfc(x/(2 sqrt t))
    IBVPProblem p;
    p.kind = DerivativeKind::Caputo;
    p.nu = 0.5;
    p.kappa = 1.0;
    p.left = {0.0, 1.0, TimeFn::constant(-1.0)};
    p.right = {1.0, 0.0, TimeFn::constant(0.0)};
    p.lower = BoundaryPath::constant(0.0);
    p.upper = BoundaryPath::plus_infinity();
    p.f_ext = ExtensionFn::constant(0.0);
    auto sol = solve(p, TimeGrid(1.0, 256));
    double emax = 0.0;
    auto closed = [](double x, double t) {
        return 2.0 * std::sqrt(t / M_PI) * std::exp(-x * x / (4.0 * t)) -
               x * std::erfc(x / (2.0 * std::sqrt(t)));
    };
    for (double x : {0.2, 0.6, 1.2})
        for (double t : {0.4, 0.7, 1.0})
            emax = std::max(emax, std::abs(eval_u(sol, x, t) - closed(x, t)));
    CHECK(emax < 5e-3);
}

TEST_CASE("Robin rows on a bounded domain: BC residuals shrink") {
    // dissipative orientation (left flux coefficient negative, right
    // positive): the two singular kernel terms share a sign and the march is
    // stable
    IBVPProblem p;
    p.kind = DerivativeKind::Caputo;
    p.nu = 0.35;
    p.kappa = 1.5;
    p.left = {1.0, -0.3, TimeFn::constant(1.0)};
    p.right = {1.0, 0.2, TimeFn::constant(0.0)};
    p.lower = BoundaryPath::constant(0.0);
    p.upper = BoundaryPath::constant(1.0);
    p.f_ext = ExtensionFn::constant(0.5);
    auto bc_err = [&](int n) {
        auto sol = solve(p, TimeGrid(0.5, n));
        double m = 0.0;
        for (double t : {0.2, 0.35, 0.5}) {
            m = std::max(m, std::abs(eval_u(sol, 0.0, t) - 0.3 * eval_ux(sol, 0.0, t) - 1.0));
            m = std::max(m, std::abs(eval_u(sol, 1.0, t) + 0.2 * eval_ux(sol, 1.0, t)));
        }
        return m;
    };
    double e32 = bc_err(32), e64 = bc_err(64);
    CHECK(e64 < e32);
    CHECK(e64 < 0.1);
}

TEST_CASE("anti-dissipative Robin rows are reported as ill-posed, not returned") {
    // with the signs flipped the first-panel weight nearly cancels and the
    // explicit march amplifies geometrically; the backward-error guard must
    // surface that instead of returning garbage
    IBVPProblem p;
    p.kind = DerivativeKind::Caputo;
    p.nu = 0.35;
    p.kappa = 1.5;
    p.left = {1.0, 0.3, TimeFn::constant(1.0)};
    p.right = {1.0, -0.2, TimeFn::constant(0.0)};
    p.lower = BoundaryPath::constant(0.0);
    p.upper = BoundaryPath::constant(1.0);
    p.f_ext = ExtensionFn::constant(0.5);
    CHECK_THROWS_AS(solve(p, TimeGrid(0.5, 64)), IllPosedError);
}

TEST_CASE("random bounded problems keep solver-level backward error") {
    oracles::Lcg rng(777);
    for (int trial = 0; trial < 3; ++trial) {
        IBVPProblem p;
        p.kind = (trial % 2 == 0) ? DerivativeKind::Caputo : DerivativeKind::RiemannLiouville;
        p.nu = rng.uniform(0.2, 0.5);
        p.kappa = rng.uniform(0.5, 2.0);
        p.left = {rng.uniform(0.5, 2.0), rng.uniform(-0.4, 0.0),
                  TimeFn::constant(rng.uniform(-1.0, 1.0))};
        p.right = {rng.uniform(0.5, 2.0), rng.uniform(0.0, 0.4),
                   TimeFn::constant(rng.uniform(-1.0, 1.0))};
        p.lower = BoundaryPath::constant(0.0);
        p.upper = BoundaryPath::constant(rng.uniform(0.8, 1.6));
        p.f_ext = ExtensionFn::constant(rng.uniform(-0.5, 0.5));
        auto sol = solve(p, TimeGrid(0.5, 48));
        CHECK(sol.max_residual < 1e-7);
    }
}

TEST_CASE("sampled extension goes through the quadrature trace") {
    // a hat profile sampled on a grid; compare h^- against Simpson applied to
    // the same interpolant
    IBVPProblem p;
    p.kind = DerivativeKind::Caputo;
    p.nu = 0.35;
    p.kappa = 1.0;
    p.left = {1.0, 0.0, TimeFn::constant(0.0)};
    p.right = {1.0, 0.0, TimeFn::constant(0.0)};
    p.lower = BoundaryPath::constant(0.0);
    p.upper = BoundaryPath::plus_infinity();
    std::vector<double> xs, vs;
    for (int i = 0; i <= 60; ++i) {
        double x = -3.0 + 6.0 * i / 60.0;
        xs.push_back(x);
        vs.push_back(std::max(0.0, 1.0 - std::abs(x)));
    }
    p.f_ext = ExtensionFn::sampled(xs, vs);
    auto [hm, hp] = compute_h(p);
    const double t = 0.6, mu0 = 1.0 - p.nu;
    double oracle = 0.0;
    for (double lo : {-1.0, 0.0}) {
        oracle += oracles::simpson(
            [&](double xi) {
                double z = std::abs(xi);
                return specfun::r_eval(FracIndex(mu0, p.nu), z, t) / 2.0 * p.f_ext(xi);
            },
            lo + 1e-9, lo + 1.0 - 1e-9, 4000);
    }
    CHECK(std::abs(hm(t) - (0.0 - oracle)) < 1e-6);
}

TEST_CASE("moving bounded domain: shrinking upper path") {
    IBVPProblem p;
    p.kind = DerivativeKind::Caputo;
    p.nu = 0.4;
    p.kappa = 1.0;
    p.left = {1.0, 0.0, TimeFn::constant(1.0)};
    p.right = {1.0, 0.0, TimeFn::constant(0.0)};
    p.lower = BoundaryPath::constant(0.0);
    p.upper = BoundaryPath::finite([](double t) { return 1.0 - 0.5 * t; });
    p.f_ext = ExtensionFn::constant(0.0);
    auto bc_err = [&](int n) {
        auto sol = solve(p, TimeGrid(0.5, n));
        double m = 0.0;
        for (double t : {0.2, 0.35, 0.5}) {
            m = std::max(m, std::abs(eval_u(sol, 0.0, t) - 1.0));
            m = std::max(m, std::abs(eval_u(sol, 1.0 - 0.5 * t, t)));
        }
        return m;
    };
    double e32 = bc_err(32), e64 = bc_err(64);
    CHECK(e64 < e32);
    CHECK(e64 < 5e-2);
}

TEST_CASE("mixed pulse kernel at an infinite endpoint vs inversion oracle") {
    // c = d = 1 at the upper infinite endpoint: the density solves
    // (1/2) I^{2nu} phi + (1/2) I^{nu} phi = t, i.e. in transform space
    // Phi(s) = 2 s^{2nu-2}/(1 + s^nu) -- invertible independently through the
    // contour engine
    const double nu = 0.3;
    IBVPProblem p;
    p.kind = DerivativeKind::Caputo;
    p.nu = nu;
    p.kappa = 1.0;
    p.left = {1.0, 0.0, TimeFn::constant(1.0)};
    p.right = {1.0, 1.0, ibvp::TimeFn::from_symbolic(SymbolicDensity{{{1.0, 1.0}}, 0.0})};
    p.lower = BoundaryPath::constant(0.0);
    p.upper = BoundaryPath::plus_infinity();
    p.f_ext = ExtensionFn::constant(0.0);
    auto density_err = [&](int n) {
        auto sol = solve(p, TimeGrid(1.0, n));
        REQUIRE(sol.phi_plus.numeric.has_value());
        const auto& phi = *sol.phi_plus.numeric;
        double worst = 0.0;
        for (int j = n / 8; j <= n; j += n / 16) {
            double mid = 0.5 * (phi.grid.node(j - 1) + phi.grid.node(j));
            double want = laplace::invert(
                [nu](std::complex<double> s) {
                    return 2.0 * std::pow(s, 2.0 * nu - 2.0) / (1.0 + std::pow(s, nu));
                },
                mid);
            worst = std::max(worst, std::abs(phi.values[j] - want));
        }
        return worst;
    };
    double e128 = density_err(128), e256 = density_err(256);
    CHECK(e256 < 2e-2);
    CHECK(e128 / e256 > 1.5);
}

TEST_CASE("eval domain checks") {
    auto p = half_line_dirichlet(DerivativeKind::Caputo, 0.5, 1.0, 0.0);
    auto sol = solve(p, TimeGrid(1.0, 32));
    CHECK_THROWS_AS(eval_u(sol, -0.5, 0.5), DomainError);
    CHECK_THROWS_AS(eval_u(sol, 0.5, 0.0), DomainError);
    // boundary evaluation itself must not produce NaN (the tau -> t limit
    // forms take over)
    CHECK(std::isfinite(eval_u(sol, 0.0, 0.5)));
    CHECK(eval_u(sol, 0.0, 0.5) == doctest::Approx(1.0).epsilon(1e-9));
}
