#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "fracdiff/laplace.hpp"
#include "fracdiff/specfun.hpp"
#include "oracles.hpp"

using namespace fracdiff;
using laplace::InversionConfig;
using laplace::invert;
using laplace::invert_detailed;
using laplace::invert_log;
using oracles::rel_err;
using cplx = std::complex<double>;

TEST_CASE("unit step: L^-1{1/s}(3.7) = 1") {
    double v = invert([](cplx s) { return 1.0 / s; }, 3.7);
    CHECK(std::abs(v - 1.0) < 1e-10);
}

TEST_CASE("ramp: L^-1{1/s^2}(2) = 2") {
    double v = invert([](cplx s) { return 1.0 / (s * s); }, 2.0);
    CHECK(std::abs(v - 2.0) < 1e-9);
}

TEST_CASE("half-order pulse: L^-1{s^-1/2}(1) = 1/sqrt(pi)") {
    double v = invert([](cplx s) { return std::pow(s, -0.5); }, 1.0);
    CHECK(rel_err(v, 1.0 / std::sqrt(M_PI)) < 1e-9);
}

TEST_CASE("linearity") {
    // the discrete contour sum is exactly linear; only per-term rounding can
    // differ, so a conditioning-safe node count must meet 1e-12
    auto F = [](cplx s) { return 1.0 / (s + 1.0); };
    auto G = [](cplx s) { return 1.0 / (s * s); };
    InversionConfig cfg;
    cfg.node_count = 20;
    for (double t : {0.5, 1.0, 2.5}) {
        double combo = invert([&](cplx s) { return 2.0 * F(s) - 3.0 * G(s); }, t, cfg);
        double parts = 2.0 * invert(F, t, cfg) - 3.0 * invert(G, t, cfg);
        CHECK(std::abs(combo - parts) < 1e-12 * std::max(1.0, std::abs(parts)));
    }
}

TEST_CASE("node-count convergence (within the conditioning noise floor)") {
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
        double prev_err = -1.0;
        for (int n : {16, 32, 64}) {
            InversionConfig cfg;
            cfg.node_count = n;
            auto r = invert_detailed(c.F, c.t, cfg);
            double err = std::abs(r.value - c.exact) / std::abs(c.exact);
            double floor = 50.0 * 2.2e-16 * r.condition();
            if (prev_err >= 0.0) CHECK(err <= std::max(prev_err, floor));
            prev_err = err;
        }
    }
}

TEST_CASE("agreement with the nu = 1/2 closed forms") {
    for (double mu : {0.0, 0.5, 1.0}) {
        for (auto [a, t] : {std::pair{1.0, 1.0}, {2.5, 1.0}, {1.0, 4.0}, {0.3, 0.5}}) {
            double v = invert(
                [mu, a](cplx s) { return std::pow(s, -mu) * std::exp(-a * std::sqrt(s)); }, t);
            CHECK(rel_err(v, specfun::r_closed_form_half(mu, a, t)) < 1e-8);
        }
    }
}

TEST_CASE("log-form evaluator matches the direct one") {
    auto F = [](cplx s) { return 1.0 / (s * s); };
    auto logF = [](cplx s) { return -2.0 * std::log(s); };
    for (double t : {0.4, 2.0})
        CHECK(std::abs(invert(F, t) - invert_log(logF, t)) < 1e-12 * std::max(1.0, t));
}

TEST_CASE("errors") {
    auto F = [](cplx s) { return 1.0 / s; };
    CHECK_THROWS_AS(invert(F, 0.0), DomainError);
    CHECK_THROWS_AS(invert(F, -1.0), DomainError);
    InversionConfig bad;
    bad.node_count = 4;
    CHECK_THROWS_AS(invert(F, 1.0, bad), DomainError);
    // non-finite transform values surface as inversion errors with the node
    CHECK_THROWS_AS(invert([](cplx) { return cplx(std::nan(""), 0.0); }, 1.0),
                    InversionError);
    // a guard below the attainable conditioning always trips
    InversionConfig tight;
    tight.precision_guard = 0.5;
    CHECK_THROWS_AS(invert([](cplx s) { return 1.0 / (s * s); }, 1.0, tight),
                    PrecisionLossError);
}
