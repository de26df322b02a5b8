#pragma once

#include <span>
#include <vector>

#include "fracdiff/ibvp.hpp"
#include "fracdiff/specfun.hpp"
#include "fracdiff/types.hpp"

namespace fracdiff::stefan {

using ibvp::DerivativeKind;

struct Stefan1Config {
    double bracket_lo = 1e-6;
    double bracket_hi = 8.0;
    int scan_points = 200;
    double root_tol = 1e-13;
    specfun::RConfig reval{};
};

/// Similarity constant of the melting problem: the root alpha > 0 of
///   (2 alpha r Gamma(1+nu)/Gamma(1-nu)) [1 - W(-2 alpha; -nu, 1)]
///     = W(-2 alpha; -nu, 1-nu).
/// Bracketing scan plus bisection; multiple sign changes raise an ambiguity
/// error listing the brackets.
double stefan1_alpha(double nu, double r, const Stefan1Config& cfg = {});

/// Closed-form solution of the bounded-domain moving-boundary problem:
///   u(x,t) = (R_{1,nu}(x,t) - W) / (1 - W),  eta(t) = 2 alpha t^nu,
/// with W = W(-2 alpha; -nu, 1) and u0 = -W/(1 - W).
struct Stefan1Solution {
    double nu;
    double r;
    double alpha;
    double u0;
    double wright_at_front;  // W(-2 alpha; -nu, 1)
    specfun::RConfig reval{};

    double eta(double t) const;
    /// D^{2nu} eta(t) = 2 alpha Gamma(1+nu) t^-nu / Gamma(1-nu) (same for
    /// Caputo and Riemann-Liouville since eta(0) = 0)
    double eta_frac_derivative(double t) const;
    double u(double x, double t) const;
    double ux(double x, double t) const;
};

/// kind = RiemannLiouville with nu < 1/2 is rejected: the similarity ansatz
/// demonstrably fails there (see rl_ansatz_check); nu = 1/2 coincides with
/// the Caputo solution and is permitted.
Stefan1Solution stefan1_solve(double nu, double r, DerivativeKind kind = DerivativeKind::Caputo,
                              const Stefan1Config& cfg = {});

/// Convenience inverse: given u0 < 0, solve for alpha and the ratio r.
struct Stefan1Inverse {
    double alpha;
    double r;
};
Stefan1Inverse stefan1_from_u0(double nu, double u0, const Stefan1Config& cfg = {});

struct Stefan1Residuals {
    std::vector<double> t;
    std::vector<double> front_bc;      // |R_{1,nu}(eta(t),t) + u0/(1-u0)|
    std::vector<double> stefan_cond;   // |-r D^{2nu} eta + (1-u0) R_{1-nu,nu}(eta(t),t)|
    double max_front_bc = 0.0;
    double max_stefan = 0.0;
};
Stefan1Residuals stefan1_residuals(const Stefan1Solution& sol, std::span<const double> t_samples);

/// Certifies numerically that the similarity ansatz cannot satisfy the
/// Riemann-Liouville front condition for nu < 1/2: the quantity
///   W(-2a;-nu,1) - u0 t^{2nu-1} W(-2a;-nu,2nu) + u0 t^{2nu-1}/Gamma(2nu)
/// would have to vanish identically in t, and its spread over the samples is
/// reported.  u0 = 0 is the degenerate exception.
struct RlAnsatzReport {
    std::vector<double> t;
    std::vector<double> value;
    double spread = 0.0;
    bool degenerate_u0 = false;
};
RlAnsatzReport rl_ansatz_check(double nu, double alpha, double u0,
                               std::span<const double> t_samples,
                               const specfun::RConfig& cfg = {});

struct Stefan2Config {
    int first_step_subcycles = 4;
    int newton_max_iter = 50;
    double newton_tol = 1e-10;
    double damping = 0.5;
    specfun::RConfig reval{};
};

/// Discrete trajectory of the half-line ablation problem: left boundary
/// density phi^- and front eta marched together, each step solving the
/// 2-unknown nonlinear system (discretized left BC, discretized fractional
/// Stefan condition) by damped Newton with a finite-difference Jacobian.
struct Stefan2State {
    DerivativeKind kind;
    double nu;
    double r;
    TimeGrid grid;
    SampledFn eta;
    SampledFn phi_minus;
    std::vector<double> residual_bc;      // per main node
    std::vector<double> residual_stefan;  // per main node
    bool eta_monotone = true;
    specfun::RConfig reval{};

    // internal marching data (first main panel may be subcycled):
    // node_t.size() == node_eta.size() == panel_phi.size() + 1
    std::vector<double> node_t;
    std::vector<double> node_eta;
    std::vector<double> panel_phi;

    /// piecewise-linear interpolant of the front
    double eta_at(double t) const;
};

Stefan2State stefan2_solve(DerivativeKind kind, double nu, double r, const TimeGrid& grid,
                           const Stefan2Config& cfg = {});

/// u(x,t) for x >= eta(t):
///   -1 (Caputo) or -delta_{2nu}(t) (RL)
///   + int_0^t (1/2) R_{2nu,nu}(x - eta(tau), t - tau) phi^-(tau) dtau.
double stefan2_eval_u(const Stefan2State& state, double x, double t);

}  // namespace fracdiff::stefan
