#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "fracdiff/types.hpp"

namespace fracdiff::volterra {

/// Weak diagonal singularity of a kernel entry:
/// K(t, t - s) ~ limit(t) * s^exponent as s -> 0+, exponent in (-1, 0].
struct DiagonalSingularity {
    double exponent;
    std::function<double(double)> limit;
};

/// One entry of the 2x2 kernel matrix.  eval(t, tau) must be finite for
/// 0 <= tau < t except for the declared diagonal power law.
struct KernelEntry {
    std::function<double(double, double)> eval;
    std::optional<DiagonalSingularity> singularity;
    bool zero = false;

    static KernelEntry none() { return KernelEntry{nullptr, std::nullopt, true}; }
    static KernelEntry smooth(std::function<double(double, double)> k) {
        return KernelEntry{std::move(k), std::nullopt, false};
    }
    static KernelEntry singular(std::function<double(double, double)> k, double exponent,
                                std::function<double(double)> limit) {
        return KernelEntry{std::move(k), DiagonalSingularity{exponent, std::move(limit)}, false};
    }
};

struct KernelMatrix {
    KernelEntry k11, k12, k21, k22;
};

struct VolterraSolution {
    TimeGrid grid;
    SampledFn phi_minus;
    SampledFn phi_plus;
    /// max |backward residual| per node over both equations
    std::vector<double> residual_norms;
    double max_residual = 0.0;
};

/// Exact integral of K(t, .) over the panel [tau_lo, tau_hi] (tau_hi <= t),
/// by the product-integration rule: for singular entries the bounded factor
/// g(s) = K(t, t-s) s^{-p} is interpolated linearly against exact moments of
/// s^p; smooth entries use 2-point Gauss.
double panel_integral(const KernelEntry& k, double t, double tau_lo, double tau_hi);

/// Block time-marching product-integration solver for the pair of first-kind
/// equations int_0^t K_i1 phi^- + K_i2 phi^+ = h_i, with piecewise-constant
/// densities per panel.  phi at t_0 is extrapolated, never solved.
/// IllPosedError names the node when a 2x2 block's condition estimate exceeds
/// cond_limit, or when the backward error of the marched solution exceeds
/// backward_tol * max(1, |h|_inf) -- the signature of a marginally singular
/// diagonal weight amplifying geometrically (e.g. a Robin row whose two
/// singular kernel terms cancel on the first panel).
VolterraSolution solve_first_kind(const KernelMatrix& K, const SampledFn& h_minus,
                                  const SampledFn& h_plus, const TimeGrid& grid,
                                  double cond_limit = 1e12, double backward_tol = 1e-6);

/// Scalar variant: int_0^t K phi = h.
SampledFn solve_first_kind_scalar(const KernelEntry& K, const SampledFn& h, const TimeGrid& grid,
                                  double cond_limit = 1e12, std::vector<double>* residuals = nullptr,
                                  double backward_tol = 1e-6);

/// Abel inversion: solves D^{-order} phi = g for phi = D^{order} g in closed
/// form on the power-law algebra; order in (0, 1].  A term c t^q maps to
/// c Gamma(q+1)/Gamma(q+1-order) t^{q-order}; q = order - 1 yields a Dirac
/// mass.  Structures that would leave exponents <= -1 are rejected.
SymbolicDensity abel_invert(const SymbolicDensity& g, double order);

/// Numeric Abel inversion via fracquad.rl_derivative (order in (0,1)).
SampledFn abel_invert(const SampledFn& g, double order);

}  // namespace fracdiff::volterra
