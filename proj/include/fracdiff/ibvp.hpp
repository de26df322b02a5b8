#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fracdiff/specfun.hpp"
#include "fracdiff/types.hpp"
#include "fracdiff/volterra.hpp"

namespace fracdiff::ibvp {

enum class DerivativeKind { Caputo, RiemannLiouville };

/// Time-dependent data function; carries an exact power-law representation
/// when one exists so closed-form (Abel) solution routes stay available.
struct TimeFn {
    std::function<double(double)> fn;
    std::optional<SymbolicDensity> symbolic;

    static TimeFn constant(double c);
    static TimeFn from_symbolic(SymbolicDensity d);
    static TimeFn generic(std::function<double(double)> f) { return {std::move(f), std::nullopt}; }

    double operator()(double t) const { return fn(t); }
};

/// Robin boundary row: coeff_u * u + coeff_ux * u_x = data(t).
struct RobinBC {
    double coeff_u;
    double coeff_ux;
    TimeFn data;
};

/// Moving endpoint eta(t), or an infinite endpoint.  Infinite endpoints make
/// R_{mu,nu}(inf, t) = 0, so the corresponding kernel entries and history
/// integrals are dropped rather than approximated by large numbers.
struct BoundaryPath {
    enum class Kind { Finite, MinusInfinity, PlusInfinity };
    Kind kind = Kind::Finite;
    std::function<double(double)> eta;

    static BoundaryPath finite(std::function<double(double)> fn) {
        return {Kind::Finite, std::move(fn)};
    }
    static BoundaryPath constant(double x0) {
        BoundaryPath p{Kind::Finite, [x0](double) { return x0; }};
        p.constant_path = true;
        return p;
    }
    static BoundaryPath minus_infinity() { return {Kind::MinusInfinity, nullptr}; }
    static BoundaryPath plus_infinity() { return {Kind::PlusInfinity, nullptr}; }

    bool finite_path() const { return kind == Kind::Finite; }
    double operator()(double t) const {
        if (!finite_path()) throw DomainError("BoundaryPath: infinite endpoint has no position");
        return eta(t);
    }
    /// true when eta is constant in t (decided by probing; exact for the
    /// constant() factory)
    bool constant_path = false;
};

/// Extension f_ext of the initial data to the whole line, with a declared
/// structure so the initial-data integrals can use the exact tail identity
/// int_a^inf R_{mu,nu} = R_{mu+nu,nu}(a, t) where possible.  Sampled and
/// custom extensions go through adaptive quadrature against r_eval instead.
struct ExtensionFn {
    enum class Tag { Constant, PiecewiseConstant, Sampled, Custom };
    Tag tag = Tag::Constant;
    double value = 0.0;
    /// piecewise: value piece_values[i] on (breaks[i-1], breaks[i]);
    /// piece_values.size() == breaks.size() + 1 with unbounded end pieces
    std::vector<double> breaks;
    std::vector<double> piece_values;
    std::function<double(double)> custom;
    double custom_bound = 0.0;  // sup |f| for quadrature truncation

    static ExtensionFn constant(double c) {
        ExtensionFn f;
        f.tag = Tag::Constant;
        f.value = c;
        return f;
    }
    static ExtensionFn piecewise(std::vector<double> brks, std::vector<double> vals);
    /// linear interpolation through (xs[i], values[i]), continued by the end
    /// values outside the sampled window
    static ExtensionFn sampled(std::vector<double> xs, std::vector<double> values);
    static ExtensionFn custom_fn(std::function<double(double)> fn, double sup_bound);

    double operator()(double x) const;
};

struct IBVPProblem {
    DerivativeKind kind = DerivativeKind::Caputo;
    double nu = 0.5;
    double kappa = 1.0;
    RobinBC left;
    RobinBC right;
    BoundaryPath lower;
    BoundaryPath upper;
    ExtensionFn f_ext;

    void validate() const;
};

struct Mat2 {
    double k11, k12, k21, k22;
};

/// The four kernel entries at (t, tau), 0 <= tau < t, with the conventions:
/// entries mixing a finite and an infinite endpoint vanish; same-endpoint
/// entries of an infinite path degenerate to the pulse kernels
/// (coeff_u/2) delta_{2nu} -+ (coeff_ux/(2 sqrt kappa)) delta_nu.
/// Negative R-arguments (path crossing) raise DomainError.
Mat2 kernel_matrix(const IBVPProblem& p, double t, double tau, const specfun::RConfig& cfg = {});

/// Boundary density: closed-form power-law combination where the solve
/// degenerates to an Abel equation, sampled panel values otherwise.
struct BoundaryDensity {
    std::optional<SymbolicDensity> symbolic;
    std::optional<SampledFn> numeric;  // value on panel (t_{j-1}, t_j] stored at index j

    bool is_zero() const;
};

struct SolveOptions {
    /// skip the closed-form shortcuts and march everything numerically
    bool force_numeric = false;
    double cond_limit = 1e12;
    specfun::RConfig reval{};
};

struct IBVPSolution {
    IBVPProblem problem;
    TimeGrid grid;
    BoundaryDensity phi_minus;
    BoundaryDensity phi_plus;
    std::vector<double> residual_norms;
    double max_residual = 0.0;
    std::string route;
    specfun::RConfig reval{};
};

/// h^{+-}(t): boundary data minus the traces of the initial-data integrals.
/// For constant f_ext the traces reduce by the line-integral identity, so
/// the result stays symbolic whenever the boundary data is.
std::pair<TimeFn, TimeFn> compute_h(const IBVPProblem& p, const specfun::RConfig& cfg = {});

/// Solves for phi^{+-}.  Dispatch: two infinite endpoints -> phi = 0; one
/// infinite endpoint -> decoupled scalar equations (closed-form Abel where
/// the kernel degenerates to pulses); two finite endpoints -> 2x2 Volterra.
IBVPSolution solve(const IBVPProblem& p, const TimeGrid& grid, const SolveOptions& opt = {});

/// u(x,t): initial-data convolution plus the two boundary history integrals.
double eval_u(const IBVPSolution& sol, double x, double t);

/// du/dx(x,t).
double eval_ux(const IBVPSolution& sol, double x, double t);

}  // namespace fracdiff::ibvp
