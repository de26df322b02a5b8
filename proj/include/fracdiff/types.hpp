#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracdiff {

// ---------------------------------------------------------------------------
// Errors

/// Precondition violations (invalid orders, nonpositive times, ...).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Raised when a quantity only exists as a distribution (Dirac mass) and a
/// pointwise value was requested.
class SymbolicOnlyError : public DomainError {
public:
    explicit SymbolicOnlyError(const std::string& what) : DomainError(what) {}
};

/// Series or quadrature failed to reach the requested tolerance.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical Laplace inversion failure (overflow / NaN on the contour).
class InversionError : public ConvergenceError {
public:
    explicit InversionError(const std::string& what) : ConvergenceError(what) {}
};

/// Contour sum lost too many digits to cancellation.
class PrecisionLossError : public InversionError {
public:
    explicit PrecisionLossError(const std::string& what) : InversionError(what) {}
};

/// A discrete Volterra block became numerically singular.
class IllPosedError : public std::runtime_error {
public:
    explicit IllPosedError(const std::string& what) : std::runtime_error(what) {}
};

/// Problem class the solution theory excludes (e.g. the similarity ansatz
/// for the Riemann-Liouville moving-boundary problem at nu < 1/2).
class UnsupportedProblemError : public std::runtime_error {
public:
    explicit UnsupportedProblemError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Orders

/// Index pair (mu, nu) of the auxiliary function family R_{mu,nu}(a,t).
/// mu >= 0 and 0 < nu <= 1; the series and real-axis integral routes
/// additionally require nu <= 1/2.
struct FracIndex {
    double mu;
    double nu;

    FracIndex(double mu_, double nu_) : mu(mu_), nu(nu_) {
        if (!(mu >= 0.0) || !std::isfinite(mu))
            throw DomainError("FracIndex: mu must be finite and >= 0, got " + std::to_string(mu_));
        if (!(nu > 0.0) || !(nu <= 1.0))
            throw DomainError("FracIndex: nu must lie in (0, 1], got " + std::to_string(nu_));
    }
};

/// Stopping control for the Wright-type series.
struct SeriesConfig {
    int max_terms = 400;
    double rel_tol = 1e-12;
    double abs_tol = 1e-14;

    void validate() const {
        if (max_terms < 1) throw DomainError("SeriesConfig: max_terms must be >= 1");
        if (!(rel_tol > 0.0) || !std::isfinite(rel_tol) ||
            !(abs_tol > 0.0) || !std::isfinite(abs_tol))
            throw DomainError("SeriesConfig: tolerances must be finite and positive");
    }
};

// ---------------------------------------------------------------------------
// Power-law pulses and symbolic densities

/// The pulse delta_mu(t) = t^{mu-1}/Gamma(mu) for mu > 0, or the Dirac mass
/// at t = 0 for mu = 0.  The Dirac variant is never evaluated pointwise; it
/// only participates in convolution algebra.
struct PowerLawPulse {
    double mu;

    bool is_dirac() const { return mu == 0.0; }

    double coefficient() const;  // 1/Gamma(mu), mu > 0
    double exponent() const { return mu - 1.0; }

    double operator()(double t) const;
};

/// One term coeff * t^exponent of a power-law combination (exponent > -1).
struct PowerTerm {
    double coeff;
    double exponent;

    double operator()(double t) const { return coeff * std::pow(t, exponent); }
};

/// Finite linear combination of power laws plus an optional Dirac mass at
/// t = 0.  This is the closed form the boundary densities phi^{+-} take when
/// the Volterra kernels degenerate to pure pulses.
struct SymbolicDensity {
    std::vector<PowerTerm> terms;
    double dirac_weight = 0.0;

    /// scale * delta_mu(t) as a symbolic density.
    static SymbolicDensity scaled_pulse(double scale, double mu);
    static SymbolicDensity constant(double c) { return SymbolicDensity{{{c, 0.0}}, 0.0}; }
    static SymbolicDensity zero() { return SymbolicDensity{}; }

    bool has_dirac() const { return dirac_weight != 0.0; }
    bool is_zero() const { return terms.empty() && dirac_weight == 0.0; }

    /// Pointwise value of the regular part at t > 0 (Dirac part excluded).
    double eval(double t) const;

    SymbolicDensity& operator+=(const SymbolicDensity& other);
    SymbolicDensity scaled(double s) const;
};

// ---------------------------------------------------------------------------
// Sampled time functions

/// Uniform time grid t_k = k h, h = t_end/n_steps.
struct TimeGrid {
    double t_end;
    int n_steps;

    TimeGrid(double t_end_, int n_steps_) : t_end(t_end_), n_steps(n_steps_) {
        if (!(t_end > 0.0) || !std::isfinite(t_end))
            throw DomainError("TimeGrid: t_end must be finite and positive");
        if (n_steps < 2) throw DomainError("TimeGrid: n_steps must be >= 2");
    }

    double h() const { return t_end / n_steps; }
    double node(int k) const { return t_end * k / n_steps; }
    int size() const { return n_steps + 1; }

    bool operator==(const TimeGrid& o) const {
        return t_end == o.t_end && n_steps == o.n_steps;
    }
};

/// Function sampled on a TimeGrid.  values[0] may be flagged unset, either
/// because the function blows up at t = 0 like coeff * t^p with p in (-1,0)
/// (origin_singularity set) or because a discrete operator does not define a
/// value there (first_node_unset).
struct SampledFn {
    TimeGrid grid;
    std::vector<double> values;
    std::optional<PowerTerm> origin_singularity;
    bool first_node_unset = false;

    explicit SampledFn(const TimeGrid& g)
        : grid(g), values(static_cast<size_t>(g.size()), 0.0) {}

    SampledFn(const TimeGrid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
        if (values.size() != static_cast<size_t>(g.size()))
            throw DomainError("SampledFn: values length must equal n_steps + 1");
    }

    bool value_at_zero_known() const {
        return !origin_singularity.has_value() && !first_node_unset;
    }

    double max_abs(int from = 0) const {
        double m = 0.0;
        for (size_t k = static_cast<size_t>(from); k < values.size(); ++k)
            if (std::isfinite(values[k])) m = std::max(m, std::abs(values[k]));
        return m;
    }
};

inline constexpr double quiet_nan = std::numeric_limits<double>::quiet_NaN();

}  // namespace fracdiff
