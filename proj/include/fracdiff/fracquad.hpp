#pragma once

#include <functional>

#include "fracdiff/specfun.hpp"
#include "fracdiff/types.hpp"

namespace fracdiff::fracquad {

/// Sample fn on the grid; value_at_zero supplies f(0) when fn is not
/// evaluable there (e.g. a limit).
SampledFn sample(const TimeGrid& grid, const std::function<double(double)>& fn,
                 double value_at_zero);

/// Sample a function behaving like coeff * t^exponent near 0 (exponent in
/// (-1,0)); node 0 is left unset and the singularity is recorded.
SampledFn sample_singular(const TimeGrid& grid, const std::function<double(double)>& fn,
                          const PowerTerm& origin);

/// Riemann-Liouville fractional integral of order mu > 0 by product
/// integration: piecewise-linear interpolation of f against exact moments of
/// the kernel (t - tau)^{mu-1}/Gamma(mu).  Second order for smooth f; mu = 1
/// collapses to the trapezoidal rule exactly.  Inputs singular at 0 must
/// carry the power-law descriptor: the first panel is then integrated
/// analytically against t^p.
SampledFn rl_integral(const SampledFn& f, double mu);

/// Caputo derivative of order mu in (0,1) by the L1 scheme.  Node 0 is
/// flagged unset.  Requires f(0) finite.
SampledFn caputo_derivative(const SampledFn& f, double mu);

/// Riemann-Liouville derivative of order mu in (0,1): second-order numerical
/// differentiation of rl_integral(f, 1-mu).  Differs from the Caputo
/// derivative by f(0) delta_{1-mu}(t).
SampledFn rl_derivative(const SampledFn& f, double mu);

/// Residual of a nu D^{-(1-nu)} y = t y - mu int_0^t y with y = R_{mu,nu}(a, .)
/// sampled via r_eval.  Requires mu > 0 (the mu = 0 member is singular at the
/// origin) and nu <= 1/2.
SampledFn residual_int_eq(FracIndex idx, double a, const TimeGrid& grid,
                          const specfun::RConfig& cfg = {});

/// Same residual evaluator on an externally supplied sample.
SampledFn residual_int_eq_sampled(const SampledFn& y, FracIndex idx, double a);

/// Residual of a nu D^nu_C y = t y' + (1 - mu) y with y sampled via r_eval;
/// y' by central differences (one-sided at the last node).
SampledFn residual_ode(FracIndex idx, double a, const TimeGrid& grid,
                       const specfun::RConfig& cfg = {});
SampledFn residual_ode_sampled(const SampledFn& y, FracIndex idx, double a);

/// max_k |f_k| over nodes k >= from, skipping unset nodes.
double max_norm(const SampledFn& f, int from = 1);

}  // namespace fracdiff::fracquad
