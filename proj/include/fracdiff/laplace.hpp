#pragma once

#include <complex>
#include <functional>

#include "fracdiff/types.hpp"

namespace fracdiff::laplace {

/// Talbot contour control.  The contour is the cotangent deformation
/// s(theta) = r theta (cot theta + i), theta in (-pi, pi), sampled by the
/// trapezoidal rule at node_count points, with radius r = contour_scale *
/// 2 node_count / (5 t).
struct InversionConfig {
    int node_count = 32;
    double contour_scale = 1.0;
    /// Maximum tolerated ratio sum|term| / |result| before the inversion is
    /// declared precision-lossy.
    double precision_guard = 1e12;

    void validate() const {
        if (node_count < 8) throw DomainError("InversionConfig: node_count must be >= 8");
        if (!(contour_scale > 0.0)) throw DomainError("InversionConfig: contour_scale must be > 0");
    }
};

struct InversionResult {
    double value = 0.0;
    /// Sum of |terms| of the contour sum; abs_sum/|value| estimates the
    /// cancellation (condition) of the inversion.
    double abs_sum = 0.0;
    double condition() const {
        return abs_sum / std::max(std::abs(value), 1e-30);
    }
};

using Transform = std::function<std::complex<double>(std::complex<double>)>;

/// Inverts F at time t > 0.  F must be analytic on and to the right of the
/// contour; s^nu-type branch points at the origin are fine.  Principal
/// branch convention: arg s in (-pi, pi].
InversionResult invert_detailed(const Transform& F, double t, const InversionConfig& cfg = {});
double invert(const Transform& F, double t, const InversionConfig& cfg = {});

/// Same contour sum but with the transform supplied as log F(s), so terms
/// are formed as exp(t s + log F(s)).  Use this for transforms that over- or
/// underflow when evaluated directly (e.g. exp(-a s^nu) with nu > 1/2).
InversionResult invert_log_detailed(const Transform& logF, double t, const InversionConfig& cfg = {});
double invert_log(const Transform& logF, double t, const InversionConfig& cfg = {});

}  // namespace fracdiff::laplace
