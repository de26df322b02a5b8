#include "fracdiff/volterra.hpp"

#include <cmath>
#include <string>

#include "fracdiff/fracquad.hpp"
#include "fracdiff/specfun.hpp"

namespace fracdiff::volterra {

namespace {

// 2-point Gauss-Legendre on [lo, hi]
double gauss2(const std::function<double(double, double)>& k, double t, double lo, double hi) {
    const double c = 0.5 * (lo + hi), hw = 0.5 * (hi - lo);
    const double x = hw / std::sqrt(3.0);
    return hw * (k(t, c - x) + k(t, c + x));
}

}  // namespace

double panel_integral(const KernelEntry& k, double t, double tau_lo, double tau_hi) {
    if (k.zero) return 0.0;
    if (!(tau_hi > tau_lo)) throw DomainError("panel_integral: empty panel");
    if (!(tau_hi <= t + 1e-15 * std::max(1.0, t)))
        throw DomainError("panel_integral: panel must lie left of the observation time");
    if (!k.singularity) return gauss2(k.eval, t, tau_lo, tau_hi);

    const double p = k.singularity->exponent;
    if (!(p > -1.0)) throw DomainError("panel_integral: singular exponent must be > -1");
    // sigma = t - tau; integrate g(sigma) sigma^p with g linear on the panel
    const double s_lo = t - tau_hi;
    const double s_hi = t - tau_lo;
    double g_hi = k.eval(t, tau_lo) * std::pow(s_hi, -p);
    double g_lo = (s_lo <= 0.0) ? k.singularity->limit(t) : k.eval(t, tau_hi) * std::pow(s_lo, -p);
    const double m0 = (std::pow(s_hi, p + 1.0) - std::pow(s_lo, p + 1.0)) / (p + 1.0);
    const double m1 = (std::pow(s_hi, p + 2.0) - std::pow(s_lo, p + 2.0)) / (p + 2.0);
    const double width = s_hi - s_lo;
    // linear interpolation g(sigma) = g_lo + (g_hi - g_lo)(sigma - s_lo)/width
    return g_lo * m0 + (g_hi - g_lo) * (m1 - s_lo * m0) / width;
}

namespace {

struct Block2 {
    double a11, a12, a21, a22;

    double cond_estimate() const {
        double det = a11 * a22 - a12 * a21;
        double norm = std::max(std::abs(a11) + std::abs(a12), std::abs(a21) + std::abs(a22));
        if (det == 0.0) return std::numeric_limits<double>::infinity();
        double inv_norm =
            std::max(std::abs(a22) + std::abs(a12), std::abs(a21) + std::abs(a11)) / std::abs(det);
        return norm * inv_norm;
    }

    void solve(double b1, double b2, double& x1, double& x2) const {
        double det = a11 * a22 - a12 * a21;
        x1 = (b1 * a22 - b2 * a12) / det;
        x2 = (a11 * b2 - a21 * b1) / det;
    }
};

}  // namespace

VolterraSolution solve_first_kind(const KernelMatrix& K, const SampledFn& h_minus,
                                  const SampledFn& h_plus, const TimeGrid& grid,
                                  double cond_limit, double backward_tol) {
    if (!(h_minus.grid == grid) || !(h_plus.grid == grid))
        throw DomainError("solve_first_kind: right-hand sides must live on the solve grid");
    const int n = grid.n_steps;
    SampledFn phi_m(grid), phi_p(grid);
    std::vector<double> residuals(static_cast<size_t>(n + 1), 0.0);

    // Panel weights are kernel- and node-specific since the kernels depend on
    // t and tau separately through the boundary paths; cache the rows so the
    // backward-error pass does not re-evaluate them.
    struct Row4 {
        std::vector<double> w11, w12, w21, w22;
    };
    std::vector<Row4> weights(static_cast<size_t>(n + 1));

    for (int node = 1; node <= n; ++node) {
        const double t = grid.node(node);
        Row4& row = weights[node];
        row.w11.resize(node + 1);
        row.w12.resize(node + 1);
        row.w21.resize(node + 1);
        row.w22.resize(node + 1);
        double hist1 = 0.0, hist2 = 0.0;
        for (int j = 1; j <= node; ++j) {
            const double lo = grid.node(j - 1), hi = grid.node(j);
            row.w11[j] = panel_integral(K.k11, t, lo, hi);
            row.w12[j] = panel_integral(K.k12, t, lo, hi);
            row.w21[j] = panel_integral(K.k21, t, lo, hi);
            row.w22[j] = panel_integral(K.k22, t, lo, hi);
            if (j < node) {
                hist1 += row.w11[j] * phi_m.values[j] + row.w12[j] * phi_p.values[j];
                hist2 += row.w21[j] * phi_m.values[j] + row.w22[j] * phi_p.values[j];
            }
        }
        Block2 A{row.w11[node], row.w12[node], row.w21[node], row.w22[node]};
        if (A.cond_estimate() > cond_limit)
            throw IllPosedError("solve_first_kind: singular 2x2 block at node " +
                                std::to_string(node) + " (t=" + std::to_string(t) +
                                "), condition estimate " + std::to_string(A.cond_estimate()));
        A.solve(h_minus.values[node] - hist1, h_plus.values[node] - hist2, phi_m.values[node],
                phi_p.values[node]);
    }
    // phi at t_0 is extrapolated, never solved
    phi_m.values[0] = (n >= 2) ? 2.0 * phi_m.values[1] - phi_m.values[2] : phi_m.values[1];
    phi_p.values[0] = (n >= 2) ? 2.0 * phi_p.values[1] - phi_p.values[2] : phi_p.values[1];

    // backward error: re-convolve the solved densities
    VolterraSolution sol{grid, phi_m, phi_p, residuals, 0.0};
    for (int node = 1; node <= n; ++node) {
        const Row4& row = weights[node];
        double lhs1 = 0.0, lhs2 = 0.0;
        for (int j = 1; j <= node; ++j) {
            lhs1 += row.w11[j] * phi_m.values[j] + row.w12[j] * phi_p.values[j];
            lhs2 += row.w21[j] * phi_m.values[j] + row.w22[j] * phi_p.values[j];
        }
        double r = std::max(std::abs(lhs1 - h_minus.values[node]),
                            std::abs(lhs2 - h_plus.values[node]));
        sol.residual_norms[node] = r;
        sol.max_residual = std::max(sol.max_residual, r);
    }
    double h_scale = std::max({1.0, h_minus.max_abs(1), h_plus.max_abs(1)});
    if (sol.max_residual > backward_tol * h_scale) {
        int worst = 1;
        for (int node = 1; node <= n; ++node)
            if (sol.residual_norms[node] > sol.residual_norms[worst]) worst = node;
        throw IllPosedError(
            "solve_first_kind: marched solution does not reproduce the data (backward error " +
            std::to_string(sol.max_residual) + " at node " + std::to_string(worst) +
            "); the discrete system is effectively singular at this resolution");
    }
    return sol;
}

SampledFn solve_first_kind_scalar(const KernelEntry& K, const SampledFn& h, const TimeGrid& grid,
                                  double cond_limit, std::vector<double>* residuals,
                                  double backward_tol) {
    if (K.zero) throw DomainError("solve_first_kind_scalar: kernel is identically zero");
    if (!(h.grid == grid))
        throw DomainError("solve_first_kind_scalar: right-hand side must live on the solve grid");
    const int n = grid.n_steps;
    SampledFn phi(grid);
    std::vector<std::vector<double>> weights(static_cast<size_t>(n + 1));
    for (int node = 1; node <= n; ++node) {
        const double t = grid.node(node);
        auto& row = weights[node];
        row.resize(node + 1);
        double hist = 0.0, scale = 0.0;
        for (int j = 1; j <= node; ++j) {
            row[j] = panel_integral(K, t, grid.node(j - 1), grid.node(j));
            scale = std::max(scale, std::abs(row[j]));
            if (j < node) hist += row[j] * phi.values[j];
        }
        const double diag = row[node];
        if (!(std::abs(diag) * cond_limit > scale))
            throw IllPosedError("solve_first_kind_scalar: vanishing diagonal weight at node " +
                                std::to_string(node));
        phi.values[node] = (h.values[node] - hist) / diag;
    }
    phi.values[0] = (n >= 2) ? 2.0 * phi.values[1] - phi.values[2] : phi.values[1];
    std::vector<double> res(static_cast<size_t>(n + 1), 0.0);
    double worst = 0.0;
    int worst_node = 1;
    for (int node = 1; node <= n; ++node) {
        double lhs = 0.0;
        for (int j = 1; j <= node; ++j) lhs += weights[node][j] * phi.values[j];
        res[node] = std::abs(lhs - h.values[node]);
        if (res[node] > worst) {
            worst = res[node];
            worst_node = node;
        }
    }
    if (worst > backward_tol * std::max(1.0, h.max_abs(1)))
        throw IllPosedError(
            "solve_first_kind_scalar: marched solution does not reproduce the data (backward "
            "error " +
            std::to_string(worst) + " at node " + std::to_string(worst_node) + ")");
    if (residuals) *residuals = std::move(res);
    return phi;
}

SymbolicDensity abel_invert(const SymbolicDensity& g, double order) {
    if (!(order > 0.0) || !(order <= 1.0))
        throw DomainError("abel_invert: order must lie in (0, 1]");
    if (g.has_dirac())
        throw DomainError("abel_invert: Dirac data would leave a hypersingular density");
    SymbolicDensity phi;
    for (const auto& term : g.terms) {
        const double q = term.exponent;
        const double e = q - order;
        if (e > -1.0) {
            // D^order t^q = Gamma(q+1)/Gamma(q+1-order) t^{q-order}
            double c = term.coeff * std::tgamma(q + 1.0) * specfun::rgamma(q + 1.0 - order);
            if (c != 0.0) phi.terms.push_back({c, e});
        } else if (e == -1.0) {
            // D^order (t^{order-1}) = Gamma(order) delta(t)
            phi.dirac_weight += term.coeff * std::tgamma(q + 1.0);
        } else {
            throw DomainError("abel_invert: unrepresentable singular structure (exponent " +
                              std::to_string(q) + " under order " + std::to_string(order) + ")");
        }
    }
    return phi;
}

SampledFn abel_invert(const SampledFn& g, double order) {
    if (!(order > 0.0) || !(order < 1.0))
        throw DomainError("abel_invert (numeric): order must lie in (0, 1)");
    return fracquad::rl_derivative(g, order);
}

}  // namespace fracdiff::volterra
