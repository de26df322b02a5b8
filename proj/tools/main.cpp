// fracdiff command-line front end: R-function evaluation, IBVP and
// moving-boundary solvers, and the verification suites.
#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "fracdiff/ibvp.hpp"
#include "fracdiff/specfun.hpp"
#include "fracdiff/stefan.hpp"
#include "fracdiff/verify.hpp"

using nlohmann::json;
using namespace fracdiff;

namespace {

// shortest round-trip formatting keeps CSV output byte-stable across runs
std::string fmt_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    if (out.empty()) throw DomainError("empty numeric list: '" + s + "'");
    return out;
}

int thread_budget() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("FRACDIFF_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1 && v < 1024) hw = std::min<unsigned>(hw, static_cast<unsigned>(v));
    }
    return static_cast<int>(hw);
}

// evaluate fn(i) for i in [0, n) on up to thread_budget() threads; results
// land in a pre-sized vector so file writes stay deterministic
template <typename Fn>
void parallel_index(int n, Fn&& fn) {
    int workers = std::min(thread_budget(), n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
            } catch (...) {
                errors[static_cast<size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw DomainError("cannot open output file: " + path);
    return f;
}

// ---------------------------------------------------------------------------
// tiny expression grammar for paths and boundary data:
//   constant | c1+c2*t | c*t^p | inf | -inf

struct PathExpr {
    enum class Kind { Constant, Affine, Power, PlusInf, MinusInf } kind;
    double c0 = 0.0, c1 = 0.0, p = 1.0;

    double operator()(double t) const {
        switch (kind) {
            case Kind::Constant: return c0;
            case Kind::Affine: return c0 + c1 * t;
            case Kind::Power: return c0 + c1 * std::pow(t, p);
            default: throw DomainError("infinite path has no value");
        }
    }
};

PathExpr parse_expr(std::string s) {
    std::string raw = s;
    s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return std::isspace(c); }), s.end());
    if (s == "inf" || s == "+inf") return {PathExpr::Kind::PlusInf};
    if (s == "-inf") return {PathExpr::Kind::MinusInf};
    {
        char* end = nullptr;
        double v = std::strtod(s.c_str(), &end);
        if (end && *end == '\0' && end != s.c_str()) return {PathExpr::Kind::Constant, v};
    }
    static const std::regex form(
        R"(^(?:([+-]?[0-9.]+(?:[eE][+-]?[0-9]+)?)([+-]))?([+-]?[0-9.]+(?:[eE][+-]?[0-9]+)?)\*t(?:\^([+-]?[0-9.]+(?:[eE][+-]?[0-9]+)?))?$)");
    std::smatch m;
    if (!std::regex_match(s, m, form))
        throw DomainError("cannot parse expression '" + raw +
                          "' (grammar: constant | c1+c2*t | c*t^p | inf | -inf)");
    PathExpr e{PathExpr::Kind::Affine};
    double c2 = std::stod(m[3].str());
    if (m[1].matched) {
        e.c0 = std::stod(m[1].str());
        if (m[2].str() == "-") c2 = -c2;
    }
    e.c1 = c2;
    if (m[4].matched) {
        e.kind = PathExpr::Kind::Power;
        e.p = std::stod(m[4].str());
    }
    return e;
}

ibvp::BoundaryPath to_path(const PathExpr& e) {
    switch (e.kind) {
        case PathExpr::Kind::PlusInf: return ibvp::BoundaryPath::plus_infinity();
        case PathExpr::Kind::MinusInf: return ibvp::BoundaryPath::minus_infinity();
        case PathExpr::Kind::Constant: return ibvp::BoundaryPath::constant(e.c0);
        default: return ibvp::BoundaryPath::finite([e](double t) { return e(t); });
    }
}

ibvp::TimeFn to_timefn(const PathExpr& e) {
    switch (e.kind) {
        case PathExpr::Kind::Constant: return ibvp::TimeFn::constant(e.c0);
        case PathExpr::Kind::Affine: {
            SymbolicDensity d = SymbolicDensity::constant(e.c0);
            d += SymbolicDensity{{{e.c1, 1.0}}, 0.0};
            return ibvp::TimeFn::from_symbolic(d);
        }
        case PathExpr::Kind::Power: {
            if (!(e.p > -1.0)) throw DomainError("boundary data power must exceed -1");
            SymbolicDensity d = SymbolicDensity::constant(e.c0);
            d += SymbolicDensity{{{e.c1, e.p}}, 0.0};
            return ibvp::TimeFn::from_symbolic(d);
        }
        default: throw DomainError("boundary data cannot be infinite");
    }
}

// ---------------------------------------------------------------------------
// JSON helpers with unknown-key rejection

void require_keys(const json& j, std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional, const std::string& where) {
    for (const char* k : required)
        if (!j.contains(k)) throw DomainError("config: missing key '" + std::string(k) + "' in " + where);
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : required)
            if (it.key() == k) known = true;
        for (const char* k : optional)
            if (it.key() == k) known = true;
        if (!known) throw DomainError("config: unknown key '" + it.key() + "' in " + where);
    }
}

std::vector<double> parse_grid_spec(const json& j, const std::string& where) {
    if (j.is_array()) {
        std::vector<double> out;
        for (const auto& v : j) out.push_back(v.get<double>());
        if (out.empty()) throw DomainError("config: empty grid array in " + where);
        return out;
    }
    require_keys(j, {"min", "max", "count"}, {}, where);
    double lo = j["min"].get<double>(), hi = j["max"].get<double>();
    int n = j["count"].get<int>();
    if (n < 1 || !(hi >= lo)) throw DomainError("config: bad grid spec in " + where);
    std::vector<double> out;
    for (int i = 0; i < n; ++i)
        out.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
    return out;
}

json density_to_json(const ibvp::BoundaryDensity& d) {
    json out;
    if (d.symbolic) {
        out["type"] = "symbolic";
        json terms = json::array();
        for (const auto& term : d.symbolic->terms)
            terms.push_back({{"coeff", term.coeff}, {"exponent", term.exponent}});
        out["terms"] = terms;
        out["dirac_weight"] = d.symbolic->dirac_weight;
    } else if (d.numeric) {
        out["type"] = "numeric";
        json ts = json::array(), vs = json::array();
        for (int k = 0; k <= d.numeric->grid.n_steps; ++k) {
            ts.push_back(d.numeric->grid.node(k));
            vs.push_back(d.numeric->values[k]);
        }
        out["t"] = ts;
        out["values"] = vs;
    } else {
        out["type"] = "zero";
    }
    return out;
}

// ---------------------------------------------------------------------------
// subcommands

int cmd_eval_r(const std::string& mu_s, const std::string& nu_s, const std::string& a_s,
               const std::string& t_s, const std::string& method, const std::string& csv_path) {
    auto mus = parse_list(mu_s), nus = parse_list(nu_s), as = parse_list(a_s),
         ts = parse_list(t_s);
    std::ostringstream rows;
    rows << "mu,nu,a,t,value,method_used\n";
    for (double mu : mus)
        for (double nu : nus)
            for (double a : as)
                for (double t : ts) {
                    FracIndex idx(mu, nu);
                    double value;
                    std::string used;
                    if (method == "auto") {
                        auto r = specfun::r_eval_detailed(idx, a, t);
                        value = r.value;
                        used = specfun::route_name(r.route);
                    } else if (method == "series") {
                        auto r = specfun::r_series_detailed(idx, a, t);
                        value = r.value;
                        used = r.series_failed_over ? "laplace(failover)" : "series";
                    } else if (method == "laplace") {
                        value = specfun::r_laplace(idx, a, t);
                        used = "laplace";
                    } else if (method == "integral") {
                        value = specfun::r_real_integral(idx, a, t);
                        used = "integral";
                    } else {
                        throw DomainError("--method must be auto|series|laplace|integral");
                    }
                    rows << fmt_double(mu) << ',' << fmt_double(nu) << ',' << fmt_double(a) << ','
                         << fmt_double(t) << ',' << fmt_double(value) << ',' << used << '\n';
                }
    if (csv_path.empty()) {
        std::cout << rows.str();
    } else {
        open_out(csv_path) << rows.str();
    }
    return 0;
}

int cmd_profiles(double a, const std::string& nu_s, double t_max, int count,
                 const std::string& csv_path) {
    auto nus = parse_list(nu_s);
    std::ostringstream rows;
    rows << "# two-parameter profiles R_{mu,nu}(a,t); the single-label profile leaves mu\n"
            "# unspecified, so both the mu=nu and mu=0 families are emitted\n"
            "family,mu,nu,a,t,value\n";
    for (double nu : nus) {
        for (int i = 1; i <= count; ++i) {
            double t = t_max * i / count;
            double v1 = specfun::r_eval(FracIndex(nu, nu), a, t);
            rows << "mu=nu," << fmt_double(nu) << ',' << fmt_double(nu) << ',' << fmt_double(a)
                 << ',' << fmt_double(t) << ',' << fmt_double(v1) << '\n';
        }
        for (int i = 1; i <= count; ++i) {
            double t = t_max * i / count;
            double v0 = specfun::r_eval(FracIndex(0.0, nu), a, t);
            rows << "mu=0,0," << fmt_double(nu) << ',' << fmt_double(a) << ',' << fmt_double(t)
                 << ',' << fmt_double(v0) << '\n';
        }
    }
    if (csv_path.empty()) {
        std::cout << rows.str();
    } else {
        open_out(csv_path) << rows.str();
    }
    return 0;
}

int cmd_solve_ibvp(const std::string& config_path) {
    std::ifstream in(config_path);
    if (!in) throw DomainError("cannot read config file: " + config_path);
    json cfg = json::parse(in);
    require_keys(cfg, {"kind", "nu", "kappa", "left", "right", "paths", "f", "grid", "output"},
                 {"force_numeric"}, "top level");

    ibvp::IBVPProblem p;
    std::string kind = cfg["kind"].get<std::string>();
    if (kind == "caputo")
        p.kind = ibvp::DerivativeKind::Caputo;
    else if (kind == "riemann-liouville" || kind == "rl")
        p.kind = ibvp::DerivativeKind::RiemannLiouville;
    else
        throw DomainError("config: kind must be 'caputo' or 'riemann-liouville'");
    p.nu = cfg["nu"].get<double>();
    p.kappa = cfg["kappa"].get<double>();

    auto parse_bc = [&](const json& j, const std::string& where) {
        require_keys(j, {"coeff_u", "coeff_ux", "data"}, {}, where);
        return ibvp::RobinBC{j["coeff_u"].get<double>(), j["coeff_ux"].get<double>(),
                             to_timefn(parse_expr(j["data"].get<std::string>()))};
    };
    p.left = parse_bc(cfg["left"], "left");
    p.right = parse_bc(cfg["right"], "right");

    require_keys(cfg["paths"], {"lower", "upper"}, {}, "paths");
    p.lower = to_path(parse_expr(cfg["paths"]["lower"].get<std::string>()));
    p.upper = to_path(parse_expr(cfg["paths"]["upper"].get<std::string>()));

    const json& jf = cfg["f"];
    std::string ftype = jf.value("type", "");
    if (ftype == "constant") {
        require_keys(jf, {"type", "value"}, {}, "f");
        p.f_ext = ibvp::ExtensionFn::constant(jf["value"].get<double>());
    } else if (ftype == "piecewise") {
        require_keys(jf, {"type", "breaks", "values"}, {}, "f");
        p.f_ext = ibvp::ExtensionFn::piecewise(jf["breaks"].get<std::vector<double>>(),
                                               jf["values"].get<std::vector<double>>());
    } else {
        throw DomainError("config: f.type must be 'constant' or 'piecewise'");
    }

    require_keys(cfg["grid"], {"t_end", "n_steps"}, {}, "grid");
    TimeGrid grid(cfg["grid"]["t_end"].get<double>(), cfg["grid"]["n_steps"].get<int>());

    const json& jout = cfg["output"];
    require_keys(jout, {"x", "t"}, {"csv", "phi_json"}, "output");
    auto xs = parse_grid_spec(jout["x"], "output.x");
    auto ts = parse_grid_spec(jout["t"], "output.t");

    ibvp::SolveOptions opt;
    opt.force_numeric = cfg.value("force_numeric", false);
    auto sol = ibvp::solve(p, grid, opt);

    // u and u_x over the output grid (row-major in t, then x); independent
    // evaluations may run in parallel, the write stays ordered
    struct Row {
        double x, t, u, ux;
    };
    std::vector<Row> table(xs.size() * ts.size());
    parallel_index(static_cast<int>(table.size()), [&](int i) {
        size_t it = static_cast<size_t>(i) / xs.size();
        size_t ix = static_cast<size_t>(i) % xs.size();
        double x = xs[ix], t = ts[it];
        table[static_cast<size_t>(i)] = {x, t, ibvp::eval_u(sol, x, t), ibvp::eval_ux(sol, x, t)};
    });

    std::ostringstream rows;
    rows << "x,t,u,ux\n";
    for (const Row& r : table)
        rows << fmt_double(r.x) << ',' << fmt_double(r.t) << ',' << fmt_double(r.u) << ','
             << fmt_double(r.ux) << '\n';
    if (jout.contains("csv"))
        open_out(jout["csv"].get<std::string>()) << rows.str();
    else
        std::cout << rows.str();

    // boundary-condition residual report over the output times
    double bc_res = 0.0;
    for (double t : ts) {
        if (p.lower.finite_path()) {
            double x = p.lower(t);
            double lhs = p.left.coeff_u * ibvp::eval_u(sol, x, t);
            if (p.left.coeff_ux != 0.0) lhs += p.left.coeff_ux * ibvp::eval_ux(sol, x, t);
            bc_res = std::max(bc_res, std::abs(lhs - p.left.data(t)));
        }
        if (p.upper.finite_path()) {
            double x = p.upper(t);
            double lhs = p.right.coeff_u * ibvp::eval_u(sol, x, t);
            if (p.right.coeff_ux != 0.0) lhs += p.right.coeff_ux * ibvp::eval_ux(sol, x, t);
            bc_res = std::max(bc_res, std::abs(lhs - p.right.data(t)));
        }
    }

    json report;
    report["route"] = sol.route;
    report["phi_minus"] = density_to_json(sol.phi_minus);
    report["phi_plus"] = density_to_json(sol.phi_plus);
    report["solver_backward_residual_max"] = sol.max_residual;
    report["bc_residual_max"] = bc_res;
    if (jout.contains("phi_json"))
        open_out(jout["phi_json"].get<std::string>()) << report.dump(2) << "\n";
    else
        std::cerr << report.dump(2) << "\n";
    return 0;
}

int cmd_stefan_one(double nu, double r, const std::string& kind_s, const std::string& t_list,
                   int x_count, const std::string& csv_path, const std::string& json_path) {
    auto kind = (kind_s == "rl" || kind_s == "riemann-liouville")
                    ? stefan::DerivativeKind::RiemannLiouville
                    : stefan::DerivativeKind::Caputo;
    auto sol = stefan::stefan1_solve(nu, r, kind);
    json summary{{"alpha", sol.alpha}, {"u0", sol.u0}, {"nu", nu}, {"r", r}};
    if (json_path.empty())
        std::cout << summary.dump(2) << "\n";
    else
        open_out(json_path) << summary.dump(2) << "\n";

    std::ostringstream rows;
    rows << "t,x,u,eta\n";
    for (double t : parse_list(t_list)) {
        double eta = sol.eta(t);
        for (int i = 0; i < x_count; ++i) {
            double x = eta * i / (x_count - 1);
            rows << fmt_double(t) << ',' << fmt_double(x) << ',' << fmt_double(sol.u(x, t)) << ','
                 << fmt_double(eta) << '\n';
        }
    }
    if (!csv_path.empty())
        open_out(csv_path) << rows.str();
    else if (!json_path.empty())
        std::cout << rows.str();
    return 0;
}

int cmd_stefan_two(double nu, double r, const std::string& kind_s, int steps, double t_end,
                   const std::string& csv_path, const std::string& json_path) {
    auto kind = (kind_s == "rl" || kind_s == "riemann-liouville")
                    ? stefan::DerivativeKind::RiemannLiouville
                    : stefan::DerivativeKind::Caputo;
    auto st = stefan::stefan2_solve(kind, nu, r, TimeGrid(t_end, steps));
    std::ostringstream rows;
    rows << "t,eta,phi_minus,residual_bc,residual_stefan\n";
    for (int k = 1; k <= steps; ++k)
        rows << fmt_double(st.grid.node(k)) << ',' << fmt_double(st.eta.values[k]) << ','
             << fmt_double(st.phi_minus.values[k]) << ',' << fmt_double(st.residual_bc[k]) << ','
             << fmt_double(st.residual_stefan[k]) << '\n';
    if (csv_path.empty())
        std::cout << rows.str();
    else
        open_out(csv_path) << rows.str();
    if (!json_path.empty()) {
        json summary{{"nu", nu},
                     {"r", r},
                     {"kind", kind_s},
                     {"n_steps", steps},
                     {"t_end", t_end},
                     {"eta_end", st.eta.values[steps]},
                     {"eta_monotone", st.eta_monotone}};
        open_out(json_path) << summary.dump(2) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"time-fractional diffusion toolkit: auxiliary R-function evaluation, "
                 "embedding-method IBVP solver, moving-boundary problems"};
    app.require_subcommand(1);

    std::string mu_s, nu_s = "0.5", a_s, t_s, method = "auto", csv_path, json_path;

    auto* eval = app.add_subcommand("eval-r", "evaluate R_{mu,nu}(a,t)");
    eval->add_option("--mu", mu_s, "mu value or comma list")->required();
    eval->add_option("--nu", nu_s, "nu value or comma list")->required();
    eval->add_option("--a", a_s, "a value or comma list")->required();
    eval->add_option("--t", t_s, "t value or comma list")->required();
    eval->add_option("--method", method, "auto|series|laplace|integral");
    eval->add_option("--csv", csv_path, "write CSV here instead of stdout");

    double prof_a = 2.5, prof_tmax = 5.0;
    int prof_count = 50;
    std::string prof_nu = "0.3,0.4,0.5";
    auto* prof = app.add_subcommand(
        "profiles", "emit R profiles over t for plotting (both mu=nu and mu=0 families)");
    prof->add_option("--a", prof_a, "spatial argument");
    prof->add_option("--nu", prof_nu, "nu comma list");
    prof->add_option("--t-max", prof_tmax, "largest time");
    prof->add_option("--count", prof_count, "samples per profile");
    prof->add_option("--csv", csv_path, "write CSV here instead of stdout");

    std::string config_path;
    auto* ibvp_cmd = app.add_subcommand("solve-ibvp", "solve an initial-boundary value problem");
    ibvp_cmd->add_option("config", config_path, "JSON problem description")->required();

    double s_nu = 0.5, s_r = 1.0, s_tend = 1.0;
    int s_steps = 128, s_xcount = 11;
    std::string s_kind = "caputo", s_tlist = "0.5,1,2";
    auto* stefan_cmd = app.add_subcommand("solve-stefan", "solve a moving-boundary problem");
    stefan_cmd->require_subcommand(1);
    auto* one = stefan_cmd->add_subcommand("one", "bounded-domain melting problem (closed form)");
    one->add_option("--nu", s_nu, "fractional half-order in (0, 1/2]")->required();
    one->add_option("--r", s_r, "latent-to-sensible heat ratio")->required();
    one->add_option("--kind", s_kind, "caputo|rl");
    one->add_option("--t-samples", s_tlist, "times for the u-grid CSV");
    one->add_option("--x-count", s_xcount, "x samples per time");
    one->add_option("--csv", csv_path, "u-grid CSV path");
    one->add_option("--json", json_path, "summary JSON path");
    auto* two = stefan_cmd->add_subcommand("two", "half-line subcooled problem (time marching)");
    two->add_option("--nu", s_nu, "fractional half-order in (0, 1/2]")->required();
    two->add_option("--r", s_r, "latent-to-sensible heat ratio")->required();
    two->add_option("--kind", s_kind, "caputo|rl");
    two->add_option("--steps", s_steps, "number of time steps");
    two->add_option("--t-end", s_tend, "final time");
    two->add_option("--csv", csv_path, "trajectory CSV path");
    two->add_option("--json", json_path, "summary JSON path");

    std::string suite = "all";
    auto* verify_cmd = app.add_subcommand("verify", "run the module property suites (TAP output)");
    verify_cmd->add_option("suite", suite, "specfun|fracquad|volterra|ibvp|stefan|all");

    CLI11_PARSE(app, argc, argv);

    try {
        if (eval->parsed()) return cmd_eval_r(mu_s, nu_s, a_s, t_s, method, csv_path);
        if (prof->parsed()) return cmd_profiles(prof_a, prof_nu, prof_tmax, prof_count, csv_path);
        if (ibvp_cmd->parsed()) return cmd_solve_ibvp(config_path);
        if (stefan_cmd->parsed()) {
            if (one->parsed())
                return cmd_stefan_one(s_nu, s_r, s_kind, s_tlist, s_xcount, csv_path, json_path);
            return cmd_stefan_two(s_nu, s_r, s_kind, s_steps, s_tend, csv_path, json_path);
        }
        if (verify_cmd->parsed()) {
            auto results = verify::run_suite(suite);
            int failures = verify::print_tap(std::cout, results);
            return failures == 0 ? 0 : 1;
        }
    } catch (const UnsupportedProblemError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    } catch (const IllPosedError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "error: invalid config: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
