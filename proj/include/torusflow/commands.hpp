#pragma once

// Subcommand bodies. Each returns a process exit code:
// 0 success, 1 a checked property failed, 2 usage or configuration error.

#include <torusflow/cfrac.hpp>
#include <torusflow/circle.hpp>
#include <torusflow/dfa.hpp>
#include <torusflow/flow.hpp>
#include <torusflow/run_config.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

namespace torusflow {

enum exit_code : int { exit_ok = 0, exit_failure = 1, exit_usage = 2 };

/// Shortest round-trip decimal, identical across runs.
inline std::string fmt_real(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt_fixed(double v, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

/// Uniform draw in [0,1) from the top 53 bits; portable across standard libraries.
inline double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

namespace detail {

/// Writes to the configured output file, or to `fallback` when none is set.
class sink {
public:
    sink(const run_config& cfg, std::ostream& fallback)
    {
        if (!cfg.output.empty()) {
            path_ = cfg.output_path(cfg.output);
            file_.open(path_, std::ios::binary);
            if (!file_) throw config_error("cannot open output file '" + path_ + "'");
        }
        out_ = cfg.output.empty() ? &fallback : &file_;
    }
    std::ostream& operator*() { return *out_; }

private:
    std::string path_;
    std::ofstream file_;
    std::ostream* out_ = nullptr;
};

inline std::size_t count_value(const std::vector<std::uint8_t>& img, std::uint8_t v)
{
    return static_cast<std::size_t>(std::count(img.begin(), img.end(), v));
}

} // namespace detail

/// Quotients, convergents and the window bound of x.
inline int cmd_cfrac(const std::string& input, long long max_terms, std::ostream& out, std::ostream& err)
{
    if (max_terms < 1) {
        err << "error: max_terms must be >= 1\n";
        return exit_usage;
    }
    real_input x;
    try {
        x = parse_real_input(input);
    } catch (const config_error& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }

    high_real whole = boost::multiprecision::floor(x.value);
    high_real fractional = x.value - whole;
    out << "# x = " << x.text << '\n';
    out << "# a_0 = " << whole.str() << '\n';

    continued_fraction cf;
    std::string notice;
    try {
        if (fractional == 0) {
            out << "# expansion terminates at a_0 (integer input)\n";
            return exit_ok;
        }
        if (x.named) {
            cf = expand(fractional, static_cast<std::size_t>(max_terms));
        } else {
            std::uint64_t num = x.num % x.den;
            cf = expand_rational(num, x.den, static_cast<std::size_t>(max_terms));
        }
    } catch (const precision_exhausted& e) {
        err << "error: " << e.what() << '\n';
        return exit_failure;
    } catch (const error& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }

    if (cf.terminated)
        notice = "# expansion terminates after a_" + std::to_string(cf.size()) + " = " +
                 std::to_string(cf.quotients.back()) + " (rational input)";
    else if (cf.truncated)
        notice = "# precision exhausted after " + std::to_string(cf.size()) + " reliable quotients";

    // keep only the prefix whose convergents fit 64 bits
    convergent_table table;
    while (true) {
        try {
            table = convergents(cf);
            break;
        } catch (const overflow_error&) {
            cf.quotients.pop_back();
            notice = "# convergents beyond k = " + std::to_string(cf.size()) + " exceed 64 bits";
        }
    }

    out << "k,a_k,p_k,q_k\n";
    out << "0,,0,1\n";
    for (std::size_t k = 1; k < table.size(); ++k)
        out << k << ',' << cf.quotients[k - 1] << ',' << table.p(k) << ',' << table.q(k) << '\n';
    if (!notice.empty()) out << notice << '\n';
    if (!cf.quotients.empty()) out << "# window bound B = " << constant_type_bound(cf) << '\n';
    return exit_ok;
}

/// Denjoy-Koksma residuals over all convergent denominators up to q_max.
inline int cmd_dk(const run_config& cfg, std::ostream& out, std::ostream& err)
{
    real_input a;
    observable_1d phi;
    try {
        a = parse_real_input(cfg.alpha);
        phi = make_circle_observable(cfg.phi);
    } catch (const config_error& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }
    if (!a.named) {
        err << "error: alpha = " << a.text << " is rational (" << a.num << "/" << a.den
            << "); its convergent denominators stop, use golden, silver or lambda\n";
        return exit_usage;
    }
    high_real fractional = a.value - boost::multiprecision::floor(a.value);
    continued_fraction cf = expand(fractional, 80);
    convergent_table table = convergents(cf);
    double alpha = static_cast<double>(fractional);
    circle_map R = circle_map::rotation(alpha);
    double mean = phi.mean.value_or(0.0);

    std::mt19937_64 rng(static_cast<std::uint64_t>(cfg.seed));
    std::vector<double> xs(static_cast<std::size_t>(cfg.n_points));
    for (double& x : xs) x = unit_draw(rng);

    detail::sink sink(cfg, out);
    std::ostream& o = *sink;
    o << "q,x,residual,var\n";
    bool ok = true;
    std::uint64_t last = 0;
    for (std::size_t k = 0; k < table.size() && table.q(k) <= static_cast<std::uint64_t>(cfg.q_max); ++k) {
        std::uint64_t q = table.q(k);
        if (q == last) continue;
        last = q;
        for (double x : xs) {
            double r = dk_residual(R, phi, x, q, mean);
            ok = ok && (phi.variation > 0.0 ? r < phi.variation : r <= phi.variation);
            o << q << ',' << fmt_real(x) << ',' << fmt_real(r) << ',' << fmt_real(phi.variation) << '\n';
        }
    }
    if (!ok) err << "Denjoy-Koksma residual reached Var(phi)\n";
    return ok ? exit_ok : exit_failure;
}

/// H_{x,T}(f) at geometric times with the fitted K1, K2 footer.
inline int cmd_logbound(const run_config& cfg, std::ostream& out, std::ostream& err)
{
    torus_observable f;
    try {
        f = make_torus_observable(cfg.observable);
    } catch (const config_error& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }
    log_growth_options opt;
    opt.subtract_mean = cfg.mean_subtraction();
    opt.mean_horizon_factor = cfg.mean_horizon;
    ergodic_series s = log_growth_experiment(cfg.flow(), f, torus_point(cfg.x0, cfg.y0), cfg.t_max,
                                             static_cast<std::size_t>(cfg.samples), opt);
    detail::sink sink(cfg, out);
    std::ostream& o = *sink;
    o << "T,H,H_over_log1pT\n";
    for (std::size_t i = 0; i < s.times.size(); ++i)
        o << fmt_real(s.times[i]) << ',' << fmt_real(s.values[i]) << ','
          << fmt_real(s.values[i] / std::log1p(s.times[i])) << '\n';
    o << "# K1=" << fmt_real(s.k1) << '\n';
    o << "# K2=" << fmt_real(s.k2) << '\n';
    o << "# mean=" << fmt_real(s.mean) << '\n';
    if (opt.subtract_mean && s.mean_dominates)
        o << "# warning: mean estimate drift " << fmt_real(s.mean_residual) << " exceeds log(1+T_max)\n";
    return exit_ok;
}

inline void write_pgm(std::ostream& o, const std::vector<std::uint8_t>& img, std::size_t w, std::size_t h)
{
    o << "P5\n" << w << ' ' << h << "\n255\n";
    o.write(reinterpret_cast<const char*>(img.data()), static_cast<std::streamsize>(img.size()));
}

/// Basin image: 255 attracted to the origin, 0 undecided.
inline int cmd_basin(const run_config& cfg, std::ostream& out, std::ostream& err)
{
    auto w = static_cast<std::size_t>(cfg.width), h = static_cast<std::size_t>(cfg.height);
    auto img = render_basin(cfg.dfa(), w, h, cfg.basin());
    std::string path = cfg.output_path("basin.pgm");
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        err << "error: cannot open output file '" << path << "'\n";
        return exit_usage;
    }
    write_pgm(f, img, w, h);
    std::size_t undecided = detail::count_value(img, 0);
    out << "wrote " << path << " (" << w << "x" << h << ")\n";
    out << "attracted=" << img.size() - undecided << " undecided=" << undecided
        << " undecided_fraction=" << fmt_fixed(double(undecided) / double(img.size()), 6) << '\n';
    return exit_ok;
}

/// Return map R, return time u and the rotation number on the section.
inline int cmd_poincare(const run_config& cfg, std::ostream& out, std::ostream&)
{
    flow_config fc = cfg.flow();
    section sec = cfg.sec();
    return_options opt;
    opt.renormalized = cfg.renormalized;
    return_map_data d = build_return_map(fc, sec, static_cast<std::size_t>(cfg.samples), opt);
    rotation_estimate rho = rotation_number(d.map, static_cast<std::size_t>(cfg.n_iter));
    detail::sink sink(cfg, out);
    std::ostream& o = *sink;
    o << "theta,R,u\n";
    for (std::size_t i = 0; i < d.grid.size(); ++i)
        o << fmt_real(d.grid[i]) << ',' << fmt_real(d.images[i]) << ',' << fmt_real(d.times[i]) << '\n';
    o << "# rho=" << fmt_real(rho.reduced()) << " error_bound=" << fmt_real(rho.error_bound) << '\n';
    double base = std::floor(rho.lower);
    o << "# rho_bracket=[" << fmt_real(rho.lower - base) << "," << fmt_real(rho.upper - base) << "]\n";
    o << "# tau=" << fmt_real(d.tau) << " relative_stddev=" << fmt_real(d.relative_stddev) << '\n';
    return exit_ok;
}

/// Circular order of the return-map orbit of 0 against the rigid rotation.
inline int cmd_orbit_order(const run_config& cfg, std::ostream& out, std::ostream&)
{
    return_options opt;
    opt.renormalized = cfg.renormalized;
    auto rep = orbit_order_check(cfg.flow(), cfg.sec(), static_cast<std::size_t>(cfg.n_points), opt,
                                 static_cast<std::size_t>(std::max<long long>(cfg.n_iter, 4 * cfg.n_points)));
    out << "points=" << cfg.n_points << '\n';
    out << "alpha=" << fmt_real(rep.alpha) << " error_bound=" << fmt_real(rep.alpha_error_bound) << '\n';
    out << "precondition=" << (rep.precondition_met ? "met" : "not met") << '\n';
    out << "order_isomorphic=" << (rep.order_isomorphic ? "true" : "false") << '\n';
    if (rep.first_mismatch) out << "first_mismatch=" << *rep.first_mismatch << '\n';
    return rep.order_isomorphic ? exit_ok : exit_failure;
}

struct check_result {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Reduced invariant suite over every module at the configured parameters.
inline std::vector<check_result> run_invariants(const run_config& cfg)
{
    std::vector<check_result> results;
    auto check = [&](const std::string& name, const std::function<check_result()>& body) {
        check_result r;
        try {
            r = body();
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("threw: ") + e.what();
        }
        r.name = name;
        results.push_back(r);
    };
    std::mt19937_64 rng(static_cast<std::uint64_t>(cfg.seed));
    const dfa_params prm = cfg.dfa();
    const flow_config fc = cfg.flow();
    const double golden = static_cast<double>(golden_high());

    check("cfrac.ostrowski", [] {
        auto cf = expand(golden_high(), 40);
        auto table = convergents(cf);
        auto B = constant_type_bound(cf);
        for (std::uint64_t m = 1; m <= 10000; ++m) {
            auto rep = verify_decomposition(ostrowski_decompose(m, table), table, B);
            if (!rep.reconstruction_exact || !rep.top_index_bound || !rep.digit_bound)
                return check_result{"", false, "m = " + std::to_string(m)};
        }
        return check_result{"", true, "m <= 10000"};
    });

    check("cfrac.approximation", [] {
        high_real w = golden_high();
        auto table = convergents(expand(w, 40));
        for (std::size_t k = 1; k < table.size(); ++k) {
            high_real gap = boost::multiprecision::abs(high_real(table.q(k)) * w - high_real(table.p(k)));
            if (!(gap < 1 / high_real(table.q(k)))) return check_result{"", false, "k = " + std::to_string(k)};
        }
        return check_result{"", true, "|q_k w - p_k| < 1/q_k"};
    });

    check("circle.denjoy_koksma", [&] {
        auto R = circle_map::rotation(golden);
        auto phi = observable_1d::sin2pi();
        auto table = convergents(expand(golden_high(), 40));
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            double x = unit_draw(rng);
            for (std::size_t k = 0; k < table.size() && table.q(k) <= 1000; ++k)
                worst = std::max(worst, dk_residual(R, phi, x, table.q(k), 0.0));
        }
        return check_result{"", worst < phi.variation, "max residual " + fmt_real(worst)};
    });

    check("circle.log_bound", [&] {
        auto R = circle_map::rotation(golden);
        auto phi = observable_1d::sin2pi();
        double c = 4.0 * phi.variation / std::log(2.0);
        double s = 0.0, y = 0.0;
        for (int n = 1; n <= 10000; ++n) {
            s += phi(y);
            y = R(y);
            if (std::abs(s) > c * std::log(double(n)) + phi.sup_abs)
                return check_result{"", false, "n = " + std::to_string(n)};
        }
        return check_result{"", true, "n <= 10000"};
    });

    check("dfa.jacobian", [&] {
        double worst_tri = 0.0, worst_fd = 0.0;
        const double h = 1e-6;
        for (int i = 0; i < 100; ++i) {
            torus_point p(unit_draw(rng), unit_draw(rng));
            mat2 j = jacobian(p, prm);
            worst_tri = std::max(worst_tri, std::abs(j.a21));
            vec2 v = p.centered_rep();
            auto column = [&](vec2 dir) {
                vec2 d = apply_f_lift(v + h * dir, prm) - apply_f_lift(v - h * dir, prm);
                return vec2{dot(d, e_u), dot(d, e_s)} * (0.5 / h);
            };
            vec2 cu = column(e_u), cs = column(e_s);
            worst_fd = std::max({worst_fd, std::abs(cu.x - j.a11), std::abs(cu.y - j.a21), std::abs(cs.x - j.a12),
                                 std::abs(cs.y - j.a22)});
        }
        return check_result{"", worst_tri < 1e-12 && worst_fd < 1e-6,
                            "lower-left " + fmt_real(worst_tri) + ", finite difference " + fmt_real(worst_fd)};
    });

    check("dfa.contraction", [&] {
        if (!prm.in_regularity_window()) return check_result{"", true, "skipped: beta outside regularity window"};
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) worst = std::max(worst, contraction_residual(torus_point(unit_draw(rng), unit_draw(rng)), prm));
        return check_result{"", worst < 100.0 * prm.series_tol, "max residual " + fmt_real(worst)};
    });

    check("flow.step_limit", [&] {
        return check_result{"", fc.step_valid(), "step " + fmt_real(fc.step) + " (limit 1e-2)"};
    });

    check("flow.group_law", [&] {
        double worst = 0.0;
        for (int i = 0; i < 5; ++i) {
            torus_point x(unit_draw(rng), unit_draw(rng));
            worst = std::max(worst, torus_distance(integrate(fc, integrate(fc, x, 0.7), 0.7), integrate(fc, x, 1.4)));
            worst = std::max(worst, torus_distance(integrate(fc, integrate(fc, x, 1.0), -1.0), x));
        }
        return check_result{"", worst < 1e-7, "max defect " + fmt_real(worst)};
    });

    check("flow.commutation", [&] {
        double worst = 0.0;
        for (int i = 0; i < 5; ++i) {
            torus_point x(unit_draw(rng), unit_draw(rng));
            worst = std::max(worst, commutation_residual(fc, x, 2.0 * unit_draw(rng)));
        }
        return check_result{"", worst < 1e-5, "max residual " + fmt_real(worst)};
    });

    section sec = cfg.sec();
    return_options ren;
    ren.renormalized = true;

    check("flow.return_time", [&] {
        auto margin = transversality_margin(fc, sec);
        auto d = build_return_map(fc, sec, 10, ren);
        return check_result{"", margin.margin > 0.0 && d.relative_stddev < 1e-5,
                            "relative stddev " + fmt_real(d.relative_stddev) + ", margin " + fmt_real(margin.margin)};
    });

    check("flow.rotation_number", [&] {
        if (sec.p() != 1 || sec.q() != 1) return check_result{"", true, "skipped: reference value is for section 1/1"};
        auto rho = rotation_number(return_map(fc, sec, ren), 300);
        double err = std::abs(rho.reduced() - golden);
        return check_result{"", err <= rho.error_bound, "error " + fmt_real(err)};
    });

    check("flow.integral_vs_birkhoff", [&] {
        auto f = torus_observable::sin2pix();
        auto d = build_return_map(fc, sec, 10, ren);
        double worst = 0.0, bound = 0.0;
        bool ok = true;
        for (int i = 0; i < 2; ++i) {
            torus_point y(unit_draw(rng), unit_draw(rng));
            auto rep = compare_integral_to_birkhoff(fc, sec, f, y, 20.0, d.sup_u, d.inf_u, ren);
            ok = ok && rep.holds;
            worst = std::max({worst, rep.gap, rep.shift_gap});
            bound = std::max(bound, rep.bound);
        }
        return check_result{"", ok, "max gap " + fmt_real(worst) + ", bound " + fmt_real(bound)};
    });

    return results;
}

inline int cmd_verify(const run_config& cfg, std::ostream& out, std::ostream&)
{
    auto results = run_invariants(cfg);
    bool all = true;
    for (const auto& r : results) {
        out << (r.pass ? "PASS " : "FAIL ") << r.name << "  " << r.detail << '\n';
        all = all && r.pass;
    }
    out << (all ? "all invariants hold\n" : "invariant failures\n");
    return all ? exit_ok : exit_failure;
}

} // namespace torusflow
