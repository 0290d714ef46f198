// Acceptance suite: one PASS/FAIL line per criterion, runtime included.

#include <torusflow/commands.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace torusflow;

namespace {

struct outcome {
    bool pass = false;
    std::string detail;
    std::vector<std::string> notes;
};

struct criterion {
    int id;
    std::string name;
    double budget_s; ///< 0: no runtime limit
    std::function<outcome()> body;
};

const double golden = static_cast<double>(golden_high());
const double silver = static_cast<double>(silver_high());

std::string sci(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

flow_config flow_at(double beta, double step = 1e-3)
{
    flow_config c;
    c.params.beta = beta;
    c.step = step;
    return c;
}

dfa_params map_at(double beta)
{
    dfa_params p;
    p.beta = beta;
    return p;
}

return_options renormalized()
{
    return_options o;
    o.renormalized = true;
    return o;
}

outcome ostrowski_suite()
{
    auto cf = expand(golden_high(), 40);
    auto table = convergents(cf);
    auto B = constant_type_bound(cf);
    std::uint64_t max_digit = 0, worst_top = 0;
    for (std::uint64_t m = 1; m <= 100000; ++m) {
        auto d = ostrowski_decompose(m, table);
        auto rep = verify_decomposition(d, table, B);
        if (!rep.reconstruction_exact || !rep.top_index_bound || rep.max_digit > 2)
            return {false, "fails at m = " + std::to_string(m), {}};
        max_digit = std::max(max_digit, rep.max_digit);
        worst_top = std::max<std::uint64_t>(worst_top, d.top);
    }
    return {true, "m <= 1e5, max digit " + std::to_string(max_digit) + ", max N " + std::to_string(worst_top), {}};
}

outcome denjoy_koksma_suite()
{
    std::mt19937_64 rng(1);
    std::vector<double> xs(100);
    for (double& x : xs) x = unit_draw(rng);
    double worst_ratio = 0.0;
    std::size_t checks = 0;
    struct rotation {
        std::string name;
        double alpha;
        convergent_table table;
    };
    std::vector<rotation> rotations = {{"golden", golden, convergents(expand(golden_high(), 40))},
                                       {"silver", silver, convergents(expand(silver_high(), 40))}};
    for (const auto& rot : rotations) {
        auto R = circle_map::rotation(rot.alpha);
        for (const auto& phi : {observable_1d::sin2pi(), observable_1d::cos2pi(), observable_1d::triangle()}) {
            std::uint64_t last = 0;
            for (std::size_t k = 0; k < rot.table.size() && rot.table.q(k) <= 10000; ++k) {
                std::uint64_t q = rot.table.q(k);
                if (q == last) continue;
                last = q;
                for (double x : xs) {
                    double r = dk_residual(R, phi, x, q, *phi.mean);
                    ++checks;
                    worst_ratio = std::max(worst_ratio, r / phi.variation);
                    if (!(r < phi.variation))
                        return {false, rot.name + " " + phi.name + " q = " + std::to_string(q) + " residual " + sci(r), {}};
                }
            }
        }
    }
    return {true, std::to_string(checks) + " residuals, max residual/Var " + sci(worst_ratio), {}};
}

outcome circle_log_bound()
{
    auto cf = expand(golden_high(), 40);
    auto table = convergents(cf);
    auto B = constant_type_bound(cf);
    auto R = circle_map::rotation(golden);
    auto phi = observable_1d::sin2pi();
    const double c = 4.0 * double(B) * phi.variation / std::log(2.0);
    double s = 0.0, y = 0.0, worst = 0.0;
    for (int n = 1; n <= 100000; ++n) {
        s += phi(y);
        y = R(y);
        double allowed = c * std::log(double(n)) + phi.sup_abs;
        worst = std::max(worst, std::abs(s) / allowed);
        if (std::abs(s) > allowed) return {false, "fails at n = " + std::to_string(n), {}};
    }
    // the blockwise chain itself on a geometric sample of n
    bool blocks_ok = true;
    for (double n = 2; n <= 1e5; n *= 1.25) {
        auto rep = decomposed_sum_bound(R, phi, 0.0, static_cast<std::uint64_t>(n), table, B);
        blocks_ok = blocks_ok && rep.holds && rep.blocks_within_variation;
    }
    return {blocks_ok, "max |S_n| / bound " + sci(worst) + (blocks_ok ? ", blockwise chain holds" : ", blockwise chain fails"),
            {}};
}

outcome stable_field_contraction()
{
    std::mt19937_64 rng(4);
    std::ostringstream detail;
    bool ok = true;
    for (double beta : {-1.7, -2.0, -2.3}) {
        auto prm = map_at(beta);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            double x = unit_draw(rng);
            worst = std::max(worst, contraction_residual(torus_point(x, unit_draw(rng)), prm));
        }
        ok = ok && worst < 1e-6;
        detail << "beta " << beta << ": " << sci(worst) << "  ";
    }
    return {ok, detail.str(), {}};
}

outcome commutation()
{
    std::mt19937_64 rng(5);
    auto cfg = flow_at(-2.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        double x = unit_draw(rng), y = unit_draw(rng), t = 2.0 * unit_draw(rng);
        worst = std::max(worst, commutation_residual(cfg, torus_point(x, y), t));
    }
    return {worst < 1e-5, "max residual " + sci(worst), {}};
}

outcome rotation_number_check()
{
    section sec(1, 1);
    auto rho0 = rotation_number(return_map(flow_at(0.0), sec, renormalized()), 10000);
    auto rho2 = rotation_number(return_map(flow_at(-2.0), sec, renormalized()), 2000);
    double target = lambda - 1.0;
    double e0 = std::abs(rho0.reduced() - target), e2 = std::abs(rho2.reduced() - target);
    bool ok = e0 < 1e-4 && e2 < 1e-3;
    std::ostringstream notes;
    notes << "bracket at beta -2: [" << fmt_fixed(frac(rho2.lower), 10) << ", "
          << fmt_fixed(frac(rho2.lower) + rho2.upper - rho2.lower, 10) << "]";
    return {ok, "beta 0: error " + sci(e0) + ", beta -2: error " + sci(e2), {notes.str()}};
}

outcome return_time_constancy()
{
    section sec(1, 1);
    auto d0 = build_return_map(flow_at(0.0), sec, 100, renormalized());
    auto d2 = build_return_map(flow_at(-2.0), sec, 100, renormalized());
    double off = std::abs(d0.tau - 1.0 / std::sqrt(2.0));
    bool ok = d0.relative_stddev < 1e-5 && d2.relative_stddev < 1e-5 && off < 1e-6;
    return {ok,
            "rel stddev " + sci(d0.relative_stddev) + " / " + sci(d2.relative_stddev) + ", |tau - 1/sqrt2| " + sci(off),
            {"tau at beta -2: " + fmt_fixed(d2.tau, 12)}};
}

outcome integral_vs_birkhoff()
{
    std::mt19937_64 rng(8);
    section sec(1, 1);
    const std::vector<torus_observable> fs = {torus_observable::sin2pix(), torus_observable::cos2piy(),
                                              torus_observable::sin2pixy()};
    double worst_excess = -1e300;
    int done = 0;
    for (double beta : {0.0, -2.0}) {
        auto cfg = flow_at(beta);
        auto d = build_return_map(cfg, sec, 20, renormalized());
        for (int i = 0; i < 10; ++i) {
            const auto& f = fs[rng() % fs.size()];
            double x = unit_draw(rng), y = unit_draw(rng);
            double T = 100.0 * (1.0 - unit_draw(rng)); // (0, 100]
            auto rep = compare_integral_to_birkhoff(cfg, sec, f, torus_point(x, y), T, d.sup_u, d.inf_u, renormalized());
            worst_excess = std::max({worst_excess, rep.gap - rep.bound, rep.shift_gap - rep.bound});
            if (!rep.within(1e-4))
                return {false, "beta " + std::to_string(beta) + " T " + fmt_fixed(T, 3) + " gap " + sci(rep.gap) +
                                   " bound " + sci(rep.bound) + (rep.n_in_range ? "" : " n out of range"),
                        {}};
            ++done;
        }
    }
    return {true, std::to_string(done) + " triples, max (gap - bound) " + sci(worst_excess), {}};
}

outcome log_growth()
{
    // linear flow: closed-form bound at x0 = (1/4, 0)
    auto lin = log_growth_experiment(flow_at(0.0), torus_observable::sin2pix(), torus_point(0.25, 0.0), 1e4, 2001);
    double lin_max = lin.max_abs();

    log_growth_options opt;
    opt.subtract_mean = true;
    auto s = log_growth_experiment(flow_at(-2.0), torus_observable::sin2pix(), torus_point(0.3, 0.7), 1e4, 61, opt);
    double early = s.max_ratio_between(1e2, 1e3), late = s.max_ratio_between(1e3, 1e4);
    bool ok = lin_max <= 0.31 && late <= 2.0 * early;
    return {ok,
            "beta 0: max |H| " + fmt_fixed(lin_max, 4) + "; beta -2: ratio " + fmt_fixed(early, 4) + " -> " +
                fmt_fixed(late, 4),
            {"beta -2: mean " + sci(s.mean) + ", mean drift x T_max " + sci(s.mean_residual) + ", K1 " +
                 fmt_fixed(s.k1, 4) + ", K2 " + fmt_fixed(s.k2, 4) + ", max |H| " + fmt_fixed(s.max_abs(), 4)}};
}

outcome orbit_order()
{
    auto rep = orbit_order_check(flow_at(-2.0), section(1, 1), 500, renormalized());
    bool ok = rep.order_isomorphic && rep.precondition_met;
    std::string detail = std::string(rep.order_isomorphic ? "order-isomorphic" : "mismatch at k = " + std::to_string(*rep.first_mismatch)) +
                         ", alpha " + fmt_fixed(rep.alpha, 10) + " +- " + sci(rep.alpha_error_bound) +
                         (rep.precondition_met ? "" : " (precondition not met)");
    return {ok, detail, {}};
}

outcome basin_image()
{
    namespace fs = std::filesystem;
    auto dir = fs::temp_directory_path() / "torusflow_acceptance";
    fs::create_directories(dir);
    run_config cfg;
    cfg.out_dir = dir.string();
    std::ostringstream sink;
    cfg.output = "basin_a.pgm";
    cmd_basin(cfg, sink, sink);
    cfg.output = "basin_b.pgm";
    cmd_basin(cfg, sink, sink);
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    };
    std::string a = slurp(dir / "basin_a.pgm"), b = slurp(dir / "basin_b.pgm");
    bool identical = !a.empty() && a == b;

    const std::size_t W = 512, H = 512;
    auto prm = cfg.dfa();
    auto img = render_basin(prm, W, H, cfg.basin());
    std::vector<std::size_t> undecided;
    for (std::size_t i = 0; i < img.size(); ++i)
        if (img[i] == 0) undecided.push_back(i);
    bool both = !undecided.empty() && undecided.size() < img.size();

    std::mt19937_64 rng(11);
    std::shuffle(undecided.begin(), undecided.end(), rng);
    std::size_t n = std::min<std::size_t>(1000, undecided.size()), stay = 0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t i = undecided[k];
        torus_point image = apply_f(pixel_center(i % W, i / W, W, H), prm);
        auto [col, row] = pixel_of(image, W, H);
        if (img[row * W + col] == 0) ++stay;
    }
    double invariance = n ? double(stay) / double(n) : 0.0;
    bool ok = identical && both && invariance >= 0.99;

    // recorded, not asserted: undecided area at a weaker and a stronger bump
    std::ostringstream areas;
    for (double beta : {-1.65, -2.0, -2.3}) {
        auto im = render_basin(map_at(beta), W, H, cfg.basin());
        areas << "beta " << beta << ": " << fmt_fixed(double(std::count(im.begin(), im.end(), 0)) / double(im.size()), 4)
              << "  ";
    }
    return {ok,
            std::string(identical ? "byte-identical" : "outputs differ") + ", undecided " +
                std::to_string(undecided.size()) + "/" + std::to_string(img.size()) + ", invariance " +
                fmt_fixed(100.0 * invariance, 1) + "% of " + std::to_string(n),
            {"undecided fraction by beta: " + areas.str()}};
}

} // namespace

int main()
{
    std::vector<criterion> all = {
        {1, "ostrowski decomposition", 5, ostrowski_suite},
        {2, "denjoy-koksma residuals", 30, denjoy_koksma_suite},
        {3, "circle log bound", 10, circle_log_bound},
        {4, "stable field contraction", 60, stable_field_contraction},
        {5, "flow/map commutation", 60, commutation},
        {6, "rotation number", 120, rotation_number_check},
        {7, "return time constancy", 60, return_time_constancy},
        {8, "integral vs birkhoff sum", 120, integral_vs_birkhoff},
        {9, "log growth of ergodic integrals", 600, log_growth},
        {10, "orbit order", 120, orbit_order},
        {11, "basin image", 0, basin_image},
    };
    int failures = 0;
    for (const auto& c : all) {
        auto t0 = std::chrono::steady_clock::now();
        outcome o;
        try {
            o = c.body();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what(), {}};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool in_time = c.budget_s <= 0.0 || secs < c.budget_s;
        bool pass = o.pass && in_time;
        failures += pass ? 0 : 1;
        std::string timing = fmt_fixed(secs, 1) + " s" + (c.budget_s > 0 ? " / " + fmt_fixed(c.budget_s, 0) + " s" : "");
        std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << c.id << "  " << c.name << ": " << o.detail << "  ["
                  << timing << (in_time ? "" : ", over budget") << "]" << std::endl;
        for (const auto& note : o.notes) std::cout << "        " << note << std::endl;
    }
    std::cout << (all.size() - failures) << "/" << all.size() << " criteria pass" << std::endl;
    return failures == 0 ? 0 : 1;
}
