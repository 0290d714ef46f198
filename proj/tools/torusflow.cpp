// torusflow: command-line front end.

#include <torusflow/commands.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace {

using namespace torusflow;

struct subcommand {
    CLI::App* app = nullptr;
    std::string config_file;
    std::map<std::string, std::string> overrides;
};

const std::map<std::string, std::string>& key_help()
{
    static const std::map<std::string, std::string> help = {
        {"beta", "bump strength in (-lambda^2, 0]"},
        {"bump", "bump profile: quartic or sextic"},
        {"bump_radius", "bump support radius in (0, 1/2]"},
        {"step", "RK4 step (at most 1e-2)"},
        {"series_tol", "stable-field series tolerance"},
        {"series_max_terms", "stable-field series term cap"},
        {"p", "section slope numerator"},
        {"q", "section slope denominator"},
        {"t_max", "largest integration time"},
        {"samples", "number of samples"},
        {"seed", "seed for all pseudo-random choices"},
        {"x0", "start point x"},
        {"y0", "start point y"},
        {"observable", "sin2pix, cos2piy, sin2pixy, zero or one"},
        {"subtract_mean", "auto, true or false"},
        {"mean_horizon", "mean estimated at this multiple of t_max"},
        {"max_iter", "iterates before a pixel counts as undecided"},
        {"capture_radius", "radius of the ball around the origin"},
        {"confirm_iter", "monotone iterates required after capture"},
        {"width", "image width in pixels"},
        {"height", "image height in pixels"},
        {"n_iter", "iterates for the rotation number"},
        {"n_points", "number of points"},
        {"renormalized", "use the renormalized field (true/false)"},
        {"alpha", "rotation: golden, silver or lambda"},
        {"phi", "sin, cos, triangle or constant"},
        {"q_max", "largest convergent denominator"},
        {"out_dir", "output directory (also $TORUSFLOW_OUT_DIR)"},
        {"output", "output file; CSV commands default to stdout"},
    };
    return help;
}

std::string flag_name(std::string key)
{
    std::replace(key.begin(), key.end(), '_', '-');
    return "--" + key;
}

subcommand& add_subcommand(CLI::App& app, std::vector<std::unique_ptr<subcommand>>& subs, const std::string& name,
                           const std::string& description, const std::vector<std::string>& keys)
{
    subs.push_back(std::make_unique<subcommand>());
    subcommand& s = *subs.back();
    s.app = app.add_subcommand(name, description);
    s.app->add_option("--config", s.config_file, "key=value configuration file");
    for (const auto& key : keys)
        s.app->add_option_function<std::string>(
            flag_name(key), [&s, key](const std::string& v) { s.overrides[key] = v; }, key_help().at(key));
    return s;
}

run_config resolve(const subcommand& s)
{
    run_config cfg;
    if (!s.config_file.empty()) cfg.load_file(s.config_file);
    cfg.apply_environment();
    for (const auto& [k, v] : s.overrides) cfg.set(k, v);
    cfg.validate();
    return cfg;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Logarithmic bounds for ergodic integrals of a torus flow"};
    app.require_subcommand(1);

    const std::vector<std::string> map_keys = {"beta", "bump", "bump_radius", "series_tol", "series_max_terms"};
    auto with = [&](std::vector<std::string> extra, bool flow) {
        std::vector<std::string> k = map_keys;
        if (flow) k.push_back("step");
        k.insert(k.end(), extra.begin(), extra.end());
        return k;
    };

    std::vector<std::unique_ptr<subcommand>> subs;

    auto& cfrac = add_subcommand(app, subs, "cfrac", "continued fraction, convergents and window bound", {});
    std::string cfrac_input;
    long long max_terms = run_config{}.max_terms;
    cfrac.app->add_option("x", cfrac_input, "real in decimal form or golden, silver, lambda")->required();
    cfrac.app->add_option("--max-terms", max_terms, "number of partial quotients");

    auto& dk = add_subcommand(app, subs, "dk", "Denjoy-Koksma residuals as CSV (q,x,residual,var)",
                              {"alpha", "phi", "q_max", "n_points", "seed", "out_dir", "output"});
    auto& logbound = add_subcommand(
        app, subs, "logbound", "ergodic integrals as CSV (T,H,H/log(1+T)) with fitted K1, K2",
        with({"observable", "x0", "y0", "t_max", "samples", "subtract_mean", "mean_horizon", "out_dir", "output"},
             true));
    auto& basin = add_subcommand(
        app, subs, "basin", "basin of the origin as a binary graymap (255 attracted, 0 undecided)",
        with({"max_iter", "capture_radius", "confirm_iter", "width", "height", "out_dir", "output"}, false));
    auto& poincare = add_subcommand(app, subs, "poincare", "return map R, return time u and rotation number",
                                    with({"p", "q", "samples", "n_iter", "renormalized", "out_dir", "output"}, true));
    auto& orbit = add_subcommand(app, subs, "orbit-order", "order of the return-map orbit against a rigid rotation",
                                 with({"p", "q", "n_points", "n_iter", "renormalized"}, true));
    auto& verify = add_subcommand(app, subs, "verify", "invariant suite over all modules",
                                  with({"p", "q", "seed"}, true));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*cfrac.app) {
            resolve(cfrac); // a broken config file is still an error
            return cmd_cfrac(cfrac_input, max_terms, std::cout, std::cerr);
        }
        if (*dk.app) return cmd_dk(resolve(dk), std::cout, std::cerr);
        if (*logbound.app) return cmd_logbound(resolve(logbound), std::cout, std::cerr);
        if (*basin.app) return cmd_basin(resolve(basin), std::cout, std::cerr);
        if (*poincare.app) return cmd_poincare(resolve(poincare), std::cout, std::cerr);
        if (*orbit.app) return cmd_orbit_order(resolve(orbit), std::cout, std::cerr);
        if (*verify.app) return cmd_verify(resolve(verify), std::cout, std::cerr);
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const torusflow::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_failure;
    }
    return exit_usage;
}
