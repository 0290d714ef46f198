#pragma once

// Flat key=value run configuration shared by every subcommand.

#include <torusflow/cfrac.hpp>
#include <torusflow/dfa.hpp>
#include <torusflow/error.hpp>
#include <torusflow/flow.hpp>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace torusflow {

/// Malformed configuration or arguments.
class config_error : public error {
public:
    using error::error;
};

inline std::string trim(std::string_view s)
{
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

/// "golden", "silver", "lambda" or a decimal literal.
inline double parse_real(std::string_view text)
{
    std::string s = trim(text);
    if (s == "golden") return (std::sqrt(5.0) - 1.0) / 2.0;
    if (s == "silver") return std::sqrt(2.0) - 1.0;
    if (s == "lambda") return lambda;
    if (s.empty()) throw config_error("empty number");
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || !std::isfinite(v)) throw config_error("not a number: '" + s + "'");
    return v;
}

inline long long parse_integer(std::string_view text)
{
    std::string s = trim(text);
    double v = parse_real(s); // accepts 1e4
    if (v != std::floor(v) || std::abs(v) > 9.0e15) throw config_error("not an integer: '" + s + "'");
    return static_cast<long long>(v);
}

inline bool parse_bool(std::string_view text)
{
    std::string s = trim(text);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw config_error("not a boolean: '" + s + "'");
}

/// Environment variable overriding the output directory.
inline constexpr const char* out_dir_env = "TORUSFLOW_OUT_DIR";

struct run_config {
    double beta = -2.0;
    std::string bump = "quartic";
    double bump_radius = 0.5;
    double step = 1e-3;
    double series_tol = 1e-8;
    long long series_max_terms = 200;
    long long p = 1;
    long long q = 1;
    double t_max = 1e4;
    long long samples = 41;
    long long seed = 1;
    double x0 = 0.25;
    double y0 = 0.0;
    std::string observable = "sin2pix";
    std::string subtract_mean = "auto"; ///< auto: only for beta < 0
    double mean_horizon = 10.0;
    long long max_iter = 50;
    double capture_radius = 1e-3;
    long long confirm_iter = 20;
    long long width = 512;
    long long height = 512;
    long long n_iter = 2000;
    long long n_points = 500;
    bool renormalized = true;
    std::string alpha = "golden";
    std::string phi = "sin";
    long long q_max = 10000;
    long long max_terms = 40;
    std::string out_dir = ".";
    std::string output;

    /// Sets one key from its textual value.
    void set(std::string_view key, std::string_view value)
    {
        const auto& tab = setters();
        auto it = tab.find(std::string(key));
        if (it == tab.end()) throw config_error("unknown configuration key '" + std::string(key) + "'");
        it->second(*this, trim(value));
    }

    static std::vector<std::string> keys()
    {
        std::vector<std::string> k;
        for (const auto& [name, fn] : setters()) k.push_back(name);
        return k;
    }

    /// Reads key=value lines; '#' starts a comment.
    void load(std::istream& in, const std::string& origin = "config")
    {
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            std::string t = trim(line);
            if (t.empty()) continue;
            auto eq = t.find('=');
            if (eq == std::string::npos)
                throw config_error(origin + ":" + std::to_string(lineno) + ": expected key=value");
            try {
                set(trim(t.substr(0, eq)), t.substr(eq + 1));
            } catch (const config_error& e) {
                throw config_error(origin + ":" + std::to_string(lineno) + ": " + e.what());
            }
        }
    }

    void load_file(const std::string& path)
    {
        std::ifstream in(path);
        if (!in) throw config_error("cannot open config file '" + path + "'");
        load(in, path);
    }

    void apply_environment()
    {
        if (const char* d = std::getenv(out_dir_env); d && *d) out_dir = d;
    }

    void validate() const
    {
        if (!(beta > -lambda2 && beta <= 0.0)) throw config_error("beta must lie in (-lambda^2, 0]");
        parse_bump(bump);
        if (!(bump_radius > 0.0 && bump_radius <= 0.5)) throw config_error("bump_radius must lie in (0, 1/2]");
        if (!(step > 0.0)) throw config_error("step must be positive");
        if (!(series_tol > 0.0)) throw config_error("series_tol must be positive");
        if (series_max_terms < 1) throw config_error("series_max_terms must be positive");
        if (p < 1 || q < 1 || std::gcd(p, q) != 1) throw config_error("section p/q must be coprime positive integers");
        if (!(t_max > 0.0)) throw config_error("t_max must be positive");
        if (samples < 2) throw config_error("samples must be >= 2");
        if (subtract_mean != "auto" && subtract_mean != "true" && subtract_mean != "false")
            throw config_error("subtract_mean must be auto, true or false");
        if (max_iter < 0 || confirm_iter < 0) throw config_error("iteration counts must be non-negative");
        if (width < 1 || height < 1) throw config_error("image size must be positive");
        if (n_iter < 1 || n_points < 1) throw config_error("n_iter and n_points must be positive");
        if (q_max < 1) throw config_error("q_max must be positive");
        if (max_terms < 1) throw config_error("max_terms must be >= 1");
    }

    dfa_params dfa() const
    {
        dfa_params d;
        d.beta = beta;
        d.bump_choice = parse_bump(bump);
        d.bump_radius = bump_radius;
        d.series_tol = series_tol;
        d.series_max_terms = static_cast<int>(series_max_terms);
        return d;
    }

    flow_config flow() const { return {dfa(), step}; }
    section sec() const { return section(static_cast<int>(p), static_cast<int>(q)); }

    basin_options basin() const
    {
        return {static_cast<int>(max_iter), capture_radius, static_cast<int>(confirm_iter)};
    }

    bool mean_subtraction() const { return subtract_mean == "auto" ? beta < 0.0 : subtract_mean == "true"; }

    std::string output_path(const std::string& fallback) const
    {
        std::string name = output.empty() ? fallback : output;
        if (!name.empty() && name.front() == '/') return name;
        return out_dir + "/" + name;
    }

private:
    using setter = std::function<void(run_config&, const std::string&)>;

    static const std::map<std::string, setter>& setters()
    {
        static const std::map<std::string, setter> tab = {
            {"beta", [](run_config& c, const std::string& v) { c.beta = parse_real(v); }},
            {"bump", [](run_config& c, const std::string& v) { c.bump = v; }},
            {"bump_radius", [](run_config& c, const std::string& v) { c.bump_radius = parse_real(v); }},
            {"step", [](run_config& c, const std::string& v) { c.step = parse_real(v); }},
            {"series_tol", [](run_config& c, const std::string& v) { c.series_tol = parse_real(v); }},
            {"series_max_terms", [](run_config& c, const std::string& v) { c.series_max_terms = parse_integer(v); }},
            {"p", [](run_config& c, const std::string& v) { c.p = parse_integer(v); }},
            {"q", [](run_config& c, const std::string& v) { c.q = parse_integer(v); }},
            {"t_max", [](run_config& c, const std::string& v) { c.t_max = parse_real(v); }},
            {"samples", [](run_config& c, const std::string& v) { c.samples = parse_integer(v); }},
            {"seed", [](run_config& c, const std::string& v) { c.seed = parse_integer(v); }},
            {"x0", [](run_config& c, const std::string& v) { c.x0 = parse_real(v); }},
            {"y0", [](run_config& c, const std::string& v) { c.y0 = parse_real(v); }},
            {"observable", [](run_config& c, const std::string& v) { c.observable = v; }},
            {"subtract_mean", [](run_config& c, const std::string& v) { c.subtract_mean = v; }},
            {"mean_horizon", [](run_config& c, const std::string& v) { c.mean_horizon = parse_real(v); }},
            {"max_iter", [](run_config& c, const std::string& v) { c.max_iter = parse_integer(v); }},
            {"capture_radius", [](run_config& c, const std::string& v) { c.capture_radius = parse_real(v); }},
            {"confirm_iter", [](run_config& c, const std::string& v) { c.confirm_iter = parse_integer(v); }},
            {"width", [](run_config& c, const std::string& v) { c.width = parse_integer(v); }},
            {"height", [](run_config& c, const std::string& v) { c.height = parse_integer(v); }},
            {"n_iter", [](run_config& c, const std::string& v) { c.n_iter = parse_integer(v); }},
            {"n_points", [](run_config& c, const std::string& v) { c.n_points = parse_integer(v); }},
            {"renormalized", [](run_config& c, const std::string& v) { c.renormalized = parse_bool(v); }},
            {"alpha", [](run_config& c, const std::string& v) { c.alpha = v; }},
            {"phi", [](run_config& c, const std::string& v) { c.phi = v; }},
            {"q_max", [](run_config& c, const std::string& v) { c.q_max = parse_integer(v); }},
            {"max_terms", [](run_config& c, const std::string& v) { c.max_terms = parse_integer(v); }},
            {"out_dir", [](run_config& c, const std::string& v) { c.out_dir = v; }},
            {"output", [](run_config& c, const std::string& v) { c.output = v; }},
        };
        return tab;
    }
};

inline torus_observable make_torus_observable(std::string_view name)
{
    if (name == "sin2pix") return torus_observable::sin2pix();
    if (name == "cos2piy") return torus_observable::cos2piy();
    if (name == "sin2pixy") return torus_observable::sin2pixy();
    if (name == "zero") return torus_observable::constant(0.0);
    if (name == "one") return torus_observable::constant(1.0);
    throw config_error("unknown observable '" + std::string(name) + "' (sin2pix, cos2piy, sin2pixy, zero, one)");
}

inline observable_1d make_circle_observable(std::string_view name)
{
    if (name == "sin") return observable_1d::sin2pi();
    if (name == "cos") return observable_1d::cos2pi();
    if (name == "triangle") return observable_1d::triangle();
    if (name == "constant") return observable_1d::constant(1.0);
    throw config_error("unknown circle observable '" + std::string(name) + "' (sin, cos, triangle, constant)");
}

/// A real given either by name (high precision) or as an exact decimal.
struct real_input {
    std::string text;
    bool named = false;
    high_real value;
    std::uint64_t num = 0; ///< decimal inputs: value = num / den exactly
    std::uint64_t den = 1;
};

inline real_input parse_real_input(std::string_view text)
{
    real_input r;
    r.text = trim(text);
    if (r.text == "golden" || r.text == "silver" || r.text == "lambda") {
        r.named = true;
        r.value = r.text == "golden" ? golden_high() : r.text == "silver" ? silver_high() : lambda_high();
        return r;
    }
    // plain decimals only: digits, optional point, digits
    std::string intpart, fracpart;
    bool point = false;
    for (char ch : r.text) {
        if (ch == '.' && !point) point = true;
        else if (ch >= '0' && ch <= '9') (point ? fracpart : intpart) += ch;
        else throw config_error("expected a named constant or a plain decimal, got '" + r.text + "'");
    }
    if (intpart.empty() && fracpart.empty()) throw config_error("empty number");
    if (intpart.size() + fracpart.size() > 18) throw config_error("decimal input limited to 18 digits");
    std::uint64_t den = 1;
    for (std::size_t i = 0; i < fracpart.size(); ++i) den *= 10;
    std::uint64_t num = std::stoull((intpart.empty() ? "0" : intpart) + fracpart);
    std::uint64_t g = std::gcd(num, den);
    if (g == 0) g = 1;
    r.num = num / g;
    r.den = den / g;
    r.value = high_real(r.num) / high_real(r.den);
    return r;
}

} // namespace torusflow
