#pragma once

// The flow generated by the stable field v^s, its ergodic integrals, a
// rational-slope closed transversal through the origin and the first-return
// data on it.

#include <torusflow/circle.hpp>
#include <torusflow/dfa.hpp>
#include <torusflow/error.hpp>
#include <torusflow/torus.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace torusflow {

struct flow_config {
    dfa_params params;
    double step = 1e-3;

    bool step_valid() const { return step > 0.0 && step <= 1e-2; }
};

/// Observable on the torus with the norms the bounds need.
struct torus_observable {
    std::function<double(torus_point)> eval;
    double sup_abs = 0.0;
    double c1_norm = 0.0;
    std::string name;

    double operator()(torus_point p) const { return eval(p); }

    static torus_observable sin2pix()
    {
        return {[](torus_point p) { return std::sin(2.0 * std::numbers::pi * p.x()); }, 1.0,
                1.0 + 2.0 * std::numbers::pi, "sin2pix"};
    }
    static torus_observable cos2piy()
    {
        return {[](torus_point p) { return std::cos(2.0 * std::numbers::pi * p.y()); }, 1.0,
                1.0 + 2.0 * std::numbers::pi, "cos2piy"};
    }
    static torus_observable sin2pixy()
    {
        return {[](torus_point p) { return std::sin(2.0 * std::numbers::pi * (p.x() + p.y())); }, 1.0,
                1.0 + 2.0 * std::numbers::pi * std::numbers::sqrt2, "sin2pixy"};
    }
    static torus_observable constant(double c)
    {
        return {[c](torus_point) { return c; }, std::abs(c), std::abs(c), "constant"};
    }
    /// f - c
    torus_observable shifted(double c) const
    {
        auto f = eval;
        return {[f, c](torus_point p) { return f(p) - c; }, sup_abs + std::abs(c), c1_norm + std::abs(c),
                name + "-mean"};
    }
};

/// Closed transversal of slope p/q through the origin, theta -> theta (q,p) mod 1.
class section {
public:
    section(int p, int q) : p_(p), q_(q)
    {
        if (p < 1 || q < 1) throw domain_error("section needs p >= 1 and q >= 1");
        if (std::gcd(p, q) != 1) throw domain_error("section slope p/q must be in lowest terms");
    }

    int p() const { return p_; }
    int q() const { return q_; }
    double length() const { return std::hypot(double(p_), double(q_)); }
    /// w rotated counterclockwise by pi/2.
    vec2 normal() const { return vec2{-double(p_), double(q_)} * (1.0 / length()); }
    vec2 direction() const { return vec2{double(q_), double(p_)} * (1.0 / length()); }

    /// -p x + q y: integer exactly on the lifts of the curve.
    double level(vec2 z) const { return -double(p_) * z.x + double(q_) * z.y; }

    vec2 point(double theta) const { return {theta * q_, theta * p_}; }

    /// Lift coordinate of z, a point with level(z) = k: z = theta (q,p) + (m,n) with -p m + q n = k.
    double parameter(vec2 z, long long k) const
    {
        auto [m, n] = lattice_offset(k);
        vec2 d = z - vec2{double(m), double(n)};
        return (d.x * q_ + d.y * p_) / double(p_ * p_ + q_ * q_);
    }

private:
    /// One integer solution of -p m + q n = k.
    std::pair<long long, long long> lattice_offset(long long k) const
    {
        // extended Euclid on (q, p): q s + p t = 1  ->  n = s k, m = -t k
        long long old_r = q_, r = p_, old_s = 1, s = 0, old_t = 0, t = 1;
        while (r != 0) {
            long long quo = old_r / r;
            std::tie(old_r, r) = std::pair{r, old_r - quo * r};
            std::tie(old_s, s) = std::pair{s, old_s - quo * s};
            std::tie(old_t, t) = std::pair{t, old_t - quo * t};
        }
        return {-old_t * k, old_s * k};
    }

    int p_;
    int q_;
};

/// Vector field driving the integration: v^s, or v^s / <v^s, normal> when renormalized.
class flow_field {
public:
    flow_field(const flow_config& cfg) : params_(cfg.params) {}
    flow_field(const flow_config& cfg, const section& sec) : params_(cfg.params), normal_(sec.normal()) {}

    vec2 operator()(vec2 z) const
    {
        vec2 v = stable_field(torus_point(z), params_).canonical();
        if (normal_) v *= 1.0 / dot(v, *normal_);
        return v;
    }

    vec2 raw(vec2 z) const { return stable_field(torus_point(z), params_).canonical(); }
    bool renormalized() const { return normal_.has_value(); }

private:
    dfa_params params_;
    std::optional<vec2> normal_;
};

/// One classical Runge-Kutta step; k1 = field(z) supplied by the caller.
template <class Field>
vec2 rk4_step(const Field& field, vec2 z, vec2 k1, double h)
{
    vec2 k2 = field(z + (0.5 * h) * k1);
    vec2 k3 = field(z + (0.5 * h) * k2);
    vec2 k4 = field(z + h * k3);
    return z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

namespace detail {

/// Split |T| into whole steps and a remainder.
inline std::pair<std::uint64_t, double> step_plan(double T, double h)
{
    double a = std::abs(T);
    auto n = static_cast<std::uint64_t>(std::floor(a / h * (1.0 + 1e-12)));
    double rem = a - static_cast<double>(n) * h;
    if (rem < 1e-12 * std::max(a, 1.0)) rem = 0.0;
    return {n, rem};
}

/// Simpson on one step with the Hermite midpoint from the end slopes.
inline vec2 hermite_mid(vec2 z0, vec2 z1, vec2 d0, vec2 d1, double h)
{
    return 0.5 * (z0 + z1) + (h / 8.0) * (d0 - d1);
}

} // namespace detail

struct trajectory_end {
    vec2 position;        ///< lift position
    double integral = 0;  ///< integral of the observable, if any
};

/// Integrates z' = field(z) for time T (any sign) from the lift point z0,
/// accumulating the integral of f when given.
template <class Field>
trajectory_end integrate_lift(const Field& field, vec2 z0, double T, double step, const torus_observable* f = nullptr)
{
    auto [n, rem] = detail::step_plan(T, step);
    double sgn = T < 0 ? -1.0 : 1.0;
    double h = sgn * step;
    trajectory_end out{z0, 0.0};
    vec2 z = z0;
    vec2 d = field(z);
    auto advance = [&](double hh) {
        vec2 z1 = rk4_step(field, z, d, hh);
        vec2 d1 = field(z1);
        if (f) {
            vec2 mid = detail::hermite_mid(z, z1, d, d1, hh);
            out.integral += hh / 6.0 * ((*f)(torus_point(z)) + 4.0 * (*f)(torus_point(mid)) + (*f)(torus_point(z1)));
        }
        z = z1;
        d = d1;
    };
    for (std::uint64_t i = 0; i < n; ++i) advance(h);
    if (rem > 0.0) advance(sgn * rem);
    out.position = z;
    return out;
}

inline torus_point integrate(const flow_config& cfg, torus_point x0, double T)
{
    flow_field field(cfg);
    return torus_point(integrate_lift(field, x0.unit_square(), T, cfg.step).position);
}

/// H_{x,T}(f) = int_0^T f(h_t x) dt.
inline double ergodic_integral(const flow_config& cfg, const torus_observable& f, torus_point x, double T)
{
    if (T < 0) throw domain_error("ergodic_integral needs T >= 0");
    flow_field field(cfg);
    return integrate_lift(field, x.unit_square(), T, cfg.step, &f).integral;
}

/// Torus distance between f(h_t x) and h_{t/lambda^2}(f x).
inline double commutation_residual(const flow_config& cfg, torus_point x, double t)
{
    torus_point lhs = apply_f(integrate(cfg, x, t), cfg.params);
    torus_point rhs = integrate(cfg, apply_f(x, cfg.params), lambda_inv2 * t);
    return torus_distance(lhs, rhs);
}

struct return_data {
    double theta = 0.0;   ///< parameter of the crossing in [0,1)
    double lift = 0.0;    ///< continuous lift of the return map at the start parameter
    double time = 0.0;    ///< return time u
    double integral = 0.0; ///< int_0^u f along the segment, when an observable is given
    double normal_speed = 0.0; ///< <v^s, normal> at the crossing
};

struct return_options {
    bool renormalized = false;
    double margin_min = 1e-2;
    double horizon_factor = 10.0;
    int bisection_iterations = 60;
};

namespace detail {

struct crossing_result {
    vec2 z;
    double time = 0.0;
    double integral = 0.0;
    long long level = 0;
};

/// Steps from z0 until dir * (level - target) >= 0, then bisects the last
/// step length to place the crossing.
template <class Field>
crossing_result run_to_crossing(const Field& field, const section& sec, vec2 z0, long long target, double dir,
                                       double h, double horizon, int bisect, const torus_observable* f)
{
    crossing_result out;
    out.level = target;
    vec2 z = z0;
    vec2 d = field(z);
    double t = 0.0;
    auto past = [&](vec2 w) { return dir * (sec.level(w) - double(target)) >= 0.0; };
    while (std::abs(t) < horizon) {
        vec2 z1 = rk4_step(field, z, d, h);
        if (past(z1)) {
            double lo = 0.0, hi = std::abs(h);
            double sg = h < 0 ? -1.0 : 1.0;
            for (int i = 0; i < bisect; ++i) {
                double midh = 0.5 * (lo + hi);
                if (past(rk4_step(field, z, d, sg * midh))) hi = midh;
                else lo = midh;
            }
            double hh = sg * hi;
            vec2 zc = rk4_step(field, z, d, hh);
            if (f) {
                vec2 dc = field(zc);
                vec2 mid = hermite_mid(z, zc, d, dc, hh);
                out.integral += hh / 6.0 * ((*f)(torus_point(z)) + 4.0 * (*f)(torus_point(mid)) + (*f)(torus_point(zc)));
            }
            out.z = zc;
            out.time = t + hh;
            return out;
        }
        vec2 d1 = field(z1);
        if (f) {
            vec2 mid = hermite_mid(z, z1, d, d1, h);
            out.integral += h / 6.0 * ((*f)(torus_point(z)) + 4.0 * (*f)(torus_point(mid)) + (*f)(torus_point(z1)));
        }
        z = z1;
        d = d1;
        t += h;
    }
    throw no_crossing("no crossing of the section within time " + std::to_string(horizon));
}

} // namespace detail

/// Sign of the normal component of v^s along the section, and its smallest magnitude.
struct transversality {
    double orientation = 1.0;
    double margin = 0.0;
};

inline transversality transversality_margin(const flow_config& cfg, const section& sec, std::size_t samples = 256)
{
    transversality tr;
    double lo = 1e300, hi = -1e300;
    vec2 nrm = sec.normal();
    for (std::size_t i = 0; i < samples; ++i) {
        double theta = static_cast<double>(i) / static_cast<double>(samples);
        double c = dot(stable_field(torus_point(sec.point(theta)), cfg.params).canonical(), nrm);
        lo = std::min(lo, c);
        hi = std::max(hi, c);
    }
    if (lo > 0) {
        tr.orientation = 1.0;
        tr.margin = lo;
    } else if (hi < 0) {
        tr.orientation = -1.0;
        tr.margin = -hi;
    } else {
        tr.margin = 0.0;
    }
    return tr;
}

/// First forward return to the section from parameter theta.
inline return_data first_return(const flow_config& cfg, const section& sec, double theta,
                                const return_options& opt = {}, const torus_observable* f = nullptr)
{
    flow_field field = opt.renormalized ? flow_field(cfg, sec) : flow_field(cfg);
    double base = std::floor(theta);
    double th = theta - base;
    vec2 z0 = sec.point(th);
    vec2 nrm = sec.normal();
    double speed0 = dot(field.raw(z0), nrm);
    if (std::abs(speed0) < opt.margin_min)
        throw transversality_lost("normal speed " + std::to_string(speed0) + " below margin at departure");
    double dir = speed0 > 0 ? 1.0 : -1.0;
    double norm_speed = opt.renormalized ? 1.0 : std::abs(speed0);
    double expected = 1.0 / (sec.length() * norm_speed);
    auto target = static_cast<long long>(dir);
    auto cr = detail::run_to_crossing(field, sec, z0, target, dir, cfg.step, opt.horizon_factor * expected,
                                      opt.bisection_iterations, f);
    return_data r;
    r.normal_speed = dot(field.raw(cr.z), nrm);
    if (std::abs(r.normal_speed) < opt.margin_min)
        throw transversality_lost("normal speed " + std::to_string(r.normal_speed) + " below margin at crossing");
    r.lift = base + sec.parameter(cr.z, target);
    r.theta = frac(r.lift);
    r.time = cr.time;
    r.integral = cr.integral;
    return r;
}

/// g(theta) = int_0^{u(theta)} f(h_t(theta)) dt.
inline double section_observable(const flow_config& cfg, const section& sec, const torus_observable& f, double theta,
                                 const return_options& opt = {})
{
    return first_return(cfg, sec, theta, opt, &f).integral;
}

/// Return map of the (possibly renormalized) flow as a circle map.
inline circle_map return_map(const flow_config& cfg, const section& sec, const return_options& opt = {})
{
    return circle_map([cfg, sec, opt](double theta) { return first_return(cfg, sec, theta, opt).lift; },
                      circle_map_kind::return_map);
}

struct return_map_data {
    circle_map map;
    std::vector<double> grid;      ///< theta values
    std::vector<double> images;    ///< R(theta) lifts
    std::vector<double> times;     ///< u(theta)
    double tau = 0.0;              ///< mean return time
    double inf_u = 0.0;
    double sup_u = 0.0;
    double relative_stddev = 0.0;  ///< stddev(u)/mean(u) on the grid
};

/// Samples R and u on `samples` evenly spaced parameters.
inline return_map_data build_return_map(const flow_config& cfg, const section& sec, std::size_t samples,
                                        const return_options& opt = {})
{
    return_map_data d{return_map(cfg, sec, opt), {}, {}, {}, 0.0, 1e300, 0.0, 0.0};
    for (std::size_t i = 0; i < samples; ++i) {
        double theta = static_cast<double>(i) / static_cast<double>(samples);
        return_data r = first_return(cfg, sec, theta, opt);
        d.grid.push_back(theta);
        d.images.push_back(r.lift);
        d.times.push_back(r.time);
        d.inf_u = std::min(d.inf_u, r.time);
        d.sup_u = std::max(d.sup_u, r.time);
    }
    double mean = std::accumulate(d.times.begin(), d.times.end(), 0.0) / static_cast<double>(samples);
    double var = 0.0;
    for (double u : d.times) var += (u - mean) * (u - mean);
    d.tau = mean;
    d.relative_stddev = std::sqrt(var / static_cast<double>(samples)) / mean;
    return d;
}

/// y = h_tau(x) with x on the section and 0 <= tau below the return time.
struct section_decomposition {
    double theta = 0.0;
    double tau = 0.0;
};

/// Integrates backward from y to the most recent section crossing, giving up
/// after time `cap`.
inline section_decomposition decompose_to_section(const flow_config& cfg, const section& sec, torus_point y,
                                                  double cap, const return_options& opt = {})
{
    flow_field field = opt.renormalized ? flow_field(cfg, sec) : flow_field(cfg);
    vec2 z = y.unit_square();
    double lv = sec.level(z);
    double dir = dot(field(z), sec.normal()) > 0 ? 1.0 : -1.0;
    // forward motion increases dir * level; the last crossing is the integer behind
    double nearest = std::round(lv);
    if (std::abs(lv - nearest) < 1e-14) return {frac(sec.parameter(z, static_cast<long long>(nearest))), 0.0};
    long long target = dir > 0 ? static_cast<long long>(std::floor(lv)) : static_cast<long long>(std::ceil(lv));
    auto cr = detail::run_to_crossing(field, sec, z, target, -dir, -cfg.step, cap, opt.bisection_iterations, nullptr);
    return {frac(sec.parameter(cr.z, target)), std::abs(cr.time)};
}

struct link_report {
    std::uint64_t n = 0;          ///< full returns fitting in [0,T] from theta
    double n_lower = 0.0;         ///< T/sup u - 1
    double n_upper = 0.0;         ///< T/inf u
    double theta = 0.0;
    double tau = 0.0;
    double integral = 0.0;        ///< H_{theta,T}(f)
    double birkhoff = 0.0;        ///< sum_{k<n} g(R^k theta)
    double gap = 0.0;             ///< |integral - birkhoff|
    double shifted_integral = 0.0; ///< H_{theta,T+tau}(f)
    double start_integral = 0.0;  ///< H_{y,T}(f)
    double shift_gap = 0.0;       ///< |H_{theta,T+tau} - H_{y,T}|
    double sup_u = 0.0;
    double inf_u = 0.0;
    double bound = 0.0;           ///< sup u * sup |f|
    bool n_in_range = false;
    bool holds = false;

    bool within(double slack) const { return n_in_range && gap <= bound + slack && shift_gap <= bound + slack; }
};

/// Compares the ergodic integral with the Birkhoff sum of the section
/// observable. sup u and inf u start from the given bounds and are widened by
/// every return time met along the way.
inline link_report compare_integral_to_birkhoff(const flow_config& cfg, const section& sec, const torus_observable& f,
                                                torus_point y, double T, double sup_u, double inf_u,
                                                const return_options& opt = {}, double slack = 1e-4)
{
    link_report rep;
    auto dec = decompose_to_section(cfg, sec, y, 1.5 * sup_u, opt);
    rep.theta = dec.theta;
    rep.tau = dec.tau;
    sup_u = std::max(sup_u, dec.tau);

    double theta = dec.theta;
    double elapsed = 0.0;
    std::uint64_t n = 0;
    double birkhoff = 0.0;
    while (true) {
        return_data r = first_return(cfg, sec, theta, opt, &f);
        sup_u = std::max(sup_u, r.time);
        inf_u = std::min(inf_u, r.time);
        if (elapsed + r.time > T) break;
        elapsed += r.time;
        birkhoff += r.integral;
        theta = r.theta;
        ++n;
    }
    flow_field field = opt.renormalized ? flow_field(cfg, sec) : flow_field(cfg);
    vec2 start = sec.point(dec.theta);
    rep.integral = integrate_lift(field, start, T, cfg.step, &f).integral;
    rep.shifted_integral = integrate_lift(field, start, T + dec.tau, cfg.step, &f).integral;
    rep.start_integral = integrate_lift(field, y.unit_square(), T, cfg.step, &f).integral;

    rep.n = n;
    rep.birkhoff = birkhoff;
    rep.gap = std::abs(rep.integral - birkhoff);
    rep.shift_gap = std::abs(rep.shifted_integral - rep.start_integral);
    rep.sup_u = sup_u;
    rep.inf_u = inf_u;
    rep.bound = sup_u * f.sup_abs;
    rep.n_lower = T / sup_u - 1.0;
    rep.n_upper = T / inf_u;
    rep.n_in_range = double(n) >= rep.n_lower - 1e-12 && double(n) <= rep.n_upper + 1e-12;
    rep.holds = rep.within(slack);
    return rep;
}

struct orbit_order_report {
    bool order_isomorphic = false;
    std::optional<std::size_t> first_mismatch; ///< smallest k whose rank differs
    double alpha = 0.0;            ///< rotation used for the rigid orbit
    double alpha_error_bound = 0.0;
    bool precondition_met = false; ///< alpha_error_bound < 1/(2 n^2)
};

/// Rank of each point of a finite circle orbit in the order of [0,1).
inline std::vector<std::size_t> circular_ranks(const std::vector<double>& pts)
{
    std::vector<std::size_t> idx(pts.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return pts[a] < pts[b]; });
    std::vector<std::size_t> rank(pts.size());
    for (std::size_t r = 0; r < idx.size(); ++r) rank[idx[r]] = r;
    return rank;
}

/// Compares the order of {R^k(0)}_{k<n} with that of {k alpha mod 1}_{k<n}.
inline orbit_order_report compare_orbit_order(const std::vector<double>& orbit, double alpha)
{
    orbit_order_report rep;
    rep.alpha = alpha;
    std::vector<double> rigid(orbit.size());
    for (std::size_t k = 0; k < orbit.size(); ++k) rigid[k] = frac(static_cast<double>(k) * alpha);
    auto ra = circular_ranks(orbit);
    auto rb = circular_ranks(rigid);
    for (std::size_t k = 0; k < orbit.size(); ++k) {
        if (ra[k] != rb[k]) {
            rep.first_mismatch = k;
            break;
        }
    }
    rep.order_isomorphic = !rep.first_mismatch.has_value();
    return rep;
}

/// Orbit of 0 under the return map against the rigid rotation by the
/// estimated rotation number (the bracket midpoint from `rotation_iters`
/// iterates), optionally offset for negative controls.
inline orbit_order_report orbit_order_check(const flow_config& cfg, const section& sec, std::size_t n_points,
                                            const return_options& opt = {}, std::size_t rotation_iters = 0,
                                            double alpha_offset = 0.0)
{
    circle_map R = return_map(cfg, sec, opt);
    if (rotation_iters == 0) rotation_iters = std::max<std::size_t>(4 * n_points, 2000);
    rotation_estimate rho = rotation_number(R, rotation_iters, 0.0, 32);
    std::vector<double> orbit = circle_orbit(R, 0.0, n_points);
    orbit_order_report rep = compare_orbit_order(orbit, frac(rho.bracket_midpoint()) + alpha_offset);
    rep.alpha_error_bound = rho.bracket_half_width();
    double n = static_cast<double>(n_points);
    rep.precondition_met = rep.alpha_error_bound < 1.0 / (2.0 * n * n);
    return rep;
}

struct ergodic_series {
    std::vector<double> times;
    std::vector<double> values;   ///< H_{x,T_i}(f - mean)
    double mean = 0.0;            ///< subtracted mean
    double mean_drift = 0.0;      ///< |mean(T*) - mean(T*/2)|
    double mean_residual = 0.0;   ///< T_max * mean_drift
    bool mean_dominates = false;  ///< mean_residual larger than log(1+T_max)
    double k1 = 0.0;              ///< least-squares slope of |H| against log(1+T)
    double k2 = 0.0;              ///< intercept
    double max_ratio = 0.0;       ///< max |H_i| / log(1+T_i)

    /// max |H_i|/log(1+T_i) over lo <= T_i <= hi.
    double max_ratio_between(double lo, double hi) const
    {
        double best = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i)
            if (times[i] >= lo && times[i] <= hi) best = std::max(best, std::abs(values[i]) / std::log1p(times[i]));
        return best;
    }
    double max_abs() const
    {
        double best = 0.0;
        for (double v : values) best = std::max(best, std::abs(v));
        return best;
    }
};

struct log_growth_options {
    bool subtract_mean = false;
    double mean_horizon_factor = 10.0;
    double t_min = 1.0;
};

/// Samples T -> H_{x,T}(f) at `samples` geometric times in [t_min, T_max]
/// along one trajectory and fits |H| ~ K1 log(1+T) + K2. With subtract_mean
/// the same trajectory is continued to T* = factor * T_max and H_{x,T*}/T* is
/// subtracted.
inline ergodic_series log_growth_experiment(const flow_config& cfg, const torus_observable& f, torus_point x,
                                            double t_max, std::size_t samples, const log_growth_options& opt = {})
{
    if (samples < 2) throw domain_error("log_growth_experiment needs at least 2 samples");
    flow_field field(cfg);
    ergodic_series s;
    std::vector<double> targets(samples);
    double ratio = std::pow(t_max / opt.t_min, 1.0 / static_cast<double>(samples - 1));
    for (std::size_t i = 0; i < samples; ++i) targets[i] = opt.t_min * std::pow(ratio, static_cast<double>(i));
    targets.back() = t_max;

    vec2 z = x.unit_square();
    double t = 0.0, h = 0.0;
    std::vector<double> raw;
    auto run_to = [&](double target) {
        auto seg = integrate_lift(field, z, target - t, cfg.step, &f);
        z = seg.position;
        h += seg.integral;
        t = target;
    };
    for (double T : targets) {
        run_to(T);
        s.times.push_back(T);
        raw.push_back(h);
    }
    if (opt.subtract_mean) {
        double horizon = opt.mean_horizon_factor * t_max;
        run_to(0.5 * horizon);
        double half_mean = h / t;
        run_to(horizon);
        s.mean = h / t;
        s.mean_drift = std::abs(s.mean - half_mean);
        s.mean_residual = t_max * s.mean_drift;
        s.mean_dominates = s.mean_residual > std::log1p(t_max);
    }
    for (std::size_t i = 0; i < raw.size(); ++i) s.values.push_back(raw[i] - s.mean * s.times[i]);

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double n = static_cast<double>(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        double lx = std::log1p(s.times[i]);
        double ly = std::abs(s.values[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        s.max_ratio = std::max(s.max_ratio, ly / lx);
    }
    double den = n * sxx - sx * sx;
    s.k1 = den != 0.0 ? (n * sxy - sx * sy) / den : 0.0;
    s.k2 = (sy - s.k1 * sx) / n;
    return s;
}

} // namespace torusflow
