#pragma once

// Circle maps given by degree-one lifts: Birkhoff sums, rotation numbers,
// the Denjoy-Koksma residual and the blockwise bound over convergent
// denominators.

#include <torusflow/cfrac.hpp>
#include <torusflow/error.hpp>
#include <torusflow/torus.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace torusflow {

enum class circle_map_kind { rigid_rotation, return_map, other };

class circle_map {
public:
    using lift_fn = std::function<double(double)>;

    static circle_map rotation(double alpha)
    {
        circle_map m([alpha](double x) { return x + alpha; }, circle_map_kind::rigid_rotation);
        m.alpha_ = alpha;
        return m;
    }

    /// lift must satisfy F(x+1) = F(x)+1; it is only ever called on [0,1).
    circle_map(lift_fn lift, circle_map_kind kind = circle_map_kind::other)
        : lift_(std::move(lift)), kind_(kind)
    {
    }

    circle_map_kind kind() const { return kind_; }
    std::optional<double> alpha() const { return alpha_; }

    /// F(x) for any real x.
    double lift(double x) const
    {
        double fl = std::floor(x);
        return fl + lift_(x - fl);
    }

    double operator()(double x) const { return frac(lift(x)); }

private:
    lift_fn lift_;
    circle_map_kind kind_;
    std::optional<double> alpha_;
};

struct observable_1d {
    std::function<double(double)> eval;
    double variation = 0.0;
    std::optional<double> mean;
    double sup_abs = 0.0;
    std::string name;

    double operator()(double x) const { return eval(x); }

    static observable_1d sin2pi()
    {
        return {[](double x) { return std::sin(2.0 * std::numbers::pi * x); }, 4.0, 0.0, 1.0, "sin"};
    }
    static observable_1d cos2pi()
    {
        return {[](double x) { return std::cos(2.0 * std::numbers::pi * x); }, 4.0, 0.0, 1.0, "cos"};
    }
    /// -1 at 0, +1 at 1/2, piecewise linear.
    static observable_1d triangle()
    {
        return {[](double x) { return 1.0 - 4.0 * std::abs(frac(x) - 0.5); }, 4.0, 0.0, 1.0, "triangle"};
    }
    static observable_1d constant(double c)
    {
        return {[c](double) { return c; }, 0.0, c, std::abs(c), "constant"};
    }
};

struct variation_estimate {
    double value = 0.0;
    std::size_t grid_points = 0;
    bool converged = false;
};

/// Total variation around the circle on a uniform grid, doubled from 2^16
/// points until the relative change drops below rel_tol.
inline variation_estimate estimate_variation(const std::function<double(double)>& phi, double rel_tol = 1e-3,
                                             int first_log2 = 16, int last_log2 = 22)
{
    auto tv = [&](std::size_t n) {
        double total = 0.0;
        double first = phi(0.0);
        double prev = first;
        for (std::size_t i = 1; i < n; ++i) {
            double cur = phi(static_cast<double>(i) / static_cast<double>(n));
            total += std::abs(cur - prev);
            prev = cur;
        }
        return total + std::abs(first - prev);
    };
    variation_estimate est;
    std::size_t n = std::size_t{1} << first_log2;
    est.value = tv(n);
    est.grid_points = n;
    for (int l = first_log2 + 1; l <= last_log2; ++l) {
        n <<= 1;
        double refined = tv(n);
        double change = std::abs(refined - est.value);
        est.value = refined;
        est.grid_points = n;
        if (change <= rel_tol * std::max(std::abs(refined), 1e-300)) {
            est.converged = true;
            break;
        }
    }
    return est;
}

struct lift_check {
    double max_degree_defect = 0.0;
    bool monotone = true;
};

/// Degree-one and monotonicity of the lift on `samples` evenly spaced points.
inline lift_check check_lift(const circle_map& map, std::size_t samples)
{
    lift_check c;
    double prev = 0.0;
    double first = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        double x = static_cast<double>(i) / static_cast<double>(samples);
        double fx = map.lift(x);
        if (i == 0) first = fx;
        else if (!(fx > prev)) c.monotone = false;
        prev = fx;
    }
    double f1 = map.lift(1.0);
    c.max_degree_defect = std::abs(f1 - first - 1.0);
    if (!(f1 > prev)) c.monotone = false;
    return c;
}

/// S_n phi(x) = sum_{k<n} phi(map^k x).
inline double birkhoff_sum(const circle_map& map, const observable_1d& phi, double x, std::uint64_t n)
{
    double sum = 0.0;
    double y = frac(x);
    for (std::uint64_t k = 0; k < n; ++k) {
        sum += phi(y);
        y = map(y);
    }
    return sum;
}

/// Orbit x, map(x), ..., map^{n-1}(x) on the circle.
inline std::vector<double> circle_orbit(const circle_map& map, double x, std::size_t n)
{
    std::vector<double> orbit;
    orbit.reserve(n);
    double y = frac(x);
    for (std::size_t k = 0; k < n; ++k) {
        orbit.push_back(y);
        y = map(y);
    }
    return orbit;
}

struct mean_estimate {
    double mean = 0.0;
    double tolerance = 0.0; ///< 1/n, folded into assertions
};

/// Invariant-measure mean of phi as a Birkhoff average of length n.
inline mean_estimate invariant_mean(const circle_map& map, const observable_1d& phi, double x = 0.0,
                                    std::uint64_t n = 1000000)
{
    if (n < 1) throw domain_error("invariant_mean needs n >= 1");
    return {birkhoff_sum(map, phi, x, n) / static_cast<double>(n), 1.0 / static_cast<double>(n)};
}

struct rotation_estimate {
    double estimate = 0.0;    ///< (F^n(x0) - x0)/n
    double error_bound = 0.0; ///< 1/n
    double lower = 0.0;       ///< max_k floor(F^k(x0)-x0)/k
    double upper = 0.0;       ///< min_k (floor(F^k(x0)-x0)+1)/k
    std::size_t iterations = 0;

    double reduced() const { return frac(estimate); }
    double bracket_midpoint() const { return 0.5 * (lower + upper); }
    double bracket_half_width() const { return 0.5 * (upper - lower); }
};

/// Rotation number from one orbit of the lift. Besides the plain average,
/// every iterate k constrains k*rho to [floor(d_k), floor(d_k)+1] where d_k
/// is the lift displacement; the intersection is a Farey-type bracket of
/// width O(1/n^2).
inline rotation_estimate rotation_number(const circle_map& map, std::size_t n_iter, double x0 = 0.0,
                                         std::size_t lift_samples = 64)
{
    if (n_iter < 1) throw domain_error("rotation_number needs n_iter >= 1");
    if (lift_samples > 0) {
        lift_check c = check_lift(map, lift_samples);
        if (!c.monotone || c.max_degree_defect > 1e-9)
            throw non_monotone_lift("lift is not a degree-one increasing map");
    }
    rotation_estimate est;
    est.iterations = n_iter;
    est.lower = -1e300;
    est.upper = 1e300;
    double y = frac(x0);
    double displacement = 0.0;
    for (std::size_t k = 1; k <= n_iter; ++k) {
        double fy = map.lift(y);
        displacement += fy - y;
        y = frac(fy);
        double fl = std::floor(displacement);
        est.lower = std::max(est.lower, fl / static_cast<double>(k));
        est.upper = std::min(est.upper, (fl + 1.0) / static_cast<double>(k));
    }
    if (est.lower > est.upper) throw non_monotone_lift("orbit is inconsistent with a circle homeomorphism");
    est.estimate = displacement / static_cast<double>(n_iter);
    est.error_bound = 1.0 / static_cast<double>(n_iter);
    return est;
}

/// |S_q phi(x) - q mean|.
inline double dk_residual(const circle_map& map, const observable_1d& phi, double x, std::uint64_t q, double mean)
{
    return std::abs(birkhoff_sum(map, phi, x, q) - static_cast<double>(q) * mean);
}

struct block_sum_report {
    double sum = 0.0;          ///< S_n (phi - mean)(x)
    double bound = 0.0;        ///< (number of DK blocks) * Var(phi)
    double log_bound = 0.0;    ///< 4 B Var(phi) log(n) / log 2
    double sup_abs = 0.0;      ///< slack for the single term outside the blocks
    std::size_t top = 0;       ///< N of the decomposition of n-1
    std::uint64_t blocks = 0;  ///< sum of digits
    std::uint64_t max_digit = 0;
    double max_block_residual = 0.0;
    bool blocks_within_variation = true; ///< every block residual < Var (<= when Var = 0)
    bool holds = false;        ///< |sum| <= bound + sup|phi| and |sum| <= log_bound + sup|phi|
};

/// Splits the first n-1 terms of S_n into blocks of length q_l following the
/// decomposition of n-1 (smallest denominators first), applies Denjoy-Koksma
/// to every block, and adds the leftover term.
inline block_sum_report decomposed_sum_bound(const circle_map& map, const observable_1d& phi, double x, std::uint64_t n,
                                             const convergent_table& table, std::uint64_t B, double mean = 0.0)
{
    if (n < 2) throw domain_error("decomposed_sum_bound needs n >= 2");
    decomposition d = ostrowski_decompose(n - 1, table);
    block_sum_report rep;
    rep.top = d.top;
    rep.blocks = d.block_count();
    for (auto digit : d.digits) rep.max_digit = std::max(rep.max_digit, digit);
    rep.sup_abs = phi.sup_abs + std::abs(mean);

    double y = frac(x);
    double total = 0.0;
    for (std::size_t l = 0; l < d.digits.size(); ++l) {
        for (std::uint64_t rep_m = 0; rep_m < d.digits[l]; ++rep_m) {
            double block = 0.0;
            for (std::uint64_t k = 0; k < table.q(l); ++k) {
                block += phi(y) - mean;
                y = map(y);
            }
            total += block;
            double r = std::abs(block);
            rep.max_block_residual = std::max(rep.max_block_residual, r);
            bool ok = phi.variation > 0.0 ? r < phi.variation : r <= phi.variation;
            rep.blocks_within_variation = rep.blocks_within_variation && ok;
        }
    }
    total += phi(y) - mean;
    rep.sum = total;
    rep.bound = static_cast<double>(rep.blocks) * phi.variation;
    rep.log_bound = 4.0 * static_cast<double>(B) * phi.variation / std::log(2.0) * std::log(static_cast<double>(n));
    double a = std::abs(rep.sum);
    rep.holds = a <= rep.bound + rep.sup_abs && a <= rep.log_bound + rep.sup_abs;
    return rep;
}

} // namespace torusflow
