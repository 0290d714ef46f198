#pragma once

// Continued fractions of reals in (0,1), convergent denominators, and the
// greedy decomposition of integers over those denominators.

#include <torusflow/error.hpp>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace torusflow {

/// 256-bit binary float used for expansions.
using high_real = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<256, boost::multiprecision::digit_base_2>,
    boost::multiprecision::et_off>;

inline constexpr int high_real_bits = 256;

inline high_real golden_high() { return (boost::multiprecision::sqrt(high_real(5)) - 1) / 2; }
inline high_real silver_high() { return boost::multiprecision::sqrt(high_real(2)) - 1; }
inline high_real lambda_high() { return (boost::multiprecision::sqrt(high_real(5)) + 1) / 2; }

struct continued_fraction {
    std::vector<std::uint64_t> quotients; ///< a_1, a_2, ...
    int precision_bits = 0;
    bool truncated = false;  ///< stopped before max_terms because precision ran out
    bool terminated = false; ///< exact expansion ended (rational input)

    std::size_t size() const { return quotients.size(); }
};

namespace detail {

inline high_real widen_down(const high_real& v, const high_real& eps) { return v - boost::multiprecision::abs(v) * eps; }
inline high_real widen_up(const high_real& v, const high_real& eps) { return v + boost::multiprecision::abs(v) * eps; }

} // namespace detail

/// Partial quotients of x, emitting a_k only while every real in the
/// uncertainty interval of the current remainder has the same integer part.
///
/// x is taken to carry relative error 2^-(bits-8); the interval is widened by
/// the same amount after each reciprocal. An exactly representable x whose
/// expansion ends is reported as terminated.
inline continued_fraction expand(const high_real& x, std::size_t max_terms, int precision_bits = high_real_bits)
{
    if (max_terms < 1) throw domain_error("max_terms must be >= 1");
    if (!(x > 0 && x < 1)) throw domain_error("continued fraction input must lie in (0,1)");
    precision_bits = std::min(precision_bits, high_real_bits);
    const high_real eps = boost::multiprecision::ldexp(high_real(1), -(precision_bits - 8));

    continued_fraction cf;
    cf.precision_bits = precision_bits;
    high_real lo = detail::widen_down(x, eps);
    high_real hi = detail::widen_up(x, eps);
    high_real mid = x;

    while (cf.quotients.size() < max_terms) {
        // center expansion terminates: mid = 1/a exactly
        high_real inv_mid = 1 / mid;
        high_real a_mid = boost::multiprecision::floor(inv_mid);
        if (a_mid * mid == 1 && inv_mid == a_mid) {
            cf.quotients.push_back(static_cast<std::uint64_t>(a_mid));
            cf.terminated = true;
            break;
        }
        if (lo <= 0) {
            cf.truncated = true;
            break;
        }
        high_real inv_lo = detail::widen_down(1 / hi, eps);
        high_real inv_hi = detail::widen_up(1 / lo, eps);
        high_real a = boost::multiprecision::floor(inv_lo);
        if (boost::multiprecision::floor(inv_hi) != a || a > high_real(std::numeric_limits<std::uint64_t>::max())) {
            cf.truncated = true;
            break;
        }
        cf.quotients.push_back(static_cast<std::uint64_t>(a));
        lo = inv_lo - a;
        hi = inv_hi - a;
        mid = inv_mid - a;
        if (mid <= 0) {
            cf.truncated = true;
            break;
        }
    }

    if (cf.quotients.size() < 2) {
        if (cf.terminated)
            throw precision_exhausted("expansion terminates after a_1 = " + std::to_string(cf.quotients.front()) +
                                      " (rational input)");
        throw precision_exhausted("fewer than 2 reliable partial quotients at " + std::to_string(precision_bits) +
                                  " bits");
    }
    return cf;
}

inline continued_fraction expand(double x, std::size_t max_terms)
{
    // a double carries 53 bits
    return expand(high_real(x), max_terms, 53);
}

/// Exact expansion of num/den by the Euclidean algorithm.
inline continued_fraction expand_rational(std::uint64_t num, std::uint64_t den, std::size_t max_terms)
{
    if (max_terms < 1) throw domain_error("max_terms must be >= 1");
    if (den == 0 || num == 0 || num >= den) throw domain_error("rational input must lie in (0,1)");
    continued_fraction cf;
    cf.precision_bits = 64;
    while (num != 0 && cf.quotients.size() < max_terms) {
        cf.quotients.push_back(den / num);
        std::uint64_t r = den % num;
        den = num;
        num = r;
    }
    cf.terminated = num == 0;
    return cf;
}

struct convergent {
    std::uint64_t p = 0;
    std::uint64_t q = 1;
};

/// Convergents p_k/q_k = [0; a_1..a_k] for k = 0..K.
struct convergent_table {
    std::vector<convergent> entries;

    std::size_t size() const { return entries.size(); }
    std::uint64_t q(std::size_t k) const { return entries.at(k).q; }
    std::uint64_t p(std::size_t k) const { return entries.at(k).p; }
};

namespace detail {

inline std::uint64_t checked_mul_add(std::uint64_t a, std::uint64_t b, std::uint64_t c)
{
    std::uint64_t prod = 0, sum = 0;
    if (__builtin_mul_overflow(a, b, &prod) || __builtin_add_overflow(prod, c, &sum))
        throw overflow_error("convergent exceeds 64-bit range");
    return sum;
}

} // namespace detail

/// q_0 = 1, q_1 = a_1, q_{k+1} = a_{k+1} q_k + q_{k-1}; same recursion for p with p_0 = 0, p_1 = 1.
inline convergent_table convergents(const continued_fraction& cf)
{
    convergent_table t;
    t.entries.reserve(cf.size() + 1);
    std::uint64_t p_prev = 1, q_prev = 0; // index -1
    std::uint64_t p = 0, q = 1;          // index 0
    t.entries.push_back({p, q});
    for (std::uint64_t a : cf.quotients) {
        std::uint64_t p_next = detail::checked_mul_add(a, p, p_prev);
        std::uint64_t q_next = detail::checked_mul_add(a, q, q_prev);
        p_prev = p;
        q_prev = q;
        p = p_next;
        q = q_next;
        t.entries.push_back({p, q});
    }
    return t;
}

/// Largest partial quotient in the window. A finite window bounds the
/// quotients it contains; it cannot certify constant type.
inline std::uint64_t constant_type_bound(const continued_fraction& cf)
{
    if (cf.quotients.empty()) throw domain_error("empty continued fraction");
    return *std::max_element(cf.quotients.begin(), cf.quotients.end());
}

struct decomposition {
    std::uint64_t target = 0;
    std::vector<std::uint64_t> digits; ///< n_0..n_N
    std::size_t top = 0;               ///< N

    std::uint64_t block_count() const
    {
        std::uint64_t s = 0;
        for (auto d : digits) s += d;
        return s;
    }
};

/// Greedy division from the largest denominator q_N <= m downward:
/// r_{N+1} = m, r_{k+1} = n_k q_k + r_k with 0 <= r_k < q_k.
///
/// When a_1 = 1 the table repeats q_0 = q_1 = 1; N is then the lowest index
/// carrying the largest denominator not exceeding m.
inline decomposition ostrowski_decompose(std::uint64_t m, const convergent_table& table)
{
    if (m < 1) throw domain_error("decomposition target must be >= 1");
    const auto& e = table.entries;
    std::size_t top = e.size();
    for (std::size_t k = 0; k + 1 < e.size(); ++k) {
        if (e[k].q <= m && m < e[k + 1].q) {
            top = k;
            break;
        }
    }
    if (top == e.size()) throw table_too_short("no convergent bracket q_k <= m < q_{k+1} for m = " + std::to_string(m));
    while (top > 0 && e[top - 1].q == e[top].q) --top;

    decomposition d;
    d.target = m;
    d.top = top;
    d.digits.assign(top + 1, 0);
    std::uint64_t r = m;
    for (std::size_t k = top + 1; k-- > 0;) {
        d.digits[k] = r / e[k].q;
        r %= e[k].q;
    }
    return d;
}

struct decomposition_report {
    bool reconstruction_exact = false;
    bool top_index_bound = false; ///< N < 4 log(m+1)/log 2
    std::uint64_t max_digit = 0;
    bool digit_bound = false;     ///< every digit <= B + 1
};

inline decomposition_report verify_decomposition(const decomposition& d, const convergent_table& table, std::uint64_t B)
{
    decomposition_report rep;
    if (d.digits.size() > table.size()) return rep;
    unsigned __int128 sum = 0;
    for (std::size_t k = 0; k < d.digits.size(); ++k) {
        sum += static_cast<unsigned __int128>(d.digits[k]) * table.q(k);
        rep.max_digit = std::max(rep.max_digit, d.digits[k]);
    }
    rep.reconstruction_exact = sum == d.target;
    rep.top_index_bound = static_cast<double>(d.top) < 4.0 * std::log(static_cast<double>(d.target) + 1.0) / std::log(2.0);
    rep.digit_bound = rep.max_digit <= B + 1;
    return rep;
}

} // namespace torusflow
