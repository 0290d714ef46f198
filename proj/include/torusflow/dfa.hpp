#pragma once

// Derived-from-Anosov perturbation of the cat map: a radial bump added to the
// unstable eigenvalue, its Jacobian, the stable vector field obtained by
// pulling back e_s, and classification of the basin of the origin.

#include <torusflow/error.hpp>
#include <torusflow/torus.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace torusflow {

inline const double lambda = (1.0 + std::sqrt(5.0)) / 2.0;
inline const double lambda2 = lambda * lambda;
inline const double lambda_inv2 = 1.0 / lambda2;

/// Unit eigenvectors of A = [[2,1],[1,1]] for lambda^2 and lambda^-2.
inline const vec2 e_u = vec2{lambda, 1.0} * (1.0 / std::sqrt(1.0 + lambda2));
inline const vec2 e_s = vec2{-1.0, lambda} * (1.0 / std::sqrt(1.0 + lambda2));

struct mat2 {
    double a11 = 0, a12 = 0, a21 = 0, a22 = 0;

    vec2 operator*(vec2 v) const { return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y}; }
    friend mat2 operator*(const mat2& l, const mat2& r)
    {
        return {l.a11 * r.a11 + l.a12 * r.a21, l.a11 * r.a12 + l.a12 * r.a22,
                l.a21 * r.a11 + l.a22 * r.a21, l.a21 * r.a12 + l.a22 * r.a22};
    }
    mat2 transposed() const { return {a11, a21, a12, a22}; }
};

/// Columns e_u, e_s: maps eigen coordinates to canonical ones.
inline mat2 eigen_basis() { return {e_u.x, e_s.x, e_u.y, e_s.y}; }

/// Tangent vector in the orthonormal frame (e_u, e_s).
struct tangent_vector {
    double u = 0.0;
    double s = 0.0;

    vec2 canonical() const { return u * e_u + s * e_s; }
    static tangent_vector from_canonical(vec2 v) { return {dot(v, e_u), dot(v, e_s)}; }
    double norm() const { return std::hypot(u, s); }
};

enum class bump_kind { quartic, sextic };

inline std::string_view to_string(bump_kind k) { return k == bump_kind::quartic ? "quartic" : "sextic"; }

inline bump_kind parse_bump(std::string_view s)
{
    if (s == "quartic") return bump_kind::quartic;
    if (s == "sextic") return bump_kind::sextic;
    throw domain_error("unknown bump '" + std::string(s) + "' (expected quartic or sextic)");
}

/// Even unimodal bump on [-1,1] with k(0) = 1: (1-r^2)^2 or (1-r^2)^3.
struct bump {
    bump_kind kind = bump_kind::quartic;

    double value(double r) const
    {
        double w = 1.0 - r * r;
        if (w <= 0.0) return 0.0;
        return kind == bump_kind::quartic ? w * w : w * w * w;
    }

    /// k'(r)/r, finite at r = 0.
    double derivative_over_r(double r) const
    {
        double w = 1.0 - r * r;
        if (w <= 0.0) return 0.0;
        return kind == bump_kind::quartic ? -4.0 * w : -6.0 * w * w;
    }

    double derivative(double r) const { return r * derivative_over_r(r); }

    /// sup |k'(r)/r| over the support.
    double derivative_over_r_bound() const { return kind == bump_kind::quartic ? 4.0 : 6.0; }
};

struct dfa_params {
    double beta = -2.0;
    bump_kind bump_choice = bump_kind::quartic;
    /// The bump is k(|v| / bump_radius) for v the representative in [-1/2,1/2)^2.
    double bump_radius = 0.5;
    double series_tol = 1e-8;
    int series_max_terms = 200;

    /// Map is defined for -lambda^2 < beta <= 0.
    void validate() const
    {
        if (!(beta > -lambda2 && beta <= 0.0))
            throw domain_error("beta must lie in (-lambda^2, 0], got " + std::to_string(beta));
        if (!(bump_radius > 0.0 && bump_radius <= 0.5))
            throw domain_error("bump_radius must lie in (0, 1/2]");
        if (!(series_tol > 0.0)) throw domain_error("series_tol must be positive");
        if (series_max_terms < 1) throw domain_error("series_max_terms must be positive");
    }

    /// Window where the stable field is Lipschitz: (-lambda^2 + lambda^-4, 0].
    bool in_regularity_window() const { return beta > -lambda2 + lambda_inv2 * lambda_inv2 && beta <= 0.0; }

    /// Origin is an attracting fixed point for beta < 1 - lambda^2.
    bool origin_attracting() const { return beta > -lambda2 && beta < 1.0 - lambda2; }

    bump bump_fn() const { return bump{bump_choice}; }
};

/// Multiplier and partial derivatives of the e_u-coordinate of f at a centered point.
struct dfa_local {
    double u = 0.0;   ///< e_u coordinate of the point
    double s = 0.0;   ///< e_s coordinate of the point
    double m = 0.0;   ///< lambda^2 + beta k(r)
    double a = 0.0;   ///< d(u')/du
    double b = 0.0;   ///< d(u')/ds
};

inline dfa_local dfa_local_at(vec2 v, const dfa_params& prm)
{
    const bump k = prm.bump_fn();
    dfa_local l;
    l.u = dot(v, e_u);
    l.s = dot(v, e_s);
    double r = norm(v) / prm.bump_radius;
    double kr = k.value(r);
    double kor = k.derivative_over_r(r);
    double scale = prm.beta * kor / (prm.bump_radius * prm.bump_radius);
    l.m = lambda2 + prm.beta * kr;
    l.a = l.m + scale * l.u * l.u;
    l.b = scale * l.u * l.s;
    return l;
}

/// f_beta on R^2 evaluated at v (meant for v near [-1/2,1/2]^2), without wrapping.
inline vec2 apply_f_lift(vec2 v, const dfa_params& prm)
{
    double r = norm(v) / prm.bump_radius;
    if (prm.beta == 0.0 || r >= 1.0) return {2.0 * v.x + v.y, v.x + v.y};
    double m = lambda2 + prm.beta * prm.bump_fn().value(r);
    return (m * dot(v, e_u)) * e_u + (lambda_inv2 * dot(v, e_s)) * e_s;
}

inline torus_point apply_f(torus_point p, const dfa_params& prm)
{
    return torus_point(apply_f_lift(p.centered_rep(), prm));
}

/// Jacobian of f_beta at p in the (e_u, e_s) frame.
///
/// Differentiated in canonical coordinates and then conjugated into the
/// eigenframe, so the triangular shape is an outcome rather than an input.
inline mat2 jacobian(torus_point p, const dfa_params& prm)
{
    vec2 v = p.centered_rep();
    const bump k = prm.bump_fn();
    double r = norm(v) / prm.bump_radius;
    double u = dot(v, e_u);
    double m = lambda2 + prm.beta * k.value(r);
    double g = prm.beta * k.derivative_over_r(r) / (prm.bump_radius * prm.bump_radius);
    // J = m e_u e_u^T + lambda^-2 e_s e_s^T + u e_u (grad m)^T, grad m = g v
    mat2 j{m * e_u.x * e_u.x + lambda_inv2 * e_s.x * e_s.x + u * e_u.x * g * v.x,
           m * e_u.x * e_u.y + lambda_inv2 * e_s.x * e_s.y + u * e_u.x * g * v.y,
           m * e_u.y * e_u.x + lambda_inv2 * e_s.y * e_s.x + u * e_u.y * g * v.x,
           m * e_u.y * e_u.y + lambda_inv2 * e_s.y * e_s.y + u * e_u.y * g * v.y};
    mat2 basis = eigen_basis();
    return basis.transposed() * j * basis;
}

struct stable_field_value {
    tangent_vector v;
    int terms = 0;          ///< series terms summed
    double tail_bound = 0;  ///< bound on the neglected tail when the sum stopped
    bool local_tail = false; ///< stopped by the contracting-ball estimate near the origin
};

/// Stable vector field v^s = e_s - c e_u with
/// c = sum_i lambda^{-2i} b(f^i x) prod_{j<=i} 1/a(f^j x).
///
/// Two stopping rules. Globally, the running bound lambda^{-2i} sup|b| prod 1/a.
/// Near the origin, once the orbit sits in a ball where the bump multiplier is
/// below 1, all later terms are dominated by a geometric series of ratio
/// lambda^-4 m_max / (lambda^2 + beta); that bound is used when smaller.
inline stable_field_value stable_field_detail(torus_point p, const dfa_params& prm)
{
    if (!prm.in_regularity_window())
        throw domain_error("stable field requires beta in (-lambda^2 + lambda^-4, 0]");
    stable_field_value out;
    out.v.s = 1.0;
    if (prm.beta == 0.0) return out;

    const bump k = prm.bump_fn();
    const double radius2 = prm.bump_radius * prm.bump_radius;
    const double lip = std::abs(prm.beta) * k.derivative_over_r_bound() / radius2;
    // |u s| <= |v|^2/2 <= radius^2/2 on the support
    const double sup_b = lip * radius2 / 2.0;
    const double a_low = lambda2 + prm.beta;

    vec2 v = p.centered_rep();
    double c = 0.0;
    double weight = 1.0; // lambda^{-2i} prod_{j<i} 1/a_j
    for (int i = 0; i < prm.series_max_terms; ++i) {
        dfa_local l = dfa_local_at(v, prm);
        weight /= l.a;
        c += weight * l.b;
        out.terms = i + 1;

        double global_bound = weight * sup_b;
        if (global_bound < prm.series_tol) {
            out.v.u = -c;
            out.tail_bound = global_bound;
            return out;
        }

        v = torus_point(apply_f_lift(v, prm)).centered_rep();
        weight *= lambda_inv2;

        double rn = norm(v);
        double m_max = lambda2 + prm.beta * k.value(rn / prm.bump_radius);
        if (rn < prm.bump_radius && m_max < 1.0) {
            double ratio = lambda_inv2 * lambda_inv2 * m_max / a_low;
            if (ratio < 1.0) {
                double us = std::abs(dot(v, e_u) * dot(v, e_s));
                double local_bound = weight * lip * us / a_low / (1.0 - ratio);
                if (local_bound < prm.series_tol) {
                    out.v.u = -c;
                    out.tail_bound = local_bound;
                    out.local_tail = true;
                    return out;
                }
            }
        }
    }
    throw series_diverged("stable field series did not reach tolerance within " +
                          std::to_string(prm.series_max_terms) + " terms");
}

inline tangent_vector stable_field(torus_point p, const dfa_params& prm)
{
    return stable_field_detail(p, prm).v;
}

/// || Df(p) v^s(p) - lambda^-2 v^s(f(p)) ||.
inline double contraction_residual(torus_point p, const dfa_params& prm)
{
    tangent_vector here = stable_field(p, prm);
    tangent_vector there = stable_field(apply_f(p, prm), prm);
    mat2 j = jacobian(p, prm);
    vec2 pushed = j * vec2{here.u, here.s};
    return std::hypot(pushed.x - lambda_inv2 * there.u, pushed.y - lambda_inv2 * there.s);
}

enum class basin_state { attracted, escaped, undecided };

struct basin_result {
    basin_state state = basin_state::undecided;
    int iterations = 0; ///< iterate index at which the capture ball was entered
};

struct basin_options {
    int max_iter = 50;
    double capture_radius = 1e-3;
    int confirm_iter = 20;
};

/// Attracted when an iterate enters the capture ball and the next
/// confirm_iter iterates shrink monotonically toward 0.
inline basin_result basin_classify(torus_point p, const dfa_params& prm, const basin_options& opt = {})
{
    basin_result res;
    if (!prm.origin_attracting()) return res;
    vec2 v = p.centered_rep();
    for (int it = 0; it <= opt.max_iter; ++it) {
        double r = norm(v);
        if (r < opt.capture_radius) {
            bool contracting = true;
            vec2 w = v;
            for (int c = 0; c < opt.confirm_iter && contracting; ++c) {
                vec2 next = torus_point(apply_f_lift(w, prm)).centered_rep();
                contracting = norm(next) <= norm(w);
                w = next;
            }
            if (contracting) {
                res.state = basin_state::attracted;
                res.iterations = it;
                return res;
            }
        }
        v = torus_point(apply_f_lift(v, prm)).centered_rep();
    }
    return res;
}

/// Pixel (col,row) covers the fundamental domain [-1/2,1/2)^2, row 0 at the top.
inline torus_point pixel_center(std::size_t col, std::size_t row, std::size_t width, std::size_t height)
{
    double x = -0.5 + (static_cast<double>(col) + 0.5) / static_cast<double>(width);
    double y = 0.5 - (static_cast<double>(row) + 0.5) / static_cast<double>(height);
    return torus_point(x, y);
}

/// Inverse of pixel_center: the pixel containing p.
inline std::pair<std::size_t, std::size_t> pixel_of(torus_point p, std::size_t width, std::size_t height)
{
    vec2 c = p.centered_rep();
    auto col = static_cast<std::size_t>(std::floor((c.x + 0.5) * static_cast<double>(width)));
    auto row = static_cast<std::size_t>(std::floor((0.5 - c.y) * static_cast<double>(height)));
    return {std::min(col, width - 1), std::min(row, height - 1)};
}

/// Grayscale basin image, one byte per pixel, row-major: 255 attracted, 0 undecided.
inline std::vector<std::uint8_t> render_basin(const dfa_params& prm, std::size_t width, std::size_t height,
                                              const basin_options& opt = {})
{
    std::vector<std::uint8_t> img(width * height, 0);
    for (std::size_t row = 0; row < height; ++row)
        for (std::size_t col = 0; col < width; ++col)
            if (basin_classify(pixel_center(col, row, width, height), prm, opt).state == basin_state::attracted)
                img[row * width + col] = 255;
    return img;
}

} // namespace torusflow
