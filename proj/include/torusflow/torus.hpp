#pragma once

#include <cmath>

namespace torusflow {

struct vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr vec2& operator+=(vec2 o) { x += o.x; y += o.y; return *this; }
    constexpr vec2& operator-=(vec2 o) { x -= o.x; y -= o.y; return *this; }
    constexpr vec2& operator*=(double c) { x *= c; y *= c; return *this; }

    friend constexpr vec2 operator+(vec2 a, vec2 b) { return a += b; }
    friend constexpr vec2 operator-(vec2 a, vec2 b) { return a -= b; }
    friend constexpr vec2 operator-(vec2 a) { return {-a.x, -a.y}; }
    friend constexpr vec2 operator*(double c, vec2 a) { return a *= c; }
    friend constexpr vec2 operator*(vec2 a, double c) { return a *= c; }
    friend constexpr bool operator==(vec2, vec2) = default;
};

constexpr double dot(vec2 a, vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(vec2 a) { return std::hypot(a.x, a.y); }

/// Fractional part in [0,1).
inline double frac(double x)
{
    double f = x - std::floor(x);
    // x slightly negative can round to exactly 1.0
    return f < 1.0 ? f : 0.0;
}

/// Representative in [-1/2, 1/2).
inline double centered(double x)
{
    double c = x - std::floor(x + 0.5);
    return c < 0.5 ? c : c - 1.0;
}

/// Point of T^2 = R^2/Z^2, stored as its representative in [0,1)^2.
class torus_point {
public:
    constexpr torus_point() = default;
    torus_point(double x, double y) : x_(frac(x)), y_(frac(y)) {}
    explicit torus_point(vec2 v) : torus_point(v.x, v.y) {}

    double x() const { return x_; }
    double y() const { return y_; }
    vec2 unit_square() const { return {x_, y_}; }
    /// Representative in [-1/2,1/2)^2.
    vec2 centered_rep() const { return {centered(x_), centered(y_)}; }

    friend bool operator==(const torus_point&, const torus_point&) = default;

private:
    double x_ = 0.0;
    double y_ = 0.0;
};

/// Shortest displacement from a to b on the torus.
inline vec2 torus_delta(torus_point a, torus_point b)
{
    return {centered(b.x() - a.x()), centered(b.y() - a.y())};
}

inline double torus_distance(torus_point a, torus_point b)
{
    return norm(torus_delta(a, b));
}

} // namespace torusflow
