#include <torusflow/dfa.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace torusflow;

namespace {

dfa_params with_beta(double beta)
{
    dfa_params p;
    p.beta = beta;
    return p;
}

torus_point random_point(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double x = u(rng);
    return torus_point(x, u(rng));
}

vec2 cat(vec2 v) { return {2.0 * v.x + v.y, v.x + v.y}; }

} // namespace

TEST(Torus, WrapIsIdempotent)
{
    for (double x : {-3.25, -0.5, 0.0, 0.999999, 1.0, 7.75}) {
        torus_point p(x, -x);
        torus_point q(p.x(), p.y());
        EXPECT_EQ(p, q);
        EXPECT_GE(p.x(), 0.0);
        EXPECT_LT(p.x(), 1.0);
        vec2 c = p.centered_rep();
        EXPECT_GE(c.x, -0.5);
        EXPECT_LT(c.x, 0.5);
    }
}

TEST(TangentVector, BasisChangeIsIsometry)
{
    EXPECT_NEAR(dot(e_u, e_s), 0.0, 1e-15);
    EXPECT_NEAR(norm(e_u), 1.0, 1e-15);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    for (int i = 0; i < 1000; ++i) {
        vec2 v{g(rng), g(rng)};
        auto t = tangent_vector::from_canonical(v);
        EXPECT_NEAR(t.norm(), norm(v), 1e-12);
        EXPECT_NEAR(norm(t.canonical() - v), 0.0, 1e-12);
    }
}

TEST(Eigenvectors, CatMapEigenpairs)
{
    vec2 au = cat(e_u), as = cat(e_s);
    EXPECT_NEAR(norm(au - lambda2 * e_u), 0.0, 1e-14);
    EXPECT_NEAR(norm(as - lambda_inv2 * e_s), 0.0, 1e-14);
}

TEST(ApplyF, Examples)
{
    for (double beta : {0.0, -1.0, -2.0, -2.5}) {
        torus_point o = apply_f(torus_point(0, 0), with_beta(beta));
        EXPECT_EQ(o.x(), 0.0);
        EXPECT_EQ(o.y(), 0.0);
    }
    auto lin = with_beta(0.0);
    torus_point a = apply_f(torus_point(0.5, 0.0), lin);
    EXPECT_NEAR(torus_distance(a, torus_point(0.0, 0.5)), 0.0, 1e-15);
    torus_point b = apply_f(torus_point(0.1, 0.2), lin);
    EXPECT_NEAR(torus_distance(b, torus_point(0.4, 0.3)), 0.0, 1e-15);
}

TEST(ApplyF, LinearCaseIsCatMap)
{
    std::mt19937_64 rng(2);
    auto lin = with_beta(0.0);
    for (int i = 0; i < 1000; ++i) {
        torus_point p = random_point(rng);
        torus_point expect(cat(p.unit_square()));
        EXPECT_LT(torus_distance(apply_f(p, lin), expect), 1e-14);
    }
}

TEST(ApplyF, EqualsCatMapOutsideBump)
{
    std::mt19937_64 rng(3);
    auto prm = with_beta(-2.0);
    int tested = 0;
    for (int i = 0; i < 2000; ++i) {
        torus_point p = random_point(rng);
        if (norm(p.centered_rep()) < prm.bump_radius) continue;
        ++tested;
        EXPECT_LT(torus_distance(apply_f(p, prm), torus_point(cat(p.unit_square()))), 1e-14);
    }
    EXPECT_GT(tested, 100);
}

TEST(ApplyF, ContinuousAcrossFundamentalDomainEdge)
{
    // the bump vanishes before the edge, so both representatives agree
    auto prm = with_beta(-2.0);
    for (double y : {-0.4, -0.1, 0.0, 0.2, 0.45}) {
        torus_point left(-0.5 + 1e-9, y), right(0.5 - 1e-9, y);
        EXPECT_LT(torus_distance(apply_f(left, prm), apply_f(right, prm)), 1e-8);
    }
}

TEST(Bump, ShapeConditions)
{
    for (bump_kind kind : {bump_kind::quartic, bump_kind::sextic}) {
        bump k{kind};
        EXPECT_EQ(k.value(0.0), 1.0);
        double worst = -1e300;
        for (int i = 0; i <= 10000; ++i) {
            double r = -1.2 + 2.4 * i / 10000.0;
            EXPECT_EQ(k.value(r), k.value(-r));
            if (std::abs(r) >= 1.0) {
                EXPECT_EQ(k.value(r), 0.0);
            }
            worst = std::max(worst, k.value(r) + r * k.derivative(r));
            // k'(r)/r matches a central difference of k
            if (std::abs(r) < 0.99 && std::abs(r) > 1e-3) {
                double fd = (k.value(r + 1e-6) - k.value(r - 1e-6)) / 2e-6;
                EXPECT_NEAR(k.derivative(r), fd, 1e-7);
            }
            EXPECT_LE(std::abs(k.derivative_over_r(r)), k.derivative_over_r_bound());
        }
        EXPECT_LE(worst, 1.0 + 1e-12) << to_string(kind);
    }
    EXPECT_EQ(parse_bump("sextic"), bump_kind::sextic);
    EXPECT_THROW(parse_bump("gaussian"), domain_error);
}

TEST(Params, Windows)
{
    EXPECT_NO_THROW(with_beta(-2.0).validate());
    EXPECT_NO_THROW(with_beta(0.0).validate());
    EXPECT_THROW(with_beta(0.1).validate(), domain_error);
    EXPECT_THROW(with_beta(-lambda2).validate(), domain_error);
    EXPECT_TRUE(with_beta(-2.3).in_regularity_window());
    EXPECT_FALSE(with_beta(-2.5).in_regularity_window());
    EXPECT_TRUE(with_beta(-2.0).origin_attracting());
    EXPECT_FALSE(with_beta(-1.5).origin_attracting());
}

TEST(Jacobian, LinearCaseIsDiagonal)
{
    std::mt19937_64 rng(4);
    auto lin = with_beta(0.0);
    for (int i = 0; i < 100; ++i) {
        mat2 j = jacobian(random_point(rng), lin);
        EXPECT_NEAR(j.a11, lambda2, 1e-12);
        EXPECT_NEAR(j.a12, 0.0, 1e-12);
        EXPECT_NEAR(j.a21, 0.0, 1e-12);
        EXPECT_NEAR(j.a22, lambda_inv2, 1e-12);
    }
}

TEST(Jacobian, UpperTriangularEverywhere)
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> beta(-lambda2 + 1e-6, 0.0);
    for (int i = 0; i < 10000; ++i) {
        auto prm = with_beta(beta(rng));
        mat2 j = jacobian(random_point(rng), prm);
        ASSERT_LT(std::abs(j.a21), 1e-12);
        ASSERT_LT(std::abs(j.a22 - lambda_inv2), 1e-12);
    }
}

TEST(Jacobian, MatchesFiniteDifferences)
{
    std::mt19937_64 rng(6);
    const double h = 1e-6;
    for (bump_kind kind : {bump_kind::quartic, bump_kind::sextic}) {
        auto prm = with_beta(-2.0);
        prm.bump_choice = kind;
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            torus_point p = random_point(rng);
            vec2 v = p.centered_rep();
            mat2 j = jacobian(p, prm);
            auto column = [&](vec2 dir) {
                vec2 d = apply_f_lift(v + h * dir, prm) - apply_f_lift(v - h * dir, prm);
                return tangent_vector::from_canonical(d * (0.5 / h));
            };
            auto cu = column(e_u), cs = column(e_s);
            worst = std::max({worst, std::abs(cu.u - j.a11), std::abs(cu.s - j.a21), std::abs(cs.u - j.a12),
                              std::abs(cs.s - j.a22)});
        }
        EXPECT_LT(worst, 1e-6) << to_string(kind);
    }
}

TEST(Jacobian, LocalEntriesAgree)
{
    std::mt19937_64 rng(7);
    auto prm = with_beta(-2.3);
    for (int i = 0; i < 200; ++i) {
        torus_point p = random_point(rng);
        mat2 j = jacobian(p, prm);
        dfa_local l = dfa_local_at(p.centered_rep(), prm);
        EXPECT_NEAR(j.a11, l.a, 1e-12);
        EXPECT_NEAR(j.a12, l.b, 1e-12);
    }
}

TEST(FixedPoints, SaddleOnUnstableAxisExpands)
{
    // m(r*) = lambda^2 + beta k(r*) = 1 along e_u: a fixed point of f outside the basin
    const double beta = -2.0;
    auto prm = with_beta(beta);
    double k_star = (lambda2 - 1.0) / -beta;
    double r_star = std::sqrt(1.0 - std::sqrt(k_star));
    vec2 v = (r_star * prm.bump_radius) * e_u;
    torus_point p(v);
    EXPECT_LT(torus_distance(apply_f(p, prm), p), 1e-14);
    dfa_local l = dfa_local_at(v, prm);
    EXPECT_NEAR(l.m, 1.0, 1e-14);
    // a = 1 + beta k'(r*) r*: independent closed form
    double a_closed = 1.0 + beta * (-4.0 * r_star * (1.0 - r_star * r_star)) * r_star;
    EXPECT_NEAR(l.a, a_closed, 1e-12);
    EXPECT_GT(l.a, 1.0);
    EXPECT_NE(basin_classify(p, prm).state, basin_state::attracted);
    // on the axis b = 0, so the eigenvector for lambda^-2 is e_s itself
    EXPECT_NEAR(stable_field(p, prm).u, 0.0, 1e-12);
    EXPECT_LT(contraction_residual(p, prm), 1e-12);
}

TEST(FixedPoints, PeriodThreeOrbitOutsideBump)
{
    // (1/2,1/2) -> (1/2,0) -> (0,1/2): never inside the bump, so in K with a = lambda^2
    auto prm = with_beta(-2.0);
    torus_point p(0.5, 0.5);
    torus_point q = p;
    for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(dfa_local_at(q.centered_rep(), prm).a, lambda2, 1e-12);
        q = apply_f(q, prm);
    }
    EXPECT_LT(torus_distance(q, p), 1e-14);
}

TEST(StableField, LinearCaseIsEs)
{
    std::mt19937_64 rng(8);
    auto lin = with_beta(0.0);
    for (int i = 0; i < 100; ++i) {
        auto v = stable_field(random_point(rng), lin);
        EXPECT_EQ(v.u, 0.0);
        EXPECT_EQ(v.s, 1.0);
        EXPECT_EQ(norm(v.canonical() - e_s), 0.0);
    }
}

TEST(StableField, UnitStableComponent)
{
    std::mt19937_64 rng(9);
    for (double beta : {-1.7, -2.0, -2.3}) {
        auto prm = with_beta(beta);
        for (int i = 0; i < 500; ++i) {
            auto d = stable_field_detail(random_point(rng), prm);
            ASSERT_EQ(d.v.s, 1.0);
            ASSERT_LE(d.terms, prm.series_max_terms);
            ASSERT_LT(d.tail_bound, prm.series_tol);
        }
    }
}

TEST(StableField, SelfConsistentAtTighterTolerance)
{
    auto prm = with_beta(-2.0);
    auto tight = prm;
    tight.series_tol = prm.series_tol / 100.0;
    torus_point p(0.3, 0.3);
    EXPECT_NEAR(stable_field(p, prm).u, stable_field(p, tight).u, prm.series_tol);
    std::mt19937_64 rng(10);
    for (int i = 0; i < 200; ++i) {
        torus_point r = random_point(rng);
        ASSERT_NEAR(stable_field(r, prm).u, stable_field(r, tight).u, prm.series_tol);
    }
}

TEST(StableField, OriginFixedPointEquation)
{
    // at 0 the Jacobian is diag(lambda^2 + beta, lambda^-2): the lambda^-2 eigenvector is e_s
    for (double beta : {-1.7, -2.0, -2.3}) {
        auto prm = with_beta(beta);
        torus_point o(0.0, 0.0);
        mat2 j = jacobian(o, prm);
        EXPECT_NEAR(j.a11, lambda2 + beta, 1e-12);
        EXPECT_NEAR(j.a12, 0.0, 1e-15);
        double u_fixed = -j.a12 / (j.a11 - lambda_inv2);
        EXPECT_NEAR(stable_field(o, prm).u, u_fixed, 1e-15);
        EXPECT_LT(contraction_residual(o, prm), 1e-15);
    }
}

TEST(StableField, Errors)
{
    EXPECT_THROW(stable_field(torus_point(0.1, 0.2), with_beta(-2.5)), domain_error);
    auto prm = with_beta(-2.0);
    prm.series_max_terms = 1;
    EXPECT_THROW(stable_field(torus_point(0.3, 0.1), prm), series_diverged);
}

TEST(StableField, ContinuousInBeta)
{
    std::mt19937_64 rng(11);
    for (double beta : {-1.7, -2.0, -2.3}) {
        auto a = with_beta(beta), b = with_beta(beta + 1e-3);
        for (int i = 0; i < 200; ++i) {
            torus_point p = random_point(rng);
            ASSERT_LT(norm(stable_field(p, a).canonical() - stable_field(p, b).canonical()), 1e-1);
        }
    }
}

TEST(Contraction, LinearCaseVanishes)
{
    std::mt19937_64 rng(12);
    for (int i = 0; i < 100; ++i) EXPECT_LT(contraction_residual(random_point(rng), with_beta(0.0)), 1e-15);
}

TEST(Contraction, ResidualBelowToleranceScale)
{
    std::mt19937_64 rng(13);
    for (bump_kind kind : {bump_kind::quartic, bump_kind::sextic}) {
        for (double beta : {-1.7, -2.0, -2.3}) {
            auto prm = with_beta(beta);
            prm.bump_choice = kind;
            double worst = 0.0;
            for (int i = 0; i < 1000; ++i) worst = std::max(worst, contraction_residual(random_point(rng), prm));
            EXPECT_LT(worst, 1e-6) << beta;
            EXPECT_LT(worst, 10.0 * prm.series_tol) << beta;
        }
    }
}

TEST(Basin, OriginAndLinearCase)
{
    auto prm = with_beta(-2.0);
    auto r = basin_classify(torus_point(0, 0), prm);
    EXPECT_EQ(r.state, basin_state::attracted);
    EXPECT_EQ(r.iterations, 0);
    EXPECT_EQ(basin_classify(torus_point(0.1, 0.2), with_beta(0.0)).state, basin_state::undecided);
    EXPECT_EQ(basin_classify(torus_point(0.0, 0.0), with_beta(-1.5)).state, basin_state::undecided);
}

TEST(Basin, PixelGridConventions)
{
    torus_point c = pixel_center(0, 0, 1, 1);
    EXPECT_EQ(c.x(), 0.0);
    EXPECT_EQ(c.y(), 0.0);
    for (std::size_t row : {0u, 7u, 63u})
        for (std::size_t col : {0u, 31u, 63u}) {
            auto [cc, rr] = pixel_of(pixel_center(col, row, 64, 64), 64, 64);
            EXPECT_EQ(cc, col);
            EXPECT_EQ(rr, row);
        }
    EXPECT_EQ(render_basin(with_beta(-2.0), 1, 1).front(), 255);
}

TEST(Basin, ImageHasBothClassesAndIsDeterministic)
{
    auto prm = with_beta(-2.0);
    auto a = render_basin(prm, 512, 512);
    auto b = render_basin(prm, 512, 512);
    EXPECT_EQ(a, b);
    auto undecided = std::count(a.begin(), a.end(), 0);
    EXPECT_GT(undecided, 0);
    EXPECT_LT(undecided, static_cast<long>(a.size()));
    auto lin = render_basin(with_beta(0.0), 32, 32);
    EXPECT_EQ(std::count(lin.begin(), lin.end(), 0), 32 * 32);
}
