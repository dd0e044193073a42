#include <random>

#include "doctest.h"
#include "framelab/geometry.hpp"

using namespace framelab;

namespace {

double m_dot(const Vec4& a, const Vec4& b) { return minkowski_dot(a, b); }

Point random_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    Point p(u(rng), u(rng), u(rng), u(rng));
    return p.r() < 1e-3 ? Point(p.t, 1.0, 0.0, 0.0) : p;
}

} // namespace

TEST_CASE("frame at (0, (1,0,0)) has L = (1,1,0,0) and Lbar = (1,-1,0,0)") {
    const Frame f = null_frame_at(Point(0.0, 1.0, 0.0, 0.0));
    CHECK(f.L == Vec4{1.0, 1.0, 0.0, 0.0});
    CHECK(f.Lbar == Vec4{1.0, -1.0, 0.0, 0.0});
}

TEST_CASE("frame at (1, (0.6, 0.8, 0)) matches the invariant table") {
    const Frame f = null_frame_at(Point(1.0, 0.6, 0.8, 0.0));
    // e1, e2 from the spherical chart around the x3 axis.
    CHECK(f.e1[3] == doctest::Approx(-1.0));
    CHECK(f.e2[1] == doctest::Approx(-0.8));
    CHECK(f.e2[2] == doctest::Approx(0.6));
    const double table[4][4] = {{0, -2, 0, 0}, {-2, 0, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            CHECK(m_dot(f[kFullSet[a]], f[kFullSet[b]]) == doctest::Approx(table[a][b]).epsilon(1e-12));
}

TEST_CASE("frame orthogonality relations and L +- Lbar hold at random points") {
    std::mt19937_64 rng(5);
    for (int n = 0; n < 500; ++n) {
        const Point p = random_point(rng);
        const Frame f = null_frame_at(p);
        CHECK(std::abs(m_dot(f.L, f.Lbar) + 2.0) <= 1e-12);
        CHECK(std::abs(m_dot(f.L, f.L)) <= 1e-12);
        CHECK(std::abs(m_dot(f.Lbar, f.Lbar)) <= 1e-12);
        CHECK(std::abs(m_dot(f.e1, f.e1) - 1.0) <= 1e-12);
        CHECK(std::abs(m_dot(f.e2, f.e2) - 1.0) <= 1e-12);
        CHECK(std::abs(m_dot(f.e1, f.e2)) <= 1e-12);
        for (const Vec4* e : {&f.e1, &f.e2}) {
            CHECK(std::abs(m_dot(f.L, *e)) <= 1e-12);
            CHECK(std::abs(m_dot(f.Lbar, *e)) <= 1e-12);
        }
        const double r = p.r();
        CHECK(f.L[0] + f.Lbar[0] == 2.0);
        for (int i = 0; i < 3; ++i) {
            CHECK(f.L[i + 1] + f.Lbar[i + 1] == 0.0);
            CHECK(std::abs(f.L[i + 1] - f.Lbar[i + 1] - 2.0 * p.x[i] / r) <= 1e-15);
        }
    }
}

TEST_CASE("null frame rejects the spatial origin") {
    CHECK_THROWS_AS(null_frame_at(Point(1.0, 0.0, 0.0, 0.0)), PoleDegenerate);
}

TEST_CASE("charts agree on the sphere-tangent projector where both apply") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    int tested = 0;
    while (tested < 200) {
        std::array<double, 3> x{u(rng), u(rng), u(rng)};
        const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
        const double rho3 = std::hypot(x[0], x[1]);
        const double rho1 = std::hypot(x[1], x[2]);
        if (r < 0.1 || rho3 / r < 0.2 || rho1 / r < 0.2) continue;
        std::array<double, 3> a1, a2, b1, b2;
        sphere_pair(x, 0, a1, a2);
        sphere_pair(x, 1, b1, b2);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(std::abs(a1[i] * a1[j] + a2[i] * a2[j] - b1[i] * b1[j] - b2[i] * b2[j]) <= 1e-12);
        ++tested;
    }
}

TEST_CASE("frame_component of m") {
    const Frame f = null_frame_at(Point(0.3, 1.0, -2.0, 0.5));
    const CoordTensor m = CoordTensor::minkowski_covariant();
    CHECK(std::abs(frame_component(m, f.L, f.L)[0]) <= 1e-12);
    CHECK(frame_component(m, f.L, f.Lbar)[0] == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("frame_component with e1 at (0, (0,0,2)) matches the double loop") {
    CoordTensor T(2, 1);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) T.at(0, a, b) = (a + 1) * (b + 1) + a + b;
    const Frame f = null_frame_at(Point(0.0, 0.0, 0.0, 2.0));
    double loop = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) loop += f.e1[a] * f.e1[b] * T.at(0, a, b);
    const double value = frame_component(T, f.e1, f.e1)[0];
    CHECK(value == doctest::Approx(loop).epsilon(1e-14));
    // Symbolic oracle: e1 = -d_x1 in the x1-axis chart, so T(e1, e1) = T_11 = 6.
    CHECK(value == doctest::Approx(6.0).epsilon(1e-14));
}

TEST_CASE("frame_component rejects a rank mismatch and is multilinear") {
    CoordTensor T(2, 2), S(2, 2);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& v : T.data()) v = u(rng);
    for (auto& v : S.data()) v = u(rng);
    const Frame f = null_frame_at(Point(0.5, 0.2, 0.4, -1.0));
    CHECK_THROWS_AS(frame_component(T, f.L), RankMismatch);
    const double a = 1.7, b = -0.4;
    const auto lhs = frame_component(a * T + b * S, f.e2, f.Lbar);
    const auto tv = frame_component(T, f.e2, f.Lbar);
    const auto sv = frame_component(S, f.e2, f.Lbar);
    for (int c = 0; c < 2; ++c) CHECK(std::abs(lhs[c] - (a * tv[c] + b * sv[c])) <= 1e-12);
}

TEST_CASE("raising and lowering with m") {
    CHECK(lower_index(Vec4{1, 0, 0, 0}) == Vec4{-1, 0, 0, 0});
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int n = 0; n < 100; ++n) {
        const Vec4 v{u(rng), u(rng), u(rng), u(rng)};
        CHECK(raise_index(lower_index(v)) == v);
    }
    const Frame f = null_frame_at(Point(0.7, 1.0, 2.0, -0.5));
    CHECK(mixed_component(f, FrameVector::Lbar, 0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("Frobenius norm") {
    CHECK(frobenius_norm(CoordTensor(2, 1)) == 0.0);
    CHECK(frobenius_norm(CoordTensor::minkowski_covariant()) == doctest::Approx(2.0));
    CoordTensor T(2, 3);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double sum = 0.0;
    for (auto& v : T.data()) {
        v = u(rng);
        sum += v * v;
    }
    CHECK(frobenius_norm(T) == doctest::Approx(std::sqrt(sum)).epsilon(1e-14));
}

TEST_CASE("frame vector names round trip") {
    for (FrameVector V : kFullSet) CHECK(frame_vector_from_string(to_string(V)) == V);
}
