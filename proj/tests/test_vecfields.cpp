#include <random>

#include "doctest.h"
#include "framelab/vecfields.hpp"

using namespace framelab;

namespace {

LinComb lc(std::initializer_list<std::pair<VectorFieldId, double>> terms) {
    LinComb c{};
    for (auto [z, v] : terms) c[ordinal(z)] += v;
    return c;
}

void check_lincomb(const LinComb& a, const LinComb& b) {
    for (int k = 0; k < kGeneratorCount; ++k) CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-14));
}

Poly P(double c, std::array<int, 4> e) { return Poly::monomial(c, e); }

} // namespace

TEST_CASE("generator coefficients") {
    const PolyField S = as_field(VectorFieldId::S);
    for (int mu = 0; mu < 4; ++mu) CHECK(S.at(0, mu) == Poly::var(mu));
    const PolyField Z12 = as_field(VectorFieldId::Z12);
    CHECK(Z12.at(0, 0).is_zero());
    CHECK(Z12.at(0, 1) == Poly::var(2));
    CHECK(Z12.at(0, 2) == -Poly::var(1));
    CHECK(Z12.at(0, 3).is_zero());
    // Lowering x_0 = -t gives Z01 = x1 d_t + t d_1.
    const PolyField Z01 = as_field(VectorFieldId::Z01);
    CHECK(Z01.at(0, 0) == Poly::var(1));
    CHECK(Z01.at(0, 1) == Poly::var(0));
    CHECK(Z01.at(0, 2).is_zero());
}

TEST_CASE("Lie derivatives of the Minkowski metric") {
    const PolyField m = PolyField::minkowski_covariant();
    CHECK(lie_derivative(VectorFieldId::S, m) == 2.0 * m);
    for (int k = 0; k < 10; ++k) CHECK(lie_derivative(generator(k), m).is_zero());
}

TEST_CASE("time translation kills time independent fields") {
    std::mt19937_64 rng(2);
    PolyField F = random_polyfield(rng, 2, 1, {Slot::Co, Slot::Co}, 3, 4);
    // Keep only monomials without t.
    for (auto& c : F.components()) {
        Poly keep;
        for (const auto& term : c.terms())
            if (Poly::decode(term.key)[0] == 0) keep += Poly::monomial(term.c, Poly::decode(term.key));
        c = keep;
    }
    CHECK(lie_derivative(VectorFieldId::Pt, F).is_zero());
}

TEST_CASE("iterated Lie derivatives") {
    const PolyField f = PolyField::scalar(P(1.0, {1, 1, 0, 0}));
    CHECK(lie_multi({}, f) == f);
    CHECK(lie_multi({VectorFieldId::S, VectorFieldId::S}, f) == 4.0 * f);
    std::mt19937_64 rng(3);
    const PolyField T = random_polyfield(rng, 1, 2, {Slot::Co, Slot::Co}, 3, 3);
    const MultiIndex I{VectorFieldId::Z03, VectorFieldId::Px2};
    CHECK(lie_multi(I, T) == lie_derivative(VectorFieldId::Z03, lie_derivative(VectorFieldId::Px2, T)));
}

TEST_CASE("structure constants from the symbolic oracle") {
    using V = VectorFieldId;
    check_lincomb(commutator(V::S, V::Pt), lc({{V::Pt, -1.0}}));
    check_lincomb(commutator(V::Z12, V::Z23), lc({{V::Z13, -1.0}}));
    check_lincomb(commutator(V::Z01, V::Z02), lc({{V::Z12, -1.0}}));
    check_lincomb(commutator(V::Z01, V::Z12), lc({{V::Z02, -1.0}}));
    check_lincomb(commutator(V::Z01, V::Pt), lc({{V::Px1, -1.0}}));
    check_lincomb(commutator(V::Pt, V::Px1), LinComb{});
}

TEST_CASE("Jacobi identity on all unordered triples") {
    int triples = 0;
    for (int a = 0; a < kGeneratorCount; ++a)
        for (int b = a + 1; b < kGeneratorCount; ++b)
            for (int c = b + 1; c < kGeneratorCount; ++c) {
                const LinComb A = unit(generator(a)), B = unit(generator(b)), C = unit(generator(c));
                const LinComb j1 = bracket(A, bracket(B, C));
                const LinComb j2 = bracket(B, bracket(C, A));
                const LinComb j3 = bracket(C, bracket(A, B));
                for (int k = 0; k < kGeneratorCount; ++k) CHECK(j1[k] + j2[k] + j3[k] == 0.0);
                ++triples;
            }
    CHECK(triples == 165);
}

TEST_CASE("Lie derivatives close on brackets") {
    std::mt19937_64 rng(4);
    const PolyField T = random_polyfield(rng, 1, 1, {Slot::Co, Slot::Co}, 3, 3);
    for (int a = 0; a < kGeneratorCount; ++a)
        for (int b = 0; b < kGeneratorCount; ++b) {
            const VectorFieldId A = generator(a), B = generator(b);
            const PolyField lhs = lie_derivative(A, lie_derivative(B, T)) - lie_derivative(B, lie_derivative(A, T));
            PolyField rhs(1, 1);
            const LinComb c = commutator(A, B);
            for (int k = 0; k < kGeneratorCount; ++k)
                if (c[k] != 0.0) rhs += c[k] * lie_derivative(generator(k), T);
            CHECK(lhs == rhs);
        }
}

TEST_CASE("Leibniz rule on scalars") {
    std::mt19937_64 rng(5);
    for (int n = 0; n < 10; ++n) {
        const PolyField F = random_polyfield(rng, 0, 1, {Slot::Co, Slot::Co}, 3, 4);
        const PolyField G = random_polyfield(rng, 0, 1, {Slot::Co, Slot::Co}, 3, 4);
        const PolyField FG = PolyField::scalar(F.at(0) * G.at(0));
        for (int k = 0; k < kGeneratorCount; ++k) {
            const VectorFieldId z = generator(k);
            const Poly expect = lie_derivative(z, F).at(0) * G.at(0) + F.at(0) * lie_derivative(z, G).at(0);
            CHECK(lie_derivative(z, FG).at(0) == expect);
        }
    }
}

TEST_CASE("Lie derivative of a gradient is the gradient of the Lie derivative") {
    // For affine Z the slotwise correction term in L_Z(dF) is exactly d(L_Z F).
    std::mt19937_64 rng(6);
    const PolyField F = random_polyfield(rng, 0, 1, {Slot::Co, Slot::Co}, 4, 3);
    PolyField dF(1, 1);
    for (int mu = 0; mu < 4; ++mu) dF.at(0, mu) = F.at(0).derivative(mu);
    for (int k = 0; k < kGeneratorCount; ++k) {
        const VectorFieldId z = generator(k);
        const PolyField lhs = lie_derivative(z, dF);
        const PolyField LF = lie_derivative(z, F);
        for (int mu = 0; mu < 4; ++mu) CHECK(lhs.at(0, mu) == LF.at(0).derivative(mu));
    }
}

TEST_CASE("restricted derivatives in terms of generators") {
    SUBCASE("F = x1 at (2, (0, 3, 0))") {
        const PolyField F = PolyField::scalar(Poly::var(1));
        const Point p(2.0, 0.0, 3.0, 0.0);
        const auto rd = restricted_derivative_as_Z(1, p);
        CHECK(apply_combination(rd.rotationForm, F, p).at(0) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(apply_combination(rd.boostForm, F, p).at(0) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(restricted_derivative_direct(1, F, p).at(0) == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("radial functions are annihilated") {
        // r^2 is polynomial; the restricted derivative of any f(r) vanishes.
        const PolyField F = PolyField::scalar(P(1, {0, 2, 0, 0}) + P(1, {0, 0, 2, 0}) + P(1, {0, 0, 0, 2}));
        const Point p(1.5, 0.3, -1.2, 0.8);
        for (int i = 1; i <= 3; ++i) {
            const auto rd = restricted_derivative_as_Z(i, p);
            CHECK(std::abs(apply_combination(rd.rotationForm, F, p).at(0)) <= 1e-13);
            CHECK(std::abs(apply_combination(rd.boostForm, F, p).at(0)) <= 1e-13);
        }
    }
    SUBCASE("both forms agree on random fields") {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        const PolyField F = random_polyfield(rng, 1, 1, {Slot::Co, Slot::Co}, 3, 3);
        for (int n = 0; n < 200; ++n) {
            const Point p(u(rng) + 2.5, u(rng), u(rng), u(rng));
            if (p.r() < 0.1) continue;
            for (int i = 1; i <= 3; ++i) {
                const auto rd = restricted_derivative_as_Z(i, p);
                const auto a = apply_combination(rd.rotationForm, F, p);
                const auto b = apply_combination(rd.boostForm, F, p);
                const auto d = restricted_derivative_direct(i, F, p);
                for (int mu = 0; mu < 4; ++mu) {
                    const double scale = std::max(1.0, std::abs(d.at(0, mu)));
                    CHECK(std::abs(a.at(0, mu) - d.at(0, mu)) <= 1e-12 * scale);
                    CHECK(std::abs(b.at(0, mu) - d.at(0, mu)) <= 1e-12 * scale);
                }
            }
        }
    }
    CHECK_THROWS_AS(restricted_derivative_as_Z(1, Point(1.0, 0.0, 0.0, 0.0)), PoleDegenerate);
    CHECK_THROWS_AS(restricted_derivative_as_Z(1, Point(0.0, 1.0, 0.0, 0.0)), TimeZero);
    CHECK_THROWS_AS(restricted_derivative_as_Z(0, Point(1.0, 1.0, 0.0, 0.0)), DomainMismatch);
}

TEST_CASE("multi-index syntax and splittings") {
    const MultiIndex I = parse_multi_index("S,Z01,P t");
    REQUIRE(I.size() == 3);
    CHECK(I[0] == VectorFieldId::S);
    CHECK(I[1] == VectorFieldId::Z01);
    CHECK(I[2] == VectorFieldId::Pt);
    CHECK(parse_multi_index("").empty());
    CHECK(parse_multi_index(to_string(I)) == I);
    // Ordered 2-part splittings of a length-3 index: 2^3 assignments.
    CHECK(splittings(I, 2).size() == 8);
    CHECK(splittings(I, 4).size() == 64);
    for (const auto& parts : splittings(I, 2)) CHECK(parts[0].size() + parts[1].size() == 3);
    CHECK(positive_part_minus_one(0) == 0);
    CHECK(positive_part_minus_one(3) == 2);
    CHECK(all_multi_indices(2).size() == 1 + 11 + 121);
}
