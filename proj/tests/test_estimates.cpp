#include <random>

#include "doctest.h"
#include "framelab/certify.hpp"
#include "framelab/estimates.hpp"

using namespace framelab;
using V = VectorFieldId;

namespace {

PolyField covector_with(const Poly& p, int slot) {
    PolyField F(1, 1);
    F.at(0, slot) = p;
    return F;
}

} // namespace

TEST_CASE("c_hat from the Lie derivative of the inverse metric") {
    CHECK(c_hat({}) == 1.0);
    CHECK(c_hat({V::S}) == -2.0);
    CHECK(c_hat({V::S, V::S}) == 4.0);
    CHECK(c_hat({V::Z12, V::S}) == 0.0);
    for (int k = 0; k < 10; ++k) CHECK(c_hat({generator(k)}) == 0.0);
}

TEST_CASE("exact commutator examples") {
    PolyMetric flat;
    SUBCASE("Killing indices on the flat metric give zero") {
        std::mt19937_64 rng(1);
        const PolyField phi = random_polyfield(rng, 1, 1, {Slot::Co, Slot::Co}, 3, 3);
        CommutatorEngine e(flat, phi);
        for (const MultiIndex& I : {MultiIndex{V::Z01}, MultiIndex{V::Z12, V::Px3}, MultiIndex{V::Z03, V::Z13, V::Pt}}) {
            CHECK(e.exact_lhs(I).is_zero());
            CHECK(e.identity_rhs(I).is_zero());
        }
        CHECK(e.exact_lhs({}).is_zero());
    }
    SUBCASE("I = (S) on t^2 x1") {
        // Symbolic oracle: L_S(box Phi) - box(L_S Phi) = 4 x1 in the occupied slot.
        const Poly t2x1 = Poly::monomial(1.0, {2, 1, 0, 0});
        CommutatorEngine e(flat, covector_with(t2x1, 2));
        const PolyField lhs = e.exact_lhs({V::S});
        CHECK(lhs == covector_with(4.0 * Poly::var(1), 2));
        CHECK(e.identity_rhs({V::S}) == lhs);
    }
}

TEST_CASE("commutator identity holds exactly on random pairs") {
    std::mt19937_64 rng(2);
    for (int pair = 0; pair < 3; ++pair) {
        PolyMetric g;
        g.H = random_symmetric_contra(rng, 2, 3, 0.5);
        const PolyField phi = random_polyfield(rng, 1, 1, {Slot::Co, Slot::Co}, 3, 3, 0.5);
        CommutatorEngine e(g, phi);
        for (const char* s : {"S", "Z01,S", "S,S", "Px1,Z03,S", "Z12,Z23,Pt"})
            CHECK(commutator_identity_residual(e, parse_multi_index(s)) <= 1e-10);
        // The contravariant Lie derivative rebuilt from covariant ones.
        for (const char* s : {"S", "Z02,S", "S,Z13,Px2"}) {
            const MultiIndex I = parse_multi_index(s);
            CHECK((lie_multi(I, g.H) - e.lie_h_contra_by_splitting(I)).max_abs_coeff() <= 1e-10);
        }
    }
}

TEST_CASE("a perturbed right-hand side is detected") {
    std::mt19937_64 rng(3);
    PolyMetric g;
    g.H = random_symmetric_contra(rng, 2, 3, 0.5);
    const PolyField phi = random_polyfield(rng, 1, 1, {Slot::Co, Slot::Co}, 3, 3, 0.5);
    CommutatorEngine e(g, phi);
    const MultiIndex I = parse_multi_index("Z01,S");
    PolyField wrong = e.identity_rhs(I);
    wrong += 1e-3 * flat_wave_operator(e.lie_phi({}));
    CHECK((e.exact_lhs(I) - wrong).max_abs_coeff() > 1e-6);
}

TEST_CASE("decoupled bound families") {
    SUBCASE("H = 0 leaves only lower-order wave terms") {
        std::mt19937_64 rng(4);
        const PolyField phi = random_polyfield(rng, 1, 1, {Slot::Co, Slot::Co}, 3, 3);
        CommutatorEngine e(PolyMetric{}, phi);
        const Point p(1.5, 1.0, -0.5, 0.7);
        const Frame f = null_frame_at(p);
        for (IndexConvention conv : {IndexConvention::Theorem, IndexConvention::Lemma}) {
            const BoundFamilies b = bound_families(bound_inputs(e, 2, f.L, p), conv, FrameSetKind::Tangential);
            CHECK(b.good == 0.0);
            CHECK(b.bad == 0.0);
            CHECK(b.wave > 0.0);
        }
    }
    SUBCASE("Phi = 0 gives zero") {
        std::mt19937_64 rng(5);
        PolyMetric g;
        g.H = random_symmetric_contra(rng, 2, 3);
        CommutatorEngine e(g, PolyField(1, 1));
        const Point p(1.5, 1.0, -0.5, 0.7);
        const BoundFamilies b = bound_families(bound_inputs(e, 2, null_frame_at(p).L, p), IndexConvention::Theorem,
                                               FrameSetKind::Tangential);
        CHECK(b.total() == 0.0);
    }
    SUBCASE("the bad family reads only H_LL and tangential components") {
        const auto table = bound_term_table(FrameSetKind::Tangential);
        REQUIRE(table.size() == 3);
        CHECK(table[2].weight == "(1+|q|)^-1");
        CHECK(table[2].metricFactor == "|L_J H_LL|");
        CHECK(table[2].fieldComponents == std::vector<FrameVector>(kTangentialSet.begin(), kTangentialSet.end()));

        std::mt19937_64 rng(6);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        BoundInputs in;
        in.p = Point(2.0, 1.0, 0.5, -0.3);
        in.order = 2;
        in.waveLower = {u(rng), u(rng)};
        for (int k = 0; k <= 2; ++k) {
            in.hNorm.push_back(u(rng));
            in.hLL.push_back(u(rng));
            in.gradNorm.push_back(u(rng));
            in.frameGrad.push_back({u(rng), u(rng), u(rng), u(rng)});
        }
        for (IndexConvention conv : {IndexConvention::Theorem, IndexConvention::Lemma}) {
            const BoundFamilies a = bound_families(in, conv, FrameSetKind::Tangential);
            BoundInputs changed = in;
            for (auto& fg : changed.frameGrad) fg[static_cast<int>(FrameVector::Lbar)] += 10.0 * u(rng);
            for (auto& h : changed.hNorm) h += u(rng);
            const BoundFamilies b = bound_families(changed, conv, FrameSetKind::Tangential);
            CHECK(std::abs(a.bad - b.bad) <= 1e-12);
            CHECK(b.good > a.good);
            // With the full set the Lbar data does enter.
            BoundInputs lbarOnly = in;
            for (auto& fg : lbarOnly.frameGrad) fg[static_cast<int>(FrameVector::Lbar)] += 1.0;
            CHECK(bound_families(lbarOnly, conv, FrameSetKind::Full).bad > bound_families(in, conv, FrameSetKind::Full).bad);
        }
    }
    CHECK_THROWS_AS(check_frame_set(FrameVector::Lbar, FrameSetKind::Tangential), FrameMismatch);
    CHECK_NOTHROW(check_frame_set(FrameVector::Lbar, FrameSetKind::Full));
}

TEST_CASE("commutator report on a seeded pair") {
    std::mt19937_64 rng(11);
    PolyMetric g;
    g.H = random_symmetric_contra(rng, 2, 3, 0.6);
    const PolyField phi = random_polyfield(rng, 1, 1, {Slot::Co, Slot::Co}, 3, 3, 0.6);
    CommutatorEngine e(g, phi);
    const auto samples = sample_region(5, 0.0, 3.0, 3.0);
    for (const Point& p : samples) {
        CHECK(p.r() > 0.0);
        CHECK(p.t != 0.0);
        CHECK((p.t >= 1.0 || p.r() >= 1.0));
    }
    const CommutatorReport r =
        commutator_report(e, {V::S}, FrameVector::L, FrameSetKind::Tangential, IndexConvention::Theorem, samples);
    CHECK(r.lhsSup > 0.0);
    CHECK(r.boundValue > 0.0);
    CHECK(std::isfinite(r.impliedConstant));
    CHECK(r.impliedConstant > 0.0);
}

TEST_CASE("refined supremum finds the maximum of a smooth function") {
    const SampleBox box{1.0, 3.0, 2.0};
    auto f = [](const Point& p) {
        return std::exp(-((p.t - 2.1) * (p.t - 2.1) + (p.x[0] - 0.4) * (p.x[0] - 0.4) + p.x[1] * p.x[1] +
                          (p.x[2] + 0.3) * (p.x[2] + 0.3)));
    };
    CHECK(refined_sup(f, box, 5) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("gradient frame bound") {
    const auto samples = sample_region(4, 0.0, 3.0, 3.0);
    CHECK(gradient_frame_bound_check(global_field(PolyField(2, 1)), FrameVector::L, FrameVector::e1, samples) == 0.0);
    CHECK(gradient_frame_bound_check(global_field(PolyField::minkowski_covariant()), FrameVector::Lbar, FrameVector::L,
                                     samples) == 0.0);
    std::mt19937_64 rng(12);
    const PolyField P = random_polyfield(rng, 2, 1, {Slot::Co, Slot::Co}, 2, 3);
    const auto psi = enveloped_field(P, {0.5, 0.0, 0.0}, 1.5, 4);
    const double c1 = refined_sup([&](const Point& p) { return gradient_frame_ratio_at(psi, FrameVector::Lbar, FrameVector::L, p); },
                                  SampleBox{}, 5);
    const double c2 = refined_sup([&](const Point& p) { return gradient_frame_ratio_at(psi, FrameVector::Lbar, FrameVector::L, p); },
                                  SampleBox{}, 7);
    CHECK(std::isfinite(c1));
    CHECK(c1 > 0.0);
    CHECK(std::abs(c2 - c1) <= 0.2 * c1);
}

TEST_CASE("frame expansions and the Lbar derivative of x/r") {
    const Point p(1.3, 0.4, -1.1, 0.8);
    CHECK(std::abs(lbar_radial_exact(p, 0)) <= 1e-15);
    CHECK(std::abs(lbar_radial_fd(p, 2, 1e-3)) <= 1e-12);
    CHECK_THROWS_AS(frame_boost_form(FrameVector::e1, Point(0.0, 1.0, 0.0, 0.0)), TimeZero);
    CHECK(check_restricted_derivatives(17, 300).pass());
    CHECK(check_lbar_radial(17, 300).pass());
}

TEST_CASE("the splitting enumeration reproduces contravariant Lie derivatives") {
    CHECK(check_splitting_enumeration(19, 2, 3).pass());
    CHECK(check_commutator_frame_form(19, 1, 2, 4).pass());
    CHECK(check_generator_algebra().pass());
}

TEST_CASE("decay constants are finite on an enveloped field") {
    std::mt19937_64 rng(11);
    const PolyField P = random_polyfield(rng, 0, 1, {Slot::Co, Slot::Co}, 2, 3);
    const auto env = enveloped_field(P, {0.5, 0.0, 0.0}, 1.5, 4);
    const auto samples = sample_region(5, 0.0, 3.0, 3.0);
    const DecayConstants d = decay_constants(env, 1, samples);
    CHECK(std::isfinite(d.full));
    CHECK(std::isfinite(d.tangential));
    CHECK(d.full > 0.0);
    CHECK(d.tangential > 0.0);
}

TEST_CASE("estimate report for zero data") {
    const GridSpec spec{16, 3.0};
    MonitorHistory h;
    for (double t : {0.0, 0.1, 0.2}) {
        MonitorSlice s;
        s.t = t;
        s.grad = GridField(spec, 1, 1, t);
        s.wave = GridField(spec, 0, 1, t);
        h.push_back(s);
    }
    const ExteriorRegion region = ExteriorRegion::standard(-2.0, spec);
    const EstimateReport r = energy_estimate_report(h, h, *make_zero_background(), 0.0, 0.2, region, WeightParams{});
    for (const auto* list : {&r.lhs, &r.lhsTheorem, &r.rhs})
        for (const auto& t : *list) {
            CHECK(t.value == 0.0);
            CHECK(t.anchor.rfind("Thm-line: ", 0) == 0);
        }
    CHECK(r.rhs.size() == 6);
    CHECK(r.rhs[1].id == "HLL_times_dPsi_sq_wtilde_prime");
    CHECK_THROWS_AS(energy_estimate_report(h, h, *make_zero_background(), 0.0, 0.5, region, WeightParams{}),
                    HistoryMissing);
}
