#include "framelab/certify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "framelab/energy.hpp"
#include "framelab/estimates.hpp"
#include "framelab/vecfields.hpp"
#include "framelab/weights.hpp"

namespace framelab {

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

/// Uniform point in [0.1, 3] x [-3, 3]^3 with r > 0.1 and t != 0.
Point random_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ut(0.1, 3.0), ux(-3.0, 3.0);
    for (;;) {
        const Point p(ut(rng), ux(rng), ux(rng), ux(rng));
        if (p.r() > 0.1) return p;
    }
}

PolyField random_scalar(std::mt19937_64& rng, int degree, int channels = 1) {
    return random_polyfield(rng, 0, channels, {Slot::Co, Slot::Co}, degree, 3, 0.7);
}

} // namespace

CheckResult check_commutator_identity(std::uint64_t seed, int pairs, int maxOrder) {
    CheckResult r{"commutator_identity", 0.0, 1e-10, 0};
    std::mt19937_64 rng(seed);
    const auto indices = all_multi_indices(maxOrder);
    for (int k = 0; k < pairs; ++k) {
        PolyMetric g;
        g.H = random_symmetric_contra(rng, 2, 3, 0.5);
        const PolyField phi = random_polyfield(rng, 1, 1, {Slot::Co, Slot::Co}, 3, 3, 0.5);
        CommutatorEngine e(g, phi);
        for (const MultiIndex& I : indices) {
            r.residual = std::max(r.residual, commutator_identity_residual(e, I));
            ++r.samples;
        }
    }
    return r;
}

CheckResult check_commutator_frame_form(std::uint64_t seed, int pairs, int maxOrder, int points) {
    CheckResult r{"commutator_null_frame_form", 0.0, 1e-10, 0};
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    const auto indices = all_multi_indices(maxOrder);
    for (int k = 0; k < pairs; ++k) {
        PolyMetric g;
        g.H = random_symmetric_contra(rng, 2, 3, 0.5);
        const PolyField phi = random_polyfield(rng, 1, 2, {Slot::Co, Slot::Co}, 3, 3, 0.5);
        CommutatorEngine e(g, phi);
        std::vector<Point> pts;
        for (int n = 0; n < points; ++n) pts.push_back(random_point(rng));
        for (const MultiIndex& I : indices) {
            r.residual = std::max(r.residual, commutator_frame_residual(e, I, pts));
            r.samples += static_cast<long>(pts.size()) * 4;
        }
    }
    return r;
}

CheckResult check_splitting_enumeration(std::uint64_t seed, int pairs, int maxOrder) {
    CheckResult r{"splitting_enumeration", 0.0, 1e-12, 0};
    std::mt19937_64 rng(seed + 17);
    const auto indices = all_multi_indices(maxOrder);
    for (int k = 0; k < pairs; ++k) {
        PolyMetric g;
        g.H = random_symmetric_contra(rng, 2, 3, 0.5);
        CommutatorEngine e(g, PolyField(0, 1));
        for (const MultiIndex& I : indices) {
            const PolyField direct = lie_multi(I, g.H);
            const PolyField split = e.lie_h_contra_by_splitting(I);
            r.residual = std::max(r.residual, (direct - split).max_abs_coeff() / std::max(1.0, direct.max_abs_coeff()));
            ++r.samples;
        }
    }
    return r;
}

CheckResult check_null_frame_rewrite(std::uint64_t seed, int inputs) {
    CheckResult r{"null_frame_rewrite", 0.0, 1e-12, 0};
    std::mt19937_64 rng(seed + 23);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int n = 0; n < inputs; ++n) {
        StressPoint s;
        s.p = random_point(rng);
        for (int a = 0; a < 4; ++a)
            for (int b = a; b < 4; ++b) s.H[a][b] = s.H[b][a] = 0.3 * u(rng);
        const int C = 1 + n % 3;
        for (auto& d : s.dpsi) {
            d.resize(C);
            for (double& x : d) x = u(rng);
        }
        const double direct = T_tt_plus_Trt_direct(s);
        const double coord = T_tt_plus_Trt_coordinate(s);
        const double nullf = T_tt_plus_Trt_nullframe(s);
        r.residual = std::max({r.residual, rel(coord, nullf), rel(direct, nullf), rel(direct, coord)});
        ++r.samples;
    }
    return r;
}

CheckResult check_gradient_decomposition(std::uint64_t seed, int points) {
    CheckResult r{"gradient_decomposition", 0.0, 1e-12, 0};
    std::mt19937_64 rng(seed + 29);
    PolyMetric flat;
    for (int n = 0; n < points; ++n) {
        const PolyField psi = random_scalar(rng, 3, 2);
        const StressPoint s = stress_point(flat, psi, random_point(rng));
        const GradientDecomposition d = gradient_decomposition(s);
        r.residual = std::max({r.residual, rel(d.spatialSquare, d.slashPlusRadial), rel(d.nullPlusSlash, d.fullPlusCross)});
        ++r.samples;
    }
    return r;
}

CheckResult check_restricted_derivatives(std::uint64_t seed, int points) {
    CheckResult r{"restricted_derivatives_as_Z", 0.0, 1e-10, 0};
    std::mt19937_64 rng(seed + 31);
    PolyField F = random_polyfield(rng, 1, 1, {Slot::Co, Slot::Co}, 3, 3, 0.7);
    for (int n = 0; n < points; ++n) {
        if (n % 100 == 99) F = random_polyfield(rng, 1, 1, {Slot::Co, Slot::Co}, 3, 3, 0.7);
        const Point p = random_point(rng);
        auto diff = [](const CoordTensor& a, const CoordTensor& b) {
            double d = 0.0, s = 1.0;
            for (std::size_t k = 0; k < a.data().size(); ++k) {
                d = std::max(d, std::abs(a.data()[k] - b.data()[k]));
                s = std::max(s, std::abs(a.data()[k]));
            }
            return d / s;
        };
        for (int i = 1; i <= 3; ++i) {
            const CoordTensor direct = restricted_derivative_direct(i, F, p);
            const RestrictedDerivative z = restricted_derivative_as_Z(i, p);
            r.residual = std::max({r.residual, diff(direct, apply_combination(z.rotationForm, F, p)),
                                   diff(direct, apply_combination(z.boostForm, F, p))});
        }
        const Frame fr = null_frame_at(p);
        for (FrameVector e : {FrameVector::e1, FrameVector::e2}) {
            CoordTensor direct(F.rank(), F.channels());
            for (int mu = 0; mu < 4; ++mu) direct += fr[e][mu] * F.partial(mu).eval(p.coords());
            r.residual = std::max({r.residual, diff(direct, apply_combination(frame_rotation_form(e, p), F, p)),
                                   diff(direct, apply_combination(frame_boost_form(e, p), F, p))});
        }
        ++r.samples;
    }
    return r;
}

CheckResult check_lbar_radial(std::uint64_t seed, int points) {
    CheckResult r{"lbar_of_x_over_r", 0.0, 1e-10, 0};
    std::mt19937_64 rng(seed + 37);
    for (int n = 0; n < points; ++n) {
        const Point p = random_point(rng);
        for (int j = 1; j <= 3; ++j) {
            const double h = 1e-3 * p.r();
            r.residual = std::max({r.residual, std::abs(lbar_radial_fd(p, j, h)), std::abs(lbar_radial_exact(p, j))});
        }
        ++r.samples;
    }
    return r;
}

CheckResult check_weight_lemmas(std::uint64_t seed, int samples) {
    CheckResult r{"weight_lemmas", 0.0, 1e-12, 0};
    std::mt19937_64 rng(seed + 41);
    std::uniform_real_distribution<double> uq(-50.0, 50.0);
    const double gammas[] = {0.05, 0.25, 0.5, 1.0, 2.0};
    const double mus[] = {-0.05, -0.25, -0.5, -1.0, -2.0};
    for (double g : gammas)
        for (double m : mus) {
            const WeightParams wp{g, m};
            const double lo = std::min(1.0 + 2.0 * g, -2.0 * m);
            const double hi = std::max(1.0 + 2.0 * g, -2.0 * m);
            for (int n = 0; n < samples; ++n) {
                double q = uq(rng);
                if (n % 4 == 0) q *= 1e-3;  // dense near the kink
                if (q == 0.0) continue;
                const double ratio = w_hat_prime(q, wp) * (1.0 + std::abs(q)) / w_hat(q, wp);
                const double below = std::max(0.0, lo - ratio) / lo;
                const double above = std::max(0.0, ratio - hi) / hi;
                const double wq = w(q, wp), wt = w_tilde(q, wp);
                const double order = std::max(std::max(0.0, wq - wt), std::max(0.0, wt - 2.0 * wq)) / wq;
                r.residual = std::max({r.residual, below, above, order});
                ++r.samples;
            }
        }
    return r;
}

CheckResult check_generator_algebra() {
    CheckResult r{"generator_algebra", 0.0, 1e-12, 0};
    for (int a = 0; a < kGeneratorCount; ++a)
        for (int b = 0; b < kGeneratorCount; ++b)
            for (int c = 0; c < kGeneratorCount; ++c) {
                const LinComb A = unit(generator(a)), B = unit(generator(b)), C = unit(generator(c));
                const LinComb j1 = bracket(bracket(A, B), C);
                const LinComb j2 = bracket(bracket(B, C), A);
                const LinComb j3 = bracket(bracket(C, A), B);
                for (int k = 0; k < kGeneratorCount; ++k)
                    r.residual = std::max(r.residual, std::abs(j1[k] + j2[k] + j3[k]));
                ++r.samples;
            }
    // [L_X, L_Y] = L_[X,Y] on a fixed covariant 2-tensor.
    std::mt19937_64 rng(5);
    const PolyField T = random_polyfield(rng, 2, 1, {Slot::Co, Slot::Co}, 2, 3, 0.7);
    for (int a = 0; a < kGeneratorCount; ++a)
        for (int b = 0; b < kGeneratorCount; ++b) {
            const PolyField lhs = lie_derivative(generator(a), lie_derivative(generator(b), T)) -
                                  lie_derivative(generator(b), lie_derivative(generator(a), T));
            PolyField rhs(2, 1, T.slots());
            const LinComb c = commutator(generator(a), generator(b));
            for (int k = 0; k < kGeneratorCount; ++k)
                if (c[k] != 0.0) rhs += c[k] * lie_derivative(generator(k), T);
            r.residual = std::max(r.residual, (lhs - rhs).max_abs_coeff() / std::max(1.0, lhs.max_abs_coeff()));
            ++r.samples;
        }
    r.residual = std::max(r.residual, std::abs(c_hat({VectorFieldId::S}) + 2.0));
    r.residual = std::max(r.residual, std::abs(c_hat({VectorFieldId::S, VectorFieldId::S}) - 4.0));
    for (int k = 0; k < kGeneratorCount; ++k)
        if (is_killing(generator(k))) r.residual = std::max(r.residual, std::abs(c_hat({generator(k)})));
    return r;
}

CheckResult check_stress_divergence(std::uint64_t seed, int pairs, int points) {
    CheckResult r{"stress_divergence", 0.0, 1e-10, 0};
    std::mt19937_64 rng(seed + 43);
    for (int k = 0; k < pairs; ++k) {
        PolyMetric g;
        g.H = random_symmetric_contra(rng, 1, 2, 0.6);
        const PolyField psi = random_scalar(rng, 3, 2);
        std::array<std::array<Poly, 4>, 4> T;
        for (int mu = 0; mu < 4; ++mu)
            for (int nu = 0; nu < 4; ++nu) T[mu][nu] = stress_mixed_poly(g, psi, mu, nu);
        const PolyField wave = wave_operator(g, psi);
        for (int n = 0; n < points; ++n) {
            const Point p = random_point(rng);
            DivergenceInput in;
            in.s = stress_point(g, psi, p);
            const CoordTensor wv = wave.eval(p.coords());
            in.wave.assign(wv.data().begin(), wv.data().end());
            for (int mu = 0; mu < 4; ++mu) {
                const CoordTensor d = g.H.partial(mu).eval(p.coords());
                for (int a = 0; a < 4; ++a)
                    for (int b = 0; b < 4; ++b) in.dH[mu][a][b] = d.at(0, a, b);
            }
            for (int nu = 0; nu < 4; ++nu) {
                double exact = 0.0;
                for (int mu = 0; mu < 4; ++mu) exact += T[mu][nu].derivative(mu).eval(p.coords());
                r.residual = std::max(r.residual, rel(exact, divergence_T(in, nu)));
            }
            ++r.samples;
        }
    }
    return r;
}

std::vector<CheckResult> certification_suite(std::uint64_t seed, int commutatorPairs) {
    return {check_commutator_identity(seed, commutatorPairs),
            check_commutator_frame_form(seed),
            check_splitting_enumeration(seed),
            check_null_frame_rewrite(seed),
            check_gradient_decomposition(seed),
            check_restricted_derivatives(seed),
            check_lbar_radial(seed),
            check_weight_lemmas(seed),
            check_generator_algebra(),
            check_stress_divergence(seed)};
}

} // namespace framelab
