#include "framelab/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss.hpp>

#include "framelab/errors.hpp"

namespace framelab {

namespace {

double pair(const StressPoint& s, int a, int b) { return inner(s.dpsi[a], s.dpsi[b]); }

Mat4 full_inverse(const Mat4& H) { return inverse_metric(H); }

double unit_radial(const Point& p, int i) { return p.x[i] / p.r(); }

void require_pole_free(const Point& p, const char* what) {
    if (!(p.r() > 0.0)) throw PoleDegenerate(std::string(what) + " needs r > 0");
}

} // namespace

StressPoint stress_point(const PolyMetric& g, const PolyField& psi, const Point& p) {
    if (psi.rank() != 0) throw RankMismatch("stress input must be a multi-channel scalar");
    StressPoint s;
    s.p = p;
    const Vec4 x = p.coords();
    const CoordTensor h = g.H.eval(x);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) s.H[a][b] = h.at(0, a, b);
    for (int a = 0; a < 4; ++a) {
        const CoordTensor d = psi.partial(a).eval(x);
        s.dpsi[a].assign(d.data().begin(), d.data().end());
    }
    return s;
}

double stress_mixed(const StressPoint& s, int mu, int nu) {
    const Mat4 g = full_inverse(s.H);
    double first = 0.0;
    for (int a = 0; a < 4; ++a) first += g[mu][a] * pair(s, a, nu);
    if (mu != nu) return first;
    double trace = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) trace += g[a][b] * pair(s, a, b);
    return first - 0.5 * trace;
}

double stress_lower(const StressPoint& s, int mu, int nu) { return kEta[mu] * stress_mixed(s, mu, nu); }

double T_tt_plus_Trt_direct(const StressPoint& s) {
    require_pole_free(s.p, "T_rt");
    double v = stress_lower(s, 0, 0);
    for (int i = 0; i < 3; ++i) v += unit_radial(s.p, i) * stress_lower(s, i + 1, 0);
    return v;
}

double T_tt_plus_Trt_coordinate(const StressPoint& s) {
    require_pole_free(s.p, "coordinate form");
    const int C = s.channels();
    std::vector<double> dr(C, 0.0);
    for (int c = 0; c < C; ++c)
        for (int i = 0; i < 3; ++i) dr[c] += unit_radial(s.p, i) * s.dpsi[i + 1][c];
    double nullSq = 0.0, slashSq = 0.0;
    for (int c = 0; c < C; ++c) {
        const double l = s.dpsi[0][c] + dr[c];
        nullSq += l * l;
        for (int i = 0; i < 3; ++i) {
            const double d = s.dpsi[i + 1][c] - unit_radial(s.p, i) * dr[c];
            slashSq += d * d;
        }
    }
    const Mat4& H = s.H;
    double Hrt = 0.0;
    Vec4 Hr{};  // H^{r j}
    for (int i = 0; i < 3; ++i) {
        Hrt += unit_radial(s.p, i) * H[i + 1][0];
        for (int j = 0; j < 3; ++j) Hr[j + 1] += unit_radial(s.p, i) * H[i + 1][j + 1];
    }
    double v = 0.5 * (nullSq + slashSq);
    v -= 0.5 * H[0][0] * pair(s, 0, 0);
    for (int i = 1; i < 4; ++i)
        for (int j = 1; j < 4; ++j) v += 0.5 * H[j][i] * pair(s, j, i);
    v += Hrt * pair(s, 0, 0);
    for (int j = 1; j < 4; ++j) v += Hr[j] * pair(s, j, 0);
    return v;
}

double T_tt_plus_Trt_nullframe(const StressPoint& s) {
    require_pole_free(s.p, "null-frame form");
    const Frame f = null_frame_at(s.p);
    const auto theta = dual_coframe(f);
    const int C = s.channels();
    double flat = 0.0;
    for (FrameVector U : kTangentialSet) {
        const Vec4& u = f[U];
        for (int c = 0; c < C; ++c) {
            double d = 0.0;
            for (int a = 0; a < 4; ++a) d += u[a] * s.dpsi[a][c];
            flat += d * d;
        }
    }
    const Vec4& thLb = theta[static_cast<int>(FrameVector::Lbar)];
    double lbarTerm = 0.0;
    for (int a = 0; a < 4; ++a) {
        double HLa = 0.0;  // H^{Lbar a}
        for (int l = 0; l < 4; ++l) HLa += thLb[l] * s.H[l][a];
        lbarTerm += HLa * pair(s, a, 0);
    }
    double full = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) full += s.H[a][b] * pair(s, a, b);
    return 0.5 * flat - 2.0 * lbarTerm + 0.5 * full;
}

double divergence_T(const DivergenceInput& in, int nu) {
    const StressPoint& s = in.s;
    double v = inner(in.wave, s.dpsi[nu]);
    for (int a = 0; a < 4; ++a) {
        double divH = 0.0;
        for (int mu = 0; mu < 4; ++mu) divH += in.dH[mu][mu][a];
        v += divH * pair(s, a, nu);
    }
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) v -= 0.5 * in.dH[nu][a][b] * pair(s, a, b);
    return v;
}

Poly stress_mixed_poly(const PolyMetric& g, const PolyField& psi, int mu, int nu) {
    if (psi.rank() != 0) throw RankMismatch("stress input must be a multi-channel scalar");
    std::array<PolyField, 4> d;
    for (int a = 0; a < 4; ++a) d[a] = psi.partial(a);
    auto pairing = [&](int a, int b) {
        Poly acc;
        for (int c = 0; c < psi.channels(); ++c) acc += d[a].at(c) * d[b].at(c);
        return acc;
    };
    Poly v;
    for (int a = 0; a < 4; ++a) v += g.g_inv(mu, a) * pairing(a, nu);
    if (mu == nu) {
        Poly trace;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) trace += g.g_inv(a, b) * pairing(a, b);
        v -= 0.5 * trace;
    }
    return v;
}

GradientDecomposition gradient_decomposition(const StressPoint& s) {
    require_pole_free(s.p, "gradient decomposition");
    GradientDecomposition g;
    for (int c = 0; c < s.channels(); ++c) {
        double dr = 0.0, sq = 0.0;
        for (int i = 0; i < 3; ++i) {
            dr += unit_radial(s.p, i) * s.dpsi[i + 1][c];
            sq += s.dpsi[i + 1][c] * s.dpsi[i + 1][c];
        }
        double slash = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double d = s.dpsi[i + 1][c] - unit_radial(s.p, i) * dr;
            slash += d * d;
        }
        const double dt = s.dpsi[0][c];
        g.spatialSquare += sq;
        g.slashPlusRadial += slash + dr * dr;
        g.nullPlusSlash += (dt + dr) * (dt + dr) + slash;
        g.fullPlusCross += dt * dt + sq + 2.0 * dt * dr;
    }
    return g;
}

NormEquivalence norm_equivalence(const Mat4& H) {
    Eigen::Matrix4d Q = Eigen::Matrix4d::Zero();
    Q(0, 0) = 1.0 - H[0][0];
    for (int i = 1; i < 4; ++i)
        for (int j = 1; j < 4; ++j) Q(i, j) = (i == j ? 1.0 : 0.0) + 0.5 * (H[i][j] + H[j][i]);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(Q, Eigen::EigenvaluesOnly);
    return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

double gradient_square(const StressPoint& s) {
    double v = 0.0;
    for (int a = 0; a < 4; ++a) v += pair(s, a, a);
    return v;
}

double tangential_gradient_square(const StressPoint& s) {
    const Frame f = null_frame_at(s.p);
    double v = 0.0;
    for (FrameVector U : kTangentialSet) {
        const Vec4& u = f[U];
        for (int c = 0; c < s.channels(); ++c) {
            double d = 0.0;
            for (int a = 0; a < 4; ++a) d += u[a] * s.dpsi[a][c];
            v += d * d;
        }
    }
    return v;
}

// ---------------------------------------------------------------------------

WeightFn kink_averaged(std::function<double(double)> derivative) {
    return [derivative = std::move(derivative)](double q) {
        if (q != 0.0) return derivative(q);
        const double tiny = std::numeric_limits<double>::denorm_min();
        return 0.5 * (derivative(tiny) + derivative(-tiny));
    };
}

StressPoint slice_stress_point(const MonitorSlice& s, const Background& bg, int i, int j, int k) {
    StressPoint sp;
    sp.p = s.grad.spec().point(i, j, k, s.t);
    sp.H = bg.is_zero() ? Mat4{} : bg.sample(sp.p).H;
    const int C = s.grad.channels();
    for (int a = 0; a < 4; ++a) {
        sp.dpsi[a].resize(C);
        for (int c = 0; c < C; ++c) sp.dpsi[a][c] = s.grad.at(a * C + c, i, j, k);
    }
    return sp;
}

double exterior_energy(const MonitorSlice& s, const ExteriorRegion& region, const WeightFn& weight) {
    const int C = s.grad.channels();
    return quadrature_nodes(s.grad.spec(), region, s.t, [&](int i, int j, int k, const Point& p) {
        double v = 0.0;
        for (int comp = 0; comp < 4 * C; ++comp) {
            const double d = s.grad.at(comp, i, j, k);
            v += d * d;
        }
        return v == 0.0 ? 0.0 : v * weight(p.q());
    });
}

double slice_energy_T(const MonitorSlice& s, const Background& bg, const ExteriorRegion& region,
                      const WeightFn& weight) {
    return quadrature_nodes(s.grad.spec(), region, s.t, [&](int i, int j, int k, const Point& p) {
        const StressPoint sp = slice_stress_point(s, bg, i, j, k);
        return stress_lower(sp, 0, 0) * weight(p.q());
    });
}

std::vector<const MonitorSlice*> history_window(const MonitorHistory& h, double t1, double t2) {
    if (!(t2 > t1)) throw HistoryMissing("time window must satisfy t2 > t1");
    const double tol = 1e-9 * std::max(1.0, std::abs(t2));
    std::vector<const MonitorSlice*> out;
    for (const auto& s : h)
        if (s.t >= t1 - tol && s.t <= t2 + tol) out.push_back(&s);
    std::sort(out.begin(), out.end(), [](auto* a, auto* b) { return a->t < b->t; });
    if (out.size() < 2 || std::abs(out.front()->t - t1) > tol || std::abs(out.back()->t - t2) > tol)
        throw HistoryMissing("no stored slices at both ends of the time window");
    return out;
}

double spacetime_integral(const MonitorHistory& h, double t1, double t2, const ExteriorRegion& region,
                          const std::function<double(const MonitorSlice&, int, int, int, const Point&)>& f) {
    const auto win = history_window(h, t1, t2);
    std::vector<double> vals;
    vals.reserve(win.size());
    for (const MonitorSlice* s : win)
        vals.push_back(quadrature_nodes(s->grad.spec(), region, s->t,
                                        [&](int i, int j, int k, const Point& p) { return f(*s, i, j, k, p); }));
    double acc = 0.0;
    for (std::size_t n = 0; n + 1 < win.size(); ++n) acc += 0.5 * (win[n + 1]->t - win[n]->t) * (vals[n] + vals[n + 1]);
    return acc;
}

double tangential_flux_integral(const MonitorHistory& h, double t1, double t2, const ExteriorRegion& region,
                                const WeightFn& weightPrime) {
    return spacetime_integral(h, t1, t2, region, [&](const MonitorSlice& s, int i, int j, int k, const Point& p) {
        const int C = s.grad.channels();
        double sum = 0.0;
        const double r = p.r();
        for (int c = 0; c < C; ++c) {
            double dr = 0.0;
            for (int a = 0; a < 3; ++a) dr += p.x[a] / r * s.grad.at((a + 1) * C + c, i, j, k);
            const double l = s.grad.at(c, i, j, k) + dr;
            sum += l * l;
            for (int a = 0; a < 3; ++a) {
                const double d = s.grad.at((a + 1) * C + c, i, j, k) - p.x[a] / r * dr;
                sum += d * d;
            }
        }
        return sum == 0.0 ? 0.0 : 0.5 * sum * weightPrime(p.q());
    });
}

namespace {

/// Tricubic Lagrange interpolation of all components of a grid field at a
/// spatial point. Returns false when the stencil leaves the interior nodes.
bool interpolate(const GridField& F, const std::array<double, 3>& x, std::vector<double>& out) {
    const GridSpec& g = F.spec();
    const double h = g.dx();
    std::array<int, 3> base{};
    std::array<std::array<double, 4>, 3> w{};
    for (int a = 0; a < 3; ++a) {
        const double s = (x[a] + g.X) / h - 0.5;  // fractional node index
        const int i0 = static_cast<int>(std::floor(s)) - 1;
        if (i0 < 0 || i0 + 3 > g.N - 1) return false;
        base[a] = i0;
        const double u = s - i0;  // in [1, 2)
        for (int m = 0; m < 4; ++m) {
            double l = 1.0;
            for (int n = 0; n < 4; ++n)
                if (n != m) l *= (u - n) / (m - n);
            w[a][m] = l;
        }
    }
    out.assign(F.components(), 0.0);
    for (int c = 0; c < F.components(); ++c) {
        double acc = 0.0;
        for (int p = 0; p < 4; ++p)
            for (int q = 0; q < 4; ++q)
                for (int r = 0; r < 4; ++r)
                    acc += w[0][p] * w[1][q] * w[2][r] * F.at(c, base[0] + p, base[1] + q, base[2] + r);
        out[c] = acc;
    }
    return true;
}

} // namespace

double cone_flux(const MonitorHistory& h, const Background& bg, double q0, double t1, double t2,
                 double weightOnCone) {
    const auto win = history_window(h, t1, t2);
    const GridSpec& g = win.front()->grad.spec();
    const double rMax = std::sqrt(3.0) * g.X;
    bool meets = false;
    for (const MonitorSlice* s : win) {
        const double r = s->t + q0;
        if (r > 0.0 && r < rMax) meets = true;
    }
    if (!meets) throw EmptyCone("the cone q = q0 does not meet the grid in the time window");

    constexpr int kTheta = 48;
    const int nPhi = 2 * kTheta;
    const auto& gx = boost::math::quadrature::gauss<double, kTheta>::abscissa();
    const auto& gw = boost::math::quadrature::gauss<double, kTheta>::weights();
    // The Boost tables store the non-negative half of the symmetric rule.
    std::vector<std::pair<double, double>> cosNodes;
    for (std::size_t n = 0; n < gx.size(); ++n) {
        cosNodes.emplace_back(gx[n], gw[n]);
        if (gx[n] != 0.0) cosNodes.emplace_back(-gx[n], gw[n]);
    }

    std::vector<double> vals;
    std::vector<double> d;
    for (const MonitorSlice* s : win) {
        const double r = s->t + q0;
        double acc = 0.0;
        if (r > 0.0) {
            const int C = s->grad.channels();
            for (const auto& [ct, wt] : cosNodes) {
                const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
                for (int k = 0; k < nPhi; ++k) {
                    const double ph = 2.0 * std::numbers::pi * k / nPhi;
                    const std::array<double, 3> n{st * std::cos(ph), st * std::sin(ph), ct};
                    const std::array<double, 3> x{r * n[0], r * n[1], r * n[2]};
                    if (!interpolate(s->grad, x, d)) continue;
                    StressPoint sp;
                    sp.p = Point(s->t, x[0], x[1], x[2]);
                    sp.H = bg.is_zero() ? Mat4{} : bg.sample(sp.p).H;
                    for (int a = 0; a < 4; ++a) sp.dpsi[a].assign(d.begin() + a * C, d.begin() + (a + 1) * C);
                    double T = stress_lower(sp, 0, 0);
                    for (int a = 0; a < 3; ++a) T += n[a] * stress_lower(sp, a + 1, 0);
                    acc += wt * (2.0 * std::numbers::pi / nPhi) * T;
                }
            }
            acc *= r * r * weightOnCone;
        }
        vals.push_back(acc);
    }
    double flux = 0.0;
    for (std::size_t n = 0; n + 1 < win.size(); ++n) flux += 0.5 * (win[n + 1]->t - win[n]->t) * (vals[n] + vals[n + 1]);
    return flux;
}

BudgetReport conservation_budget(const MonitorHistory& h, const Background& bg, const ExteriorRegion& region,
                                 double t1, double t2, const WeightParams& params, bool constantWeight) {
    params.validate();
    const auto win = history_window(h, t1, t2);
    WeightFn weight = [&](double q) { return constantWeight ? 1.0 : w_tilde(q, params); };
    WeightFn weightPrime = kink_averaged([&](double q) { return constantWeight ? 0.0 : w_tilde_prime(q, params); });

    BudgetReport b;
    b.sliceT1 = slice_energy_T(*win.front(), bg, region, weight);
    b.sliceT2 = slice_energy_T(*win.back(), bg, region, weight);
    const double q0 = region.q0;
    const bool coneVisible = std::isfinite(q0) && t2 + q0 > 0.0;
    b.coneFlux = coneVisible ? cone_flux(h, bg, q0, t1, t2, weight(q0)) : 0.0;
    if (!constantWeight)
        b.volumeWeight = spacetime_integral(h, t1, t2, region, [&](const MonitorSlice& s, int i, int j, int k, const Point& p) {
            const StressPoint sp = slice_stress_point(s, bg, i, j, k);
            return T_tt_plus_Trt_direct(sp) * weightPrime(p.q());
        });
    b.volumeDivergence = spacetime_integral(h, t1, t2, region, [&](const MonitorSlice& s, int i, int j, int k, const Point& p) {
        DivergenceInput in;
        in.s = slice_stress_point(s, bg, i, j, k);
        if (!bg.is_zero()) in.dH = bg.sample(p).dH;
        const int C = s.wave.channels();
        in.wave.resize(C);
        for (int c = 0; c < C; ++c) in.wave[c] = s.wave.at(c, i, j, k);
        return weight(p.q()) * divergence_T(in, 0);
    });
    b.residual = std::abs(b.sliceT2 + b.coneFlux + b.volumeWeight + b.volumeDivergence - b.sliceT1);
    b.relativeResidual = b.sliceT1 != 0.0 ? b.residual / std::abs(b.sliceT1) : b.residual;
    return b;
}

} // namespace framelab
