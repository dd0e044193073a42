#include "framelab/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "framelab/errors.hpp"

namespace framelab {

namespace {

Mat4 to_mat(const CoordTensor& T) {
    Mat4 M{};
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) M[a][b] = T.at(0, a, b);
    return M;
}

Vec4 axis(int mu) {
    Vec4 v{};
    v[mu] = 1.0;
    return v;
}

double norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

/// Per-channel contraction of a rank-0 or rank-1 tensor with U.
std::vector<double> project(const CoordTensor& T, const Vec4& U) {
    if (T.rank() == 0) return std::vector<double>(T.data().begin(), T.data().end());
    if (T.rank() != 1) throw RankMismatch("frame projection needs a rank 0 or 1 field");
    return frame_component(T, U);
}

/// (1 + t + |q|) and (1 + |q|).
double good_weight(const Point& p) { return 1.0 + p.t + std::abs(p.q()); }
double bad_weight(const Point& p) { return 1.0 + std::abs(p.q()); }

/// Memoised L_J T by prefix recursion: L_J = L_{J[0]} L_{J[1:]}.
template <class Map, class KeyFn>
const PolyField& lie_memo(Map& memo, const PolyField& base, const MultiIndex& J, const Vec4& origin, KeyFn key) {
    const auto k = key(J);
    if (auto it = memo.find(k); it != memo.end()) return it->second;
    if (J.empty()) return memo.emplace(k, base).first->second;
    const MultiIndex tail(J.begin() + 1, J.end());
    PolyField inner = lie_memo(memo, base, tail, origin, key);
    return memo.emplace(k, lie_derivative(J.front(), inner, origin)).first->second;
}

} // namespace

double c_hat(const MultiIndex& I) {
    const PolyField L = lie_multi(I, PolyField::minkowski_inverse());
    const double c = -L.at(0, 0, 0).eval({}) + 0.0;
    const double tol = 1e-12 * std::max(1.0, std::abs(c));
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            const Poly& p = L.at(0, a, b);
            if (p.degree() > 0) throw NotProportional("L_I m^{-1} has non-constant components for I = " + to_string(I));
            const double expect = a == b ? c * kEta[a] : 0.0;
            if (std::abs(p.eval({}) - expect) > tol)
                throw NotProportional("L_I m^{-1} is not a multiple of m^{-1} for I = " + to_string(I));
        }
    return c;
}

PolyField raise_both(const PolyField& Hlow) {
    if (Hlow.rank() != 2) throw RankMismatch("raise_both needs a rank-2 field");
    PolyField out(2, Hlow.channels(), {Slot::Contra, Slot::Contra});
    for (int c = 0; c < Hlow.channels(); ++c)
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) out.at(c, a, b) = (kEta[a] * kEta[b]) * Hlow.at(c, a, b);
    return out;
}

// ---------------------------------------------------------------------------

CommutatorEngine::CommutatorEngine(const PolyMetric& g, const PolyField& Phi, const Vec4& origin)
    : g_(g), phi_(Phi), hLow_(g.H_lower()), wave_(wave_operator(g, Phi)), origin_(origin) {}

CommutatorEngine::Key CommutatorEngine::key(const MultiIndex& J) {
    Key k = 0;
    for (VectorFieldId z : J) k = k * 12 + static_cast<Key>(ordinal(z) + 1);
    return k;
}

Vec4 CommutatorEngine::local(const Point& p) const {
    const Vec4 x = p.coords();
    return {x[0] - origin_[0], x[1] - origin_[1], x[2] - origin_[2], x[3] - origin_[3]};
}

const PolyField& CommutatorEngine::lie_phi(const MultiIndex& J) { return lie_memo(lphi_, phi_, J, origin_, key); }
const PolyField& CommutatorEngine::lie_h(const MultiIndex& J) { return lie_memo(lh_, hLow_, J, origin_, key); }
const PolyField& CommutatorEngine::lie_wave(const MultiIndex& J) { return lie_memo(lwave_, wave_, J, origin_, key); }

const PolyField& CommutatorEngine::wave_of_lie(const MultiIndex& J) {
    const Key k = key(J);
    if (auto it = wlie_.find(k); it != wlie_.end()) return it->second;
    return wlie_.emplace(k, wave_operator(g_, lie_phi(J))).first->second;
}

const PolyField& CommutatorEngine::first_partial(const MultiIndex& J, int a) {
    const Key k = key(J);
    auto it = first_.find(k);
    if (it == first_.end()) {
        std::array<PolyField, 4> d;
        const PolyField& F = lie_phi(J);
        for (int m = 0; m < 4; ++m) d[m] = F.partial(m);
        it = first_.emplace(k, std::move(d)).first;
    }
    return it->second[a];
}

const PolyField& CommutatorEngine::second_partial(const MultiIndex& J, int a, int b) {
    if (a > b) std::swap(a, b);
    const Key k = key(J);
    auto it = second_.find(k);
    if (it == second_.end()) {
        std::array<PolyField, 10> d;
        int n = 0;
        for (int x = 0; x < 4; ++x)
            for (int y = x; y < 4; ++y) d[n++] = first_partial(J, x).partial(y);
        it = second_.emplace(k, std::move(d)).first;
    }
    // Row-major index into the upper triangle.
    const int idx = a * 4 - a * (a - 1) / 2 + (b - a);
    return it->second[idx];
}

double CommutatorEngine::chat(const MultiIndex& I) {
    const Key k = key(I);
    if (auto it = chat_.find(k); it != chat_.end()) return it->second;
    return chat_.emplace(k, c_hat(I)).first->second;
}

PolyField CommutatorEngine::exact_lhs(const MultiIndex& I) { return lie_wave(I) - wave_of_lie(I); }

PolyField CommutatorEngine::lie_h_contra_by_splitting(const MultiIndex& I1) {
    const Key k = key(I1);
    if (auto it = kcontra_.find(k); it != kcontra_.end()) return it->second;
    PolyField K(2, hLow_.channels(), {Slot::Contra, Slot::Contra});
    for (const auto& s : splittings(I1, 3)) {
        const double c = chat(s[1]) * chat(s[2]);
        if (c == 0.0) continue;
        K += c * raise_both(lie_h(s[0]));
    }
    return kcontra_.emplace(k, std::move(K)).first->second;
}

PolyField CommutatorEngine::identity_rhs(const MultiIndex& I) {
    PolyField acc(phi_.rank(), phi_.channels(), phi_.slots());
    for (const auto& s : splittings(I, 2)) {
        const MultiIndex& I1 = s[0];
        const MultiIndex& I2 = s[1];
        if (I2.size() == I.size()) continue;
        const PolyField& F = lie_phi(I2);
        const double c = chat(I1);
        if (c != 0.0) acc += c * flat_wave_operator(F);
        const PolyField K = lie_h_contra_by_splitting(I1);
        if (!K.is_zero()) acc += contract_second_derivatives(K, F);
    }
    return acc;
}

std::vector<double> CommutatorEngine::lhs_at(const MultiIndex& I, const Vec4& U, const Point& p) {
    const Vec4 y = local(p);
    CoordTensor d = lie_wave(I).eval(y);
    const CoordTensor w = wave_of_lie(I).eval(y);
    for (std::size_t n = 0; n < d.data().size(); ++n) d.data()[n] -= w.data()[n];
    return project(d, U);
}

std::vector<double> CommutatorEngine::frame_rhs_at(const MultiIndex& I, const Vec4& U, const Point& p) {
    const Vec4 y = local(p);
    const Frame F = null_frame_at(p);
    const Vec4& L = F.L;
    const Vec4& Lb = F.Lbar;
    const std::array<const Vec4*, 2> E{&F.e1, &F.e2};
    const int C = phi_.channels();
    std::vector<double> acc(C, 0.0);

    for (const auto& s : splittings(I, 2)) {
        const MultiIndex& I1 = s[0];
        const MultiIndex& I2 = s[1];
        if (I2.size() == I.size()) continue;

        // hess[a][b][c] = d_a d_b (L_{I2} Phi)(U)^c at p.
        std::array<std::array<std::vector<double>, 4>, 4> hess;
        for (int a = 0; a < 4; ++a)
            for (int b = a; b < 4; ++b) {
                hess[a][b] = project(second_partial(I2, a, b).eval(y), U);
                hess[b][a] = hess[a][b];
            }
        auto D = [&](const Vec4& X, const Vec4& Y) {
            std::vector<double> v(C, 0.0);
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) {
                    const double w = X[a] * Y[b];
                    if (w == 0.0) continue;
                    for (int c = 0; c < C; ++c) v[c] += w * hess[a][b][c];
                }
            return v;
        };
        auto add = [&](double w, const std::vector<double>& v) {
            for (int c = 0; c < C; ++c) acc[c] += w * v[c];
        };

        // m^{ab} d_a d_b = -(1/2)(L Lbar + Lbar L) + sum_A e_A e_A.
        const double ch = chat(I1);
        if (ch != 0.0) {
            add(-0.5 * ch, D(L, Lb));
            add(-0.5 * ch, D(Lb, L));
            for (const Vec4* e : E) add(ch, D(*e, *e));
        }

        for (const auto& t : splittings(I1, 3)) {
            const double coef = chat(t[1]) * chat(t[2]);
            if (coef == 0.0) continue;
            const Mat4 K = to_mat(lie_h(t[0]).eval(y));
            add(coef * 0.25 * contract(K, L, L), D(Lb, Lb));
            add(coef * 0.25 * contract(K, L, Lb), D(Lb, L));
            for (const Vec4* e : E) add(-0.5 * coef * contract(K, L, *e), D(Lb, *e));
            for (int mu = 0; mu < 4; ++mu) {
                const Vec4 dm = axis(mu);
                add(-0.5 * coef * kEta[mu] * contract(K, Lb, dm), D(L, dm));
                for (const Vec4* e : E) add(coef * kEta[mu] * contract(K, *e, dm), D(*e, dm));
            }
        }
    }
    return acc;
}

double commutator_identity_residual(CommutatorEngine& e, const MultiIndex& I) {
    const PolyField lhs = e.exact_lhs(I);
    const PolyField diff = lhs - e.identity_rhs(I);
    return diff.max_abs_coeff() / std::max(1.0, lhs.max_abs_coeff());
}

double commutator_frame_residual(CommutatorEngine& e, const MultiIndex& I, const std::vector<Point>& samples) {
    double worst = 0.0;
    for (const Point& p : samples) {
        const Frame F = null_frame_at(p);
        for (FrameVector U : kFullSet) {
            const auto lhs = e.lhs_at(I, F[U], p);
            const auto rhs = e.frame_rhs_at(I, F[U], p);
            double scale = 1.0, d = 0.0;
            for (std::size_t c = 0; c < lhs.size(); ++c) {
                scale = std::max(scale, std::abs(lhs[c]));
                d = std::max(d, std::abs(lhs[c] - rhs[c]));
            }
            worst = std::max(worst, d / scale);
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------

std::string to_string(IndexConvention c) { return c == IndexConvention::Theorem ? "theorem" : "lemma"; }

void check_frame_set(FrameVector V, FrameSetKind set) {
    if (set == FrameSetKind::Tangential && !is_tangential(V))
        throw FrameMismatch("component Lbar needs the full frame set");
}

std::vector<TermTableEntry> bound_term_table(FrameSetKind set) {
    std::vector<FrameVector> comps;
    if (set == FrameSetKind::Tangential) comps.assign(kTangentialSet.begin(), kTangentialSet.end());
    else comps.assign(kFullSet.begin(), kFullSet.end());
    return {
        {"wave", "1", "none", {}},
        {"good", "(1+t+|q|)^-1", "|L_J H|", {}},
        {"bad", "(1+|q|)^-1", "|L_J H_LL|", comps},
    };
}

BoundFamilies bound_families(const BoundInputs& in, IndexConvention conv, FrameSetKind set) {
    const int n = in.order;
    const auto& table = bound_term_table(set);
    const std::vector<FrameVector>& badComps = table[2].fieldComponents;

    BoundFamilies f;
    for (int k = 0; k < n; ++k) f.wave += in.waveLower[k];

    auto frame_sum = [&](int k) {
        double s = 0.0;
        for (FrameVector U : badComps) s += in.frameGrad[k][static_cast<int>(U)];
        return s;
    };

    double good = 0.0, bad = 0.0;
    if (conv == IndexConvention::Theorem) {
        for (int k = 0; k <= n; ++k) {
            const int jmax = n - positive_part_minus_one(k);
            double hs = 0.0, hl = 0.0;
            for (int j = 0; j <= jmax; ++j) {
                hs += in.hNorm[j];
                hl += in.hLL[j];
            }
            good += hs * in.gradNorm[k];
            bad += hl * frame_sum(k);
        }
    } else {
        for (int k = 0; k < std::max(n, 1); ++k) {
            double gs = 0.0, fs = 0.0;
            for (int m = 0; m <= std::min(k + 1, n); ++m) {
                gs += in.gradNorm[m];
                fs += frame_sum(m);
            }
            double hs = 0.0, hl = 0.0;
            for (int j = 0; j <= n - k; ++j) {
                hs += in.hNorm[j];
                hl += in.hLL[j];
            }
            good += hs * gs;
            bad += hl * fs;
        }
    }
    f.good = good / good_weight(in.p);
    f.bad = bad / bad_weight(in.p);
    return f;
}

BoundInputs bound_inputs(CommutatorEngine& e, int order, const Vec4& V, const Point& p) {
    BoundInputs in;
    in.p = p;
    in.order = order;
    in.waveLower.assign(order, 0.0);
    in.hNorm.assign(order + 1, 0.0);
    in.hLL.assign(order + 1, 0.0);
    in.gradNorm.assign(order + 1, 0.0);
    in.frameGrad.assign(order + 1, std::array<double, 4>{});

    const Frame F = null_frame_at(p);
    const Vec4 x = p.coords();
    const Vec4& o = e.origin();
    const Vec4 y{x[0] - o[0], x[1] - o[1], x[2] - o[2], x[3] - o[3]};
    const bool vectorField = e.lie_phi({}).rank() == 1;

    for (const MultiIndex& J : all_multi_indices(order)) {
        const int k = static_cast<int>(J.size());
        const Mat4 H = to_mat(e.lie_h(J).eval(y));
        in.hNorm[k] += frobenius_norm(H);
        in.hLL[k] += std::abs(contract(H, F.L, F.L));

        std::array<CoordTensor, 4> d;
        for (int mu = 0; mu < 4; ++mu) d[mu] = e.first_partial(J, mu).eval(y);
        double g2 = 0.0;
        for (int mu = 0; mu < 4; ++mu)
            for (double v : d[mu].data()) g2 += v * v;
        in.gradNorm[k] += std::sqrt(g2);
        for (FrameVector U : kFullSet) {
            double s = 0.0;
            for (int mu = 0; mu < 4; ++mu) {
                const auto v = vectorField ? frame_component(d[mu], F[U]) : d[mu].data();
                for (double c : v) s += c * c;
            }
            in.frameGrad[k][static_cast<int>(U)] += std::sqrt(s);
        }
        if (k < order) in.waveLower[k] += norm(project(e.wave_of_lie(J).eval(y), V));
    }
    return in;
}

double commutator_ratio_at(CommutatorEngine& e, const MultiIndex& I, FrameVector V, FrameSetKind set,
                           IndexConvention conv, const Point& p) {
    check_frame_set(V, set);
    const Vec4 v = null_frame_at(p)[V];
    const double lhs = norm(e.lhs_at(I, v, p));
    const double bound = bound_families(bound_inputs(e, static_cast<int>(I.size()), v, p), conv, set).total();
    if (bound > 0.0) return lhs / bound;
    return lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

CommutatorReport commutator_report(CommutatorEngine& e, const MultiIndex& I, FrameVector V, FrameSetKind set,
                                   IndexConvention conv, const std::vector<Point>& samples) {
    check_frame_set(V, set);
    CommutatorReport rep;
    rep.identityResidual = commutator_identity_residual(e, I);
    double sumSq = 0.0;
    for (const Point& p : samples) {
        const Vec4 v = null_frame_at(p)[V];
        const double lhs = norm(e.lhs_at(I, v, p));
        const double bound = bound_families(bound_inputs(e, static_cast<int>(I.size()), v, p), conv, set).total();
        rep.lhsSup = std::max(rep.lhsSup, lhs);
        rep.boundValue = std::max(rep.boundValue, bound);
        sumSq += lhs * lhs;
        if (bound > 0.0) rep.impliedConstant = std::max(rep.impliedConstant, lhs / bound);
        else if (lhs > 0.0) rep.impliedConstant = std::numeric_limits<double>::infinity();
    }
    if (!samples.empty()) rep.lhsL2 = std::sqrt(sumSq / static_cast<double>(samples.size()));
    return rep;
}

// ---------------------------------------------------------------------------

FieldProvider global_field(const PolyField& F) {
    return [F](const Point&) { return LocalField{F, {}}; };
}

FieldProvider enveloped_field(const PolyField& P, const std::array<double, 3>& centre, double sigma, int degree) {
    return [P, centre, sigma, degree](const Point& p) {
        const Vec4 o = p.coords();
        // u(y) = -|x(p) + y - c|^2 / sigma^2 in the shifted variables.
        Poly u;
        for (int i = 0; i < 3; ++i) {
            const Poly s = Poly::affine(o[i + 1] - centre[i], axis(i + 1));
            u -= (1.0 / (sigma * sigma)) * (s * s);
        }
        const Poly env = exp_series(u, degree);
        const PolyField Ps = P.shifted(o);
        PolyField out(P.rank(), P.channels(), P.slots());
        for (std::size_t n = 0; n < out.components().size(); ++n)
            out.components()[n] = (Ps.components()[n] * env).truncated(degree);
        return LocalField{out, o};
    };
}

std::vector<Point> sample_region(int n, double tMin, double tMax, double R) {
    std::vector<Point> pts;
    auto node = [n](double lo, double hi, int i) { return lo + (hi - lo) * (i + 0.5) / n; };
    for (int a = 0; a < n; ++a)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    const Point p(node(tMin, tMax, a), node(-R, R, i), node(-R, R, j), node(-R, R, k));
                    const double r = p.r();
                    if (!(r > 1e-12) || p.t == 0.0) continue;
                    if (p.t >= 1.0 || r >= 1.0) pts.push_back(p);
                }
    return pts;
}

bool SampleBox::admissible(const Point& p) const {
    if (p.t < tMin || p.t > tMax || p.t == 0.0) return false;
    for (double x : p.x)
        if (std::abs(x) > R) return false;
    const double r = p.r();
    return r > 1e-12 && (p.t >= 1.0 || r >= 1.0);
}

double refined_sup(const std::function<double(const Point&)>& f, const SampleBox& box, int n, int seeds) {
    std::vector<std::pair<double, Point>> vals;
    for (const Point& p : sample_region(n, box.tMin, box.tMax, box.R)) vals.emplace_back(f(p), p);
    if (vals.empty()) throw EmptyRegion("no admissible sample points");
    const int m = std::min<int>(seeds, static_cast<int>(vals.size()));
    std::partial_sort(vals.begin(), vals.begin() + m, vals.end(),
                      [](const auto& a, const auto& b) { return a.first > b.first; });
    double best = vals.front().first;
    const double size = std::max(box.tMax - box.tMin, 2.0 * box.R);
    for (int s = 0; s < m; ++s) {
        double fv = vals[s].first;
        Vec4 x = vals[s].second.coords();
        double h = size / n;
        while (h > 1e-4 * size) {
            bool moved = false;
            for (int a = 0; a < 4 && !moved; ++a)
                for (double sg : {1.0, -1.0}) {
                    Vec4 y = x;
                    y[a] += sg * h;
                    const Point q = Point::from(y);
                    if (!box.admissible(q)) continue;
                    const double fq = f(q);
                    if (fq > fv) {
                        fv = fq;
                        x = y;
                        moved = true;
                        break;
                    }
                }
            if (!moved) h *= 0.5;
        }
        best = std::max(best, fv);
    }
    return best;
}

double gradient_frame_ratio_at(const FieldProvider& psi, FrameVector U, FrameVector V, const Point& p) {
    if (!is_tangential(V)) throw FrameMismatch("second slot must be tangential");
    if (!(p.r() > 0.0)) throw PoleDegenerate("gradient bound needs r > 0");
    const LocalField lf = psi(p);
    if (lf.F.rank() != 2) throw RankMismatch("gradient bound needs a rank-2 field");
    const Vec4 x = p.coords();
    const Vec4 y{x[0] - lf.origin[0], x[1] - lf.origin[1], x[2] - lf.origin[2], x[3] - lf.origin[3]};
    const Frame F = null_frame_at(p);

    double lhs2 = 0.0;
    for (int mu = 0; mu < 4; ++mu)
        for (double v : frame_component(lf.F.partial(mu).eval(y), F[U], F[V])) lhs2 += v * v;
    const double lhs = std::sqrt(lhs2);

    double good = 0.0, bad = 0.0;
    for (const MultiIndex& I : all_multi_indices(1)) {
        const CoordTensor T = lie_multi(I, lf.F, lf.origin).eval(y);
        good += frobenius_norm(T);
        for (FrameVector Up : kFullSet)
            for (FrameVector Vp : kTangentialSet) bad += norm(frame_component(T, F[Up], F[Vp]));
    }
    const double rhs = good / good_weight(p) + bad / bad_weight(p);
    if (rhs > 0.0) return lhs / rhs;
    return lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

double gradient_frame_bound_check(const FieldProvider& psi, FrameVector U, FrameVector V,
                                  const std::vector<Point>& samples) {
    double worst = 0.0;
    for (const Point& p : samples) worst = std::max(worst, gradient_frame_ratio_at(psi, U, V, p));
    return worst;
}

DecayConstants decay_ratios_at(const FieldProvider& phi, int order, const Point& p) {
    DecayConstants out;
    const LocalField lf = phi(p);
    const Vec4 x = p.coords();
    const Vec4 y{x[0] - lf.origin[0], x[1] - lf.origin[1], x[2] - lf.origin[2], x[3] - lf.origin[3]};
    std::unordered_map<std::uint64_t, PolyField> memo;
    auto key = [](const MultiIndex& J) {
        std::uint64_t k = 0;
        for (VectorFieldId z : J) k = k * 12 + static_cast<std::uint64_t>(ordinal(z) + 1);
        return k;
    };

    double denom = 0.0;
    for (const MultiIndex& J : all_multi_indices(order + 1))
        denom += frobenius_norm(lie_memo(memo, lf.F, J, lf.origin, key).eval(y));

    const Frame F = null_frame_at(p);
    double full = 0.0, tan = 0.0;
    for (const MultiIndex& I : all_multi_indices(order)) {
        const PolyField& G = lie_memo(memo, lf.F, I, lf.origin, key);
        std::array<CoordTensor, 4> d;
        for (int mu = 0; mu < 4; ++mu) d[mu] = G.partial(mu).eval(y);
        double f2 = 0.0, t2 = 0.0;
        for (int mu = 0; mu < 4; ++mu)
            for (double v : d[mu].data()) f2 += v * v;
        for (FrameVector U : kTangentialSet)
            for (std::size_t n = 0; n < d[0].data().size(); ++n) {
                double v = 0.0;
                for (int mu = 0; mu < 4; ++mu) v += F[U][mu] * d[mu].data()[n];
                t2 += v * v;
            }
        full = std::max(full, std::sqrt(f2));
        tan = std::max(tan, std::sqrt(t2));
    }
    auto ratio = [denom](double num) {
        if (denom > 0.0) return num / denom;
        return num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    };
    out.full = ratio(bad_weight(p) * full);
    out.tangential = ratio(good_weight(p) * tan);
    return out;
}

DecayConstants decay_constants(const FieldProvider& phi, int order, const std::vector<Point>& samples) {
    DecayConstants out;
    for (const Point& p : samples) {
        const DecayConstants d = decay_ratios_at(phi, order, p);
        out.full = std::max(out.full, d.full);
        out.tangential = std::max(out.tangential, d.tangential);
    }
    return out;
}

// ---------------------------------------------------------------------------

LinComb frame_rotation_form(FrameVector eA, const Point& p) {
    if (eA != FrameVector::e1 && eA != FrameVector::e2) throw DomainMismatch("rotation form exists for e1, e2 only");
    const Vec4 e = null_frame_at(p)[eA];
    LinComb c{};
    for (int i = 1; i <= 3; ++i) {
        const LinComb r = restricted_derivative_rotation(i, p).rotationForm;
        for (int k = 0; k < kGeneratorCount; ++k) c[k] += e[i] * r[k];
    }
    return c;
}

LinComb frame_boost_form(FrameVector eA, const Point& p) {
    if (eA != FrameVector::e1 && eA != FrameVector::e2) throw DomainMismatch("boost form exists for e1, e2 only");
    if (p.t == 0.0) throw TimeZero("boost form divides by t");
    const Vec4 e = null_frame_at(p)[eA];
    LinComb c{};
    for (int j = 1; j <= 3; ++j) c[ordinal(lorentz(0, j))] = e[j] / p.t;
    return c;
}

double lbar_radial_fd(const Point& p, int j, double h) {
    const double r = p.r();
    if (!(r > 0.0)) throw PoleDegenerate("x^j / r needs r > 0");
    auto f = [&](double s) {
        // Point p + s Lbar with Lbar = d_t - d_r.
        std::array<double, 3> x{};
        for (int i = 0; i < 3; ++i) x[i] = p.x[i] - s * p.x[i] / r;
        const double rr = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
        return x[j - 1] / rr;
    };
    return (f(h) - f(-h)) / (2.0 * h);
}

double lbar_radial_exact(const Point& p, int j) {
    const double r = p.r();
    if (!(r > 0.0)) throw PoleDegenerate("x^j / r needs r > 0");
    // -xhat^i d_i (x^j / r) = -(xhat^j / r - x^j (x . xhat) / r^3).
    const double xj = p.x[j - 1];
    double dot = 0.0;
    for (int i = 0; i < 3; ++i) dot += p.x[i] * (p.x[i] / r);
    return -((xj / r) / r - xj * dot / (r * r * r));
}

// ---------------------------------------------------------------------------

EstimateReport energy_estimate_report(const MonitorHistory& psi, const MonitorHistory& phiV, const Background& bg,
                                      double t1, double t2, const ExteriorRegion& region,
                                      const WeightParams& params) {
    params.validate();
    const auto win = history_window(psi, t1, t2);
    history_window(phiV, t1, t2);
    const MonitorSlice& first = *win.front();
    const MonitorSlice& last = *win.back();

    const WeightFn wt = [params](double q) { return w_tilde(q, params); };
    const WeightFn wplain = [params](double q) { return w(q, params); };
    const WeightFn wtp = kink_averaged([params](double q) { return w_tilde_prime(q, params); });
    const WeightFn whp = kink_averaged([params](double q) { return w_hat_prime(q, params); });

    EstimateReport rep;
    bool small = true;

    auto integrate = [&](const MonitorHistory& h, auto density) {
        return spacetime_integral(h, t1, t2, region,
                                  [&](const MonitorSlice& s, int i, int j, int k, const Point& p) {
                                      const StressPoint sp = slice_stress_point(s, bg, i, j, k);
                                      if (!sp.small_perturbation()) small = false;
                                      return density(s, sp, i, j, k, p);
                                  });
    };

    const double sliceT2 = exterior_energy(last, region, wt);
    const double fluxT = integrate(psi, [&](const MonitorSlice&, const StressPoint& sp, int, int, int, const Point& p) {
        return tangential_gradient_square(sp) * wtp(p.q());
    });
    rep.lhs = {{"slice_energy_t2_wtilde", "Thm-line: LHS slice energy at t2 (w~)", sliceT2},
               {"tangential_flux_wtilde_prime", "Thm-line: LHS tangential flux (w~')", fluxT}};

    const double sliceT2w = exterior_energy(last, region, wplain);
    const double fluxHat = integrate(psi, [&](const MonitorSlice&, const StressPoint& sp, int, int, int, const Point& p) {
        return tangential_gradient_square(sp) * whp(p.q());
    });
    rep.lhsTheorem = {{"slice_energy_t2_w", "Thm-line: LHS slice energy at t2 (w)", sliceT2w},
                      {"tangential_flux_what_prime", "Thm-line: LHS tangential flux (w^')", fluxHat}};

    const double initial = exterior_energy(first, region, wt);

    const double hll = integrate(psi, [&](const MonitorSlice&, const StressPoint& sp, int, int, int, const Point& p) {
        const Frame F = null_frame_at(p);
        const double HLL = std::abs(contract(lower_both(sp.H), F.L, F.L));
        return HLL * gradient_square(sp) * wtp(p.q());
    });

    const double hTan = integrate(psi, [&](const MonitorSlice&, const StressPoint& sp, int, int, int, const Point& p) {
        return frobenius_norm(sp.H) * std::sqrt(tangential_gradient_square(sp)) * std::sqrt(gradient_square(sp)) *
               wtp(p.q());
    });

    const double dHPhi = integrate(phiV, [&](const MonitorSlice&, const StressPoint& sp, int, int, int, const Point& p) {
        const MetricSample m = bg.sample(p);
        const Frame F = null_frame_at(p);
        double dLL = 0.0, tanH = 0.0;
        for (int mu = 0; mu < 4; ++mu) {
            const double v = contract(lower_both(m.dH[mu]), F.L, F.L);
            dLL += v * v;
        }
        for (FrameVector U : kTangentialSet) {
            Mat4 D{};
            for (int mu = 0; mu < 4; ++mu)
                for (int a = 0; a < 4; ++a)
                    for (int b = 0; b < 4; ++b) D[a][b] += F[U][mu] * m.dH[mu][a][b];
            const double n = frobenius_norm(D);
            tanH += n * n;
        }
        return (std::sqrt(dLL) + std::sqrt(tanH)) * gradient_square(sp) * wt(p.q());
    });

    const double dHTan = integrate(psi, [&](const MonitorSlice&, const StressPoint& sp, int, int, int, const Point& p) {
        const MetricSample m = bg.sample(p);
        double dH = 0.0;
        for (int mu = 0; mu < 4; ++mu) {
            const double n = frobenius_norm(m.dH[mu]);
            dH += n * n;
        }
        return std::sqrt(dH) * std::sqrt(tangential_gradient_square(sp)) * std::sqrt(gradient_square(sp)) *
               wt(p.q());
    });

    const double waveTerm = integrate(psi, [&](const MonitorSlice& s, const StressPoint& sp, int i, int j, int k,
                                               const Point& p) {
        double wv = 0.0, dt = 0.0;
        for (int c = 0; c < sp.channels(); ++c) {
            const double x = s.wave.at(c, i, j, k);
            wv += x * x;
            dt += sp.dpsi[0][c] * sp.dpsi[0][c];
        }
        return std::sqrt(wv) * std::sqrt(dt) * wt(p.q());
    });

    rep.rhs = {
        {"initial_slice_wtilde", "Thm-line: initial slice (w~)", initial},
        {"HLL_times_dPsi_sq_wtilde_prime", "Thm-line: HLL w~' term", hll},
        {"H_times_tanPsi_dPsi_wtilde_prime", "Thm-line: |H| tangential w~' term", hTan},
        {"dHLL_plus_tanH_times_dPhiV_sq_wtilde", "Thm-line: (|dH_LL| + |tangential dH|) w~ term", dHPhi},
        {"dH_times_tanPsi_dPsi_wtilde", "Thm-line: |dH| tangential w~ term", dHTan},
        {"wave_times_dtPsi_wtilde", "Thm-line: wave operator times d_t w~ term", waveTerm},
    };

    for (const auto& t : rep.lhs) rep.lhsTotal += t.value;
    for (const auto& t : rep.lhsTheorem) rep.lhsTheoremTotal += t.value;
    for (const auto& t : rep.rhs) rep.rhsTotal += t.value;
    if (rep.rhsTotal > 0.0) {
        rep.impliedConstant = rep.lhsTotal / rep.rhsTotal;
        rep.impliedConstantTheorem = rep.lhsTheoremTotal / rep.rhsTotal;
    }
    rep.smallPerturbation = small;
    return rep;
}

} // namespace framelab
