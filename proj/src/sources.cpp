#include "framelab/sources.hpp"

#include <cmath>
#include <map>

#include "framelab/errors.hpp"

namespace framelab {

namespace {

const std::map<SourceTermKind, std::string>& names() {
    static const std::map<SourceTermKind, std::string> n{
        {SourceTermKind::DhTanA, "dh_tanA"},   {SourceTermKind::TanhDA, "tanh_dA"},
        {SourceTermKind::ATanA, "A_tanA"},     {SourceTermKind::DhA2, "dh_A2"},
        {SourceTermKind::A3, "A3"},            {SourceTermKind::ALDA, "AL_dA"},
        {SourceTermKind::AeDAe, "Ae_dAe"},     {SourceTermKind::DhTUSq, "dhTU_sq"},
        {SourceTermKind::DAeSq, "dAe_sq"},     {SourceTermKind::BigOhDA, "bigO_h_dA"},
    };
    return n;
}

/// Everything derived once per point: frame, h_{UV}, directional derivatives.
struct Prepared {
    const LocalFields& f;
    int C;
    Frame frame;
    bool haveFrame = false;
    Mat4 h{};                   // h_ab = -H_ab lowered
    std::array<Mat4, 4> dh{};   // d_mu h_ab

    explicit Prepared(const LocalFields& fields) : f(fields), C(fields.A.channels()) {
        h = lower_both(f.metric.H);
        for (auto& row : h)
            for (double& x : row) x = -x;
        for (int mu = 0; mu < 4; ++mu) {
            dh[mu] = lower_both(f.metric.dH[mu]);
            for (auto& row : dh[mu])
                for (double& x : row) x = -x;
        }
    }

    const Frame& fr() {
        if (!haveFrame) {
            frame = null_frame_at(f.p);
            haveFrame = true;
        }
        return frame;
    }

    /// U^mu d_mu A_nu^c.
    double dirA(const Vec4& U, int nu, int c) const {
        double v = 0.0;
        for (int mu = 0; mu < 4; ++mu) v += U[mu] * f.dA[mu].at(c, nu);
        return v;
    }
    /// A(U)^c.
    double projA(const Vec4& U, int c) const {
        double v = 0.0;
        for (int a = 0; a < 4; ++a) v += U[a] * f.A.at(c, a);
        return v;
    }
    /// d_mu (A(U))^c with U held fixed: (d_mu A_a) U^a.
    double gradProjA(int mu, const Vec4& U, int c) const {
        double v = 0.0;
        for (int a = 0; a < 4; ++a) v += U[a] * f.dA[mu].at(c, a);
        return v;
    }
    /// X^mu d_mu h(U, V).
    double dirH(const Vec4& X, const Vec4& U, const Vec4& V) const {
        double v = 0.0;
        for (int mu = 0; mu < 4; ++mu) v += X[mu] * contract(dh[mu], U, V);
        return v;
    }
};

int partner_of(const SourceTerm& t, int c, int C) {
    if (t.partner.empty()) return (c + 1) % C;
    return t.partner[c];
}

Vec4 axis(int mu) {
    Vec4 v{};
    v[mu] = 1.0;
    return v;
}

} // namespace

std::string to_string(SourceTermKind k) { return names().at(k); }

SourceTermKind source_term_from_string(const std::string& s) {
    for (const auto& [k, n] : names())
        if (n == s) return k;
    throw SchemaError("unknown source term '" + s + "'");
}

void SourceSpec::validate(int channels) const {
    for (const auto& t : terms) {
        if (t.kind == SourceTermKind::BigOhDA && t.degree < 1)
            throw ConstraintError("Big-O truncation degree must be >= 1");
        if (!t.partner.empty()) {
            if (static_cast<int>(t.partner.size()) != channels)
                throw ConstraintError("channel wiring must list one partner per channel");
            for (int p : t.partner)
                if (p < 0 || p >= channels) throw ConstraintError("channel wiring out of range");
        }
    }
}

CoordTensor evaluate_source(const SourceSpec& spec, const LocalFields& f) {
    const int C = f.A.channels();
    CoordTensor S(1, C);
    if (spec.empty()) return S;
    Prepared P(f);
    for (const SourceTerm& t : spec.terms) {
        for (int c = 0; c < C; ++c) {
            const int cp = partner_of(t, c, C);
            for (int nu = 0; nu < 4; ++nu) {
                double v = 0.0;
                switch (t.kind) {
                case SourceTermKind::DhTanA: {
                    // Bad derivative of h along Lbar times tangential derivatives of A.
                    // Bilinear in each tangential U, hence independent of the sphere chart.
                    const Frame& F = P.fr();
                    for (FrameVector U : kTangentialSet) v += P.dirH(F.Lbar, F.Lbar, F[U]) * P.dirA(F[U], nu, c);
                    break;
                }
                case SourceTermKind::TanhDA: {
                    const Frame& F = P.fr();
                    for (FrameVector U : kTangentialSet)
                        v += P.dirH(F[U], F[U], F.Lbar) * P.dirA(F.Lbar, nu, c);
                    break;
                }
                case SourceTermKind::ATanA: {
                    const Frame& F = P.fr();
                    for (FrameVector U : kTangentialSet) v += P.projA(F[U], cp) * P.dirA(F[U], nu, c);
                    break;
                }
                case SourceTermKind::DhA2: {
                    const Frame& F = P.fr();
                    v = P.dirH(F.Lbar, F.L, F.L) * f.A.at(c, nu) * f.A.at(cp, 0);
                    break;
                }
                case SourceTermKind::A3: {
                    const double a = f.A.at(c, nu);
                    v = a * a * a;
                    break;
                }
                case SourceTermKind::ALDA: {
                    const Frame& F = P.fr();
                    v = P.projA(F.L, cp) * f.dA[0].at(c, nu);
                    break;
                }
                case SourceTermKind::AeDAe: {
                    const Frame& F = P.fr();
                    for (const Vec4* e : {&F.e1, &F.e2}) v += P.projA(*e, cp) * P.gradProjA(nu, *e, c);
                    break;
                }
                case SourceTermKind::DhTUSq: {
                    const Frame& F = P.fr();
                    const Vec4 dnu = axis(nu), dt = axis(0);
                    for (FrameVector T : kTangentialSet)
                        for (FrameVector U : kFullSet) v += P.dirH(dnu, F[T], F[U]) * P.dirH(dt, F[T], F[U]);
                    break;
                }
                case SourceTermKind::DAeSq: {
                    const Frame& F = P.fr();
                    for (const Vec4* e : {&F.e1, &F.e2}) v += P.gradProjA(nu, *e, cp) * P.gradProjA(0, *e, c);
                    break;
                }
                case SourceTermKind::BigOhDA: {
                    // Q(h) = sum_{n=1}^{D} (h_LL)^n, a polynomial without constant term.
                    const Frame& F = P.fr();
                    const double hLL = contract(P.h, F.L, F.L);
                    double q = 0.0, pw = 1.0;
                    for (int n = 1; n <= t.degree; ++n) {
                        pw *= hLL;
                        q += pw;
                    }
                    v = q * f.dA[0].at(c, nu);
                    break;
                }
                }
                S.at(c, nu) += t.coeff * v;
            }
        }
    }
    return S;
}

CoordTensor metric_toy_source(const LocalFields& f) {
    const int C = f.A.channels();
    const Frame F = null_frame_at(f.p);
    CoordTensor S(2, 1);
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) {
            double v = 0.0;
            for (const Vec4* e : {&F.e1, &F.e2})
                for (int c = 0; c < C; ++c) {
                    double a = 0.0, b = 0.0;
                    for (int l = 0; l < 4; ++l) {
                        a += (*e)[l] * f.dA[mu].at(c, l);
                        b += (*e)[l] * f.dA[nu].at(c, l);
                    }
                    v += a * b;
                }
            S.at(0, mu, nu) = v;
        }
    return S;
}

} // namespace framelab
