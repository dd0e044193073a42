#include "framelab/polyfield.hpp"

#include <algorithm>
#include <cmath>

namespace framelab {

PolyField::PolyField(int rank, int channels, std::array<Slot, 2> slots)
    : rank_(rank), channels_(channels), slots_(slots) {
    if (rank < 0 || rank > 2) throw RankMismatch("rank must be 0, 1 or 2");
    if (channels < 1) throw RankMismatch("channel count must be positive");
    comps_.assign(static_cast<std::size_t>(slot_count()) * channels, Poly());
}

PolyField PolyField::scalar(const Poly& p) {
    PolyField f(0, 1);
    f.at(0) = p;
    return f;
}

PolyField PolyField::minkowski_covariant() {
    PolyField f(2, 1, {Slot::Co, Slot::Co});
    for (int a = 0; a < 4; ++a) f.at(0, a, a) = Poly::constant(kEta[a]);
    return f;
}

PolyField PolyField::minkowski_inverse() {
    PolyField f(2, 1, {Slot::Contra, Slot::Contra});
    for (int a = 0; a < 4; ++a) f.at(0, a, a) = Poly::constant(kEta[a]);
    return f;
}

bool PolyField::same_shape(const PolyField& o) const {
    if (rank_ != o.rank_ || channels_ != o.channels_) return false;
    for (int k = 0; k < rank_; ++k)
        if (slots_[k] != o.slots_[k]) return false;
    return true;
}

bool PolyField::is_zero() const {
    return std::all_of(comps_.begin(), comps_.end(), [](const Poly& p) { return p.is_zero(); });
}

int PolyField::degree() const {
    int d = -1;
    for (const Poly& p : comps_) d = std::max(d, p.degree());
    return d;
}

double PolyField::max_abs_coeff() const {
    double m = 0.0;
    for (const Poly& p : comps_) m = std::max(m, p.max_abs_coeff());
    return m;
}

PolyField PolyField::partial(int mu) const {
    PolyField out(rank_, channels_, slots_);
    for (std::size_t i = 0; i < comps_.size(); ++i) out.comps_[i] = comps_[i].derivative(mu);
    return out;
}

CoordTensor PolyField::eval(const Vec4& x) const {
    CoordTensor T(rank_, channels_);
    for (std::size_t i = 0; i < comps_.size(); ++i) T.data()[i] = comps_[i].eval(x);
    return T;
}

PolyField PolyField::shifted(const Vec4& p) const {
    PolyField out(rank_, channels_, slots_);
    for (std::size_t i = 0; i < comps_.size(); ++i) out.comps_[i] = comps_[i].shifted(p);
    return out;
}

PolyField PolyField::truncated(int maxDegree) const {
    PolyField out(rank_, channels_, slots_);
    for (std::size_t i = 0; i < comps_.size(); ++i) out.comps_[i] = comps_[i].truncated(maxDegree);
    return out;
}

PolyField& PolyField::operator+=(const PolyField& o) {
    if (!same_shape(o)) throw RankMismatch("polynomial fields of different shape");
    for (std::size_t i = 0; i < comps_.size(); ++i) comps_[i] += o.comps_[i];
    return *this;
}

PolyField& PolyField::operator-=(const PolyField& o) {
    if (!same_shape(o)) throw RankMismatch("polynomial fields of different shape");
    for (std::size_t i = 0; i < comps_.size(); ++i) comps_[i] -= o.comps_[i];
    return *this;
}

PolyField& PolyField::operator*=(double s) {
    for (Poly& p : comps_) p *= s;
    return *this;
}

bool operator==(const PolyField& a, const PolyField& b) {
    return a.same_shape(b) && a.comps_ == b.comps_;
}

PolyField PolyMetric::H_lower() const {
    PolyField out(2, H.channels(), {Slot::Co, Slot::Co});
    for (int c = 0; c < H.channels(); ++c)
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) out.at(c, a, b) = (kEta[a] * kEta[b]) * H.at(c, a, b);
    return out;
}

Poly PolyMetric::g_inv(int a, int b) const {
    Poly p = H.at(0, a, b);
    if (a == b) p += Poly::constant(kEta[a]);
    return p;
}

namespace {

// sum_{ab} coeff(a, b) * d_a d_b F, with second derivatives shared over symmetric pairs.
template <class Coeff>
PolyField second_order_contraction(const PolyField& F, Coeff&& coeff) {
    PolyField out(F.rank(), F.channels(), F.slots());
    std::array<PolyField, 4> d1;
    for (int a = 0; a < 4; ++a) d1[a] = F.partial(a);
    for (int a = 0; a < 4; ++a)
        for (int b = a; b < 4; ++b) {
            Poly c = coeff(a, b);
            if (a != b) c += coeff(b, a);
            if (c.is_zero()) continue;
            const PolyField d2 = d1[a].partial(b);
            for (std::size_t i = 0; i < out.components().size(); ++i)
                if (!d2.components()[i].is_zero()) out.components()[i] += c * d2.components()[i];
        }
    return out;
}

} // namespace

PolyField wave_operator(const PolyMetric& g, const PolyField& F) {
    return second_order_contraction(F, [&](int a, int b) { return g.g_inv(a, b); });
}

PolyField flat_wave_operator(const PolyField& F) {
    return second_order_contraction(
        F, [](int a, int b) { return a == b ? Poly::constant(kEta[a]) : Poly(); });
}

PolyField contract_second_derivatives(const PolyField& Hup, const PolyField& F) {
    if (Hup.rank() != 2) throw RankMismatch("coefficient field must have rank 2");
    return second_order_contraction(F, [&](int a, int b) { return Hup.at(0, a, b); });
}

double tangential_gradient_norm(const PolyField& F, const Point& p) {
    const Frame fr = null_frame_at(p);
    const Vec4 x = p.coords();
    std::array<CoordTensor, 4> d;
    for (int mu = 0; mu < 4; ++mu) d[mu] = F.partial(mu).eval(x);
    double s = 0.0;
    for (FrameVector U : kTangentialSet) {
        const Vec4& u = fr[U];
        for (std::size_t i = 0; i < d[0].data().size(); ++i) {
            double v = 0.0;
            for (int mu = 0; mu < 4; ++mu) v += u[mu] * d[mu].data()[i];
            s += v * v;
        }
    }
    return std::sqrt(s);
}

double inner(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw DomainMismatch("channel counts differ");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

PolyField random_polyfield(std::mt19937_64& rng, int rank, int channels, std::array<Slot, 2> slots,
                           int maxDegree, int range, double density) {
    std::uniform_int_distribution<int> coef(-range, range);
    std::uniform_real_distribution<double> keep(0.0, 1.0);
    PolyField f(rank, channels, slots);
    for (Poly& p : f.components())
        p = random_poly(maxDegree, [&] { return keep(rng) < density ? double(coef(rng)) : 0.0; });
    return f;
}

PolyField random_symmetric_contra(std::mt19937_64& rng, int maxDegree, int range, double density) {
    std::uniform_int_distribution<int> coef(-range, range);
    std::uniform_real_distribution<double> keep(0.0, 1.0);
    PolyField f(2, 1, {Slot::Contra, Slot::Contra});
    for (int a = 0; a < 4; ++a)
        for (int b = a; b < 4; ++b) {
            f.at(0, a, b) =
                random_poly(maxDegree, [&] { return keep(rng) < density ? double(coef(rng)) : 0.0; });
            f.at(0, b, a) = f.at(0, a, b);
        }
    return f;
}

} // namespace framelab
