#include "framelab/poly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace framelab {

Poly::Key Poly::encode(const std::array<int, 4>& e) {
    for (int v : e)
        if (v < 0 || v > 255) throw DomainMismatch("polynomial exponent out of range");
    return (static_cast<Key>(e[0]) << 24) | (static_cast<Key>(e[1]) << 16) |
           (static_cast<Key>(e[2]) << 8) | static_cast<Key>(e[3]);
}

std::array<int, 4> Poly::decode(Key k) {
    return {static_cast<int>((k >> 24) & 0xff), static_cast<int>((k >> 16) & 0xff),
            static_cast<int>((k >> 8) & 0xff), static_cast<int>(k & 0xff)};
}

int Poly::key_degree(Key k) {
    const auto e = decode(k);
    return e[0] + e[1] + e[2] + e[3];
}

Poly Poly::constant(double c) { return monomial(c, {0, 0, 0, 0}); }

Poly Poly::var(int v) {
    std::array<int, 4> e{0, 0, 0, 0};
    e[v] = 1;
    return monomial(1.0, e);
}

Poly Poly::monomial(double c, const std::array<int, 4>& exps) {
    Poly p;
    if (c != 0.0) p.terms_.push_back({encode(exps), c});
    return p;
}

Poly Poly::affine(double b, const Vec4& a) {
    Poly p = constant(b);
    for (int k = 0; k < 4; ++k)
        if (a[k] != 0.0) p += a[k] * var(k);
    return p;
}

int Poly::degree() const {
    int d = -1;
    for (const Term& t : terms_) d = std::max(d, key_degree(t.key));
    return d;
}

double Poly::max_abs_coeff() const {
    double m = 0.0;
    for (const Term& t : terms_) m = std::max(m, std::abs(t.c));
    return m;
}

void Poly::normalize() {
    std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.key < b.key; });
    std::size_t w = 0;
    for (std::size_t i = 0; i < terms_.size();) {
        const Key k = terms_[i].key;
        double s = 0.0;
        while (i < terms_.size() && terms_[i].key == k) s += terms_[i++].c;
        if (s != 0.0) terms_[w++] = {k, s};
    }
    terms_.resize(w);
}

double Poly::eval(const Vec4& x) const {
    if (terms_.empty()) return 0.0;
    int maxe = 0;
    for (const Term& t : terms_) {
        const auto e = decode(t.key);
        for (int v : e) maxe = std::max(maxe, v);
    }
    std::vector<std::array<double, 4>> pw(maxe + 1);
    pw[0] = {1.0, 1.0, 1.0, 1.0};
    for (int k = 1; k <= maxe; ++k)
        for (int v = 0; v < 4; ++v) pw[k][v] = pw[k - 1][v] * x[v];
    double s = 0.0;
    for (const Term& t : terms_) {
        const auto e = decode(t.key);
        s += t.c * pw[e[0]][0] * pw[e[1]][1] * pw[e[2]][2] * pw[e[3]][3];
    }
    return s;
}

Poly Poly::derivative(int v) const {
    Poly out;
    out.terms_.reserve(terms_.size());
    for (const Term& t : terms_) {
        auto e = decode(t.key);
        if (e[v] == 0) continue;
        const double c = t.c * e[v];
        --e[v];
        out.terms_.push_back({encode(e), c});
    }
    // Lowering one exponent keeps the relative key order.
    return out;
}

Poly Poly::times_var(int v) const {
    Poly out;
    out.terms_.reserve(terms_.size());
    for (const Term& t : terms_) {
        auto e = decode(t.key);
        ++e[v];
        out.terms_.push_back({encode(e), t.c});
    }
    return out;
}

Poly Poly::truncated(int maxDegree) const {
    Poly out;
    for (const Term& t : terms_)
        if (key_degree(t.key) <= maxDegree) out.terms_.push_back(t);
    return out;
}

Poly Poly::shifted(const Vec4& p) const {
    // Substitute x^v = p_v + y^v one variable at a time with binomial expansion.
    Poly acc;
    std::array<Poly, 4> base;
    for (int v = 0; v < 4; ++v) base[v] = Poly::constant(p[v]) + Poly::var(v);
    std::array<std::vector<Poly>, 4> powers;
    for (const Term& t : terms_) {
        const auto e = decode(t.key);
        Poly m = Poly::constant(t.c);
        for (int v = 0; v < 4; ++v) {
            auto& pw = powers[v];
            if (pw.empty()) pw.push_back(Poly::constant(1.0));
            while (static_cast<int>(pw.size()) <= e[v]) pw.push_back(pw.back() * base[v]);
            if (e[v] > 0) m = m * pw[e[v]];
        }
        acc += m;
    }
    return acc;
}

Poly& Poly::operator+=(const Poly& o) {
    if (o.terms_.empty()) return *this;
    std::vector<Term> merged;
    merged.reserve(terms_.size() + o.terms_.size());
    std::size_t i = 0, j = 0;
    while (i < terms_.size() || j < o.terms_.size()) {
        if (j == o.terms_.size() || (i < terms_.size() && terms_[i].key < o.terms_[j].key)) {
            merged.push_back(terms_[i++]);
        } else if (i == terms_.size() || o.terms_[j].key < terms_[i].key) {
            merged.push_back(o.terms_[j++]);
        } else {
            const double s = terms_[i].c + o.terms_[j].c;
            if (s != 0.0) merged.push_back({terms_[i].key, s});
            ++i;
            ++j;
        }
    }
    terms_ = std::move(merged);
    return *this;
}

Poly& Poly::operator-=(const Poly& o) { return *this += -o; }

Poly& Poly::operator*=(double s) {
    if (s == 0.0) {
        terms_.clear();
        return *this;
    }
    for (Term& t : terms_) t.c *= s;
    return *this;
}

Poly Poly::operator-() const {
    Poly out = *this;
    for (Term& t : out.terms_) t.c = -t.c;
    return out;
}

Poly operator*(const Poly& a, const Poly& b) {
    Poly out;
    if (a.terms_.empty() || b.terms_.empty()) return out;
    if (a.degree() + b.degree() > 255) throw DomainMismatch("polynomial degree overflow");
    out.terms_.reserve(a.terms_.size() * b.terms_.size());
    // With total degree <= 255 no packed exponent field can carry, so keys add.
    for (const auto& ta : a.terms_)
        for (const auto& tb : b.terms_) out.terms_.push_back({ta.key + tb.key, ta.c * tb.c});
    out.normalize();
    return out;
}

bool operator==(const Poly& a, const Poly& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i)
        if (a.terms_[i].key != b.terms_[i].key || a.terms_[i].c != b.terms_[i].c) return false;
    return true;
}

std::string Poly::to_string() const {
    if (terms_.empty()) return "0";
    static const char* names[4] = {"t", "x1", "x2", "x3"};
    std::ostringstream os;
    bool first = true;
    for (const Term& t : terms_) {
        if (!first) os << (t.c < 0 ? " - " : " + ");
        else if (t.c < 0) os << "-";
        first = false;
        os << std::abs(t.c);
        const auto e = decode(t.key);
        for (int v = 0; v < 4; ++v) {
            if (e[v] == 0) continue;
            os << "*" << names[v];
            if (e[v] > 1) os << "^" << e[v];
        }
    }
    return os.str();
}

Poly exp_series(const Poly& u, int order) {
    // exp(u0 + v) with v free of constants: e^{u0} sum_n v^n / n!.
    double u0 = 0.0;
    Poly v;
    for (const auto& t : u.terms())
        if (t.key == 0) u0 = t.c;
        else v += Poly::monomial(t.c, Poly::decode(t.key));
    Poly sum = Poly::constant(1.0);
    Poly term = Poly::constant(1.0);
    for (int n = 1; n <= order; ++n) {
        term = (term * v).truncated(order);
        term *= 1.0 / n;
        if (term.is_zero()) break;
        sum += term;
    }
    sum *= std::exp(u0);
    return sum;
}

} // namespace framelab
