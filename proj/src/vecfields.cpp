#include "framelab/vecfields.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace framelab {

namespace {

constexpr std::array<std::array<int, 2>, 6> kLorentzPairs{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

std::string strip(const std::string& s) {
    std::string out;
    for (char ch : s)
        if (!std::isspace(static_cast<unsigned char>(ch))) out += ch;
    return out;
}

} // namespace

VectorFieldId translation(int mu) {
    if (mu < 0 || mu > 3) throw ParseError("translation index out of range");
    return generator(mu);
}

VectorFieldId lorentz(int a, int b) {
    for (int k = 0; k < 6; ++k)
        if (kLorentzPairs[k][0] == a && kLorentzPairs[k][1] == b) return generator(4 + k);
    throw ParseError("Lorentz generator needs 0 <= a < b <= 3");
}

std::string name(VectorFieldId z) {
    static const char* names[kGeneratorCount] = {"P t", "P x1", "P x2", "P x3", "Z01", "Z02",
                                                 "Z03", "Z12",  "Z13",  "Z23",  "S"};
    return names[ordinal(z)];
}

VectorFieldId parse_generator(const std::string& raw) {
    const std::string s = strip(raw);
    if (s == "S") return VectorFieldId::S;
    if (s.size() == 3 && s[0] == 'Z' && std::isdigit(static_cast<unsigned char>(s[1])) &&
        std::isdigit(static_cast<unsigned char>(s[2])))
        return lorentz(s[1] - '0', s[2] - '0');
    if (!s.empty() && s[0] == 'P') {
        const std::string a = s.substr(1);
        if (a == "t" || a == "0") return VectorFieldId::Pt;
        if (a == "x1" || a == "1") return VectorFieldId::Px1;
        if (a == "x2" || a == "2") return VectorFieldId::Px2;
        if (a == "x3" || a == "3") return VectorFieldId::Px3;
    }
    throw ParseError("unknown generator '" + raw + "'");
}

MultiIndex parse_multi_index(const std::string& s) {
    MultiIndex I;
    if (strip(s).empty()) return I;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) I.push_back(parse_generator(item));
    return I;
}

std::string to_string(const MultiIndex& I) {
    std::string out;
    for (std::size_t k = 0; k < I.size(); ++k) {
        if (k) out += ",";
        out += name(I[k]);
    }
    return out;
}

AffineField affine_of(VectorFieldId z) {
    AffineField f;
    const int k = ordinal(z);
    if (k < 4) {
        f.b[k] = 1.0;
    } else if (z == VectorFieldId::S) {
        for (int m = 0; m < 4; ++m) f.A[m][m] = 1.0;
    } else {
        // Z_ab = x_b d_a - x_a d_b with x_b = m_{b c} x^c.
        const int a = kLorentzPairs[k - 4][0];
        const int b = kLorentzPairs[k - 4][1];
        f.A[a][b] = kEta[b];
        f.A[b][a] = -kEta[a];
    }
    return f;
}

Vec4 eval_field(VectorFieldId z, const Vec4& x) {
    const AffineField f = affine_of(z);
    Vec4 v = f.b;
    for (int l = 0; l < 4; ++l)
        for (int k = 0; k < 4; ++k) v[l] += f.A[l][k] * x[k];
    return v;
}

PolyField as_field(VectorFieldId z) {
    const AffineField f = affine_of(z);
    PolyField out(1, 1, {Slot::Contra, Slot::Contra});
    for (int l = 0; l < 4; ++l) out.at(0, l) = Poly::affine(f.b[l], f.A[l]);
    return out;
}

PolyField lie_derivative(VectorFieldId z, const PolyField& T, const Vec4& origin) {
    const AffineField f = affine_of(z);
    // Coefficients in the shifted variables: Z(origin + y) = A y + (A origin + b).
    std::array<Poly, 4> coeff;
    for (int l = 0; l < 4; ++l) {
        double c = f.b[l];
        for (int k = 0; k < 4; ++k) c += f.A[l][k] * origin[k];
        coeff[l] = Poly::affine(c, f.A[l]);
    }
    PolyField out(T.rank(), T.channels(), T.slots());
    const int nslot = T.rank() == 0 ? 1 : (T.rank() == 1 ? 4 : 16);
    for (int c = 0; c < T.channels(); ++c)
        for (int s = 0; s < nslot; ++s) {
            const int a = T.rank() == 2 ? s / 4 : s;
            const int b = T.rank() == 2 ? s % 4 : 0;
            const Poly& comp = T.at(c, a, b);
            Poly acc;
            for (int l = 0; l < 4; ++l)
                if (!coeff[l].is_zero()) {
                    const Poly d = comp.derivative(l);
                    if (!d.is_zero()) acc += coeff[l] * d;
                }
            // Slot corrections from the constant Jacobian d_k Z^l = A[l][k].
            for (int slot = 0; slot < T.rank(); ++slot) {
                const int idx = slot == 0 ? a : b;
                for (int l = 0; l < 4; ++l) {
                    const double w = T.slot(slot) == Slot::Co ? f.A[l][idx] : -f.A[idx][l];
                    if (w == 0.0) continue;
                    const Poly& other = slot == 0 ? T.at(c, l, b) : T.at(c, a, l);
                    if (!other.is_zero()) acc += w * other;
                }
            }
            out.at(c, a, b) = std::move(acc);
        }
    return out;
}

PolyField lie_multi(const MultiIndex& I, const PolyField& T, const Vec4& origin) {
    PolyField out = T;
    for (auto it = I.rbegin(); it != I.rend(); ++it) out = lie_derivative(*it, out, origin);
    return out;
}

LinComb unit(VectorFieldId z) {
    LinComb c{};
    c[ordinal(z)] = 1.0;
    return c;
}

AffineField affine_of(const LinComb& c) {
    AffineField f;
    for (int k = 0; k < kGeneratorCount; ++k) {
        if (c[k] == 0.0) continue;
        const AffineField g = affine_of(generator(k));
        for (int l = 0; l < 4; ++l) {
            f.b[l] += c[k] * g.b[l];
            for (int m = 0; m < 4; ++m) f.A[l][m] += c[k] * g.A[l][m];
        }
    }
    return f;
}

LinComb decompose(const AffineField& f) {
    LinComb c{};
    for (int l = 0; l < 4; ++l) c[l] = f.b[l];
    double trace = 0.0;
    for (int l = 0; l < 4; ++l) trace += f.A[l][l];
    c[ordinal(VectorFieldId::S)] = trace / 4.0;
    for (int k = 0; k < 6; ++k) {
        const int a = kLorentzPairs[k][0];
        const int b = kLorentzPairs[k][1];
        c[4 + k] = f.A[a][b] / kEta[b];
    }
    const AffineField back = affine_of(c);
    double err = 0.0;
    for (int l = 0; l < 4; ++l) {
        err = std::max(err, std::abs(back.b[l] - f.b[l]));
        for (int m = 0; m < 4; ++m) err = std::max(err, std::abs(back.A[l][m] - f.A[l][m]));
    }
    if (err > 1e-12) throw NotProportional("affine field is not in the span of the Minkowski generators");
    return c;
}

namespace {

AffineField bracket_affine(const AffineField& X, const AffineField& Y) {
    // X^k d_k Y^l - Y^k d_k X^l with d_k Y^l = Y.A[l][k].
    AffineField r;
    for (int l = 0; l < 4; ++l) {
        for (int k = 0; k < 4; ++k) {
            r.b[l] += X.b[k] * Y.A[l][k] - Y.b[k] * X.A[l][k];
            for (int m = 0; m < 4; ++m) r.A[l][m] += X.A[k][m] * Y.A[l][k] - Y.A[k][m] * X.A[l][k];
        }
    }
    return r;
}

} // namespace

LinComb bracket(const LinComb& a, const LinComb& b) {
    return decompose(bracket_affine(affine_of(a), affine_of(b)));
}

LinComb commutator(VectorFieldId a, VectorFieldId b) { return bracket(unit(a), unit(b)); }

std::vector<MultiIndex> multi_indices_of_order(int order) {
    std::vector<MultiIndex> out{MultiIndex{}};
    for (int n = 0; n < order; ++n) {
        std::vector<MultiIndex> next;
        next.reserve(out.size() * kGeneratorCount);
        for (const auto& I : out)
            for (int k = 0; k < kGeneratorCount; ++k) {
                MultiIndex J = I;
                J.push_back(generator(k));
                next.push_back(std::move(J));
            }
        out = std::move(next);
    }
    return out;
}

std::vector<MultiIndex> all_multi_indices(int maxOrder) {
    std::vector<MultiIndex> out;
    for (int n = 0; n <= maxOrder; ++n) {
        auto layer = multi_indices_of_order(n);
        out.insert(out.end(), layer.begin(), layer.end());
    }
    return out;
}

std::vector<std::vector<MultiIndex>> splittings(const MultiIndex& I, int parts) {
    std::vector<std::vector<MultiIndex>> out;
    const std::size_t n = I.size();
    std::size_t total = 1;
    for (std::size_t k = 0; k < n; ++k) total *= static_cast<std::size_t>(parts);
    out.reserve(total);
    for (std::size_t code = 0; code < total; ++code) {
        std::vector<MultiIndex> split(parts);
        std::size_t c = code;
        for (std::size_t k = 0; k < n; ++k) {
            split[c % parts].push_back(I[k]);
            c /= parts;
        }
        out.push_back(std::move(split));
    }
    return out;
}

RestrictedDerivative restricted_derivative_rotation(int i, const Point& p) {
    const double r = p.r();
    if (!(r > 0.0)) throw PoleDegenerate("restricted derivative needs r > 0");
    RestrictedDerivative d;
    // (x^j / r^2) Z_ij with Z_ji = -Z_ij.
    for (int j = 1; j <= 3; ++j) {
        if (j == i) continue;
        const double w = p.x[j - 1] / (r * r);
        if (i < j) d.rotationForm[ordinal(lorentz(i, j))] += w;
        else d.rotationForm[ordinal(lorentz(j, i))] -= w;
    }
    return d;
}

RestrictedDerivative restricted_derivative_as_Z(int i, const Point& p) {
    if (i < 1 || i > 3) throw DomainMismatch("restricted derivative index must be spatial");
    RestrictedDerivative d = restricted_derivative_rotation(i, p);
    if (p.t == 0.0) throw TimeZero("boost representation divides by t");
    const double r = p.r();
    const double xi = p.x[i - 1] / r;
    for (int j = 1; j <= 3; ++j) d.boostForm[ordinal(lorentz(0, j))] -= xi * (p.x[j - 1] / r) / p.t;
    d.boostForm[ordinal(lorentz(0, i))] += 1.0 / p.t;
    return d;
}

CoordTensor apply_combination(const LinComb& c, const PolyField& F, const Point& p) {
    const Vec4 x = p.coords();
    Vec4 v{};
    for (int k = 0; k < kGeneratorCount; ++k) {
        if (c[k] == 0.0) continue;
        const Vec4 z = eval_field(generator(k), x);
        for (int m = 0; m < 4; ++m) v[m] += c[k] * z[m];
    }
    CoordTensor out(F.rank(), F.channels());
    for (int m = 0; m < 4; ++m) {
        if (v[m] == 0.0) continue;
        const CoordTensor d = F.partial(m).eval(x);
        for (std::size_t n = 0; n < d.data().size(); ++n) out.data()[n] += v[m] * d.data()[n];
    }
    return out;
}

CoordTensor restricted_derivative_direct(int i, const PolyField& F, const Point& p) {
    const double r = p.r();
    if (!(r > 0.0)) throw PoleDegenerate("restricted derivative needs r > 0");
    const Vec4 x = p.coords();
    const double xi = p.x[i - 1] / r;
    CoordTensor out = F.partial(i).eval(x);
    for (int j = 1; j <= 3; ++j) {
        const CoordTensor d = F.partial(j).eval(x);
        const double w = -xi * p.x[j - 1] / r;
        for (std::size_t n = 0; n < d.data().size(); ++n) out.data()[n] += w * d.data()[n];
    }
    return out;
}

} // namespace framelab
