#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "framelab/geometry.hpp"

namespace framelab {

/// Sparse polynomial in (t, x1, x2, x3) with double coefficients.
///
/// All operations are plain ring arithmetic, so integer coefficients stay
/// exact as long as they remain below 2^53.
class Poly {
public:
    using Key = std::uint32_t;
    struct Term {
        Key key;
        double c;
    };

    Poly() = default;

    static Poly constant(double c);
    /// The coordinate function x^v, v = 0 for t.
    static Poly var(int v);
    static Poly monomial(double c, const std::array<int, 4>& exps);
    /// Affine function b + sum_k a[k] x^k.
    static Poly affine(double b, const Vec4& a);

    static Key encode(const std::array<int, 4>& e);
    static std::array<int, 4> decode(Key k);
    static int key_degree(Key k);

    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    int degree() const;
    double max_abs_coeff() const;

    double eval(const Vec4& x) const;
    Poly derivative(int v) const;
    Poly times_var(int v) const;
    /// Drops all monomials of total degree above maxDegree.
    Poly truncated(int maxDegree) const;
    /// The polynomial y -> P(p + y).
    Poly shifted(const Vec4& p) const;

    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);
    Poly& operator*=(double s);
    Poly operator-() const;

    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(const Poly& a, const Poly& b);
    friend Poly operator*(double s, Poly a) { return a *= s; }
    friend bool operator==(const Poly& a, const Poly& b);

    std::string to_string() const;

private:
    void normalize();
    std::vector<Term> terms_;  // sorted by key, no zero coefficients
};

/// Sum of monomials with exponents e, total degree <= maxDegree, and
/// coefficients drawn by the caller (one call per monomial in key order).
template <class Draw>
Poly random_poly(int maxDegree, Draw&& draw) {
    Poly p;
    for (int a = 0; a <= maxDegree; ++a)
        for (int b = 0; a + b <= maxDegree; ++b)
            for (int c = 0; a + b + c <= maxDegree; ++c)
                for (int d = 0; a + b + c + d <= maxDegree; ++d)
                    p += Poly::monomial(draw(), {a, b, c, d});
    return p;
}

/// Truncated Taylor polynomial of exp(u) where u is a polynomial, keeping
/// total degree <= order. The result is in the same variables as u.
Poly exp_series(const Poly& u, int order);

} // namespace framelab
