#pragma once

// Second-order forward-mode differentiation in a fixed number of variables.
// Three variables give exact spatial derivatives of the frame vectors inside a
// chart; four give spacetime derivatives of analytic test solutions.

#include <array>
#include <cmath>

namespace framelab {

template <int N>
struct JetN {
    double v = 0.0;
    std::array<double, N> d{};       // first derivatives
    std::array<double, N * N> dd{};  // second derivatives, row-major

    JetN() = default;
    JetN(double value) : v(value) {}

    static JetN variable(double value, int axis) {
        JetN j(value);
        j.d[axis] = 1.0;
        return j;
    }

    double hess(int a, int b) const { return dd[N * a + b]; }
};

template <int N>
JetN<N> operator+(const JetN<N>& a, const JetN<N>& b) {
    JetN<N> r;
    r.v = a.v + b.v;
    for (int i = 0; i < N; ++i) r.d[i] = a.d[i] + b.d[i];
    for (int i = 0; i < N * N; ++i) r.dd[i] = a.dd[i] + b.dd[i];
    return r;
}

template <int N>
JetN<N> operator-(const JetN<N>& a, const JetN<N>& b) {
    JetN<N> r;
    r.v = a.v - b.v;
    for (int i = 0; i < N; ++i) r.d[i] = a.d[i] - b.d[i];
    for (int i = 0; i < N * N; ++i) r.dd[i] = a.dd[i] - b.dd[i];
    return r;
}

template <int N>
JetN<N> operator-(const JetN<N>& a) {
    return JetN<N>(0.0) - a;
}

template <int N>
JetN<N> operator*(const JetN<N>& a, const JetN<N>& b) {
    JetN<N> r;
    r.v = a.v * b.v;
    for (int i = 0; i < N; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            r.dd[N * i + j] = a.dd[N * i + j] * b.v + a.d[i] * b.d[j] + a.d[j] * b.d[i] +
                              a.v * b.dd[N * i + j];
    return r;
}

/// Applies a scalar function with known value and first two derivatives.
template <int N>
JetN<N> chain(const JetN<N>& a, double f, double f1, double f2) {
    JetN<N> r;
    r.v = f;
    for (int i = 0; i < N; ++i) r.d[i] = f1 * a.d[i];
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) r.dd[N * i + j] = f1 * a.dd[N * i + j] + f2 * a.d[i] * a.d[j];
    return r;
}

template <int N>
JetN<N> inverse(const JetN<N>& a) {
    const double iv = 1.0 / a.v;
    return chain(a, iv, -iv * iv, 2.0 * iv * iv * iv);
}

template <int N>
JetN<N> operator/(const JetN<N>& a, const JetN<N>& b) {
    return a * inverse(b);
}

template <int N>
JetN<N> sqrt(const JetN<N>& a) {
    const double s = std::sqrt(a.v);
    return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}

template <int N>
JetN<N> exp(const JetN<N>& a) {
    const double e = std::exp(a.v);
    return chain(a, e, e, e);
}

template <int N>
JetN<N> sin(const JetN<N>& a) {
    return chain(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v));
}

template <int N>
JetN<N> cos(const JetN<N>& a) {
    return chain(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v));
}

using Jet = JetN<3>;
using Jet4 = JetN<4>;

} // namespace framelab
