#include "framelab/background.hpp"

#include <algorithm>
#include <cmath>

#include "framelab/errors.hpp"

namespace framelab {

namespace {

class ZeroBackground final : public Background {
public:
    MetricSample sample(const Point&) const override { return {}; }
    double sup_norm(double) const override { return 0.0; }
    bool is_zero() const override { return true; }
    bool is_static() const override { return true; }
    std::string family() const override { return "zero"; }
};

class BumpBackground final : public Background {
public:
    BumpBackground(double eps, const std::array<double, 3>& c, double R, const std::array<double, 3>& v,
                   const Mat4& shape)
        : eps_(eps), c_(c), R_(R), v_(v), shape_(shape) {
        if (!(R > 0.0)) throw ConstraintError("bump radius must be > 0");
        const double n = frobenius_norm(shape);
        if (!(n > 0.0)) throw ConstraintError("bump shape must be nonzero");
        for (auto& row : shape_)
            for (double& x : row) x /= n;
    }

    MetricSample sample(const Point& p) const override {
        MetricSample s;
        std::array<double, 3> y{};
        double u = 0.0;
        for (int i = 0; i < 3; ++i) {
            y[i] = p.x[i] - c_[i] - v_[i] * p.t;
            u += y[i] * y[i];
        }
        u /= R_ * R_;
        if (u >= 1.0) return s;
        const double one = 1.0 - u;
        const double b = one * one * one;
        const double db = -3.0 * one * one;  // d b / d u
        Vec4 du{};
        for (int i = 0; i < 3; ++i) {
            du[i + 1] = 2.0 * y[i] / (R_ * R_);
            du[0] -= 2.0 * v_[i] * y[i] / (R_ * R_);
        }
        for (int a = 0; a < 4; ++a)
            for (int b2 = 0; b2 < 4; ++b2) {
                s.H[a][b2] = eps_ * b * shape_[a][b2];
                for (int mu = 0; mu < 4; ++mu) s.dH[mu][a][b2] = eps_ * db * du[mu] * shape_[a][b2];
            }
        return s;
    }
    double sup_norm(double) const override { return std::abs(eps_); }
    bool is_zero() const override { return eps_ == 0.0; }
    bool is_static() const override { return v_ == std::array<double, 3>{}; }
    std::string family() const override { return is_static() ? "static-bump" : "traveling-bump"; }

private:
    double eps_;
    std::array<double, 3> c_;
    double R_;
    std::array<double, 3> v_;
    Mat4 shape_;
};

class PolynomialBackground final : public Background {
public:
    PolynomialBackground(double eps, const PolyField& P, double X, double T) : P_(P) {
        if (P.rank() != 2 || P.channels() != 1 || P.slot(0) != Slot::Contra || P.slot(1) != Slot::Contra)
            throw RankMismatch("polynomial background must be a contravariant 2-tensor");
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b)
                if (!(P.at(0, a, b) == P.at(0, b, a)))
                    throw ConstraintError("polynomial background must be symmetric");
        // Sampled supremum over the space-time box; the normalisation makes
        // the bound exact at the sample points and the sampling is dense
        // enough (17^4 points) for the low-degree families used here.
        const int n = 16;
        double sup = 0.0;
        for (int it = 0; it <= n; ++it)
            for (int i = 0; i <= n; ++i)
                for (int j = 0; j <= n; ++j)
                    for (int k = 0; k <= n; ++k) {
                        const Vec4 x{T * it / n, -X + 2 * X * i / n, -X + 2 * X * j / n, -X + 2 * X * k / n};
                        sup = std::max(sup, frobenius_norm(P.eval(x)));
                    }
        scale_ = sup > 0.0 ? eps / sup : 0.0;
        eps_ = sup > 0.0 ? eps : 0.0;
        for (int mu = 0; mu < 4; ++mu) dP_[mu] = P.partial(mu);
    }

    MetricSample sample(const Point& p) const override {
        MetricSample s;
        const Vec4 x = p.coords();
        const CoordTensor h = P_.eval(x);
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) s.H[a][b] = scale_ * h.at(0, a, b);
        for (int mu = 0; mu < 4; ++mu) {
            const CoordTensor d = dP_[mu].eval(x);
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) s.dH[mu][a][b] = scale_ * d.at(0, a, b);
        }
        return s;
    }
    // Sampled, so reported with a safety margin for the time step bound.
    double sup_norm(double) const override { return 1.05 * eps_; }
    bool is_zero() const override { return scale_ == 0.0; }
    std::string family() const override { return "polynomial"; }

private:
    PolyField P_;
    std::array<PolyField, 4> dP_;
    double scale_ = 0.0;
    double eps_ = 0.0;
};

} // namespace

std::shared_ptr<const Background> make_zero_background() { return std::make_shared<ZeroBackground>(); }

Mat4 default_bump_shape() {
    Mat4 s{};
    s[0][0] = 1.0;
    s[0][1] = s[1][0] = 0.5;
    s[0][3] = s[3][0] = -0.25;
    s[1][1] = -0.5;
    s[2][2] = 0.75;
    s[2][3] = s[3][2] = 0.3;
    s[3][3] = 0.4;
    const double n = frobenius_norm(s);
    for (auto& row : s)
        for (double& x : row) x /= n;
    return s;
}

std::shared_ptr<const Background> make_bump_background(double eps, const std::array<double, 3>& centre,
                                                        double radius, const std::array<double, 3>& velocity,
                                                        const Mat4& shape) {
    return std::make_shared<BumpBackground>(eps, centre, radius, velocity, shape);
}

std::shared_ptr<const Background> make_polynomial_background(double eps, const PolyField& P, double X,
                                                              double T) {
    return std::make_shared<PolynomialBackground>(eps, P, X, T);
}

double lightspeed_bound(double h) {
    if (!(h < 1.0)) throw ConstraintError("|H| must be < 1 for a Lorentzian inverse metric");
    // Roots c of g^{tt} c^2 - 2 g^{ti} n_i c + g^{ij} n_i n_j = 0 for unit n,
    // bounded using 1 - h <= |g^{tt}| <= 1 + h, |g^{ti} n_i| <= h and |g^{ij} n_i n_j| <= 1 + h.
    return (h + std::sqrt(h * h + (1.0 + h) * (1.0 + h))) / (1.0 - h);
}

Mat4 inverse_metric(const Mat4& H) {
    Mat4 g = H;
    for (int a = 0; a < 4; ++a) g[a][a] += kEta[a];
    return g;
}

} // namespace framelab
