#pragma once

#include <array>
#include <memory>
#include <string>

#include "framelab/geometry.hpp"
#include "framelab/polyfield.hpp"

namespace framelab {

/// H^{ab} and its first partials d_mu H^{ab} at a point.
struct MetricSample {
    Mat4 H{};
    std::array<Mat4, 4> dH{};  // dH[mu][a][b]
};

/// Prescribed inverse-metric perturbation H = g^{-1} - m^{-1}.
class Background {
public:
    virtual ~Background() = default;
    virtual MetricSample sample(const Point& p) const = 0;
    Mat4 H(const Point& p) const { return sample(p).H; }
    /// Upper bound for the Frobenius norm of H over space at time t.
    virtual double sup_norm(double t) const = 0;
    virtual bool is_zero() const { return false; }
    virtual bool is_static() const { return false; }
    virtual std::string family() const = 0;
};

std::shared_ptr<const Background> make_zero_background();

/// The fixed unit-norm symmetric shape used by the bump families.
Mat4 default_bump_shape();

/// eps * b(|x - c - v t| / R) * shape with b(s) = (1 - s^2)^3 on s < 1, zero outside.
/// The bump is C^2 and |H| <= eps when the shape has unit Frobenius norm.
std::shared_ptr<const Background> make_bump_background(double eps, const std::array<double, 3>& centre,
                                                        double radius,
                                                        const std::array<double, 3>& velocity = {},
                                                        const Mat4& shape = default_bump_shape());

/// eps * P / sup|P|, the supremum of the Frobenius norm of P being sampled over
/// [0, T] x [-X, X]^3. P must be symmetric and contravariant.
std::shared_ptr<const Background> make_polynomial_background(double eps, const PolyField& P, double X,
                                                              double T);

/// Largest characteristic speed of g^{-1} = m^{-1} + H when |H| <= h < 1.
double lightspeed_bound(double h);

/// g^{ab} = m^{ab} + H^{ab}.
Mat4 inverse_metric(const Mat4& H);

} // namespace framelab
