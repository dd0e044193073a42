#include "framelab/weights.hpp"

#include <cmath>

#include "framelab/errors.hpp"

namespace framelab {

void WeightParams::validate() const {
    if (!(gamma > 0.0)) throw ConstraintError("gamma must be > 0");
    if (!(mu < 0.0)) throw ConstraintError("mu must be < 0");
}

namespace {

void reject_kink(double q, const char* which) {
    if (q == 0.0) throw KinkPoint(std::string(which) + " is not defined at q = 0");
}

} // namespace

double w(double q, const WeightParams& p) {
    return q > 0.0 ? std::pow(1.0 + q, 1.0 + 2.0 * p.gamma) : 1.0;
}

double w_prime(double q, const WeightParams& p) {
    reject_kink(q, "w'");
    return q > 0.0 ? (1.0 + 2.0 * p.gamma) * std::pow(1.0 + q, 2.0 * p.gamma) : 0.0;
}

double w_hat(double q, const WeightParams& p) {
    if (q > 0.0) return std::pow(1.0 + q, 1.0 + 2.0 * p.gamma);
    return std::pow(1.0 - q, 2.0 * p.mu);
}

double w_hat_prime(double q, const WeightParams& p) {
    reject_kink(q, "w_hat'");
    if (q > 0.0) return (1.0 + 2.0 * p.gamma) * std::pow(1.0 + q, 2.0 * p.gamma);
    // d/dq (1-q)^{2 mu} = -2 mu (1-q)^{2 mu - 1}
    return -2.0 * p.mu * std::pow(1.0 - q, 2.0 * p.mu - 1.0);
}

double w_tilde(double q, const WeightParams& p) { return w_hat(q, p) + w(q, p); }

double w_tilde_prime(double q, const WeightParams& p) { return w_hat_prime(q, p) + w_prime(q, p); }

} // namespace framelab
