#pragma once

namespace framelab {

struct WeightParams {
    double gamma = 0.5;
    double mu = -0.25;

    /// Throws ConstraintError unless gamma > 0 and mu < 0.
    void validate() const;
};

// Piecewise weights in the retarded parameter q. Values at q = 0 are taken by
// continuity; derivatives there throw KinkPoint.

/// (1+|q|)^{1+2 gamma} for q > 0, 1 for q < 0.
double w(double q, const WeightParams& p);
double w_prime(double q, const WeightParams& p);

/// (1+|q|)^{1+2 gamma} for q > 0, (1+|q|)^{2 mu} for q < 0.
double w_hat(double q, const WeightParams& p);
double w_hat_prime(double q, const WeightParams& p);

/// w_hat + w.
double w_tilde(double q, const WeightParams& p);
double w_tilde_prime(double q, const WeightParams& p);

} // namespace framelab
