#pragma once

#include <array>
#include <functional>
#include <vector>

#include "framelab/background.hpp"
#include "framelab/geometry.hpp"
#include "framelab/grid.hpp"
#include "framelab/polyfield.hpp"
#include "framelab/weights.hpp"

namespace framelab {

/// Pointwise data for the stress tensor of a multi-channel scalar Psi.
struct StressPoint {
    Point p;
    Mat4 H{};                                 // H^{ab}
    std::array<std::vector<double>, 4> dpsi;  // dpsi[a][c] = d_a Psi^c
    int channels() const { return static_cast<int>(dpsi[0].size()); }
    /// True when the Frobenius norm of H is below 1/3.
    bool small_perturbation() const { return frobenius_norm(H) < 1.0 / 3.0; }
};

/// Stress point of a scalar PolyField under a polynomial metric.
StressPoint stress_point(const PolyMetric& g, const PolyField& psi, const Point& p);

/// T^mu_nu = g^{mu a} <d_a Psi, d_nu Psi> - (1/2) delta^mu_nu g^{ab} <d_a Psi, d_b Psi>.
double stress_mixed(const StressPoint& s, int mu, int nu);

/// T_{mu nu} = m_{mu a} T^a_nu.
double stress_lower(const StressPoint& s, int mu, int nu);

/// T_tt + T_rt assembled from stress_mixed.
double T_tt_plus_Trt_direct(const StressPoint& s);

/// T_tt + T_rt in coordinates: the flat part (1/2)(|(d_t + d_r)Psi|^2 + sum_i |dslash_i Psi|^2)
/// plus the five H corrections. Throws PoleDegenerate at r = 0.
double T_tt_plus_Trt_coordinate(const StressPoint& s);

/// T_tt + T_rt in the null frame: (1/2)(|L Psi|^2 + sum_A |e_A Psi|^2)
/// - 2 H^{Lbar a} <d_a Psi, d_t Psi> + (1/2) H^{ab} <d_a Psi, d_b Psi>. Throws PoleDegenerate at r = 0.
double T_tt_plus_Trt_nullframe(const StressPoint& s);

/// Everything the divergence needs beyond the stress point.
struct DivergenceInput {
    StressPoint s;
    std::vector<double> wave;      // g^{ab} d_a d_b Psi per channel
    std::array<Mat4, 4> dH{};      // dH[mu][a][b]
};

/// d_mu T^mu_nu = <g dd Psi, d_nu Psi> + (d_mu H^{mu a}) <d_a Psi, d_nu Psi>
///                - (1/2)(d_nu H^{ab}) <d_a Psi, d_b Psi>.
double divergence_T(const DivergenceInput& in, int nu = 0);

/// Exact polynomial T^mu_nu for a scalar PolyField (channels summed).
Poly stress_mixed_poly(const PolyMetric& g, const PolyField& psi, int mu, int nu);

/// Both gradient decompositions at a point, all channels summed.
struct GradientDecomposition {
    double spatialSquare = 0.0;    // delta^{ij} <d_i Psi, d_j Psi>
    double slashPlusRadial = 0.0;  // sum_i |dslash_i Psi|^2 + |d_r Psi|^2
    double nullPlusSlash = 0.0;    // |(d_t + d_r)Psi|^2 + sum_i |dslash_i Psi|^2
    double fullPlusCross = 0.0;    // |d Psi|^2 + 2 <d_t Psi, d_r Psi>
};
GradientDecomposition gradient_decomposition(const StressPoint& s);

/// Extreme eigenvalues of the quadratic form diag(-(m^{tt} + H^{tt}), m^{ij} + H^{ij})
/// acting on (d_t Psi, d_i Psi), compared with the Euclidean |d Psi|^2.
struct NormEquivalence {
    double lower = 0.0;
    double upper = 0.0;
};
NormEquivalence norm_equivalence(const Mat4& H);

/// Squared Euclidean gradient |d Psi|^2 summed over channels.
double gradient_square(const StressPoint& s);

/// Squared tangential gradient sum over U in {L, e1, e2} of |U^a d_a Psi|^2.
double tangential_gradient_square(const StressPoint& s);

// ---------------------------------------------------------------------------
// Grid-level quantities built on monitored slices.

/// One monitored scalar component Psi at one time: its space-time gradient
/// (rank-1 field, component a = d_a Psi) and g^{ab} d_a d_b Psi (rank 0).
struct MonitorSlice {
    double t = 0.0;
    GridField grad;
    GridField wave;
};
using MonitorHistory = std::vector<MonitorSlice>;

using WeightFn = std::function<double(double q)>;

/// Weight derivative that is averaged over the two one-sided limits when a
/// node falls exactly on q = 0, where the derivative itself is undefined.
WeightFn kink_averaged(std::function<double(double)> derivative);

/// Stress point at interior node (i, j, k) of a slice.
StressPoint slice_stress_point(const MonitorSlice& s, const Background& bg, int i, int j, int k);

/// Integral of |d Psi|^2 weight(q) over the region at the slice time.
double exterior_energy(const MonitorSlice& s, const ExteriorRegion& region, const WeightFn& weight);

/// Integral of T_tt weight(q), the slice term of the divergence identity.
double slice_energy_T(const MonitorSlice& s, const Background& bg, const ExteriorRegion& region,
                      const WeightFn& weight);

/// Slices of the history with t1 <= t <= t2; throws HistoryMissing unless both ends are stored.
std::vector<const MonitorSlice*> history_window(const MonitorHistory& h, double t1, double t2);

/// Trapezoid in time of the slice integrals of (1/2)(|(d_t + d_r)Psi|^2 + sum_i |dslash_i Psi|^2) weightPrime(q).
double tangential_flux_integral(const MonitorHistory& h, double t1, double t2, const ExteriorRegion& region,
                                const WeightFn& weightPrime);

/// Space-time integral (trapezoid in time) of an arbitrary nodal density.
double spacetime_integral(const MonitorHistory& h, double t1, double t2, const ExteriorRegion& region,
                          const std::function<double(const MonitorSlice&, int, int, int, const Point&)>& f);

/// Flux of T(Lhat, d_t) weight through the cone q = q0 for t in [t1, t2],
/// Lhat = d_t + d_r, measure dtau r^2 domega on the parametrisation (tau, (tau + q0) omega).
double cone_flux(const MonitorHistory& h, const Background& bg, double q0, double t1, double t2,
                 double weightOnCone);

struct BudgetReport {
    double sliceT1 = 0.0;
    double sliceT2 = 0.0;
    double coneFlux = 0.0;
    double volumeWeight = 0.0;      // integral of (T_tt + T_rt) w~'
    double volumeDivergence = 0.0;  // integral of w~ d_mu T^mu_t
    double residual = 0.0;          // |sliceT2 + coneFlux + volumeWeight + volumeDivergence - sliceT1|
    double relativeResidual = 0.0;  // residual / sliceT1
};

/// Every term of the weighted divergence identity for the multiplier w~(q) d_t.
/// With constantWeight the multiplier is d_t and the weight-derivative term vanishes.
BudgetReport conservation_budget(const MonitorHistory& h, const Background& bg, const ExteriorRegion& region,
                                 double t1, double t2, const WeightParams& params, bool constantWeight = false);

} // namespace framelab
