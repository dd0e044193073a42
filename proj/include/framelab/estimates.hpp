#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "framelab/background.hpp"
#include "framelab/energy.hpp"
#include "framelab/polyfield.hpp"
#include "framelab/vecfields.hpp"
#include "framelab/weights.hpp"

namespace framelab {

/// The factor in L_I m^{-1} = c_hat(I) m^{-1}, read off the direct Lie derivative.
/// Throws NotProportional if the result is not a multiple of m^{-1}.
double c_hat(const MultiIndex& I);

/// Contravariant copy of a covariant 2-tensor field, indices raised with m.
PolyField raise_both(const PolyField& Hlow);

/// Exact commutator calculus for one pair (H, Phi) with memoised Lie derivatives.
///
/// Fields may be local Taylor polynomials written in y = x - origin; every
/// point-valued method takes actual coordinates.
class CommutatorEngine {
public:
    CommutatorEngine(const PolyMetric& g, const PolyField& Phi, const Vec4& origin = {});

    const PolyMetric& metric() const { return g_; }
    const Vec4& origin() const { return origin_; }

    const PolyField& lie_phi(const MultiIndex& J);
    /// L_J applied to the covariant H_ab.
    const PolyField& lie_h(const MultiIndex& J);
    /// L_J (g dd Phi).
    const PolyField& lie_wave(const MultiIndex& J);
    /// g dd (L_J Phi).
    const PolyField& wave_of_lie(const MultiIndex& J);
    /// d_a d_b L_J Phi for a <= b.
    const PolyField& second_partial(const MultiIndex& J, int a, int b);
    const PolyField& first_partial(const MultiIndex& J, int a);
    double chat(const MultiIndex& I);

    /// L_I(g dd Phi) - g dd(L_I Phi), a covector field.
    PolyField exact_lhs(const MultiIndex& I);
    /// The expansion over ordered splittings in coordinate form.
    PolyField identity_rhs(const MultiIndex& I);
    /// Sum over the 3-part splittings of c_hat c_hat raise(L_{I4} H): the
    /// contravariant L_I1 H^{ab} rebuilt from covariant Lie derivatives.
    PolyField lie_h_contra_by_splitting(const MultiIndex& I1);

    /// Exact lhs contracted with U at p (one value per channel).
    std::vector<double> lhs_at(const MultiIndex& I, const Vec4& U, const Point& p);
    /// Expansion in null-frame form contracted with U at p.
    std::vector<double> frame_rhs_at(const MultiIndex& I, const Vec4& U, const Point& p);

private:
    using Key = std::uint64_t;
    static Key key(const MultiIndex& J);
    Vec4 local(const Point& p) const;

    PolyMetric g_;
    PolyField phi_;
    PolyField hLow_;
    PolyField wave_;
    Vec4 origin_;
    std::unordered_map<Key, PolyField> lphi_, lh_, lwave_, wlie_, kcontra_;
    std::unordered_map<Key, std::array<PolyField, 10>> second_;
    std::unordered_map<Key, std::array<PolyField, 4>> first_;
    std::unordered_map<Key, double> chat_;
};

/// Relative exact residual max|lhs - rhs| / max(1, max|lhs|) over coefficients.
double commutator_identity_residual(CommutatorEngine& e, const MultiIndex& I);

/// Max pointwise relative defect of the null-frame expansion for every U in the frame.
double commutator_frame_residual(CommutatorEngine& e, const MultiIndex& I, const std::vector<Point>& samples);

// ---------------------------------------------------------------------------
// Decoupled bound

enum class IndexConvention { Theorem, Lemma };
enum class FrameSetKind { Tangential, Full };

std::string to_string(IndexConvention c);

/// Per-point data of the bound, already summed over multi-indices of equal order.
struct BoundInputs {
    Point p;
    int order = 0;                                   // |I|
    std::vector<double> waveLower;                   // [k], k < order: sum |g dd (L_K Phi)_V|
    std::vector<double> hNorm;                       // [j]: sum |L_J H|
    std::vector<double> hLL;                         // [j]: sum |(L_J H)_LL|
    std::vector<double> gradNorm;                    // [k]: sum |d L_K Phi|
    std::vector<std::array<double, 4>> frameGrad;    // [k][U]: sum |d (L_K Phi)_U|
};

struct BoundFamilies {
    double wave = 0.0;  ///< lower-order wave terms
    double good = 0.0;  ///< (1 + t + |q|)^{-1} family
    double bad = 0.0;   ///< (1 + |q|)^{-1} family
    double total() const { return wave + good + bad; }
};

/// Which inputs each term family reads. The bad family reads only H_LL and
/// the frame vectors of the chosen set.
struct TermTableEntry {
    std::string family;
    std::string weight;
    std::string metricFactor;
    std::vector<FrameVector> fieldComponents;  // empty means the full tensor
};
std::vector<TermTableEntry> bound_term_table(FrameSetKind set);

/// Evaluates the three families from the inputs alone.
BoundFamilies bound_families(const BoundInputs& in, IndexConvention conv, FrameSetKind set);

/// Gathers the inputs at p for |I| = order and component V.
BoundInputs bound_inputs(CommutatorEngine& e, int order, const Vec4& V, const Point& p);

/// Throws FrameMismatch when V = Lbar is combined with the tangential set.
void check_frame_set(FrameVector V, FrameSetKind set);

struct CommutatorReport {
    double lhsSup = 0.0;
    double lhsL2 = 0.0;           ///< root mean square over the samples
    double identityResidual = 0.0;
    double boundValue = 0.0;      ///< largest sampled bound
    double impliedConstant = 0.0; ///< sup |lhs| / bound
};

/// |lhs| / bound at one point (0 when both vanish, infinity when only the bound does).
double commutator_ratio_at(CommutatorEngine& e, const MultiIndex& I, FrameVector V, FrameSetKind set,
                           IndexConvention conv, const Point& p);

/// Samples |lhs| and the bound at every point and records sup |lhs| / bound.
CommutatorReport commutator_report(CommutatorEngine& e, const MultiIndex& I, FrameVector V, FrameSetKind set,
                                   IndexConvention conv, const std::vector<Point>& samples);

// ---------------------------------------------------------------------------
// Local fields and measured constants

/// A polynomial valid near a point, written in y = x - origin.
struct LocalField {
    PolyField F;
    Vec4 origin{};
};
using FieldProvider = std::function<LocalField(const Point&)>;

/// The global polynomial itself.
FieldProvider global_field(const PolyField& F);

/// Truncated Taylor expansion at each point of P * exp(-|x - c|^2 / sigma^2).
FieldProvider enveloped_field(const PolyField& P, const std::array<double, 3>& centre, double sigma, int degree);

/// Lattice of n points per axis on [tMin, tMax] x [-R, R]^3 restricted to
/// {t >= 1 or r >= 1} with r > 0 and t != 0.
std::vector<Point> sample_region(int n, double tMin, double tMax, double R);

struct SampleBox {
    double tMin = 0.0;
    double tMax = 3.0;
    double R = 3.0;
    /// Inside the box, in {t >= 1 or r >= 1}, with r > 0 and t != 0.
    bool admissible(const Point& p) const;
};

/// Supremum of f over the admissible part of the box: the lattice maximum
/// followed by a compass search started from the `seeds` best lattice nodes.
/// The search stops once the step falls below 1e-4 of the box size.
double refined_sup(const std::function<double(const Point&)>& f, const SampleBox& box, int n, int seeds = 4);

/// sup over samples of |d Psi_UV| / rhs with
/// rhs = sum_{|I|<=1} (1+t+|q|)^{-1}|L_I Psi| + sum_{U' in U, V' in T} sum_{|I|<=1} (1+|q|)^{-1}|(L_I Psi)_{U'V'}|.
/// A zero rhs with zero lhs counts as 0.
double gradient_frame_bound_check(const FieldProvider& psi, FrameVector U, FrameVector V,
                                  const std::vector<Point>& samples);
double gradient_frame_ratio_at(const FieldProvider& psi, FrameVector U, FrameVector V, const Point& p);

struct DecayConstants {
    double full = 0.0;        ///< sup (1+|q|)|d L_I Phi| / sum_{|J|<=|I|+1}|L_J Phi|
    double tangential = 0.0;  ///< sup (1+t+|q|)|dslash L_I Phi| / same
};
DecayConstants decay_constants(const FieldProvider& phi, int order, const std::vector<Point>& samples);
DecayConstants decay_ratios_at(const FieldProvider& phi, int order, const Point& p);

// ---------------------------------------------------------------------------
// Frame expansions

/// e_A = (1/r) C^{ij}_A Z_ij with C^{ij}_A = e_A^i x^j / r, as generator coefficients.
LinComb frame_rotation_form(FrameVector eA, const Point& p);
/// e_A = (1/t) e_A^j Z_0j. Throws TimeZero at t = 0.
LinComb frame_boost_form(FrameVector eA, const Point& p);

/// Lbar^mu d_mu (x^j / r): centred difference along Lbar with step h, and the
/// closed-form directional derivative.
double lbar_radial_fd(const Point& p, int j, double h);
double lbar_radial_exact(const Point& p, int j);

// ---------------------------------------------------------------------------
// Energy estimate

struct EstimateTerm {
    std::string id;
    std::string anchor;
    double value = 0.0;
};

struct EstimateReport {
    std::vector<EstimateTerm> lhs;        ///< with the proof weights w~ and w~'
    std::vector<EstimateTerm> lhsTheorem; ///< with w at t2 and w_hat' in the flux
    std::vector<EstimateTerm> rhs;
    double lhsTotal = 0.0;
    double lhsTheoremTotal = 0.0;
    double rhsTotal = 0.0;
    double impliedConstant = 0.0;         ///< lhsTotal / rhsTotal
    double impliedConstantTheorem = 0.0;  ///< lhsTheoremTotal / rhsTotal
    bool smallPerturbation = true;        ///< |H| < 1/3 held at every node
};

/// Every line of the weighted energy estimate for a monitored component.
/// `psi` is the history of L_I Phi_V and `phiV` that of Phi_V; for the empty
/// multi-index they coincide.
EstimateReport energy_estimate_report(const MonitorHistory& psi, const MonitorHistory& phiV, const Background& bg,
                                      double t1, double t2, const ExteriorRegion& region,
                                      const WeightParams& params);

} // namespace framelab
