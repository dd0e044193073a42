#pragma once

#include <array>
#include <string>
#include <vector>

#include "framelab/background.hpp"
#include "framelab/geometry.hpp"

namespace framelab {

/// Schematic nonlinear terms. The metric perturbation entering them is
/// h_ab = -H_ab (indices lowered with m), the first-order inverse of H.
enum class SourceTermKind {
    DhTanA,    ///< dh . dslash A
    TanhDA,    ///< dslash h . dA
    ATanA,     ///< A . dslash A
    DhA2,      ///< dh . A^2
    A3,        ///< A^3
    ALDA,      ///< A_L . dA
    AeDAe,     ///< A_{e_a} . dA_{e_a}
    DhTUSq,    ///< (d h_{TU})^2
    DAeSq,     ///< (dA_{e_a})^2
    BigOhDA,   ///< O(h . dA) truncated at degree D in h
};

std::string to_string(SourceTermKind k);
SourceTermKind source_term_from_string(const std::string& s);

struct SourceTerm {
    SourceTermKind kind = SourceTermKind::A3;
    double coeff = 1.0;
    /// Truncation degree of the Big-O composites.
    int degree = 2;
    /// partner[c] is the channel multiplying channel c in bilinear terms;
    /// empty means the cyclic default c -> c + 1 mod channels.
    std::vector<int> partner;
};

struct SourceSpec {
    std::vector<SourceTerm> terms;
    bool empty() const { return terms.empty(); }
    /// Throws ConstraintError for degree < 1 or a malformed channel wiring.
    void validate(int channels) const;
};

/// Local data a source needs at one point: A (rank 1, multi-channel),
/// its partials dA[mu], and the background sample.
struct LocalFields {
    Point p;
    CoordTensor A;
    std::array<CoordTensor, 4> dA;
    MetricSample metric;
};

/// S_nu^c for every slot and channel (rank-1 CoordTensor). Frame projections
/// throw PoleDegenerate at r = 0.
CoordTensor evaluate_source(const SourceSpec& spec, const LocalFields& f);

/// Quadratic template for the optional metric toy equation:
/// S2_{mu nu} = sum over a, c of d_mu(A_{e_a})^c d_nu(A_{e_a})^c.
CoordTensor metric_toy_source(const LocalFields& f);

} // namespace framelab
