#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace framelab {

/// Outcome of one exact-identity check.
struct CheckResult {
    std::string name;
    double residual = 0.0;   ///< worst relative defect
    double tolerance = 0.0;
    long samples = 0;        ///< number of evaluated instances
    bool pass() const { return residual <= tolerance; }
};

/// L_I(g dd Phi) - g dd(L_I Phi) against the splitting expansion, exactly on
/// seeded polynomial pairs, all multi-indices up to maxOrder.
CheckResult check_commutator_identity(std::uint64_t seed, int pairs = 50, int maxOrder = 3);

/// The same expansion in null-frame form, pointwise at admissible samples.
CheckResult check_commutator_frame_form(std::uint64_t seed, int pairs = 4, int maxOrder = 2, int points = 6);

/// Contravariant L_I H^{ab} from 3-part splittings against direct Lie derivatives.
CheckResult check_splitting_enumeration(std::uint64_t seed, int pairs = 4, int maxOrder = 3);

/// T_tt + T_rt in coordinate form, null-frame form and from T^mu_nu, on random inputs with r > 0.
CheckResult check_null_frame_rewrite(std::uint64_t seed, int inputs = 200);

/// Both gradient decompositions on random polynomial fields.
CheckResult check_gradient_decomposition(std::uint64_t seed, int points = 200);

/// Restricted derivatives via rotations and boosts, the e_A expansions, and
/// Lbar(x^j / r) = 0 at random points with r > 0 and t != 0.
CheckResult check_restricted_derivatives(std::uint64_t seed, int points = 1000);

/// Lbar(x^j / r) = 0 by centred differences and in closed form.
CheckResult check_lbar_radial(std::uint64_t seed, int points = 1000);

/// Weight ratios and w <= w~ <= 2w over a (gamma, mu) grid, samples q values per pair.
CheckResult check_weight_lemmas(std::uint64_t seed, int samples = 10000);

/// Jacobi identity and closure of the generator brackets; c_hat of S and of Killing fields.
CheckResult check_generator_algebra();

/// d_mu T^mu_nu from the exact polynomial stress tensor against the divergence formula.
CheckResult check_stress_divergence(std::uint64_t seed, int pairs = 5, int points = 20);

/// Every check above with its default size, the commutator identity on `commutatorPairs` pairs.
std::vector<CheckResult> certification_suite(std::uint64_t seed, int commutatorPairs = 50);

} // namespace framelab
