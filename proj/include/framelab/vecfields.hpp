#pragma once

#include <array>
#include <string>
#include <vector>

#include "framelab/geometry.hpp"
#include "framelab/polyfield.hpp"

namespace framelab {

/// The Minkowski generators: translations, boosts and rotations Z_ab (a < b), scaling.
enum class VectorFieldId : int { Pt, Px1, Px2, Px3, Z01, Z02, Z03, Z12, Z13, Z23, S };
inline constexpr int kGeneratorCount = 11;

inline VectorFieldId generator(int k) { return static_cast<VectorFieldId>(k); }
inline int ordinal(VectorFieldId z) { return static_cast<int>(z); }
inline bool is_killing(VectorFieldId z) { return z != VectorFieldId::S; }

/// Translation along coordinate mu.
VectorFieldId translation(int mu);
/// Z_ab for a < b.
VectorFieldId lorentz(int a, int b);

std::string name(VectorFieldId z);
/// Accepts "S", "Z01".."Z23" and translations written "P t", "Pt", "P0", "P x1", "Px1", "P1", ...
VectorFieldId parse_generator(const std::string& s);

/// Ordered generator sequence; the leftmost entry is applied last.
using MultiIndex = std::vector<VectorFieldId>;

/// Comma-separated generator names; the empty string is the empty index.
MultiIndex parse_multi_index(const std::string& s);
std::string to_string(const MultiIndex& I);

/// Z^lambda(x) = sum_kappa A[lambda][kappa] x^kappa + b[lambda].
struct AffineField {
    Mat4 A{};
    Vec4 b{};
};

AffineField affine_of(VectorFieldId z);
Vec4 eval_field(VectorFieldId z, const Vec4& x);

/// Contravariant polynomial field of the generator's coefficients.
PolyField as_field(VectorFieldId z);

/// Lie derivative of a polynomial tensor field. The field may be written in
/// shifted variables y = x - origin (local Taylor fields use this).
PolyField lie_derivative(VectorFieldId z, const PolyField& T, const Vec4& origin = {});
PolyField lie_multi(const MultiIndex& I, const PolyField& T, const Vec4& origin = {});

/// Coefficients over the 11 generators.
using LinComb = std::array<double, kGeneratorCount>;

LinComb unit(VectorFieldId z);
AffineField affine_of(const LinComb& c);
/// Expresses an affine field in the generator basis; throws if it lies outside the span.
LinComb decompose(const AffineField& f);
/// Vector field bracket [X, Y]^l = X^k d_k Y^l - Y^k d_k X^l.
LinComb commutator(VectorFieldId a, VectorFieldId b);
LinComb bracket(const LinComb& a, const LinComb& b);

/// All multi-indices of order <= maxOrder, shortest first.
std::vector<MultiIndex> all_multi_indices(int maxOrder);
std::vector<MultiIndex> multi_indices_of_order(int order);

/// All order-preserving assignments of the entries of I to `parts` ordered parts.
std::vector<std::vector<MultiIndex>> splittings(const MultiIndex& I, int parts);

/// (k - 1)_+ : k - 1 when k >= 1, else 0.
inline int positive_part_minus_one(int k) { return k >= 1 ? k - 1 : 0; }

/// Pointwise coefficients of the restricted derivative in terms of generators.
struct RestrictedDerivative {
    LinComb rotationForm{};  ///< (x^j / r^2) Z_ij
    LinComb boostForm{};     ///< (Z_0i - (x_i/r)(x^j/r) Z_0j) / t
};
RestrictedDerivative restricted_derivative_rotation(int i, const Point& p);
RestrictedDerivative restricted_derivative_as_Z(int i, const Point& p);

/// Directional derivative sum_k c_k Z_k^mu(p) d_mu F at p, per component.
CoordTensor apply_combination(const LinComb& c, const PolyField& F, const Point& p);

/// Direct restricted derivative d_i F - (x_i/r) d_r F at p.
CoordTensor restricted_derivative_direct(int i, const PolyField& F, const Point& p);

} // namespace framelab
