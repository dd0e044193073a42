#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "framelab/geometry.hpp"
#include "framelab/poly.hpp"

namespace framelab {

enum class Slot : std::uint8_t { Co, Contra };

/// Tensor field of rank <= 2 whose components are polynomials.
class PolyField {
public:
    PolyField() : PolyField(0, 1) {}
    PolyField(int rank, int channels, std::array<Slot, 2> slots = {Slot::Co, Slot::Co});

    static PolyField scalar(const Poly& p);
    /// m_{ab} as a constant covariant field.
    static PolyField minkowski_covariant();
    /// m^{ab} as a constant contravariant field.
    static PolyField minkowski_inverse();

    int rank() const { return rank_; }
    int channels() const { return channels_; }
    Slot slot(int k) const { return slots_[k]; }
    const std::array<Slot, 2>& slots() const { return slots_; }
    int slot_count() const { return rank_ == 0 ? 1 : (rank_ == 1 ? 4 : 16); }

    Poly& at(int c, int a = 0, int b = 0) { return comps_[index(c, a, b)]; }
    const Poly& at(int c, int a = 0, int b = 0) const { return comps_[index(c, a, b)]; }
    std::vector<Poly>& components() { return comps_; }
    const std::vector<Poly>& components() const { return comps_; }

    bool same_shape(const PolyField& o) const;
    bool is_zero() const;
    int degree() const;
    double max_abs_coeff() const;

    /// Componentwise coordinate partial derivative.
    PolyField partial(int mu) const;
    CoordTensor eval(const Vec4& x) const;
    PolyField shifted(const Vec4& p) const;
    PolyField truncated(int maxDegree) const;

    PolyField& operator+=(const PolyField& o);
    PolyField& operator-=(const PolyField& o);
    PolyField& operator*=(double s);
    friend PolyField operator+(PolyField a, const PolyField& b) { return a += b; }
    friend PolyField operator-(PolyField a, const PolyField& b) { return a -= b; }
    friend PolyField operator*(double s, PolyField a) { return a *= s; }
    friend bool operator==(const PolyField& a, const PolyField& b);

private:
    std::size_t index(int c, int a, int b) const {
        const int slot = rank_ == 0 ? 0 : (rank_ == 1 ? a : 4 * a + b);
        return static_cast<std::size_t>(slot) * channels_ + c;
    }
    int rank_;
    int channels_;
    std::array<Slot, 2> slots_;
    std::vector<Poly> comps_;
};

/// Inverse metric g^{-1} = m^{-1} + H with polynomial H^{ab}.
struct PolyMetric {
    PolyField H = PolyField(2, 1, {Slot::Contra, Slot::Contra});

    /// H_{ab} = m_{aa'} m_{bb'} H^{a'b'}.
    PolyField H_lower() const;
    /// Full inverse metric component g^{ab}.
    Poly g_inv(int a, int b) const;
};

/// g^{ab} d_a d_b F, slotwise. Coordinate partials suffice: the flat
/// connection has no Christoffel symbols in these coordinates.
PolyField wave_operator(const PolyMetric& g, const PolyField& F);

/// Flat wave operator m^{ab} d_a d_b F.
PolyField flat_wave_operator(const PolyField& F);

/// H^{ab} d_a d_b F for a contravariant 2-tensor polynomial field.
PolyField contract_second_derivatives(const PolyField& Hup, const PolyField& F);

/// sqrt(sum over U in {L, e1, e2}, slots, channels of |U^mu d_mu F|^2) at p.
double tangential_gradient_norm(const PolyField& F, const Point& p);

/// Channel-wise Euclidean pairing.
double inner(const std::vector<double>& a, const std::vector<double>& b);

/// Random field with integer coefficients in [-range, range] and total degree <= maxDegree.
PolyField random_polyfield(std::mt19937_64& rng, int rank, int channels, std::array<Slot, 2> slots,
                           int maxDegree, int range, double density = 1.0);

/// Random symmetric contravariant 2-tensor field with integer coefficients.
PolyField random_symmetric_contra(std::mt19937_64& rng, int maxDegree, int range, double density = 1.0);

} // namespace framelab
