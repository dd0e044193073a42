#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "framelab/errors.hpp"
#include "framelab/jet.hpp"

namespace framelab {

/// Contravariant or covariant 4-component object in the fixed (t, x1, x2, x3) chart.
using Vec4 = std::array<double, 4>;
using Mat4 = std::array<std::array<double, 4>, 4>;

/// Diagonal of the Minkowski metric; it is its own inverse.
inline constexpr Vec4 kEta{-1.0, 1.0, 1.0, 1.0};

struct Point {
    double t = 0.0;
    std::array<double, 3> x{};

    Point() = default;
    Point(double t_, double x1, double x2, double x3) : t(t_), x{x1, x2, x3} {}

    double r() const { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); }
    /// Retarded parameter r - t.
    double q() const { return r() - t; }
    Vec4 coords() const { return {t, x[0], x[1], x[2]}; }
    static Point from(const Vec4& c) { return Point(c[0], c[1], c[2], c[3]); }
};

enum class FrameVector { Lbar = 0, L = 1, e1 = 2, e2 = 3 };

inline constexpr std::array<FrameVector, 4> kFullSet{FrameVector::Lbar, FrameVector::L,
                                                     FrameVector::e1, FrameVector::e2};
inline constexpr std::array<FrameVector, 3> kTangentialSet{FrameVector::L, FrameVector::e1,
                                                          FrameVector::e2};

std::string to_string(FrameVector v);
FrameVector frame_vector_from_string(const std::string& s);
inline bool is_tangential(FrameVector v) { return v != FrameVector::Lbar; }

struct Frame {
    Vec4 Lbar{}, L{}, e1{}, e2{};
    const Vec4& operator[](FrameVector v) const;
};

/// Which sphere chart supplies e1, e2 at a spatial point: 0 is the spherical
/// pair around the x3 axis, 1 the analogous pair around the x1 axis.
int sphere_chart(const std::array<double, 3>& x);

/// Orthonormal pair tangent to the sphere through x. The chart is chosen from
/// the numerical values so that derivative types (Jet) stay inside one chart.
template <class S>
void sphere_pair(const std::array<S, 3>& x, int chart, std::array<S, 3>& e1, std::array<S, 3>& e2) {
    using std::sqrt;
    // Axis permutation: polar axis first, then the two others.
    const int a = chart == 0 ? 2 : 0;
    const int b = chart == 0 ? 0 : 1;
    const int c = chart == 0 ? 1 : 2;
    const S r = sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    const S rho = sqrt(x[b] * x[b] + x[c] * x[c]);
    e1[a] = S(0.0) - rho / r;
    e1[b] = x[a] * x[b] / (r * rho);
    e1[c] = x[a] * x[c] / (r * rho);
    e2[a] = S(0.0);
    e2[b] = S(0.0) - x[c] / rho;
    e2[c] = x[b] / rho;
}

Frame null_frame_at(const Point& p);

/// Spatial derivatives of one frame vector at a point, exact within its chart.
struct FrameVectorJet {
    Vec4 value{};
    std::array<Vec4, 3> d{};                // d[i][mu] = d_i V^mu
    std::array<std::array<Vec4, 3>, 3> dd{}; // dd[i][j][mu]
};
std::array<FrameVectorJet, 4> frame_jets_at(const Point& p);

/// Dual coframe: theta^U(V) = delta^U_V, indexed like FrameVector.
std::array<Vec4, 4> dual_coframe(const Frame& f);

inline Vec4 lower_index(const Vec4& v) { return {-v[0], v[1], v[2], v[3]}; }
inline Vec4 raise_index(const Vec4& xi) { return {-xi[0], xi[1], xi[2], xi[3]}; }

/// m(a, b) for two contravariant vectors.
double minkowski_dot(const Vec4& a, const Vec4& b);

/// Mixed component m^U_nu: the U-coefficient of the coordinate covector d_nu raised.
double mixed_component(const Frame& f, FrameVector U, int nu);

/// Coordinate tensor of rank 0..2 with multi-channel components.
class CoordTensor {
public:
    CoordTensor() = default;
    CoordTensor(int rank, int channels);

    int rank() const { return rank_; }
    int channels() const { return channels_; }
    int slot_count() const { return rank_ == 0 ? 1 : (rank_ == 1 ? 4 : 16); }

    double& at(int c, int a = 0, int b = 0) { return data_[index(c, a, b)]; }
    double at(int c, int a = 0, int b = 0) const { return data_[index(c, a, b)]; }
    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    static CoordTensor minkowski_covariant();

    CoordTensor& operator+=(const CoordTensor& o);
    CoordTensor& operator*=(double s);

private:
    std::size_t index(int c, int a, int b) const {
        const int slot = rank_ == 0 ? 0 : (rank_ == 1 ? a : 4 * a + b);
        return static_cast<std::size_t>(slot) * channels_ + c;
    }
    int rank_ = 0;
    int channels_ = 1;
    std::vector<double> data_{0.0};
};

CoordTensor operator+(CoordTensor a, const CoordTensor& b);
CoordTensor operator*(double s, CoordTensor a);

/// Full contraction T(V1[, V2]) over coordinate components; one value per channel.
std::vector<double> frame_component(const CoordTensor& T, const Vec4& V1,
                                    const std::optional<Vec4>& V2 = std::nullopt);

/// Square root of the sum of squares over all slots and channels.
double frobenius_norm(const CoordTensor& T);

/// Frobenius norm of a 4x4 matrix.
double frobenius_norm(const Mat4& M);

/// Lowers both indices of a contravariant 2-tensor with m.
Mat4 lower_both(const Mat4& Hup);

/// Contraction M_{ab} U^a V^b.
double contract(const Mat4& M, const Vec4& U, const Vec4& V);

} // namespace framelab
