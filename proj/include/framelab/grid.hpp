#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "framelab/geometry.hpp"

namespace framelab {

/// Uniform cell-centred grid on [-X, X]^3 with N nodes per axis and two ghost layers.
struct GridSpec {
    static constexpr int kGhost = 2;
    int N = 32;
    double X = 4.0;

    double dx() const { return 2.0 * X / N; }
    int M() const { return N + 2 * kGhost; }
    std::size_t size() const { return static_cast<std::size_t>(M()) * M() * M(); }
    /// Node coordinate for i in [-2, N+1].
    double coord(int i) const { return -X + (i + 0.5) * dx(); }
    std::size_t idx(int i, int j, int k) const {
        return (static_cast<std::size_t>(i + kGhost) * M() + (j + kGhost)) * M() + (k + kGhost);
    }
    std::size_t stride(int axis) const {
        return axis == 0 ? static_cast<std::size_t>(M()) * M() : (axis == 1 ? M() : 1);
    }
    Point point(int i, int j, int k, double t) const { return Point(t, coord(i), coord(j), coord(k)); }
};

enum class GhostMode { Extrapolate, Periodic };

// Fourth-order centred stencils on a flat array with stride s.
inline double stencil_d1(const double* f, std::size_t n, std::size_t s, double h) {
    return (f[n - 2 * s] - 8.0 * f[n - s] + 8.0 * f[n + s] - f[n + 2 * s]) / (12.0 * h);
}
inline double stencil_d2(const double* f, std::size_t n, std::size_t s, double h) {
    return (-f[n - 2 * s] + 16.0 * f[n - s] - 30.0 * f[n] + 16.0 * f[n + s] - f[n + 2 * s]) /
           (12.0 * h * h);
}
inline double stencil_mixed(const double* f, std::size_t n, std::size_t sa, std::size_t sb, double h) {
    static constexpr double w[5] = {1.0, -8.0, 0.0, 8.0, -1.0};
    double acc = 0.0;
    for (int p = 0; p < 5; ++p) {
        if (w[p] == 0.0) continue;
        const std::ptrdiff_t op = (p - 2) * static_cast<std::ptrdiff_t>(sa);
        double inner = 0.0;
        for (int q = 0; q < 5; ++q) {
            if (w[q] == 0.0) continue;
            inner += w[q] * f[n + op + (q - 2) * static_cast<std::ptrdiff_t>(sb)];
        }
        acc += w[p] * inner;
    }
    return acc / (144.0 * h * h);
}

/// Tensor field sampled on a GridSpec; component c is a contiguous block of size spec.size().
class GridField {
public:
    GridField() = default;
    GridField(const GridSpec& spec, int rank, int channels, double t = 0.0);

    const GridSpec& spec() const { return spec_; }
    int rank() const { return rank_; }
    int channels() const { return channels_; }
    int components() const { return (rank_ == 0 ? 1 : (rank_ == 1 ? 4 : 16)) * channels_; }
    double time() const { return t_; }
    void set_time(double t) { t_ = t; }

    double* comp(int c) { return data_.data() + static_cast<std::size_t>(c) * spec_.size(); }
    const double* comp(int c) const { return data_.data() + static_cast<std::size_t>(c) * spec_.size(); }
    double& at(int c, int i, int j, int k) { return comp(c)[spec_.idx(i, j, k)]; }
    double at(int c, int i, int j, int k) const { return comp(c)[spec_.idx(i, j, k)]; }
    std::vector<double>& raw() { return data_; }
    const std::vector<double>& raw() const { return data_; }

    /// Sets every node, ghosts included, from f(point, component).
    void sample(const std::function<double(const Point&, int)>& f);

    bool ghosts_valid() const { return ghostsValid_; }
    void invalidate_ghosts() { ghostsValid_ = false; }
    void fill_ghosts(GhostMode mode);
    /// Ghost values from an exact function of (point, component).
    void fill_ghosts(const std::function<double(const Point&, int)>& exact);

    /// Spatial partial derivative (axis 1..3 as coordinate index) at interior nodes.
    GridField partial(int mu) const;

    /// Maximum absolute value over interior nodes of one component.
    double max_abs_interior(int c) const;

private:
    GridSpec spec_{};
    int rank_ = 0;
    int channels_ = 1;
    double t_ = 0.0;
    bool ghostsValid_ = false;
    std::vector<double> data_;
};

/// Exterior region {q >= q0} minus a ball around the spatial origin.
struct ExteriorRegion {
    double q0 = -std::numeric_limits<double>::infinity();
    double originBallRadius = 0.0;

    /// Region with the ball radius set to two grid spacings.
    static ExteriorRegion standard(double q0, const GridSpec& spec) {
        return ExteriorRegion{q0, 2.0 * spec.dx()};
    }
    bool contains(const Point& p) const { return p.q() >= q0 && p.r() >= originBallRadius; }
};

/// Midpoint rule: sum of f(i, j, k, point) * dx^3 over interior nodes in the region.
double quadrature_nodes(const GridSpec& spec, const ExteriorRegion& region, double t,
                        const std::function<double(int, int, int, const Point&)>& f);

/// Midpoint-rule integral of component 0 of a scalar grid field over the region at time t.
double quadrature_slice(const GridField& F, const ExteriorRegion& region, double t);

/// Writes base + ".bin" and base + ".json".
void write_snapshot(const GridField& F, const std::string& base);
GridField read_snapshot(const std::string& base);

} // namespace framelab
