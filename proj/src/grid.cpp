#include "framelab/grid.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "json.hpp"

namespace framelab {

GridField::GridField(const GridSpec& spec, int rank, int channels, double t)
    : spec_(spec), rank_(rank), channels_(channels), t_(t) {
    if (spec.N < 8) throw DomainMismatch("grid needs at least 8 nodes per axis");
    if (!(spec.X > 0.0)) throw DomainMismatch("grid extent must be positive");
    if (rank < 0 || rank > 2) throw RankMismatch("rank must be 0, 1 or 2");
    if (channels < 1) throw RankMismatch("channel count must be positive");
    data_.assign(static_cast<std::size_t>(components()) * spec.size(), 0.0);
}

void GridField::sample(const std::function<double(const Point&, int)>& f) {
    const int g = GridSpec::kGhost;
    for (int c = 0; c < components(); ++c) {
        double* d = comp(c);
        for (int i = -g; i < spec_.N + g; ++i)
            for (int j = -g; j < spec_.N + g; ++j)
                for (int k = -g; k < spec_.N + g; ++k) d[spec_.idx(i, j, k)] = f(spec_.point(i, j, k, t_), c);
    }
    ghostsValid_ = true;
}

void GridField::fill_ghosts(GhostMode mode) {
    const int N = spec_.N;
    const int g = GridSpec::kGhost;
    for (int c = 0; c < components(); ++c) {
        double* d = comp(c);
        for (int axis = 0; axis < 3; ++axis) {
            const std::size_t s = spec_.stride(axis);
            for (int a = -g; a < N + g; ++a)
                for (int b = -g; b < N + g; ++b) {
                    std::size_t base;
                    if (axis == 0) base = spec_.idx(0, a, b);
                    else if (axis == 1) base = spec_.idx(a, 0, b);
                    else base = spec_.idx(a, b, 0);
                    double* line = d + base;  // line[n * s] is node n along the axis
                    auto at = [&](int n) -> double& { return line[static_cast<std::ptrdiff_t>(n) * static_cast<std::ptrdiff_t>(s)]; };
                    if (mode == GhostMode::Periodic) {
                        at(-1) = at(N - 1);
                        at(-2) = at(N - 2);
                        at(N) = at(0);
                        at(N + 1) = at(1);
                    } else {
                        // Quartic extrapolation from the five nearest interior nodes.
                        at(-1) = 5 * at(0) - 10 * at(1) + 10 * at(2) - 5 * at(3) + at(4);
                        at(-2) = 15 * at(0) - 40 * at(1) + 45 * at(2) - 24 * at(3) + 5 * at(4);
                        at(N) = 5 * at(N - 1) - 10 * at(N - 2) + 10 * at(N - 3) - 5 * at(N - 4) + at(N - 5);
                        at(N + 1) = 15 * at(N - 1) - 40 * at(N - 2) + 45 * at(N - 3) - 24 * at(N - 4) +
                                    5 * at(N - 5);
                    }
                }
        }
    }
    ghostsValid_ = true;
}

void GridField::fill_ghosts(const std::function<double(const Point&, int)>& exact) {
    const int N = spec_.N;
    const int g = GridSpec::kGhost;
    auto ghost = [&](int n) { return n < 0 || n >= N; };
    for (int c = 0; c < components(); ++c) {
        double* d = comp(c);
        for (int i = -g; i < N + g; ++i)
            for (int j = -g; j < N + g; ++j)
                for (int k = -g; k < N + g; ++k)
                    if (ghost(i) || ghost(j) || ghost(k))
                        d[spec_.idx(i, j, k)] = exact(spec_.point(i, j, k, t_), c);
    }
    ghostsValid_ = true;
}

GridField GridField::partial(int mu) const {
    if (mu < 1 || mu > 3)
        throw DomainMismatch("grid fields carry no time axis; time derivatives come from the evolution");
    if (!ghostsValid_) throw GhostInvalid("ghost layers not populated before differentiation");
    GridField out(spec_, rank_, channels_, t_);
    const std::size_t s = spec_.stride(mu - 1);
    const double h = spec_.dx();
    const int N = spec_.N;
    for (int c = 0; c < components(); ++c) {
        const double* f = comp(c);
        double* o = out.comp(c);
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j)
                for (int k = 0; k < N; ++k) {
                    const std::size_t n = spec_.idx(i, j, k);
                    o[n] = stencil_d1(f, n, s, h);
                }
    }
    return out;
}

double GridField::max_abs_interior(int c) const {
    double m = 0.0;
    const double* f = comp(c);
    for (int i = 0; i < spec_.N; ++i)
        for (int j = 0; j < spec_.N; ++j)
            for (int k = 0; k < spec_.N; ++k) m = std::max(m, std::abs(f[spec_.idx(i, j, k)]));
    return m;
}

double quadrature_nodes(const GridSpec& spec, const ExteriorRegion& region, double t,
                        const std::function<double(int, int, int, const Point&)>& f) {
    const double dv = spec.dx() * spec.dx() * spec.dx();
    double sum = 0.0;
    std::size_t count = 0;
    for (int i = 0; i < spec.N; ++i)
        for (int j = 0; j < spec.N; ++j)
            for (int k = 0; k < spec.N; ++k) {
                const Point p = spec.point(i, j, k, t);
                if (!region.contains(p)) continue;
                ++count;
                sum += f(i, j, k, p);
            }
    if (count == 0) throw EmptyRegion("no grid node satisfies q >= q0 outside the origin ball");
    return sum * dv;
}

double quadrature_slice(const GridField& F, const ExteriorRegion& region, double t) {
    if (F.components() != 1) throw RankMismatch("quadrature_slice expects a single-component field");
    const double* d = F.comp(0);
    const GridSpec& s = F.spec();
    return quadrature_nodes(s, region, t, [&](int i, int j, int k, const Point&) { return d[s.idx(i, j, k)]; });
}

namespace {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

template <class T>
void put(std::ofstream& os, T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    os.write(buf, sizeof(T));
}

template <class T>
T get(std::ifstream& is) {
    char buf[sizeof(T)];
    is.read(buf, sizeof(T));
    if (!is) throw IoError("truncated snapshot");
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
}

} // namespace

void write_snapshot(const GridField& F, const std::string& base) {
    std::ofstream os(base + ".bin", std::ios::binary);
    if (!os) throw IoError("cannot open " + base + ".bin");
    put<std::int64_t>(os, F.rank());
    put<std::int64_t>(os, F.channels());
    put<std::int64_t>(os, F.spec().N);
    put<double>(os, F.spec().X);
    put<double>(os, F.time());
    const GridSpec& s = F.spec();
    for (int c = 0; c < F.components(); ++c)
        for (int i = 0; i < s.N; ++i)
            for (int j = 0; j < s.N; ++j)
                for (int k = 0; k < s.N; ++k) put<double>(os, F.at(c, i, j, k));
    if (!os) throw IoError("write failed for " + base + ".bin");

    nlohmann::json meta = {{"rank", F.rank()},   {"channels", F.channels()}, {"N", s.N},
                           {"X", s.X},          {"t", F.time()},           {"components", F.components()},
                           {"layout", "component, x1, x2, x3 (x3 fastest), little-endian float64"}};
    std::ofstream js(base + ".json");
    if (!js) throw IoError("cannot open " + base + ".json");
    js << meta.dump(2) << "\n";
}

GridField read_snapshot(const std::string& base) {
    std::ifstream is(base + ".bin", std::ios::binary);
    if (!is) throw IoError("cannot open " + base + ".bin");
    const auto rank = get<std::int64_t>(is);
    const auto channels = get<std::int64_t>(is);
    const auto N = get<std::int64_t>(is);
    const double X = get<double>(is);
    const double t = get<double>(is);
    GridSpec s;
    s.N = static_cast<int>(N);
    s.X = X;
    GridField F(s, static_cast<int>(rank), static_cast<int>(channels), t);
    for (int c = 0; c < F.components(); ++c)
        for (int i = 0; i < s.N; ++i)
            for (int j = 0; j < s.N; ++j)
                for (int k = 0; k < s.N; ++k) F.at(c, i, j, k) = get<double>(is);
    return F;
}

} // namespace framelab
