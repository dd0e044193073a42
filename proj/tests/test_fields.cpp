#include <cmath>
#include <filesystem>
#include <limits>

#include "doctest.h"
#include "framelab/grid.hpp"

using namespace framelab;

namespace {

/// Samples f on interior nodes and fills ghosts by extrapolation.
GridField interior_sample(const GridSpec& spec, const std::function<double(const Point&)>& f) {
    GridField F(spec, 0, 1);
    for (int i = 0; i < spec.N; ++i)
        for (int j = 0; j < spec.N; ++j)
            for (int k = 0; k < spec.N; ++k) F.at(0, i, j, k) = f(spec.point(i, j, k, 0.0));
    F.fill_ghosts(GhostMode::Extrapolate);
    return F;
}

double max_error(const GridField& D, const std::function<double(const Point&)>& exact) {
    const GridSpec& s = D.spec();
    double e = 0.0;
    for (int i = 0; i < s.N; ++i)
        for (int j = 0; j < s.N; ++j)
            for (int k = 0; k < s.N; ++k) e = std::max(e, std::abs(D.at(0, i, j, k) - exact(s.point(i, j, k, 0.0))));
    return e;
}

} // namespace

TEST_CASE("grid derivative of sin(x1) converges at fourth order") {
    std::vector<double> errs;
    for (int N : {16, 32, 64}) {
        const GridSpec spec{N, 1.0};
        const GridField F = interior_sample(spec, [](const Point& p) { return std::sin(p.x[0]); });
        errs.push_back(max_error(F.partial(1), [](const Point& p) { return std::cos(p.x[0]); }));
    }
    const double o1 = std::log2(errs[0] / errs[1]);
    const double o2 = std::log2(errs[1] / errs[2]);
    CHECK(o1 >= 3.8);
    CHECK(o2 >= 3.8);
}

TEST_CASE("grid derivative is exact on cubic samples") {
    const GridSpec spec{12, 1.5};
    auto f = [](const Point& p) {
        const double x = p.x[0], y = p.x[1], z = p.x[2];
        return 1.0 + 2.0 * x - y * z + x * x * y - 3.0 * z * z * z + x * y * z;
    };
    const GridField F = interior_sample(spec, f);
    auto dz = [](const Point& p) { return -p.x[1] - 9.0 * p.x[2] * p.x[2] + p.x[0] * p.x[1]; };
    CHECK(max_error(F.partial(3), dz) <= 1e-10);
}

TEST_CASE("constant field has zero derivative") {
    const GridSpec spec{10, 1.0};
    const GridField F = interior_sample(spec, [](const Point&) { return 4.2; });
    for (int mu = 1; mu <= 3; ++mu) CHECK(F.partial(mu).max_abs_interior(0) <= 1e-12);
}

TEST_CASE("derivative without ghosts is refused") {
    GridField F(GridSpec{10, 1.0}, 0, 1);
    CHECK_THROWS_AS(F.partial(1), GhostInvalid);
}

TEST_CASE("quadrature of 1 over the box minus the origin ball") {
    const GridSpec spec{48, 2.0};
    GridField one(spec, 0, 1);
    one.sample([](const Point&, int) { return 1.0; });
    const ExteriorRegion region = ExteriorRegion::standard(-std::numeric_limits<double>::infinity(), spec);
    const double ball = 4.0 / 3.0 * M_PI * std::pow(region.originBallRadius, 3);
    const double exact = std::pow(2.0 * spec.X, 3) - ball;
    CHECK(std::abs(quadrature_slice(one, region, 0.0) - exact) <= 0.02 * exact);
    GridField zero(spec, 0, 1);
    CHECK(quadrature_slice(zero, region, 0.0) == 0.0);
}

TEST_CASE("Gaussian inside the cone contributes nothing to the exterior") {
    const GridSpec spec{48, 3.0};
    const double sigma = 0.15;
    GridField G(spec, 0, 1);
    G.sample([&](const Point& p, int) { return std::exp(-p.r() * p.r() / (sigma * sigma)); });
    const ExteriorRegion region = ExteriorRegion::standard(1.0, spec);
    const double full = std::pow(M_PI, 1.5) * sigma * sigma * sigma;
    CHECK(std::abs(quadrature_slice(G, region, 0.0)) <= 1e-6 * full);
}

TEST_CASE("quadrature converges at second order on a polynomial integrand") {
    const double X = 1.0;
    const double exact = 4.0 * X * X * (2.0 * X * X * X / 3.0 + 2.0 * std::pow(X, 5) / 5.0);
    std::vector<double> errs;
    for (int N : {8, 16, 32}) {
        const GridSpec spec{N, X};
        GridField F(spec, 0, 1);
        F.sample([](const Point& p, int) { return p.x[0] * p.x[0] + std::pow(p.x[1], 4); });
        errs.push_back(std::abs(quadrature_slice(F, ExteriorRegion{}, 0.0) - exact));
    }
    CHECK(std::log2(errs[0] / errs[1]) >= 1.9);
    CHECK(std::log2(errs[1] / errs[2]) >= 1.9);
}

TEST_CASE("empty region is an error") {
    const GridSpec spec{8, 1.0};
    GridField F(spec, 0, 1);
    CHECK_THROWS_AS(quadrature_slice(F, ExteriorRegion{10.0, 0.0}, 0.0), EmptyRegion);
}

TEST_CASE("snapshot round trip") {
    const GridSpec spec{8, 1.25};
    GridField F(spec, 1, 2, 0.375);
    F.sample([](const Point& p, int c) { return c + p.x[0] * 0.1 - p.x[2]; });
    const auto dir = std::filesystem::temp_directory_path() / "framelab_snapshot_test";
    std::filesystem::create_directories(dir);
    const std::string base = (dir / "snap").string();
    write_snapshot(F, base);
    const GridField G = read_snapshot(base);
    CHECK(G.rank() == 1);
    CHECK(G.channels() == 2);
    CHECK(G.time() == 0.375);
    CHECK(G.spec().X == 1.25);
    for (int c = 0; c < F.components(); ++c)
        for (int i = 0; i < spec.N; ++i) CHECK(G.at(c, i, 3, 5) == F.at(c, i, 3, 5));
    CHECK(std::filesystem::exists(base + ".json"));
    std::filesystem::remove_all(dir);
}
