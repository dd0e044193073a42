#include "framelab/geometry.hpp"

#include <cmath>

namespace framelab {

std::string to_string(FrameVector v) {
    switch (v) {
    case FrameVector::Lbar: return "Lbar";
    case FrameVector::L: return "L";
    case FrameVector::e1: return "e1";
    case FrameVector::e2: return "e2";
    }
    return "?";
}

FrameVector frame_vector_from_string(const std::string& s) {
    if (s == "Lbar") return FrameVector::Lbar;
    if (s == "L") return FrameVector::L;
    if (s == "e1") return FrameVector::e1;
    if (s == "e2") return FrameVector::e2;
    throw ParseError("unknown frame vector '" + s + "'");
}

const Vec4& Frame::operator[](FrameVector v) const {
    switch (v) {
    case FrameVector::Lbar: return Lbar;
    case FrameVector::L: return L;
    case FrameVector::e1: return e1;
    case FrameVector::e2: return e2;
    }
    return L;
}

int sphere_chart(const std::array<double, 3>& x) {
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    return std::abs(x[2]) > 0.9 * r ? 1 : 0;
}

Frame null_frame_at(const Point& p) {
    const double r = p.r();
    if (!(r > 0.0)) throw PoleDegenerate("null frame undefined at r = 0");
    Frame f;
    const double n[3] = {p.x[0] / r, p.x[1] / r, p.x[2] / r};
    f.L = {1.0, n[0], n[1], n[2]};
    f.Lbar = {1.0, -n[0], -n[1], -n[2]};
    std::array<double, 3> a{}, b{};
    sphere_pair(p.x, sphere_chart(p.x), a, b);
    f.e1 = {0.0, a[0], a[1], a[2]};
    f.e2 = {0.0, b[0], b[1], b[2]};
    return f;
}

std::array<FrameVectorJet, 4> frame_jets_at(const Point& p) {
    const double r = p.r();
    if (!(r > 0.0)) throw PoleDegenerate("frame derivatives undefined at r = 0");
    const std::array<Jet, 3> x{Jet::variable(p.x[0], 0), Jet::variable(p.x[1], 1),
                               Jet::variable(p.x[2], 2)};
    const Jet rj = sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    std::array<Jet, 3> a{}, b{};
    sphere_pair(x, sphere_chart(p.x), a, b);

    std::array<std::array<Jet, 3>, 4> spatial;
    for (int i = 0; i < 3; ++i) {
        const Jet n = x[i] / rj;
        spatial[static_cast<int>(FrameVector::L)][i] = n;
        spatial[static_cast<int>(FrameVector::Lbar)][i] = -n;
        spatial[static_cast<int>(FrameVector::e1)][i] = a[i];
        spatial[static_cast<int>(FrameVector::e2)][i] = b[i];
    }
    std::array<FrameVectorJet, 4> out{};
    for (int v = 0; v < 4; ++v) {
        const bool null = v == static_cast<int>(FrameVector::L) ||
                          v == static_cast<int>(FrameVector::Lbar);
        out[v].value[0] = null ? 1.0 : 0.0;
        for (int i = 0; i < 3; ++i) {
            const Jet& c = spatial[v][i];
            out[v].value[i + 1] = c.v;
            for (int k = 0; k < 3; ++k) {
                out[v].d[k][i + 1] = c.d[k];
                for (int l = 0; l < 3; ++l) out[v].dd[k][l][i + 1] = c.hess(k, l);
            }
        }
    }
    return out;
}

std::array<Vec4, 4> dual_coframe(const Frame& f) {
    std::array<Vec4, 4> th{};
    const Vec4 Lf = lower_index(f.L);
    const Vec4 Lbf = lower_index(f.Lbar);
    for (int m = 0; m < 4; ++m) {
        th[static_cast<int>(FrameVector::Lbar)][m] = -0.5 * Lf[m];
        th[static_cast<int>(FrameVector::L)][m] = -0.5 * Lbf[m];
    }
    th[static_cast<int>(FrameVector::e1)] = lower_index(f.e1);
    th[static_cast<int>(FrameVector::e2)] = lower_index(f.e2);
    return th;
}

double minkowski_dot(const Vec4& a, const Vec4& b) {
    double s = 0.0;
    for (int m = 0; m < 4; ++m) s += kEta[m] * a[m] * b[m];
    return s;
}

double mixed_component(const Frame& f, FrameVector U, int nu) {
    // m^U_nu = theta^U_lambda m^{lambda kappa} m_{kappa nu} = theta^U_nu.
    return dual_coframe(f)[static_cast<int>(U)][nu];
}

CoordTensor::CoordTensor(int rank, int channels) : rank_(rank), channels_(channels) {
    if (rank < 0 || rank > 2) throw RankMismatch("rank must be 0, 1 or 2");
    if (channels < 1) throw RankMismatch("channel count must be positive");
    data_.assign(static_cast<std::size_t>(slot_count()) * channels, 0.0);
}

CoordTensor CoordTensor::minkowski_covariant() {
    CoordTensor m(2, 1);
    for (int a = 0; a < 4; ++a) m.at(0, a, a) = kEta[a];
    return m;
}

CoordTensor& CoordTensor::operator+=(const CoordTensor& o) {
    if (o.rank_ != rank_ || o.channels_ != channels_) throw RankMismatch("tensor shapes differ");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

CoordTensor& CoordTensor::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

CoordTensor operator+(CoordTensor a, const CoordTensor& b) { return a += b; }
CoordTensor operator*(double s, CoordTensor a) { return a *= s; }

std::vector<double> frame_component(const CoordTensor& T, const Vec4& V1,
                                    const std::optional<Vec4>& V2) {
    const int supplied = V2 ? 2 : 1;
    if (T.rank() != supplied)
        throw RankMismatch("tensor of rank " + std::to_string(T.rank()) + " contracted with " +
                           std::to_string(supplied) + " vectors");
    std::vector<double> out(T.channels(), 0.0);
    for (int c = 0; c < T.channels(); ++c) {
        double s = 0.0;
        for (int a = 0; a < 4; ++a) {
            if (supplied == 1) {
                s += T.at(c, a) * V1[a];
            } else {
                for (int b = 0; b < 4; ++b) s += T.at(c, a, b) * V1[a] * (*V2)[b];
            }
        }
        out[c] = s;
    }
    return out;
}

double frobenius_norm(const CoordTensor& T) {
    double s = 0.0;
    for (double v : T.data()) s += v * v;
    return std::sqrt(s);
}

double frobenius_norm(const Mat4& M) {
    double s = 0.0;
    for (const auto& row : M)
        for (double v : row) s += v * v;
    return std::sqrt(s);
}

Mat4 lower_both(const Mat4& Hup) {
    Mat4 out{};
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) out[a][b] = kEta[a] * kEta[b] * Hup[a][b];
    return out;
}

double contract(const Mat4& M, const Vec4& U, const Vec4& V) {
    double s = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) s += M[a][b] * U[a] * V[b];
    return s;
}

} // namespace framelab
