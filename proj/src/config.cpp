#include "framelab/config.hpp"

#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "framelab/errors.hpp"

namespace framelab {

using nlohmann::json;

namespace {

const std::pair<Mode, const char*> kModes[] = {{Mode::Certify, "certify"},
                                               {Mode::Conserve, "conserve"},
                                               {Mode::Evolve, "evolve"},
                                               {Mode::Estimate, "estimate"},
                                               {Mode::Commutator, "commutator"}};

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

/// Reader for one JSON object that rejects unknown keys and records the field path.
class Obj {
public:
    Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw SchemaError(where() + ": expected an object");
    }

    void allow(std::initializer_list<const char*> keys) const {
        std::set<std::string> ok(keys.begin(), keys.end());
        for (const auto& [k, v] : j_.items())
            if (!ok.count(k)) throw SchemaError(join(path_, k) + ": unknown field");
    }

    bool has(const char* key) const { return j_.contains(key); }
    const json& raw(const char* key) const { return j_.at(key); }
    std::string path(const char* key) const { return join(path_, key); }

    void number(const char* key, double& out) const {
        if (!has(key)) return;
        const json& v = j_.at(key);
        if (!v.is_number()) throw SchemaError(path(key) + ": expected a number");
        out = v.get<double>();
    }
    void integer(const char* key, int& out) const {
        if (!has(key)) return;
        const json& v = j_.at(key);
        if (!v.is_number_integer()) throw SchemaError(path(key) + ": expected an integer");
        out = v.get<int>();
    }
    void boolean(const char* key, bool& out) const {
        if (!has(key)) return;
        const json& v = j_.at(key);
        if (!v.is_boolean()) throw SchemaError(path(key) + ": expected a boolean");
        out = v.get<bool>();
    }
    void string(const char* key, std::string& out) const {
        if (!has(key)) return;
        const json& v = j_.at(key);
        if (!v.is_string()) throw SchemaError(path(key) + ": expected a string");
        out = v.get<std::string>();
    }
    template <std::size_t N>
    void vec(const char* key, std::array<double, N>& out) const {
        if (!has(key)) return;
        const json& v = j_.at(key);
        if (!v.is_array() || v.size() != N) throw SchemaError(path(key) + ": expected " + std::to_string(N) + " numbers");
        for (std::size_t i = 0; i < N; ++i) {
            if (!v[i].is_number()) throw SchemaError(path(key) + "[" + std::to_string(i) + "]: expected a number");
            out[i] = v[i].get<double>();
        }
    }
    void numbers(const char* key, std::vector<double>& out) const {
        if (!has(key)) return;
        const json& v = array(key);
        out.clear();
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) throw SchemaError(path(key) + "[" + std::to_string(i) + "]: expected a number");
            out.push_back(v[i].get<double>());
        }
    }
    void integers(const char* key, std::vector<int>& out) const {
        if (!has(key)) return;
        const json& v = array(key);
        out.clear();
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number_integer())
                throw SchemaError(path(key) + "[" + std::to_string(i) + "]: expected an integer");
            out.push_back(v[i].get<int>());
        }
    }
    const json& array(const char* key) const {
        const json& v = j_.at(key);
        if (!v.is_array()) throw SchemaError(path(key) + ": expected an array");
        return v;
    }
    std::vector<std::string> strings(const char* key) const {
        std::vector<std::string> out;
        const json& v = array(key);
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_string()) throw SchemaError(path(key) + "[" + std::to_string(i) + "]: expected a string");
            out.push_back(v[i].get<std::string>());
        }
        return out;
    }

private:
    std::string where() const { return path_.empty() ? "config" : path_; }
    const json& j_;
    std::string path_;
};

/// Wraps library parse errors so the message carries the field path.
template <class F>
auto with_path(const std::string& path, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        // Drop the error-kind prefix of the inner message.
        std::string what = e.what();
        const auto colon = what.find(": ");
        throw SchemaError(path + ": " + (colon == std::string::npos ? what : what.substr(colon + 2)));
    }
}

} // namespace

std::string to_string(Mode m) {
    for (const auto& [k, n] : kModes)
        if (k == m) return n;
    return "certify";
}

Mode mode_from_string(const std::string& s) {
    for (const auto& [k, n] : kModes)
        if (s == n) return k;
    throw SchemaError("mode: unknown mode '" + s + "'");
}

Config parse_config(const json& j) {
    Config c;
    // Evolution-based modes start from an off-origin Gaussian pulse.
    c.data.kind = InitialData::Kind::Gaussian;
    c.data.centre = {2.2, 0.0, 0.0};
    c.data.sigma = 0.3;
    c.data.slotWeights = {1.0, 0.5, -0.3, 0.2};

    const Obj root(j, "");
    root.allow({"mode", "seed", "out", "grid", "times", "weights", "region", "background", "field", "data",
                "manufactured", "source", "multiIndices", "frames", "frameSet", "conventions", "commutator",
                "sampling", "certify"});
    if (!root.has("mode")) throw SchemaError("mode: required field missing");
    std::string mode;
    root.string("mode", mode);
    c.mode = mode_from_string(mode);
    if (root.has("seed")) {
        const json& s = root.raw("seed");
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
            throw SchemaError("seed: expected a non-negative integer");
        c.seed = s.get<std::uint64_t>();
    }
    root.string("out", c.out);

    if (root.has("grid")) {
        const Obj g(root.raw("grid"), "grid");
        g.allow({"N", "X", "refine"});
        g.integer("N", c.grid.N);
        g.number("X", c.grid.X);
        g.integers("refine", c.refine);
    }
    if (root.has("times")) {
        const Obj t(root.raw("times"), "times");
        t.allow({"t0", "t1", "t2", "dt", "cfl"});
        t.number("t0", c.t0);
        t.number("t1", c.t1);
        t.number("t2", c.t2);
        if (t.has("dt")) {
            double dt = 0.0;
            t.number("dt", dt);
            c.dt = dt;
        }
        t.number("cfl", c.cfl);
    }
    if (root.has("weights")) {
        const Obj w(root.raw("weights"), "weights");
        w.allow({"gamma", "mu"});
        w.number("gamma", c.weights.gamma);
        w.number("mu", c.weights.mu);
    }
    if (root.has("region")) {
        const Obj r(root.raw("region"), "region");
        r.allow({"q0"});
        r.number("q0", c.q0);
    }
    if (root.has("background")) {
        const Obj b(root.raw("background"), "background");
        b.allow({"family", "epsilon", "centre", "radius", "velocity", "degree"});
        b.string("family", c.background.family);
        const std::set<std::string> families{"zero", "static-bump", "traveling-bump", "polynomial"};
        if (!families.count(c.background.family))
            throw SchemaError("background.family: unknown family '" + c.background.family + "'");
        b.number("epsilon", c.background.epsilon);
        b.vec("centre", c.background.centre);
        b.number("radius", c.background.radius);
        b.vec("velocity", c.background.velocity);
        b.integer("degree", c.background.degree);
    }
    if (root.has("field")) {
        const Obj f(root.raw("field"), "field");
        f.allow({"rank", "channels", "boundary", "metricToy"});
        f.integer("rank", c.rank);
        f.integer("channels", c.channels);
        std::string boundary = "sommerfeld";
        f.string("boundary", boundary);
        if (boundary == "sommerfeld") c.boundary = BoundaryKind::Sommerfeld;
        else if (boundary == "periodic") c.boundary = BoundaryKind::Periodic;
        else throw SchemaError("field.boundary: expected 'sommerfeld' or 'periodic'");
        f.boolean("metricToy", c.metricToy);
    }
    if (root.has("data")) {
        const Obj d(root.raw("data"), "data");
        d.allow({"kind", "amplitude", "sigma", "centre", "slotWeights", "channelWeights", "k"});
        std::string kind = "gaussian";
        d.string("kind", kind);
        if (kind == "zero") c.data.kind = InitialData::Kind::Zero;
        else if (kind == "gaussian") c.data.kind = InitialData::Kind::Gaussian;
        else if (kind == "plane-wave") c.data.kind = InitialData::Kind::PlaneWave;
        else if (kind == "target") c.data.kind = InitialData::Kind::Target;
        else throw SchemaError("data.kind: expected zero, gaussian, plane-wave or target");
        d.number("amplitude", c.data.amplitude);
        d.number("sigma", c.data.sigma);
        d.vec("centre", c.data.centre);
        d.vec("slotWeights", c.data.slotWeights);
        d.numbers("channelWeights", c.data.channelWeights);
        d.vec("k", c.data.k);
    }
    if (root.has("manufactured")) {
        const Obj m(root.raw("manufactured"), "manufactured");
        m.allow({"degree", "scale", "sigma", "centre", "velocity"});
        c.manufactured.enabled = true;
        m.integer("degree", c.manufactured.degree);
        m.number("scale", c.manufactured.scale);
        m.number("sigma", c.manufactured.sigma);
        m.vec("centre", c.manufactured.centre);
        m.vec("velocity", c.manufactured.velocity);
    }
    if (root.has("source")) {
        const json& arr = root.array("source");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string p = "source[" + std::to_string(i) + "]";
            const Obj s(arr[i], p);
            s.allow({"term", "coeff", "degree", "partner"});
            if (!s.has("term")) throw SchemaError(p + ".term: required field missing");
            std::string name;
            s.string("term", name);
            SourceTerm t;
            t.kind = with_path(p + ".term", [&] { return source_term_from_string(name); });
            s.number("coeff", t.coeff);
            s.integer("degree", t.degree);
            s.integers("partner", t.partner);
            c.source.terms.push_back(t);
        }
    }
    if (root.has("multiIndices")) {
        c.multiIndices.clear();
        const auto names = root.strings("multiIndices");
        for (std::size_t i = 0; i < names.size(); ++i)
            c.multiIndices.push_back(with_path("multiIndices[" + std::to_string(i) + "]",
                                               [&] { return parse_multi_index(names[i]); }));
    }
    if (root.has("frames")) {
        c.frames.clear();
        const auto names = root.strings("frames");
        for (std::size_t i = 0; i < names.size(); ++i)
            c.frames.push_back(
                with_path("frames[" + std::to_string(i) + "]", [&] { return frame_vector_from_string(names[i]); }));
    }
    if (root.has("frameSet")) {
        std::string s;
        root.string("frameSet", s);
        if (s == "tangential") c.frameSet = FrameSetKind::Tangential;
        else if (s == "full") c.frameSet = FrameSetKind::Full;
        else throw SchemaError("frameSet: expected 'tangential' or 'full'");
    }
    if (root.has("conventions")) {
        c.conventions.clear();
        for (const auto& s : root.strings("conventions")) {
            if (s == "theorem") c.conventions.push_back(IndexConvention::Theorem);
            else if (s == "lemma") c.conventions.push_back(IndexConvention::Lemma);
            else throw SchemaError("conventions: expected 'theorem' or 'lemma'");
        }
    }
    if (root.has("commutator")) {
        const Obj f(root.raw("commutator"), "commutator");
        f.allow({"hDegree", "phiDegree", "range", "density"});
        f.integer("hDegree", c.family.hDegree);
        f.integer("phiDegree", c.family.phiDegree);
        f.integer("range", c.family.range);
        f.number("density", c.family.density);
    }
    if (root.has("sampling")) {
        const Obj s(root.raw("sampling"), "sampling");
        s.allow({"n", "tMin", "tMax", "R"});
        s.integer("n", c.sampling.n);
        s.number("tMin", c.sampling.box.tMin);
        s.number("tMax", c.sampling.box.tMax);
        s.number("R", c.sampling.box.R);
    }
    if (root.has("certify")) {
        const Obj s(root.raw("certify"), "certify");
        s.allow({"pairs"});
        s.integer("pairs", c.certifyPairs);
    }
    validate(c);
    return c;
}

Config parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    json j;
    try {
        j = json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

void validate(const Config& c) {
    c.weights.validate();
    if (c.background.epsilon < 0.0) throw ConstraintError("epsilon must be >= 0");
    if (c.background.epsilon > 0.3) throw ConstraintError("epsilon must be <= 0.3");
    if (!(c.cfl > 0.0)) throw ConstraintError("cfl must be > 0");
    if (c.cfl > 0.5) throw ConstraintError("cfl must be <= 0.5");
    if (c.dt && !(*c.dt > 0.0)) throw ConstraintError("dt must be > 0");
    if (c.grid.N < 8) throw ConstraintError("grid.N must be >= 8");
    // The commutator mode reads the ladder as lattice sizes, every other mode as grid sizes.
    const int minRefine = c.mode == Mode::Commutator ? 2 : 8;
    for (int n : c.refine)
        if (n < minRefine) throw ConstraintError("grid.refine entries must be >= " + std::to_string(minRefine));
    if (!(c.grid.X > 0.0)) throw ConstraintError("grid.X must be > 0");
    if (!(c.t0 <= c.t1 && c.t1 <= c.t2 && c.t0 < c.t2)) throw ConstraintError("times must satisfy t0 <= t1 <= t2, t0 < t2");
    if (c.rank != 0 && c.rank != 1) throw ConstraintError("field.rank must be 0 or 1");
    if (c.channels < 1) throw ConstraintError("field.channels must be >= 1");
    if (c.background.family != "zero" && !(c.background.radius > 0.0)) throw ConstraintError("background.radius must be > 0");
    if (c.background.degree < 0) throw ConstraintError("background.degree must be >= 0");
    if (!(c.data.sigma > 0.0)) throw ConstraintError("data.sigma must be > 0");
    if (c.manufactured.enabled) {
        if (c.boundary != BoundaryKind::Sommerfeld) throw ConstraintError("manufactured runs need sommerfeld boundaries");
        if (!(c.manufactured.sigma > 0.0)) throw ConstraintError("manufactured.sigma must be > 0");
        if (c.manufactured.degree < 0) throw ConstraintError("manufactured.degree must be >= 0");
    }
    if (c.data.kind == InitialData::Kind::Target && !c.manufactured.enabled)
        throw ConstraintError("target data needs a manufactured section");
    if (!c.source.empty() && c.rank != 1) throw ConstraintError("source terms need field.rank = 1");
    if (c.metricToy && c.rank != 1) throw ConstraintError("metric toy needs field.rank = 1");
    c.source.validate(c.channels);
    for (FrameVector V : c.frames)
        if (c.frameSet == FrameSetKind::Tangential && !is_tangential(V))
            throw ConstraintError("frame Lbar needs frameSet 'full'");
    if (c.mode == Mode::Estimate)
        for (const MultiIndex& I : c.multiIndices)
            if (!I.empty()) throw ConstraintError("estimate runs support the empty multi-index only");
    if (c.sampling.n < 2) throw ConstraintError("sampling.n must be >= 2");
    if (!(c.sampling.box.tMax > c.sampling.box.tMin) || !(c.sampling.box.R > 0.0))
        throw ConstraintError("sampling box must be nonempty");
    if (c.certifyPairs < 1) throw ConstraintError("certify.pairs must be >= 1");
    if (c.family.hDegree < 0 || c.family.phiDegree < 0 || c.family.range < 1)
        throw ConstraintError("commutator family sizes must be nonnegative with range >= 1");
    if (!(c.family.density > 0.0 && c.family.density <= 1.0))
        throw ConstraintError("commutator.density must be in (0, 1]");
}

std::shared_ptr<const Background> make_background(const Config& c) {
    const BackgroundConfig& b = c.background;
    if (b.family == "zero" || b.epsilon == 0.0) return make_zero_background();
    if (b.family == "static-bump") return make_bump_background(b.epsilon, b.centre, b.radius);
    if (b.family == "traveling-bump") return make_bump_background(b.epsilon, b.centre, b.radius, b.velocity);
    std::mt19937_64 rng(c.seed ^ 0x5bd1e995ULL);
    const PolyField P = random_symmetric_contra(rng, b.degree, 3, 1.0);
    return make_polynomial_background(b.epsilon, P, c.grid.X, c.t2);
}

RunConfig make_run_config(const Config& c, int N) {
    RunConfig r;
    r.grid = GridSpec{N, c.grid.X};
    r.rank = c.rank;
    r.channels = c.channels;
    r.t0 = c.t0;
    r.t1 = c.t1;
    r.t2 = c.t2;
    r.cfl = c.cfl;
    r.dt = c.dt;
    r.boundary = c.boundary;
    r.background = make_background(c);
    r.source = c.source;
    r.data = c.data;
    r.metricToy = c.metricToy;
    if (c.manufactured.enabled) {
        std::mt19937_64 rng(c.seed ^ 0x27d4eb2fULL);
        PolyField P = random_polyfield(rng, c.rank, c.channels, {Slot::Co, Slot::Co}, c.manufactured.degree, 3, 1.0);
        P *= c.manufactured.scale;
        r.manufactured = gaussian_polynomial_target(P, c.manufactured.centre, c.manufactured.sigma, c.manufactured.velocity);
    }
    for (FrameVector V : c.frames) {
        MonitorSpec m;
        if (c.rank == 0) m.kind = MonitorSpec::Kind::Scalar;
        else m.V = V;
        r.monitors.push_back(m);
        if (c.rank == 0) break;
    }
    return r;
}

json to_json(const Config& c) {
    json j;
    j["mode"] = to_string(c.mode);
    j["seed"] = c.seed;
    j["grid"] = {{"N", c.grid.N}, {"X", c.grid.X}, {"refine", c.refine}};
    j["times"] = {{"t0", c.t0}, {"t1", c.t1}, {"t2", c.t2}, {"cfl", c.cfl}};
    if (c.dt) j["times"]["dt"] = *c.dt;
    j["weights"] = {{"gamma", c.weights.gamma}, {"mu", c.weights.mu}};
    j["region"] = {{"q0", c.q0}};
    j["background"] = {{"family", c.background.family}, {"epsilon", c.background.epsilon}};
    j["field"] = {{"rank", c.rank},
                  {"channels", c.channels},
                  {"boundary", c.boundary == BoundaryKind::Periodic ? "periodic" : "sommerfeld"},
                  {"metricToy", c.metricToy}};
    std::vector<std::string> idx, frames, sources;
    for (const auto& I : c.multiIndices) idx.push_back(to_string(I));
    for (FrameVector V : c.frames) frames.push_back(to_string(V));
    for (const auto& t : c.source.terms) sources.push_back(to_string(t.kind));
    j["multiIndices"] = idx;
    j["frames"] = frames;
    j["source"] = sources;
    j["frameSet"] = c.frameSet == FrameSetKind::Full ? "full" : "tangential";
    return j;
}

} // namespace framelab
