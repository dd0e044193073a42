#include "framelab/runner.hpp"

#include <cmath>
#include <random>

#include "framelab/certify.hpp"
#include "framelab/errors.hpp"
#include "framelab/report.hpp"

namespace framelab {

using nlohmann::json;

namespace {

std::string path_in(const Config& c, const std::string& name) { return c.out + "/" + name; }

json header(const Config& c) { return {{"seed", c.seed}, {"config", to_json(c)}}; }

/// Slope of the error against N when every error is positive, otherwise null.
json order_or_null(const std::vector<int>& Ns, const std::vector<double>& errs) {
    if (Ns.size() < 2) return nullptr;
    for (double e : errs)
        if (!(e > 0.0) || !std::isfinite(e)) return nullptr;
    return convergence_order(Ns, errs);
}

RunResult evolve_at(const Config& c, int N, JsonlLog* log) {
    RunConfig rc = make_run_config(c, N);
    if (log) rc.log = [log](const std::string& line) { log->write(line); };
    return run_experiment(rc);
}

int run_certify(const Config& c) {
    const auto results = certification_suite(c.seed, c.certifyPairs);
    json checks = json::array();
    bool ok = true;
    for (const auto& r : results) {
        checks.push_back(to_json(r));
        ok = ok && r.pass();
    }
    json j = header(c);
    j["checks"] = checks;
    j["pass"] = ok;
    write_json(path_in(c, "certify.json"), j);
    return ok ? kExitOk : kExitCertification;
}

int run_conserve(const Config& c) {
    const auto Ns = resolution_ladder(c);
    const WeightParams& wp = c.weights;
    json runs = json::array();
    std::vector<SeriesRow> rows;
    std::vector<std::vector<double>> residuals(c.frames.size());
    for (int N : Ns) {
        const RunConfig rc = make_run_config(c, N);
        const RunResult res = run_experiment(rc);
        const ExteriorRegion region = ExteriorRegion::standard(c.q0, rc.grid);
        json perMonitor = json::array();
        for (std::size_t m = 0; m < res.histories.size(); ++m) {
            const BudgetReport b = conservation_budget(res.histories[m], *rc.background, region, c.t1, c.t2, wp);
            residuals[m].push_back(b.residual);
            for (auto r : budget_rows(b, c.t2)) {
                r.term = "N" + std::to_string(N) + ":" + rc.monitors[m].label() + ":" + r.term;
                rows.push_back(r);
            }
            perMonitor.push_back({{"component", rc.monitors[m].label()}, {"budget", to_json(b)}});
        }
        runs.push_back({{"N", N}, {"dt", res.dt}, {"steps", res.steps}, {"monitors", perMonitor}});
    }
    json orders = json::array();
    for (std::size_t m = 0; m < residuals.size() && m < c.frames.size(); ++m)
        if (!residuals[m].empty()) orders.push_back(order_or_null(Ns, residuals[m]));
    json j = header(c);
    j["resolutions"] = Ns;
    j["runs"] = runs;
    j["residualOrder"] = orders;
    write_series_csv(path_in(c, "budget.csv"), rows);
    write_json(path_in(c, "conserve.json"), j);
    return kExitOk;
}

int run_evolve(const Config& c) {
    const auto Ns = resolution_ladder(c);
    JsonlLog log(path_in(c, "run.jsonl"));
    json runs = json::array();
    std::vector<SeriesRow> rows;
    std::vector<double> errs;
    for (int N : Ns) {
        const RunConfig rc = make_run_config(c, N);
        const RunResult res = evolve_at(c, N, &log);
        const ExteriorRegion region = ExteriorRegion::standard(c.q0, rc.grid);
        const WeightFn weight = [&](double q) { return w_tilde(q, c.weights); };
        for (std::size_t m = 0; m < res.histories.size(); ++m)
            for (const auto& slice : res.histories[m])
                rows.push_back({slice.t, "N" + std::to_string(N) + ":energy_" + rc.monitors[m].label(),
                                "Energy-line: exterior energy with weight w~", exterior_energy(slice, region, weight)});
        json run = {{"N", N}, {"dt", res.dt}, {"steps", res.steps}, {"cfl", res.cfl}, {"tFinal", res.state.t}};
        std::function<double(const Point&, int)> exact;
        if (rc.manufactured) {
            auto target = rc.manufactured;
            exact = [target](const Point& p, int comp) { return target->jets(p)[comp].v; };
        } else if (c.data.kind == InitialData::Kind::PlaneWave && rc.background->is_zero() && rc.source.empty()) {
            exact = plane_wave_exact(c.data, c.rank, c.channels);
        }
        if (exact) {
            const double e = relative_l2_error(res.state.phi, exact);
            errs.push_back(e);
            run["relativeL2Error"] = e;
        }
        runs.push_back(run);
    }
    json j = header(c);
    j["resolutions"] = Ns;
    j["runs"] = runs;
    if (errs.size() == Ns.size()) j["errorOrder"] = order_or_null(Ns, errs);
    write_series_csv(path_in(c, "energy.csv"), rows);
    write_json(path_in(c, "evolve.json"), j);
    return kExitOk;
}

int run_estimate(const Config& c) {
    const auto Ns = resolution_ladder(c);
    json runs = json::array();
    std::vector<SeriesRow> rows;
    for (int N : Ns) {
        const RunConfig rc = make_run_config(c, N);
        const RunResult res = run_experiment(rc);
        const ExteriorRegion region = ExteriorRegion::standard(c.q0, rc.grid);
        json perMonitor = json::array();
        for (std::size_t m = 0; m < res.histories.size(); ++m) {
            const auto& h = res.histories[m];
            const EstimateReport r = energy_estimate_report(h, h, *rc.background, c.t1, c.t2, region, c.weights);
            const std::string prefix = "N" + std::to_string(N) + ":" + rc.monitors[m].label() + ":";
            for (const auto* list : {&r.lhs, &r.lhsTheorem, &r.rhs})
                for (const auto& t : *list) rows.push_back({c.t2, prefix + t.id, t.anchor, t.value});
            perMonitor.push_back({{"component", rc.monitors[m].label()}, {"report", to_json(r)}});
        }
        runs.push_back({{"N", N}, {"monitors", perMonitor}});
    }
    json j = header(c);
    j["resolutions"] = Ns;
    j["runs"] = runs;
    write_series_csv(path_in(c, "estimate.csv"), rows);
    write_json(path_in(c, "estimate.json"), j);
    return kExitOk;
}

int run_commutator(const Config& c) {
    std::mt19937_64 rng(c.seed);
    PolyMetric g;
    g.H = random_symmetric_contra(rng, c.family.hDegree, c.family.range, c.family.density);
    const PolyField phi =
        random_polyfield(rng, 1, 1, {Slot::Co, Slot::Co}, c.family.phiDegree, c.family.range, c.family.density);
    CommutatorEngine engine(g, phi);
    std::vector<int> lattice = c.refine.empty() ? std::vector<int>{c.sampling.n} : c.refine;
    const auto samples = sample_region(c.sampling.n, c.sampling.box.tMin, c.sampling.box.tMax, c.sampling.box.R);

    json entries = json::array();
    std::vector<SeriesRow> rows;
    for (const MultiIndex& I : c.multiIndices) {
        const double residual = commutator_identity_residual(engine, I);
        for (FrameVector V : c.frames) {
            check_frame_set(V, c.frameSet);
            for (IndexConvention conv : c.conventions) {
                CommutatorReport rep = commutator_report(engine, I, V, c.frameSet, conv, samples);
                rep.identityResidual = residual;
                json constants = json::array();
                for (int n : lattice) {
                    const double k = refined_sup(
                        [&](const Point& p) { return commutator_ratio_at(engine, I, V, c.frameSet, conv, p); },
                        c.sampling.box, n);
                    constants.push_back({{"n", n}, {"constant", k}});
                    rows.push_back({static_cast<double>(n),
                                    to_string(I) + ":" + to_string(V) + ":" + to_string(conv) + ":constant",
                                    "Thm-line: decoupled commutator bound", k});
                }
                entries.push_back({{"multiIndex", to_string(I)},
                                   {"component", to_string(V)},
                                   {"convention", to_string(conv)},
                                   {"report", to_json(rep)},
                                   {"measuredConstants", constants}});
            }
        }
    }
    json j = header(c);
    j["entries"] = entries;
    write_series_csv(path_in(c, "commutator.csv"), rows);
    write_json(path_in(c, "commutator.json"), j);
    return kExitOk;
}

} // namespace

std::vector<int> resolution_ladder(const Config& c) { return c.refine.empty() ? std::vector<int>{c.grid.N} : c.refine; }

std::vector<int> refine_ladder(int N, int K) {
    std::vector<int> out;
    for (int k = 0; k < K; ++k) {
        int n = N * (2 + k) / 2;
        out.push_back(n + (n % 2));
    }
    return out;
}

int run(const Config& c) {
    validate(c);
    ensure_directory(c.out);
    switch (c.mode) {
    case Mode::Certify: return run_certify(c);
    case Mode::Conserve: return run_conserve(c);
    case Mode::Evolve: return run_evolve(c);
    case Mode::Estimate: return run_estimate(c);
    case Mode::Commutator: return run_commutator(c);
    }
    return kExitRuntime;
}

} // namespace framelab
