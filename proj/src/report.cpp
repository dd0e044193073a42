#include "framelab/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "framelab/errors.hpp"

namespace framelab {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// CSV field quoting for strings that may hold commas or quotes.
std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

json term_list(const std::vector<EstimateTerm>& terms) {
    json a = json::array();
    for (const auto& t : terms) a.push_back({{"term", t.id}, {"anchor", t.anchor}, {"value", t.value}});
    return a;
}

} // namespace

void ensure_directory(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

void write_series_csv(const std::string& path, const std::vector<SeriesRow>& rows) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << "t,term,anchor,value\n";
    for (const auto& r : rows) out << fmt(r.t) << ',' << quote(r.term) << ',' << quote(r.anchor) << ',' << fmt(r.value) << '\n';
    if (!out) throw IoError("write failed for '" + path + "'");
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed for '" + path + "'");
}

JsonlLog::JsonlLog(const std::string& path) : path_(path) {
    std::ofstream out(path_, std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path_ + "'");
}

void JsonlLog::write(const std::string& line) {
    std::ofstream out(path_, std::ios::app);
    if (!out) throw IoError("cannot write '" + path_ + "'");
    out << line << '\n';
}

std::vector<SeriesRow> budget_rows(const BudgetReport& b, double t) {
    return {{t, "slice_t1", "Budget-line: weighted slice energy at t1", b.sliceT1},
            {t, "slice_t2", "Budget-line: weighted slice energy at t2", b.sliceT2},
            {t, "cone_flux", "Budget-line: flux through the cone q = q0", b.coneFlux},
            {t, "volume_weight", "Budget-line: (T_tt + T_rt) w~' volume term", b.volumeWeight},
            {t, "volume_divergence", "Budget-line: w~ div T volume term", b.volumeDivergence},
            {t, "residual", "Budget-line: residual of the divergence identity", b.residual},
            {t, "relative_residual", "Budget-line: residual over slice energy at t1", b.relativeResidual}};
}

json to_json(const BudgetReport& b) {
    json j = json::object();
    for (const auto& r : budget_rows(b, 0.0)) j[r.term] = {{"anchor", r.anchor}, {"value", r.value}};
    return j;
}

json to_json(const EstimateReport& r) {
    return {{"lhs", term_list(r.lhs)},
            {"lhsTheorem", term_list(r.lhsTheorem)},
            {"rhs", term_list(r.rhs)},
            {"lhsTotal", r.lhsTotal},
            {"lhsTheoremTotal", r.lhsTheoremTotal},
            {"rhsTotal", r.rhsTotal},
            {"impliedConstant", r.impliedConstant},
            {"impliedConstantTheorem", r.impliedConstantTheorem},
            {"smallPerturbation", r.smallPerturbation}};
}

json to_json(const CommutatorReport& r) {
    return {{"lhsSup", r.lhsSup},
            {"lhsL2", r.lhsL2},
            {"identityResidual", r.identityResidual},
            {"boundValue", r.boundValue},
            {"impliedConstant", r.impliedConstant}};
}

json to_json(const CheckResult& c) {
    return {{"name", c.name},
            {"residual", c.residual},
            {"tolerance", c.tolerance},
            {"samples", c.samples},
            {"pass", c.pass()}};
}

} // namespace framelab
