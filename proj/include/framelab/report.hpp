#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "framelab/certify.hpp"
#include "framelab/energy.hpp"
#include "framelab/estimates.hpp"

namespace framelab {

/// One row of a plot-ready series: term id, its anchor string and the value at t.
struct SeriesRow {
    double t = 0.0;
    std::string term;
    std::string anchor;
    double value = 0.0;
};

/// Writes rows as CSV with header t,term,anchor,value and %.17g numbers. IoError on failure.
void write_series_csv(const std::string& path, const std::vector<SeriesRow>& rows);

/// Writes a JSON document with two-space indentation. IoError on failure.
void write_json(const std::string& path, const nlohmann::json& j);

/// Appends JSON objects one per line.
class JsonlLog {
public:
    explicit JsonlLog(const std::string& path);
    void write(const std::string& line);
    void write(const nlohmann::json& j) { write(j.dump()); }

private:
    std::string path_;
};

/// Creates the directory and its parents. IoError on failure.
void ensure_directory(const std::string& dir);

/// Rows of a conservation budget, one per term, each tagged with its anchor.
std::vector<SeriesRow> budget_rows(const BudgetReport& b, double t);

nlohmann::json to_json(const BudgetReport& b);
nlohmann::json to_json(const EstimateReport& r);
nlohmann::json to_json(const CommutatorReport& r);
nlohmann::json to_json(const CheckResult& c);

} // namespace framelab
