#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "framelab/estimates.hpp"
#include "framelab/evolve.hpp"
#include "framelab/sources.hpp"
#include "framelab/vecfields.hpp"
#include "framelab/weights.hpp"

namespace framelab {

enum class Mode { Certify, Conserve, Evolve, Estimate, Commutator };

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

struct BackgroundConfig {
    std::string family = "zero";  ///< zero | static-bump | traveling-bump | polynomial
    double epsilon = 0.0;
    std::array<double, 3> centre{2.0, 0.0, 0.0};
    double radius = 1.5;
    std::array<double, 3> velocity{0.3, 0.0, 0.0};
    int degree = 2;               ///< polynomial family: degree of the seeded random H
};

struct ManufacturedConfig {
    bool enabled = false;
    int degree = 2;
    double scale = 0.2;
    double sigma = 1.0;
    std::array<double, 3> centre{};
    std::array<double, 3> velocity{};
};

/// Sizes of the seeded polynomial families used by the commutator mode.
struct CommutatorFamily {
    int hDegree = 2;
    int phiDegree = 3;
    int range = 3;
    double density = 0.6;
};

struct SamplingConfig {
    int n = 7;  ///< lattice nodes per axis before refinement
    SampleBox box;
};

struct Config {
    Mode mode = Mode::Certify;
    GridSpec grid{32, 4.0};
    /// Resolutions for refinement studies; empty means {grid.N}.
    std::vector<int> refine;
    double t0 = 0.0;
    double t1 = 0.0;
    double t2 = 0.6;
    std::optional<double> dt;
    double cfl = 0.4;
    WeightParams weights;
    double q0 = -2.0;
    BackgroundConfig background;
    SourceSpec source;
    int rank = 1;
    int channels = 1;
    BoundaryKind boundary = BoundaryKind::Sommerfeld;
    bool metricToy = false;
    InitialData data;
    ManufacturedConfig manufactured;
    std::vector<MultiIndex> multiIndices{MultiIndex{}};
    std::vector<FrameVector> frames{FrameVector::L};
    FrameSetKind frameSet = FrameSetKind::Tangential;
    std::vector<IndexConvention> conventions{IndexConvention::Theorem, IndexConvention::Lemma};
    CommutatorFamily family;
    SamplingConfig sampling;
    int certifyPairs = 50;
    std::uint64_t seed = 1;
    std::string out = "out";
};

/// Validates a parsed JSON document. Unknown keys and wrong types raise
/// SchemaError naming the field path; violated constraints raise ConstraintError.
Config parse_config(const nlohmann::json& j);

/// Reads and parses a JSON file; ParseError for malformed text, IoError if unreadable.
Config parse_config_file(const std::string& path);

/// Checks every numeric constraint; parse_config calls it before returning.
void validate(const Config& c);

/// The background named by the configuration (seeded for the polynomial family).
std::shared_ptr<const Background> make_background(const Config& c);

/// The evolution settings for one resolution N.
RunConfig make_run_config(const Config& c, int N);

/// Configuration echoed into summaries.
nlohmann::json to_json(const Config& c);

} // namespace framelab
