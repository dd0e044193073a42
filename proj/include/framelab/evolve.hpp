#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "framelab/background.hpp"
#include "framelab/energy.hpp"
#include "framelab/grid.hpp"
#include "framelab/jet.hpp"
#include "framelab/polyfield.hpp"
#include "framelab/sources.hpp"

namespace framelab {

/// Smooth target field with exact first and second space-time partials.
class ManufacturedSolution {
public:
    virtual ~ManufacturedSolution() = default;
    virtual int rank() const = 0;
    virtual int channels() const = 0;
    int components() const { return (rank() == 0 ? 1 : 4) * channels(); }
    /// Jets of every component (slot-major, channel fastest) at p.
    virtual std::vector<Jet4> jets(const Point& p) const = 0;
};

/// The polynomial field itself.
std::shared_ptr<const ManufacturedSolution> polynomial_target(const PolyField& P);

/// P(t, x) * exp(-|x - c - v t|^2 / sigma^2).
std::shared_ptr<const ManufacturedSolution> gaussian_polynomial_target(const PolyField& P,
                                                                        const std::array<double, 3>& centre,
                                                                        double sigma,
                                                                        const std::array<double, 3>& velocity = {});

/// S = g^{ab} d_a d_b Phi* evaluated exactly from the target's jets.
class ManufacturedSource {
public:
    ManufacturedSource(std::shared_ptr<const ManufacturedSolution> target,
                       std::shared_ptr<const Background> background);
    /// One value per component of the target at p.
    std::vector<double> at(const Point& p) const;
    const ManufacturedSolution& target() const { return *target_; }

private:
    std::shared_ptr<const ManufacturedSolution> target_;
    std::shared_ptr<const Background> background_;
};

ManufacturedSource manufactured_source(std::shared_ptr<const ManufacturedSolution> target,
                                       std::shared_ptr<const Background> background);

enum class BoundaryKind { Sommerfeld, Periodic };

struct InitialData {
    enum class Kind { Zero, Gaussian, PlaneWave, Target };
    Kind kind = Kind::Zero;
    double amplitude = 1.0;
    double sigma = 0.3;
    std::array<double, 3> centre{};
    /// Per-slot factors for rank-1 fields.
    Vec4 slotWeights{1.0, 1.0, 1.0, 1.0};
    /// Per-channel factors; missing entries are 1.
    std::vector<double> channelWeights;
    /// Wave vector of the plane wave sin(k.x - |k| t).
    std::array<double, 3> k{};
};

/// Scalar component recorded at every step of the monitor window.
struct MonitorSpec {
    enum class Kind { Frame, Slot, Scalar };
    Kind kind = Kind::Frame;
    FrameVector V = FrameVector::L;
    int slot = 0;
    std::string label() const;
};

struct RunConfig {
    GridSpec grid;
    int rank = 1;
    int channels = 1;
    double t0 = 0.0;
    double t1 = 0.0;  ///< start of the monitor window
    double t2 = 1.0;  ///< final time
    double cfl = 0.4;
    std::optional<double> dt;
    BoundaryKind boundary = BoundaryKind::Sommerfeld;
    std::shared_ptr<const Background> background = make_zero_background();
    SourceSpec source;
    std::shared_ptr<const ManufacturedSolution> manufactured;
    InitialData data;
    bool metricToy = false;
    std::vector<MonitorSpec> monitors;
    /// Receives one JSON object per line of the run log.
    std::function<void(const std::string&)> log;
};

struct RunState {
    double t = 0.0;
    GridField phi;
    GridField pi;
    GridField k;     ///< metric toy field (rank 2), empty unless enabled
    GridField kdot;
};

struct RunResult {
    RunState state;
    std::vector<MonitorHistory> histories;  ///< one per monitor
    double dt = 0.0;
    int steps = 0;
    double cfl = 0.0;
};

/// Checks the configuration and returns the CFL-limited step bound.
double max_stable_dt(const RunConfig& cfg);

RunState initial_state(const RunConfig& cfg);

/// g^{ab} d_a d_b Phi as prescribed by the equation at every interior node:
/// the schematic source plus the manufactured source. Rank-1 (or rank-0) field.
GridField build_source(const RunConfig& cfg, const RunState& s);

/// One classical Runge-Kutta step. Throws CFLViolation if dt exceeds the bound.
RunState step(const RunConfig& cfg, const RunState& s, double dt);

/// Evolves from t0 to t2 recording the monitors on [t1, t2].
RunResult run_experiment(const RunConfig& cfg);

/// Monitored slice of one component from the current state.
MonitorSlice monitor_slice(const RunConfig& cfg, const RunState& s, const MonitorSpec& m);

/// Relative L2 error of phi (all components, interior nodes) against an exact field.
double relative_l2_error(const GridField& phi, const std::function<double(const Point&, int)>& exact);

/// Exact solution for plane-wave data on the flat background.
std::function<double(const Point&, int)> plane_wave_exact(const InitialData& d, int rank, int channels);

/// Least-squares slope of -log(err) against log(N).
double convergence_order(const std::vector<int>& N, const std::vector<double>& err);

} // namespace framelab
