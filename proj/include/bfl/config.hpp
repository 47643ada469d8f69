#pragma once

#include "bfl/evolution.hpp"
#include "bfl/experiments.hpp"
#include "bfl/grid.hpp"
#include "bfl/params.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bfl {
namespace config {

/// Truncated Fourier description of one initial field:
/// f = offset + sum_k sin[k-1]*sin(2 pi k x / Lx) + cos[k-1]*cos(2 pi k x / Lx)
///            + the analogous y-series in two dimensions.
struct FourierField {
    double offset = 1.0;
    std::vector<double> sin_x;
    std::vector<double> cos_x;
    std::vector<double> sin_y;
    std::vector<double> cos_y;
};

struct RunConfig {
    ModelParams params;

    int dim = 1;
    std::array<int, 2> n = {128, 128};
    std::array<double, 2> length = {2 * 3.14159265358979323846, 1.0};

    evolution::TimeStepConfig time; // time.dt <= 0 means automatic

    FourierField rho0;
    FourierField theta0;

    int snapshot_cadence = 0; // 0: only the final snapshot
    std::string output_dir = "out";

    std::uint64_t seed = 0;

    Grid grid() const {
        return dim == 1 ? Grid(n[0], length[0]) : Grid(n[0], n[1], length[0], length[1]);
    }
};

/// All schema/physics violations found in one parse, not just the first.
struct ConfigError : std::runtime_error {
    std::vector<std::string> errors;
    explicit ConfigError(std::vector<std::string> errs);
};

/// Parse and fully validate a JSON configuration document. Unknown keys are
/// rejected; every violated constraint is reported. See README for the
/// schema and defaults.
RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);

/// Analytic evaluator of a Fourier field spec on the configured domain.
experiments::FieldFn field_evaluator(const FourierField& f, const RunConfig& cfg);

/// Sample the initial fields on the configured grid.
ScalarField build_field(const FourierField& f, const RunConfig& cfg);

/// Scenario view of the configuration (for sweeps and probes).
experiments::Scenario to_scenario(const RunConfig& cfg);

} // namespace config
} // namespace bfl
