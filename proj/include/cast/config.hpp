#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "cast/latency.hpp"
#include "cast/montecarlo.hpp"

namespace cast {

// Malformed or inconsistent configuration; maps to exit status 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

struct LatencyRun {
    std::vector<std::string> patterns{"DSUDDDDDDD", "DSUUDDDDDD"};
    std::vector<int> m{128};
    bool calibrate = false;
    CalibrationTargets targets;
};

struct RunConfig {
    ExperimentConfig experiment;
    LatencyRun latency;
    nlohmann::json snapshot;  // the tree as loaded, overrides applied by the caller
};

// Accepts either a plain config tree or a run manifest (its "config" member).
RunConfig parse_config(const std::string& text, const std::string& source);
RunConfig load_config(const std::string& path);

LatencyCalibration parse_latency_calibration(const nlohmann::json& j,
                                             const LatencyCalibration& base = {});

}  // namespace cast
