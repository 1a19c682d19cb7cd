#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace cast {

inline constexpr const char* kToolVersion = "1.0.0";

struct CliOptions {
    std::string config;
    std::string config_dir;  // where bundled names like "fig6" are looked up
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::string out_dir = ".";
    int threads = 0;
};

// Exit status: 0 ok, 1 runtime failure, 2 configuration error.
int cmd_simulate(const CliOptions& opt, std::ostream& out, std::ostream& err);
int cmd_bound(const CliOptions& opt, std::ostream& out, std::ostream& err);
int cmd_latency(const CliOptions& opt, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv, const std::string& config_dir);

}  // namespace cast
