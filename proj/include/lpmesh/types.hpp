#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lpmesh {

using NodeId = std::uint16_t;

// Reserved id for the always-listening receiver co-located with the hub.
// Scenario node ids start at 1.
inline constexpr NodeId kGatewayId = 0;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SchedulingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, int line)
        : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_no(line) {}
    int line_no;
};

} // namespace lpmesh
