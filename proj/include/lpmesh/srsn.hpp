#pragma once

#include <map>
#include <optional>
#include <vector>

#include "lpmesh/types.hpp"

namespace lpmesh {

/// Short-range star cluster: one hub (channel master) polling spokes over
/// the 2.4 GHz radio, bridging the aggregate into the long-range mesh.
struct SrsnState {
    struct Member {
        NodeId id;
        double battery_frac; // fraction of initial charge remaining
    };
    std::vector<Member> members; // hub included
    NodeId hub = 0;
    double poll_period_ms = 600000.0;
    double timer_multiplier = 5.0;
    double ams_threshold = 0.2;

    double failure_timer_ms() const { return timer_multiplier * poll_period_ms; }
};

/// Highest battery wins; equal batteries fall to the lowest id.
inline NodeId elect_hub(const std::vector<SrsnState::Member>& members) {
    if (members.empty()) throw std::domain_error("cannot elect a hub from an empty cluster");
    const SrsnState::Member* best = &members.front();
    for (const auto& m : members) {
        if (m.battery_frac > best->battery_frac ||
            (m.battery_frac == best->battery_frac && m.id < best->id))
            best = &m;
    }
    return best->id;
}

struct AmsHandoff {
    NodeId from;
    NodeId to;
};

/// Battery-driven hub rotation. When the hub drains below the threshold the
/// best-charged member takes over; the old hub becomes a spoke.
inline std::optional<AmsHandoff> ams_step(SrsnState& state,
                                          const std::map<NodeId, double>& battery_readings) {
    for (auto& m : state.members) {
        auto it = battery_readings.find(m.id);
        if (it != battery_readings.end()) m.battery_frac = it->second;
    }
    double hub_level = -1.0;
    for (const auto& m : state.members)
        if (m.id == state.hub) hub_level = m.battery_frac;
    if (hub_level >= state.ams_threshold) return std::nullopt;
    NodeId next = elect_hub(state.members);
    if (next == state.hub) return std::nullopt;
    AmsHandoff h{state.hub, next};
    state.hub = next;
    return h;
}

enum class SrsnVerdict { Normal, Reinitialize };

/// Spoke-side failure detection: a hub silent past timer_multiplier poll
/// periods forces a cluster re-formation.
inline SrsnVerdict failure_timer_step(const SrsnState& state,
                                      const std::map<NodeId, double>& last_upload_ms,
                                      double now_ms) {
    for (const auto& m : state.members) {
        if (m.id == state.hub) continue;
        auto it = last_upload_ms.find(m.id);
        if (it == last_upload_ms.end()) continue;
        if (now_ms - it->second > state.failure_timer_ms()) return SrsnVerdict::Reinitialize;
    }
    return SrsnVerdict::Normal;
}

} // namespace lpmesh
