#pragma once

#include <cmath>
#include <utility>

#include "lpmesh/phy.hpp"
#include "lpmesh/rng.hpp"
#include "lpmesh/wire.hpp"

namespace lpmesh {

/// A node's notion of network time. local_time_ms is the estimate set by the
/// most recent beacon correction.
struct ClockState {
    double local_time_ms = 0.0;
    double drift_ppm = 0.0;
    double last_sync_ms = 0.0;
    double guard_ms = 5.0;
};

/// Sub-symbol retransmission delay keeps concurrent rebroadcasts from
/// starting at the exact same instant. Ticks are 32 us.
inline SyncBeacon make_beacon(NodeId source, std::uint8_t hops, const RadioConfig& cfg,
                              Rng& rng) {
    validate(cfg);
    const double tsym_ms = symbol_time_ms(cfg);
    const auto ticks = static_cast<std::uint32_t>(std::floor(tsym_ms / kDelayTickMs));
    return SyncBeacon{source, hops, static_cast<std::uint16_t>(rng.uniform_u32(ticks))};
}

inline double beacon_delay_ms(const SyncBeacon& b) { return b.delay_ticks * kDelayTickMs; }

inline constexpr int kMaxBeaconHops = 32;

/// Clock correction on beacon receipt. The elapsed time since the sender's
/// own sync instant is T_beacon + T_node + T_delay; the receiver's clock
/// becomes the sender's epoch plus that. Beacons with an absurd hop count
/// are ignored.
inline ClockState apply_sync(ClockState clock, const SyncBeacon& beacon, double t_beacon_ms,
                             double t_node_ms, double sender_epoch_ms = 0.0) {
    if (beacon.hops >= kMaxBeaconHops) return clock;
    const double t_past = t_beacon_ms + t_node_ms + beacon_delay_ms(beacon);
    clock.local_time_ms = sender_epoch_ms + t_past;
    clock.last_sync_ms = clock.local_time_ms;
    return clock;
}

/// Receive window expanded by the guard on both sides.
inline std::pair<double, double> rx_window(const ClockState& clock, double nominal_start_ms,
                                           double nominal_len_ms) {
    return {nominal_start_ms - clock.guard_ms, nominal_len_ms + 2.0 * clock.guard_ms};
}

} // namespace lpmesh
