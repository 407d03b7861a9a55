#pragma once

#include <deque>
#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "lpmesh/routing.hpp"
#include "lpmesh/schedule.hpp"
#include "lpmesh/timesync.hpp"
#include "lpmesh/types.hpp"
#include "lpmesh/wire.hpp"

namespace lpmesh {

enum class Phase { Setup, DataPassing, Sleep };
enum class RadioMode { Off, Sleep, Rx, Tx, AntTx, AntRx };

struct AllParams {
    bool enabled = false;
    double floor_dbm = -120.0;
    double margin_db = 10.0;
    double step_db = 3.0;
    int min_dbm = kTxPowerMinDbm;
    int max_dbm = kTxPowerMaxDbm;
};

/// Complete protocol state of one long-range mesh node.
struct NodeState {
    NodeId id = 0;
    bool is_hub = false;
    bool forward_uplink = false; // hub relays received packets to the gateway
    Phase phase = Phase::Setup;
    RoutingTable routing;
    std::vector<std::pair<int, SlotAction>> schedule_view; // own non-sleep rows
    ClockState clock;
    double battery_mc = 0.0;
    std::deque<DataPacket> queue;
    RadioMode radio_mode = RadioMode::Sleep;
    int tx_power_dbm = 0;
    std::map<NodeId, double> rssi_history; // per-link last observed RSSI
    int missed_downlinks = 0;              // consecutive cycles with a silent child
    std::uint16_t next_seq = 0;
    long long crc_errors = 0;
    long long forwarded = 0;
};

struct EvSlotBoundary {
    int slot;
};
struct EvPacketIn {
    DataPacket packet;
    bool crc_ok;
    double rssi_dbm;
};
struct EvBeaconIn {
    SyncBeacon beacon;
    double t_beacon_ms;
    double t_node_ms;
    double sender_epoch_ms;
};
struct EvCycleStart {
    std::uint32_t cycle;
    int own_payload_bytes;
    bool generate_own = true;
};
struct EvTimer {};

using NodeEvent = std::variant<EvSlotBoundary, EvPacketIn, EvBeaconIn, EvCycleStart, EvTimer>;

struct NodeActions {
    std::optional<DataPacket> transmit; // data frame to send this slot
    NodeId transmit_dest = 0;
    bool open_rx = false;
    bool sleep = false;
    bool rebroadcast_beacon = false;
    bool deliver = false; // packet terminated here (hub)
};

inline const SlotAction* slot_action(const NodeState& st, int slot) {
    for (const auto& [s, a] : st.schedule_view)
        if (s == slot) return &a;
    return nullptr;
}

/// One protocol transition. In the data-passing phase the node does exactly
/// what its schedule rows say: pop and transmit on a send slot, listen on a
/// receive slot, sleep otherwise. Received frames are enqueued for
/// forwarding unless this node is the hub; CRC failures are counted and
/// dropped. A cycle start generates the node's own sensor frame.
inline NodeActions step(NodeState& st, const NodeEvent& event) {
    NodeActions act;
    if (const auto* ev = std::get_if<EvCycleStart>(&event)) {
        st.phase = Phase::DataPassing;
        if (ev->generate_own) {
            std::vector<std::uint8_t> payload(
                static_cast<std::size_t>(
                    std::max(0, ev->own_payload_bytes - static_cast<int>(DataPacket::kHeaderBytes))),
                0xA5);
            st.queue.push_back(DataPacket::make(st.id, st.next_seq++, st.id, std::move(payload)));
        }
        return act;
    }
    if (const auto* ev = std::get_if<EvSlotBoundary>(&event)) {
        const int last = st.schedule_view.empty() ? -1 : st.schedule_view.back().first;
        if (ev->slot > last) st.phase = Phase::Sleep;
        const SlotAction* a = slot_action(st, ev->slot);
        if (!a) {
            act.sleep = true;
            st.radio_mode = RadioMode::Sleep;
            return act;
        }
        if (a->kind == SlotActionKind::Send) {
            if (!st.queue.empty()) {
                act.transmit = st.queue.front();
                act.transmit->hop_src = st.id;
                act.transmit_dest = a->peer;
                st.queue.pop_front();
                st.radio_mode = RadioMode::Tx;
            } else {
                // nothing arrived to forward; stay quiet
                act.sleep = true;
                st.radio_mode = RadioMode::Sleep;
            }
        } else if (a->kind == SlotActionKind::Recv) {
            act.open_rx = true;
            st.radio_mode = RadioMode::Rx;
        }
        return act;
    }
    if (const auto* ev = std::get_if<EvPacketIn>(&event)) {
        if (!ev->crc_ok) {
            st.crc_errors += 1; // counted, never forwarded
            return act;
        }
        st.rssi_history[ev->packet.hop_src] = ev->rssi_dbm;
        if (st.is_hub) {
            act.deliver = true;
            if (st.forward_uplink) st.queue.push_back(ev->packet);
        } else {
            st.queue.push_back(ev->packet);
            st.forwarded += 1;
        }
        return act;
    }
    if (const auto* ev = std::get_if<EvBeaconIn>(&event)) {
        st.clock = apply_sync(st.clock, ev->beacon, ev->t_beacon_ms, ev->t_node_ms,
                              ev->sender_epoch_ms);
        act.rebroadcast_beacon = ev->beacon.hops + 1 < kMaxBeaconHops;
        return act;
    }
    return act;
}

/// Transmit-power controller for the adaptive link: step down while the next
/// step still clears floor+margin, step up when the link falls below the
/// floor, hold inside the band. Monotone approach, no steady-state
/// oscillation for step <= margin.
inline void adapt_tx_power(NodeState& st, double last_rssi_dbm, const AllParams& p) {
    if (!p.enabled) return;
    double next = st.tx_power_dbm;
    if (last_rssi_dbm - p.step_db >= p.floor_dbm + p.margin_db)
        next -= p.step_db;
    else if (last_rssi_dbm < p.floor_dbm)
        next += p.step_db;
    if (next < p.min_dbm) next = p.min_dbm;
    if (next > p.max_dbm) next = p.max_dbm;
    st.tx_power_dbm = static_cast<int>(next);
}

} // namespace lpmesh
