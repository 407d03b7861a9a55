#pragma once

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lpmesh/routing.hpp"
#include "lpmesh/types.hpp"

namespace lpmesh {

enum class SlotActionKind { Send, Recv, Sleep };

struct SlotAction {
    SlotActionKind kind = SlotActionKind::Sleep;
    NodeId peer = 0;            // Send: destination (kGatewayId for the uplink)
    std::set<NodeId> sources;   // Recv: expected sender(s)
    bool operator==(const SlotAction&) const = default;
};

/// Per-node, per-timeslot action matrix. Every scheduled node appears in
/// every slot with exactly one action.
struct Schedule {
    NodeId hub = 0;
    std::vector<NodeId> nodes; // sorted
    std::vector<std::map<NodeId, SlotAction>> slots;
    double slot_duration_ms = 125.0;
    double cycle_period_ms = 600000.0;
    int hub_uplink_slots = 0; // trailing hub->gateway sends included in slots

    const SlotAction& action(int slot, NodeId n) const { return slots.at(slot).at(n); }

    std::vector<std::pair<int, SlotAction>> rows_for(NodeId n) const {
        std::vector<std::pair<int, SlotAction>> out;
        for (std::size_t s = 0; s < slots.size(); ++s) {
            auto it = slots[s].find(n);
            if (it != slots[s].end() && it->second.kind != SlotActionKind::Sleep)
                out.emplace_back(static_cast<int>(s), it->second);
        }
        return out;
    }
};

struct BuildOptions {
    bool hub_uplink = true;     // trailing hub->gateway slots
    int hub_own_packets = 1;    // hub's own data rides the uplink
    double slot_duration_ms = 125.0;
    double cycle_period_ms = 600000.0;
};

/// Greedy collision-free slot packing. Scans the hop-sorted nodelist once
/// per slot; a node sends when it has no pending receives, still holds
/// packets, and neither it nor its destination conflicts with transmissions
/// already placed in the slot. The destination's neighborhood joins the
/// send-collision list, the sender's neighborhood joins the
/// receive-collision list. Loops until a slot comes out empty.
inline Schedule build_schedule(std::vector<NodeDescriptor> nodelist,
                               const ConnectivityTable& conn, const BuildOptions& opts = {}) {
    Schedule sched;
    sched.hub = conn.hub;
    sched.nodes = conn.nodes;
    sched.slot_duration_ms = opts.slot_duration_ms;
    sched.cycle_period_ms = opts.cycle_period_ms;

    for (const auto& d : nodelist) {
        if (d.id != conn.hub && !d.nbrs.count(d.dest))
            throw SchedulingError("descriptor " + std::to_string(d.id) +
                                  " routes to a non-neighbor");
    }

    int hub_pending = opts.hub_uplink ? opts.hub_own_packets : 0;

    while (true) {
        std::map<NodeId, SlotAction> slot;
        std::set<NodeId> send_coll, recv_coll;
        bool placed_any = false;

        for (auto& node : nodelist) {
            if (node.packet <= 0) continue;
            if (node.recv != 0) continue;
            if (send_coll.count(node.id) || recv_coll.count(node.id)) continue;
            if (recv_coll.count(node.dest)) continue;

            slot[node.id] = {SlotActionKind::Send, node.dest, {}};
            auto& dst = slot[node.dest];
            dst.kind = SlotActionKind::Recv;
            dst.sources.insert(node.id);

            const auto& dest_nbrs = conn.adjacency.at(node.dest);
            send_coll.insert(dest_nbrs.begin(), dest_nbrs.end());
            send_coll.insert(node.dest);
            const auto& own_nbrs = conn.adjacency.at(node.id);
            recv_coll.insert(own_nbrs.begin(), own_nbrs.end());

            for (auto& other : nodelist) {
                if (other.id == node.dest) {
                    other.recv -= 1;
                    other.packet += 1; // forwarded packet now pending at the relay
                    break;
                }
            }
            if (node.dest == conn.hub && opts.hub_uplink) hub_pending += 1;
            node.packet -= 1;
            placed_any = true;
        }
        if (!placed_any) break;
        sched.slots.push_back(std::move(slot));
        if (sched.slots.size() > 4096)
            throw SchedulingError("schedule did not converge (malformed tree?)");
    }
    for (const auto& d : nodelist)
        if (d.packet != 0 || d.recv != 0)
            throw SchedulingError("pending packets remain after scheduling at node " +
                                  std::to_string(d.id));

    // Hub uplink to the gateway: ordinary send slots at the tail, one per
    // pending packet (forwarded + own).
    for (int i = 0; i < hub_pending && opts.hub_uplink; ++i) {
        std::map<NodeId, SlotAction> slot;
        slot[sched.hub] = {SlotActionKind::Send, kGatewayId, {}};
        sched.slots.push_back(std::move(slot));
        sched.hub_uplink_slots += 1;
    }

    // Fill every remaining (slot, node) cell with Sleep.
    for (auto& slot : sched.slots)
        for (NodeId n : sched.nodes)
            if (!slot.count(n)) slot[n] = {};
    return sched;
}

/// Packet count after fragmentation to the transmit-buffer limit.
inline int fragment_packets(long long total_bytes, int max_packet_bytes) {
    if (max_packet_bytes <= 0) throw std::domain_error("packet size limit must be positive");
    if (total_bytes < 0) throw std::domain_error("negative byte count");
    return static_cast<int>((total_bytes + max_packet_bytes - 1) / max_packet_bytes);
}

struct ValidationReport {
    std::vector<std::string> violations;
    bool delivered_all = false;
    long long total_injected = 0;
    long long hub_received = 0;
    long long send_slots = 0;
    bool ok() const { return violations.empty() && delivered_all; }
};

/// Independent contract check for a schedule: per-slot collision freedom
/// under one-hop interference, per-node packet conservation, and full
/// drainage into the hub. Deliberately simulates queues rather than reusing
/// any scheduler state.
inline ValidationReport validate_schedule(const Schedule& s, const ConnectivityTable& conn,
                                          int packets_per_node = 1,
                                          const std::map<NodeId, int>& own_packets = {}) {
    ValidationReport rep;
    auto violate = [&](const std::string& v) { rep.violations.push_back(v); };

    std::map<NodeId, long long> queue;
    auto own = [&](NodeId n) {
        auto it = own_packets.find(n);
        return it != own_packets.end() ? it->second : packets_per_node;
    };
    for (NodeId n : conn.nodes) {
        if (n == conn.hub) continue;
        queue[n] = own(n);
        rep.total_injected += own(n);
    }
    long long hub_queue = own(conn.hub);

    for (std::size_t si = 0; si < s.slots.size(); ++si) {
        const auto& slot = s.slots[si];
        if (slot.size() != s.nodes.size())
            violate("slot " + std::to_string(si) + ": not every node has an action");
        std::vector<std::pair<NodeId, NodeId>> sends; // sender -> dest
        for (const auto& [n, act] : slot) {
            if (act.kind == SlotActionKind::Send) sends.emplace_back(n, act.peer);
        }
        for (const auto& [snd, dst] : sends) {
            for (const auto& [snd2, dst2] : sends) {
                if (snd2 == snd) continue;
                if (dst2 == dst && dst != kGatewayId)
                    violate("slot " + std::to_string(si) + ": senders " + std::to_string(snd) +
                            " and " + std::to_string(snd2) + " share destination " +
                            std::to_string(dst));
                // a receiver inside another sender's range is jammed
                if (dst != kGatewayId && conn.adjacent(snd2, dst))
                    violate("slot " + std::to_string(si) + ": receiver " + std::to_string(dst) +
                            " within range of concurrent sender " + std::to_string(snd2));
                if (snd2 == dst)
                    violate("slot " + std::to_string(si) + ": node " + std::to_string(dst) +
                            " sends and receives simultaneously");
            }
            if (dst != kGatewayId) {
                auto it = slot.find(dst);
                if (it == slot.end() || it->second.kind != SlotActionKind::Recv ||
                    !it->second.sources.count(snd))
                    violate("slot " + std::to_string(si) + ": send from " + std::to_string(snd) +
                            " has no matching receive at " + std::to_string(dst));
            }
            // queue bookkeeping
            rep.send_slots += 1;
            if (snd == conn.hub) {
                if (hub_queue <= 0)
                    violate("slot " + std::to_string(si) + ": hub uplink with empty queue");
                else
                    hub_queue -= 1;
            } else {
                if (queue[snd] <= 0)
                    violate("slot " + std::to_string(si) + ": node " + std::to_string(snd) +
                            " scheduled to send with empty queue");
                else
                    queue[snd] -= 1;
                if (dst == conn.hub) {
                    rep.hub_received += 1;
                    hub_queue += 1;
                } else if (dst != kGatewayId) {
                    queue[dst] += 1;
                }
            }
        }
    }

    for (const auto& [n, q] : queue) {
        if (q != 0)
            violate("node " + std::to_string(n) + " ends with " + std::to_string(q) +
                    " undelivered packets");
    }
    rep.delivered_all = (rep.hub_received == rep.total_injected);
    if (!rep.delivered_all)
        violate("hub received " + std::to_string(rep.hub_received) + " of " +
                std::to_string(rep.total_injected) + " injected packets");
    return rep;
}

/// Plain-text matrix, rows = nodes, columns = timeslots.
inline std::string format_schedule_text(const Schedule& s) {
    std::ostringstream os;
    os << "Node/Timeslot";
    for (std::size_t i = 1; i <= s.slots.size(); ++i) os << "\t" << i;
    os << "\n";
    for (NodeId n : s.nodes) {
        os << n;
        for (const auto& slot : s.slots) {
            const auto& a = slot.at(n);
            switch (a.kind) {
            case SlotActionKind::Send:
                if (a.peer == kGatewayId)
                    os << "\tTx->GW";
                else
                    os << "\tTx->" << a.peer;
                break;
            case SlotActionKind::Recv: os << "\tRx"; break;
            case SlotActionKind::Sleep: os << "\tSleep"; break;
            }
        }
        os << "\n";
    }
    return os.str();
}

} // namespace lpmesh
