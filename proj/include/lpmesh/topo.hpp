#pragma once

#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "lpmesh/phy.hpp"
#include "lpmesh/routing.hpp"
#include "lpmesh/scenario.hpp"

namespace lpmesh {

// Static view of the long-range link graph a scenario induces: explicit
// link sets verbatim, or position-derived feasibility at the configured
// transmit power with the link-quality floor applied. The simulated hello
// flood discovers exactly this graph in a clean channel.

inline std::vector<NodeId> lora_node_ids(const Scenario& s) {
    std::set<NodeId> spokes;
    std::set<NodeId> bridges;
    for (const auto& c : s.srsn.clusters) {
        bridges.insert(c.bridge);
        for (NodeId m : c.members)
            if (m != c.bridge) spokes.insert(m);
    }
    std::vector<NodeId> out;
    for (const auto& n : s.nodes) {
        if (n.role == NodeRole::Aloha) continue;
        if (n.role == NodeRole::Srsn && !bridges.count(n.id)) continue;
        if (spokes.count(n.id)) continue;
        out.push_back(n.id);
    }
    return out;
}

inline std::map<NodeId, std::set<NodeId>> static_adjacency(const Scenario& s) {
    auto ids = lora_node_ids(s);
    std::map<NodeId, std::set<NodeId>> adj;
    for (NodeId a : ids) adj[a];
    for (std::size_t i = 0; i < ids.size(); ++i) {
        for (std::size_t j = i + 1; j < ids.size(); ++j) {
            const NodeSpec* na = s.find(ids[i]);
            const NodeSpec* nb = s.find(ids[j]);
            bool edge = false;
            if (!na->links.empty() || !nb->links.empty()) {
                edge = na->links.count(nb->id) > 0 && nb->links.count(na->id) > 0;
            } else if (na->has_pos && nb->has_pos) {
                const double d =
                    std::max(0.1, std::hypot(na->x - nb->x, na->y - nb->y));
                auto rssi_from = [&](const NodeSpec* src) {
                    const int p = src->tx_power_dbm ? *src->tx_power_dbm
                                                    : s.radio.tx_power_dbm;
                    return p - s.channel.reference_loss_db -
                           10.0 * s.channel.path_loss_exponent * std::log10(d);
                };
                const double floor =
                    std::max(s.link_quality_floor_dbm,
                             s.channel.sensitivity_dbm.count(s.radio.sf)
                                 ? s.channel.sensitivity_dbm.at(s.radio.sf)
                                 : s.link_quality_floor_dbm);
                // a link reported by either endpoint survives symmetrization
                edge = rssi_from(na) >= floor || rssi_from(nb) >= floor;
            }
            if (edge) {
                adj[na->id].insert(nb->id);
                adj[nb->id].insert(na->id);
            }
        }
    }
    return adj;
}

inline ConnectivityTable static_connectivity(const Scenario& s) {
    const auto adj = static_adjacency(s);
    std::vector<RoutingTable> tables;
    for (const auto& [id, nbrs] : adj) {
        RoutingTable t;
        t.owner = id;
        t.own_hops = (id == s.hub_id()) ? 0 : kUnreachedHops;
        for (NodeId n : nbrs) t.entries.push_back({n, kUnreachedHops});
        tables.push_back(std::move(t));
    }
    return collect_routing_tables(tables, s.hub_id());
}

inline Schedule static_schedule(const Scenario& s, const ConnectivityTable& conn) {
    std::map<NodeId, int> own;
    for (const auto& c : s.srsn.clusters) {
        if (!conn.hops.count(c.bridge)) continue;
        int members = 0;
        for (NodeId m : c.members)
            if (m != c.bridge) ++members;
        own[c.bridge] = s.traffic.packets_per_node * (1 + members);
    }
    auto nodelist = sorted_nodelist(conn, s.traffic.packets_per_node, own);
    BuildOptions opts;
    opts.hub_uplink = s.traffic.hub_uplink;
    opts.hub_own_packets = s.traffic.packets_per_node;
    opts.slot_duration_ms = s.traffic.slot_ms;
    opts.cycle_period_ms = s.traffic.period_s * 1000.0;
    return build_schedule(nodelist, conn, opts);
}

} // namespace lpmesh
