#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <vector>

#include "lpmesh/types.hpp"
#include "lpmesh/wire.hpp"

namespace lpmesh {

inline constexpr std::uint8_t kUnreachedHops = 0xFF;

/// One node's local view after the hello flood: who it heard and the best
/// known hop count to the hub.
struct RoutingTable {
    NodeId owner = 0;
    std::uint8_t own_hops = kUnreachedHops; // hub holds 0
    struct Entry {
        NodeId neighbor;
        std::uint8_t hops;
        bool operator==(const Entry&) const = default;
    };
    std::vector<Entry> entries;

    Entry* find(NodeId n) {
        for (auto& e : entries)
            if (e.neighbor == n) return &e;
        return nullptr;
    }
};

/// Folds one hello into the table. Returns true when the node's own hop
/// count strictly improved, i.e. when the hello should be rebroadcast.
inline bool process_hello(RoutingTable& rt, const HelloMessage& hello) {
    if (hello.sender == rt.owner) return false;
    if (auto* e = rt.find(hello.sender)) {
        if (hello.sender_hops < e->hops) e->hops = hello.sender_hops;
    } else {
        rt.entries.push_back({hello.sender, hello.sender_hops});
    }
    if (hello.sender_hops != kUnreachedHops &&
        static_cast<int>(hello.sender_hops) + 1 < static_cast<int>(rt.own_hops)) {
        rt.own_hops = static_cast<std::uint8_t>(hello.sender_hops + 1);
        return true;
    }
    return false;
}

/// The hub's aggregated global view: symmetric adjacency, BFS hop counts and
/// the forwarding tree (parent per node, lowest-id tie break).
struct ConnectivityTable {
    NodeId hub = 0;
    std::vector<NodeId> nodes; // reachable, sorted, includes hub
    std::map<NodeId, std::set<NodeId>> adjacency;
    std::map<NodeId, int> hops;
    std::map<NodeId, NodeId> next_hop; // non-hub -> parent
    std::vector<NodeId> unreachable;   // seen in tables but not reachable from hub

    bool adjacent(NodeId a, NodeId b) const {
        auto it = adjacency.find(a);
        return it != adjacency.end() && it->second.count(b) > 0;
    }

    std::vector<NodeId> children(NodeId parent) const {
        std::vector<NodeId> out;
        for (const auto& [n, p] : next_hop)
            if (p == parent) out.push_back(n);
        return out;
    }
};

inline ConnectivityTable collect_routing_tables(const std::vector<RoutingTable>& tables,
                                                NodeId hub) {
    ConnectivityTable conn;
    conn.hub = hub;

    std::set<NodeId> owners;
    for (const auto& t : tables) {
        if (!owners.insert(t.owner).second)
            throw ScenarioError("duplicate routing table for node " + std::to_string(t.owner));
    }
    if (!owners.count(hub)) throw ScenarioError("hub routing table missing");

    // Symmetrized union: a link reported by either endpoint counts.
    std::map<NodeId, std::set<NodeId>> adj;
    for (const auto& t : tables) adj[t.owner]; // ensure isolated nodes appear
    for (const auto& t : tables) {
        for (const auto& e : t.entries) {
            if (e.neighbor == t.owner || !owners.count(e.neighbor)) continue;
            adj[t.owner].insert(e.neighbor);
            adj[e.neighbor].insert(t.owner);
        }
    }

    // BFS from the hub; neighbor iteration in id order keeps parents and
    // therefore schedules deterministic.
    std::map<NodeId, int> dist;
    dist[hub] = 0;
    std::deque<NodeId> q{hub};
    while (!q.empty()) {
        NodeId u = q.front();
        q.pop_front();
        for (NodeId v : adj[u]) {
            if (!dist.count(v)) {
                dist[v] = dist[u] + 1;
                q.push_back(v);
            }
        }
    }

    for (NodeId n : owners) {
        if (dist.count(n))
            conn.nodes.push_back(n);
        else
            conn.unreachable.push_back(n);
    }
    std::sort(conn.nodes.begin(), conn.nodes.end());
    std::sort(conn.unreachable.begin(), conn.unreachable.end());

    for (NodeId n : conn.nodes) {
        conn.hops[n] = dist[n];
        for (NodeId v : adj[n])
            if (dist.count(v)) conn.adjacency[n].insert(v);
        conn.adjacency[n]; // hub with no neighbors still gets a row
    }
    for (NodeId n : conn.nodes) {
        if (n == hub) continue;
        for (NodeId v : conn.adjacency[n]) { // sets iterate in id order
            if (conn.hops[v] == conn.hops[n] - 1) {
                conn.next_hop[n] = v;
                break;
            }
        }
    }
    return conn;
}

/// Scheduler input: per-node destination, neighborhood, pending packet and
/// pending receive counts (whole subtree drains through each relay).
struct NodeDescriptor {
    NodeId id = 0;
    NodeId dest = 0;
    std::set<NodeId> nbrs;
    int packet = 0;
    int recv = 0;
};

/// Non-hub nodes ordered by descending hop count (ties by ascending id),
/// with packet/recv counts derived from the forwarding tree. own_packets
/// overrides the per-node injection count (default 1 each); short-range
/// bridges own their members' packets too.
inline std::vector<NodeDescriptor> sorted_nodelist(const ConnectivityTable& conn,
                                                   int packets_per_node = 1,
                                                   const std::map<NodeId, int>& own_packets = {}) {
    std::map<NodeId, int> subtree; // packets draining through each node
    auto own = [&](NodeId n) {
        auto it = own_packets.find(n);
        return it != own_packets.end() ? it->second : packets_per_node;
    };
    // children before parents: sort by hops descending
    std::vector<NodeId> order;
    for (NodeId n : conn.nodes)
        if (n != conn.hub) order.push_back(n);
    std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
        int ha = conn.hops.at(a), hb = conn.hops.at(b);
        return ha != hb ? ha > hb : a < b;
    });
    for (NodeId n : order) {
        int total = own(n);
        for (NodeId c : conn.children(n)) total += subtree[c];
        subtree[n] = total;
    }

    std::vector<NodeDescriptor> out;
    for (NodeId n : order) {
        NodeDescriptor d;
        d.id = n;
        d.dest = conn.next_hop.at(n);
        d.nbrs = conn.adjacency.at(n);
        d.packet = own(n); // forwarded packets are accounted as receives land
        d.recv = subtree[n] - own(n);
        out.push_back(std::move(d));
    }
    return out;
}

} // namespace lpmesh
