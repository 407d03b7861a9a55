#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "lpmesh/phy.hpp"
#include "lpmesh/trace.hpp"
#include "lpmesh/types.hpp"

namespace lpmesh {

struct NodeMetrics {
    std::string role;
    long long expected = 0;
    long long received = 0; // includes CRC-errored arrivals under the default convention
    long long errored = 0;
    long long missed = 0;
    double pdr = 0.0, per = 0.0, pmr = 0.0;
    double avg_current_ua = 0.0;
    double projected_life_years = 0.0;
    double battery_mah = 0.0;
};

/// Post-hoc summary of one trace: per-node delivery/error/miss rates, daily
/// totals, per-node average current and projected battery life.
struct MetricsReport {
    std::string scenario;
    std::uint64_t seed = 0;
    std::string config_hash;
    double period_ms = 0.0;
    double cycle0_ms = 0.0;
    int cycles = 0;
    bool count_errored_as_received = true;
    std::map<NodeId, NodeMetrics> per_node;
    std::map<int, double> per_day; // day index -> Total_PDR
    long long collisions = 0;
    long long missed_windows = 0;
};

inline double pdr(long long received, long long expected) {
    if (expected <= 0) throw std::domain_error("PDR undefined for zero expected packets");
    return static_cast<double>(received) / static_cast<double>(expected);
}

inline double per(long long errored, long long expected) {
    if (expected <= 0) throw std::domain_error("PER undefined for zero expected packets");
    return static_cast<double>(errored) / static_cast<double>(expected);
}

inline double pmr(long long expected, long long received) {
    if (expected <= 0) throw std::domain_error("PMR undefined for zero expected packets");
    if (received > expected) throw std::domain_error("received exceeds expected");
    return static_cast<double>(expected - received) / static_cast<double>(expected);
}

/// Rates from a replayed trace. CRC-errored arrivals at the terminus count
/// as received (and as errored) under the default convention, which makes
/// pdr + pmr = 1 hold on every report; pass count_errored_as_received=false
/// for the strict reading.
inline MetricsReport compute_metrics(const EventTrace& trace,
                                     bool count_errored_as_received = true) {
    MetricsReport rep;
    rep.count_errored_as_received = count_errored_as_received;

    NodeId hub = 0;
    bool hub_uplink = false;
    double period_ms = 0, cycle0_ms = 0, aloha_period_ms = 0;
    int cycles = 0, ppn = 1;
    std::map<NodeId, std::string> roles;
    std::map<NodeId, double> battery;
    std::map<NodeId, long long> rx_ok_n, rx_err_n, aloha_tx;
    struct Acc {
        double mc = 0.0;
    };
    std::map<NodeId, Acc> charge; // windowed below
    std::map<int, std::pair<long long, long long>> day_counts; // day -> (received, expected)

    // pass 1: metadata
    for (const auto& r : trace.records) {
        if (r.event != ev::meta) continue;
        const std::string key = detail_get(r.detail, "key");
        if (key == "scenario") {
            rep.scenario = detail_get(r.detail, "name");
            rep.seed = std::stoull(detail_get(r.detail, "seed"));
            rep.config_hash = detail_get(r.detail, "hash");
            period_ms = std::stod(detail_get(r.detail, "period_ms"));
            cycle0_ms = std::stod(detail_get(r.detail, "cycle0_ms"));
            cycles = std::stoi(detail_get(r.detail, "cycles"));
            ppn = std::stoi(detail_get(r.detail, "ppn"));
            aloha_period_ms = std::stod(detail_get(r.detail, "aloha_period_ms"));
            hub = static_cast<NodeId>(std::stoul(detail_get(r.detail, "hub")));
            hub_uplink = detail_get(r.detail, "uplink") == "1";
        } else if (key == "node") {
            roles[r.node] = detail_get(r.detail, "role");
            battery[r.node] = std::stod(detail_get(r.detail, "battery_mah"));
        }
    }
    if (roles.empty()) throw ScenarioError("trace carries no node metadata");
    rep.period_ms = period_ms;
    rep.cycle0_ms = cycle0_ms;
    rep.cycles = cycles;
    const double t_begin = cycle0_ms;
    const double t_end = cycle0_ms + static_cast<double>(cycles) * period_ms;

    // pass 2: events
    for (const auto& r : trace.records) {
        if (r.event == ev::collision) {
            rep.collisions += 1;
        } else if (r.event == ev::rx_missed) {
            if (detail_get(r.detail, "reason") == "window") rep.missed_windows += 1;
        } else if (r.event == ev::rx_ok || r.event == ev::rx_crc_error) {
            if (detail_get(r.detail, "kind") != "data") continue;
            const bool at_hub = (r.node == hub);
            const bool at_gateway = (r.node == kGatewayId);
            if (!at_hub && !at_gateway) continue; // relay hop, not a terminus
            const NodeId origin =
                static_cast<NodeId>(std::stoul(detail_get(r.detail, "origin")));
            // mesh data terminates at the hub; uplink and reference traffic
            // at the gateway listener
            const std::string& role = roles[origin];
            const bool gateway_origin = (role == "aloha" || origin == hub);
            if (at_gateway != gateway_origin) continue;
            if (r.event == ev::rx_ok) {
                rx_ok_n[origin] += 1;
            } else {
                rx_err_n[origin] += 1;
            }
            const int day = static_cast<int>(std::floor(r.t_ms / 86400000.0));
            if (!gateway_origin) {
                const bool counted =
                    (r.event == ev::rx_ok) || count_errored_as_received;
                if (counted) day_counts[day].first += 1;
            }
        } else if (r.event == ev::tx_start) {
            if (roles[r.node] == "aloha" && detail_get(r.detail, "kind") == "data")
                aloha_tx[r.node] += 1;
        } else if (r.event == ev::energy_delta_mc) {
            const double t0 = std::stod(detail_get(r.detail, "t0"));
            const double t1 = std::stod(detail_get(r.detail, "t1"));
            const double mc = std::stod(detail_get(r.detail, "mc"));
            if (t1 <= t0) continue;
            const double lo = std::max(t0, t_begin), hi = std::min(t1, t_end);
            if (hi > lo) charge[r.node].mc += mc * (hi - lo) / (t1 - t0);
        }
    }

    // expected packets per day (cycle starts falling into each day bin)
    long long mesh_origins = 0;
    for (const auto& [id, role] : roles)
        if (role == "mesh" || role == "srsn") mesh_origins += 1;
    for (int k = 0; k < cycles; ++k) {
        const int day = static_cast<int>(std::floor((cycle0_ms + k * period_ms) / 86400000.0));
        day_counts[day].second += mesh_origins * ppn;
    }

    for (const auto& [id, role] : roles) {
        NodeMetrics m;
        m.role = role;
        m.battery_mah = battery[id];
        if (role == "aloha") {
            m.expected = aloha_tx[id];
        } else if (id == hub) {
            // the hub's own data is only observable on the gateway uplink
            m.expected = hub_uplink ? static_cast<long long>(cycles) * ppn : 0;
        } else {
            m.expected = static_cast<long long>(cycles) * ppn;
        }
        m.errored = rx_err_n[id];
        m.received = rx_ok_n[id] + (count_errored_as_received ? m.errored : 0);
        if (m.received > m.expected)
            throw ScenarioError("node " + std::to_string(id) +
                                ": received exceeds expected; inconsistent trace");
        m.missed = m.expected - m.received;
        if (m.expected > 0) {
            m.pdr = pdr(m.received, m.expected);
            m.per = per(m.errored, m.expected);
            m.pmr = pmr(m.expected, m.received);
        }
        const double window_s = (t_end - t_begin) / 1000.0;
        if (window_s > 0) m.avg_current_ua = charge[id].mc / window_s * 1000.0;
        m.projected_life_years =
            m.avg_current_ua > 0 ? battery_life_years(m.avg_current_ua, m.battery_mah)
                                 : std::numeric_limits<double>::infinity();
        rep.per_node[id] = m;
    }
    for (const auto& [day, counts] : day_counts) {
        if (counts.second > 0)
            rep.per_day[day] =
                static_cast<double>(counts.first) / static_cast<double>(counts.second);
    }
    (void)aloha_period_ms;
    return rep;
}

inline std::string metrics_to_json(const MetricsReport& rep) {
    nlohmann::ordered_json j;
    j["scenario"] = rep.scenario;
    j["seed"] = rep.seed;
    j["config_hash"] = rep.config_hash;
    j["cycles"] = rep.cycles;
    j["period_ms"] = rep.period_ms;
    j["errored_packets_count_as_received"] = rep.count_errored_as_received;
    j["collisions"] = rep.collisions;
    j["missed_windows"] = rep.missed_windows;
    nlohmann::ordered_json nodes;
    for (const auto& [id, m] : rep.per_node) {
        nlohmann::ordered_json n;
        n["role"] = m.role;
        n["expected"] = m.expected;
        n["received"] = m.received;
        n["errored"] = m.errored;
        n["missed"] = m.missed;
        n["pdr"] = m.pdr;
        n["per"] = m.per;
        n["pmr"] = m.pmr;
        n["avg_current_ua"] = m.avg_current_ua;
        n["projected_life_years"] =
            std::isinf(m.projected_life_years) ? -1.0 : m.projected_life_years;
        nodes[std::to_string(id)] = n;
    }
    j["per_node"] = nodes;
    nlohmann::ordered_json days;
    for (const auto& [d, v] : rep.per_day) days[std::to_string(d)] = v;
    j["per_day_total_pdr"] = days;
    return j.dump(2) + "\n";
}

inline std::string metrics_to_text(const MetricsReport& rep) {
    std::ostringstream os;
    char buf[256];
    os << "scenario " << rep.scenario << "  seed " << rep.seed << "  cycles " << rep.cycles
       << "\n";
    os << "counting: CRC-errored arrivals "
       << (rep.count_errored_as_received ? "count" : "do not count") << " as received\n";
    os << "collisions " << rep.collisions << "  missed_windows " << rep.missed_windows
       << "\n\n";
    os << "node  role   expected  received  errored  missed     PDR     PER     PMR   "
          "I_avg(uA)  life(y)\n";
    for (const auto& [id, m] : rep.per_node) {
        std::snprintf(buf, sizeof(buf),
                      "%-5u %-6s %8lld  %8lld  %7lld  %6lld  %6.4f  %6.4f  %6.4f  %9.2f  %7.2f\n",
                      id, m.role.c_str(), m.expected, m.received, m.errored, m.missed, m.pdr,
                      m.per, m.pmr, m.avg_current_ua,
                      std::isinf(m.projected_life_years) ? 0.0 : m.projected_life_years);
        os << buf;
    }
    os << "\nday  total_pdr\n";
    for (const auto& [d, v] : rep.per_day) {
        std::snprintf(buf, sizeof(buf), "%-4d %.4f\n", d, v);
        os << buf;
    }
    return os.str();
}

inline std::string per_day_csv(const MetricsReport& rep) {
    std::ostringstream os;
    os << "day,total_pdr\n";
    char buf[64];
    for (const auto& [d, v] : rep.per_day) {
        std::snprintf(buf, sizeof(buf), "%d,%.6f\n", d, v);
        os << buf;
    }
    return os.str();
}

} // namespace lpmesh
