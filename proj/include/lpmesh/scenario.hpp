#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lpmesh/node.hpp"
#include "lpmesh/phy.hpp"
#include "lpmesh/types.hpp"

namespace lpmesh {

enum class NodeRole { Hub, Mesh, Srsn, Aloha };

inline const char* role_name(NodeRole r) {
    switch (r) {
    case NodeRole::Hub: return "hub";
    case NodeRole::Mesh: return "mesh";
    case NodeRole::Srsn: return "srsn";
    case NodeRole::Aloha: return "aloha";
    }
    return "?";
}

struct NodeSpec {
    NodeId id = 0;
    NodeRole role = NodeRole::Mesh;
    bool has_pos = false;
    double x = 0.0, y = 0.0;
    std::set<NodeId> links; // explicit adjacency override
    double battery_mah = 2500.0;
    std::optional<int> tx_power_dbm;

    bool operator==(const NodeSpec&) const = default;
};

struct SrsnCluster {
    NodeId bridge = 0;
    std::vector<NodeId> members;
    bool operator==(const SrsnCluster&) const = default;
};

struct FaultSpec {
    enum class Action { Kill, Revive };
    double t_s = 0.0;
    Action action = Action::Kill;
    NodeId node = 0;
    bool operator==(const FaultSpec&) const = default;
};

struct TrafficConfig {
    double period_s = 600.0;
    int cycles = 10;
    int payload_bytes = 64; // whole frame, header included
    int packets_per_node = 1;
    bool hub_uplink = true;
    double slot_ms = 125.0;
    double aloha_period_s = 60.0;
    int aloha_payload_bytes = 64;
    int aloha_sf = 12;
    int reset_after_silent_cycles = 1; // 0 disables failure resets
    int expected_hub_uplink_slots = -1; // reference annotation, -1 = none

    bool operator==(const TrafficConfig&) const = default;
};

struct SyncConfig {
    double guard_ms = 5.0;
    double t_node_ms = 2.0;
    double t_node_jitter_ms = 0.0;
    double drift_ppm_band = 0.0;
    double sync_window_ms = 1000.0;
    double setup_slot_ms = 60.0;
    int hello_rounds = 0; // 0 = one round per node

    bool operator==(const SyncConfig&) const = default;
};

struct SrsnConfig {
    std::vector<SrsnCluster> clusters;
    double poll_period_s = 0.0; // 0 = once per TDMA cycle
    double timer_multiplier = 5.0;
    double ams_threshold = 0.2;
    bool ams = true;

    bool operator==(const SrsnConfig&) const = default;
};

/// Complete description of one reproducible run.
struct Scenario {
    std::string name = "scenario";
    std::uint64_t seed = 1;
    RadioConfig radio;
    PowerProfile power;
    AllParams all;
    ChannelModel channel;
    double link_gain_db = -100.0;          // RSSI = P_tx + gain on explicit links
    double link_quality_floor_dbm = -120.0; // links below this are not used
    std::vector<NodeSpec> nodes;
    TrafficConfig traffic;
    SyncConfig sync;
    SrsnConfig srsn;
    std::vector<FaultSpec> faults;

    const NodeSpec* find(NodeId id) const {
        for (const auto& n : nodes)
            if (n.id == id) return &n;
        return nullptr;
    }
    NodeId hub_id() const {
        for (const auto& n : nodes)
            if (n.role == NodeRole::Hub) return n.id;
        throw ScenarioError("scenario has no hub node");
    }
    double duration_ms() const { return traffic.cycles * traffic.period_s * 1000.0; }
    double poll_period_ms() const {
        return srsn.poll_period_s > 0 ? srsn.poll_period_s * 1000.0
                                      : traffic.period_s * 1000.0;
    }
};

void validate(const Scenario& s); // defined below

// ---------------------------------------------------------------------------
// parsing

namespace cfgdet {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t end = s.find(sep, pos);
        if (end == std::string::npos) end = s.size();
        out.push_back(trim(s.substr(pos, end - pos)));
        pos = end + 1;
    }
    return out;
}

inline double to_double(const std::string& v, int line) {
    try {
        std::size_t used = 0;
        double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ParseError("expected a number, got '" + v + "'", line);
    }
}

inline long long to_int(const std::string& v, int line) {
    try {
        std::size_t used = 0;
        long long d = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ParseError("expected an integer, got '" + v + "'", line);
    }
}

inline bool to_bool(const std::string& v, int line) {
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    throw ParseError("expected on/off, got '" + v + "'", line);
}

inline std::string fmt_num(double v) {
    if (v == static_cast<long long>(v) && std::abs(v) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(v));
        return buf;
    }
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

} // namespace cfgdet

inline Scenario parse_scenario(const std::string& text, const std::string& name = "scenario") {
    using namespace cfgdet;
    Scenario s;
    s.name = name;
    static const std::set<std::string> kSections = {"nodes", "radio",   "channel", "traffic",
                                                    "faults", "srsn",   "sync",    "seed"};
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string l = raw;
        std::size_t hash = l.find('#');
        if (hash != std::string::npos) l = l.substr(0, hash);
        l = trim(l);
        if (l.empty()) continue;
        if (l.front() == '[') {
            if (l.back() != ']') throw ParseError("unterminated section header", line);
            section = l.substr(1, l.size() - 2);
            if (!kSections.count(section))
                throw ParseError("unknown section [" + section + "]", line);
            continue;
        }
        std::size_t eq = l.find('=');
        if (eq == std::string::npos) throw ParseError("expected key = value", line);
        std::string key = trim(l.substr(0, eq));
        std::string val = trim(l.substr(eq + 1));
        if (section.empty()) throw ParseError("key outside any section", line);

        if (section == "seed") {
            if (key == "seed")
                s.seed = static_cast<std::uint64_t>(to_int(val, line));
            else
                throw ParseError("unknown key '" + key + "' in [seed]", line);
        } else if (section == "radio") {
            if (key == "sf") s.radio.sf = static_cast<int>(to_int(val, line));
            else if (key == "bw_hz") s.radio.bw_hz = static_cast<int>(to_int(val, line));
            else if (key == "cr") s.radio.cr = static_cast<int>(to_int(val, line));
            else if (key == "preamble_symbols")
                s.radio.preamble_symbols = static_cast<int>(to_int(val, line));
            else if (key == "crc") s.radio.crc_on = to_bool(val, line);
            else if (key == "explicit_header") s.radio.explicit_header = to_bool(val, line);
            else if (key == "tx_power_dbm")
                s.radio.tx_power_dbm = static_cast<int>(to_int(val, line));
            else if (key == "all") s.all.enabled = to_bool(val, line);
            else if (key == "all_floor_dbm") s.all.floor_dbm = to_double(val, line);
            else if (key == "all_margin_db") s.all.margin_db = to_double(val, line);
            else if (key == "all_step_db") s.all.step_db = to_double(val, line);
            else if (key == "p_cons_mw") {
                s.power.p_cons_tx_mw.clear();
                for (const auto& pair : split(val, ',')) {
                    auto kv = split(pair, ':');
                    if (kv.size() != 2) throw ParseError("p_cons_mw wants dbm:mw pairs", line);
                    s.power.p_cons_tx_mw[static_cast<int>(to_int(kv[0], line))] =
                        to_double(kv[1], line);
                }
            } else if (key == "p_rx_mw") s.power.p_rx_mw = to_double(val, line);
            else if (key == "i_sleep_ua") s.power.i_sleep_ua = to_double(val, line);
            else if (key == "i_lora_rx_ma") s.power.i_lora_rx_ma = to_double(val, line);
            else if (key == "i_lora_tx_ma") s.power.i_lora_tx_ma = to_double(val, line);
            else if (key == "i_ant_tx_ma") s.power.i_ant_tx_ma = to_double(val, line);
            else if (key == "i_ant_rx_ma") s.power.i_ant_rx_ma = to_double(val, line);
            else if (key == "supply_v") s.power.supply_v = to_double(val, line);
            else if (key == "ant_airtime_ms") s.power.ant_airtime_ms = to_double(val, line);
            else throw ParseError("unknown key '" + key + "' in [radio]", line);
        } else if (section == "channel") {
            if (key == "path_loss_exponent") s.channel.path_loss_exponent = to_double(val, line);
            else if (key == "reference_loss_db")
                s.channel.reference_loss_db = to_double(val, line);
            else if (key == "rssi_noise_sigma_db")
                s.channel.rssi_noise_sigma_db = to_double(val, line);
            else if (key == "corruption_prob") s.channel.corruption_prob = to_double(val, line);
            else if (key == "capture_db") s.channel.capture_db = to_double(val, line);
            else if (key == "link_gain_db") s.link_gain_db = to_double(val, line);
            else if (key == "link_quality_floor_dbm")
                s.link_quality_floor_dbm = to_double(val, line);
            else if (key == "sensitivity_dbm") {
                s.channel.sensitivity_dbm.clear();
                for (const auto& pair : split(val, ',')) {
                    auto kv = split(pair, ':');
                    if (kv.size() != 2)
                        throw ParseError("sensitivity_dbm wants sf:dbm pairs", line);
                    s.channel.sensitivity_dbm[static_cast<int>(to_int(kv[0], line))] =
                        to_double(kv[1], line);
                }
            } else throw ParseError("unknown key '" + key + "' in [channel]", line);
        } else if (section == "nodes") {
            if (key != "node") throw ParseError("unknown key '" + key + "' in [nodes]", line);
            std::istringstream ns(val);
            NodeSpec n;
            long long id;
            std::string role;
            if (!(ns >> id >> role)) throw ParseError("node wants '<id> <role> ...'", line);
            if (id < 1 || id > 0xFFFF) throw ParseError("node id out of range [1,65535]", line);
            n.id = static_cast<NodeId>(id);
            if (role == "hub") n.role = NodeRole::Hub;
            else if (role == "mesh") n.role = NodeRole::Mesh;
            else if (role == "srsn") n.role = NodeRole::Srsn;
            else if (role == "aloha") n.role = NodeRole::Aloha;
            else throw ParseError("unknown role '" + role + "'", line);
            std::string opt;
            while (ns >> opt) {
                std::size_t oeq = opt.find('=');
                if (oeq == std::string::npos)
                    throw ParseError("node option wants key=value, got '" + opt + "'", line);
                std::string ok = opt.substr(0, oeq), ov = opt.substr(oeq + 1);
                if (ok == "pos") {
                    auto xy = split(ov, ',');
                    if (xy.size() != 2) throw ParseError("pos wants x,y", line);
                    n.has_pos = true;
                    n.x = to_double(xy[0], line);
                    n.y = to_double(xy[1], line);
                } else if (ok == "links") {
                    for (const auto& t : split(ov, ','))
                        n.links.insert(static_cast<NodeId>(to_int(t, line)));
                } else if (ok == "battery_mah") {
                    n.battery_mah = to_double(ov, line);
                } else if (ok == "power_dbm") {
                    n.tx_power_dbm = static_cast<int>(to_int(ov, line));
                } else {
                    throw ParseError("unknown node option '" + ok + "'", line);
                }
            }
            s.nodes.push_back(std::move(n));
        } else if (section == "traffic") {
            if (key == "period_s") s.traffic.period_s = to_double(val, line);
            else if (key == "cycles") s.traffic.cycles = static_cast<int>(to_int(val, line));
            else if (key == "payload_bytes")
                s.traffic.payload_bytes = static_cast<int>(to_int(val, line));
            else if (key == "packets_per_node")
                s.traffic.packets_per_node = static_cast<int>(to_int(val, line));
            else if (key == "hub_uplink") s.traffic.hub_uplink = to_bool(val, line);
            else if (key == "slot_ms") s.traffic.slot_ms = to_double(val, line);
            else if (key == "aloha_period_s") s.traffic.aloha_period_s = to_double(val, line);
            else if (key == "aloha_payload_bytes")
                s.traffic.aloha_payload_bytes = static_cast<int>(to_int(val, line));
            else if (key == "aloha_sf") s.traffic.aloha_sf = static_cast<int>(to_int(val, line));
            else if (key == "reset_after_silent_cycles")
                s.traffic.reset_after_silent_cycles = static_cast<int>(to_int(val, line));
            else if (key == "expected_hub_uplink_slots")
                s.traffic.expected_hub_uplink_slots = static_cast<int>(to_int(val, line));
            else throw ParseError("unknown key '" + key + "' in [traffic]", line);
        } else if (section == "sync") {
            if (key == "guard_ms") s.sync.guard_ms = to_double(val, line);
            else if (key == "t_node_ms") s.sync.t_node_ms = to_double(val, line);
            else if (key == "t_node_jitter_ms") s.sync.t_node_jitter_ms = to_double(val, line);
            else if (key == "drift_ppm_band") s.sync.drift_ppm_band = to_double(val, line);
            else if (key == "sync_window_ms") s.sync.sync_window_ms = to_double(val, line);
            else if (key == "setup_slot_ms") s.sync.setup_slot_ms = to_double(val, line);
            else if (key == "hello_rounds")
                s.sync.hello_rounds = static_cast<int>(to_int(val, line));
            else throw ParseError("unknown key '" + key + "' in [sync]", line);
        } else if (section == "srsn") {
            if (key == "cluster") {
                auto halves = split(val, ':');
                if (halves.size() != 2)
                    throw ParseError("cluster wants '<bridge>: <member,...>'", line);
                SrsnCluster c;
                c.bridge = static_cast<NodeId>(to_int(halves[0], line));
                for (const auto& t : split(halves[1], ','))
                    if (!t.empty()) c.members.push_back(static_cast<NodeId>(to_int(t, line)));
                s.srsn.clusters.push_back(std::move(c));
            } else if (key == "poll_period_s") s.srsn.poll_period_s = to_double(val, line);
            else if (key == "timer_multiplier") s.srsn.timer_multiplier = to_double(val, line);
            else if (key == "ams_threshold") s.srsn.ams_threshold = to_double(val, line);
            else if (key == "ams") s.srsn.ams = to_bool(val, line);
            else throw ParseError("unknown key '" + key + "' in [srsn]", line);
        } else if (section == "faults") {
            if (key != "fault") throw ParseError("unknown key '" + key + "' in [faults]", line);
            std::istringstream fs(val);
            std::string action;
            double t;
            long long node;
            if (!(fs >> action >> t >> node))
                throw ParseError("fault wants '<kill|revive> <t_s> <node>'", line);
            FaultSpec f;
            f.t_s = t;
            f.node = static_cast<NodeId>(node);
            if (action == "kill") f.action = FaultSpec::Action::Kill;
            else if (action == "revive") f.action = FaultSpec::Action::Revive;
            else throw ParseError("unknown fault action '" + action + "'", line);
            s.faults.push_back(f);
        }
    }
    validate(s);
    return s;
}

inline std::string emit_scenario(const Scenario& s) {
    using namespace cfgdet;
    std::ostringstream os;
    os << "[seed]\nseed = " << s.seed << "\n\n";

    os << "[radio]\n";
    os << "sf = " << s.radio.sf << "\n";
    os << "bw_hz = " << s.radio.bw_hz << "\n";
    os << "cr = " << s.radio.cr << "\n";
    os << "preamble_symbols = " << s.radio.preamble_symbols << "\n";
    os << "crc = " << (s.radio.crc_on ? "on" : "off") << "\n";
    os << "explicit_header = " << (s.radio.explicit_header ? "on" : "off") << "\n";
    os << "tx_power_dbm = " << s.radio.tx_power_dbm << "\n";
    os << "all = " << (s.all.enabled ? "on" : "off") << "\n";
    os << "all_floor_dbm = " << fmt_num(s.all.floor_dbm) << "\n";
    os << "all_margin_db = " << fmt_num(s.all.margin_db) << "\n";
    os << "all_step_db = " << fmt_num(s.all.step_db) << "\n";
    os << "p_cons_mw = ";
    bool first = true;
    for (const auto& [dbm, mw] : s.power.p_cons_tx_mw) {
        if (!first) os << ", ";
        os << dbm << ":" << fmt_num(mw);
        first = false;
    }
    os << "\n";
    os << "p_rx_mw = " << fmt_num(s.power.p_rx_mw) << "\n";
    os << "i_sleep_ua = " << fmt_num(s.power.i_sleep_ua) << "\n";
    os << "i_lora_rx_ma = " << fmt_num(s.power.i_lora_rx_ma) << "\n";
    os << "i_lora_tx_ma = " << fmt_num(s.power.i_lora_tx_ma) << "\n";
    os << "i_ant_tx_ma = " << fmt_num(s.power.i_ant_tx_ma) << "\n";
    os << "i_ant_rx_ma = " << fmt_num(s.power.i_ant_rx_ma) << "\n";
    os << "supply_v = " << fmt_num(s.power.supply_v) << "\n";
    os << "ant_airtime_ms = " << fmt_num(s.power.ant_airtime_ms) << "\n\n";

    os << "[channel]\n";
    os << "path_loss_exponent = " << fmt_num(s.channel.path_loss_exponent) << "\n";
    os << "reference_loss_db = " << fmt_num(s.channel.reference_loss_db) << "\n";
    os << "rssi_noise_sigma_db = " << fmt_num(s.channel.rssi_noise_sigma_db) << "\n";
    os << "corruption_prob = " << fmt_num(s.channel.corruption_prob) << "\n";
    os << "capture_db = " << fmt_num(s.channel.capture_db) << "\n";
    os << "link_gain_db = " << fmt_num(s.link_gain_db) << "\n";
    os << "link_quality_floor_dbm = " << fmt_num(s.link_quality_floor_dbm) << "\n";
    os << "sensitivity_dbm = ";
    first = true;
    for (const auto& [sf, dbm] : s.channel.sensitivity_dbm) {
        if (!first) os << ", ";
        os << sf << ":" << fmt_num(dbm);
        first = false;
    }
    os << "\n\n";

    os << "[nodes]\n";
    for (const auto& n : s.nodes) {
        os << "node = " << n.id << " " << role_name(n.role);
        if (n.has_pos) os << " pos=" << fmt_num(n.x) << "," << fmt_num(n.y);
        if (!n.links.empty()) {
            os << " links=";
            bool f2 = true;
            for (NodeId l : n.links) {
                if (!f2) os << ",";
                os << l;
                f2 = false;
            }
        }
        os << " battery_mah=" << fmt_num(n.battery_mah);
        if (n.tx_power_dbm) os << " power_dbm=" << *n.tx_power_dbm;
        os << "\n";
    }
    os << "\n";

    os << "[traffic]\n";
    os << "period_s = " << fmt_num(s.traffic.period_s) << "\n";
    os << "cycles = " << s.traffic.cycles << "\n";
    os << "payload_bytes = " << s.traffic.payload_bytes << "\n";
    os << "packets_per_node = " << s.traffic.packets_per_node << "\n";
    os << "hub_uplink = " << (s.traffic.hub_uplink ? "on" : "off") << "\n";
    os << "slot_ms = " << fmt_num(s.traffic.slot_ms) << "\n";
    os << "aloha_period_s = " << fmt_num(s.traffic.aloha_period_s) << "\n";
    os << "aloha_payload_bytes = " << s.traffic.aloha_payload_bytes << "\n";
    os << "aloha_sf = " << s.traffic.aloha_sf << "\n";
    os << "reset_after_silent_cycles = " << s.traffic.reset_after_silent_cycles << "\n";
    if (s.traffic.expected_hub_uplink_slots >= 0)
        os << "expected_hub_uplink_slots = " << s.traffic.expected_hub_uplink_slots << "\n";
    os << "\n";

    os << "[sync]\n";
    os << "guard_ms = " << fmt_num(s.sync.guard_ms) << "\n";
    os << "t_node_ms = " << fmt_num(s.sync.t_node_ms) << "\n";
    os << "t_node_jitter_ms = " << fmt_num(s.sync.t_node_jitter_ms) << "\n";
    os << "drift_ppm_band = " << fmt_num(s.sync.drift_ppm_band) << "\n";
    os << "sync_window_ms = " << fmt_num(s.sync.sync_window_ms) << "\n";
    os << "setup_slot_ms = " << fmt_num(s.sync.setup_slot_ms) << "\n";
    os << "hello_rounds = " << s.sync.hello_rounds << "\n\n";

    os << "[srsn]\n";
    for (const auto& c : s.srsn.clusters) {
        os << "cluster = " << c.bridge << ": ";
        bool f2 = true;
        for (NodeId m : c.members) {
            if (!f2) os << ",";
            os << m;
            f2 = false;
        }
        os << "\n";
    }
    os << "poll_period_s = " << fmt_num(s.srsn.poll_period_s) << "\n";
    os << "timer_multiplier = " << fmt_num(s.srsn.timer_multiplier) << "\n";
    os << "ams_threshold = " << fmt_num(s.srsn.ams_threshold) << "\n";
    os << "ams = " << (s.srsn.ams ? "on" : "off") << "\n\n";

    os << "[faults]\n";
    for (const auto& f : s.faults)
        os << "fault = " << (f.action == FaultSpec::Action::Kill ? "kill" : "revive") << " "
           << fmt_num(f.t_s) << " " << f.node << "\n";
    return os.str();
}

inline void validate(const Scenario& s) {
    validate(s.radio);
    if (s.traffic.cycles < 1 || s.traffic.period_s <= 0)
        throw ScenarioError("simulation duration must be positive");
    if (s.nodes.empty()) throw ScenarioError("scenario has no nodes");

    std::set<NodeId> ids;
    int hubs = 0;
    bool any_pos = false, any_links = false;
    for (const auto& n : s.nodes) {
        if (n.id == kGatewayId) throw ScenarioError("node id 0 is reserved for the gateway");
        if (!ids.insert(n.id).second)
            throw ScenarioError("duplicate node id " + std::to_string(n.id));
        if (n.role == NodeRole::Hub) ++hubs;
        if (n.battery_mah <= 0) throw ScenarioError("battery capacity must be positive");
        if (n.role != NodeRole::Srsn) {
            if (n.has_pos) any_pos = true;
            if (!n.links.empty()) any_links = true;
        }
        if (n.tx_power_dbm &&
            (*n.tx_power_dbm < kTxPowerMinDbm || *n.tx_power_dbm > kTxPowerMaxDbm))
            throw ScenarioError("node " + std::to_string(n.id) + " tx power out of range");
    }
    if (hubs != 1) throw ScenarioError("scenario must declare exactly one hub node");
    if (any_pos && any_links)
        throw ScenarioError("mix of positional and explicit-link nodes is not supported");
    for (const auto& n : s.nodes) {
        for (NodeId l : n.links) {
            if (!ids.count(l))
                throw ScenarioError("node " + std::to_string(n.id) + " links to unknown node " +
                                    std::to_string(l));
            const NodeSpec* peer = s.find(l);
            if (!peer->links.count(n.id))
                throw ScenarioError("link " + std::to_string(n.id) + "-" + std::to_string(l) +
                                    " is not symmetric");
        }
    }
    std::set<NodeId> in_cluster;
    for (const auto& c : s.srsn.clusters) {
        const NodeSpec* bridge = s.find(c.bridge);
        if (!bridge) throw ScenarioError("cluster bridge " + std::to_string(c.bridge) +
                                         " is not a node");
        if (bridge->role != NodeRole::Mesh && bridge->role != NodeRole::Hub)
            throw ScenarioError("cluster bridge must be a mesh participant");
        if (c.members.empty()) throw ScenarioError("cluster without members");
        for (NodeId m : c.members) {
            const NodeSpec* ms = s.find(m);
            if (!ms) throw ScenarioError("cluster member " + std::to_string(m) +
                                         " is not a node");
            if (ms->role != NodeRole::Srsn)
                throw ScenarioError("cluster member " + std::to_string(m) +
                                    " must have role srsn");
            if (!in_cluster.insert(m).second)
                throw ScenarioError("node " + std::to_string(m) + " is in two clusters");
        }
    }
    for (const auto& n : s.nodes) {
        if (n.role == NodeRole::Srsn && !in_cluster.count(n.id))
            throw ScenarioError("srsn node " + std::to_string(n.id) +
                                " belongs to no cluster");
    }
    for (const auto& f : s.faults) {
        if (!ids.count(f.node))
            throw ScenarioError("fault on unknown node " + std::to_string(f.node));
        if (f.t_s < 0) throw ScenarioError("fault time must be non-negative");
    }
    if (s.channel.corruption_prob < 0 || s.channel.corruption_prob > 1)
        throw ScenarioError("corruption_prob out of [0,1]");
    if (s.traffic.payload_bytes < static_cast<int>(DataPacket::kHeaderBytes) ||
        s.traffic.payload_bytes > 255)
        throw ScenarioError("payload_bytes out of [9,255]");
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ScenarioError("cannot open scenario file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    std::string stem = path;
    std::size_t slash = stem.find_last_of('/');
    if (slash != std::string::npos) stem = stem.substr(slash + 1);
    std::size_t dot = stem.rfind('.');
    if (dot != std::string::npos) stem = stem.substr(0, dot);
    return parse_scenario(ss.str(), stem);
}

} // namespace lpmesh
