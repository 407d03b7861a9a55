// Integration acceptance suite: one check per release criterion, one
// pass/fail line each. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lpmesh/engine.hpp"
#include "lpmesh/metrics.hpp"
#include "lpmesh/phy.hpp"
#include "lpmesh/routing.hpp"
#include "lpmesh/scenario.hpp"
#include "lpmesh/schedule.hpp"
#include "lpmesh/timesync.hpp"
#include "lpmesh/topo.hpp"

using namespace lpmesh;

namespace {

int failures = 0;

void report(const char* id, bool pass, const std::string& detail) {
    std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
    if (!pass) ++failures;
}

bool close_rel(double v, double target, double tol) {
    return std::abs(v - target) <= tol * std::abs(target);
}

std::string fmt(double v, int prec = 4) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
    return buf;
}

using Graph = std::map<NodeId, std::set<NodeId>>;

ConnectivityTable conn_of(const Graph& g, NodeId hub) {
    std::vector<RoutingTable> tables;
    for (const auto& [id, nbrs] : g) {
        RoutingTable t;
        t.owner = id;
        t.own_hops = (id == hub) ? 0 : kUnreachedHops;
        for (NodeId n : nbrs) t.entries.push_back({n, kUnreachedHops});
        tables.push_back(t);
    }
    return collect_routing_tables(tables, hub);
}

// ---- criterion 1: time-on-air anchors -------------------------------------

void c1() {
    RadioConfig c;
    c.sf = 7;
    const double t8 = time_on_air_ms(c, 8);
    const double t64 = time_on_air_ms(c, 64);
    const bool pass = std::abs(t8 - 36.096) <= 0.001 && t64 < 125.0;
    report("C1 time-on-air", pass,
           "SF7/8B = " + fmt(t8, 3) + " ms (want 36.096 +-0.001); SF7/64B = " + fmt(t64, 3) +
               " ms < 125 ms slot");
}

// ---- criterion 2: per-bit energy anchors ---------------------------------

void c2() {
    RadioConfig c;
    c.sf = 7;
    c.tx_power_dbm = 20;
    PowerProfile p;
    const double erx = energy_rx_per_bit_uj(c, p, 8);
    const double total = multi_hop_energy_per_bit_mj(3, c, p, 8);
    const bool pass = close_rel(erx, 8.57, 0.01) && close_rel(total, 0.67, 0.02);
    report("C2 energy-model", pass,
           "E_rx = " + fmt(erx) + " uJ/bit (want 8.57 +-1%); 3-hop = " + fmt(total) +
               " mJ/bit (want 0.67 +-2%)");
}

// ---- criterion 3: battery projections -------------------------------------

void c3() {
    const double ua[4] = {33, 74, 56, 25};
    const double years[4] = {8.6, 3.9, 5.1, 11.4};
    const int rounded[4] = {9, 4, 5, 11};
    bool pass = true;
    std::string detail;
    for (int i = 0; i < 4; ++i) {
        const double y = battery_life_years(ua[i], 2500);
        if (std::abs(y - years[i]) > 0.05 || std::lround(y) != rounded[i]) pass = false;
        detail += (i ? ", " : "") + fmt(y, 1) + "y@" + fmt(ua[i], 0) + "uA";
    }
    report("C3 battery-life", pass, detail + " (want 8.6/3.9/5.1/11.4 -> 9/4/5/11)");
}

// ---- criterion 4: scheduler oracle ----------------------------------------

void c4() {
    const auto t0 = std::chrono::steady_clock::now();
    long long checked = 0, bad = 0;

    // exhaustive: every connected labeled topology up to 6 nodes
    for (int n = 1; n <= 6; ++n) {
        std::vector<std::pair<int, int>> pairs;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
        for (std::uint32_t mask = 0; mask < (1u << pairs.size()); ++mask) {
            Graph g;
            for (int i = 1; i <= n; ++i) g[static_cast<NodeId>(i)];
            for (std::size_t pi = 0; pi < pairs.size(); ++pi)
                if (mask & (1u << pi)) {
                    g[static_cast<NodeId>(pairs[pi].first + 1)].insert(
                        static_cast<NodeId>(pairs[pi].second + 1));
                    g[static_cast<NodeId>(pairs[pi].second + 1)].insert(
                        static_cast<NodeId>(pairs[pi].first + 1));
                }
            std::set<NodeId> seen{1};
            std::vector<NodeId> stack{1};
            while (!stack.empty()) {
                NodeId u = stack.back();
                stack.pop_back();
                for (NodeId v : g[u])
                    if (seen.insert(v).second) stack.push_back(v);
            }
            if (static_cast<int>(seen.size()) != n) continue;
            ConnectivityTable conn = conn_of(g, 1);
            BuildOptions opts;
            opts.hub_uplink = false;
            Schedule s = build_schedule(sorted_nodelist(conn), conn, opts);
            if (!validate_schedule(s, conn).ok()) ++bad;
            ++checked;
        }
    }

    // randomized: 500 trees up to 12 nodes, 1-2 packets per node
    Rng rng(4242);
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_u32(11));
        Graph g;
        for (int i = 1; i <= n; ++i) g[static_cast<NodeId>(i)];
        for (int i = 2; i <= n; ++i) {
            NodeId parent = static_cast<NodeId>(1 + rng.uniform_u32(i - 1));
            g[static_cast<NodeId>(i)].insert(parent);
            g[parent].insert(static_cast<NodeId>(i));
        }
        const int ppn = 1 + static_cast<int>(rng.uniform_u32(2));
        ConnectivityTable conn = conn_of(g, 1);
        BuildOptions opts;
        opts.hub_uplink = false;
        Schedule s = build_schedule(sorted_nodelist(conn, ppn), conn, opts);
        if (!validate_schedule(s, conn, ppn).ok()) ++bad;
        ++checked;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report("C4 scheduler-oracle", bad == 0 && secs < 120.0,
           std::to_string(checked) + " topologies, " + std::to_string(bad) +
               " violations, " + fmt(secs, 1) + " s (< 120 s)");
}

// ---- criterion 5: reference slot matrix ------------------------------------

void c5() {
    Scenario scn = load_scenario("scenarios/fig-routing.scenario");
    ConnectivityTable conn = static_connectivity(scn);
    Schedule s = static_schedule(scn, conn);
    bool pass = s.slots.size() >= 3;
    auto expect = [&](int slot, NodeId n, SlotActionKind k, NodeId peer = 0) {
        if (!pass) return;
        const SlotAction& a = s.action(slot, n);
        if (a.kind != k || (k == SlotActionKind::Send && a.peer != peer)) pass = false;
    };
    // reference non-hub pattern for slots 1-3
    expect(0, 3, SlotActionKind::Send, 2);
    expect(0, 4, SlotActionKind::Send, 1);
    expect(0, 2, SlotActionKind::Recv);
    expect(0, 1, SlotActionKind::Recv);
    for (int slot : {1, 2}) {
        expect(slot, 2, SlotActionKind::Send, 1);
        expect(slot, 1, SlotActionKind::Recv);
        expect(slot, 3, SlotActionKind::Sleep);
        expect(slot, 4, SlotActionKind::Sleep);
    }
    // the hub-uplink count difference is surfaced, not hidden
    const bool mismatch_reported = scn.traffic.expected_hub_uplink_slots == 3 &&
                                   s.hub_uplink_slots == 4 &&
                                   s.hub_uplink_slots != scn.traffic.expected_hub_uplink_slots;
    report("C5 slot-matrix", pass && mismatch_reported,
           "slots 1-3 match the reference exactly; hub uplink " +
               std::to_string(s.hub_uplink_slots) + " slots vs annotated 3 (reported)");
}

// ---- criterion 6: end-to-end conservation ----------------------------------

void c6() {
    Scenario scn = load_scenario("scenarios/campus-13.scenario");
    Simulation sim(scn);
    const EventTrace& tr = sim.run();
    const double cycle0 = sim.cycle0_ms();
    const double period = scn.traffic.period_s * 1000.0;
    std::map<int, int> per_cycle;
    long long collisions = 0;
    for (const auto& r : tr.records) {
        if (r.event == ev::collision) ++collisions;
        if (r.node == 1 && (r.event == ev::rx_ok) && detail_get(r.detail, "kind") == "data") {
            const int k = static_cast<int>(std::floor((r.t_ms - cycle0) / period));
            per_cycle[k] += 1;
        }
    }
    bool exact = static_cast<int>(per_cycle.size()) == scn.traffic.cycles;
    for (const auto& [k, n] : per_cycle)
        if (n != 12) exact = false;
    MetricsReport rep = compute_metrics(tr);
    bool pdr_one = true;
    for (const auto& [id, m] : rep.per_node)
        if (m.expected > 0 && m.pdr != 1.0) pdr_one = false;
    report("C6 conservation", exact && pdr_one && collisions == 0,
           "12 packets/cycle over " + std::to_string(per_cycle.size()) +
               " cycles, PDR 1.0 for every node, collisions = " + std::to_string(collisions));
}

// ---- criterion 7: degraded-channel target ----------------------------------

void c7() {
    Scenario scn = load_scenario("scenarios/campus-13.scenario");
    scn.channel.corruption_prob = 0.02;
    scn.sync.drift_ppm_band = 5.0;
    scn.sync.t_node_jitter_ms = 0.5;
    double sum = 0;
    long long meshed = 0;
    std::map<NodeId, double> per_node_sum;
    for (int i = 0; i < 10; ++i) {
        Scenario s2 = scn;
        s2.seed = 100 + static_cast<std::uint64_t>(i);
        EventTrace tr = run(s2);
        MetricsReport rep = compute_metrics(tr);
        for (const auto& [id, m] : rep.per_node) {
            if (m.role != "mesh" && m.role != "srsn") continue;
            sum += m.pdr;
            ++meshed;
            per_node_sum[id] += m.pdr;
        }
    }
    const double mean = sum / static_cast<double>(meshed);
    double worst = 1.0;
    NodeId worst_id = 0;
    for (const auto& [id, s] : per_node_sum)
        if (s / 10.0 < worst) {
            worst = s / 10.0;
            worst_id = id;
        }
    report("C7 degraded-channel", mean >= 0.96,
           "2%/link loss, 5 ppm drift, 10 seeds: mean mesh PDR = " + fmt(mean) +
               " (>= 0.96); deepest node " + std::to_string(worst_id) + " = " + fmt(worst));
}

// ---- criterion 8: reference-traffic comparison ------------------------------

Scenario aloha_scenario(int n_nodes, double period_s, double aloha_period_s, int cycles,
                        std::uint64_t seed) {
    std::ostringstream os;
    os << "[seed]\nseed = " << seed << "\n[radio]\nsf = 7\n[channel]\nlink_gain_db = -90\n";
    os << "[nodes]\nnode = 1 hub links=";
    for (int i = 0; i < n_nodes; ++i) os << (i ? "," : "") << i + 100;
    os << "\n";
    for (int i = 0; i < n_nodes; ++i) os << "node = " << i + 100 << " aloha links=1\n";
    os << "[traffic]\nperiod_s = " << period_s << "\ncycles = " << cycles
       << "\nhub_uplink = off\naloha_period_s = " << aloha_period_s
       << "\naloha_sf = 12\nreset_after_silent_cycles = 0\n";
    return parse_scenario(os.str(), "aloha-load");
}

void c8() {
    RadioConfig sf12;
    sf12.sf = 12;
    const double toa = time_on_air_ms(sf12, 64) / 1000.0; // ~2.793 s
    const double period = 279.0;
    bool curve_ok = true;
    std::string detail;
    for (int n : {10, 30, 50}) {
        double got = 0, want = std::exp(-2.0 * n * toa / period);
        long long rx = 0, tx = 0;
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            EventTrace tr = run(aloha_scenario(n, 558.0, period, 50, seed));
            for (const auto& r : tr.records) {
                if (r.event == ev::tx_start && detail_get(r.detail, "kind") == "data") ++tx;
                if (r.node == kGatewayId && r.event == ev::rx_ok) ++rx;
            }
        }
        got = static_cast<double>(rx) / static_cast<double>(tx);
        if (!close_rel(got, want, 0.10)) curve_ok = false;
        detail += "G=" + fmt(n * toa / period, 2) + ": " + fmt(got, 3) + "/" +
                  fmt(want, 3) + "  ";
    }

    // mixed run: a 5-hop path plus reference nodes contending at the gateway
    std::ostringstream os;
    os << "[seed]\nseed = 77\n[radio]\nsf = 7\n[channel]\nlink_gain_db = -90\n[nodes]\n";
    os << "node = 1 hub links=2,100,101,102,103,104,105,106,107,108,109,110,111,112,113,"
          "114,115,116,117,118,119\n";
    os << "node = 2 mesh links=1,3\nnode = 3 mesh links=2,4\nnode = 4 mesh links=3,5\n"
          "node = 5 mesh links=4\n";
    for (int i = 0; i < 20; ++i) os << "node = " << i + 100 << " aloha links=1\n";
    os << "[traffic]\nperiod_s = 600\ncycles = 100\nhub_uplink = off\n"
          "aloha_period_s = 279\naloha_sf = 12\nreset_after_silent_cycles = 0\n";
    EventTrace tr = run(parse_scenario(os.str(), "mesh-vs-aloha"));
    MetricsReport rep = compute_metrics(tr);
    double mesh_sum = 0, aloha_sum = 0;
    int mesh_n = 0, aloha_n = 0;
    for (const auto& [id, m] : rep.per_node) {
        if (m.role == "mesh") {
            mesh_sum += m.pdr;
            ++mesh_n;
        } else if (m.role == "aloha") {
            aloha_sum += m.pdr;
            ++aloha_n;
        }
    }
    const double mesh_pdr = mesh_sum / mesh_n;
    const double aloha_pdr = aloha_sum / aloha_n;
    report("C8 aloha-reference", curve_ok && mesh_pdr > aloha_pdr,
           detail + "| loaded: mesh " + fmt(mesh_pdr, 3) + " > reference " +
               fmt(aloha_pdr, 3));
}

// ---- criterion 9: failure recovery ------------------------------------------

void c9() {
    // (a) leaf death in the 4-node reference network
    Scenario scn = load_scenario("scenarios/fig-routing.scenario");
    scn.traffic.cycles = 10;
    // kill node 3 late in cycle 2, right after its slots
    const double period_s = scn.traffic.period_s;
    Simulation probe(scn);
    const double cycle0_s = probe.cycle0_ms() / 1000.0;
    const double kill_t = cycle0_s + 2 * period_s + 0.8 * period_s;
    scn.faults.push_back({kill_t, FaultSpec::Action::Kill, 3});
    Simulation sim(scn);
    const EventTrace& tr = sim.run();

    double reset_t = -1, reformed_t = -1;
    std::map<NodeId, std::map<int, int>> arrived; // origin -> cycle -> count
    const double cycle0 = sim.cycle0_ms();
    for (const auto& r : tr.records) {
        if (r.node == 1 && r.event == ev::reset && reset_t < 0) reset_t = r.t_ms;
        if (r.event == ev::phase_change && detail_get(r.detail, "phase") == "data" &&
            r.t_ms > reset_t && reset_t > 0 && reformed_t < 0)
            reformed_t = r.t_ms;
        if (r.node == 1 && r.event == ev::rx_ok && detail_get(r.detail, "kind") == "data") {
            const int k =
                static_cast<int>(std::floor((r.t_ms - cycle0) / (period_s * 1000.0)));
            arrived[static_cast<NodeId>(std::stoul(detail_get(r.detail, "origin")))][k] += 1;
        }
    }
    // detection completes within the next full cycle, re-formation after one
    // setup phase: data phase running again before cycle kill+2 ends
    const bool detected = reset_t > 0 && reset_t <= (cycle0_s + 4 * period_s) * 1000.0;
    const bool reformed = reformed_t > 0 && reformed_t <= (cycle0_s + 5 * period_s) * 1000.0;
    bool survivors_clean = true;
    for (int k = 4; k < scn.traffic.cycles; ++k) {
        if (arrived[2][k] != 1 || arrived[4][k] != 1) survivors_clean = false;
        if (arrived[3][k] != 0) survivors_clean = false;
    }

    // (b) short-range hub death: timer expiry and re-election
    std::ostringstream os;
    os << "[seed]\nseed = 4\n[radio]\nsf = 7\n[channel]\nlink_gain_db = -90\n[nodes]\n"
          "node = 1 hub links=2,3,4,5\nnode = 2 mesh links=1,3,4,5\n"
          "node = 3 srsn links=1,2,4,5\nnode = 4 srsn links=1,2,3,5\n"
          "node = 5 srsn links=1,2,3,4\n"
          "[traffic]\nperiod_s = 600\ncycles = 12\nhub_uplink = off\n"
          "[srsn]\ncluster = 2: 3,4,5\ntimer_multiplier = 5\nams = off\n"
          "[faults]\nfault = kill 1300 2\n";
    Scenario s2 = parse_scenario(os.str(), "srsn-kill");
    Simulation sim2(s2);
    const EventTrace& tr2 = sim2.run();
    double last_round_start = -1, prev_poll = -1e18, srsn_reset_t = -1;
    NodeId new_bridge = 0;
    bool resumed = false;
    for (const auto& r : tr2.records) {
        if (r.event == ev::ant_poll && r.t_ms < 1300000.0) {
            if (r.t_ms - prev_poll > 1000.0) last_round_start = r.t_ms; // new round batch
            prev_poll = r.t_ms;
        }
        if (r.event == ev::srsn_reset && srsn_reset_t < 0) srsn_reset_t = r.t_ms;
        if (r.event == ev::handoff && detail_get(r.detail, "cause") == "failure")
            new_bridge = static_cast<NodeId>(std::stoul(detail_get(r.detail, "to")));
        if (r.node == 1 && r.event == ev::rx_ok && srsn_reset_t > 0 &&
            r.t_ms > srsn_reset_t &&
            (detail_get(r.detail, "origin") == "4" || detail_get(r.detail, "origin") == "5"))
            resumed = true;
    }
    // the failure timer arms on the poll-round grid: expiry is exactly the
    // last completed round plus timer_multiplier poll periods (zero drift)
    const double want_expiry = last_round_start + 5.0 * 600.0 * 1000.0;
    const bool timer_exact = std::abs(srsn_reset_t - want_expiry) < 1.0;
    const bool election_ok = new_bridge == 3; // equal batteries: lowest id
    report("C9 failure-recovery",
           detected && reformed && survivors_clean && timer_exact && election_ok && resumed,
           "leaf: reset@" + fmt(reset_t / 1000.0, 0) + "s, re-formed, survivors clean; "
               "cluster: timer@" +
               fmt(srsn_reset_t / 1000.0, 2) + "s (=last round+5x600s), new hub " +
               std::to_string(new_bridge) + ", data resumed");
}

// ---- criterion 10: time synchronization --------------------------------------

void c10() {
    std::ostringstream os;
    os << "[seed]\nseed = 5\n[radio]\nsf = 7\ntx_power_dbm = 14\n[channel]\n"
          "link_gain_db = -100\n[nodes]\n"
          "node = 1 hub links=2\nnode = 2 mesh links=1,3\nnode = 3 mesh links=2,4\n"
          "node = 4 mesh links=3,5\nnode = 5 mesh links=4\n"
          "[traffic]\nperiod_s = 600\ncycles = 1000\n[sync]\nguard_ms = 5\n"
          "t_node_ms = 2\nt_node_jitter_ms = 1\ndrift_ppm_band = 5\n";
    Scenario scn = parse_scenario(os.str(), "sync-1000");
    Simulation sim(scn);
    const EventTrace& tr = sim.run();
    ConnectivityTable conn = static_connectivity(scn);
    std::map<int, double> max_off;
    long long window_misses = 0, syncs = 0;
    for (const auto& r : tr.records) {
        if (r.event == ev::sync) {
            ++syncs;
            const int depth = conn.hops.count(r.node) ? conn.hops.at(r.node) : 0;
            const double off = std::abs(std::stod(detail_get(r.detail, "offset_us"))) / 1000.0;
            max_off[depth] = std::max(max_off[depth], off);
        } else if (r.event == ev::rx_missed && detail_get(r.detail, "reason") == "window") {
            ++window_misses;
        }
    }
    bool bound_ok = true;
    std::string detail;
    for (const auto& [depth, off] : max_off) {
        if (off > depth * 1.0 + 0.05) bound_ok = false;
        detail += "d" + std::to_string(depth) + "=" + fmt(off, 2) + "ms ";
    }
    report("C10 time-sync", bound_ok && window_misses == 0 && syncs >= 4000,
           detail + "(bound h*1ms); missed windows over 1000 cycles = " +
               std::to_string(window_misses));
}

// ---- criterion 11: energy role replication -----------------------------------

void c11() {
    Scenario scn = load_scenario("scenarios/energy-4.scenario");
    EventTrace tr = run(scn);
    MetricsReport rep = compute_metrics(tr);
    const double i1 = rep.per_node.at(1).avg_current_ua;
    const double i2 = rep.per_node.at(2).avg_current_ua;
    const double i3 = rep.per_node.at(3).avg_current_ua;
    const double i4 = rep.per_node.at(4).avg_current_ua;
    const bool band = close_rel(i1, 33, 0.30) && close_rel(i2, 74, 0.30) &&
                      close_rel(i3, 56, 0.30) && close_rel(i4, 25, 0.30);
    const bool order = i2 > i3 && i3 > i1 && i1 > i4;
    report("C11 energy-roles", band && order,
           fmt(i1, 1) + "/" + fmt(i2, 1) + "/" + fmt(i3, 1) + "/" + fmt(i4, 1) +
               " uA vs 33/74/56/25 +-30%, ordering N2>N3>N1>N4");
}

// ---- criterion 12: adaptive link control -----------------------------------

void c12() {
    std::ostringstream os;
    os << "[seed]\nseed = 6\n[radio]\nsf = 7\ntx_power_dbm = 15\nall = on\n[channel]\n"
          "path_loss_exponent = 3\nreference_loss_db = 40\n[nodes]\n"
          "node = 1 hub pos=0,0\nnode = 2 mesh pos=400,0\n"
          "[traffic]\nperiod_s = 600\ncycles = 12\nhub_uplink = off\n";
    Scenario scn = parse_scenario(os.str(), "all-conv");
    EventTrace tr = run(scn);
    // the hub-side RSSI of node 2's uplink reveals the transmit power
    std::vector<double> rssi;
    for (const auto& r : tr.records)
        if (r.node == 1 && r.event == ev::rx_ok && detail_get(r.detail, "kind") == "data")
            rssi.push_back(std::stod(detail_get(r.detail, "rssi")));
    bool pass = rssi.size() == 12;
    const double gain = -40.0 - 30.0 * std::log10(400.0); // deterministic link
    if (pass) {
        // converged no later than cycle 5, exactly at the lowest power that
        // keeps the link at or above floor+margin, and held there (trace
        // values carry %.6g precision)
        const double target_rssi = 9.0 + gain;
        for (std::size_t i = 5; i < rssi.size(); ++i)
            if (std::abs(rssi[i] - target_rssi) > 0.01) pass = false;
        for (std::size_t i = 1; i < rssi.size(); ++i)
            if (rssi[i] > rssi[i - 1] + 1e-9) pass = false; // no oscillation
        if (target_rssi < -120.0 + 10.0) pass = false;
        if ((6.0 + gain) >= -110.0) pass = false; // one step lower would break it
    }
    report("C12 adaptive-link", pass,
           "power settles at 9 dBm within 5 cycles (RSSI " +
               fmt(rssi.empty() ? 0 : rssi.back(), 2) + " dBm >= -110), no oscillation");
}

// ---- criterion 13: determinism ---------------------------------------------

void c13() {
    Scenario scn = load_scenario("scenarios/campus-13.scenario");
    scn.traffic.cycles = 30;
    EventTrace a = run(scn);
    EventTrace b = run(scn);
    const std::string ja = metrics_to_json(compute_metrics(a));
    const std::string jb = metrics_to_json(compute_metrics(b));
    report("C13 determinism", a.to_csv() == b.to_csv() && ja == jb,
           "same seed twice: byte-identical trace (" + std::to_string(a.records.size()) +
               " records) and report");
}

} // namespace

int main() {
    c1();
    c2();
    c3();
    c4();
    c5();
    c6();
    c7();
    c8();
    c9();
    c10();
    c11();
    c12();
    c13();
    if (failures == 0)
        std::printf("all 13 acceptance criteria passed\n");
    else
        std::printf("%d criterion(s) FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}
