#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "lpmesh/node.hpp"
#include "lpmesh/phy.hpp"
#include "lpmesh/rng.hpp"
#include "lpmesh/routing.hpp"
#include "lpmesh/scenario.hpp"
#include "lpmesh/schedule.hpp"
#include "lpmesh/srsn.hpp"
#include "lpmesh/timesync.hpp"
#include "lpmesh/trace.hpp"
#include "lpmesh/wire.hpp"

namespace lpmesh {

namespace engdet {
inline std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}
} // namespace engdet

/// Deterministic discrete-event simulator. One instance runs one scenario
/// once; identical (scenario, seed) pairs produce byte-identical traces.
///
/// Network time is the hub's clock. Every other node keeps an affine
/// estimate of it (offset corrected by beacon floods, fixed crystal drift
/// rate) and executes all protocol actions at the real instants where its
/// own estimate crosses the scheduled network times, so clock error shows
/// up physically in the medium.
class Simulation {
public:
    explicit Simulation(Scenario scn) : scn_(std::move(scn)) {
        validate(scn_);
        build_runtime();
    }

    const EventTrace& run() {
        emit_meta();
        schedule_faults();
        start_setup(0.0, /*initial=*/true);
        for (const auto& rt0 : nodes_)
            if (rt0.spec.role == NodeRole::Aloha) schedule_aloha(rt0.spec.id);
        const double t_end = cycle0_ms_ + scn_.duration_ms();
        while (!queue_.empty()) {
            Ev ev = queue_.top();
            if (ev.t > t_end) break;
            queue_.pop();
            now_ = ev.t;
            ev.fn();
        }
        now_ = t_end;
        for (auto& r : nodes_) set_mode(r, RadioMode::Off);
        return trace_;
    }

    const EventTrace& trace() const { return trace_; }
    const Schedule* active_schedule() const { return schedule_ ? &*schedule_ : nullptr; }
    const ConnectivityTable* connectivity() const { return conn_ ? &*conn_ : nullptr; }
    double cycle0_ms() const { return cycle0_ms_; }

private:
    struct Ev {
        double t;
        std::uint64_t seq;
        std::function<void()> fn;
        bool operator<(const Ev& o) const { return t != o.t ? t > o.t : seq > o.seq; }
    };

    enum class TxKind { Hello, Table, ScheduleMsg, Sync, Reset, Data };

    // setup transmissions start this far into their mini-slot so listeners
    // with residual clock error are already listening
    static constexpr double kSetupTxOffset = 10.0;

    struct Transmission {
        std::uint64_t uid = 0;
        NodeId sender = 0;
        double t_start = 0, t_end = 0;
        TxKind kind = TxKind::Data;
        int sf = 7;
        int power_dbm = 0;
        NodeId dest = 0; // data: next hop (kGatewayId = uplink); 0 = broadcast
        DataPacket packet;
        SyncBeacon beacon;
        double epoch_ms = 0.0; // beacons: sender's clock at its own sync instant
        std::uint32_t flood_id = 0;
        std::uint8_t hello_hops = 0;
        NodeId table_owner = 0;
    };

    struct Rt {
        NodeSpec spec;
        NodeState st;
        Rng rng{1};
        double est_base = 0.0, real_base = 0.0, rate = 1.0;
        bool alive = true;
        bool pending_listen = false;
        RadioMode mode = RadioMode::Sleep;
        double mode_since = 0.0;
        double charge_mc = 0.0;
        double cap_mc = 1.0;
        bool listening = false;
        double listen_since = 0.0;
        int window_slot = -1;
        bool window_got = false;
        // the short-range radio runs independently of the long-range one
        RadioMode ant_mode = RadioMode::Off;
        double ant_since = 0.0;
        std::uint32_t synced_flood = 0xFFFFFFFF;
        std::map<NodeId, int> expect_from; // child -> expected frames this cycle
        std::map<NodeId, int> miss_from;   // child -> empty expected slots this cycle
        bool cycle_scheduled = false;
    };

    struct Cluster {
        NodeId bridge = 0;
        std::vector<NodeId> members; // spokes
        std::uint64_t round_counter = 0;
        std::uint64_t reinit_done_for = ~0ULL;
    };

    // ---- construction -----------------------------------------------------

    void build_runtime() {
        for (const auto& n : scn_.nodes) {
            Rt r;
            r.spec = n;
            r.st.id = n.id;
            r.st.routing.owner = n.id;
            r.st.is_hub = (n.role == NodeRole::Hub);
            r.st.forward_uplink = scn_.traffic.hub_uplink;
            r.st.clock.guard_ms = scn_.sync.guard_ms;
            r.st.tx_power_dbm = n.tx_power_dbm ? *n.tx_power_dbm : scn_.radio.tx_power_dbm;
            r.cap_mc = n.battery_mah * 3600.0;
            r.rng = Rng(Rng::mix(scn_.seed, Rng::mix(0x6e6f6465, n.id)));
            nodes_.push_back(std::move(r));
            index_[n.id] = nodes_.size() - 1;
        }
        hub_ = scn_.hub_id();

        Rng drift_rng(Rng::mix(scn_.seed, 0x64726966));
        for (auto& r : nodes_) {
            double d = drift_rng.uniform(-scn_.sync.drift_ppm_band, scn_.sync.drift_ppm_band);
            r.st.clock.drift_ppm = (r.spec.id == hub_) ? 0.0 : d;
            r.rate = 1.0 + r.st.clock.drift_ppm * 1e-6;
        }

        for (const auto& n : scn_.nodes)
            if (n.role != NodeRole::Aloha) grid_ids_.push_back(n.id);
        std::sort(grid_ids_.begin(), grid_ids_.end());
        const int n = static_cast<int>(grid_ids_.size());
        hello_rounds_ = scn_.sync.hello_rounds > 0 ? scn_.sync.hello_rounds : n;
        sched_slot_ms_ = time_on_air_ms(scn_.radio, 255) + 2.0 * kSetupTxOffset;
        // mini-slots must fit the largest routing table plus the stagger
        const int max_table_bytes = std::min(255, 3 + 3 * std::max(1, n - 1));
        setup_slot_ms_ = std::max(scn_.sync.setup_slot_ms,
                                  time_on_air_ms(scn_.radio, max_table_bytes) +
                                      2.0 * kSetupTxOffset);
        table_slots_ = n * std::max(1, n - 1);
        setup_dur_ms_ = hello_rounds_ * n * setup_slot_ms_ +
                        table_slots_ * setup_slot_ms_ + 200.0 + n * sched_slot_ms_ +
                        500.0;
        cycle0_ms_ = std::ceil((setup_dur_ms_ + 1000.0) / 1000.0) * 1000.0;

        for (const auto& c : scn_.srsn.clusters) {
            Cluster cl;
            cl.bridge = c.bridge;
            cl.members = c.members;
            clusters_.push_back(cl);
        }
        toa_data_ms_ = time_on_air_ms(scn_.radio, scn_.traffic.payload_bytes);
        toa_beacon_ms_ = time_on_air_ms(scn_.radio, static_cast<int>(kSyncBeaconBytes));
        toa_hello_ms_ = time_on_air_ms(scn_.radio, 4);
        RadioConfig acfg = scn_.radio;
        acfg.sf = scn_.traffic.aloha_sf;
        toa_aloha_ms_ = time_on_air_ms(acfg, scn_.traffic.aloha_payload_bytes);
    }

    // ---- helpers ------------------------------------------------------------

    Rt& rt(NodeId id) { return nodes_.at(index_.at(id)); }
    const Rt& rt(NodeId id) const { return nodes_.at(index_.at(id)); }

    void at(double t, std::function<void()> fn) {
        queue_.push(Ev{std::max(t, now_), seq_++, std::move(fn)});
    }

    double est(const Rt& r, double t_real) const {
        return r.est_base + r.rate * (t_real - r.real_base);
    }
    double real_for(const Rt& r, double net_t) const {
        return r.real_base + (net_t - r.est_base) / r.rate;
    }

    double current_ma(RadioMode m) const {
        switch (m) {
        case RadioMode::Off: return 0.0;
        case RadioMode::Sleep: return scn_.power.i_sleep_ua / 1000.0;
        case RadioMode::Rx: return scn_.power.i_lora_rx_ma;
        case RadioMode::Tx: return scn_.power.i_lora_tx_ma;
        case RadioMode::AntTx: return scn_.power.i_ant_tx_ma;
        case RadioMode::AntRx: return scn_.power.i_ant_rx_ma;
        }
        return 0.0;
    }

    static const char* mode_name(RadioMode m) {
        switch (m) {
        case RadioMode::Off: return "off";
        case RadioMode::Sleep: return "sleep";
        case RadioMode::Rx: return "rx";
        case RadioMode::Tx: return "tx";
        case RadioMode::AntTx: return "ant_tx";
        case RadioMode::AntRx: return "ant_rx";
        }
        return "?";
    }

    void set_mode(Rt& r, RadioMode m) {
        if (m == r.mode) return;
        const double dt_s = (now_ - r.mode_since) / 1000.0;
        if (dt_s > 0) {
            const double mc = current_ma(r.mode) * dt_s;
            r.charge_mc += mc;
            trace_.add(now_, r.spec.id, ev::energy_delta_mc,
                       "mode=" + std::string(mode_name(r.mode)) + ";mc=" + engdet::num(mc) +
                           ";t0=" + fmt_ms(r.mode_since) + ";t1=" + fmt_ms(now_));
        }
        r.mode = m;
        r.mode_since = now_;
        r.st.radio_mode = m;
    }

    void set_ant(Rt& r, RadioMode m) {
        if (m == r.ant_mode) return;
        const double dt_s = (now_ - r.ant_since) / 1000.0;
        if (dt_s > 0 && r.ant_mode != RadioMode::Off) {
            const double mc = current_ma(r.ant_mode) * dt_s;
            r.charge_mc += mc;
            trace_.add(now_, r.spec.id, ev::energy_delta_mc,
                       "mode=" + std::string(mode_name(r.ant_mode)) + ";mc=" + engdet::num(mc) +
                           ";t0=" + fmt_ms(r.ant_since) + ";t1=" + fmt_ms(now_));
        }
        r.ant_mode = m;
        r.ant_since = now_;
    }

    double battery_frac(const Rt& r) const {
        return std::max(0.0, 1.0 - r.charge_mc / r.cap_mc);
    }

    void open_window(Rt& r, int slot) {
        finalize_slot_window(r);
        if (!r.listening) r.listen_since = now_; // continuous RX spans slots
        r.listening = true;
        r.window_slot = slot;
        r.window_got = false;
        set_mode(r, RadioMode::Rx);
    }

    // log silence for a scheduled receive window that saw nothing
    void finalize_slot_window(Rt& r) {
        if (r.window_slot < 0 || r.window_got) return;
        const SlotAction* a = slot_action(r.st, r.window_slot);
        if (a && a->kind == SlotActionKind::Recv) {
            for (NodeId src : a->sources) {
                r.miss_from[src] += 1;
                trace_.add(now_, r.spec.id, ev::rx_missed,
                           "reason=silence;src=" + std::to_string(src) +
                               ";slot=" + std::to_string(r.window_slot));
            }
        }
        r.window_slot = -1;
    }

    void close_window(Rt& r, RadioMode next) {
        r.listening = false;
        r.window_slot = -1;
        set_mode(r, next);
    }

    bool is_bridge(NodeId id) const {
        for (const auto& c : clusters_)
            if (c.bridge == id) return true;
        return false;
    }
    bool is_spoke(NodeId id) const {
        for (const auto& c : clusters_)
            for (NodeId m : c.members)
                if (m == id && c.bridge != id) return true;
        return false;
    }
    // long-range participants: hub, mesh nodes, and current cluster bridges
    bool lora_participant(const Rt& r) const {
        if (r.spec.role == NodeRole::Aloha) return false;
        if (is_spoke(r.spec.id)) return false;
        if (r.spec.role == NodeRole::Srsn && !is_bridge(r.spec.id)) return false;
        return true;
    }

    // ---- link model -----------------------------------------------------

    bool linked(NodeId a, NodeId b) const {
        if (a == b) return false;
        const auto& na = rt(a).spec;
        const auto& nb = rt(b).spec;
        if (!na.links.empty() || !nb.links.empty())
            return na.links.count(b) > 0 && nb.links.count(a) > 0;
        return na.has_pos && nb.has_pos;
    }

    double distance(NodeId a, NodeId b) const {
        const auto& na = rt(a).spec;
        const auto& nb = rt(b).spec;
        return std::hypot(na.x - nb.x, na.y - nb.y);
    }

    double rssi_of(const Transmission& tx, NodeId listener) const {
        NodeId at_node = (listener == kGatewayId) ? hub_ : listener;
        const auto& sspec = rt(tx.sender).spec;
        if (!sspec.has_pos || !rt(at_node).spec.has_pos)
            return tx.power_dbm + scn_.link_gain_db;
        double d = std::max(0.1, distance(tx.sender, at_node));
        double r = tx.power_dbm - scn_.channel.reference_loss_db -
                   10.0 * scn_.channel.path_loss_exponent * std::log10(d);
        if (scn_.channel.rssi_noise_sigma_db > 0.0) {
            Rng nr(Rng::mix(scn_.seed, Rng::mix(tx.uid, listener)));
            r += nr.gaussian(0.0, scn_.channel.rssi_noise_sigma_db);
        }
        return r;
    }

    double sensitivity_for_sf(int sf) const {
        auto it = scn_.channel.sensitivity_dbm.find(sf);
        if (it == scn_.channel.sensitivity_dbm.end())
            throw ConfigError("no sensitivity entry for SF" + std::to_string(sf));
        return it->second;
    }

    bool audible(const Transmission& tx, NodeId listener) const {
        NodeId at_node = (listener == kGatewayId) ? hub_ : listener;
        if (tx.sender == at_node) return listener == kGatewayId;
        if (!linked(tx.sender, at_node)) return false;
        return rssi_of(tx, listener) >= sensitivity_for_sf(tx.sf);
    }

    // ---- transmissions ----------------------------------------------------

    void begin_tx(NodeId sender, TxKind kind, double dur_ms, Transmission tx) {
        Rt& s = rt(sender);
        tx.uid = next_tx_uid_++;
        tx.sender = sender;
        tx.kind = kind;
        tx.t_start = now_;
        tx.t_end = now_ + dur_ms;
        tx.power_dbm = s.st.tx_power_dbm;
        if (s.listening) {
            s.listening = false;
            s.window_slot = -1;
        }
        set_mode(s, RadioMode::Tx);
        std::string detail =
            std::string("kind=") + tx_kind_name(kind) + ";dur_ms=" + engdet::num(dur_ms);
        if (kind == TxKind::Data)
            detail += ";origin=" + std::to_string(tx.packet.origin) +
                      ";seq=" + std::to_string(tx.packet.seq) +
                      ";dst=" + std::to_string(tx.dest);
        trace_.add(now_, sender, ev::tx_start, detail);
        active_.push_back(tx);
        const std::uint64_t uid = tx.uid;
        at(tx.t_end, [this, uid] { end_tx(uid); });
    }

    static const char* tx_kind_name(TxKind k) {
        switch (k) {
        case TxKind::Hello: return "hello";
        case TxKind::Table: return "table";
        case TxKind::ScheduleMsg: return "sched";
        case TxKind::Sync: return "sync";
        case TxKind::Reset: return "reset";
        case TxKind::Data: return "data";
        }
        return "?";
    }

    void end_tx(std::uint64_t uid) {
        auto it = std::find_if(active_.begin(), active_.end(),
                               [&](const Transmission& t) { return t.uid == uid; });
        if (it == active_.end()) return;
        Transmission tx = *it;
        Rt& s = rt(tx.sender);
        trace_.add(now_, tx.sender, ev::tx_end, std::string("kind=") + tx_kind_name(tx.kind));
        if (s.alive) {
            if (s.pending_listen || (in_setup_ && lora_participant(s))) {
                set_mode(s, RadioMode::Rx);
                s.listening = true;
                s.listen_since = now_;
            } else {
                set_mode(s, RadioMode::Sleep);
            }
        }
        deliver(tx);
        const double horizon = now_ - 120000.0;
        active_.erase(std::remove_if(active_.begin(), active_.end(),
                                     [&](const Transmission& t) { return t.t_end < horizon; }),
                      active_.end());
    }

    void deliver(const Transmission& tx) {
        for (auto& l : nodes_) {
            if (!l.alive || l.spec.id == tx.sender) continue;
            if (!audible(tx, l.spec.id)) continue;
            const bool covered =
                l.listening && l.mode == RadioMode::Rx && l.listen_since <= tx.t_start;
            if (!covered) {
                if (tx.kind == TxKind::Data && tx.dest == l.spec.id)
                    trace_.add(now_, l.spec.id, ev::rx_missed,
                               "reason=window;src=" + std::to_string(tx.sender));
                continue;
            }
            if (collided(tx, l.spec.id)) {
                trace_.add(now_, l.spec.id, ev::collision,
                           "src=" + std::to_string(tx.sender) +
                               ";kind=" + tx_kind_name(tx.kind));
                if (l.window_slot >= 0) l.window_got = true; // energy present, not silence
                continue;
            }
            dispatch(l, tx);
        }
        if (tx.kind == TxKind::Data && tx.dest == kGatewayId) gateway_receive(tx);
    }

    // destructive overlap, optionally with a capture margin: the frame
    // survives when it is at least capture_db stronger than every
    // overlapping audible interferer
    bool collided(const Transmission& tx, NodeId listener) const {
        double strongest = -1e9;
        bool any = false;
        for (const auto& o : active_) {
            if (o.uid == tx.uid) continue;
            if (o.t_start < tx.t_end && o.t_end > tx.t_start && audible(o, listener)) {
                any = true;
                strongest = std::max(strongest, rssi_of(o, listener));
            }
        }
        if (!any) return false;
        if (scn_.channel.capture_db <= 0.0) return true;
        return rssi_of(tx, listener) - strongest < scn_.channel.capture_db;
    }

    void gateway_receive(const Transmission& tx) {
        if (!audible(tx, kGatewayId)) return;
        if (collided(tx, kGatewayId)) {
            trace_.add(now_, kGatewayId, ev::collision, "src=" + std::to_string(tx.sender));
            return;
        }
        const bool corrupt = corruption_draw(tx, kGatewayId);
        trace_.add(now_, kGatewayId, corrupt ? ev::rx_crc_error : ev::rx_ok,
                   "kind=data;origin=" + std::to_string(tx.packet.origin) +
                       ";seq=" + std::to_string(tx.packet.seq) +
                       ";src=" + std::to_string(tx.sender));
    }

    bool corruption_draw(const Transmission& tx, NodeId listener) const {
        if (tx.kind != TxKind::Data || scn_.channel.corruption_prob <= 0.0) return false;
        Rng cr(Rng::mix(scn_.seed, Rng::mix(0x636f7272, Rng::mix(tx.uid, listener))));
        return cr.bernoulli(scn_.channel.corruption_prob);
    }

    // ---- reception --------------------------------------------------------

    void dispatch(Rt& l, const Transmission& tx) {
        switch (tx.kind) {
        case TxKind::Hello: on_hello(l, tx); break;
        case TxKind::Table: on_table(l, tx); break;
        case TxKind::ScheduleMsg: on_schedule_msg(l, tx); break;
        case TxKind::Sync:
        case TxKind::Reset: on_beacon(l, tx); break;
        case TxKind::Data: on_data(l, tx); break;
        }
    }

    void on_hello(Rt& l, const Transmission& tx) {
        if (!in_setup_ || !lora_participant(l)) return;
        const double rssi = rssi_of(tx, l.spec.id);
        if (rssi < scn_.link_quality_floor_dbm) return; // link quality filter
        HelloMessage h{tx.sender, tx.hello_hops};
        l.st.rssi_history[tx.sender] = rssi;
        if (process_hello(l.st.routing, h)) needs_announce_.insert(l.spec.id);
        trace_.add(now_, l.spec.id, ev::rx_ok,
                   "kind=hello;src=" + std::to_string(tx.sender) + ";rssi=" +
                       engdet::num(rssi));
    }

    void on_table(Rt& l, const Transmission& tx) {
        if (!in_setup_) return;
        holds_.insert({l.spec.id, tx.table_owner});
        if (l.spec.id == hub_) tables_at_hub_.insert(tx.table_owner);
        trace_.add(now_, l.spec.id, ev::rx_ok,
                   "kind=table;owner=" + std::to_string(tx.table_owner) +
                       ";src=" + std::to_string(tx.sender));
    }

    void on_schedule_msg(Rt& l, const Transmission& tx) {
        if (!in_setup_ || !schedule_) return;
        if (has_schedule_.count(l.spec.id)) return;
        has_schedule_.insert(l.spec.id);
        l.st.schedule_view = schedule_->rows_for(l.spec.id);
        trace_.add(now_, l.spec.id, ev::rx_ok, "kind=sched;src=" + std::to_string(tx.sender));
        auto fit = flood_slot_.find(l.spec.id);
        if (fit != flood_slot_.end()) {
            const double t = flood_t0_ms_ + fit->second * sched_slot_ms_ + kSetupTxOffset;
            const NodeId id = l.spec.id;
            at(real_for(l, t), [this, id] {
                Rt& r = rt(id);
                if (!r.alive || !in_setup_) return;
                Transmission m;
                m.sf = scn_.radio.sf;
                begin_tx(id, TxKind::ScheduleMsg,
                         sched_slot_ms_ - 2.0 * kSetupTxOffset, m);
            });
        }
    }

    void on_beacon(Rt& l, const Transmission& tx) {
        if (!lora_participant(l)) return; // spokes keep the long-range radio off
        if (l.synced_flood == tx.flood_id) return;
        l.synced_flood = tx.flood_id;
        EvBeaconIn ev_in{tx.beacon, toa_beacon_ms_, scn_.sync.t_node_ms, tx.epoch_ms};
        NodeActions act = step(l.st, NodeEvent{ev_in});
        l.est_base = l.st.clock.local_time_ms;
        l.real_base = now_;
        trace_.add(now_, l.spec.id, ev::sync,
                   "flood=" + std::to_string(tx.flood_id) +
                       ";offset_us=" + engdet::num((l.est_base - now_) * 1000.0) +
                       ";hops=" + std::to_string(tx.beacon.hops + 1));
        l.pending_listen = false;

        const bool relay = act.rebroadcast_beacon && lora_participant(l);
        if (relay) {
            SyncBeacon b = make_beacon(tx.beacon.source,
                                       static_cast<std::uint8_t>(tx.beacon.hops + 1),
                                       scn_.radio, l.rng);
            const double jitter =
                scn_.sync.t_node_jitter_ms > 0
                    ? l.rng.uniform(-scn_.sync.t_node_jitter_ms, scn_.sync.t_node_jitter_ms)
                    : 0.0;
            const double t_node_actual = std::max(0.05, scn_.sync.t_node_ms + jitter);
            // the receiver reconstructs elapsed time from this sync instant
            // using the nominal T_node and the delay field; the actual
            // processing jitter is exactly the per-hop error
            const double epoch = l.st.clock.local_time_ms;
            const NodeId id = l.spec.id;
            const std::uint32_t fid = tx.flood_id;
            const TxKind kind = tx.kind;
            at(now_ + t_node_actual + beacon_delay_ms(b), [this, id, b, epoch, fid, kind] {
                Rt& r = rt(id);
                if (!r.alive) return;
                Transmission m;
                m.beacon = b;
                m.epoch_ms = epoch;
                m.flood_id = fid;
                m.sf = scn_.radio.sf;
                begin_tx(id, kind, toa_beacon_ms_, m);
            });
        } else if (!l.pending_listen) {
            close_window(l, RadioMode::Sleep);
        }

        if (tx.kind == TxKind::Reset) {
            l.st.phase = Phase::Setup;
            l.st.schedule_view.clear();
            l.st.queue.clear();
            l.cycle_scheduled = false;
            trace_.add(now_, l.spec.id, ev::phase_change, "phase=setup;cause=reset");
        } else {
            begin_cycle_for(l, tx.flood_id);
        }
    }

    void on_data(Rt& l, const Transmission& tx) {
        if (tx.dest != l.spec.id) return; // not addressed here; jamming already applied
        if (l.window_slot >= 0) l.window_got = true;
        const double rssi = rssi_of(tx, l.spec.id);
        const bool corrupt = corruption_draw(tx, l.spec.id);
        last_uplink_rssi_[tx.sender] = rssi; // sender learns it at cycle end
        if (l.spec.id == hub_) origin_seen_[tx.packet.origin] += 1;
        EvPacketIn in{tx.packet, !corrupt, rssi};
        step(l.st, NodeEvent{in});
        trace_.add(now_, l.spec.id, corrupt ? ev::rx_crc_error : ev::rx_ok,
                   "kind=data;origin=" + std::to_string(tx.packet.origin) +
                       ";seq=" + std::to_string(tx.packet.seq) +
                       ";src=" + std::to_string(tx.sender) + ";rssi=" + engdet::num(rssi));
    }

    // ---- setup phase ------------------------------------------------------

    void start_setup(double net_t0, bool initial) {
        in_setup_ = true;
        setup_t0_ms_ = net_t0;
        needs_announce_.clear();
        tables_at_hub_.clear();
        holds_.clear();
        has_schedule_.clear();
        flood_slot_.clear();
        schedule_.reset();
        conn_.reset();
        silent_cycles_.clear();
        origin_seen_.clear();

        const int n = static_cast<int>(grid_ids_.size());
        for (auto& r : nodes_) {
            if (!r.alive || !lora_participant(r)) continue;
            r.st.phase = Phase::Setup;
            r.st.routing = RoutingTable{};
            r.st.routing.owner = r.spec.id;
            r.st.routing.own_hops = (r.spec.id == hub_) ? 0 : kUnreachedHops;
            r.st.schedule_view.clear();
            r.st.queue.clear();
            r.cycle_scheduled = false;
            r.pending_listen = false;
            const NodeId id = r.spec.id;
            at(real_for(r, net_t0), [this, id] {
                Rt& r2 = rt(id);
                if (!r2.alive) return;
                trace_.add(now_, id, ev::phase_change, "phase=setup");
                open_window(r2, -1);
            });
        }
        if (rt(hub_).alive) needs_announce_.insert(hub_);

        for (int round = 0; round < hello_rounds_; ++round) {
            for (int k = 0; k < n; ++k) {
                const NodeId id = grid_ids_[static_cast<std::size_t>(k)];
                const double t =
                    net_t0 + (round * n + k) * setup_slot_ms_ + kSetupTxOffset;
                at(real_for(rt(id), t), [this, id] { hello_slot(id); });
            }
        }
        const double t_tables = net_t0 + hello_rounds_ * n * setup_slot_ms_;
        at(real_for(rt(hub_), t_tables),
           [this, t_tables, initial] { begin_table_collection(t_tables, initial); });
    }

    void hello_slot(NodeId id) {
        Rt& r = rt(id);
        if (!r.alive || !in_setup_ || !lora_participant(r)) return;
        if (!needs_announce_.count(id)) return;
        needs_announce_.erase(id);
        Transmission m;
        m.hello_hops = r.st.routing.own_hops;
        m.sf = scn_.radio.sf;
        begin_tx(id, TxKind::Hello, toa_hello_ms_, m);
    }

    NodeId best_parent(const RoutingTable& t) const {
        NodeId best = t.owner;
        int best_h = 0x7FFF;
        for (const auto& e : t.entries) {
            if (e.hops == kUnreachedHops) continue;
            if (e.hops < best_h || (e.hops == best_h && e.neighbor < best)) {
                best = e.neighbor;
                best_h = e.hops;
            }
        }
        return best_h < static_cast<int>(t.own_hops) ? best : t.owner;
    }

    void begin_table_collection(double net_t, bool initial) {
        if (!in_setup_) return;
        struct Hop {
            NodeId from, to, owner;
        };
        std::vector<Hop> plan;
        std::vector<std::pair<int, NodeId>> order;
        for (NodeId id : grid_ids_) {
            const Rt& r = rt(id);
            if (!r.alive || id == hub_ || !lora_participant(r)) continue;
            if (r.st.routing.own_hops == kUnreachedHops) continue;
            order.emplace_back(-static_cast<int>(r.st.routing.own_hops), id);
        }
        std::sort(order.begin(), order.end());
        for (const auto& [negh, id] : order) {
            NodeId cur = id;
            int guard = 0;
            while (cur != hub_ && guard++ < static_cast<int>(grid_ids_.size())) {
                const NodeId parent = best_parent(rt(cur).st.routing);
                if (parent == cur) break;
                plan.push_back({cur, parent, id});
                cur = parent;
            }
        }
        for (std::size_t i = 0; i < plan.size() && i < static_cast<std::size_t>(table_slots_);
             ++i) {
            const Hop h = plan[i];
            const double t =
                net_t + static_cast<double>(i) * setup_slot_ms_ + kSetupTxOffset;
            at(real_for(rt(h.from), t), [this, h] {
                Rt& r = rt(h.from);
                if (!r.alive || !in_setup_) return;
                if (h.owner != h.from && !holds_.count({h.from, h.owner})) return;
                Transmission m;
                m.table_owner = h.owner;
                m.sf = scn_.radio.sf;
                const int bytes =
                    3 + 3 * static_cast<int>(rt(h.owner).st.routing.entries.size());
                begin_tx(h.from, TxKind::Table,
                         time_on_air_ms(scn_.radio, std::min(bytes, 255)), m);
            });
        }
        const double t_compute = net_t + table_slots_ * setup_slot_ms_ + 200.0;
        at(real_for(rt(hub_), t_compute),
           [this, t_compute, initial] { hub_compute_schedule(t_compute, initial); });
    }

    void hub_compute_schedule(double flood_t0, bool initial) {
        if (!in_setup_) return;
        Rt& h = rt(hub_);
        if (!h.alive) return;
        std::vector<RoutingTable> tables;
        tables.push_back(h.st.routing);
        for (NodeId id : tables_at_hub_)
            if (id != hub_) tables.push_back(rt(id).st.routing);
        conn_ = collect_routing_tables(tables, hub_);
        for (NodeId u : conn_->unreachable)
            trace_.add(now_, hub_, ev::phase_change, "unreachable=" + std::to_string(u));

        std::map<NodeId, int> own;
        for (const auto& c : clusters_) {
            if (!conn_->hops.count(c.bridge)) continue;
            int alive_members = 0;
            for (NodeId m : c.members)
                if (rt(m).alive && m != c.bridge) ++alive_members;
            own[c.bridge] = scn_.traffic.packets_per_node * (1 + alive_members);
        }
        auto nodelist = sorted_nodelist(*conn_, scn_.traffic.packets_per_node, own);
        BuildOptions opts;
        opts.hub_uplink = scn_.traffic.hub_uplink;
        opts.hub_own_packets = scn_.traffic.packets_per_node;
        opts.slot_duration_ms = scn_.traffic.slot_ms;
        opts.cycle_period_ms = scn_.traffic.period_s * 1000.0;
        schedule_ = build_schedule(nodelist, *conn_, opts);

        expected_origins_.clear();
        for (NodeId nid : conn_->nodes)
            if (nid != hub_) expected_origins_.insert(nid);
        for (const auto& c : clusters_)
            for (NodeId m : c.members)
                if (rt(m).alive && m != c.bridge) expected_origins_.insert(m);

        std::vector<NodeId> ordered(conn_->nodes);
        std::sort(ordered.begin(), ordered.end(), [&](NodeId a, NodeId b) {
            const int ha = conn_->hops.at(a), hb = conn_->hops.at(b);
            return ha != hb ? ha < hb : a < b;
        });
        int slot = 0;
        for (NodeId nid : ordered) flood_slot_[nid] = slot++;
        flood_t0_ms_ = flood_t0;

        h.st.schedule_view = schedule_->rows_for(hub_);
        has_schedule_.insert(hub_);
        Transmission m;
        m.sf = scn_.radio.sf;
        begin_tx(hub_, TxKind::ScheduleMsg, sched_slot_ms_ - 2.0 * kSetupTxOffset, m);

        const int n = static_cast<int>(grid_ids_.size());
        const double t_end = flood_t0 + n * sched_slot_ms_ + 500.0;
        at(real_for(h, t_end), [this, initial] { finish_setup(initial); });
    }

    void finish_setup(bool initial) {
        if (!in_setup_) return;
        in_setup_ = false;
        for (auto& r : nodes_) {
            if (!r.alive || !lora_participant(r)) continue;
            if (!has_schedule_.count(r.spec.id)) {
                r.pending_listen = true;
                if (!r.listening) open_window(r, -1);
                trace_.add(now_, r.spec.id, ev::phase_change, "phase=pending;cause=no_schedule");
                continue;
            }
            if (r.listening) close_window(r, RadioMode::Sleep);
            r.st.phase = Phase::DataPassing;
            trace_.add(now_, r.spec.id, ev::phase_change, "phase=data");
        }
        if (initial) {
            schedule_hub_cycle(0);
            arm_beacon_windows(0);
        } else {
            const std::uint32_t k = next_cycle_after(now_);
            if (k > 0) {
                const double anchor = est(rt(hub_), now_) + 500.0;
                run_data_phase(k - 1, anchor);
            }
            schedule_hub_cycle(k);
            arm_beacon_windows(k);
        }
    }

    std::uint32_t next_cycle_after(double t_real) const {
        const double period = scn_.traffic.period_s * 1000.0;
        const double k = std::ceil((t_real - cycle0_ms_) / period);
        return static_cast<std::uint32_t>(std::max(0.0, k));
    }

    // ---- cycles -------------------------------------------------------------

    double cycle_start_net(std::uint32_t k) const {
        return cycle0_ms_ + k * scn_.traffic.period_s * 1000.0;
    }

    void schedule_hub_cycle(std::uint32_t k) {
        if (k >= static_cast<std::uint32_t>(scn_.traffic.cycles)) return;
        at(real_for(rt(hub_), cycle_start_net(k)), [this, k] { hub_begin_cycle(k); });
    }

    void hub_begin_cycle(std::uint32_t k) {
        Rt& h = rt(hub_);
        if (!h.alive) return; // no beacon: the mesh stalls listening
        if (k < hub_cycle_next_) return;
        hub_cycle_next_ = k + 1;
        if (in_setup_) {
            schedule_hub_cycle(k + 1);
            return;
        }
        if (pending_reset_) {
            pending_reset_ = false;
            issue_reset(k);
            return;
        }
        h.synced_flood = k;
        SyncBeacon b = make_beacon(hub_, 0, scn_.radio, h.rng);
        const double jitter =
            scn_.sync.t_node_jitter_ms > 0
                ? h.rng.uniform(-scn_.sync.t_node_jitter_ms, scn_.sync.t_node_jitter_ms)
                : 0.0;
        const double t_node_actual = std::max(0.05, scn_.sync.t_node_ms + jitter);
        const double epoch = cycle_start_net(k); // the hub's sync instant
        at(now_ + t_node_actual + beacon_delay_ms(b), [this, b, epoch, k] {
            Rt& h2 = rt(hub_);
            if (!h2.alive) return;
            Transmission m;
            m.beacon = b;
            m.epoch_ms = epoch;
            m.flood_id = k;
            m.sf = scn_.radio.sf;
            begin_tx(hub_, TxKind::Sync, toa_beacon_ms_, m);
        });
        begin_cycle_for(h, k);
        schedule_hub_cycle(k + 1);
    }

    void begin_cycle_for(Rt& r, std::uint32_t k) {
        if (r.spec.id != hub_ &&
            (!has_schedule_.count(r.spec.id) || r.st.schedule_view.empty())) {
            // not scheduled yet: hold in RX for instructions
            r.pending_listen = true;
            if (!r.listening) open_window(r, -1);
            return;
        }
        if (r.cycle_scheduled) return;
        const bool own = (r.spec.id != hub_) || scn_.traffic.hub_uplink;
        EvCycleStart cs{k, scn_.traffic.payload_bytes, own};
        step(r.st, NodeEvent{cs});
        trace_.add(now_, r.spec.id, ev::phase_change, "phase=data;cycle=" + std::to_string(k));
        const double anchor = cycle_start_net(k) + scn_.sync.sync_window_ms;
        schedule_data_slots(r, k, anchor);
        if (r.spec.id == hub_) {
            cluster_round(k);
            const int nslots = schedule_ ? static_cast<int>(schedule_->slots.size()) : 0;
            const double t_check = anchor + nslots * scn_.traffic.slot_ms + toa_data_ms_ +
                                   2.0 * scn_.sync.guard_ms + 50.0;
            at(real_for(r, t_check), [this, k] { hub_cycle_check(k); });
        }
        arm_beacon_windows(k + 1);
    }

    void schedule_data_slots(Rt& r, std::uint32_t k, double anchor_net) {
        r.cycle_scheduled = true;
        r.expect_from.clear();
        r.miss_from.clear();
        const NodeId id = r.spec.id;
        for (const auto& [slot, action] : r.st.schedule_view) {
            const double t_net = anchor_net + slot * scn_.traffic.slot_ms;
            const int s = slot;
            if (action.kind == SlotActionKind::Send) {
                at(real_for(r, t_net), [this, id, s] { send_slot(id, s); });
            } else if (action.kind == SlotActionKind::Recv) {
                for (NodeId src : action.sources) r.expect_from[src] += 1;
                at(real_for(r, t_net - scn_.sync.guard_ms),
                   [this, id, s] { recv_slot_open(id, s); });
                at(real_for(r, t_net + toa_data_ms_ + scn_.sync.guard_ms),
                   [this, id, s] { recv_slot_close(id, s); });
            }
        }
        const int last = r.st.schedule_view.empty() ? -1 : r.st.schedule_view.back().first;
        const double t_done = anchor_net + (last + 1) * scn_.traffic.slot_ms + toa_data_ms_ +
                              2.0 * scn_.sync.guard_ms + 1.0;
        at(real_for(r, t_done), [this, id, k] { end_of_cycle(id, k); });
    }

    void send_slot(NodeId id, int slot) {
        Rt& r = rt(id);
        if (!r.alive || r.pending_listen) return;
        NodeActions act = step(r.st, NodeEvent{EvSlotBoundary{slot}});
        if (!act.transmit) return;
        Transmission m;
        m.packet = *act.transmit;
        m.dest = act.transmit_dest;
        m.sf = scn_.radio.sf;
        begin_tx(id, TxKind::Data,
                 time_on_air_ms(scn_.radio, static_cast<int>(m.packet.wire_size())), m);
    }

    void recv_slot_open(NodeId id, int slot) {
        Rt& r = rt(id);
        if (!r.alive || r.pending_listen) return;
        step(r.st, NodeEvent{EvSlotBoundary{slot}});
        open_window(r, slot);
    }

    void recv_slot_close(NodeId id, int slot) {
        Rt& r = rt(id);
        if (!r.alive || r.pending_listen) return;
        if (r.window_slot != slot) return; // superseded by the next window
        finalize_slot_window(r);
        close_window(r, RadioMode::Sleep);
    }

    void end_of_cycle(NodeId id, std::uint32_t k) {
        Rt& r = rt(id);
        if (!r.alive) return;
        r.cycle_scheduled = false;
        if (scn_.all.enabled && id != hub_) {
            auto it = last_uplink_rssi_.find(id);
            if (it != last_uplink_rssi_.end()) adapt_tx_power(r.st, it->second, scn_.all);
        }
        bool child_silent = false;
        for (const auto& [child, exp] : r.expect_from)
            if (exp > 0 && r.miss_from[child] >= exp) child_silent = true;
        if (child_silent && id != hub_ && !in_setup_) {
            r.st.missed_downlinks += 1;
            r.pending_listen = true;
            trace_.add(now_, id, ev::phase_change, "phase=pending;cause=silent_child");
            if (!r.listening) open_window(r, -1);
            return;
        }
        r.st.missed_downlinks = 0;
        if (!r.pending_listen && !in_setup_) {
            r.st.phase = Phase::Sleep;
            trace_.add(now_, id, ev::phase_change, "phase=sleep;cycle=" + std::to_string(k));
            set_mode(r, RadioMode::Sleep);
        }
    }

    void hub_cycle_check(std::uint32_t k) {
        Rt& h = rt(hub_);
        if (!h.alive || in_setup_) return;
        std::vector<NodeId> missing;
        for (NodeId origin : expected_origins_) {
            if (origin_seen_[origin] == 0)
                missing.push_back(origin);
            else
                silent_cycles_[origin] = 0;
        }
        for (NodeId m : missing) silent_cycles_[m] += 1;
        origin_seen_.clear();
        const int threshold = scn_.traffic.reset_after_silent_cycles;
        if (threshold <= 0) return;
        std::string who;
        for (NodeId m : missing)
            if (silent_cycles_[m] >= threshold) who += (who.empty() ? "" : "|") + std::to_string(m);
        if (!who.empty()) {
            pending_reset_ = true;
            trace_.add(now_, hub_, ev::reset, "missing=" + who + ";cycle=" + std::to_string(k));
        }
    }

    void issue_reset(std::uint32_t k) {
        Rt& h = rt(hub_);
        reset_count_ += 1;
        const std::uint32_t fid = 0x40000000u + reset_count_;
        h.synced_flood = fid;
        SyncBeacon b = make_beacon(hub_, 0, scn_.radio, h.rng);
        const double epoch = cycle_start_net(k);
        at(now_ + std::max(0.05, scn_.sync.t_node_ms) + beacon_delay_ms(b),
           [this, b, epoch, fid] {
               Rt& h2 = rt(hub_);
               if (!h2.alive) return;
               Transmission m;
               m.beacon = b;
               m.epoch_ms = epoch;
               m.flood_id = fid;
               m.sf = scn_.radio.sf;
               begin_tx(hub_, TxKind::Reset, toa_beacon_ms_, m);
           });
        const double t_setup = cycle_start_net(k) + 1000.0;
        at(real_for(h, t_setup), [this, t_setup] { start_setup(t_setup, false); });
        trace_.add(now_, hub_, ev::phase_change, "phase=setup;cause=reset_issued");
    }

    // data phase run immediately after a mid-run re-setup (the cycle whose
    // grid slot the reset consumed)
    void run_data_phase(std::uint32_t k, double anchor_net) {
        for (auto& r : nodes_) {
            if (!r.alive || !lora_participant(r)) continue;
            if (!has_schedule_.count(r.spec.id)) continue;
            if (r.cycle_scheduled) continue;
            const bool own = (r.spec.id != hub_) || scn_.traffic.hub_uplink;
            EvCycleStart cs{k, scn_.traffic.payload_bytes, own};
            step(r.st, NodeEvent{cs});
            schedule_data_slots(r, k, anchor_net);
        }
        cluster_round(k);
        const int nslots = schedule_ ? static_cast<int>(schedule_->slots.size()) : 0;
        const double t_check = anchor_net + nslots * scn_.traffic.slot_ms + toa_data_ms_ +
                               2.0 * scn_.sync.guard_ms + 50.0;
        at(real_for(rt(hub_), t_check), [this, k] { hub_cycle_check(k); });
    }

    void arm_beacon_windows(std::uint32_t k) {
        if (k >= static_cast<std::uint32_t>(scn_.traffic.cycles)) return;
        if (beacon_armed_.count(k)) return;
        beacon_armed_.insert(k);
        const double guard = scn_.sync.guard_ms +
                             2e-3 * scn_.sync.drift_ppm_band * scn_.traffic.period_s +
                             8.0 * scn_.sync.t_node_jitter_ms + 2.0;
        for (auto& r : nodes_) {
            if (!r.alive || r.spec.id == hub_ || !lora_participant(r)) continue;
            const NodeId id = r.spec.id;
            at(real_for(r, cycle_start_net(k) - guard), [this, id, k] {
                Rt& r2 = rt(id);
                if (!r2.alive || !lora_participant(r2) || r2.synced_flood == k) return;
                if (!r2.listening) open_window(r2, -1);
            });
            at(real_for(r, cycle_start_net(k) + scn_.sync.sync_window_ms), [this, id, k] {
                Rt& r2 = rt(id);
                if (!r2.alive || !lora_participant(r2)) return;
                if (r2.synced_flood == k || r2.synced_flood >= 0x40000000u || in_setup_)
                    return;
                if (r2.pending_listen) return;
                r2.pending_listen = true; // beacon missed: hold in RX
                trace_.add(now_, id, ev::phase_change, "phase=pending;cause=no_beacon");
                if (!r2.listening) open_window(r2, -1);
            });
        }
    }

    // ---- short-range clusters -----------------------------------------------

    void cluster_round(std::uint32_t k) {
        for (std::size_t ci = 0; ci < clusters_.size(); ++ci) {
            const double t_net = cycle_start_net(k) + 20.0;
            at(real_for(rt(clusters_[ci].bridge), t_net),
               [this, ci, k, t_net] { run_cluster_round(ci, k, t_net); });
        }
    }

    void run_cluster_round(std::size_t ci, std::uint32_t k, double round_net) {
        Cluster& c = clusters_[ci];
        Rt& b = rt(c.bridge);
        if (!b.alive) return; // spokes' failure timers will fire
        c.round_counter += 1;
        const std::uint64_t round = c.round_counter;
        double off = 0.0;
        for (NodeId m : c.members) {
            Rt& mr = rt(m);
            if (!mr.alive || m == c.bridge) continue;
            const NodeId mid = m;
            const NodeId bid = c.bridge;
            at(now_ + off, [this, mid, bid] {
                Rt& br = rt(bid);
                Rt& mr2 = rt(mid);
                if (!br.alive || !mr2.alive) return;
                trace_.add(now_, bid, ev::ant_poll, "member=" + std::to_string(mid));
                set_ant(br, RadioMode::AntTx);
                set_ant(mr2, RadioMode::AntRx);
            });
            at(now_ + off + scn_.power.ant_airtime_ms, [this, mid, bid, k] {
                Rt& br = rt(bid);
                Rt& mr2 = rt(mid);
                if (!br.alive || !mr2.alive) return;
                set_ant(mr2, RadioMode::AntTx);
                set_ant(br, RadioMode::AntRx);
                std::vector<std::uint8_t> payload(
                    static_cast<std::size_t>(scn_.traffic.payload_bytes) -
                        DataPacket::kHeaderBytes,
                    0x5A);
                DataPacket pkt = DataPacket::make(mid, static_cast<std::uint16_t>(k), mid,
                                                  std::move(payload));
                trace_.add(now_, mid, ev::ant_upload,
                           "bridge=" + std::to_string(bid) + ";seq=" + std::to_string(k));
                if (bid == hub_) {
                    origin_seen_[mid] += 1;
                    trace_.add(now_, hub_, ev::rx_ok,
                               "kind=data;origin=" + std::to_string(mid) +
                                   ";seq=" + std::to_string(k) + ";src=" + std::to_string(mid) +
                                   ";via=ant");
                    if (scn_.traffic.hub_uplink) br.st.queue.push_back(pkt);
                } else {
                    br.st.queue.push_back(pkt);
                }
            });
            at(now_ + off + 2 * scn_.power.ant_airtime_ms, [this, mid, bid] {
                Rt& br = rt(bid);
                Rt& mr2 = rt(mid);
                if (mr2.alive) set_ant(mr2, RadioMode::Off);
                if (br.alive) set_ant(br, RadioMode::Off);
            });
            off += 5.0;
        }
        const double expiry_net = round_net + scn_.srsn.timer_multiplier * scn_.poll_period_ms();
        for (NodeId m : c.members) {
            if (!rt(m).alive || m == c.bridge) continue;
            const NodeId mid = m;
            at(real_for(rt(m), expiry_net),
               [this, ci, round, mid] { cluster_timer_expired(ci, round, mid); });
        }
        at(now_ + off + 5.0, [this, ci, k] { ams_check(ci, k); });
    }

    void cluster_timer_expired(std::size_t ci, std::uint64_t round, NodeId member) {
        Cluster& c = clusters_[ci];
        if (c.round_counter != round) return; // a newer round re-armed the timer
        if (c.reinit_done_for == round) return;
        if (!rt(member).alive) return;
        c.reinit_done_for = round;
        trace_.add(now_, member, ev::srsn_reset,
                   "cluster=" + std::to_string(c.bridge) + ";timer_ms=" +
                       engdet::num(scn_.srsn.timer_multiplier * scn_.poll_period_ms()));
        std::vector<SrsnState::Member> survivors;
        for (NodeId mm : c.members)
            if (rt(mm).alive && mm != c.bridge) survivors.push_back({mm, battery_frac(rt(mm))});
        if (survivors.empty()) return;
        const NodeId new_bridge = elect_hub(survivors);
        const NodeId old = c.bridge;
        promote_bridge(c, new_bridge, /*adopt_schedule=*/false);
        trace_.add(now_, new_bridge, ev::handoff,
                   "from=" + std::to_string(old) + ";to=" + std::to_string(new_bridge) +
                       ";cause=failure");
        Rt& nb = rt(new_bridge);
        nb.pending_listen = true;
        if (!nb.listening) open_window(nb, -1);
        trace_.add(now_, new_bridge, ev::phase_change, "phase=pending;cause=srsn_promotion");
    }

    void ams_check(std::size_t ci, std::uint32_t k) {
        if (!scn_.srsn.ams) return;
        Cluster& c = clusters_[ci];
        Rt& b = rt(c.bridge);
        if (!b.alive) return;
        if (battery_frac(b) >= scn_.srsn.ams_threshold) return;
        std::vector<SrsnState::Member> all;
        all.push_back({c.bridge, battery_frac(b)});
        for (NodeId m : c.members)
            if (rt(m).alive && m != c.bridge) all.push_back({m, battery_frac(rt(m))});
        const NodeId next = elect_hub(all);
        if (next == c.bridge) return;
        // the old hub finishes the running cycle; the elected node assumes
        // bridging at the next cycle boundary
        const double t_apply = cycle_start_net(k + 1) - 100.0;
        at(real_for(b, t_apply), [this, ci, next] {
            Cluster& c2 = clusters_[ci];
            if (!rt(c2.bridge).alive || !rt(next).alive) return;
            if (c2.bridge == next) return;
            const NodeId old = c2.bridge;
            promote_bridge(c2, next, /*adopt_schedule=*/true);
            trace_.add(now_, next, ev::ams_handoff,
                       "from=" + std::to_string(old) + ";to=" + std::to_string(next));
        });
    }

    void promote_bridge(Cluster& c, NodeId next, bool adopt_schedule) {
        Rt& old_rt = rt(c.bridge);
        Rt& new_rt = rt(next);
        if (adopt_schedule) {
            // co-located cluster: the new bridge takes over the old one's
            // slots and pending queue, nothing in flight is lost
            new_rt.st.schedule_view = old_rt.st.schedule_view;
            for (auto& p : old_rt.st.queue) new_rt.st.queue.push_back(p);
            old_rt.st.queue.clear();
            old_rt.st.schedule_view.clear();
            has_schedule_.insert(next);
            has_schedule_.erase(c.bridge);
            new_rt.est_base = est(old_rt, now_);
            new_rt.real_base = now_;
            new_rt.synced_flood = old_rt.synced_flood;
            // listen for the next beacon; no window was armed while a spoke
            new_rt.pending_listen = true;
            if (!new_rt.listening) open_window(new_rt, -1);
            // the demoted node returns to plain spoke duty
            old_rt.pending_listen = false;
            if (old_rt.listening) close_window(old_rt, RadioMode::Sleep);
        }
        bool swapped = false;
        for (NodeId& m : c.members) {
            if (m == next) {
                m = c.bridge;
                swapped = true;
                break;
            }
        }
        if (!swapped) c.members.push_back(c.bridge);
        c.bridge = next;
    }

    // ---- aloha reference nodes ------------------------------------------

    void schedule_aloha(NodeId id) {
        Rng ar(Rng::mix(scn_.seed, Rng::mix(0x616c6f68, id)));
        const double period = scn_.traffic.aloha_period_s * 1000.0;
        const double t_end = cycle0_ms_ + scn_.duration_ms();
        double t0 = cycle0_ms_;
        std::uint16_t seq = 0;
        while (t0 + period <= t_end + 1.0) {
            const double dither = ar.uniform01() * std::max(0.0, period - toa_aloha_ms_);
            const double t_tx = t0 + dither;
            const std::uint16_t s = seq++;
            at(t_tx, [this, id, s] {
                Rt& r = rt(id);
                if (!r.alive) return;
                std::vector<std::uint8_t> payload(
                    static_cast<std::size_t>(scn_.traffic.aloha_payload_bytes) -
                        DataPacket::kHeaderBytes,
                    0x3C);
                Transmission m;
                m.packet = DataPacket::make(id, s, id, std::move(payload));
                m.dest = kGatewayId;
                m.sf = scn_.traffic.aloha_sf;
                begin_tx(id, TxKind::Data, toa_aloha_ms_, m);
            });
            t0 += period;
        }
    }

    // ---- faults ------------------------------------------------------------

    void schedule_faults() {
        for (const auto& f : scn_.faults) {
            const double t = f.t_s * 1000.0;
            const NodeId id = f.node;
            if (f.action == FaultSpec::Action::Kill) {
                at(t, [this, id] {
                    Rt& r = rt(id);
                    if (!r.alive) return;
                    set_mode(r, RadioMode::Off);
                    r.alive = false;
                    r.listening = false;
                    r.pending_listen = false;
                    trace_.add(now_, id, ev::phase_change, "phase=killed");
                });
            } else {
                at(t, [this, id] {
                    Rt& r = rt(id);
                    if (r.alive) return;
                    r.alive = true;
                    r.st = NodeState{};
                    r.st.id = id;
                    r.st.routing.owner = id;
                    r.st.is_hub = (id == hub_);
                    r.st.forward_uplink = scn_.traffic.hub_uplink;
                    r.st.clock.guard_ms = scn_.sync.guard_ms;
                    r.st.tx_power_dbm =
                        r.spec.tx_power_dbm ? *r.spec.tx_power_dbm : scn_.radio.tx_power_dbm;
                    r.pending_listen = true;
                    r.synced_flood = 0xFFFFFFFF;
                    open_window(r, -1);
                    trace_.add(now_, id, ev::phase_change, "phase=revived");
                });
            }
        }
    }

    // ---- trace metadata ------------------------------------------------

    void emit_meta() {
        const std::string cfg_text = emit_scenario(scn_);
        trace_.add(0.0, 0, ev::meta,
                   "key=scenario;name=" + scn_.name + ";seed=" + std::to_string(scn_.seed) +
                       ";period_ms=" + engdet::num(scn_.traffic.period_s * 1000.0) +
                       ";cycles=" + std::to_string(scn_.traffic.cycles) +
                       ";cycle0_ms=" + engdet::num(cycle0_ms_) +
                       ";ppn=" + std::to_string(scn_.traffic.packets_per_node) +
                       ";aloha_period_ms=" + engdet::num(scn_.traffic.aloha_period_s * 1000.0) +
                       ";hub=" + std::to_string(hub_) +
                       ";uplink=" + (scn_.traffic.hub_uplink ? std::string("1") : std::string("0")) +
                       ";hash=" + std::to_string(engdet::fnv1a(cfg_text)));
        for (const auto& n : scn_.nodes) {
            std::string d = std::string("key=node;role=") + role_name(n.role) +
                            ";battery_mah=" + engdet::num(n.battery_mah);
            for (const auto& c : scn_.srsn.clusters) {
                if (c.bridge == n.id) d += ";bridge=1";
                for (NodeId m : c.members)
                    if (m == n.id) d += ";cluster=" + std::to_string(c.bridge);
            }
            trace_.add(0.0, n.id, ev::meta, d);
        }
    }

private:
    std::map<NodeId, int> origin_seen_; // per-origin arrivals since last hub check

    Scenario scn_;
    std::vector<Rt> nodes_;
    std::map<NodeId, std::size_t> index_;
    NodeId hub_ = 0;

    std::priority_queue<Ev> queue_;
    std::uint64_t seq_ = 0;
    double now_ = 0.0;
    std::vector<Transmission> active_;
    std::uint64_t next_tx_uid_ = 1;

    EventTrace trace_;

    bool in_setup_ = false;
    double setup_t0_ms_ = 0.0;
    double setup_dur_ms_ = 0.0;
    double cycle0_ms_ = 0.0;
    int hello_rounds_ = 0;
    int table_slots_ = 0;
    double sched_slot_ms_ = 0.0;
    double setup_slot_ms_ = 0.0;
    std::vector<NodeId> grid_ids_;
    std::set<NodeId> needs_announce_;
    std::set<NodeId> tables_at_hub_;
    std::set<std::pair<NodeId, NodeId>> holds_; // (holder, table owner)
    std::set<NodeId> has_schedule_;
    std::map<NodeId, int> flood_slot_;
    double flood_t0_ms_ = 0.0;

    std::optional<ConnectivityTable> conn_;
    std::optional<Schedule> schedule_;

    std::set<NodeId> expected_origins_;
    std::map<NodeId, int> silent_cycles_;
    std::set<std::uint32_t> beacon_armed_;
    bool pending_reset_ = false;
    std::uint32_t hub_cycle_next_ = 0;
    std::uint32_t reset_count_ = 0;
    std::map<NodeId, double> last_uplink_rssi_;

    std::vector<Cluster> clusters_;

    double toa_data_ms_ = 0.0;
    double toa_beacon_ms_ = 0.0;
    double toa_hello_ms_ = 0.0;
    double toa_aloha_ms_ = 0.0;
};

/// Runs a scenario start to finish and returns its trace.
inline EventTrace run(const Scenario& scn) {
    Simulation sim(scn);
    return sim.run();
}

} // namespace lpmesh
