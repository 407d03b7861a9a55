#include <catch2/catch_amalgamated.hpp>

#include "lpmesh/node.hpp"

using namespace lpmesh;

namespace {

NodeState leaf_with_send_slot() {
    NodeState st;
    st.id = 3;
    st.schedule_view = {{0, SlotAction{SlotActionKind::Send, 2, {}}}};
    return st;
}

} // namespace

TEST_CASE("cycle start generates one own packet") {
    NodeState st = leaf_with_send_slot();
    step(st, NodeEvent{EvCycleStart{0, 64, true}});
    REQUIRE(st.queue.size() == 1);
    CHECK(st.queue.front().origin == 3);
    CHECK(st.queue.front().wire_size() == 64);
    CHECK(st.phase == Phase::DataPassing);
    // hub without an uplink keeps quiet
    NodeState hub;
    hub.id = 1;
    hub.is_hub = true;
    step(hub, NodeEvent{EvCycleStart{0, 64, false}});
    CHECK(hub.queue.empty());
}

TEST_CASE("leaf send slot pops and transmits, later slots sleep") {
    NodeState st = leaf_with_send_slot();
    step(st, NodeEvent{EvCycleStart{0, 64, true}});
    NodeActions act = step(st, NodeEvent{EvSlotBoundary{0}});
    REQUIRE(act.transmit.has_value());
    CHECK(act.transmit->origin == 3);
    CHECK(act.transmit->hop_src == 3);
    CHECK(act.transmit_dest == 2);
    CHECK(st.queue.empty());

    NodeActions later = step(st, NodeEvent{EvSlotBoundary{1}});
    CHECK(later.sleep);
    CHECK(st.phase == Phase::Sleep);
}

TEST_CASE("send slot with an empty queue stays silent") {
    NodeState st = leaf_with_send_slot();
    NodeActions act = step(st, NodeEvent{EvSlotBoundary{0}});
    CHECK(!act.transmit.has_value());
    CHECK(act.sleep);
}

TEST_CASE("relay forwards accumulated packets in schedule order") {
    // 3-node line: relay 2 holds two received packets plus its own
    NodeState relay;
    relay.id = 2;
    relay.schedule_view = {
        {0, SlotAction{SlotActionKind::Recv, 0, {3}}},
        {1, SlotAction{SlotActionKind::Recv, 0, {3}}},
        {2, SlotAction{SlotActionKind::Send, 1, {}}},
        {3, SlotAction{SlotActionKind::Send, 1, {}}},
        {4, SlotAction{SlotActionKind::Send, 1, {}}},
    };
    step(relay, NodeEvent{EvCycleStart{0, 64, true}});
    for (std::uint16_t seq = 0; seq < 2; ++seq) {
        DataPacket p = DataPacket::make(3, seq, 3, std::vector<std::uint8_t>(55, 1));
        NodeActions a = step(relay, NodeEvent{EvPacketIn{p, true, -90.0}});
        CHECK(!a.deliver);
    }
    CHECK(relay.queue.size() == 3);
    int sent = 0;
    for (int slot = 2; slot <= 4; ++slot) {
        NodeActions a = step(relay, NodeEvent{EvSlotBoundary{slot}});
        if (a.transmit) {
            ++sent;
            CHECK(a.transmit->hop_src == 2); // relabeled at each hop
            CHECK(a.transmit_dest == 1);
        }
    }
    CHECK(sent == 3);
    CHECK(relay.queue.empty());
    CHECK(relay.forwarded == 2);
}

TEST_CASE("bad crc is counted and never forwarded") {
    NodeState st;
    st.id = 2;
    DataPacket p = DataPacket::make(3, 0, 3, std::vector<std::uint8_t>(10, 1));
    NodeActions a = step(st, NodeEvent{EvPacketIn{p, false, -90.0}});
    CHECK(!a.deliver);
    CHECK(st.queue.empty());
    CHECK(st.crc_errors == 1);
}

TEST_CASE("hub delivers instead of forwarding") {
    NodeState hub;
    hub.id = 1;
    hub.is_hub = true;
    DataPacket p = DataPacket::make(3, 0, 2, std::vector<std::uint8_t>(10, 1));
    NodeActions a = step(hub, NodeEvent{EvPacketIn{p, true, -88.0}});
    CHECK(a.deliver);
    CHECK(hub.queue.empty()); // no uplink configured
    hub.forward_uplink = true;
    a = step(hub, NodeEvent{EvPacketIn{p, true, -88.0}});
    CHECK(a.deliver);
    CHECK(hub.queue.size() == 1);
    CHECK(hub.rssi_history.at(2) == -88.0);
}

TEST_CASE("beacon event corrects the clock and requests a rebroadcast") {
    NodeState st;
    st.id = 4;
    SyncBeacon b{1, 2, 100};
    NodeActions a = step(st, NodeEvent{EvBeaconIn{b, 30.976, 2.0, 1000.0}});
    CHECK(a.rebroadcast_beacon);
    CHECK_THAT(st.clock.local_time_ms,
               Catch::Matchers::WithinAbs(1000.0 + 30.976 + 2.0 + 3.2, 1e-9));
}

TEST_CASE("power controller walks down to the band and holds") {
    AllParams p;
    p.enabled = true;
    NodeState st;
    st.tx_power_dbm = 15;
    // deterministic link: rssi = power - 118.06 (400 m, exponent 3)
    auto rssi = [&] { return st.tx_power_dbm - 118.06; };
    std::vector<int> history;
    for (int i = 0; i < 10; ++i) {
        adapt_tx_power(st, rssi(), p);
        history.push_back(st.tx_power_dbm);
    }
    CHECK(history[0] == 12);
    CHECK(history[1] == 9);
    for (std::size_t i = 2; i < history.size(); ++i) CHECK(history[i] == 9); // no oscillation
    CHECK(rssi() >= p.floor_dbm + 0.0);
    // 9 dBm is the lowest setting keeping the link above floor+margin
    CHECK(9 - 118.06 >= p.floor_dbm + p.margin_db - p.step_db);
    CHECK(6 - 118.06 < p.floor_dbm + p.margin_db);
}

TEST_CASE("power controller boundary cases") {
    AllParams p;
    p.enabled = true;
    NodeState st;
    st.tx_power_dbm = 10;
    adapt_tx_power(st, -90.0, p); // far above the band
    CHECK(st.tx_power_dbm == 7);
    st.tx_power_dbm = 10;
    adapt_tx_power(st, -121.0, p); // below the floor
    CHECK(st.tx_power_dbm == 13);
    st.tx_power_dbm = 10;
    adapt_tx_power(st, -110.0, p); // exactly floor+margin: dead band
    CHECK(st.tx_power_dbm == 10);
    st.tx_power_dbm = kTxPowerMaxDbm;
    adapt_tx_power(st, -130.0, p); // clamped at the top
    CHECK(st.tx_power_dbm == kTxPowerMaxDbm);
    st.tx_power_dbm = kTxPowerMinDbm;
    adapt_tx_power(st, -80.0, p); // clamped at the bottom
    CHECK(st.tx_power_dbm == kTxPowerMinDbm);
    AllParams off;
    st.tx_power_dbm = 10;
    adapt_tx_power(st, -121.0, off);
    CHECK(st.tx_power_dbm == 10);
}
