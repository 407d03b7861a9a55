#include <catch2/catch_amalgamated.hpp>

#include "lpmesh/rng.hpp"
#include "lpmesh/wire.hpp"

using namespace lpmesh;

TEST_CASE("crc16 known vector") {
    const char* s = "123456789";
    CHECK(crc16(reinterpret_cast<const std::uint8_t*>(s), 9) == 0x29B1);
}

TEST_CASE("crc detects every single-bit payload flip") {
    Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::uint8_t> payload(1 + rng.uniform_u32(54));
        for (auto& b : payload) b = static_cast<std::uint8_t>(rng.next() & 0xFF);
        DataPacket p = DataPacket::make(7, 1, 7, payload);
        REQUIRE(p.crc_ok());
        const std::size_t bit = rng.uniform_u32(static_cast<std::uint32_t>(payload.size() * 8));
        DataPacket corrupted = p;
        corrupted.payload[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
        CHECK(!corrupted.crc_ok());
    }
}

TEST_CASE("hello message wire layout") {
    HelloMessage h{0x1234, 3};
    auto bytes = h.encode();
    REQUIRE(bytes.size() == 4);
    CHECK(bytes[0] == 0x12);
    CHECK(bytes[1] == 0x34);
    CHECK(bytes[2] == 3);
    CHECK(bytes[3] == 0x01);
    CHECK(HelloMessage::decode(bytes) == h);
}

TEST_CASE("sync beacon is exactly five bytes, big-endian") {
    SyncBeacon b{0xABCD, 7, 0x0321};
    auto bytes = b.encode();
    REQUIRE(bytes.size() == kSyncBeaconBytes);
    CHECK(bytes[0] == 0xAB);
    CHECK(bytes[1] == 0xCD);
    CHECK(bytes[2] == 7);
    CHECK(bytes[3] == 0x03);
    CHECK(bytes[4] == 0x21);
    CHECK(SyncBeacon::decode(bytes) == b);
}

TEST_CASE("beacon round trip over random field values") {
    Rng rng(5);
    for (int i = 0; i < 500; ++i) {
        SyncBeacon b{static_cast<NodeId>(rng.next() & 0xFFFF),
                     static_cast<std::uint8_t>(rng.next() & 0xFF),
                     static_cast<std::uint16_t>(rng.next() & 0xFFFF)};
        CHECK(SyncBeacon::decode(b.encode()) == b);
    }
}

TEST_CASE("data frame wire layout") {
    DataPacket p = DataPacket::make(0x0102, 0x0304, 0x0506, {0xAA, 0xBB});
    auto bytes = p.encode();
    REQUIRE(bytes.size() == 11);
    CHECK(bytes[0] == 0x01);
    CHECK(bytes[1] == 0x02);
    CHECK(bytes[2] == 0x03);
    CHECK(bytes[3] == 0x04);
    CHECK(bytes[4] == 0x05);
    CHECK(bytes[5] == 0x06);
    CHECK(bytes[6] == 2);
    CHECK(bytes[7] == 0xAA);
    CHECK(bytes[8] == 0xBB);
    const std::uint16_t crc = crc16(p.payload);
    CHECK(bytes[9] == (crc >> 8));
    CHECK(bytes[10] == (crc & 0xFF));
    CHECK(DataPacket::decode(bytes) == p);
}

TEST_CASE("data frame size limit") {
    std::vector<std::uint8_t> big(247, 0);
    CHECK_THROWS_AS(DataPacket::make(1, 1, 1, big), std::domain_error);
    std::vector<std::uint8_t> ok(246, 0);
    CHECK(DataPacket::make(1, 1, 1, ok).wire_size() == 255);
}

TEST_CASE("data frame decode round trip on random payloads") {
    Rng rng(77);
    for (int i = 0; i < 200; ++i) {
        std::vector<std::uint8_t> payload(rng.uniform_u32(247));
        for (auto& b : payload) b = static_cast<std::uint8_t>(rng.next() & 0xFF);
        DataPacket p = DataPacket::make(static_cast<NodeId>(rng.next() & 0xFFFF),
                                        static_cast<std::uint16_t>(rng.next() & 0xFFFF),
                                        static_cast<NodeId>(rng.next() & 0xFFFF), payload);
        CHECK(DataPacket::decode(p.encode()) == p);
    }
    CHECK_THROWS_AS(DataPacket::decode(std::vector<std::uint8_t>{1, 2, 3}), ConfigError);
}
