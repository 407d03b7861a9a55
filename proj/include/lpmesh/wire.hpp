#pragma once

#include <cstdint>
#include <vector>

#include "lpmesh/types.hpp"

namespace lpmesh {

// CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflection, xorout 0.
inline std::uint16_t crc16(const std::uint8_t* data, std::size_t len) {
    std::uint16_t crc = 0xFFFF;
    for (std::size_t i = 0; i < len; ++i) {
        crc ^= static_cast<std::uint16_t>(data[i]) << 8;
        for (int b = 0; b < 8; ++b)
            crc = (crc & 0x8000) ? static_cast<std::uint16_t>((crc << 1) ^ 0x1021)
                                 : static_cast<std::uint16_t>(crc << 1);
    }
    return crc;
}

inline std::uint16_t crc16(const std::vector<std::uint8_t>& data) {
    return crc16(data.data(), data.size());
}

namespace detail {
inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}
inline std::uint16_t get_u16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>((p[0] << 8) | p[1]);
}
} // namespace detail

enum class MsgType : std::uint8_t {
    Hello = 0x01,
    SyncBeacon = 0x02,
    ResetBeacon = 0x03,
    RoutingTable = 0x04,
    Schedule = 0x05,
    Data = 0x06,
};

/// Setup-phase flooding beacon: [sender:16][hops:8][type:8], 4 bytes.
struct HelloMessage {
    NodeId sender = 0;
    std::uint8_t sender_hops = 0;

    std::vector<std::uint8_t> encode() const {
        std::vector<std::uint8_t> out;
        detail::put_u16(out, sender);
        out.push_back(sender_hops);
        out.push_back(static_cast<std::uint8_t>(MsgType::Hello));
        return out;
    }

    static HelloMessage decode(const std::vector<std::uint8_t>& in) {
        if (in.size() != 4 || in[3] != static_cast<std::uint8_t>(MsgType::Hello))
            throw ConfigError("malformed hello message");
        return HelloMessage{detail::get_u16(in.data()), in[2]};
    }

    bool operator==(const HelloMessage&) const = default;
};

/// Time-sync flooding beacon: [source:16][hops:8][delay_ticks:16], 5 bytes,
/// big-endian. One tick is 32 us.
struct SyncBeacon {
    NodeId source = 0;
    std::uint8_t hops = 0;
    std::uint16_t delay_ticks = 0;

    std::vector<std::uint8_t> encode() const {
        std::vector<std::uint8_t> out;
        detail::put_u16(out, source);
        out.push_back(hops);
        detail::put_u16(out, delay_ticks);
        return out;
    }

    static SyncBeacon decode(const std::vector<std::uint8_t>& in) {
        if (in.size() != 5) throw ConfigError("sync beacon must be exactly 5 bytes");
        return SyncBeacon{detail::get_u16(in.data()), in[2], detail::get_u16(in.data() + 3)};
    }

    bool operator==(const SyncBeacon&) const = default;
};

inline constexpr std::size_t kSyncBeaconBytes = 5;
inline constexpr double kDelayTickMs = 0.032;

/// Application data frame:
/// [origin:16][seq:16][hop_src:16][len:8][payload:len][crc16:16].
/// crc covers the payload bytes.
struct DataPacket {
    NodeId origin = 0;
    std::uint16_t seq = 0;
    NodeId hop_src = 0;
    std::vector<std::uint8_t> payload;
    std::uint16_t crc = 0;

    static constexpr std::size_t kHeaderBytes = 9; // everything but the payload

    static DataPacket make(NodeId origin, std::uint16_t seq, NodeId hop_src,
                           std::vector<std::uint8_t> payload) {
        if (payload.size() + kHeaderBytes > 255)
            throw std::domain_error("data frame exceeds 255 bytes");
        DataPacket p{origin, seq, hop_src, std::move(payload), 0};
        p.crc = crc16(p.payload);
        return p;
    }

    bool crc_ok() const { return crc16(payload) == crc; }

    std::size_t wire_size() const { return kHeaderBytes + payload.size(); }

    std::vector<std::uint8_t> encode() const {
        std::vector<std::uint8_t> out;
        detail::put_u16(out, origin);
        detail::put_u16(out, seq);
        detail::put_u16(out, hop_src);
        out.push_back(static_cast<std::uint8_t>(payload.size()));
        out.insert(out.end(), payload.begin(), payload.end());
        detail::put_u16(out, crc);
        return out;
    }

    static DataPacket decode(const std::vector<std::uint8_t>& in) {
        if (in.size() < kHeaderBytes) throw ConfigError("truncated data frame");
        const std::uint8_t len = in[6];
        if (in.size() != kHeaderBytes + len) throw ConfigError("data frame length mismatch");
        DataPacket p;
        p.origin = detail::get_u16(in.data());
        p.seq = detail::get_u16(in.data() + 2);
        p.hop_src = detail::get_u16(in.data() + 4);
        p.payload.assign(in.begin() + 7, in.begin() + 7 + len);
        p.crc = detail::get_u16(in.data() + 7 + len);
        return p;
    }

    bool operator==(const DataPacket&) const = default;
};

} // namespace lpmesh
