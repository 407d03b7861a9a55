#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lpmesh/types.hpp"

namespace lpmesh {

// Event kinds are plain strings in the CSV; these constants keep producers
// and consumers aligned.
namespace ev {
inline constexpr const char* tx_start = "tx_start";
inline constexpr const char* tx_end = "tx_end";
inline constexpr const char* rx_ok = "rx_ok";
inline constexpr const char* rx_crc_error = "rx_crc_error";
inline constexpr const char* rx_missed = "rx_missed";
inline constexpr const char* collision = "collision";
inline constexpr const char* phase_change = "phase_change";
inline constexpr const char* energy_delta_mc = "energy_delta_mc";
inline constexpr const char* handoff = "handoff";
inline constexpr const char* reset = "reset";
inline constexpr const char* sync = "sync";
inline constexpr const char* ant_poll = "ant_poll";
inline constexpr const char* ant_upload = "ant_upload";
inline constexpr const char* ams_handoff = "ams_handoff";
inline constexpr const char* srsn_reset = "srsn_reset";
inline constexpr const char* meta = "meta";
} // namespace ev

struct TraceRecord {
    double t_ms = 0.0;
    NodeId node = 0;
    std::string event;
    std::string detail; // semicolon-separated key=value pairs

    bool operator==(const TraceRecord&) const = default;
};

inline std::string fmt_ms(double t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", t);
    return buf;
}

/// Timestamped record of everything that happened in one simulation run.
struct EventTrace {
    std::vector<TraceRecord> records;

    void add(double t_ms, NodeId node, std::string event, std::string detail = {}) {
        records.push_back({t_ms, node, std::move(event), std::move(detail)});
    }

    std::string to_csv() const {
        std::ostringstream os;
        os << "t_ms,node,event,detail\n";
        for (const auto& r : records)
            os << fmt_ms(r.t_ms) << "," << r.node << "," << r.event << "," << r.detail << "\n";
        return os.str();
    }

    static EventTrace from_csv(std::istream& in) {
        EventTrace tr;
        std::string line;
        if (!std::getline(in, line) || line != "t_ms,node,event,detail")
            throw ParseError("missing trace header", 1);
        int lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            TraceRecord r;
            std::size_t a = line.find(',');
            std::size_t b = line.find(',', a + 1);
            std::size_t c = line.find(',', b + 1);
            if (a == std::string::npos || b == std::string::npos || c == std::string::npos)
                throw ParseError("malformed trace row", lineno);
            try {
                r.t_ms = std::stod(line.substr(0, a));
                r.node = static_cast<NodeId>(std::stoul(line.substr(a + 1, b - a - 1)));
            } catch (const std::exception&) {
                throw ParseError("malformed trace row", lineno);
            }
            r.event = line.substr(b + 1, c - b - 1);
            r.detail = line.substr(c + 1);
            tr.records.push_back(std::move(r));
        }
        return tr;
    }

    static EventTrace load(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw ScenarioError("cannot open trace file: " + path);
        return from_csv(f);
    }
};

/// Pulls `key=` out of a detail string; empty when absent.
inline std::string detail_get(const std::string& detail, const std::string& key) {
    std::size_t pos = 0;
    while (pos < detail.size()) {
        std::size_t end = detail.find(';', pos);
        if (end == std::string::npos) end = detail.size();
        std::size_t eq = detail.find('=', pos);
        if (eq != std::string::npos && eq < end && detail.substr(pos, eq - pos) == key)
            return detail.substr(eq + 1, end - eq - 1);
        pos = end + 1;
    }
    return {};
}

} // namespace lpmesh
