#pragma once

#include <cmath>
#include <limits>
#include <map>

#include "lpmesh/rng.hpp"
#include "lpmesh/types.hpp"

namespace lpmesh {

/// LoRa modem configuration. cr is the coding-rate denominator index, i.e.
/// cr=1 means 4/5 and cr=4 means 4/8.
struct RadioConfig {
    int sf = 7;
    int bw_hz = 125000;
    int cr = 1;
    int preamble_symbols = 8;
    bool crc_on = true;
    bool explicit_header = true;
    int tx_power_dbm = 0;
};

inline constexpr int kTxPowerMinDbm = -9;
inline constexpr int kTxPowerMaxDbm = 22;

inline void validate(const RadioConfig& cfg) {
    if (cfg.sf < 6 || cfg.sf > 12)
        throw ConfigError("spreading factor out of range [6,12]: " + std::to_string(cfg.sf));
    if (cfg.bw_hz != 125000 && cfg.bw_hz != 250000 && cfg.bw_hz != 500000)
        throw ConfigError("bandwidth must be 125/250/500 kHz, got " + std::to_string(cfg.bw_hz));
    if (cfg.cr < 1 || cfg.cr > 4)
        throw ConfigError("coding rate index out of range [1,4]");
    if (cfg.preamble_symbols < 6)
        throw ConfigError("preamble length must be >= 6 symbols");
    if (cfg.tx_power_dbm < kTxPowerMinDbm || cfg.tx_power_dbm > kTxPowerMaxDbm)
        throw ConfigError("tx power out of transceiver range [-9,22] dBm");
}

/// Electrical profile of the node hardware. Currents in mA except sleep
/// (uA); consumed-power map in mW keyed by tx power in dBm.
struct PowerProfile {
    std::map<int, double> p_cons_tx_mw = {{20, 389.4}};
    double p_rx_mw = 15.2;
    double i_sleep_ua = 25.0;
    double i_lora_rx_ma = 12.5;
    double i_lora_tx_ma = 72.5;
    double i_ant_tx_ma = 10.0;
    double i_ant_rx_ma = 10.0;
    double supply_v = 3.3;
    double ant_airtime_ms = 1.0; // fixed per-packet short-range airtime
};

/// Log-distance channel with per-SF receiver sensitivity.
struct ChannelModel {
    double path_loss_exponent = 3.0;
    double reference_loss_db = 40.0; // loss at 1 m
    std::map<int, double> sensitivity_dbm = {
        {7, -124.0}, {8, -127.0}, {9, -130.0}, {10, -133.0}, {11, -135.0}, {12, -148.0}};
    double rssi_noise_sigma_db = 0.0;
    double corruption_prob = 0.0; // per received data packet
    // co-channel capture margin in dB; <= 0 means overlaps are always
    // destructive (the default)
    double capture_db = 0.0;
};

inline double symbol_time_ms(const RadioConfig& cfg) {
    return static_cast<double>(1 << cfg.sf) * 1000.0 / cfg.bw_hz;
}

/// Payload symbol count of one frame (standard LoRa airtime computation,
/// low-data-rate optimization for SF>=11 at 125 kHz).
inline int payload_symbols(const RadioConfig& cfg, int payload_bytes) {
    validate(cfg);
    if (payload_bytes < 0 || payload_bytes > 255)
        throw std::domain_error("payload size out of [0,255] bytes");
    const int de = (cfg.sf >= 11 && cfg.bw_hz == 125000) ? 1 : 0;
    const int ih = cfg.explicit_header ? 0 : 1;
    const int crc = cfg.crc_on ? 1 : 0;
    const int num = 8 * payload_bytes - 4 * cfg.sf + 28 + 16 * crc - 20 * ih;
    const int den = 4 * (cfg.sf - 2 * de);
    int blocks = 0;
    if (num > 0) blocks = (num + den - 1) / den;
    return 8 + blocks * (cfg.cr + 4);
}

/// Frame duration in ms: preamble plus payload symbols.
inline double time_on_air_ms(const RadioConfig& cfg, int payload_bytes) {
    const double tsym = symbol_time_ms(cfg);
    const double preamble = (cfg.preamble_symbols + 4.25) * tsym;
    return preamble + payload_symbols(cfg, payload_bytes) * tsym;
}

/// Transmit energy per bit in mJ/bit:
/// P_cons(P_tx) * (N_payload + N_p + 4.25) * 2^SF / (8 * PL * BW).
inline double energy_tx_per_bit_mj(const RadioConfig& cfg, const PowerProfile& profile,
                                   int payload_bytes) {
    auto it = profile.p_cons_tx_mw.find(cfg.tx_power_dbm);
    if (it == profile.p_cons_tx_mw.end())
        throw ConfigError("no consumed-power entry for " + std::to_string(cfg.tx_power_dbm) +
                          " dBm");
    if (payload_bytes <= 0)
        throw std::domain_error("per-bit energy undefined for empty payload");
    const double n_total = payload_symbols(cfg, payload_bytes) + cfg.preamble_symbols + 4.25;
    const double t_s = n_total * static_cast<double>(1 << cfg.sf) / cfg.bw_hz;
    return it->second * t_s / (8.0 * payload_bytes);
}

/// Receive energy per bit in uJ/bit: P_rx * T_on_air / (8 * PL).
inline double energy_rx_per_bit_uj(const RadioConfig& cfg, const PowerProfile& profile,
                                   int payload_bytes) {
    if (payload_bytes <= 0)
        throw std::domain_error("per-bit energy undefined for empty payload");
    return profile.p_rx_mw * time_on_air_ms(cfg, payload_bytes) / (8.0 * payload_bytes);
}

/// Total energy per bit across a relay chain in mJ/bit. Intermediate nodes
/// receive, the source does not: hops*E_tx + (hops-1)*E_rx.
inline double multi_hop_energy_per_bit_mj(int hops, const RadioConfig& cfg,
                                          const PowerProfile& profile, int payload_bytes) {
    if (hops < 1) throw std::domain_error("hop count must be >= 1");
    const double etx = energy_tx_per_bit_mj(cfg, profile, payload_bytes);
    const double erx = energy_rx_per_bit_uj(cfg, profile, payload_bytes) / 1000.0;
    return hops * etx + (hops - 1) * erx;
}

/// Received power at distance under the log-distance model, optionally with
/// gaussian shadowing from the caller's stream.
inline double rssi_at_dbm(double distance_m, const RadioConfig& cfg, const ChannelModel& ch,
                          Rng* rng = nullptr) {
    if (distance_m <= 0.0) throw std::domain_error("distance must be positive");
    double rssi = cfg.tx_power_dbm - ch.reference_loss_db -
                  10.0 * ch.path_loss_exponent * std::log10(distance_m);
    if (rng && ch.rssi_noise_sigma_db > 0.0)
        rssi += rng->gaussian(0.0, ch.rssi_noise_sigma_db);
    return rssi;
}

inline double sensitivity_dbm(const RadioConfig& cfg, const ChannelModel& ch) {
    auto it = ch.sensitivity_dbm.find(cfg.sf);
    if (it == ch.sensitivity_dbm.end())
        throw ConfigError("no sensitivity entry for SF" + std::to_string(cfg.sf));
    return it->second;
}

inline bool link_feasible(double rssi_dbm, const RadioConfig& cfg, const ChannelModel& ch) {
    return rssi_dbm >= sensitivity_dbm(cfg, ch);
}

/// Projected battery life in years for a steady average draw.
inline double battery_life_years(double avg_current_ua, double capacity_mah) {
    if (capacity_mah <= 0.0) throw std::domain_error("capacity must be positive");
    if (avg_current_ua < 0.0) throw std::domain_error("current must be non-negative");
    if (avg_current_ua == 0.0) return std::numeric_limits<double>::infinity();
    const double hours = capacity_mah * 1000.0 / avg_current_ua;
    return hours / (24.0 * 365.25);
}

} // namespace lpmesh
