#pragma once

#include "uwsn/types.hpp"

#include <cstdint>
#include <span>

namespace uwsn {

struct Position {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

double distance(const Position& a, const Position& b) noexcept;

struct ChannelParams {
    double frequency_khz = 25.0;
    double spreading_coeff = 1.5;   ///< k in 10 k log10(d); 1.5 is "practical" spreading
    double sound_speed_mps = 1500.0;
    double noise_level_db = 50.0;
    double detect_threshold_db = 10.0;  ///< minimum SINR for a successful decode
    double carrier_sense_margin_db = 0.0;  ///< a signal is detectable above noise + margin

    void validate() const;
};

/// Thorp absorption in dB/km, frequency in kHz.
double thorp_absorption(double frequency_khz);

/// Practical-loss transmission loss in dB. Distances below 1 m clamp to 1 m.
double transmission_loss(double distance_m, const ChannelParams& params);

double propagation_delay(double distance_m, const ChannelParams& params);

struct ActiveTransmission {
    NodeId tx_node{};
    Position tx_position;
    double source_level_db = 0.0;
    double tx_gain_db = 0.0;
    SimTime start = 0.0;
    double duration = 0.0;
};

double received_level(const ActiveTransmission& tx, const Position& rx_position, double rx_gain_db,
                      const ChannelParams& params);

/// SINR in dB of a signal against noise plus the power sum of interferers.
double sinr(double signal_db, std::span<const double> interferers_db, double noise_db);

/// One signal as seen at one receiver, over [start, end).
struct Arrival {
    std::uint64_t id = 0;
    SimTime start = 0.0;
    SimTime end = 0.0;
    double level_db = 0.0;
};

struct Interval {
    SimTime start = 0.0;
    SimTime end = 0.0;

    bool overlaps(SimTime s, SimTime e) const noexcept { return start < e && s < end; }
};

/// Receiver condition relevant to one arrival.
struct ReceiverWindow {
    std::span<const Interval> tx_intervals;  ///< own transmissions near the arrival
    bool locked_on_other = false;            ///< already receiving an earlier arrival
};

enum class LossReason : std::uint8_t { HalfDuplex, CaptureBusy, LowSinr };

inline constexpr int kLossReasonCount = 3;

std::string_view to_string(LossReason reason) noexcept;

struct DecodeResult {
    bool decoded = false;
    LossReason reason = LossReason::LowSinr;  ///< meaningful when !decoded
    double min_sinr_db = 0.0;
};

/// Comparisons against the decode threshold accept this much rounding error,
/// so a link calibrated to sit exactly on the threshold decodes.
inline constexpr double kThresholdTolerance = 1e-9;

/// Receive arbitration for one arrival.
///
/// Lost to half duplex if any own transmission overlaps the arrival, lost to
/// capture if the receiver is locked onto an earlier arrival, otherwise
/// decoded iff the minimum SINR over the arrival's duration reaches the
/// threshold. Interference at each instant is the power sum of every other
/// arrival in `concurrent` that is on the air at that instant.
DecodeResult decode_outcome(const Arrival& arrival, std::span<const Arrival> concurrent,
                            const ReceiverWindow& rx, const ChannelParams& params);

/// Minimum instantaneous SINR of `arrival` against `concurrent`.
double min_sinr_over(const Arrival& arrival, std::span<const Arrival> concurrent, double noise_db);

} // namespace uwsn
