#include "uwsn/channel.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace uwsn {

double distance(const Position& a, const Position& b) noexcept
{
    return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

void ChannelParams::validate() const
{
    if (!(frequency_khz > 0.0))
        throw std::invalid_argument("channel: frequency_khz must be > 0");
    if (!(spreading_coeff >= 1.0 && spreading_coeff <= 2.0))
        throw std::invalid_argument("channel: spreading coefficient must be in [1, 2]");
    if (!(sound_speed_mps > 0.0))
        throw std::invalid_argument("channel: sound_speed_mps must be > 0");
    if (!std::isfinite(noise_level_db) || !std::isfinite(detect_threshold_db) ||
        !std::isfinite(carrier_sense_margin_db))
        throw std::invalid_argument("channel: levels must be finite");
}

double thorp_absorption(double frequency_khz)
{
    if (!(frequency_khz > 0.0))
        throw ContractViolation("thorp_absorption: frequency must be positive");
    const double f2 = frequency_khz * frequency_khz;
    return 0.11 * f2 / (1.0 + f2) + 44.0 * f2 / (4100.0 + f2) + 2.75e-4 * f2 + 0.003;
}

double transmission_loss(double distance_m, const ChannelParams& params)
{
    const double d = std::max(distance_m, 1.0);
    return 10.0 * params.spreading_coeff * std::log10(d) +
           thorp_absorption(params.frequency_khz) * (d / 1000.0);
}

double propagation_delay(double distance_m, const ChannelParams& params)
{
    require(distance_m >= 0.0, "propagation_delay: negative distance");
    return distance_m / params.sound_speed_mps;
}

double received_level(const ActiveTransmission& tx, const Position& rx_position, double rx_gain_db,
                      const ChannelParams& params)
{
    return tx.source_level_db + tx.tx_gain_db + rx_gain_db -
           transmission_loss(distance(tx.tx_position, rx_position), params);
}

namespace {

double db_to_power(double db) { return std::pow(10.0, db / 10.0); }

} // namespace

double sinr(double signal_db, std::span<const double> interferers_db, double noise_db)
{
    if (interferers_db.empty())
        return signal_db - noise_db;
    double total = db_to_power(noise_db);
    for (double i : interferers_db)
        total += db_to_power(i);
    return signal_db - 10.0 * std::log10(total);
}

std::string_view to_string(LossReason reason) noexcept
{
    switch (reason) {
    case LossReason::HalfDuplex: return "half_duplex";
    case LossReason::CaptureBusy: return "capture_busy";
    case LossReason::LowSinr: return "low_sinr";
    }
    return "?";
}

double min_sinr_over(const Arrival& arrival, std::span<const Arrival> concurrent, double noise_db)
{
    // Interference only changes when another arrival starts or ends, so its
    // maximum is reached at the arrival's own start or at some other start.
    std::vector<SimTime> instants{arrival.start};
    for (const auto& other : concurrent) {
        if (other.id == arrival.id)
            continue;
        if (other.start > arrival.start && other.start < arrival.end)
            instants.push_back(other.start);
    }

    double worst = kInfinity;
    std::vector<double> levels;
    for (SimTime t : instants) {
        levels.clear();
        for (const auto& other : concurrent) {
            if (other.id != arrival.id && other.start <= t && t < other.end)
                levels.push_back(other.level_db);
        }
        worst = std::min(worst, sinr(arrival.level_db, levels, noise_db));
    }
    return worst;
}

DecodeResult decode_outcome(const Arrival& arrival, std::span<const Arrival> concurrent,
                            const ReceiverWindow& rx, const ChannelParams& params)
{
    require(arrival.end > arrival.start, "decode_outcome: arrival has no duration");
    DecodeResult result;
    result.min_sinr_db = min_sinr_over(arrival, concurrent, params.noise_level_db);

    for (const auto& tx : rx.tx_intervals) {
        if (tx.overlaps(arrival.start, arrival.end)) {
            result.reason = LossReason::HalfDuplex;
            return result;
        }
    }
    if (rx.locked_on_other) {
        result.reason = LossReason::CaptureBusy;
        return result;
    }
    if (result.min_sinr_db >= params.detect_threshold_db - kThresholdTolerance) {
        result.decoded = true;
        return result;
    }
    result.reason = LossReason::LowSinr;
    return result;
}

} // namespace uwsn
