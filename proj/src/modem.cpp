#include "uwsn/modem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uwsn {

std::string_view to_string(PduKind kind) noexcept
{
    switch (kind) {
    case PduKind::DataBc: return "DATA_BC";
    case PduKind::DataUc: return "DATA_UC";
    case PduKind::StatusUc: return "STATUS_UC";
    case PduKind::MacAck: return "MAC_ACK";
    }
    return "?";
}

TransportFormatTable default_transport_formats()
{
    return {TransportFormat{TransportFormatId::TF1, 200.0, 0.0, std::nullopt},
            TransportFormat{TransportFormatId::TF2, 400.0, 0.0, std::nullopt},
            TransportFormat{TransportFormatId::TF3, 1700.0, 0.0, std::nullopt}};
}

void ModemParams::validate() const
{
    for (const auto& f : formats) {
        if (!(f.payload_rate_bps > 0.0))
            throw std::invalid_argument("modem: payload rate must be > 0");
        if (!(f.sync_overhead_s >= 0.0))
            throw std::invalid_argument("modem: sync overhead must be >= 0");
    }
    if (ack_bits == 0 || status_base_bits == 0)
        throw std::invalid_argument("modem: control frame sizes must be > 0");
    if (max_frame_duration_s < 0.0)
        throw std::invalid_argument("modem: max_frame_duration_s must be >= 0");
    for (const auto& f : formats) {
        if (max_frame_duration_s > 0.0 && max_frame_duration_s <= f.sync_overhead_s)
            throw std::invalid_argument("modem: max_frame_duration_s must exceed sync overhead");
    }
}

double frame_duration(std::uint32_t payload_bits, const TransportFormat& tf)
{
    require(payload_bits > 0, "frame_duration: empty payload");
    return tf.sync_overhead_s + static_cast<double>(payload_bits) / tf.payload_rate_bps;
}

std::vector<Frame> fragment(std::uint32_t message_bits, const TransportFormat& tf,
                            double max_frame_duration_s, PduKind kind)
{
    require(message_bits > 0, "fragment: empty message");
    if (!(max_frame_duration_s > tf.sync_overhead_s))
        throw ContractViolation("fragment: frame cap does not exceed sync overhead");

    const double room = (max_frame_duration_s - tf.sync_overhead_s) * tf.payload_rate_bps;
    const auto bits_per_frame = static_cast<std::uint32_t>(std::floor(room + 1e-9));
    if (bits_per_frame == 0)
        throw ContractViolation("fragment: frame cap too small for one bit");

    const std::uint32_t count = (message_bits + bits_per_frame - 1) / bits_per_frame;
    const std::uint32_t base = message_bits / count;
    const std::uint32_t extra = message_bits % count;

    std::vector<Frame> frames;
    frames.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i)
        frames.push_back(Frame{base + (i < extra ? 1u : 0u), tf.id, kind, i, count});
    return frames;
}

double burst_duration(std::uint32_t message_bits, const TransportFormat& tf, double max_frame_duration_s)
{
    if (max_frame_duration_s <= 0.0)
        return frame_duration(message_bits, tf);
    double total = 0.0;
    for (const auto& f : fragment(message_bits, tf, max_frame_duration_s))
        total += frame_duration(f.payload_bits, tf);
    return total;
}

double calibrate_source_level(double max_range_m, const ChannelParams& params)
{
    require(max_range_m > 0.0, "calibrate_source_level: range must be positive");
    return params.detect_threshold_db + params.noise_level_db + transmission_loss(max_range_m, params);
}

std::optional<std::uint64_t> ModemState::tx_begin(SimTime now, SimTime end)
{
    require(!tx_active_, "ModemState::tx_begin: already transmitting");
    tx_active_ = true;
    tx_history_.push_back(Interval{now, end});
    if (!lock_ || lock_end_ <= now)
        return std::nullopt;
    auto aborted = lock_;
    lock_.reset();
    return aborted;
}

void ModemState::tx_end()
{
    require(tx_active_, "ModemState::tx_end: not transmitting");
    tx_active_ = false;
}

void ModemState::rx_lock(std::uint64_t arrival_id, SimTime end)
{
    require(!tx_active_ && !lock_, "ModemState::rx_lock: modem not idle");
    lock_ = arrival_id;
    lock_end_ = end;
}

void ModemState::rx_release(std::uint64_t arrival_id)
{
    require(lock_ == arrival_id, "ModemState::rx_release: not locked on this arrival");
    lock_.reset();
}

void ModemState::arrival_begin(const Arrival& arrival, bool detectable)
{
    history_.push_back(OnAir{arrival, detectable, true});
    if (detectable)
        ++detectable_on_air_;
}

void ModemState::arrival_end(std::uint64_t arrival_id)
{
    for (auto& a : history_) {
        if (a.arrival.id == arrival_id && a.active) {
            a.active = false;
            if (a.detectable)
                --detectable_on_air_;
            return;
        }
    }
    throw ContractViolation("ModemState::arrival_end: unknown arrival");
}

std::vector<Arrival> ModemState::concurrent(SimTime start, SimTime end, std::uint64_t exclude) const
{
    std::vector<Arrival> out;
    for (const auto& a : history_) {
        if (a.arrival.id != exclude && a.arrival.start < end && start < a.arrival.end)
            out.push_back(a.arrival);
    }
    return out;
}

std::vector<Interval> ModemState::tx_overlapping(SimTime start, SimTime end) const
{
    std::vector<Interval> out;
    for (const auto& t : tx_history_) {
        if (t.overlaps(start, end))
            out.push_back(t);
    }
    return out;
}

void ModemState::prune(SimTime horizon)
{
    // Entries are appended in start order, so active or recent ones cluster at the back.
    while (!history_.empty() && !history_.front().active && history_.front().arrival.end < horizon)
        history_.pop_front();
    while (!tx_history_.empty() && tx_history_.front().end < horizon)
        tx_history_.pop_front();
}

} // namespace uwsn
