#pragma once

#include "uwsn/channel.hpp"
#include "uwsn/packet.hpp"

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

namespace uwsn {

struct TransportFormat {
    TransportFormatId id = TransportFormatId::TF1;
    double payload_rate_bps = 200.0;
    double sync_overhead_s = 0.0;
    std::optional<double> detect_threshold_db;  ///< overrides the channel threshold when set
};

using TransportFormatTable = std::array<TransportFormat, kTransportFormatCount>;

/// 200 bps and 400 bps DSSS, 1700 bps equalized.
TransportFormatTable default_transport_formats();

struct ModemParams {
    TransportFormatTable formats = default_transport_formats();
    std::uint32_t ack_bits = 40;
    std::uint32_t status_base_bits = 80;
    std::uint32_t status_bits_per_hop = 16;
    double max_frame_duration_s = 0.0;  ///< fragmentation cap, 0 disables

    const TransportFormat& format(TransportFormatId id) const { return formats[tf_index(id)]; }
    void validate() const;
};

struct Frame {
    std::uint32_t payload_bits = 0;
    TransportFormatId tf = TransportFormatId::TF1;
    PduKind kind = PduKind::DataBc;
    std::uint32_t fragment_index = 0;
    std::uint32_t fragment_total = 1;
};

double frame_duration(std::uint32_t payload_bits, const TransportFormat& tf);

/// Split a message into the fewest frames that each fit within
/// `max_frame_duration_s`, with bits spread as evenly as possible.
std::vector<Frame> fragment(std::uint32_t message_bits, const TransportFormat& tf,
                            double max_frame_duration_s, PduKind kind = PduKind::DataBc);

/// On-air time of a message sent as back-to-back fragments (single frame
/// when the cap is 0).
double burst_duration(std::uint32_t message_bits, const TransportFormat& tf, double max_frame_duration_s);

/// Source level that places the interference-free decode boundary exactly at
/// `max_range_m`.
double calibrate_source_level(double max_range_m, const ChannelParams& params);

/// Half-duplex modem bookkeeping for one node.
///
/// Tracks the node's own transmissions, the arrival it is locked onto, and
/// the arrivals currently on the air at its transducer.
class ModemState {
public:
    bool transmitting() const noexcept { return tx_active_; }
    std::optional<std::uint64_t> locked() const noexcept { return lock_; }
    bool idle() const noexcept { return !tx_active_ && !lock_; }

    /// Start transmitting over [now, end). Aborts a reception still in
    /// progress and returns its id; a reception ending exactly at `now` is
    /// complete and stays locked until released.
    std::optional<std::uint64_t> tx_begin(SimTime now, SimTime end);
    void tx_end();

    void rx_lock(std::uint64_t arrival_id, SimTime end);
    void rx_release(std::uint64_t arrival_id);

    /// An arrival reaches this node's transducer.
    void arrival_begin(const Arrival& arrival, bool detectable);
    void arrival_end(std::uint64_t arrival_id);

    /// Busy while transmitting, locked, or while any detectable arrival is on the air.
    bool carrier_busy() const noexcept { return tx_active_ || lock_ || detectable_on_air_ > 0; }

    /// All arrivals overlapping [start, end) other than `exclude`, from recent history.
    std::vector<Arrival> concurrent(SimTime start, SimTime end, std::uint64_t exclude) const;
    std::vector<Interval> tx_overlapping(SimTime start, SimTime end) const;

    /// Drop history that ended before `horizon`.
    void prune(SimTime horizon);

private:
    bool tx_active_ = false;
    std::optional<std::uint64_t> lock_;
    SimTime lock_end_ = 0.0;
    int detectable_on_air_ = 0;
    struct OnAir {
        Arrival arrival;
        bool detectable;
        bool active;
    };
    std::deque<OnAir> history_;
    std::deque<Interval> tx_history_;
};

} // namespace uwsn
