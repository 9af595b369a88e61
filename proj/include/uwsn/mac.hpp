#pragma once

#include "uwsn/packet.hpp"
#include "uwsn/scheduler.hpp"

#include <array>
#include <deque>
#include <functional>
#include <map>
#include <optional>

namespace uwsn {

struct ModemParams;
struct ChannelParams;

/// MAC settings as configured. Unset timing values are derived from the
/// modem and geometry by resolve_mac_timing().
struct MacConfig {
    std::optional<double> backoff_window_s;
    std::optional<double> ack_timeout_s;
    std::uint32_t max_retx = 2;
    double ack_guard_s = 0.1;
    std::size_t queue_limit = 32;
};

/// Per transport format timing actually used by CsmaMac.
struct MacTiming {
    std::array<double, kTransportFormatCount> backoff_window_s{};
    std::array<double, kTransportFormatCount> ack_timeout_s{};
    std::uint32_t max_retx = 2;
    double ack_guard_s = 0.1;
    std::size_t queue_limit = 32;
    std::uint32_t ack_bits = 40;
};

/// Fill in defaults: backoff window of twice the data frame duration, ACK
/// timeout of the ACK duration plus a round trip over `max_link_range_m`
/// plus 0.2 s. Throws std::invalid_argument when an explicit timeout is too
/// short to ever receive an ACK.
MacTiming resolve_mac_timing(const MacConfig& config, const ModemParams& modem, const ChannelParams& channel,
                             std::uint32_t data_bits, double max_link_range_m);

/// What the MAC needs from the node it runs on.
class MacHost {
public:
    virtual ~MacHost() = default;
    virtual SimTime now() const = 0;
    virtual EventId schedule_timer(double delay, std::function<void()> action) = 0;
    virtual bool cancel_timer(EventId id) = 0;
    virtual bool carrier_busy() const = 0;
    virtual bool transmitting() const = 0;
    /// Put the frame on the air. The host calls CsmaMac::on_tx_end when it finishes.
    virtual void start_transmission(const MacPdu& pdu) = 0;
    virtual double random_uniform01() = 0;
    virtual void mac_deliver(const MacPdu& pdu, double sinr_db) = 0;
    virtual void mac_unicast_done(const MacPdu& pdu, bool delivered) = 0;
};

struct MacCounters {
    std::uint64_t queue_drops = 0;
    std::uint64_t stray_acks = 0;
    std::uint64_t duplicates_suppressed = 0;
    std::uint64_t retransmissions = 0;
    std::uint64_t backoffs = 0;
    std::uint64_t arq_failures = 0;

    bool operator==(const MacCounters&) const = default;
};

/// Non-persistent CSMA Aloha with stop-and-wait ARQ for unicast data only.
///
/// Broadcast data, STATUS and ACK frames are sent once with no
/// acknowledgement. ACKs skip carrier sensing and go out after the
/// turnaround guard as soon as the modem is not transmitting.
class CsmaMac {
public:
    enum class State : std::uint8_t { Idle, Backoff, Transmitting, WaitAck };

    CsmaMac(NodeId self, MacTiming timing, MacHost& host);

    CsmaMac(const CsmaMac&) = delete;
    CsmaMac& operator=(const CsmaMac&) = delete;

    void send(MacPdu pdu);
    void on_receive(const MacPdu& pdu, double sinr_db);
    void on_tx_end();

    State state() const noexcept { return state_; }
    std::size_t queue_size() const noexcept { return queue_.size(); }
    const MacCounters& counters() const noexcept { return counters_; }
    const MacTiming& timing() const noexcept { return timing_; }

private:
    struct Transaction {
        MacPdu pdu;
        std::uint32_t attempts = 0;
    };

    void try_transmit();
    void start_backoff();
    void on_backoff_expired();
    void on_ack_timeout();
    void finish_unicast(bool delivered);

    NodeId self_;
    MacTiming timing_;
    MacHost& host_;
    State state_ = State::Idle;
    std::deque<MacPdu> queue_;
    std::deque<MacPdu> acks_;
    std::optional<Transaction> current_;
    bool ack_on_air_ = false;
    std::optional<EventId> backoff_timer_;
    std::optional<EventId> ack_timer_;
    std::map<NodeId, std::uint32_t> next_seq_;
    std::map<NodeId, std::uint32_t> last_delivered_;
    MacCounters counters_;
};

} // namespace uwsn
