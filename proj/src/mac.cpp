#include "uwsn/mac.hpp"

#include "uwsn/modem.hpp"

#include <stdexcept>

namespace uwsn {

MacTiming resolve_mac_timing(const MacConfig& config, const ModemParams& modem, const ChannelParams& channel,
                             std::uint32_t data_bits, double max_link_range_m)
{
    if (config.max_retx > 64)
        throw std::invalid_argument("mac: max_retx out of range");
    if (!(config.ack_guard_s > 0.0))
        throw std::invalid_argument("mac: ack_guard_s must be > 0");
    if (config.queue_limit == 0)
        throw std::invalid_argument("mac: queue_limit must be > 0");

    MacTiming t;
    t.max_retx = config.max_retx;
    t.ack_guard_s = config.ack_guard_s;
    t.queue_limit = config.queue_limit;
    t.ack_bits = modem.ack_bits;

    const double round_trip = 2.0 * max_link_range_m / channel.sound_speed_mps;
    for (const auto& f : modem.formats) {
        const int i = tf_index(f.id);
        const double data = burst_duration(data_bits, f, modem.max_frame_duration_s);
        const double ack = frame_duration(modem.ack_bits, f);

        t.backoff_window_s[i] = config.backoff_window_s.value_or(2.0 * data);
        if (!(t.backoff_window_s[i] > 0.0))
            throw std::invalid_argument("mac: backoff_window_s must be > 0");

        const double minimum = ack + round_trip + config.ack_guard_s;
        t.ack_timeout_s[i] = config.ack_timeout_s.value_or(ack + round_trip + 0.2);
        if (t.ack_timeout_s[i] < minimum)
            throw std::invalid_argument("mac: ack_timeout_s " + std::to_string(t.ack_timeout_s[i]) +
                                        " is shorter than ACK duration + round trip + guard (" +
                                        std::to_string(minimum) + ")");
    }
    return t;
}

CsmaMac::CsmaMac(NodeId self, MacTiming timing, MacHost& host)
    : self_(self), timing_(timing), host_(host)
{
}

void CsmaMac::send(MacPdu pdu)
{
    pdu.src = self_;
    if (pdu.kind == PduKind::MacAck) {
        acks_.push_back(std::move(pdu));
        try_transmit();
        return;
    }
    if (pdu.kind == PduKind::DataBc)
        pdu.dest = kBroadcast;
    if (pdu.kind == PduKind::DataUc)
        pdu.seq = next_seq_[pdu.dest]++;
    if (queue_.size() >= timing_.queue_limit) {
        queue_.pop_front();
        ++counters_.queue_drops;
    }
    queue_.push_back(std::move(pdu));
    try_transmit();
}

void CsmaMac::try_transmit()
{
    if (host_.transmitting())
        return;
    if (!acks_.empty()) {
        MacPdu ack = std::move(acks_.front());
        acks_.pop_front();
        ack_on_air_ = true;
        host_.start_transmission(ack);
        return;
    }
    if (state_ != State::Idle)
        return;
    if (!current_) {
        if (queue_.empty())
            return;
        current_ = Transaction{std::move(queue_.front()), 0};
        queue_.pop_front();
    }
    if (host_.carrier_busy()) {
        start_backoff();
        return;
    }
    if (current_->attempts > 0)
        ++counters_.retransmissions;
    ++current_->attempts;
    state_ = State::Transmitting;
    host_.start_transmission(current_->pdu);
}

void CsmaMac::start_backoff()
{
    state_ = State::Backoff;
    ++counters_.backoffs;
    const double window = timing_.backoff_window_s[tf_index(current_->pdu.tf)];
    // (0, window]: never a zero deferral.
    const double delay = window * (1.0 - host_.random_uniform01());
    backoff_timer_ = host_.schedule_timer(delay, [this] { on_backoff_expired(); });
}

void CsmaMac::on_backoff_expired()
{
    backoff_timer_.reset();
    state_ = State::Idle;
    try_transmit();
}

void CsmaMac::on_tx_end()
{
    if (ack_on_air_) {
        ack_on_air_ = false;
        try_transmit();
        return;
    }
    require(state_ == State::Transmitting && current_.has_value(), "CsmaMac::on_tx_end: nothing on the air");
    if (current_->pdu.kind == PduKind::DataUc) {
        state_ = State::WaitAck;
        ack_timer_ = host_.schedule_timer(timing_.ack_timeout_s[tf_index(current_->pdu.tf)],
                                          [this] { on_ack_timeout(); });
        try_transmit();  // pending ACKs may go out while we wait for ours
        return;
    }
    current_.reset();
    state_ = State::Idle;
    try_transmit();
}

void CsmaMac::on_ack_timeout()
{
    ack_timer_.reset();
    if (current_->attempts < timing_.max_retx + 1) {
        // Retransmissions draw a fresh backoff before sensing again, so two
        // senders that collided do not retry in lockstep.
        start_backoff();
        return;
    }
    ++counters_.arq_failures;
    finish_unicast(false);
}

void CsmaMac::finish_unicast(bool delivered)
{
    MacPdu done = std::move(current_->pdu);
    current_.reset();
    state_ = State::Idle;
    host_.mac_unicast_done(done, delivered);
    try_transmit();
}

void CsmaMac::on_receive(const MacPdu& pdu, double sinr_db)
{
    switch (pdu.kind) {
    case PduKind::MacAck:
        if (pdu.dest != self_)
            return;
        if (state_ == State::WaitAck && current_ && current_->pdu.dest == pdu.src &&
            current_->pdu.seq == pdu.seq) {
            host_.cancel_timer(*ack_timer_);
            ack_timer_.reset();
            finish_unicast(true);
        } else {
            ++counters_.stray_acks;
        }
        return;

    case PduKind::DataUc: {
        if (pdu.dest != self_)
            return;
        MacPdu ack;
        ack.kind = PduKind::MacAck;
        ack.dest = pdu.src;
        ack.seq = pdu.seq;
        ack.tf = pdu.tf;
        ack.bits = timing_.ack_bits;
        host_.schedule_timer(timing_.ack_guard_s, [this, ack]() mutable { send(std::move(ack)); });

        auto last = last_delivered_.find(pdu.src);
        if (last != last_delivered_.end() && pdu.seq <= last->second) {
            ++counters_.duplicates_suppressed;
            return;
        }
        last_delivered_[pdu.src] = pdu.seq;
        host_.mac_deliver(pdu, sinr_db);
        return;
    }

    case PduKind::DataBc:
        host_.mac_deliver(pdu, sinr_db);
        return;

    case PduKind::StatusUc:
        if (pdu.dest == self_)
            host_.mac_deliver(pdu, sinr_db);
        return;
    }
}

} // namespace uwsn
