#include "uwsn/network.hpp"

#include "uwsn/rng.hpp"

#include <cmath>

namespace uwsn {

/// Glue between one node's modem, MAC and router and the network.
class NodeStack final : public MacHost, public RouterHost {
public:
    NodeStack(Network& net, const NodeConfig& config)
        : net_(net),
          config_(config),
          rng_(net.scenario_.seed, (std::uint64_t{2} << 32) | to_index(config.id)),
          mac_(config.id, net.timing_, *this),
          router_(router_settings(net.scenario_, config), *this)
    {
    }

    // MacHost
    SimTime now() const override { return net_.scheduler_.now(); }
    EventId schedule_timer(double delay, std::function<void()> action) override
    {
        return net_.scheduler_.schedule_in(delay, config_.id, EventKind::Timer, std::move(action));
    }
    bool cancel_timer(EventId id) override { return net_.scheduler_.cancel(id); }
    bool carrier_busy() const override { return modem_.carrier_busy(); }
    bool transmitting() const override { return modem_.transmitting(); }
    void start_transmission(const MacPdu& pdu) override { net_.begin_transmission(config_.id, pdu); }
    double random_uniform01() override { return rng_.uniform01(); }
    void mac_deliver(const MacPdu& pdu, double sinr_db) override { router_.on_mac_deliver(pdu, sinr_db); }
    void mac_unicast_done(const MacPdu& pdu, bool delivered) override
    {
        router_.on_unicast_outcome(pdu, delivered);
    }

    // RouterHost
    void mac_send(MacPdu pdu) override { mac_.send(std::move(pdu)); }
    void deliver_to_application(const RoutingHeader& header) override { net_.application_delivery(header); }

    ModemState& modem() { return modem_; }
    CsmaMac& mac() { return mac_; }
    IcrpRouter& router() { return router_; }
    const NodeConfig& config() const { return config_; }

private:
    static RouterSettings router_settings(const Scenario& s, const NodeConfig& c)
    {
        RouterSettings r;
        r.self = c.id;
        r.sink = s.sink();
        r.is_sink = c.role == Role::Sink;
        r.bc_forwarding_enabled = c.bc_forwarding_enabled;
        r.initial_tf = c.initial_tf;
        r.icrp = s.icrp;
        r.status_base_bits = s.modem.status_base_bits;
        r.status_bits_per_hop = s.modem.status_bits_per_hop;
        return r;
    }

    Network& net_;
    NodeConfig config_;
    Rng rng_;
    ModemState modem_;
    CsmaMac mac_;
    IcrpRouter router_;
};

namespace {

Scenario validated(Scenario s)
{
    s.validate();
    return s;
}

// History older than this cannot overlap any arrival still on the air.
constexpr double kHistoryHorizon = 600.0;

} // namespace

Network::Network(Scenario scenario) : scenario_(validated(std::move(scenario)))
{
    source_level_db_ = scenario_.resolved_source_level();
    timing_ = resolve_mac_timing(scenario_.mac, scenario_.modem, scenario_.channel, scenario_.traffic.payload_bits,
                                 scenario_.max_link_range());

    const std::size_t n = scenario_.nodes.size();
    links_.assign(n, std::vector<Link>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = scenario_.nodes[i];
        ActiveTransmission tx{a.id, a.position, source_level_db_, a.directivity_gain_db, 0.0, 0.0};
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j)
                continue;
            const auto& b = scenario_.nodes[j];
            links_[i][j].delay = propagation_delay(distance(a.position, b.position), scenario_.channel);
            links_[i][j].level_db = received_level(tx, b.position, b.directivity_gain_db, scenario_.channel);
        }
    }

    nodes_.reserve(n);
    receiving_.resize(n);
    for (const auto& c : scenario_.nodes)
        nodes_.push_back(std::make_unique<NodeStack>(*this, c));

    sources_ = scenario_.traffic_sources();
    for (NodeId s : sources_)
        metrics_.per_source[s];
}

Network::~Network() = default;

const IcrpRouter& Network::router(NodeId id) const
{
    return nodes_.at(to_index(id))->router();
}

const CsmaMac& Network::mac(NodeId id) const
{
    return nodes_.at(to_index(id))->mac();
}

double Network::link_level_db(NodeId tx, NodeId rx) const
{
    return links_.at(to_index(tx)).at(to_index(rx)).level_db;
}

double Network::threshold_for(TransportFormatId tf) const
{
    return scenario_.modem.format(tf).detect_threshold_db.value_or(scenario_.channel.detect_threshold_db);
}

void Network::start_traffic()
{
    if (traffic_started_)
        return;
    traffic_started_ = true;
    emissions_.resize(scenario_.nodes.size());
    for (NodeId s : sources_) {
        auto schedule = EmissionSchedule::seeded(s, scenario_.traffic, scenario_.seed);
        emissions_[to_index(s)] = schedule.emissions_until(scenario_.duration);
        if (!emissions_[to_index(s)].empty())
            scheduler_.schedule(emissions_[to_index(s)].front(), s, EventKind::Timer, [this, s] { emission(s, 0); });
    }
}

void Network::emission(NodeId source, std::size_t index)
{
    inject(source, scenario_.traffic.payload_bits);
    const auto& times = emissions_[to_index(source)];
    if (index + 1 < times.size())
        scheduler_.schedule(times[index + 1], source, EventKind::Timer,
                            [this, source, index] { emission(source, index + 1); });
}

std::uint32_t Network::inject(NodeId source, std::uint32_t payload_bits)
{
    ++metrics_.generated;
    ++metrics_.per_source[source].generated;
    return nodes_.at(to_index(source))->router().originate(payload_bits);
}

void Network::application_delivery(const RoutingHeader& header)
{
    ++metrics_.delivered_unique;
    ++metrics_.per_source[header.origin].delivered;
    delay_sum_ += scheduler_.now() - header.created;
}

void Network::begin_transmission(NodeId tx, const MacPdu& pdu)
{
    NodeStack& sender = *nodes_[to_index(tx)];
    const double duration =
        burst_duration(pdu.bits, scenario_.modem.format(pdu.tf), scenario_.modem.max_frame_duration_s);
    const SimTime start = scheduler_.now();
    const SimTime end = quantize(start + duration);

    if (sender.modem().tx_begin(start, end))
        ++metrics_.losses[static_cast<int>(LossReason::HalfDuplex)];

    ++metrics_.link_tx[{tx, pdu.dest}];
    switch (pdu.kind) {
    case PduKind::DataBc:
    case PduKind::DataUc:
        ++metrics_.data_tx;
        ++metrics_.tf_usage[tf_index(pdu.tf)];
        break;
    case PduKind::MacAck: ++metrics_.ack_tx; break;
    case PduKind::StatusUc: ++metrics_.status_tx; break;
    }
    if (observer_)
        observer_(tx, pdu, start, end - start);

    scheduler_.schedule(end, tx, EventKind::TxEnd, [&sender] {
        sender.modem().tx_end();
        sender.mac().on_tx_end();
    });

    auto shared = std::make_shared<const MacPdu>(pdu);
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
        if (j == to_index(tx))
            continue;
        const Link& link = links_[to_index(tx)][j];
        const SimTime arrive = quantize(start + link.delay);
        Arrival a{next_arrival_id_++, arrive, quantize(arrive + (end - start)), link.level_db};
        const NodeId rx = node(static_cast<std::uint32_t>(j));
        scheduler_.schedule(arrive, rx, EventKind::ArrivalStart,
                            [this, rx, tx, a, shared] { arrival_start(rx, tx, a, shared); });
    }
}

void Network::arrival_start(NodeId rx, NodeId tx, const Arrival& arrival, std::shared_ptr<const MacPdu> pdu)
{
    // A reception ending at this very instant is complete; finish it before
    // the new signal is considered so that back-to-back frames both decode.
    auto& pending = receiving_[to_index(rx)];
    if (pending && pending->arrival.end <= arrival.start)
        finish_reception(rx);

    ModemState& modem = nodes_[to_index(rx)]->modem();
    const auto& ch = scenario_.channel;
    const bool detectable = arrival.level_db > ch.noise_level_db + ch.carrier_sense_margin_db;
    modem.arrival_begin(arrival, detectable);
    if (detectable && lockable(modem, arrival, pdu->tf)) {
        if (modem.transmitting())
            ++metrics_.losses[static_cast<int>(LossReason::HalfDuplex)];
        else if (modem.locked())
            ++metrics_.losses[static_cast<int>(LossReason::CaptureBusy)];
        else {
            modem.rx_lock(arrival.id, arrival.end);
            receiving_[to_index(rx)] = Reception{arrival, tx, pdu};
        }
    }
    scheduler_.schedule(arrival.end, rx, EventKind::ArrivalEnd, [this, rx, id = arrival.id] {
        nodes_[to_index(rx)]->modem().arrival_end(id);
        const auto& current = receiving_[to_index(rx)];
        if (current && current->arrival.id == id)
            finish_reception(rx);
    });
}

bool Network::lockable(const ModemState& modem, const Arrival& arrival, TransportFormatId tf) const
{
    // The modem synchronises only to a signal it could decode given what is
    // on the air at its start.
    std::vector<double> interferers;
    for (const auto& other : modem.concurrent(arrival.start, arrival.start + 1e-9, arrival.id))
        interferers.push_back(other.level_db);
    return sinr(arrival.level_db, interferers, scenario_.channel.noise_level_db) >=
           threshold_for(tf) - kThresholdTolerance;
}

void Network::finish_reception(NodeId rx)
{
    NodeStack& receiver = *nodes_[to_index(rx)];
    ModemState& modem = receiver.modem();
    const Reception rec = std::move(*receiving_[to_index(rx)]);
    receiving_[to_index(rx)].reset();
    if (modem.locked() != rec.arrival.id)
        return;  // aborted by our own transmission
    modem.rx_release(rec.arrival.id);

    ChannelParams params = scenario_.channel;
    params.detect_threshold_db = threshold_for(rec.pdu->tf);
    const auto concurrent = modem.concurrent(rec.arrival.start, rec.arrival.end, rec.arrival.id);
    const auto own_tx = modem.tx_overlapping(rec.arrival.start, rec.arrival.end);
    const DecodeResult result = decode_outcome(rec.arrival, concurrent, ReceiverWindow{own_tx, false}, params);
    modem.prune(scheduler_.now() - kHistoryHorizon);

    if (!result.decoded) {
        ++metrics_.losses[static_cast<int>(result.reason)];
        return;
    }
    if (drop_filter_ && drop_filter_(rec.tx, rx, *rec.pdu))
        return;
    receiver.mac().on_receive(*rec.pdu, result.min_sinr_db);
}

void Network::run_until(SimTime t)
{
    scheduler_.run_until(t);
}

RunMetrics Network::run()
{
    start_traffic();
    run_until(scenario_.duration + scenario_.drain_s);
    return collect();
}

RunMetrics Network::collect() const
{
    RunMetrics m = metrics_;
    m.pdr_pct = compute_pdr(m).value_or(std::nan(""));
    m.status_pct = 0.0;
    m.events = scheduler_.processed_count();
    m.mean_delay_s = m.delivered_unique > 0 ? delay_sum_ / static_cast<double>(m.delivered_unique) : 0.0;

    const SimTime end = scheduler_.now();
    for (const auto& stack : nodes_) {
        const auto& rc = stack->router().counters();
        const auto& mc = stack->mac().counters();
        m.status_count += rc.status_generated;
        m.sink_duplicates += rc.sink_duplicates;
        m.bc_originated += rc.bc_originated;
        m.uc_originated += rc.uc_originated;
        m.bc_fallbacks += rc.bc_fallbacks;
        m.route_invalidations += rc.route_invalidations;
        m.dup_drops += rc.dup_drops;
        m.choke_drops += rc.choke_drops;
        m.hop_limit_drops += rc.hop_limit_drops;
        m.anomalies += rc.anomalies;
        m.arq_failures += mc.arq_failures;
        m.mac_queue_drops += mc.queue_drops;
        m.stray_acks += mc.stray_acks;
    }
    m.status_pct = compute_status_pct(m).value_or(std::nan(""));
    for (auto& [id, stats] : m.per_source)
        stats.uc_time_fraction = end > 0.0 ? router(id).route_time(end) / end : 0.0;
    return m;
}

RunMetrics run(const Scenario& scenario)
{
    Network net(scenario);
    return net.run();
}

} // namespace uwsn
