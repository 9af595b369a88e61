#pragma once

#include "uwsn/metrics.hpp"
#include "uwsn/scenario.hpp"
#include "uwsn/scheduler.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace uwsn {

class NodeStack;

/// One simulated deployment: nodes with modem, MAC and router, the shared
/// acoustic medium and the traffic sources, all driven by one scheduler.
class Network {
public:
    /// Called when a node puts a frame on the air.
    using TransmitObserver = std::function<void(NodeId tx, const MacPdu& pdu, SimTime start, double duration)>;
    /// Return true to drop a frame the receiver would otherwise decode.
    using DropFilter = std::function<bool(NodeId tx, NodeId rx, const MacPdu& pdu)>;

    /// Validates the scenario; throws std::invalid_argument if it is broken.
    explicit Network(Scenario scenario);
    ~Network();

    Network(const Network&) = delete;
    Network& operator=(const Network&) = delete;

    /// Run the configured traffic for duration + drain and return the metrics.
    RunMetrics run();

    /// Schedule the configured traffic sources. run() does this itself.
    void start_traffic();
    void run_until(SimTime t);
    /// Originate one packet at `source` now, counted as generated.
    std::uint32_t inject(NodeId source, std::uint32_t payload_bits);
    RunMetrics collect() const;

    void set_transmit_observer(TransmitObserver observer) { observer_ = std::move(observer); }
    void set_drop_filter(DropFilter filter) { drop_filter_ = std::move(filter); }
    void set_trace(std::function<void(const TraceRecord&)> trace) { scheduler_.set_trace(std::move(trace)); }

    const Scenario& scenario() const noexcept { return scenario_; }
    Scheduler& scheduler() noexcept { return scheduler_; }
    const IcrpRouter& router(NodeId id) const;
    const CsmaMac& mac(NodeId id) const;
    double source_level_db() const noexcept { return source_level_db_; }
    /// Received level at `rx` of a transmission from `tx`.
    double link_level_db(NodeId tx, NodeId rx) const;

private:
    friend class NodeStack;

    struct Link {
        double delay = 0.0;
        double level_db = 0.0;
    };

    struct Reception {
        Arrival arrival;
        NodeId tx;
        std::shared_ptr<const MacPdu> pdu;
    };

    void begin_transmission(NodeId tx, const MacPdu& pdu);
    void arrival_start(NodeId rx, NodeId tx, const Arrival& arrival, std::shared_ptr<const MacPdu> pdu);
    void finish_reception(NodeId rx);
    void emission(NodeId source, std::size_t index);
    void application_delivery(const RoutingHeader& header);
    double threshold_for(TransportFormatId tf) const;
    bool lockable(const ModemState& modem, const Arrival& arrival, TransportFormatId tf) const;

    Scenario scenario_;
    Scheduler scheduler_;
    double source_level_db_ = 0.0;
    MacTiming timing_;
    std::vector<std::vector<Link>> links_;
    std::vector<std::unique_ptr<NodeStack>> nodes_;
    std::vector<std::optional<Reception>> receiving_;
    std::vector<std::vector<SimTime>> emissions_;
    std::vector<NodeId> sources_;
    std::uint64_t next_arrival_id_ = 0;

    TransmitObserver observer_;
    DropFilter drop_filter_;

    RunMetrics metrics_;
    double delay_sum_ = 0.0;
    bool traffic_started_ = false;
};

/// Build and run a scenario.
RunMetrics run(const Scenario& scenario);

} // namespace uwsn
