#pragma once

#include "uwsn/modem.hpp"
#include "uwsn/packet.hpp"
#include "uwsn/scheduler.hpp"

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

namespace uwsn {

struct IcrpConfig {
    std::uint32_t hop_limit = 4;
    std::uint32_t patience = 2;
    double status_window_s = 3.0;
    double route_lifetime_s = kInfinity;
    std::uint32_t rate_up_successes = 3;
    std::uint32_t rate_down_failures = 1;
    bool rate_adaptation = true;
    /// Slowest and fastest transport formats a link may adapt to.
    TransportFormatId min_tf = TransportFormatId::TF1;
    TransportFormatId max_tf = TransportFormatId::TF3;
    std::size_t dup_cache_size = 1024;

    void validate() const;
};

struct RouteEntry {
    std::vector<NodeId> path_to_sink;  ///< starts at the owning node
    double min_sinr_db = kInfinity;
    SimTime established = 0.0;
    std::uint32_t consecutive_failures = 0;

    NodeId next_hop() const { return path_to_sink.at(1); }
};

/// Bounded FIFO set of (origin, origin_seq) keys.
class DupCache {
public:
    explicit DupCache(std::size_t capacity);

    bool contains(NodeId origin, std::uint32_t seq) const;
    /// Returns false if the key was already present.
    bool insert(NodeId origin, std::uint32_t seq);
    std::size_t size() const noexcept { return order_.size(); }

private:
    using Key = std::pair<NodeId, std::uint32_t>;
    std::size_t capacity_;
    std::deque<Key> order_;
    std::set<Key> keys_;
};

/// Per-neighbour transport format driven by unicast ARQ outcomes.
class LinkRateTable {
public:
    struct State {
        TransportFormatId tf;
        std::uint32_t successes = 0;
        std::uint32_t failures = 0;
    };

    LinkRateTable(TransportFormatId initial, TransportFormatId min_tf, TransportFormatId max_tf,
                  std::uint32_t up_successes, std::uint32_t down_failures);

    TransportFormatId tf(NodeId neighbor) const;
    TransportFormatId record(NodeId neighbor, bool success);
    State state(NodeId neighbor) const;

private:
    TransportFormatId initial_;
    TransportFormatId min_;
    TransportFormatId max_;
    std::uint32_t up_;
    std::uint32_t down_;
    std::map<NodeId, State> links_;
};

struct PathCandidate {
    std::vector<HopRecord> path;  ///< origin first, sink last
    SimTime arrival = 0.0;
};

/// Weakest link SINR on a path. The origin's own entry is ignored.
double path_min_sinr(std::span<const HopRecord> path);

/// Best of the candidates by, in order: highest weakest-link SINR, fewer
/// hops, earliest arrival, lowest node sequence, then the higher per-hop
/// SINR sequence. The order is total, so the result does not depend on the
/// order of `candidates`.
PathCandidate select_best_path(std::span<const PathCandidate> candidates);

class RouterHost {
public:
    virtual ~RouterHost() = default;
    virtual SimTime now() const = 0;
    virtual EventId schedule_timer(double delay, std::function<void()> action) = 0;
    virtual void mac_send(MacPdu pdu) = 0;
    /// Sink only: first copy of each (origin, seq).
    virtual void deliver_to_application(const RoutingHeader& header) = 0;
};

struct RouterCounters {
    std::uint64_t bc_originated = 0;
    std::uint64_t uc_originated = 0;
    std::uint64_t bc_forwarded = 0;
    std::uint64_t uc_forwarded = 0;
    std::uint64_t dup_drops = 0;
    std::uint64_t choke_drops = 0;
    std::uint64_t hop_limit_drops = 0;
    std::uint64_t patience_retries = 0;
    std::uint64_t bc_fallbacks = 0;
    std::uint64_t route_invalidations = 0;
    std::uint64_t routes_installed = 0;
    std::uint64_t anomalies = 0;
    std::uint64_t status_generated = 0;
    std::uint64_t sink_duplicates = 0;

    bool operator==(const RouterCounters&) const = default;
};

struct RouterSettings {
    NodeId self{};
    NodeId sink{};
    bool is_sink = false;
    bool bc_forwarding_enabled = true;
    TransportFormatId initial_tf = TransportFormatId::TF3;
    IcrpConfig icrp;
    std::uint32_t status_base_bits = 80;
    std::uint32_t status_bits_per_hop = 16;
};

/// Information-carrying routing with broadcast fallback.
///
/// Without a route, data is flooded. Every node forwards a given
/// (origin, seq) at most once and never at or beyond the hop limit. The
/// sink answers the first broadcast copy of each packet with a STATUS that
/// travels back along the best path seen within the status window and
/// installs a source route at every node it passes. Unicast runs over MAC
/// ARQ; a node falls back to broadcast after `patience` consecutive packets
/// exhaust ARQ on the same next hop.
class IcrpRouter {
public:
    IcrpRouter(RouterSettings settings, RouterHost& host);

    IcrpRouter(const IcrpRouter&) = delete;
    IcrpRouter& operator=(const IcrpRouter&) = delete;

    /// Emit a new data packet from this node. Returns its origin sequence number.
    std::uint32_t originate(std::uint32_t payload_bits);

    void on_mac_deliver(const MacPdu& pdu, double sinr_db);
    void on_unicast_outcome(const MacPdu& pdu, bool delivered);

    /// Current route if one is live (unexpired).
    const std::optional<RouteEntry>& route() const noexcept { return route_; }
    bool has_live_route() const;
    const LinkRateTable& rates() const noexcept { return rates_; }
    const RouterCounters& counters() const noexcept { return counters_; }
    const DupCache& dup_cache() const noexcept { return dup_; }
    /// Total time a route has been installed, up to `until`.
    double route_time(SimTime until) const;

private:
    struct Key {
        NodeId origin;
        std::uint32_t seq;
        auto operator<=>(const Key&) const = default;
    };

    void send_bc(RoutingHeader header);
    void send_uc(RoutingHeader header, NodeId next);
    void receive_bc(const MacPdu& pdu, double sinr_db);
    void receive_bc_at_sink(const MacPdu& pdu, double sinr_db);
    void receive_uc(const MacPdu& pdu, double sinr_db);
    void receive_status(const MacPdu& pdu);
    void close_status_window(Key key);
    void send_status(const StatusBody& body, NodeId to);
    void install_route(std::span<const HopRecord> suffix);
    void invalidate_route();

    RouterSettings settings_;
    RouterHost& host_;
    DupCache dup_;
    LinkRateTable rates_;
    std::optional<RouteEntry> route_;
    std::map<NodeId, std::uint32_t> other_failures_;
    std::uint32_t next_seq_ = 0;

    std::set<Key> sink_delivered_;
    std::map<Key, std::vector<PathCandidate>> status_windows_;

    std::optional<SimTime> route_since_;
    double route_time_ = 0.0;
    RouterCounters counters_;
};

} // namespace uwsn
