#include "uwsn/routing.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

namespace uwsn {

void IcrpConfig::validate() const
{
    if (hop_limit < 1)
        throw std::invalid_argument("icrp: hop_limit must be >= 1");
    if (patience < 1)
        throw std::invalid_argument("icrp: patience must be >= 1");
    if (!(status_window_s >= 0.0))
        throw std::invalid_argument("icrp: status_window_s must be >= 0");
    if (!(route_lifetime_s > 0.0))
        throw std::invalid_argument("icrp: route_lifetime_s must be > 0");
    if (rate_up_successes < 1 || rate_down_failures < 1)
        throw std::invalid_argument("icrp: rate adaptation thresholds must be >= 1");
    if (min_tf > max_tf)
        throw std::invalid_argument("icrp: min_tf must not be faster than max_tf");
    if (dup_cache_size < 1)
        throw std::invalid_argument("icrp: dup_cache_size must be >= 1");
}

DupCache::DupCache(std::size_t capacity) : capacity_(capacity)
{
    require(capacity > 0, "DupCache: zero capacity");
}

bool DupCache::contains(NodeId origin, std::uint32_t seq) const
{
    return keys_.contains(Key{origin, seq});
}

bool DupCache::insert(NodeId origin, std::uint32_t seq)
{
    if (!keys_.insert(Key{origin, seq}).second)
        return false;
    order_.emplace_back(origin, seq);
    if (order_.size() > capacity_) {
        keys_.erase(order_.front());
        order_.pop_front();
    }
    return true;
}

LinkRateTable::LinkRateTable(TransportFormatId initial, TransportFormatId min_tf, TransportFormatId max_tf,
                             std::uint32_t up_successes, std::uint32_t down_failures)
    : initial_(std::clamp(initial, min_tf, max_tf)), min_(min_tf), max_(max_tf), up_(up_successes),
      down_(down_failures)
{
    require(min_tf <= max_tf, "LinkRateTable: min_tf above max_tf");
}

TransportFormatId LinkRateTable::tf(NodeId neighbor) const
{
    return state(neighbor).tf;
}

LinkRateTable::State LinkRateTable::state(NodeId neighbor) const
{
    auto it = links_.find(neighbor);
    return it == links_.end() ? State{initial_} : it->second;
}

TransportFormatId LinkRateTable::record(NodeId neighbor, bool success)
{
    auto [it, fresh] = links_.try_emplace(neighbor, State{initial_});
    State& s = it->second;
    if (success) {
        s.failures = 0;
        if (++s.successes >= up_) {
            if (s.tf < max_)
                s.tf = static_cast<TransportFormatId>(tf_index(s.tf) + 1);
            s.successes = 0;
        }
    } else {
        s.successes = 0;
        if (++s.failures >= down_) {
            if (s.tf > min_)
                s.tf = static_cast<TransportFormatId>(tf_index(s.tf) - 1);
            s.failures = 0;
        }
    }
    return s.tf;
}

double path_min_sinr(std::span<const HopRecord> path)
{
    double worst = kInfinity;
    for (std::size_t i = 1; i < path.size(); ++i)
        worst = std::min(worst, path[i].sinr_db);
    return worst;
}

namespace {

// True if a ranks strictly better than b.
bool better(const PathCandidate& a, const PathCandidate& b)
{
    const double sa = path_min_sinr(a.path);
    const double sb = path_min_sinr(b.path);
    if (sa != sb)
        return sa > sb;
    if (a.path.size() != b.path.size())
        return a.path.size() < b.path.size();
    if (a.arrival != b.arrival)
        return a.arrival < b.arrival;
    auto ids = [](const PathCandidate& c) {
        std::vector<std::uint32_t> v;
        v.reserve(c.path.size());
        for (std::size_t i = 1; i < c.path.size(); ++i)
            v.push_back(to_index(c.path[i].node));
        return v;
    };
    const auto ia = ids(a);
    const auto ib = ids(b);
    if (ia != ib)
        return ia < ib;
    auto levels = [](const PathCandidate& c) {
        std::vector<double> v;
        for (std::size_t i = 1; i < c.path.size(); ++i)
            v.push_back(c.path[i].sinr_db);
        return v;
    };
    return levels(a) > levels(b);
}

} // namespace

PathCandidate select_best_path(std::span<const PathCandidate> candidates)
{
    require(!candidates.empty(), "select_best_path: no candidates");
    const PathCandidate* best = &candidates.front();
    for (const auto& c : candidates.subspan(1)) {
        if (better(c, *best))
            best = &c;
    }
    return *best;
}

IcrpRouter::IcrpRouter(RouterSettings settings, RouterHost& host)
    : settings_(std::move(settings)),
      host_(host),
      dup_(settings_.icrp.dup_cache_size),
      rates_(settings_.initial_tf, settings_.icrp.min_tf, settings_.icrp.max_tf, settings_.icrp.rate_up_successes,
             settings_.icrp.rate_down_failures)
{
}

bool IcrpRouter::has_live_route() const
{
    return route_ && host_.now() - route_->established < settings_.icrp.route_lifetime_s;
}

double IcrpRouter::route_time(SimTime until) const
{
    return route_time_ + (route_since_ ? until - *route_since_ : 0.0);
}

std::uint32_t IcrpRouter::originate(std::uint32_t payload_bits)
{
    require(!settings_.is_sink, "IcrpRouter::originate: the sink does not originate data");
    const std::uint32_t seq = next_seq_++;
    dup_.insert(settings_.self, seq);

    RoutingHeader h;
    h.origin = settings_.self;
    h.origin_seq = seq;
    h.payload_bits = payload_bits;
    h.created = host_.now();
    h.path.push_back(HopRecord{settings_.self, kInfinity});

    if (route_ && !has_live_route())
        invalidate_route();

    if (route_) {
        h.mode = RouteMode::Unicast;
        h.uc_route = route_->path_to_sink;
        h.uc_next_index = 1;
        ++counters_.uc_originated;
        send_uc(std::move(h), route_->next_hop());
    } else {
        h.mode = RouteMode::Broadcast;
        ++counters_.bc_originated;
        send_bc(std::move(h));
    }
    return seq;
}

void IcrpRouter::send_bc(RoutingHeader header)
{
    header.mode = RouteMode::Broadcast;
    header.uc_route.clear();
    header.uc_next_index = 0;
    MacPdu pdu;
    pdu.kind = PduKind::DataBc;
    pdu.dest = kBroadcast;
    pdu.bits = header.payload_bits;
    pdu.tf = std::clamp(settings_.initial_tf, settings_.icrp.min_tf, settings_.icrp.max_tf);
    pdu.body = std::move(header);
    host_.mac_send(std::move(pdu));
}

void IcrpRouter::send_uc(RoutingHeader header, NodeId next)
{
    MacPdu pdu;
    pdu.kind = PduKind::DataUc;
    pdu.dest = next;
    pdu.bits = header.payload_bits;
    pdu.tf = rates_.tf(next);
    pdu.body = std::move(header);
    host_.mac_send(std::move(pdu));
}

void IcrpRouter::on_mac_deliver(const MacPdu& pdu, double sinr_db)
{
    switch (pdu.kind) {
    case PduKind::DataBc:
        if (settings_.is_sink)
            receive_bc_at_sink(pdu, sinr_db);
        else
            receive_bc(pdu, sinr_db);
        return;
    case PduKind::DataUc:
        receive_uc(pdu, sinr_db);
        return;
    case PduKind::StatusUc:
        receive_status(pdu);
        return;
    case PduKind::MacAck:
        return;
    }
}

void IcrpRouter::receive_bc(const MacPdu& pdu, double sinr_db)
{
    const RoutingHeader& in = pdu.header();
    if (!dup_.insert(in.origin, in.origin_seq)) {
        ++counters_.dup_drops;
        return;
    }
    if (!settings_.bc_forwarding_enabled) {
        ++counters_.choke_drops;
        return;
    }
    if (in.hop_count + 1 >= settings_.icrp.hop_limit) {
        ++counters_.hop_limit_drops;
        return;
    }
    RoutingHeader out = in;
    out.path.push_back(HopRecord{settings_.self, sinr_db});
    ++out.hop_count;
    ++counters_.bc_forwarded;
    send_bc(std::move(out));
}

void IcrpRouter::receive_bc_at_sink(const MacPdu& pdu, double sinr_db)
{
    RoutingHeader h = pdu.header();
    h.path.push_back(HopRecord{settings_.self, sinr_db});
    ++h.hop_count;
    const Key key{h.origin, h.origin_seq};

    if (auto window = status_windows_.find(key); window != status_windows_.end()) {
        ++counters_.sink_duplicates;
        window->second.push_back(PathCandidate{std::move(h.path), host_.now()});
        return;
    }
    if (!sink_delivered_.insert(key).second) {
        ++counters_.sink_duplicates;
        return;
    }
    host_.deliver_to_application(h);
    status_windows_[key].push_back(PathCandidate{h.path, host_.now()});
    host_.schedule_timer(settings_.icrp.status_window_s, [this, key] { close_status_window(key); });
}

void IcrpRouter::close_status_window(Key key)
{
    auto node = status_windows_.extract(key);
    const PathCandidate best = select_best_path(node.mapped());
    StatusBody body{key.origin, key.seq, best.path};
    ++counters_.status_generated;
    const NodeId previous = body.path[body.path.size() - 2].node;
    send_status(body, previous);
}

void IcrpRouter::send_status(const StatusBody& body, NodeId to)
{
    MacPdu pdu;
    pdu.kind = PduKind::StatusUc;
    pdu.dest = to;
    pdu.bits = settings_.status_base_bits +
               settings_.status_bits_per_hop * static_cast<std::uint32_t>(body.path.size() - 1);
    pdu.tf = rates_.tf(to);
    pdu.body = body;
    host_.mac_send(std::move(pdu));
}

void IcrpRouter::receive_status(const MacPdu& pdu)
{
    const StatusBody& body = pdu.status();
    auto it = std::find_if(body.path.begin(), body.path.end(),
                           [&](const HopRecord& h) { return h.node == settings_.self; });
    if (it == body.path.end() || it + 1 == body.path.end()) {
        ++counters_.anomalies;
        return;
    }
    const auto index = static_cast<std::size_t>(it - body.path.begin());
    install_route(std::span(body.path).subspan(index));
    if (index > 0)
        send_status(body, body.path[index - 1].node);
}

void IcrpRouter::install_route(std::span<const HopRecord> suffix)
{
    RouteEntry entry;
    for (const auto& h : suffix)
        entry.path_to_sink.push_back(h.node);
    entry.min_sinr_db = path_min_sinr(suffix);
    entry.established = host_.now();
    if (!route_since_)
        route_since_ = host_.now();
    route_ = std::move(entry);
    ++counters_.routes_installed;
}

void IcrpRouter::invalidate_route()
{
    route_.reset();
    if (route_since_) {
        route_time_ += host_.now() - *route_since_;
        route_since_.reset();
    }
    ++counters_.route_invalidations;
}

void IcrpRouter::receive_uc(const MacPdu& pdu, double sinr_db)
{
    const RoutingHeader& in = pdu.header();
    if (in.uc_next_index >= in.uc_route.size() || in.uc_route[in.uc_next_index] != settings_.self) {
        ++counters_.anomalies;
        return;
    }
    RoutingHeader h = in;
    h.path.push_back(HopRecord{settings_.self, sinr_db});
    ++h.hop_count;

    if (settings_.is_sink) {
        if (sink_delivered_.insert(Key{h.origin, h.origin_seq}).second)
            host_.deliver_to_application(h);
        else
            ++counters_.sink_duplicates;
        return;
    }
    if (++h.uc_next_index >= h.uc_route.size() || h.hop_count >= settings_.icrp.hop_limit) {
        ++counters_.anomalies;
        return;
    }
    const NodeId next = h.uc_route[h.uc_next_index];
    ++counters_.uc_forwarded;
    send_uc(std::move(h), next);
}

void IcrpRouter::on_unicast_outcome(const MacPdu& pdu, bool delivered)
{
    if (pdu.kind != PduKind::DataUc)
        return;
    const NodeId next = pdu.dest;
    if (settings_.icrp.rate_adaptation)
        rates_.record(next, delivered);

    const bool own_route = route_ && route_->next_hop() == next;
    std::uint32_t& failures = own_route ? route_->consecutive_failures : other_failures_[next];
    if (delivered) {
        failures = 0;
        return;
    }
    if (++failures < settings_.icrp.patience) {
        ++counters_.patience_retries;
        send_uc(pdu.header(), next);
        return;
    }

    if (own_route)
        invalidate_route();
    else
        other_failures_.erase(next);

    RoutingHeader h = pdu.header();
    if (h.hop_count >= settings_.icrp.hop_limit) {
        ++counters_.hop_limit_drops;
        return;
    }
    if (!dup_.insert(h.origin, h.origin_seq) && h.origin != settings_.self) {
        // Already flooded from here (a retried copy failing again).
        ++counters_.dup_drops;
        return;
    }
    ++counters_.bc_fallbacks;
    send_bc(std::move(h));
}

} // namespace uwsn
