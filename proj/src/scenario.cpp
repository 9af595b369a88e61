#include "uwsn/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>

namespace uwsn {

void Scenario::validate() const
{
    if (nodes.empty())
        throw std::invalid_argument("scenario: no nodes");
    std::set<std::uint32_t> ids;
    int sinks = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& n = nodes[i];
        if (!ids.insert(to_index(n.id)).second)
            throw std::invalid_argument("scenario: duplicate node id " + std::to_string(to_index(n.id)));
        if (to_index(n.id) != i)
            throw std::invalid_argument("scenario: node ids must be 0..N-1 in order (found " +
                                        std::to_string(to_index(n.id)) + " at position " + std::to_string(i) + ")");
        if (!std::isfinite(n.directivity_gain_db))
            throw std::invalid_argument("scenario: node " + std::to_string(i) + " has non-finite gain");
        if (!std::isfinite(n.position.x) || !std::isfinite(n.position.y) || !std::isfinite(n.position.z))
            throw std::invalid_argument("scenario: node " + std::to_string(i) + " has non-finite position");
        if (n.role == Role::Sink)
            ++sinks;
    }
    if (sinks != 1)
        throw std::invalid_argument("scenario: exactly one sink required, found " + std::to_string(sinks));
    if (!(duration > 0.0))
        throw std::invalid_argument("scenario: duration must be > 0");
    if (!(drain_s >= 0.0))
        throw std::invalid_argument("scenario: drain must be >= 0");
    if (source_level_db && !std::isfinite(*source_level_db))
        throw std::invalid_argument("scenario: source level must be finite");
    if (calibration_range_m && !(*calibration_range_m > 0.0))
        throw std::invalid_argument("scenario: calibration range must be > 0");

    channel.validate();
    modem.validate();
    icrp.validate();
    traffic.validate();
    if (traffic.sources) {
        for (NodeId s : *traffic.sources) {
            if (to_index(s) >= nodes.size())
                throw std::invalid_argument("traffic: unknown source node " + std::to_string(to_index(s)));
            if (node(s).role == Role::Sink)
                throw std::invalid_argument("traffic: the sink cannot be a traffic source");
        }
    }
    for (const auto& w : traffic.alarm_schedule) {
        if (to_index(w.node) >= nodes.size())
            throw std::invalid_argument("traffic: alarm window on unknown node " + std::to_string(to_index(w.node)));
    }
    resolve_mac_timing(mac, modem, channel, traffic.payload_bits, max_link_range());
}

NodeId Scenario::sink() const
{
    for (const auto& n : nodes) {
        if (n.role == Role::Sink)
            return n.id;
    }
    throw std::invalid_argument("scenario: no sink");
}

std::vector<NodeId> Scenario::traffic_sources() const
{
    if (traffic.sources)
        return *traffic.sources;
    std::vector<NodeId> out;
    for (const auto& n : nodes) {
        if (n.role == Role::Sensor)
            out.push_back(n.id);
    }
    return out;
}

double Scenario::farthest_source_range() const
{
    const Position& s = node(sink()).position;
    double best = 0.0;
    for (NodeId id : traffic_sources())
        best = std::max(best, distance(node(id).position, s));
    return best;
}

double Scenario::max_link_range() const
{
    return std::max(calibration_range_m.value_or(farthest_source_range()), 1.0);
}

double Scenario::resolved_source_level() const
{
    if (source_level_db)
        return *source_level_db;
    return calibrate_source_level(max_link_range(), channel);
}

void Scenario::set_network_tf(TransportFormatId tf)
{
    for (auto& n : nodes)
        n.initial_tf = tf;
    icrp.min_tf = tf;
}

Scenario build_ring_scenario(double node_distance_m, std::uint32_t n_sensors, std::uint32_t n_relays)
{
    if (!(node_distance_m > 0.0))
        throw std::invalid_argument("build_ring_scenario: node distance must be > 0");

    Scenario s;
    auto on_circle = [](double radius, std::uint32_t i, std::uint32_t n) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
        return Position{radius * std::cos(angle), radius * std::sin(angle), 0.0};
    };

    std::uint32_t next = 0;
    s.nodes.push_back(NodeConfig{node(next++), Position{}, Role::Sink});
    for (std::uint32_t i = 0; i < n_relays; ++i)
        s.nodes.push_back(NodeConfig{node(next++), on_circle(node_distance_m, i, n_relays), Role::Relay});
    for (std::uint32_t i = 0; i < n_sensors; ++i)
        s.nodes.push_back(NodeConfig{node(next++), on_circle(2.0 * node_distance_m, i, n_sensors), Role::Sensor});
    return s;
}

} // namespace uwsn
