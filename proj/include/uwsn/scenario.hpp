#pragma once

#include "uwsn/channel.hpp"
#include "uwsn/mac.hpp"
#include "uwsn/modem.hpp"
#include "uwsn/routing.hpp"
#include "uwsn/traffic.hpp"

#include <optional>
#include <vector>

namespace uwsn {

struct NodeConfig {
    NodeId id{};
    Position position;
    Role role = Role::Sensor;
    double directivity_gain_db = 0.0;  ///< applied on both transmit and receive
    bool bc_forwarding_enabled = true;
    TransportFormatId initial_tf = TransportFormatId::TF3;
};

struct Scenario {
    std::vector<NodeConfig> nodes;
    ChannelParams channel;
    /// Explicit source level; unset means calibrate to `calibration_range_m`.
    std::optional<double> source_level_db;
    /// Unset means the farthest traffic source from the sink.
    std::optional<double> calibration_range_m;
    ModemParams modem;
    MacConfig mac;
    IcrpConfig icrp;
    TrafficConfig traffic;
    SimTime duration = 7200.0;
    /// Extra time after `duration` with no new traffic so packets in flight can land.
    double drain_s = 60.0;
    std::uint64_t seed = 1;

    /// Throws std::invalid_argument describing the first broken invariant.
    void validate() const;

    NodeId sink() const;
    const NodeConfig& node(NodeId id) const { return nodes.at(to_index(id)); }
    std::vector<NodeId> traffic_sources() const;

    /// Largest distance between any traffic source and the sink.
    double farthest_source_range() const;
    double max_link_range() const;
    double resolved_source_level() const;

    /// Make this a network of the given format: every node starts there and
    /// links never adapt below it.
    void set_network_tf(TransportFormatId tf);
};

/// Sink at the origin, relays on a circle of radius `node_distance_m`,
/// sensors on radius 2 * node_distance_m, all at one depth. Relays sit at
/// 0, 90, 180, 270 degrees (for four) and sensors every 360/n degrees from
/// 0, so alternate sensors share a spoke with a relay. Ids: sink 0, relays
/// 1..n_relays, then sensors.
Scenario build_ring_scenario(double node_distance_m, std::uint32_t n_sensors = 8, std::uint32_t n_relays = 4);

} // namespace uwsn
