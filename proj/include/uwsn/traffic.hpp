#pragma once

#include "uwsn/types.hpp"

#include <optional>
#include <span>
#include <vector>

namespace uwsn {

struct AlarmWindow {
    NodeId node{};
    SimTime start = 0.0;
    double duration = 0.0;

    bool operator==(const AlarmWindow&) const = default;
};

struct TrafficConfig {
    double measurement_period_s = 6.0;
    std::uint32_t normal_decimation = 7;
    std::uint32_t alarm_decimation = 3;
    std::uint32_t payload_bits = 420;
    std::vector<AlarmWindow> alarm_schedule;
    /// Constant emission interval; replaces measurement decimation when set.
    std::optional<double> interval_override_s;
    bool phase_offsets = true;
    /// Emitting nodes. Unset means every sensor.
    std::optional<std::vector<NodeId>> sources;

    void validate() const;
};

/// Alarm windows [3600 k, 3600 k + window_s) on each listed node for every
/// hour that starts before `duration_s`.
std::vector<AlarmWindow> alarm_hourly_schedule(std::span<const NodeId> nodes, double duration_s,
                                               double window_s = 900.0);

/// Emission clock of one source.
///
/// Measurements happen at phase + k * period. Measurement k is sent when
/// (k + slot) is a multiple of the decimation active at that instant, with
/// `slot` a per-node offset into the decimation cycle. With an interval
/// override every instant phase + k * interval is an emission.
class EmissionSchedule {
public:
    EmissionSchedule(NodeId node, const TrafficConfig& config, double phase, std::uint32_t slot);

    /// Draw phase and slot for `node` from a stream of the run seed.
    static EmissionSchedule seeded(NodeId node, const TrafficConfig& config, std::uint64_t seed);

    bool in_alarm(SimTime t) const;
    std::uint32_t decimation_at(SimTime t) const;

    /// First emission at or after `from`.
    SimTime next_emission(SimTime from) const;

    /// All emissions in [0, duration].
    std::vector<SimTime> emissions_until(SimTime duration) const;

    double phase() const noexcept { return phase_; }
    std::uint32_t slot() const noexcept { return slot_; }

private:
    double step() const;
    bool emits(std::uint64_t k) const;

    NodeId node_;
    const TrafficConfig* config_;
    double phase_;
    std::uint32_t slot_;
};

} // namespace uwsn
