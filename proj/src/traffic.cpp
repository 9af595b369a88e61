#include "uwsn/traffic.hpp"

#include "uwsn/rng.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace uwsn {

void TrafficConfig::validate() const
{
    if (!(measurement_period_s > 0.0))
        throw std::invalid_argument("traffic: measurement_period_s must be > 0");
    if (normal_decimation < 1 || alarm_decimation < 1)
        throw std::invalid_argument("traffic: decimations must be >= 1");
    if (payload_bits == 0)
        throw std::invalid_argument("traffic: payload_bits must be > 0");
    if (interval_override_s && !(*interval_override_s > 0.0))
        throw std::invalid_argument("traffic: interval must be > 0");
    for (const auto& w : alarm_schedule) {
        if (!(w.duration >= 0.0) || !(w.start >= 0.0))
            throw std::invalid_argument("traffic: alarm windows need non-negative start and duration");
    }
}

std::vector<AlarmWindow> alarm_hourly_schedule(std::span<const NodeId> nodes, double duration_s, double window_s)
{
    require(window_s >= 0.0 && window_s <= 3600.0, "alarm_hourly_schedule: window must be within an hour");
    std::vector<AlarmWindow> out;
    if (window_s == 0.0)
        return out;
    for (NodeId n : nodes) {
        for (double start = 0.0; start < duration_s; start += 3600.0)
            out.push_back(AlarmWindow{n, start, window_s});
    }
    return out;
}

EmissionSchedule::EmissionSchedule(NodeId node, const TrafficConfig& config, double phase, std::uint32_t slot)
    : node_(node), config_(&config), phase_(phase), slot_(slot)
{
    require(phase >= 0.0, "EmissionSchedule: negative phase");
}

EmissionSchedule EmissionSchedule::seeded(NodeId node, const TrafficConfig& config, std::uint64_t seed)
{
    if (!config.phase_offsets)
        return EmissionSchedule(node, config, 0.0, 0);
    Rng rng(seed, (std::uint64_t{1} << 32) | to_index(node));
    const double base = config.interval_override_s.value_or(config.measurement_period_s);
    const double phase = rng.uniform(0.0, base);
    const auto cycle = std::lcm(config.normal_decimation, config.alarm_decimation);
    const auto slot = static_cast<std::uint32_t>(rng.next() % cycle);
    return EmissionSchedule(node, config, phase, slot);
}

bool EmissionSchedule::in_alarm(SimTime t) const
{
    for (const auto& w : config_->alarm_schedule) {
        if (w.node == node_ && t >= w.start && t < w.start + w.duration)
            return true;
    }
    return false;
}

std::uint32_t EmissionSchedule::decimation_at(SimTime t) const
{
    return in_alarm(t) ? config_->alarm_decimation : config_->normal_decimation;
}

double EmissionSchedule::step() const
{
    return config_->interval_override_s.value_or(config_->measurement_period_s);
}

bool EmissionSchedule::emits(std::uint64_t k) const
{
    if (config_->interval_override_s)
        return true;
    const SimTime t = phase_ + static_cast<double>(k) * step();
    return (k + slot_) % decimation_at(t) == 0;
}

SimTime EmissionSchedule::next_emission(SimTime from) const
{
    std::uint64_t k = 0;
    if (from > phase_)
        k = static_cast<std::uint64_t>(std::ceil((from - phase_) / step() - 1e-9));
    while (phase_ + static_cast<double>(k) * step() < from - 1e-9)
        ++k;
    while (!emits(k))
        ++k;
    return phase_ + static_cast<double>(k) * step();
}

std::vector<SimTime> EmissionSchedule::emissions_until(SimTime duration) const
{
    std::vector<SimTime> out;
    for (std::uint64_t k = 0;; ++k) {
        const SimTime t = phase_ + static_cast<double>(k) * step();
        if (t > duration)
            break;
        if (emits(k))
            out.push_back(t);
    }
    return out;
}

} // namespace uwsn
