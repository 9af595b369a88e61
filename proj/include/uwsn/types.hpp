#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace uwsn {

/// Node identifier. Nodes of a scenario are numbered densely from 0.
enum class NodeId : std::uint32_t {};

inline constexpr NodeId kBroadcast{std::numeric_limits<std::uint32_t>::max()};

constexpr std::uint32_t to_index(NodeId id) noexcept { return static_cast<std::uint32_t>(id); }
constexpr NodeId node(std::uint32_t index) noexcept { return NodeId{index}; }

/// Simulation time in seconds.
using SimTime = double;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Timers and event times are quantized to whole microseconds.
inline SimTime quantize(SimTime t) { return std::round(t * 1e6) / 1e6; }

enum class Role : std::uint8_t { Sensor, Relay, Sink };

/// Modem transport formats, ordered slowest to fastest.
enum class TransportFormatId : std::uint8_t { TF1 = 0, TF2 = 1, TF3 = 2 };

inline constexpr int kTransportFormatCount = 3;

constexpr int tf_index(TransportFormatId tf) noexcept { return static_cast<int>(tf); }

std::string_view to_string(Role role) noexcept;
std::string_view to_string(TransportFormatId tf) noexcept;
Role parse_role(std::string_view text);
TransportFormatId parse_transport_format(std::string_view text);

/// Raised when a caller breaks an operation's precondition.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

inline void require(bool condition, const char* what)
{
    if (!condition)
        throw ContractViolation(what);
}

} // namespace uwsn
