#pragma once

#include "uwsn/types.hpp"

#include <cstdint>
#include <variant>
#include <vector>

namespace uwsn {

enum class PduKind : std::uint8_t { DataBc, DataUc, StatusUc, MacAck };

std::string_view to_string(PduKind kind) noexcept;

constexpr bool is_data(PduKind k) noexcept { return k == PduKind::DataBc || k == PduKind::DataUc; }

enum class RouteMode : std::uint8_t { Broadcast, Unicast };

/// A node on a traversed path and the SINR of the link it was reached over.
/// The origin carries +infinity.
struct HopRecord {
    NodeId node{};
    double sinr_db = kInfinity;

    bool operator==(const HopRecord&) const = default;
};

struct RoutingHeader {
    NodeId origin{};
    std::uint32_t origin_seq = 0;
    RouteMode mode = RouteMode::Broadcast;
    std::uint32_t hop_count = 0;
    std::vector<HopRecord> path;    ///< traversed so far, origin first
    std::vector<NodeId> uc_route;   ///< full source route, unicast only
    std::size_t uc_next_index = 0;  ///< position of the next hop in uc_route
    std::uint32_t payload_bits = 0;
    SimTime created = 0.0;
};

struct StatusBody {
    NodeId origin{};
    std::uint32_t origin_seq = 0;
    std::vector<HopRecord> path;  ///< selected path, origin first, sink last
};

struct MacPdu {
    PduKind kind = PduKind::DataBc;
    NodeId src{};
    NodeId dest = kBroadcast;
    std::uint32_t seq = 0;      ///< per-link sequence number (DATA_UC) or acknowledged seq (MAC_ACK)
    std::uint32_t bits = 0;
    TransportFormatId tf = TransportFormatId::TF1;
    std::variant<std::monostate, RoutingHeader, StatusBody> body;

    const RoutingHeader& header() const { return std::get<RoutingHeader>(body); }
    RoutingHeader& header() { return std::get<RoutingHeader>(body); }
    const StatusBody& status() const { return std::get<StatusBody>(body); }
};

} // namespace uwsn
