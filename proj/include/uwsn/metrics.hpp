#pragma once

#include "uwsn/channel.hpp"
#include "uwsn/packet.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>

namespace uwsn {

struct SourceStats {
    std::uint64_t generated = 0;
    std::uint64_t delivered = 0;
    double uc_time_fraction = 0.0;  ///< share of the run with an installed route

    bool operator==(const SourceStats&) const = default;
};

struct RunMetrics {
    std::uint64_t generated = 0;
    std::uint64_t delivered_unique = 0;
    double pdr_pct = 0.0;     ///< NaN when nothing was generated
    std::uint64_t status_count = 0;
    double status_pct = 0.0;  ///< STATUS messages per generated data packet, NaN when nothing was generated
    double mean_delay_s = 0.0;

    std::map<NodeId, SourceStats> per_source;
    /// Transmissions per (sender, addressee); broadcasts use kBroadcast.
    std::map<std::pair<NodeId, NodeId>, std::uint64_t> link_tx;
    /// Data transmissions (DATA_BC and DATA_UC, retransmissions included) by transport format.
    std::array<std::uint64_t, kTransportFormatCount> tf_usage{};
    std::array<std::uint64_t, kLossReasonCount> losses{};

    std::uint64_t data_tx = 0;
    std::uint64_t ack_tx = 0;
    std::uint64_t status_tx = 0;
    std::uint64_t sink_duplicates = 0;
    std::uint64_t bc_originated = 0;
    std::uint64_t uc_originated = 0;
    std::uint64_t bc_fallbacks = 0;
    std::uint64_t route_invalidations = 0;
    std::uint64_t dup_drops = 0;
    std::uint64_t choke_drops = 0;
    std::uint64_t hop_limit_drops = 0;
    std::uint64_t arq_failures = 0;
    std::uint64_t mac_queue_drops = 0;
    std::uint64_t stray_acks = 0;
    std::uint64_t anomalies = 0;
    std::uint64_t events = 0;

    bool operator==(const RunMetrics& o) const;
};

/// 100 * delivered / generated, or nullopt when nothing was generated.
std::optional<double> compute_pdr(const RunMetrics& metrics);
std::optional<double> compute_status_pct(const RunMetrics& metrics);

/// Fixed-order CSV: one header row and one row of values.
std::string format_run_csv(const RunMetrics& metrics, std::uint64_t seed);

/// Human readable multi-line summary.
std::string format_run_summary(const RunMetrics& metrics);

/// printf "%.6g", with "nan" for undefined values.
std::string format_number(double value);

} // namespace uwsn
