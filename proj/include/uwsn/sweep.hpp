#pragma once

#include "uwsn/metrics.hpp"
#include "uwsn/scenario.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace uwsn {

struct SweepCell {
    double interval_s = 0.0;
    TransportFormatId tf = TransportFormatId::TF1;
    std::uint64_t seed = 0;

    auto operator<=>(const SweepCell&) const = default;
};

struct SweepRow {
    SweepCell cell;
    std::uint64_t generated = 0;
    std::uint64_t delivered = 0;
    std::uint64_t status_count = 0;
    double pdr_pct = 0.0;
    double status_pct = 0.0;
    std::string error;  ///< non-empty when the run failed
};

struct SweepAggregate {
    double interval_s = 0.0;
    TransportFormatId tf = TransportFormatId::TF1;
    std::size_t runs = 0;  ///< successful runs averaged
    std::uint64_t generated = 0;
    std::uint64_t delivered = 0;
    std::uint64_t status_count = 0;
    double pdr_mean = 0.0;
    double pdr_std = 0.0;
    double status_mean = 0.0;
    double status_std = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;              ///< sorted by (interval, tf, seed)
    std::vector<SweepAggregate> aggregates;  ///< sorted by (interval, tf)

    const SweepAggregate* find(double interval_s, TransportFormatId tf) const;
};

/// Scenario for one sweep cell: constant emission interval, the whole
/// network on `tf`, and the cell's seed.
Scenario configure_cell(const Scenario& base, const SweepCell& cell);

/// Run every (interval, tf, seed) combination, each as an isolated run, on up
/// to `threads` worker threads (0 picks the hardware concurrency). A failing
/// run is reported in its row and does not stop the sweep.
SweepResult sweep(const Scenario& base, std::span<const double> intervals, std::span<const TransportFormatId> tfs,
                  std::span<const std::uint64_t> seeds, unsigned threads = 0);

/// Header plus one "run" row per cell followed by one "mean" row per
/// (interval, tf); numbers use six significant digits.
std::string format_sweep_csv(const SweepResult& result);

/// Interval grid used when none is given.
std::vector<double> default_sweep_intervals();

} // namespace uwsn
