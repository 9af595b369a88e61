#include "uwsn/sweep.hpp"

#include "uwsn/network.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <sstream>
#include <thread>

namespace uwsn {

const SweepAggregate* SweepResult::find(double interval_s, TransportFormatId tf) const
{
    for (const auto& a : aggregates) {
        if (a.interval_s == interval_s && a.tf == tf)
            return &a;
    }
    return nullptr;
}

Scenario configure_cell(const Scenario& base, const SweepCell& cell)
{
    Scenario s = base;
    s.traffic.interval_override_s = cell.interval_s;
    s.set_network_tf(cell.tf);
    s.seed = cell.seed;
    return s;
}

std::vector<double> default_sweep_intervals()
{
    return {6, 12, 18, 24, 30, 42, 60, 90, 120};
}

namespace {

SweepRow run_cell(const Scenario& base, const SweepCell& cell)
{
    SweepRow row;
    row.cell = cell;
    try {
        const RunMetrics m = run(configure_cell(base, cell));
        row.generated = m.generated;
        row.delivered = m.delivered_unique;
        row.status_count = m.status_count;
        row.pdr_pct = m.pdr_pct;
        row.status_pct = m.status_pct;
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    return row;
}

double mean(const std::vector<double>& v)
{
    double sum = 0.0;
    for (double x : v)
        sum += x;
    return v.empty() ? std::nan("") : sum / static_cast<double>(v.size());
}

// Sample standard deviation; zero for a single value.
double stddev(const std::vector<double>& v)
{
    if (v.size() < 2)
        return v.empty() ? std::nan("") : 0.0;
    const double m = mean(v);
    double acc = 0.0;
    for (double x : v)
        acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

} // namespace

SweepResult sweep(const Scenario& base, std::span<const double> intervals, std::span<const TransportFormatId> tfs,
                  std::span<const std::uint64_t> seeds, unsigned threads)
{
    require(!intervals.empty() && !tfs.empty() && !seeds.empty(), "sweep: empty parameter list");

    std::vector<SweepCell> cells;
    for (double i : intervals)
        for (auto tf : tfs)
            for (auto seed : seeds)
                cells.push_back(SweepCell{i, tf, seed});
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());

    SweepResult result;
    result.rows.resize(cells.size());

    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(cells.size()));

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++)
            result.rows[i] = run_cell(base, cells[i]);
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(worker);
    }

    std::map<std::pair<double, TransportFormatId>, std::vector<const SweepRow*>> groups;
    for (const auto& row : result.rows)
        groups[{row.cell.interval_s, row.cell.tf}].push_back(&row);
    for (const auto& [key, rows] : groups) {
        SweepAggregate a;
        a.interval_s = key.first;
        a.tf = key.second;
        std::vector<double> pdr, status;
        for (const SweepRow* r : rows) {
            if (!r->error.empty() || r->generated == 0)
                continue;
            ++a.runs;
            a.generated += r->generated;
            a.delivered += r->delivered;
            a.status_count += r->status_count;
            pdr.push_back(r->pdr_pct);
            status.push_back(r->status_pct);
        }
        a.pdr_mean = mean(pdr);
        a.pdr_std = stddev(pdr);
        a.status_mean = mean(status);
        a.status_std = stddev(status);
        result.aggregates.push_back(a);
    }
    return result;
}

std::string format_sweep_csv(const SweepResult& result)
{
    std::ostringstream out;
    out << "row,interval_s,tf,seed,generated,delivered,pdr_pct,pdr_std,status_count,status_pct,status_std,error\n";
    for (const auto& r : result.rows) {
        out << "run," << format_number(r.cell.interval_s) << ',' << to_string(r.cell.tf) << ',' << r.cell.seed << ',';
        if (r.error.empty()) {
            out << r.generated << ',' << r.delivered << ',' << format_number(r.pdr_pct) << ",," << r.status_count
                << ',' << format_number(r.status_pct) << ",,\n";
        } else {
            std::string msg = r.error;
            std::replace(msg.begin(), msg.end(), ',', ';');
            std::replace(msg.begin(), msg.end(), '\n', ' ');
            out << ",,,,,,," << msg << '\n';
        }
    }
    for (const auto& a : result.aggregates) {
        out << "mean," << format_number(a.interval_s) << ',' << to_string(a.tf) << ',' << a.runs << ','
            << a.generated << ',' << a.delivered << ',' << format_number(a.pdr_mean) << ','
            << format_number(a.pdr_std) << ',' << a.status_count << ',' << format_number(a.status_mean) << ','
            << format_number(a.status_std) << ",\n";
    }
    return out.str();
}

} // namespace uwsn
