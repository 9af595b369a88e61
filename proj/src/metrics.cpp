#include "uwsn/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace uwsn {

namespace {

bool same_number(double a, double b)
{
    return (std::isnan(a) && std::isnan(b)) || a == b;
}

} // namespace

bool RunMetrics::operator==(const RunMetrics& o) const
{
    return generated == o.generated && delivered_unique == o.delivered_unique && same_number(pdr_pct, o.pdr_pct) &&
           status_count == o.status_count && same_number(status_pct, o.status_pct) &&
           same_number(mean_delay_s, o.mean_delay_s) && per_source == o.per_source && link_tx == o.link_tx &&
           tf_usage == o.tf_usage && losses == o.losses && data_tx == o.data_tx && ack_tx == o.ack_tx &&
           status_tx == o.status_tx && sink_duplicates == o.sink_duplicates && bc_originated == o.bc_originated &&
           uc_originated == o.uc_originated && bc_fallbacks == o.bc_fallbacks &&
           route_invalidations == o.route_invalidations && dup_drops == o.dup_drops &&
           choke_drops == o.choke_drops && hop_limit_drops == o.hop_limit_drops && arq_failures == o.arq_failures &&
           mac_queue_drops == o.mac_queue_drops && stray_acks == o.stray_acks && anomalies == o.anomalies &&
           events == o.events;
}

std::optional<double> compute_pdr(const RunMetrics& metrics)
{
    if (metrics.generated == 0)
        return std::nullopt;
    return 100.0 * static_cast<double>(metrics.delivered_unique) / static_cast<double>(metrics.generated);
}

std::optional<double> compute_status_pct(const RunMetrics& metrics)
{
    if (metrics.generated == 0)
        return std::nullopt;
    return 100.0 * static_cast<double>(metrics.status_count) / static_cast<double>(metrics.generated);
}

std::string format_number(double value)
{
    if (std::isnan(value))
        return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    return buf;
}

std::string format_run_csv(const RunMetrics& m, std::uint64_t seed)
{
    std::ostringstream out;
    out << "seed,generated,delivered,pdr_pct,status_count,status_pct,mean_delay_s,data_tx,ack_tx,status_tx,"
           "tf1_tx,tf2_tx,tf3_tx,bc_originated,uc_originated,bc_fallbacks,route_invalidations,"
           "loss_half_duplex,loss_capture_busy,loss_low_sinr,mac_queue_drops,sink_duplicates\n";
    out << seed << ',' << m.generated << ',' << m.delivered_unique << ',' << format_number(m.pdr_pct) << ','
        << m.status_count << ',' << format_number(m.status_pct) << ',' << format_number(m.mean_delay_s) << ','
        << m.data_tx << ',' << m.ack_tx << ',' << m.status_tx << ',' << m.tf_usage[0] << ',' << m.tf_usage[1] << ','
        << m.tf_usage[2] << ',' << m.bc_originated << ',' << m.uc_originated << ',' << m.bc_fallbacks << ','
        << m.route_invalidations << ',' << m.losses[0] << ',' << m.losses[1] << ',' << m.losses[2] << ','
        << m.mac_queue_drops << ',' << m.sink_duplicates << '\n';
    return out.str();
}

std::string format_run_summary(const RunMetrics& m)
{
    std::ostringstream out;
    out << "generated " << m.generated << ", delivered " << m.delivered_unique << '\n';
    if (auto pdr = compute_pdr(m))
        out << "PDR " << format_number(*pdr) << " %, STATUS " << format_number(*compute_status_pct(m)) << " % ("
            << m.status_count << " messages)\n";
    else
        out << "PDR undefined: no packets were generated\n";
    out << "data tx " << m.data_tx << " (TF1 " << m.tf_usage[0] << ", TF2 " << m.tf_usage[1] << ", TF3 "
        << m.tf_usage[2] << "), ack tx " << m.ack_tx << ", status tx " << m.status_tx << '\n';
    out << "losses: half_duplex " << m.losses[0] << ", capture_busy " << m.losses[1] << ", low_sinr "
        << m.losses[2] << '\n';
    out << "broadcast originations " << m.bc_originated << ", unicast originations " << m.uc_originated
        << ", fallbacks " << m.bc_fallbacks << ", route invalidations " << m.route_invalidations << '\n';
    for (const auto& [id, s] : m.per_source) {
        out << "  source " << to_index(id) << ": " << s.delivered << '/' << s.generated;
        if (s.generated > 0)
            out << " (" << format_number(100.0 * static_cast<double>(s.delivered) / static_cast<double>(s.generated))
                << " %)";
        out << ", route held " << format_number(100.0 * s.uc_time_fraction) << " % of the time\n";
    }
    return out.str();
}

} // namespace uwsn
