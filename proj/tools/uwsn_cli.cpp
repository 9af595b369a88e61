// Command-line front end: run one scenario, sweep interval x TF x seed, or
// validate a scenario file and print its link budget.

#include "uwsn/network.hpp"
#include "uwsn/scenario_io.hpp"
#include "uwsn/sweep.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace uwsn;

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& text, const char* what, Parse parse)
{
    std::vector<T> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty())
            continue;
        try {
            out.push_back(parse(item));
        } catch (const std::exception&) {
            throw CLI::ValidationError(what, "cannot parse '" + item + "'");
        }
    }
    if (out.empty())
        throw CLI::ValidationError(what, "list must not be empty");
    return out;
}

void write_output(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << text;
}

int cmd_run(const std::string& scenario_path, std::optional<std::uint64_t> seed, std::optional<double> duration,
            const std::string& out_path)
{
    Scenario s = load_scenario(scenario_path);
    if (seed)
        s.seed = *seed;
    if (duration)
        s.duration = *duration;
    const RunMetrics m = run(s);
    write_output(out_path, format_run_csv(m, s.seed));
    std::cerr << format_run_summary(m);
    if (m.generated == 0) {
        std::cerr << "warning: no packets were generated; PDR is undefined\n";
    }
    return 0;
}

int cmd_sweep(const std::string& scenario_path, const std::string& intervals_text, bool intervals_given,
              const std::string& tfs_text, const std::string& seeds_text, unsigned threads,
              const std::string& out_path)
{
    const Scenario s = load_scenario(scenario_path);
    const auto intervals = intervals_given
                               ? parse_list<double>(intervals_text, "--intervals", [](const std::string& v) {
                                     std::size_t used = 0;
                                     const double d = std::stod(v, &used);
                                     if (used != v.size() || !(d > 0.0))
                                         throw std::invalid_argument(v);
                                     return d;
                                 })
                               : default_sweep_intervals();
    const auto tfs = parse_list<TransportFormatId>(tfs_text, "--tfs", [](const std::string& v) {
        return parse_transport_format(v);
    });
    const auto seeds = parse_list<std::uint64_t>(seeds_text, "--seeds", [](const std::string& v) {
        std::size_t used = 0;
        const auto n = std::stoull(v, &used);
        if (used != v.size())
            throw std::invalid_argument(v);
        return static_cast<std::uint64_t>(n);
    });
    const SweepResult result = sweep(s, intervals, tfs, seeds, threads);
    write_output(out_path, format_sweep_csv(result));
    int failures = 0;
    for (const auto& r : result.rows) {
        if (!r.error.empty()) {
            std::cerr << "cell interval=" << r.cell.interval_s << " tf=" << to_string(r.cell.tf)
                      << " seed=" << r.cell.seed << " failed: " << r.error << '\n';
            ++failures;
        }
    }
    return failures == 0 ? 0 : 3;
}

int cmd_validate(const std::string& scenario_path)
{
    const Scenario s = load_scenario(scenario_path);
    const double range = s.max_link_range();
    const double sl = s.resolved_source_level();
    const auto& ch = s.channel;

    std::printf("scenario %s: %zu nodes, sink %u, %zu traffic sources\n", scenario_path.c_str(), s.nodes.size(),
                to_index(s.sink()), s.traffic_sources().size());
    std::printf("absorption %.4f dB/km at %.6g kHz\n", thorp_absorption(ch.frequency_khz), ch.frequency_khz);
    std::printf("calibration range %.6g m, source level %.4f dB%s\n", range, sl,
                s.source_level_db ? " (explicit)" : " (calibrated)");
    std::printf("%10s %10s %12s %10s\n", "range_m", "TL_dB", "RL_dB", "SNR_dB");
    for (double d : {300.0, 600.0, 884.0, 918.0, 1200.0, 1697.0, 2400.0}) {
        const double tl = transmission_loss(d, ch);
        std::printf("%10.1f %10.3f %12.3f %10.3f\n", d, tl, sl - tl, sl - tl - ch.noise_level_db);
    }
    for (const auto& f : s.modem.formats) {
        std::printf("%s: %.6g bps, data frame %.4f s\n", std::string(to_string(f.id)).c_str(), f.payload_rate_bps,
                    burst_duration(s.traffic.payload_bits, f, s.modem.max_frame_duration_s));
    }
    std::printf("ok\n");
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Underwater acoustic sensor network simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_path;

    auto* run_cmd = app.add_subcommand("run", "Run one scenario and write its metrics as CSV");
    std::optional<std::uint64_t> seed;
    std::optional<double> duration;
    run_cmd->add_option("--scenario", scenario_path, "Scenario file")->required();
    run_cmd->add_option("--seed", seed, "Override the scenario seed");
    run_cmd->add_option("--duration", duration, "Override the simulated duration in seconds");
    run_cmd->add_option("--out", out_path, "Output CSV file (stdout if omitted)");

    auto* sweep_cmd = app.add_subcommand("sweep", "Sweep packet interval x transport format x seed");
    std::string intervals = "";
    std::string tfs = "TF1,TF2,TF3";
    std::string seeds = "1,2,3,4,5";
    unsigned threads = 0;
    sweep_cmd->add_option("--scenario", scenario_path, "Base scenario file")->required();
    auto* intervals_opt =
        sweep_cmd->add_option("--intervals", intervals, "Comma-separated packet intervals in seconds");
    sweep_cmd->add_option("--tfs", tfs, "Comma-separated transport formats")->capture_default_str();
    sweep_cmd->add_option("--seeds", seeds, "Comma-separated seeds")->capture_default_str();
    sweep_cmd->add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");
    sweep_cmd->add_option("--out", out_path, "Output CSV file (stdout if omitted)");

    auto* validate_cmd = app.add_subcommand("validate", "Check a scenario and print its link budget");
    validate_cmd->add_option("--scenario", scenario_path, "Scenario file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*run_cmd)
            return cmd_run(scenario_path, seed, duration, out_path);
        if (*sweep_cmd)
            return cmd_sweep(scenario_path, intervals, intervals_opt->count() > 0, tfs, seeds, threads, out_path);
        if (*validate_cmd)
            return cmd_validate(scenario_path);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const ScenarioError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
