#include "uwsn/sweep.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace uwsn;

namespace {

std::vector<std::string> lines(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);)
        out.push_back(l);
    return out;
}

std::size_t fields(const std::string& line)
{
    return static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
}

Scenario short_ring()
{
    Scenario s = build_ring_scenario(600.0);
    s.duration = 600.0;
    s.drain_s = 30.0;
    return s;
}

} // namespace

TEST_CASE("PDR and STATUS percentages")
{
    RunMetrics m;
    m.generated = 100;
    m.delivered_unique = 98;
    m.status_count = 7;
    CHECK(*compute_pdr(m) == doctest::Approx(98.0));
    CHECK(*compute_status_pct(m) == doctest::Approx(7.0));
    m.generated = 0;
    m.delivered_unique = 0;
    CHECK_FALSE(compute_pdr(m).has_value());
    CHECK_FALSE(compute_status_pct(m).has_value());
}

TEST_CASE("number formatting")
{
    CHECK(format_number(98.0) == "98");
    CHECK(format_number(2.0 / 3.0) == "0.666667");
    CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("run CSV is one header and one row of equal width")
{
    RunMetrics m;
    m.generated = 10;
    m.delivered_unique = 9;
    m.pdr_pct = 90.0;
    m.status_pct = std::nan("");
    const auto l = lines(format_run_csv(m, 4));
    REQUIRE(l.size() == 2);
    CHECK(fields(l[0]) == fields(l[1]));
    CHECK(l[0].rfind("seed,generated,delivered,pdr_pct", 0) == 0);
    CHECK(l[1].rfind("4,10,9,90,", 0) == 0);
    CHECK(l[1].find("nan") != std::string::npos);
}

TEST_CASE("configure_cell")
{
    const Scenario s = configure_cell(short_ring(), SweepCell{24.0, TransportFormatId::TF2, 17});
    CHECK(s.traffic.interval_override_s == 24.0);
    CHECK(s.seed == 17);
    CHECK(s.icrp.min_tf == TransportFormatId::TF2);
    for (const auto& n : s.nodes)
        CHECK(n.initial_tf == TransportFormatId::TF2);
}

TEST_CASE("sweep cardinality, CSV shape and thread independence")
{
    const std::vector<double> intervals{42.0, 18.0};
    const std::vector<TransportFormatId> tfs{TransportFormatId::TF3, TransportFormatId::TF1, TransportFormatId::TF2};
    const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};

    const SweepResult serial = sweep(short_ring(), intervals, tfs, seeds, 1);
    REQUIRE(serial.rows.size() == 30);
    REQUIRE(serial.aggregates.size() == 6);
    CHECK(std::is_sorted(serial.rows.begin(), serial.rows.end(),
                         [](const SweepRow& a, const SweepRow& b) { return a.cell < b.cell; }));
    for (const auto& r : serial.rows) {
        CHECK(r.error.empty());
        CHECK(r.generated > 0);
        CHECK(r.delivered <= r.generated);
    }
    const SweepAggregate* a = serial.find(18.0, TransportFormatId::TF2);
    REQUIRE(a != nullptr);
    CHECK(a->runs == 5);
    double sum = 0.0;
    for (const auto& r : serial.rows)
        if (r.cell.interval_s == 18.0 && r.cell.tf == TransportFormatId::TF2)
            sum += r.pdr_pct;
    CHECK(a->pdr_mean == doctest::Approx(sum / 5.0));
    CHECK(serial.find(7.0, TransportFormatId::TF2) == nullptr);

    const auto l = lines(format_sweep_csv(serial));
    REQUIRE(l.size() == 1 + 30 + 6);
    for (const auto& line : l)
        CHECK(fields(line) == fields(l[0]));
    CHECK(l[1].rfind("run,18,TF1,1,", 0) == 0);
    CHECK(l[31].rfind("mean,18,TF1,5,", 0) == 0);

    const SweepResult parallel = sweep(short_ring(), intervals, tfs, seeds, 4);
    CHECK(format_sweep_csv(parallel) == format_sweep_csv(serial));
}

TEST_CASE("a broken cell is reported in its row")
{
    Scenario s = short_ring();
    s.mac.ack_timeout_s = 0.01;  // shorter than any ACK round trip
    const std::vector<double> intervals{42.0};
    const std::vector<TransportFormatId> tfs{TransportFormatId::TF3};
    const std::vector<std::uint64_t> seeds{1};
    const SweepResult r = sweep(s, intervals, tfs, seeds, 1);
    REQUIRE(r.rows.size() == 1);
    CHECK_FALSE(r.rows[0].error.empty());
    CHECK(r.aggregates[0].runs == 0);
}

TEST_CASE("default interval grid")
{
    const auto d = default_sweep_intervals();
    CHECK(d.front() == 6.0);
    CHECK(d.back() == 120.0);
    CHECK(std::find(d.begin(), d.end(), 42.0) != d.end());
    CHECK(std::find(d.begin(), d.end(), 18.0) != d.end());
}
