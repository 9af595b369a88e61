#include "uwsn/channel.hpp"
#include "uwsn/modem.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace uwsn;

namespace {

// Thorp's formula written out term by term, f in kHz, result in dB/km.
double thorp_by_hand(double f)
{
    const double f2 = f * f;
    const double boric = 0.11 * f2 / (1.0 + f2);
    const double mgso4 = 44.0 * f2 / (4100.0 + f2);
    const double pure_water = 2.75e-4 * f2;
    return boric + mgso4 + pure_water + 0.003;
}

// Transmission loss by brute force: spreading as the integral of
// 10 k / (x ln 10) from 1 m to d (midpoint rule), absorption accumulated
// metre by metre.
double loss_by_integration(double d, double k, double f)
{
    const int steps = 200000;
    const double h = (d - 1.0) / steps;
    double spreading = 0.0;
    for (int i = 0; i < steps; ++i) {
        const double x = 1.0 + (i + 0.5) * h;
        spreading += 10.0 * k / (x * std::log(10.0)) * h;
    }
    double absorption = 0.0;
    const double per_metre = thorp_by_hand(f) / 1000.0;
    for (int m = 0; m < static_cast<int>(d); ++m)
        absorption += per_metre;
    return spreading + absorption;
}

double power_sum_db(std::vector<double> levels_db)
{
    double p = 0.0;
    for (double l : levels_db)
        p += std::pow(10.0, l / 10.0);
    return 10.0 * std::log10(p);
}

} // namespace

TEST_CASE("Thorp absorption at 25 kHz is 6.10 dB/km")
{
    const double alpha = thorp_absorption(25.0);
    CHECK(alpha == doctest::Approx(thorp_by_hand(25.0)).epsilon(1e-12));
    CHECK(std::abs(alpha - 6.10) <= 0.05);
}

TEST_CASE("transmission loss at 1000 m, 25 kHz, k = 1.5 is 51.10 dB")
{
    ChannelParams p;
    const double tl = transmission_loss(1000.0, p);
    CHECK(tl == doctest::Approx(loss_by_integration(1000.0, 1.5, 25.0)).epsilon(1e-6));
    CHECK(std::abs(tl - 51.10) <= 0.05);
}

TEST_CASE("transmission loss clamps below one metre and grows with distance")
{
    ChannelParams p;
    CHECK(transmission_loss(0.0, p) == transmission_loss(1.0, p));
    CHECK(transmission_loss(0.5, p) == doctest::Approx(thorp_absorption(25.0) / 1000.0));
    double previous = transmission_loss(1.0, p);
    for (double d = 10.0; d <= 5000.0; d += 10.0) {
        const double tl = transmission_loss(d, p);
        REQUIRE(tl > previous);
        previous = tl;
    }
}

TEST_CASE("received level is the link budget")
{
    ChannelParams p;
    ActiveTransmission tx;
    tx.tx_position = {0, 0, 0};
    tx.source_level_db = 120.0;
    tx.tx_gain_db = 3.0;
    const Position rx{300, 400, 0};
    CHECK(received_level(tx, rx, -1.0, p) ==
          doctest::Approx(120.0 + 3.0 - 1.0 - transmission_loss(500.0, p)));
    CHECK(propagation_delay(1500.0, p) == doctest::Approx(1.0));
}

TEST_CASE("SINR is signal over the power sum of noise and interference")
{
    CHECK(sinr(70.0, {}, 50.0) == 20.0);
    const std::vector<double> one{50.0};
    CHECK(sinr(70.0, one, 50.0) == doctest::Approx(70.0 - power_sum_db({50.0, 50.0})));
    CHECK(sinr(70.0, one, 50.0) == doctest::Approx(20.0 - 10.0 * std::log10(2.0)));
    const std::vector<double> two{55.0, 60.0};
    CHECK(sinr(70.0, two, 50.0) == doctest::Approx(70.0 - power_sum_db({50.0, 55.0, 60.0})));
}

TEST_CASE("calibrated link at exactly the maximum range sits on the threshold")
{
    ChannelParams p;
    for (double range : {300.0, 1200.0, 2500.0}) {
        const double sl = calibrate_source_level(range, p);
        ActiveTransmission tx;
        tx.source_level_db = sl;
        const double rl = received_level(tx, Position{range, 0, 0}, 0.0, p);
        CHECK(std::abs(sinr(rl, {}, p.noise_level_db) - p.detect_threshold_db) <= 1e-6);
    }
    // Under the defaults the 1200 m ring calibrates to about 113.5 dB.
    const double expected =
        p.detect_threshold_db + p.noise_level_db + 15.0 * std::log10(1200.0) + thorp_by_hand(25.0) * 1.2;
    CHECK(calibrate_source_level(1200.0, p) == doctest::Approx(expected));
    CHECK(calibrate_source_level(1200.0, p) == doctest::Approx(113.5135).epsilon(1e-5));
}

TEST_CASE("decode_outcome")
{
    ChannelParams p;  // noise 50, threshold 10
    const Arrival a{1, 10.0, 11.0, 70.0};

    SUBCASE("alone above threshold decodes")
    {
        const auto r = decode_outcome(a, {}, ReceiverWindow{}, p);
        CHECK(r.decoded);
        CHECK(r.min_sinr_db == 20.0);
    }
    SUBCASE("exactly at threshold decodes")
    {
        const Arrival edge{2, 0.0, 1.0, 60.0};
        CHECK(decode_outcome(edge, {}, ReceiverWindow{}, p).decoded);
        const Arrival below{3, 0.0, 1.0, 60.0 - 1e-6};
        CHECK_FALSE(decode_outcome(below, {}, ReceiverWindow{}, p).decoded);
    }
    SUBCASE("interferer arriving mid-frame counts")
    {
        const std::vector<Arrival> others{{7, 10.5, 12.0, 65.0}};
        const auto r = decode_outcome(a, others, ReceiverWindow{}, p);
        CHECK_FALSE(r.decoded);
        CHECK(r.reason == LossReason::LowSinr);
        CHECK(r.min_sinr_db == doctest::Approx(70.0 - power_sum_db({50.0, 65.0})));
    }
    SUBCASE("weak interferer leaves enough margin")
    {
        const std::vector<Arrival> others{{7, 9.0, 10.2, 55.0}};
        const auto r = decode_outcome(a, others, ReceiverWindow{}, p);
        CHECK(r.decoded);
        CHECK(r.min_sinr_db == doctest::Approx(70.0 - power_sum_db({50.0, 55.0})));
    }
    SUBCASE("interference is evaluated per instant, not summed over the frame")
    {
        // Two interferers that never overlap each other.
        const std::vector<Arrival> others{{7, 10.0, 10.4, 57.0}, {8, 10.5, 11.0, 57.0}};
        const auto r = decode_outcome(a, others, ReceiverWindow{}, p);
        CHECK(r.min_sinr_db == doctest::Approx(70.0 - power_sum_db({50.0, 57.0})));
        const std::vector<Arrival> stacked{{7, 10.0, 10.6, 57.0}, {8, 10.5, 11.0, 57.0}};
        CHECK(decode_outcome(a, stacked, ReceiverWindow{}, p).min_sinr_db ==
              doctest::Approx(70.0 - power_sum_db({50.0, 57.0, 57.0})));
    }
    SUBCASE("back-to-back arrivals do not interfere")
    {
        const std::vector<Arrival> others{{7, 9.0, 10.0, 80.0}, {8, 11.0, 12.0, 80.0}};
        CHECK(decode_outcome(a, others, ReceiverWindow{}, p).decoded);
    }
    SUBCASE("own transmission overlapping the arrival is a half-duplex loss")
    {
        const std::vector<Interval> tx{{10.9, 11.5}};
        const auto r = decode_outcome(a, {}, ReceiverWindow{tx, false}, p);
        CHECK_FALSE(r.decoded);
        CHECK(r.reason == LossReason::HalfDuplex);
        const std::vector<Interval> after{{11.0, 11.5}};
        CHECK(decode_outcome(a, {}, ReceiverWindow{after, false}, p).decoded);
    }
    SUBCASE("a receiver locked on another arrival loses this one to capture")
    {
        const auto r = decode_outcome(a, {}, ReceiverWindow{{}, true}, p);
        CHECK_FALSE(r.decoded);
        CHECK(r.reason == LossReason::CaptureBusy);
    }
    SUBCASE("zero length arrival is a contract violation")
    {
        const Arrival empty{9, 1.0, 1.0, 70.0};
        CHECK_THROWS_AS(decode_outcome(empty, {}, ReceiverWindow{}, p), ContractViolation);
    }
}

TEST_CASE("property: SINR never rises when an interferer is added")
{
    std::uint64_t x = 99;
    auto next = [&] {
        x = x * 6364136223846793005ULL + 1442695040888963407ULL;
        return static_cast<double>(x >> 11) * 0x1.0p-53;
    };
    for (int trial = 0; trial < 1000; ++trial) {
        const double signal = 40.0 + 60.0 * next();
        std::vector<double> interferers;
        double previous = sinr(signal, interferers, 50.0);
        for (int k = 0; k < 5; ++k) {
            interferers.push_back(20.0 + 60.0 * next());
            const double now = sinr(signal, interferers, 50.0);
            REQUIRE(now < previous);
            previous = now;
        }
    }
}

TEST_CASE("invalid channel parameters are rejected")
{
    ChannelParams p;
    p.spreading_coeff = 2.5;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = ChannelParams{};
    p.frequency_khz = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    CHECK_THROWS_AS(thorp_absorption(-1.0), ContractViolation);
}
