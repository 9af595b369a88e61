#include "uwsn/routing.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

using namespace uwsn;

namespace {

class FakeRouterHost final : public RouterHost {
public:
    Scheduler sched;
    std::vector<MacPdu> sent;
    std::vector<RoutingHeader> app;

    SimTime now() const override { return sched.now(); }
    EventId schedule_timer(double delay, std::function<void()> action) override
    {
        return sched.schedule_in(delay, node(0), EventKind::Timer, std::move(action));
    }
    void mac_send(MacPdu pdu) override { sent.push_back(std::move(pdu)); }
    void deliver_to_application(const RoutingHeader& h) override { app.push_back(h); }
};

RouterSettings settings(std::uint32_t self, bool sink = false)
{
    RouterSettings s;
    s.self = node(self);
    s.sink = node(0);
    s.is_sink = sink;
    return s;
}

RoutingHeader bc_header(std::uint32_t origin, std::uint32_t seq, std::vector<HopRecord> path)
{
    RoutingHeader h;
    h.origin = node(origin);
    h.origin_seq = seq;
    h.mode = RouteMode::Broadcast;
    h.path = std::move(path);
    h.hop_count = static_cast<std::uint32_t>(h.path.size() - 1);
    h.payload_bits = 420;
    return h;
}

MacPdu bc_pdu(const RoutingHeader& h, std::uint32_t from)
{
    MacPdu p;
    p.kind = PduKind::DataBc;
    p.src = node(from);
    p.dest = kBroadcast;
    p.bits = h.payload_bits;
    p.tf = TransportFormatId::TF3;
    p.body = h;
    return p;
}

MacPdu status_pdu(std::vector<std::uint32_t> nodes, std::uint32_t from, std::uint32_t to)
{
    StatusBody b;
    b.origin = node(nodes.front());
    for (auto n : nodes)
        b.path.push_back(HopRecord{node(n), 15.0});
    b.path.front().sinr_db = kInfinity;
    MacPdu p;
    p.kind = PduKind::StatusUc;
    p.src = node(from);
    p.dest = node(to);
    p.body = b;
    return p;
}

PathCandidate cand(std::vector<std::pair<std::uint32_t, double>> hops, double arrival)
{
    PathCandidate c;
    for (auto [n, s] : hops)
        c.path.push_back(HopRecord{node(n), s});
    c.arrival = arrival;
    return c;
}

} // namespace

TEST_CASE("duplicate cache evicts first in, first out")
{
    DupCache c(3);
    CHECK(c.insert(node(1), 0));
    CHECK_FALSE(c.insert(node(1), 0));
    CHECK(c.insert(node(1), 1));
    CHECK(c.insert(node(2), 0));
    CHECK(c.insert(node(3), 0));
    CHECK(c.size() == 3);
    CHECK_FALSE(c.contains(node(1), 0));
    CHECK(c.contains(node(1), 1));
    CHECK(c.contains(node(3), 0));
}

TEST_CASE("best path selection")
{
    SUBCASE("higher weakest-link SINR wins over fewer hops")
    {
        const std::vector<PathCandidate> c{cand({{5, kInfinity}, {1, 12.0}, {0, 20.0}}, 1.0),
                                           cand({{5, kInfinity}, {2, 15.0}, {3, 18.0}, {0, 16.0}}, 2.0)};
        CHECK(select_best_path(c).path[1].node == node(2));
    }
    SUBCASE("equal SINR: fewer hops")
    {
        const std::vector<PathCandidate> c{cand({{5, kInfinity}, {2, 15.0}, {3, 15.0}, {0, 15.0}}, 1.0),
                                           cand({{5, kInfinity}, {1, 15.0}, {0, 15.0}}, 2.0)};
        CHECK(select_best_path(c).path.size() == 3);
    }
    SUBCASE("then earliest arrival, then lowest next hop")
    {
        const std::vector<PathCandidate> c{cand({{5, kInfinity}, {2, 15.0}, {0, 15.0}}, 2.0),
                                           cand({{5, kInfinity}, {3, 15.0}, {0, 15.0}}, 1.0)};
        CHECK(select_best_path(c).path[1].node == node(3));
        const std::vector<PathCandidate> d{cand({{5, kInfinity}, {3, 15.0}, {0, 15.0}}, 1.0),
                                           cand({{5, kInfinity}, {2, 15.0}, {0, 15.0}}, 1.0)};
        CHECK(select_best_path(d).path[1].node == node(2));
    }
    SUBCASE("single candidate")
    {
        const std::vector<PathCandidate> c{cand({{5, kInfinity}, {0, 11.0}}, 1.0)};
        CHECK(select_best_path(c).path.size() == 2);
    }
    SUBCASE("empty is a contract violation")
    {
        CHECK_THROWS_AS(select_best_path({}), ContractViolation);
    }
    SUBCASE("property: permuting candidates never changes the choice")
    {
        std::mt19937_64 gen(7);
        std::uniform_int_distribution<int> pick(1, 12);
        std::uniform_int_distribution<int> level(10, 14);  // narrow range forces ties
        std::uniform_int_distribution<int> t(0, 3);
        for (int trial = 0; trial < 500; ++trial) {
            std::vector<PathCandidate> cs;
            const int n = 1 + trial % 6;
            for (int i = 0; i < n; ++i) {
                std::vector<std::pair<std::uint32_t, double>> hops{{20, kInfinity}};
                const int len = 1 + static_cast<int>(gen() % 3);
                for (int k = 0; k < len; ++k)
                    hops.emplace_back(static_cast<std::uint32_t>(pick(gen)), static_cast<double>(level(gen)));
                hops.emplace_back(0, static_cast<double>(level(gen)));
                cs.push_back(cand(hops, static_cast<double>(t(gen))));
            }
            const auto reference = select_best_path(cs).path;
            for (int shuffle = 0; shuffle < 5; ++shuffle) {
                std::shuffle(cs.begin(), cs.end(), gen);
                REQUIRE(select_best_path(cs).path == reference);
            }
        }
    }
}

TEST_CASE("originate: broadcast at cold start")
{
    FakeRouterHost host;
    IcrpRouter r(settings(5), host);
    CHECK(r.originate(420) == 0);
    REQUIRE(host.sent.size() == 1);
    const MacPdu& p = host.sent[0];
    CHECK(p.kind == PduKind::DataBc);
    CHECK(p.header().hop_count == 0);
    REQUIRE(p.header().path.size() == 1);
    CHECK(p.header().path[0].node == node(5));
    CHECK(p.header().path[0].sinr_db == kInfinity);
    CHECK(r.originate(420) == 1);
}

TEST_CASE("broadcast forwarding")
{
    FakeRouterHost host;
    IcrpRouter r(settings(2), host);
    const auto h = bc_header(5, 0, {{node(5), kInfinity}});

    SUBCASE("first copy forwarded with this hop appended, second dropped")
    {
        r.on_mac_deliver(bc_pdu(h, 5), 13.5);
        r.on_mac_deliver(bc_pdu(h, 6), 11.0);
        REQUIRE(host.sent.size() == 1);
        const auto& out = host.sent[0].header();
        CHECK(out.hop_count == 1);
        REQUIRE(out.path.size() == 2);
        CHECK(out.path[1] == HopRecord{node(2), 13.5});
        CHECK(r.counters().dup_drops == 1);
    }
    SUBCASE("hop limit boundary")
    {
        // H = 4: a packet arriving with hop_count 3 would leave with 4.
        const auto at_limit = bc_header(5, 1, {{node(5), kInfinity}, {node(6), 12}, {node(7), 12}, {node(8), 12}});
        r.on_mac_deliver(bc_pdu(at_limit, 8), 12.0);
        CHECK(host.sent.empty());
        CHECK(r.counters().hop_limit_drops == 1);
        const auto below = bc_header(5, 2, {{node(5), kInfinity}, {node(6), 12}, {node(7), 12}});
        r.on_mac_deliver(bc_pdu(below, 7), 12.0);
        REQUIRE(host.sent.size() == 1);
        CHECK(host.sent[0].header().hop_count == 3);
    }
    SUBCASE("choked node does not forward")
    {
        FakeRouterHost h2;
        RouterSettings s = settings(9);
        s.bc_forwarding_enabled = false;
        IcrpRouter choked(s, h2);
        choked.on_mac_deliver(bc_pdu(h, 5), 13.5);
        CHECK(h2.sent.empty());
        CHECK(choked.counters().choke_drops == 1);
    }
    SUBCASE("own packet echoed back is not forwarded")
    {
        FakeRouterHost h5;
        IcrpRouter origin(settings(5), h5);
        origin.originate(420);
        origin.on_mac_deliver(bc_pdu(bc_header(5, 0, {{node(5), kInfinity}, {node(2), 13}}), 2), 13.0);
        CHECK(h5.sent.size() == 1);
    }
}

TEST_CASE("sink: deliver once, STATUS after the window along the best path")
{
    FakeRouterHost host;
    IcrpRouter sink(settings(0, true), host);
    // Direct copy at 10 dB, relayed copy whose weakest link is 13 dB.
    sink.on_mac_deliver(bc_pdu(bc_header(5, 0, {{node(5), kInfinity}}), 5), 10.0);
    host.sched.run_until(1.0);
    sink.on_mac_deliver(bc_pdu(bc_header(5, 0, {{node(5), kInfinity}, {node(1), 13.0}}), 1), 18.0);
    CHECK(host.app.size() == 1);
    host.sched.run_until(2.9);
    CHECK(host.sent.empty());
    host.sched.run_until(3.0);
    REQUIRE(host.sent.size() == 1);
    const MacPdu& st = host.sent[0];
    CHECK(st.kind == PduKind::StatusUc);
    CHECK(st.dest == node(1));
    REQUIRE(st.status().path.size() == 3);
    CHECK(st.status().path[1].node == node(1));
    CHECK(st.status().path[2] == HopRecord{node(0), 18.0});
    CHECK(st.bits == 80 + 16 * 2);
    CHECK(sink.counters().status_generated == 1);

    // A copy after the window is a duplicate: no delivery, no STATUS.
    sink.on_mac_deliver(bc_pdu(bc_header(5, 0, {{node(5), kInfinity}, {node(2), 14.0}}), 2), 18.0);
    host.sched.run_until(10.0);
    CHECK(host.app.size() == 1);
    CHECK(host.sent.size() == 1);
    CHECK(sink.counters().sink_duplicates == 2);
}

TEST_CASE("STATUS installs suffix routes and travels back")
{
    FakeRouterHost relay_host;
    IcrpRouter relay(settings(1), relay_host);
    relay.on_mac_deliver(status_pdu({5, 1, 0}, 0, 1), 15.0);
    REQUIRE(relay.route().has_value());
    CHECK(relay.route()->path_to_sink == std::vector<NodeId>{node(1), node(0)});
    REQUIRE(relay_host.sent.size() == 1);
    CHECK(relay_host.sent[0].dest == node(5));

    FakeRouterHost src_host;
    IcrpRouter src(settings(5), src_host);
    src.on_mac_deliver(status_pdu({5, 1, 0}, 1, 5), 15.0);
    REQUIRE(src.route().has_value());
    CHECK(src.route()->next_hop() == node(1));
    CHECK(src_host.sent.empty());

    src.originate(420);
    REQUIRE(src_host.sent.size() == 1);
    const MacPdu& uc = src_host.sent[0];
    CHECK(uc.kind == PduKind::DataUc);
    CHECK(uc.dest == node(1));
    CHECK(uc.header().uc_route == std::vector<NodeId>{node(5), node(1), node(0)});
    CHECK(uc.header().uc_next_index == 1);

    FakeRouterHost stranger_host;
    IcrpRouter stranger(settings(7), stranger_host);
    stranger.on_mac_deliver(status_pdu({5, 1, 0}, 1, 7), 15.0);
    CHECK_FALSE(stranger.route().has_value());
    CHECK(stranger.counters().anomalies == 1);
}

TEST_CASE("unicast forwarding along the carried route")
{
    FakeRouterHost host;
    IcrpRouter relay(settings(1), host);
    RoutingHeader h;
    h.origin = node(5);
    h.mode = RouteMode::Unicast;
    h.uc_route = {node(5), node(1), node(0)};
    h.uc_next_index = 1;
    h.path = {{node(5), kInfinity}};
    MacPdu p;
    p.kind = PduKind::DataUc;
    p.src = node(5);
    p.dest = node(1);
    p.body = h;
    relay.on_mac_deliver(p, 14.0);
    REQUIRE(host.sent.size() == 1);
    CHECK(host.sent[0].dest == node(0));
    CHECK(host.sent[0].header().uc_next_index == 2);

    // Position mismatch is absorbed.
    h.uc_next_index = 2;
    p.body = h;
    relay.on_mac_deliver(p, 14.0);
    CHECK(host.sent.size() == 1);
    CHECK(relay.counters().anomalies == 1);

    FakeRouterHost sink_host;
    IcrpRouter sink(settings(0, true), sink_host);
    h.uc_next_index = 2;
    p.body = h;
    p.dest = node(0);
    sink.on_mac_deliver(p, 14.0);
    sink.on_mac_deliver(p, 14.0);
    CHECK(sink_host.app.size() == 1);
    CHECK(sink_host.sent.empty());  // no STATUS for unicast arrivals
}

TEST_CASE("patience: invalidation exactly at the P-th consecutive failure")
{
    for (std::uint32_t patience : {1u, 2u, 3u, 5u}) {
        FakeRouterHost host;
        RouterSettings s = settings(5);
        s.icrp.patience = patience;
        s.icrp.rate_adaptation = false;
        IcrpRouter src(s, host);
        src.on_mac_deliver(status_pdu({5, 1, 0}, 1, 5), 15.0);
        src.originate(420);
        for (std::uint32_t k = 1; k <= patience; ++k) {
            REQUIRE(src.route().has_value());
            const MacPdu failed = host.sent.back();
            REQUIRE(failed.kind == PduKind::DataUc);
            src.on_unicast_outcome(failed, false);
            if (k < patience) {
                CHECK(src.route().has_value());
                CHECK(host.sent.back().kind == PduKind::DataUc);
                CHECK(host.sent.back().header().origin_seq == failed.header().origin_seq);
            }
        }
        CHECK_FALSE(src.route().has_value());
        CHECK(src.counters().route_invalidations == 1);
        const MacPdu& fallback = host.sent.back();
        CHECK(fallback.kind == PduKind::DataBc);
        CHECK(fallback.header().origin_seq == 0);
        CHECK(src.counters().bc_fallbacks == 1);
        src.originate(420);
        CHECK(host.sent.back().kind == PduKind::DataBc);
    }
}

TEST_CASE("patience counts consecutive failures only")
{
    FakeRouterHost host;
    IcrpRouter src(settings(5), host);
    src.on_mac_deliver(status_pdu({5, 1, 0}, 1, 5), 15.0);
    src.originate(420);
    src.on_unicast_outcome(host.sent.back(), false);
    src.on_unicast_outcome(host.sent.back(), true);
    CHECK(src.route()->consecutive_failures == 0);
    src.originate(420);
    src.on_unicast_outcome(host.sent.back(), false);
    CHECK(src.route().has_value());
}

TEST_CASE("mid-path failure past patience converts to broadcast at the failing node")
{
    FakeRouterHost host;
    RouterSettings s = settings(1);
    s.icrp.patience = 1;
    IcrpRouter relay(s, host);
    RoutingHeader h;
    h.origin = node(5);
    h.origin_seq = 4;
    h.mode = RouteMode::Unicast;
    h.uc_route = {node(5), node(1), node(0)};
    h.uc_next_index = 1;
    h.path = {{node(5), kInfinity}};
    MacPdu p;
    p.kind = PduKind::DataUc;
    p.src = node(5);
    p.dest = node(1);
    p.body = h;
    relay.on_mac_deliver(p, 14.0);
    relay.on_unicast_outcome(host.sent.back(), false);
    const MacPdu& bc = host.sent.back();
    CHECK(bc.kind == PduKind::DataBc);
    CHECK(bc.header().origin == node(5));
    CHECK(bc.header().origin_seq == 4);
    CHECK(bc.header().hop_count == 1);
    // The relay will not forward its own fallback again.
    relay.on_mac_deliver(bc_pdu(bc_header(5, 4, {{node(5), kInfinity}, {node(1), 14}, {node(2), 12}}), 2), 12.0);
    CHECK(host.sent.size() == 2);
}

TEST_CASE("route lifetime expiry returns the source to broadcast")
{
    FakeRouterHost host;
    RouterSettings s = settings(5);
    s.icrp.route_lifetime_s = 100.0;
    IcrpRouter src(s, host);
    src.on_mac_deliver(status_pdu({5, 1, 0}, 1, 5), 15.0);
    host.sched.run_until(50.0);
    src.originate(420);
    CHECK(host.sent.back().kind == PduKind::DataUc);
    host.sched.run_until(150.0);
    src.originate(420);
    CHECK(host.sent.back().kind == PduKind::DataBc);
}

TEST_CASE("link rate adaptation")
{
    SUBCASE("from TF2, exactly S successes reach TF3")
    {
        for (std::uint32_t s : {1u, 3u, 6u}) {
            LinkRateTable t(TransportFormatId::TF2, TransportFormatId::TF1, TransportFormatId::TF3, s, 1);
            for (std::uint32_t k = 1; k < s; ++k)
                REQUIRE(t.record(node(1), true) == TransportFormatId::TF2);
            CHECK(t.record(node(1), true) == TransportFormatId::TF3);
            for (int k = 0; k < 10; ++k)
                CHECK(t.record(node(1), true) == TransportFormatId::TF3);
        }
    }
    SUBCASE("a failure steps down and resets the success count")
    {
        LinkRateTable t(TransportFormatId::TF3, TransportFormatId::TF1, TransportFormatId::TF3, 3, 1);
        CHECK(t.record(node(1), false) == TransportFormatId::TF2);
        CHECK(t.record(node(1), true) == TransportFormatId::TF2);
        CHECK(t.record(node(1), false) == TransportFormatId::TF1);
        CHECK(t.record(node(1), false) == TransportFormatId::TF1);
        CHECK(t.tf(node(2)) == TransportFormatId::TF3);
    }
    SUBCASE("success, failure, success with S = 3 and two-failure step down: no change")
    {
        LinkRateTable t(TransportFormatId::TF2, TransportFormatId::TF1, TransportFormatId::TF3, 3, 2);
        t.record(node(1), true);
        t.record(node(1), false);
        CHECK(t.record(node(1), true) == TransportFormatId::TF2);
    }
    SUBCASE("floor and ceiling")
    {
        LinkRateTable t(TransportFormatId::TF2, TransportFormatId::TF2, TransportFormatId::TF2, 1, 1);
        CHECK(t.record(node(1), false) == TransportFormatId::TF2);
        CHECK(t.record(node(1), true) == TransportFormatId::TF2);
    }
    SUBCASE("router picks the adapted format for the next unicast and TF3 networks never step down")
    {
        FakeRouterHost host;
        RouterSettings s = settings(5);
        s.initial_tf = TransportFormatId::TF2;
        IcrpRouter src(s, host);
        src.on_mac_deliver(status_pdu({5, 1, 0}, 1, 5), 15.0);
        for (int i = 0; i < 3; ++i) {
            src.originate(420);
            CHECK(host.sent.back().tf == TransportFormatId::TF2);
            src.on_unicast_outcome(host.sent.back(), true);
        }
        src.originate(420);
        CHECK(host.sent.back().tf == TransportFormatId::TF3);

        FakeRouterHost h3;
        RouterSettings s3 = settings(5);
        s3.icrp.min_tf = TransportFormatId::TF3;
        IcrpRouter fast(s3, h3);
        fast.on_mac_deliver(status_pdu({5, 1, 0}, 1, 5), 15.0);
        fast.originate(420);
        fast.on_unicast_outcome(h3.sent.back(), false);
        CHECK(fast.rates().tf(node(1)) == TransportFormatId::TF3);
    }
}
