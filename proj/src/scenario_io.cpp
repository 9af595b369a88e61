#include "uwsn/scenario_io.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

namespace uwsn {

ScenarioError::ScenarioError(std::string source, int line, const std::string& message)
    : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + message),
      line_(line)
{
}

namespace {

class Parser {
public:
    explicit Parser(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const YAML::Node& at, const std::string& message) const
    {
        const int line = at.IsDefined() && at.Mark().line >= 0 ? at.Mark().line + 1 : 0;
        throw ScenarioError(source_, line, message);
    }

    void expect_map(const YAML::Node& n, std::string_view what) const
    {
        if (!n.IsMap())
            fail(n, std::string(what) + " must be a mapping");
    }

    void allow_keys(const YAML::Node& n, std::string_view section, std::initializer_list<std::string_view> keys) const
    {
        for (const auto& kv : n) {
            const auto key = kv.first.as<std::string>();
            bool known = false;
            for (auto k : keys)
                known = known || key == k;
            if (!known)
                fail(kv.first, "unknown key '" + key + "' in " + std::string(section));
        }
    }

    template <typename T>
    T get(const YAML::Node& n, std::string_view what) const
    {
        if (!n.IsScalar())
            fail(n, std::string(what) + " must be a scalar");
        try {
            return n.as<T>();
        } catch (const YAML::Exception&) {
            fail(n, "invalid value '" + n.Scalar() + "' for " + std::string(what));
        }
    }

    double number(const YAML::Node& n, std::string_view what) const
    {
        if (n.IsScalar() && (n.Scalar() == "inf" || n.Scalar() == ".inf" || n.Scalar() == "infinity"))
            return kInfinity;
        return get<double>(n, what);
    }

    template <typename T>
    void read(const YAML::Node& parent, const char* key, T& out) const
    {
        if (const auto n = parent[key]) {
            if constexpr (std::is_same_v<T, double>)
                out = number(n, key);
            else if constexpr (std::is_same_v<T, std::optional<double>>)
                out = number(n, key);
            else
                out = get<T>(n, key);
        }
    }

    void read_unsigned(const YAML::Node& parent, const char* key, std::uint32_t& out) const
    {
        if (const auto n = parent[key]) {
            const auto v = get<long long>(n, key);
            if (v < 0 || v > 0xFFFFFFFFLL)
                fail(n, std::string(key) + " must be a non-negative integer");
            out = static_cast<std::uint32_t>(v);
        }
    }

    TransportFormatId tf(const YAML::Node& n) const
    {
        try {
            return parse_transport_format(get<std::string>(n, "transport format"));
        } catch (const std::invalid_argument& e) {
            fail(n, e.what());
        }
    }

    NodeId node_id(const YAML::Node& n, std::size_t count) const
    {
        const auto v = get<long long>(n, "node id");
        if (v < 0 || static_cast<std::size_t>(v) >= count)
            fail(n, "node id " + std::to_string(v) + " is out of range");
        return node(static_cast<std::uint32_t>(v));
    }

    std::vector<NodeId> node_list(const YAML::Node& n, const Scenario& s) const
    {
        std::vector<NodeId> out;
        if (n.IsScalar() && n.Scalar() == "all_sensors") {
            for (const auto& c : s.nodes)
                if (c.role == Role::Sensor)
                    out.push_back(c.id);
            return out;
        }
        if (!n.IsSequence())
            fail(n, "expected a list of node ids or 'all_sensors'");
        for (const auto& item : n)
            out.push_back(node_id(item, s.nodes.size()));
        return out;
    }

    Scenario parse(const YAML::Node& root) const
    {
        if (!root.IsDefined() || root.IsNull())
            throw ScenarioError(source_, 0, "empty scenario");
        expect_map(root, "scenario");
        allow_keys(root, "scenario",
                   {"seed", "duration_s", "drain_s", "topology", "nodes", "node_overrides", "channel", "modem", "mac",
                    "icrp", "traffic"});

        Scenario s;
        const auto topology = root["topology"];
        const auto nodes = root["nodes"];
        if (topology && nodes)
            fail(nodes, "give either 'topology' or 'nodes', not both");
        if (nodes)
            parse_nodes(nodes, s);
        else
            parse_topology(topology, s);

        if (const auto n = root["seed"])
            s.seed = get<std::uint64_t>(n, "seed");
        read(root, "duration_s", s.duration);
        read(root, "drain_s", s.drain_s);
        if (!(s.duration > 0.0))
            fail(root["duration_s"], "duration_s must be > 0");
        if (!(s.drain_s >= 0.0))
            fail(root["drain_s"], "drain_s must be >= 0");

        if (const auto n = root["channel"])
            parse_channel(n, s);
        if (const auto n = root["modem"])
            parse_modem(n, s);
        if (const auto n = root["mac"])
            parse_mac(n, s);
        if (const auto n = root["icrp"])
            parse_icrp(n, s);
        if (const auto n = root["traffic"])
            parse_traffic(n, s);
        if (const auto n = root["node_overrides"])
            parse_overrides(n, s);

        try {
            s.validate();
        } catch (const std::invalid_argument& e) {
            throw ScenarioError(source_, 0, e.what());
        }
        return s;
    }

private:
    void parse_topology(const YAML::Node& topology, Scenario& s) const
    {
        double distance = 600.0;
        std::uint32_t sensors = 8;
        std::uint32_t relays = 4;
        bool choke = false;
        if (topology) {
            expect_map(topology, "topology");
            allow_keys(topology, "topology", {"ring"});
            const auto ring = topology["ring"];
            if (!ring)
                fail(topology, "topology needs a 'ring' section");
            expect_map(ring, "topology.ring");
            allow_keys(ring, "topology.ring", {"node_distance_m", "sensors", "relays", "choke_sensors"});
            read(ring, "node_distance_m", distance);
            read_unsigned(ring, "sensors", sensors);
            read_unsigned(ring, "relays", relays);
            read(ring, "choke_sensors", choke);
            if (!(distance > 0.0))
                fail(ring["node_distance_m"], "node_distance_m must be > 0");
        }
        Scenario built = build_ring_scenario(distance, sensors, relays);
        s.nodes = std::move(built.nodes);
        if (choke) {
            for (auto& n : s.nodes)
                if (n.role == Role::Sensor)
                    n.bc_forwarding_enabled = false;
        }
    }

    void parse_node_fields(const YAML::Node& item, NodeConfig& c) const
    {
        read(item, "x", c.position.x);
        read(item, "y", c.position.y);
        read(item, "z", c.position.z);
        read(item, "gain_db", c.directivity_gain_db);
        read(item, "bc_forwarding", c.bc_forwarding_enabled);
        if (const auto r = item["role"]) {
            try {
                c.role = parse_role(get<std::string>(r, "role"));
            } catch (const std::invalid_argument& e) {
                fail(r, e.what());
            }
        }
        if (const auto t = item["tf"])
            c.initial_tf = tf(t);
    }

    void parse_nodes(const YAML::Node& nodes, Scenario& s) const
    {
        if (!nodes.IsSequence() || nodes.size() == 0)
            fail(nodes, "nodes must be a non-empty list");
        s.nodes.resize(nodes.size());
        std::vector<bool> seen(nodes.size(), false);
        for (const auto& item : nodes) {
            expect_map(item, "node entry");
            allow_keys(item, "node entry", {"id", "role", "x", "y", "z", "gain_db", "bc_forwarding", "tf"});
            if (!item["id"])
                fail(item, "node entry needs an id");
            if (!item["role"])
                fail(item, "node entry needs a role");
            const NodeId id = node_id(item["id"], nodes.size());
            if (seen[to_index(id)])
                fail(item["id"], "duplicate node id " + std::to_string(to_index(id)));
            seen[to_index(id)] = true;
            NodeConfig c;
            c.id = id;
            parse_node_fields(item, c);
            if (!std::isfinite(c.directivity_gain_db))
                fail(item["gain_db"], "gain_db must be finite");
            s.nodes[to_index(id)] = c;
        }
        int sinks = 0;
        for (const auto& c : s.nodes)
            sinks += c.role == Role::Sink ? 1 : 0;
        if (sinks != 1)
            fail(nodes, "exactly one node must have role sink (found " + std::to_string(sinks) + ")");
    }

    void parse_overrides(const YAML::Node& list, Scenario& s) const
    {
        if (!list.IsSequence())
            fail(list, "node_overrides must be a list");
        for (const auto& item : list) {
            expect_map(item, "node override");
            allow_keys(item, "node override", {"id", "role", "x", "y", "z", "gain_db", "bc_forwarding", "tf"});
            if (!item["id"])
                fail(item, "node override needs an id");
            NodeConfig& c = s.nodes[to_index(node_id(item["id"], s.nodes.size()))];
            parse_node_fields(item, c);
        }
    }

    void parse_channel(const YAML::Node& n, Scenario& s) const
    {
        expect_map(n, "channel");
        allow_keys(n, "channel",
                   {"frequency_khz", "spreading_coeff", "sound_speed_mps", "noise_db", "detect_threshold_db",
                    "carrier_sense_margin_db", "source_level_db", "calibration_range_m"});
        auto& c = s.channel;
        read(n, "frequency_khz", c.frequency_khz);
        read(n, "spreading_coeff", c.spreading_coeff);
        read(n, "sound_speed_mps", c.sound_speed_mps);
        read(n, "noise_db", c.noise_level_db);
        read(n, "detect_threshold_db", c.detect_threshold_db);
        read(n, "carrier_sense_margin_db", c.carrier_sense_margin_db);
        read(n, "source_level_db", s.source_level_db);
        read(n, "calibration_range_m", s.calibration_range_m);
        try {
            c.validate();
        } catch (const std::invalid_argument& e) {
            fail(n, e.what());
        }
    }

    void parse_modem(const YAML::Node& n, Scenario& s) const
    {
        expect_map(n, "modem");
        allow_keys(n, "modem",
                   {"tf", "ack_bits", "status_base_bits", "status_bits_per_hop", "max_frame_duration_s", "formats"});
        auto& m = s.modem;
        if (const auto t = n["tf"])
            s.set_network_tf(tf(t));
        read_unsigned(n, "ack_bits", m.ack_bits);
        read_unsigned(n, "status_base_bits", m.status_base_bits);
        read_unsigned(n, "status_bits_per_hop", m.status_bits_per_hop);
        read(n, "max_frame_duration_s", m.max_frame_duration_s);
        if (const auto formats = n["formats"]) {
            expect_map(formats, "modem.formats");
            for (const auto& kv : formats) {
                const TransportFormatId id = tf(kv.first);
                expect_map(kv.second, "transport format entry");
                allow_keys(kv.second, "transport format entry", {"rate_bps", "sync_overhead_s", "detect_threshold_db"});
                auto& f = m.formats[tf_index(id)];
                read(kv.second, "rate_bps", f.payload_rate_bps);
                read(kv.second, "sync_overhead_s", f.sync_overhead_s);
                read(kv.second, "detect_threshold_db", f.detect_threshold_db);
            }
        }
        try {
            m.validate();
        } catch (const std::invalid_argument& e) {
            fail(n, e.what());
        }
    }

    void parse_mac(const YAML::Node& n, Scenario& s) const
    {
        expect_map(n, "mac");
        allow_keys(n, "mac", {"backoff_window_s", "ack_timeout_s", "max_retx", "ack_guard_s", "queue_limit"});
        auto& m = s.mac;
        read(n, "backoff_window_s", m.backoff_window_s);
        read(n, "ack_timeout_s", m.ack_timeout_s);
        read_unsigned(n, "max_retx", m.max_retx);
        read(n, "ack_guard_s", m.ack_guard_s);
        if (const auto q = n["queue_limit"]) {
            std::uint32_t v = 0;
            read_unsigned(n, "queue_limit", v);
            if (v == 0)
                fail(q, "queue_limit must be > 0");
            m.queue_limit = v;
        }
    }

    void parse_icrp(const YAML::Node& n, Scenario& s) const
    {
        expect_map(n, "icrp");
        allow_keys(n, "icrp",
                   {"hop_limit", "patience", "status_window_s", "route_lifetime_s", "rate_up_successes",
                    "rate_down_failures", "rate_adaptation", "min_tf", "max_tf", "dup_cache_size"});
        auto& c = s.icrp;
        read_unsigned(n, "hop_limit", c.hop_limit);
        read_unsigned(n, "patience", c.patience);
        read(n, "status_window_s", c.status_window_s);
        read(n, "route_lifetime_s", c.route_lifetime_s);
        read_unsigned(n, "rate_up_successes", c.rate_up_successes);
        read_unsigned(n, "rate_down_failures", c.rate_down_failures);
        read(n, "rate_adaptation", c.rate_adaptation);
        if (n["min_tf"])
            c.min_tf = tf(n["min_tf"]);
        if (n["max_tf"])
            c.max_tf = tf(n["max_tf"]);
        if (n["dup_cache_size"]) {
            std::uint32_t v = 0;
            read_unsigned(n, "dup_cache_size", v);
            c.dup_cache_size = v;
        }
        try {
            c.validate();
        } catch (const std::invalid_argument& e) {
            fail(n, e.what());
        }
    }

    void parse_traffic(const YAML::Node& n, Scenario& s) const
    {
        expect_map(n, "traffic");
        allow_keys(n, "traffic",
                   {"measurement_period_s", "normal_decimation", "alarm_decimation", "payload_bits", "interval_s",
                    "phase_offsets", "sources", "alarm_hourly", "alarm_windows", "permanent_alarm"});
        auto& t = s.traffic;
        read(n, "measurement_period_s", t.measurement_period_s);
        read_unsigned(n, "normal_decimation", t.normal_decimation);
        read_unsigned(n, "alarm_decimation", t.alarm_decimation);
        read_unsigned(n, "payload_bits", t.payload_bits);
        read(n, "interval_s", t.interval_override_s);
        read(n, "phase_offsets", t.phase_offsets);
        if (const auto src = n["sources"])
            t.sources = node_list(src, s);

        if (const auto hourly = n["alarm_hourly"]) {
            expect_map(hourly, "traffic.alarm_hourly");
            allow_keys(hourly, "traffic.alarm_hourly", {"nodes", "window_s"});
            if (!hourly["nodes"])
                fail(hourly, "alarm_hourly needs 'nodes'");
            const auto nodes = node_list(hourly["nodes"], s);
            double window = 900.0;
            read(hourly, "window_s", window);
            if (!(window >= 0.0 && window <= 3600.0))
                fail(hourly["window_s"], "window_s must be within [0, 3600]");
            const auto windows = alarm_hourly_schedule(nodes, s.duration, window);
            t.alarm_schedule.insert(t.alarm_schedule.end(), windows.begin(), windows.end());
        }
        if (const auto list = n["alarm_windows"]) {
            if (!list.IsSequence())
                fail(list, "alarm_windows must be a list");
            for (const auto& item : list) {
                expect_map(item, "alarm window");
                allow_keys(item, "alarm window", {"node", "start_s", "duration_s"});
                if (!item["node"] || !item["start_s"] || !item["duration_s"])
                    fail(item, "alarm window needs node, start_s and duration_s");
                AlarmWindow w;
                w.node = node_id(item["node"], s.nodes.size());
                w.start = number(item["start_s"], "start_s");
                w.duration = number(item["duration_s"], "duration_s");
                t.alarm_schedule.push_back(w);
            }
        }
        if (const auto perm = n["permanent_alarm"]) {
            for (NodeId id : node_list(perm, s))
                t.alarm_schedule.push_back(AlarmWindow{id, 0.0, kInfinity});
        }
        try {
            t.validate();
        } catch (const std::invalid_argument& e) {
            fail(n, e.what());
        }
    }

    std::string source_;
};

} // namespace

Scenario parse_scenario(const std::string& text, const std::string& source_name)
{
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ScenarioError(source_name, e.mark.line >= 0 ? e.mark.line + 1 : 0, e.msg);
    }
    return Parser(source_name).parse(root);
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ScenarioError(path.string(), 0, "cannot open scenario file");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario(text.str(), path.string());
}

} // namespace uwsn
