#pragma once

#include "uwsn/types.hpp"

#include <cstdint>
#include <functional>
#include <queue>
#include <unordered_map>
#include <vector>

namespace uwsn {

using EventId = std::uint64_t;

enum class EventKind : std::uint8_t { TxStart, TxEnd, ArrivalStart, ArrivalEnd, Timer };

std::string_view to_string(EventKind kind) noexcept;

/// One processed event, as recorded by the optional trace hook.
struct TraceRecord {
    SimTime time;
    std::uint64_t seq;
    NodeId target;
    EventKind kind;

    bool operator==(const TraceRecord&) const = default;
};

/// Deterministic discrete-event scheduler.
///
/// Events fire in (time, seq) order where seq is the insertion counter, so
/// events scheduled for the same instant fire in the order they were
/// scheduled. Times are quantized to microseconds on entry.
class Scheduler {
public:
    using Action = std::function<void()>;

    SimTime now() const noexcept { return now_; }

    /// Enqueue an action at absolute time `at`. Throws ContractViolation when
    /// `at` lies before now().
    EventId schedule(SimTime at, NodeId target, EventKind kind, Action action);

    EventId schedule_in(double delay, NodeId target, EventKind kind, Action action)
    {
        return schedule(now_ + delay, target, kind, std::move(action));
    }

    /// Remove a pending event. Returns false if it already fired, was
    /// cancelled before, or was never issued.
    bool cancel(EventId id);

    bool is_pending(EventId id) const { return pending_.contains(id); }

    /// Process events with time <= until. Leaves now() at `until`.
    void run_until(SimTime until);

    /// Fire the next event. Returns false when the queue is empty.
    bool step();

    std::size_t pending_count() const noexcept { return pending_.size(); }
    std::uint64_t processed_count() const noexcept { return processed_; }

    void set_trace(std::function<void(const TraceRecord&)> trace) { trace_ = std::move(trace); }

private:
    struct Entry {
        SimTime time;
        std::uint64_t seq;
        bool operator>(const Entry& o) const { return time != o.time ? time > o.time : seq > o.seq; }
    };
    struct Payload {
        NodeId target;
        EventKind kind;
        Action action;
    };

    bool pop_live(Entry& out);

    SimTime now_ = 0.0;
    std::uint64_t next_seq_ = 0;
    std::uint64_t processed_ = 0;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap_;
    std::unordered_map<EventId, Payload> pending_;
    std::function<void(const TraceRecord&)> trace_;
};

} // namespace uwsn
