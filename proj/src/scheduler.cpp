#include "uwsn/scheduler.hpp"

#include <string>

namespace uwsn {

std::string_view to_string(EventKind kind) noexcept
{
    switch (kind) {
    case EventKind::TxStart: return "tx-start";
    case EventKind::TxEnd: return "tx-end";
    case EventKind::ArrivalStart: return "arrival-start";
    case EventKind::ArrivalEnd: return "arrival-end";
    case EventKind::Timer: return "timer";
    }
    return "?";
}

EventId Scheduler::schedule(SimTime at, NodeId target, EventKind kind, Action action)
{
    const SimTime t = quantize(at);
    if (!(t >= now_))
        throw ContractViolation("Scheduler::schedule: event time " + std::to_string(at) +
                                " is before current time " + std::to_string(now_));
    const EventId id = next_seq_++;
    heap_.push(Entry{t, id});
    pending_.emplace(id, Payload{target, kind, std::move(action)});
    return id;
}

bool Scheduler::cancel(EventId id)
{
    // The heap entry stays behind and is skipped when popped.
    return pending_.erase(id) == 1;
}

bool Scheduler::pop_live(Entry& out)
{
    while (!heap_.empty()) {
        Entry top = heap_.top();
        if (pending_.contains(top.seq)) {
            out = top;
            return true;
        }
        heap_.pop();
    }
    return false;
}

bool Scheduler::step()
{
    Entry e{};
    if (!pop_live(e))
        return false;
    heap_.pop();
    auto node = pending_.extract(e.seq);
    now_ = e.time;
    ++processed_;
    if (trace_)
        trace_(TraceRecord{e.time, e.seq, node.mapped().target, node.mapped().kind});
    node.mapped().action();
    return true;
}

void Scheduler::run_until(SimTime until)
{
    Entry e{};
    while (pop_live(e) && e.time <= until)
        step();
    if (until > now_)
        now_ = quantize(until);
}

} // namespace uwsn
