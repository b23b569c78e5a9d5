#include "isho/simkernel/kernel.hpp"

#include <ostream>
#include <sstream>

#include <fmt/format.h>

namespace isho::sim {

std::string_view trace_kind_name(TraceKind k) {
  switch (k) {
    case TraceKind::Send: return "send";
    case TraceKind::Arrive: return "arrive";
    case TraceKind::Process: return "process";
    case TraceKind::Timer: return "timer";
    case TraceKind::Mark: return "mark";
  }
  return "?";
}

std::string_view mark_name(Mark m) {
  switch (m) {
    case Mark::IshoStart: return "isho_start";
    case Mark::LastDownlinkPrev: return "last_downlink_prev";
    case Mark::FirstDownlinkNew: return "first_downlink_new";
    case Mark::IshoEnd: return "isho_end";
  }
  return "?";
}

void Trace::write_log(std::ostream& out) const {
  auto name = [&](NodeId id) -> std::string_view {
    return id < node_names.size() ? std::string_view(node_names[id]) : std::string_view("?");
  };
  for (const auto& r : records) {
    out << fmt::format("{}\t{}\t{}\t{}\t{}\t{}\n", r.at.count(), name(r.node),
                       trace_kind_name(r.kind), r.name, step_name(r.step),
                       r.peer ? name(*r.peer) : std::string_view("-"));
  }
}

std::string Trace::log() const {
  std::ostringstream s;
  write_log(s);
  return s.str();
}

Kernel::Kernel(const Topology& topo, const DelayParams& delays) : topo_(topo), delays_(delays) {
  for (const auto& n : topo.nodes) trace_.node_names.push_back(n.name);
}

void Kernel::schedule(Event e) {
  if (e.at < now_)
    throw SimError(fmt::format("event scheduled at {} us, before the clock ({} us)", e.at.count(),
                               now_.count()));
  e.seq = next_seq_++;
  if (e.kind != EventKind::Timer) ++in_flight_;
  queue_.push(std::move(e));
}

std::uint64_t Kernel::send(Message m) {
  if (m.src >= topo_.nodes.size() || m.dst >= topo_.nodes.size())
    throw SimError(fmt::format("send of {} between unknown nodes", m.name));
  auto link = link_between(topo_.node(m.src).role, topo_.node(m.dst).role);
  if (!link)
    throw SimError(fmt::format("no link class between {} and {}", topo_.node(m.src).name,
                               topo_.node(m.dst).name));
  m.link = *link;
  m.id = next_msg_++;
  record(TraceKind::Send, m.src, &m, m.dst);
  Event e;
  e.at = now_ + delays_.link(m.link);
  e.kind = EventKind::Deliver;
  e.msg = std::move(m);
  auto id = e.msg.id;
  schedule(std::move(e));
  return id;
}

std::uint64_t Kernel::send(NodeId src, NodeId dst, std::string name, wire::Bytes payload,
                           StepId step) {
  Message m;
  m.src = src;
  m.dst = dst;
  m.name = std::move(name);
  m.payload = std::move(payload);
  m.step = step;
  return send(std::move(m));
}

void Kernel::set_timer(Micros at, NodeId node, std::uint64_t tag) {
  Event e;
  e.at = at;
  e.kind = EventKind::Timer;
  e.node = node;
  e.tag = tag;
  schedule(std::move(e));
}

void Kernel::mark(Mark m) {
  trace_.marks[m] = now_;
  TraceRecord r;
  r.at = now_;
  r.kind = TraceKind::Mark;
  r.name = std::string(mark_name(m));
  trace_.records.push_back(std::move(r));
}

void Kernel::record(TraceKind kind, NodeId node, const Message* m, std::optional<NodeId> peer) {
  TraceRecord r;
  r.at = now_;
  r.node = node;
  r.kind = kind;
  r.peer = peer;
  if (m) {
    r.name = m->name;
    r.step = m->step;
    r.link = m->link;
    r.msg_id = m->id;
    if (kind == TraceKind::Send) r.payload = m->payload;
  }
  trace_.records.push_back(std::move(r));
}

Trace Kernel::run_until_idle(Handler& h) {
  while (!queue_.empty()) {
    Event e = queue_.top();
    queue_.pop();
    if (e.at > horizon_)
      throw SimError(fmt::format("simulation passed its horizon of {} us", horizon_.count()));
    now_ = e.at;
    switch (e.kind) {
      case EventKind::Deliver: {
        --in_flight_;
        record(TraceKind::Arrive, e.msg.dst, &e.msg, e.msg.src);
        Event p;
        p.at = now_ + delays_.processing(topo_.node(e.msg.dst).role);
        p.kind = EventKind::Process;
        p.msg = std::move(e.msg);
        schedule(std::move(p));
        break;
      }
      case EventKind::Process:
        --in_flight_;
        record(TraceKind::Process, e.msg.dst, &e.msg, e.msg.src);
        h.on_process(*this, e.msg);
        break;
      case EventKind::Timer: {
        TraceRecord r;
        r.at = now_;
        r.node = e.node;
        r.kind = TraceKind::Timer;
        r.name = fmt::format("timer:{}", e.tag);
        trace_.records.push_back(std::move(r));
        h.on_timer(*this, e.node, e.tag);
        break;
      }
    }
  }
  return std::move(trace_);
}

LatencyMetrics measure(const Trace& t) {
  for (auto m : {Mark::IshoStart, Mark::LastDownlinkPrev, Mark::FirstDownlinkNew, Mark::IshoEnd})
    if (!t.marks.count(m))
      throw SimError(fmt::format("handover incomplete: no {} mark", mark_name(m)));
  LatencyMetrics r;
  r.isho_delay = t.marks.at(Mark::FirstDownlinkNew) - t.marks.at(Mark::LastDownlinkPrev);
  r.isho_interval = t.marks.at(Mark::IshoEnd) - t.marks.at(Mark::IshoStart);
  return r;
}

}  // namespace isho::sim
