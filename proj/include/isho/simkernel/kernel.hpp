#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "isho/core/params.hpp"
#include "isho/core/topology.hpp"
#include "isho/wire/gtpu.hpp"

namespace isho::sim {

struct SimError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Message {
  std::uint64_t id = 0;  // assigned by the kernel on send
  NodeId src = 0;
  NodeId dst = 0;
  std::string name;
  wire::Bytes payload;
  LinkClass link = LinkClass::SbaNfNf;
  StepId step = StepId::Stream;
  int ref = -1;  // owner tag, e.g. index into a step plan
};

enum class EventKind { Deliver, Process, Timer };

struct Event {
  Micros at{0};
  std::uint64_t seq = 0;  // assigned by schedule()
  EventKind kind = EventKind::Timer;
  Message msg;             // Deliver, Process
  NodeId node = 0;         // Timer
  std::uint64_t tag = 0;   // Timer
};

enum class TraceKind { Send, Arrive, Process, Timer, Mark };

std::string_view trace_kind_name(TraceKind k);

struct TraceRecord {
  Micros at{0};
  NodeId node = 0;
  TraceKind kind = TraceKind::Send;
  std::string name;
  StepId step = StepId::Stream;
  std::optional<NodeId> peer;
  std::optional<LinkClass> link;
  std::uint64_t msg_id = 0;
  wire::Bytes payload;  // Send records only
};

enum class Mark { IshoStart, LastDownlinkPrev, FirstDownlinkNew, IshoEnd };

std::string_view mark_name(Mark m);

struct Trace {
  std::vector<TraceRecord> records;
  std::map<Mark, Micros> marks;
  std::vector<std::string> node_names;

  // One line per record: time_us, node, direction, message, step, peer.
  void write_log(std::ostream& out) const;
  std::string log() const;
};

class Kernel;

class Handler {
 public:
  virtual ~Handler() = default;
  virtual void on_process(Kernel& k, const Message& m) = 0;
  virtual void on_timer(Kernel& k, NodeId node, std::uint64_t tag) = 0;
};

// Events are ordered by (at, seq). Delivery happens one link delay after
// sending; processing completes one receiver processing delay after that.
// Nodes are infinite servers, so nothing queues.
class Kernel {
 public:
  Kernel(const Topology& topo, const DelayParams& delays);

  Micros now() const { return now_; }
  const Topology& topology() const { return topo_; }
  const DelayParams& delays() const { return delays_; }

  void schedule(Event e);
  std::uint64_t send(Message m);
  std::uint64_t send(NodeId src, NodeId dst, std::string name, wire::Bytes payload, StepId step);
  void set_timer(Micros at, NodeId node, std::uint64_t tag);
  void mark(Mark m);
  bool marked(Mark m) const { return trace_.marks.count(m) > 0; }

  // Deliver and Process events still queued.
  std::size_t in_flight() const { return in_flight_; }
  std::size_t pending() const { return queue_.size(); }

  // Simulated time beyond which the run aborts.
  void set_horizon(Micros h) { horizon_ = h; }

  Trace run_until_idle(Handler& h);

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.at != b.at ? a.at > b.at : a.seq > b.seq;
    }
  };

  void record(TraceKind kind, NodeId node, const Message* m, std::optional<NodeId> peer);

  const Topology& topo_;
  DelayParams delays_;
  Micros now_{0};
  std::uint64_t next_seq_ = 0;
  std::uint64_t next_msg_ = 1;
  std::size_t in_flight_ = 0;
  Micros horizon_{std::chrono::hours(24)};
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  Trace trace_;
};

struct LatencyMetrics {
  Micros isho_delay{0};
  Micros isho_interval{0};
};

LatencyMetrics measure(const Trace& t);

}  // namespace isho::sim
