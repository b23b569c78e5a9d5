#include "isho/protocols/run.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "isho/core/config_io.hpp"
#include "isho/wire/gtpu.hpp"
#include "isho/wire/pcap.hpp"

namespace isho::proto {

namespace {

constexpr std::uint64_t kStartTimer = 1;
constexpr std::uint64_t kStreamTimer = 2;
constexpr Micros kHorizon = std::chrono::hours(1);

std::vector<StepId> terminal_steps(SchemeKind s) {
  switch (s) {
    case SchemeKind::Gtpv1U: return {StepId::H};
    case SchemeKind::HybridMipv6Gtp: return {StepId::H, StepId::J};
    default: return {StepId::J};
  }
}

class Run final : public sim::Handler, public Network {
 public:
  Run(const RunConfig& c, const analytic::SequenceLibrary& lib)
      : cfg_(c),
        plans_(analytic::expand_all(c.scheme, lib, c.topology)),
        prereq_(step_prerequisites(c.scheme)),
        terminals_(terminal_steps(c.scheme)),
        ap_(make_address_plan(c)),
        kernel_(cfg_.topology, c.delays) {
    for (const auto& [step, plan] : plans_) {
      auto& ch = children_[step];
      ch.assign(plan.messages.size() + 1, {});
      for (std::size_t i = 0; i < plan.messages.size(); ++i) {
        int p = plan.messages[i].parent;
        ch[static_cast<std::size_t>(p + 1)].push_back(static_cast<int>(i));
      }
    }
    build_agents();
  }

  RunResult execute() {
    kernel_.set_horizon(kHorizon);
    kernel_.set_timer(Micros{0}, cfg_.topology.dn, kStreamTimer);
    kernel_.set_timer(cfg_.stream.lead, cfg_.topology.ue, kStartTimer);
    RunResult r;
    r.trace = kernel_.run_until_idle(*this);
    r.scheme = cfg_.scheme;
    r.addresses = ap_;
    for (auto s : analytic::scheme_steps(cfg_.scheme))
      if (!timing_.count(s) || !done_.count(s)) deadlock();
    r.steps = timing_;

    auto lat = sim::measure(r.trace);
    r.metrics.isho_delay = lat.isho_delay;
    r.metrics.isho_interval = lat.isho_interval;
    auto o = analytic::resource_overhead(cfg_.scheme, cfg_.resources, cfg_.analytic.br_weights);
    r.metrics.cpu_overhead = o.cr;
    r.metrics.bw_overhead = o.br;
    double sc = 0.0;
    for (const auto& rec : r.trace.records) {
      if (rec.kind != sim::TraceKind::Send || rec.step == StepId::Stream || !rec.link) continue;
      if (!is_control_link(*rec.link)) continue;
      sc += cfg_.signalling.transmission(*rec.link) +
            cfg_.signalling.processing(cfg_.topology.node(*rec.peer).role);
    }
    r.metrics.signalling_cost = sc;
    r.stream = stream_stats(r.trace);
    return r;
  }

  // Network
  const RunConfig& config() const override { return cfg_; }
  Micros now() const override { return kernel_.now(); }

  void forward(NodeId from, Outgoing out) override {
    if (out.name == "G-PDU") {
      auto inner = wire::decode_gtpu(out.payload).inner;
      tunnelled_.insert(wire::parse_data_packet(inner).seq);
    }
    send(from, std::move(out));
  }

  void start_step(StepId s) override {
    if (timing_.count(s))
      fail(fmt::format("unexpected-message: step {} started twice", step_name(s)));
    auto pit = plans_.find(s);
    if (pit == plans_.end())
      fail(fmt::format("unexpected-message: step {} is not part of scheme {}", step_name(s),
                       scheme_name(cfg_.scheme)));
    timing_[s].started = kernel_.now();
    const auto& plan = pit->second;
    outstanding_[s] = static_cast<int>(std::count_if(
        plan.messages.begin(), plan.messages.end(), [](const auto& m) { return !m.side; }));

    if (s == StepId::A) {
      kernel_.mark(sim::Mark::IshoStart);
      if (cfg_.scheme == SchemeKind::Baseline3gpp) {
        // Break-before-make: the previous session goes when the new one is requested.
        kernel_.mark(sim::Mark::LastDownlinkPrev);
        for (NodeId u : cfg_.topology.upf_chain_prev)
          static_cast<UpfAgent&>(*agents_[u]).release_session();
      }
    }

    // Roots grouped by sender, in plan order.
    std::map<NodeId, std::vector<Outgoing>> by_src;
    std::vector<NodeId> order;
    for (int i : children_[s][0]) {
      const auto& m = plan.messages[static_cast<std::size_t>(i)];
      if (!by_src.count(m.src)) order.push_back(m.src);
      by_src[m.src].push_back(Outgoing{m.dst, m.name, {}, s, i});
    }
    for (NodeId src : order) {
      auto& planned = by_src[src];
      guarded(src, [&] { agents_[src]->start_step(s, planned); });
      for (auto& o : planned) send(src, std::move(o));
    }
    if (outstanding_[s] == 0) step_done(s);
  }

  void dropped(const sim::Message& m, const std::string&) override {
    if (m.step == StepId::Stream && m.name == "DL-Data")
      ++drops_;
  }

  void delivered(const sim::Message& m, std::uint32_t seq) override {
    auto pos = cfg_.topology.chain_position(m.src);
    bool prev = pos && pos->first == SliceLabel::Previous;
    deliveries_.push_back({seq, kernel_.now(), prev});
  }

  // Handler
  void on_process(sim::Kernel&, const sim::Message& m) override {
    if (m.step == StepId::Stream) {
      std::vector<Outgoing> none;
      guarded(m.dst, [&] { agents_[m.dst]->handle(m, none); });
      return;
    }
    --plan_in_flight_;
    const auto& plan = plans_.at(m.step);
    std::vector<Outgoing> planned;
    for (int i : children_.at(m.step)[static_cast<std::size_t>(m.ref + 1)]) {
      const auto& c = plan.messages[static_cast<std::size_t>(i)];
      planned.push_back(Outgoing{c.dst, c.name, m.payload, m.step, i});
    }
    guarded(m.dst, [&] { agents_[m.dst]->handle(m, planned); });
    for (auto& o : planned) send(m.dst, std::move(o));
    if (!plan.messages[static_cast<std::size_t>(m.ref)].side && --outstanding_[m.step] == 0)
      step_done(m.step);
  }

  void on_timer(sim::Kernel& k, NodeId, std::uint64_t tag) override {
    if (tag == kStartTimer) {
      start_step(StepId::A);
      return;
    }
    if (!timing_.empty() && plan_in_flight_ == 0 && !all_done()) deadlock();
    if (all_done() && tail_left_-- <= 0) return;
    auto& dn = static_cast<DnAgent&>(*agents_[cfg_.topology.dn]);
    emissions_.push_back({dn.emit_stream_packet(), k.now()});
    k.set_timer(k.now() + cfg_.stream.period, cfg_.topology.dn, kStreamTimer);
  }

 private:
  struct Delivery {
    std::uint32_t seq;
    Micros at;
    bool via_prev;
  };
  struct Emission {
    std::uint32_t seq;
    Micros at;
  };

  void build_agents() {
    const auto& t = cfg_.topology;
    agents_.resize(t.nodes.size());
    std::set<NodeId> prev_chain(t.upf_chain_prev.begin(), t.upf_chain_prev.end());
    for (const auto& n : t.nodes) {
      std::unique_ptr<Agent> a;
      switch (n.role) {
        case NodeRole::UE: a = std::make_unique<UeAgent>(n.id, *this, ap_, cfg_.seed); break;
        case NodeRole::AMF:
        case NodeRole::HomeAMF: a = std::make_unique<AmfAgent>(n.id, *this); break;
        case NodeRole::SMF:
        case NodeRole::HomeSMF: {
          std::optional<SmfSessionContext> existing;
          if (n.id != t.smf_new) {
            existing.emplace();
            existing->request_type = SmfSessionContext::RequestType::Initial;
            existing->allocated_prefix = ap_.prefix_prev;
            existing->policy_assoc = true;
            const auto& chain = n.id == t.smf_prev ? t.upf_chain_prev : std::vector<NodeId>{t.home_gw};
            existing->upf_bindings.insert(chain.begin(), chain.end());
          }
          a = std::make_unique<SmfAgent>(n.id, *this, ap_, std::move(existing));
          break;
        }
        case NodeRole::N3UPF:
        case NodeRole::GwUPF:
        case NodeRole::IsgwUPF:
        case NodeRole::GenericUPF: {
          bool installed = prev_chain.count(n.id) || n.id == t.home_gw;
          a = std::make_unique<UpfAgent>(n.id, *this, ap_, installed);
          break;
        }
        case NodeRole::DN: a = std::make_unique<DnAgent>(n.id, *this, ap_, cfg_.seed); break;
        default: a = std::make_unique<PassiveAgent>(n.id, *this); break;
      }
      agents_[n.id] = std::move(a);
    }
  }

  void send(NodeId from, Outgoing o) {
    sim::Message m;
    m.src = from;
    m.dst = o.dst;
    m.name = std::move(o.name);
    m.payload = std::move(o.payload);
    m.step = o.step;
    m.ref = o.ref;
    if (m.step != StepId::Stream) ++plan_in_flight_;
    try {
      kernel_.send(std::move(m));
    } catch (const sim::SimError& e) {
      fail(e.what());
    }
  }

  void step_done(StepId s) {
    timing_[s].done = kernel_.now();
    done_.insert(s);
    if (s == StepId::C) kernel_.mark(sim::Mark::LastDownlinkPrev);
    if (std::find(terminals_.begin(), terminals_.end(), s) != terminals_.end()) {
      if (!kernel_.marked(sim::Mark::FirstDownlinkNew)) {
        kernel_.mark(sim::Mark::FirstDownlinkNew);
        first_new_ = kernel_.now();
      }
      if (std::all_of(terminals_.begin(), terminals_.end(), [&](StepId x) { return done_.count(x); }))
        kernel_.mark(sim::Mark::IshoEnd);
    }
    for (const auto& [step, pre] : prereq_) {
      if (timing_.count(step)) continue;
      if (std::find(pre.begin(), pre.end(), s) == pre.end()) continue;
      if (std::all_of(pre.begin(), pre.end(), [&](StepId x) { return done_.count(x); }))
        start_step(step);
    }
  }

  bool all_done() const { return done_.size() == analytic::scheme_steps(cfg_.scheme).size(); }

  template <class F>
  void guarded(NodeId at, F&& f) {
    try {
      f();
    } catch (ProtocolError& e) {
      if (e.snapshot.empty()) e.snapshot = snapshot();
      throw;
    } catch (const wire::WireError& e) {
      fail(fmt::format("malformed payload at {}: {}", cfg_.topology.node(at).name, e.what()));
    }
  }

  [[noreturn]] void fail(const std::string& what) {
    ProtocolError e(what);
    e.snapshot = snapshot();
    throw e;
  }

  [[noreturn]] void deadlock() {
    std::string pending;
    for (auto s : analytic::scheme_steps(cfg_.scheme))
      if (!done_.count(s)) pending += fmt::format(" {}", step_name(s));
    fail(fmt::format("handover stalled at {} us; steps not done:{}", kernel_.now().count(), pending));
  }

  std::string snapshot() const {
    std::string s;
    for (const auto& a : agents_) s += a->snapshot() + "\n";
    return s;
  }

  StreamStats stream_stats(const sim::Trace& tr) const {
    StreamStats st;
    Micros begin = tr.marks.at(sim::Mark::IshoStart), end = tr.marks.at(sim::Mark::IshoEnd);
    std::map<std::uint32_t, int> count;
    for (const auto& d : deliveries_) {
      ++st.delivered;
      if (++count[d.seq] > 1) ++st.duplicates;
      if (d.via_prev) {
        ++st.via_prev;
        if (first_new_ && d.at > *first_new_) ++st.late_prev;
      } else {
        ++st.via_new;
      }
    }
    for (const auto& e : emissions_) {
      ++st.emitted;
      auto it = count.find(e.seq);
      if (it == count.end()) ++st.lost;
      if (e.at >= begin && e.at <= end) {
        ++st.window_emitted;
        if (it != count.end() && it->second == 1) ++st.window_exactly_once;
      }
    }
    st.tunnelled = static_cast<std::uint32_t>(tunnelled_.size());
    return st;
  }

  RunConfig cfg_;
  analytic::PlanSet plans_;
  std::map<StepId, std::vector<StepId>> prereq_;
  std::vector<StepId> terminals_;
  AddressPlan ap_;
  sim::Kernel kernel_;
  std::vector<std::unique_ptr<Agent>> agents_;
  // children_[step][parent + 1]: messages triggered by that message (or the start)
  std::map<StepId, std::vector<std::vector<int>>> children_;
  std::map<StepId, int> outstanding_;
  std::map<StepId, StepTiming> timing_;
  std::set<StepId> done_;
  std::size_t plan_in_flight_ = 0;
  int tail_left_ = 0;
  std::optional<Micros> first_new_;
  std::vector<Emission> emissions_;
  std::vector<Delivery> deliveries_;
  std::set<std::uint32_t> tunnelled_;
  std::size_t drops_ = 0;

 public:
  void set_tail(int n) { tail_left_ = n; }
};

}  // namespace

std::map<StepId, std::vector<StepId>> step_prerequisites(SchemeKind scheme) {
  using S = StepId;
  switch (scheme) {
    case SchemeKind::Baseline3gpp:
      return {{S::B, {S::A}}, {S::SecAuth, {S::B}}, {S::F, {S::SecAuth}},
              {S::G, {S::F}}, {S::StdIpv6Config, {S::G}}, {S::J, {S::StdIpv6Config}}};
    case SchemeKind::Mipv6RrBu:
      return {{S::B, {S::A}}, {S::C, {S::B}}, {S::E, {S::C}}, {S::F, {S::C}},
              {S::G, {S::F}}, {S::I, {S::E, S::F}}, {S::J, {S::I}}};
    case SchemeKind::Gtpv1U:
      return {{S::B, {S::A}}, {S::C, {S::B}}, {S::D, {S::C}}, {S::F, {S::C}},
              {S::G, {S::F}}, {S::H, {S::D, S::G}}};
    case SchemeKind::HybridMipv6Gtp:
      return {{S::B, {S::A}}, {S::C, {S::B}}, {S::D, {S::C}}, {S::E, {S::C}},
              {S::F, {S::C}}, {S::G, {S::F}}, {S::H, {S::D, S::G}}, {S::I, {S::E, S::F}},
              {S::J, {S::I}}};
  }
  return {};
}

RunResult run_scheme(const RunConfig& c, const analytic::SequenceLibrary& lib) {
  auto v = validate(c);
  if (!v.empty()) throw ConfigError(format_violations(v));
  Run run(c, lib);
  run.set_tail(c.stream.tail_packets);
  return run.execute();
}

RunResult run_scheme(const RunConfig& c) {
  return run_scheme(c, analytic::SequenceLibrary::for_dir(c.sequence_dir));
}

void write_pcap(const RunResult& r, const std::string& path) {
  wire::PcapWriter out(path);
  for (const auto& rec : r.trace.records) {
    if (rec.kind != sim::TraceKind::Send || !rec.peer) continue;
    auto src = node_address(rec.node), dst = node_address(*rec.peer);
    const auto& p = rec.payload;
    wire::Bytes pkt;
    if (rec.name == "G-PDU") {
      pkt = wire::udp_packet(src, dst, wire::kGtpuPort, wire::kGtpuPort, p);
    } else if (!p.empty() && (p[0] >> 4) == 6 && p.size() >= wire::kIpv6HeaderLen &&
               p.size() == wire::kIpv6HeaderLen + (std::size_t{p[4]} << 8 | p[5])) {
      pkt = p;
    } else {
      std::uint16_t port = rec.link == LinkClass::SmfUpf ? 8805 : 7777;
      wire::Bytes body(rec.name.begin(), rec.name.end());
      if (!p.empty()) {
        body.push_back(' ');
        body.insert(body.end(), p.begin(), p.end());
      }
      pkt = wire::udp_packet(src, dst, port, port, body);
    }
    out.write(rec.at.count(), pkt);
  }
}

}  // namespace isho::proto
