#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>

#include "isho/protocols/payload.hpp"
#include "isho/protocols/run.hpp"
#include "isho/wire/gtpu.hpp"
#include "support/gen.hpp"

using namespace isho;
using namespace isho::proto;

namespace {

struct FakeNet : Network {
  RunConfig cfg;
  std::vector<std::pair<NodeId, Outgoing>> forwarded;
  std::vector<StepId> started;
  int drops = 0;
  std::vector<std::uint32_t> got;

  explicit FakeNet(SchemeKind s) : cfg(default_config()) {
    cfg.scheme = s;
    sync_derived(cfg);
  }
  const RunConfig& config() const override { return cfg; }
  Micros now() const override { return Micros{0}; }
  void forward(NodeId f, Outgoing o) override { forwarded.emplace_back(f, std::move(o)); }
  void start_step(StepId s) override { started.push_back(s); }
  void dropped(const sim::Message&, const std::string&) override { ++drops; }
  void delivered(const sim::Message&, std::uint32_t seq) override { got.push_back(seq); }
};

sim::Message msg(NodeId src, NodeId dst, std::string name, wire::Bytes payload, StepId step) {
  sim::Message m;
  m.src = src;
  m.dst = dst;
  m.name = std::move(name);
  m.payload = std::move(payload);
  m.step = step;
  return m;
}

std::vector<Outgoing> plan(std::initializer_list<std::pair<NodeId, const char*>> l) {
  std::vector<Outgoing> out;
  for (auto [dst, name] : l) out.push_back(Outgoing{dst, name, {}, StepId::Stream, 0});
  return out;
}

// Drives a UE to AddressConfigured.
void configure(UeAgent& ue, FakeNet& net, const AddressPlan& ap) {
  const auto& t = net.cfg.topology;
  auto p = plan({{t.amf, "PDU_Session_Establishment_Request"}});
  ue.start_step(StepId::A, p);
  std::vector<Outgoing> none;
  auto adv = encode_fields({{"prefix", wire::to_string(ap.prefix_new.prefix) + "/64"}});
  ue.handle(msg(t.amf, t.ue, "IPv6_Prefix_Advertisement", adv, StepId::C), none);
}

RunResult run(SchemeKind s) {
  auto c = default_config();
  c.scheme = s;
  sync_derived(c);
  return run_scheme(c);
}

std::vector<const sim::TraceRecord*> sends(const RunResult& r, const std::string& name) {
  std::vector<const sim::TraceRecord*> out;
  for (const auto& rec : r.trace.records)
    if (rec.kind == sim::TraceKind::Send && rec.name == name) out.push_back(&rec);
  return out;
}

}  // namespace

TEST(Payload, FieldsRoundTrip) {
  Fields f{{"a", "1"}, {"prefix", "2001:db8::/64"}};
  EXPECT_EQ(decode_fields(encode_fields(f)), f);
  EXPECT_TRUE(decode_fields({}).empty());
}

TEST(UeAgent, EmitsCotiAndHotiOnceAddressed) {
  FakeNet net(SchemeKind::Mipv6RrBu);
  auto ap = make_address_plan(net.cfg);
  const auto& t = net.cfg.topology;
  UeAgent ue(t.ue, net, ap, 1);
  configure(ue, net, ap);
  ASSERT_EQ(ue.phase(), UeAgent::Phase::AddressConfigured);
  ASSERT_TRUE(ue.care_of_address());
  EXPECT_TRUE(wire::has_prefix(*ue.care_of_address(), ap.prefix_new));

  auto p = plan({{t.amf, "CoTI"}, {t.home_amf, "HoTI"}});
  ue.start_step(StepId::E, p);
  auto coti = wire::parse_ipv6(p[0].payload);
  auto hoti = wire::parse_ipv6(p[1].payload);
  EXPECT_EQ(coti.src, *ue.care_of_address());
  EXPECT_EQ(hoti.src, ue.home_address());
  EXPECT_TRUE(std::holds_alternative<wire::CareOfTestInit>(wire::decode_mip(coti.payload)));
  EXPECT_TRUE(std::holds_alternative<wire::HomeTestInit>(wire::decode_mip(hoti.payload)));
  EXPECT_EQ(ue.phase(), UeAgent::Phase::RrInProgress);
}

TEST(UeAgent, NoBindingUpdateBeforeBothTests) {
  FakeNet net(SchemeKind::Mipv6RrBu);
  auto ap = make_address_plan(net.cfg);
  const auto& t = net.cfg.topology;
  UeAgent ue(t.ue, net, ap, 1);
  configure(ue, net, ap);
  auto p = plan({{t.amf, "BU"}});
  EXPECT_THROW(ue.start_step(StepId::I, p), ProtocolError);
}

TEST(UeAgent, RejectsAdvertisementWithoutRequest) {
  FakeNet net(SchemeKind::Gtpv1U);
  auto ap = make_address_plan(net.cfg);
  const auto& t = net.cfg.topology;
  UeAgent ue(t.ue, net, ap, 1);
  std::vector<Outgoing> none;
  try {
    ue.handle(msg(t.amf, t.ue, "IPv6_Prefix_Advertisement", {}, StepId::C), none);
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("unexpected-message", 0), 0u) << e.what();
  }
}

TEST(ReturnRoutability, FullExchangeFlipsBindingCache) {
  FakeNet net(SchemeKind::Mipv6RrBu);
  auto ap = make_address_plan(net.cfg);
  const auto& t = net.cfg.topology;
  UeAgent ue(t.ue, net, ap, 1);
  DnAgent dn(t.dn, net, ap, 1);
  configure(ue, net, ap);
  EXPECT_EQ(dn.route().second, t.upf_chain_prev.back());

  auto e = plan({{t.amf, "CoTI"}, {t.home_amf, "HoTI"}});
  ue.start_step(StepId::E, e);
  NodeId gw = t.upf_chain_new.back();
  for (auto& [kind, reply] : {std::pair{"CoTI", "CoT"}, std::pair{"HoTI", "HoT"}}) {
    auto& o = kind == std::string("CoTI") ? e[0] : e[1];
    auto r = plan({{gw, reply}});
    dn.handle(msg(gw, t.dn, kind, o.payload, StepId::E), r);
    std::vector<Outgoing> none;
    ue.handle(msg(t.amf, t.ue, reply, r[0].payload, StepId::E), none);
  }
  auto i = plan({{t.amf, "BU"}});
  ue.start_step(StepId::I, i);
  EXPECT_EQ(ue.phase(), UeAgent::Phase::AwaitBAck);

  auto back = plan({{gw, "BAck"}});
  dn.handle(msg(gw, t.dn, "BU", i[0].payload, StepId::I), back);
  ASSERT_EQ(dn.binding_cache().size(), 1u);
  EXPECT_EQ(dn.binding_cache().at(ap.home_address).care_of_address, *ue.care_of_address());
  EXPECT_EQ(dn.route().first, *ue.care_of_address());
  EXPECT_EQ(dn.route().second, gw);

  std::vector<Outgoing> none;
  ue.handle(msg(t.amf, t.ue, "BAck", back[0].payload, StepId::I), none);
  EXPECT_EQ(ue.phase(), UeAgent::Phase::Bound);
}

TEST(ReturnRoutability, ForgedBindingUpdateRejected) {
  FakeNet net(SchemeKind::Mipv6RrBu);
  auto ap = make_address_plan(net.cfg);
  const auto& t = net.cfg.topology;
  DnAgent dn(t.dn, net, ap, 1);
  NodeId gw = t.upf_chain_new.back();
  auto ask = [&](wire::MipMessage m, const char* name, const char* reply) {
    auto r = plan({{gw, reply}});
    dn.handle(msg(gw, t.dn, name,
                  wire::ipv6_packet(ap.home_address, ap.dn_address, wire::kIpProtoMobility,
                                    wire::encode_mip(m)),
                  StepId::E),
              r);
    return std::get<wire::HomeTest>(wire::decode_mip(wire::parse_ipv6(r[0].payload).payload));
  };
  ask(wire::HomeTestInit{7}, "HoTI", "HoT");
  auto r = plan({{gw, "CoT"}});
  dn.handle(msg(gw, t.dn, "CoTI",
                wire::ipv6_packet(ap.home_address, ap.dn_address, wire::kIpProtoMobility,
                                  wire::encode_mip(wire::CareOfTestInit{8})),
                StepId::E),
            r);
  wire::BindingUpdate bu;
  bu.sequence = 1;
  bu.authenticator.fill(0x55);
  auto back = plan({{gw, "BAck"}});
  EXPECT_THROW(dn.handle(msg(gw, t.dn, "BU",
                             wire::ipv6_packet(ap.home_address, ap.dn_address,
                                               wire::kIpProtoMobility, wire::encode_mip(bu)),
                             StepId::I),
                         back),
               ProtocolError);
  EXPECT_TRUE(dn.binding_cache().empty());
}

TEST(UpfAgent, PendingTunnelRejectsGpdu) {
  FakeNet net(SchemeKind::Gtpv1U);
  auto ap = make_address_plan(net.cfg);
  const auto& t = net.cfg.topology;
  NodeId isgw_new = *t.isgw(SliceLabel::New);
  UpfAgent upf(isgw_new, net, ap, false);
  std::vector<Outgoing> none;
  upf.handle(msg(t.smf_new, isgw_new, "N4_Session_Establishment_Request", {}, StepId::B), none);
  ASSERT_TRUE(upf.tunnel());
  EXPECT_EQ(upf.tunnel()->state, IsgwTunnel::State::Pending);
  auto gpdu = wire::encode_gtpu(ap.teid_new, wire::data_packet(ap.dn_address, ap.home_address, 1));
  EXPECT_THROW(upf.handle(msg(*t.isgw(SliceLabel::Previous), isgw_new, "G-PDU", gpdu, StepId::Stream),
                          none),
               ProtocolError);
  upf.handle(msg(t.smf_new, isgw_new, "N4_Session_Modification_Request", {}, StepId::G), none);
  EXPECT_EQ(upf.tunnel()->state, IsgwTunnel::State::Established);
  upf.handle(msg(*t.isgw(SliceLabel::Previous), isgw_new, "G-PDU", gpdu, StepId::Stream), none);
  ASSERT_EQ(net.forwarded.size(), 1u);
  EXPECT_EQ(net.forwarded[0].second.name, "DL-Data");
  auto wrong = wire::encode_gtpu(ap.teid_new ^ 1, wire::data_packet(ap.dn_address, ap.home_address, 2));
  EXPECT_THROW(upf.handle(msg(*t.isgw(SliceLabel::Previous), isgw_new, "G-PDU", wrong, StepId::Stream),
                          none),
               ProtocolError);
}

TEST(Divert, Decisions) {
  auto c = default_config();
  const auto& t = c.topology;
  NodeId prev_isgw = *t.isgw(SliceLabel::Previous);
  IsgwTunnel tun{1, 2, *t.isgw(SliceLabel::New), IsgwTunnel::State::Pending};
  EXPECT_EQ(divert_downlink(t, prev_isgw, false, tun).action, DivertAction::Buffer);
  tun.state = IsgwTunnel::State::Established;
  auto d = divert_downlink(t, prev_isgw, false, tun);
  EXPECT_EQ(d.action, DivertAction::Encapsulate);
  EXPECT_EQ(d.next, tun.peer);
  tun.state = IsgwTunnel::State::Released;
  EXPECT_EQ(divert_downlink(t, prev_isgw, false, tun).action, DivertAction::Drop);
  EXPECT_EQ(divert_downlink(t, prev_isgw, true, std::nullopt).action, DivertAction::Drop);
  d = divert_downlink(t, t.upf_chain_prev[2], false, std::nullopt);
  EXPECT_EQ(d.next, t.upf_chain_prev[1]);
  d = divert_downlink(t, t.upf_chain_new[0], false, std::nullopt);
  EXPECT_EQ(d.next, t.ue);
}

TEST(Addresses, PlanIsDeterministicAndDistinct) {
  auto c = default_config();
  auto a = make_address_plan(c), b = make_address_plan(c);
  EXPECT_EQ(a.home_address, b.home_address);
  EXPECT_EQ(a.teid_prev, b.teid_prev);
  EXPECT_NE(a.teid_prev, a.teid_new);
  EXPECT_NE(a.prefix_prev, a.prefix_new);
  EXPECT_TRUE(wire::has_prefix(a.home_address, a.prefix_prev));
}

TEST(Run, ExecutesExactlyTheSchemeSteps) {
  for (auto s : kAllSchemes) {
    auto r = run(s);
    std::set<StepId> seen;
    for (const auto& rec : r.trace.records)
      if (rec.kind == sim::TraceKind::Send && rec.step != StepId::Stream) seen.insert(rec.step);
    auto want = analytic::scheme_steps(s);
    EXPECT_EQ(seen, std::set<StepId>(want.begin(), want.end())) << scheme_name(s);
    EXPECT_EQ(r.trace.marks.size(), 4u);
  }
}

TEST(Run, StepsRespectDependencies) {
  for (auto s : kAllSchemes) {
    auto r = run(s);
    for (const auto& [step, pre] : step_prerequisites(s))
      for (auto p : pre) EXPECT_GE(r.steps.at(step).started, r.steps.at(p).done);
  }
}

TEST(Run, GtpUpdatesPreviousSlice) {
  auto r = run(SchemeKind::Gtpv1U);
  auto c = default_config();
  const auto& t = c.topology;
  auto upd = sends(r, "Nsmf_PDUSession_UpdateSMContext_Request");
  EXPECT_TRUE(std::any_of(upd.begin(), upd.end(), [&](auto* rec) {
    return rec->peer == t.smf_prev && rec->step == StepId::D;
  }));
  auto g = sends(r, "G-PDU");
  ASSERT_FALSE(g.empty());
  for (auto* rec : g) {
    EXPECT_EQ(rec->node, *t.isgw(SliceLabel::Previous));
    EXPECT_EQ(rec->peer, *t.isgw(SliceLabel::New));
    EXPECT_NO_THROW(wire::decode_gtpu(rec->payload));
  }
}

TEST(Run, MipTestInitsTakeTheirSlices) {
  auto r = run(SchemeKind::Mipv6RrBu);
  auto c = default_config();
  auto hoti = sends(r, "HoTI");
  auto coti = sends(r, "CoTI");
  ASSERT_FALSE(hoti.empty());
  ASSERT_FALSE(coti.empty());
  EXPECT_EQ(hoti.front()->peer, c.topology.home_amf);
  EXPECT_EQ(hoti.front()->link, LinkClass::RanHamf);
  EXPECT_EQ(coti.front()->peer, c.topology.amf);
  for (auto* rec : coti)
    if (rec->link == LinkClass::GwDn) EXPECT_EQ(rec->node, c.topology.upf_chain_new.back());
  for (auto* rec : hoti)
    if (rec->link == LinkClass::GwDn) EXPECT_EQ(rec->node, c.topology.home_gw);
}

TEST(Run, BaselineHasNoMobilityOrTunnel) {
  auto r = run(SchemeKind::Baseline3gpp);
  for (const char* n : {"G-PDU", "HoTI", "CoTI", "HoT", "CoT", "BU", "BAck"})
    EXPECT_TRUE(sends(r, n).empty()) << n;
}

TEST(Run, UeSendsBuOnlyAfterBothTests) {
  for (auto s : {SchemeKind::Mipv6RrBu, SchemeKind::HybridMipv6Gtp}) {
    auto r = run(s);
    auto c = default_config();
    Micros hot{-1}, cot{-1}, bu{-1};
    for (const auto& rec : r.trace.records) {
      if (rec.node != c.topology.ue) continue;
      if (rec.kind == sim::TraceKind::Process && rec.name == "HoT") hot = rec.at;
      if (rec.kind == sim::TraceKind::Process && rec.name == "CoT") cot = rec.at;
      if (rec.kind == sim::TraceKind::Send && rec.name == "BU" && bu < Micros{0}) bu = rec.at;
    }
    ASSERT_GE(hot, Micros{0});
    ASSERT_GE(cot, Micros{0});
    EXPECT_GE(bu, std::max(hot, cot));
  }
}

TEST(Run, HybridStopsTunnellingAfterRelease) {
  auto r = run(SchemeKind::HybridMipv6Gtp);
  Micros released = r.steps.at(StepId::Release).done;
  for (auto* rec : sends(r, "G-PDU")) EXPECT_LE(rec->at, released);
  EXPECT_EQ(r.stream.lost, 0u);
}

TEST(Run, TunnelledPayloadArrivesIntact) {
  auto r = run(SchemeKind::Gtpv1U);
  auto c = default_config();
  std::map<std::uint32_t, wire::Bytes> emitted;
  std::set<std::uint32_t> checked;
  for (const auto& rec : r.trace.records) {
    if (rec.kind != sim::TraceKind::Send || rec.name != "DL-Data" || rec.step != StepId::Stream)
      continue;
    auto seq = wire::parse_data_packet(rec.payload).seq;
    if (rec.node == c.topology.dn) emitted[seq] = rec.payload;
    if (rec.peer == c.topology.ue) {
      EXPECT_EQ(rec.payload, emitted.at(seq));
      checked.insert(seq);
    }
  }
  EXPECT_GT(r.stream.tunnelled, 0u);
  EXPECT_EQ(checked.size(), emitted.size());
}

TEST(Run, MipDeliversViaPreviousSliceBeforeBinding) {
  auto r = run(SchemeKind::Mipv6RrBu);
  EXPECT_GT(r.stream.via_prev, 0u);
  EXPECT_GT(r.stream.via_new, 0u);
  EXPECT_EQ(r.stream.lost, 0u);
  EXPECT_EQ(r.stream.tunnelled, 0u);
}

TEST(Run, ZeroLossForTunnellingSchemes) {
  for (auto s : {SchemeKind::Gtpv1U, SchemeKind::HybridMipv6Gtp}) {
    auto r = run(s);
    EXPECT_GT(r.stream.window_emitted, 0u);
    EXPECT_TRUE(r.stream.window_lossless()) << scheme_name(s);
    EXPECT_EQ(r.stream.duplicates, 0u);
  }
}

TEST(Run, BaselineBreaksBeforeMaking) {
  auto r = run(SchemeKind::Baseline3gpp);
  EXPECT_GT(r.stream.lost, 0u);
}

TEST(Run, MatchesModelOnRandomConfigs) {
  testgen::Rng rng(51);
  for (int i = 0; i < 40; ++i) {
    auto c = testgen::random_config(rng, kAllSchemes[i % 4]);
    c.analytic.mipv6_form = Mipv6Form::Corrected;
    auto r = run_scheme(c);
    auto m = analytic::evaluate(c);
    EXPECT_EQ(r.metrics.isho_delay, m.isho_delay) << i;
    EXPECT_EQ(r.metrics.isho_interval, m.isho_interval) << i;
    EXPECT_NEAR(r.metrics.signalling_cost, m.signalling_cost, 1e-9) << i;
  }
}

TEST(Run, Deterministic) {
  for (auto s : kAllSchemes) EXPECT_EQ(run(s).trace.log(), run(s).trace.log());
}

TEST(Run, ProtocolViolationCarriesSnapshot) {
  auto dir = std::filesystem::temp_directory_path() / "isho_proto_bad_seq";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir / "common");
  std::ofstream(dir / "common" / "C.seq")
      << "SMF@new, AMF, sba_nf_nf, Namf_Communication_IPv6PrefixAdvertisement\n"
         "AMF, UE, ue_amf, IPv6_Prefix_Advertisement\n"
         "AMF, UE, ue_amf, IPv6_Prefix_Advertisement, after=1\n";
  auto c = default_config();
  auto lib = analytic::SequenceLibrary::load(dir);
  try {
    run_scheme(c, lib);
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_NE(std::string(e.what()).find("unexpected-message"), std::string::npos);
    EXPECT_NE(e.snapshot.find("UE phase=AddressConfigured"), std::string::npos) << e.snapshot;
  }
}

TEST(Pcap, OneRecordPerSend) {
  auto r = run(SchemeKind::HybridMipv6Gtp);
  auto path = (std::filesystem::temp_directory_path() / "isho_run.pcap").string();
  write_pcap(r, path);
  std::size_t n = 0;
  for (const auto& rec : r.trace.records) n += rec.kind == sim::TraceKind::Send;
  std::ifstream in(path, std::ios::binary);
  wire::Bytes b((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t pos = 24, records = 0;
  while (pos + 16 <= b.size()) {
    std::size_t len = b[pos + 8] | b[pos + 9] << 8 | b[pos + 10] << 16;
    auto pkt = wire::Bytes(b.begin() + static_cast<long>(pos + 16),
                           b.begin() + static_cast<long>(pos + 16 + len));
    EXPECT_NO_THROW(wire::parse_ipv6(pkt));
    pos += 16 + len;
    ++records;
  }
  EXPECT_EQ(pos, b.size());
  EXPECT_EQ(records, n);
}
