#include "isho/protocols/agents.hpp"

#include <fmt/format.h>

#include "isho/protocols/payload.hpp"
#include "isho/wire/gtpu.hpp"

namespace isho::proto {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

wire::Ipv6Prefix slice_prefix(std::uint32_t snssai) {
  wire::Ipv6Prefix p;
  p.prefix = {0x20, 0x01, 0x0d, 0xb8,
              static_cast<std::uint8_t>(snssai >> 24), static_cast<std::uint8_t>(snssai >> 16),
              static_cast<std::uint8_t>(snssai >> 8), static_cast<std::uint8_t>(snssai)};
  p.length = 64;
  return p;
}

std::string prefix_string(const wire::Ipv6Prefix& p) {
  return fmt::format("{}/{}", wire::to_string(p.prefix), p.length);
}

wire::Authenticator bu_authenticator(std::uint64_t home_token, std::uint64_t careof_token,
                                     std::uint16_t seq) {
  wire::Authenticator a{};
  std::uint64_t x = home_token ^ careof_token;
  for (int i = 0; i < 8; ++i) a[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(x >> (56 - 8 * i));
  a[8] = static_cast<std::uint8_t>(seq >> 8);
  a[9] = static_cast<std::uint8_t>(seq);
  return a;
}

std::uint32_t field_u32(const Fields& f, const std::string& key) {
  auto it = f.find(key);
  if (it == f.end()) return 0;
  return static_cast<std::uint32_t>(std::stoul(it->second));
}

}  // namespace

AddressPlan make_address_plan(const RunConfig& c) {
  AddressPlan ap;
  ap.prefix_prev = slice_prefix(c.placement.snssai_prev);
  ap.prefix_new = slice_prefix(c.placement.snssai_new);
  std::uint64_t s = splitmix(c.seed);
  ap.interface_id = s | 1;  // never zero
  ap.home_address = wire::autoconfigure_address(ap.prefix_prev, ap.interface_id);
  ap.dn_address = *wire::parse_address("2001:db8:ffff:ffff::1");
  s = splitmix(s);
  ap.teid_prev = static_cast<std::uint32_t>(s) | 1;
  ap.teid_new = static_cast<std::uint32_t>(s >> 32) | 2;
  if (ap.teid_new == ap.teid_prev) ap.teid_new ^= 4;
  return ap;
}

wire::Ipv6Address node_address(NodeId id) {
  wire::Ipv6Address a{0xfd};
  std::uint32_t v = id + 1;
  a[12] = static_cast<std::uint8_t>(v >> 24);
  a[13] = static_cast<std::uint8_t>(v >> 16);
  a[14] = static_cast<std::uint8_t>(v >> 8);
  a[15] = static_cast<std::uint8_t>(v);
  return a;
}

std::string_view phase_name(UeAgent::Phase p) {
  switch (p) {
    case UeAgent::Phase::Connected: return "Connected";
    case UeAgent::Phase::RequestSent: return "RequestSent";
    case UeAgent::Phase::AddressConfigured: return "AddressConfigured";
    case UeAgent::Phase::RrInProgress: return "RrInProgress";
    case UeAgent::Phase::AwaitBAck: return "AwaitBAck";
    case UeAgent::Phase::Bound: return "Bound";
  }
  return "?";
}

std::string_view tunnel_state_name(IsgwTunnel::State s) {
  switch (s) {
    case IsgwTunnel::State::Pending: return "Pending";
    case IsgwTunnel::State::Established: return "Established";
    case IsgwTunnel::State::Released: return "Released";
  }
  return "?";
}

void Agent::unexpected(const sim::Message& in, const std::string& why) const {
  throw ProtocolError(fmt::format("unexpected-message: {} got {} (step {}): {}",
                                  topo().node(self_).name, in.name, step_name(in.step), why));
}

void Agent::refuse(StepId step, const std::string& why) const {
  throw ProtocolError(fmt::format("unexpected-message: {} cannot start step {}: {}",
                                  topo().node(self_).name, step_name(step), why));
}

// ---- UE ----

UeAgent::UeAgent(NodeId self, Network& net, const AddressPlan& ap, std::uint64_t seed)
    : Agent(self, net),
      home_address_(ap.home_address),
      dn_address_(ap.dn_address),
      interface_id_(ap.interface_id),
      rng_(splitmix(seed ^ 0x7565ULL)) {}

void UeAgent::handle(const sim::Message& in, std::vector<Outgoing>&) {
  const auto& n = in.name;
  if (n == "IPv6_Prefix_Advertisement" || n == "Router_Advertisement") {
    if (phase_ != Phase::RequestSent)
      unexpected(in, fmt::format("no session request pending (phase {})", phase_name(phase_)));
    auto f = decode_fields(in.payload);
    if (!f.count("prefix")) unexpected(in, "advertisement carries no prefix");
    care_of_ = wire::autoconfigure_address(wire::parse_prefix(f["prefix"]), interface_id_);
    phase_ = Phase::AddressConfigured;
  } else if (n == "HoT" || n == "CoT") {
    if (phase_ != Phase::RrInProgress)
      unexpected(in, fmt::format("no return routability in progress (phase {})", phase_name(phase_)));
    auto m = wire::decode_mip(wire::parse_ipv6(in.payload).payload);
    if (auto* h = std::get_if<wire::HomeTest>(&m); h && n == "HoT") {
      if (h->cookie != hoti_cookie_) unexpected(in, "HoT does not echo the HoTI cookie");
      home_token_ = h->token;
      home_nonce_ = h->nonce_index;
    } else if (auto* c = std::get_if<wire::CareOfTest>(&m); c && n == "CoT") {
      if (c->cookie != coti_cookie_) unexpected(in, "CoT does not echo the CoTI cookie");
      careof_token_ = c->token;
      careof_nonce_ = c->nonce_index;
    } else {
      unexpected(in, "payload is not the matching test message");
    }
  } else if (n == "BAck") {
    if (phase_ != Phase::AwaitBAck || !pending_bu_)
      unexpected(in, fmt::format("no binding update outstanding (phase {})", phase_name(phase_)));
    auto m = wire::decode_mip(wire::parse_ipv6(in.payload).payload);
    auto* ack = std::get_if<wire::BindingAck>(&m);
    if (!ack) unexpected(in, "payload is not a binding acknowledgement");
    if (!wire::acknowledges(*ack, *pending_bu_))
      unexpected(in, fmt::format("BAck sequence {} does not match BU {}", ack->sequence,
                                 pending_bu_->sequence));
    if (ack->status >= 128) unexpected(in, fmt::format("binding rejected, status {}", ack->status));
    phase_ = Phase::Bound;
  } else if (n == "N2_PDU_Session_Resource_Setup_Request" || n == "EAP_Request") {
    if (phase_ == Phase::Connected) unexpected(in, "no session request pending");
    if (n[0] == 'N') ran_setup_ = true;
  } else if (n == "DL-Data") {
    auto d = wire::parse_data_packet(in.payload);
    bool mine = d.dst == home_address_ || (care_of_ && d.dst == *care_of_);
    if (!mine) unexpected(in, fmt::format("downlink for {}, not an address of this UE",
                                          wire::to_string(d.dst)));
    if (in.step == StepId::Stream) net_.delivered(in, d.seq);
  }
}

void UeAgent::start_step(StepId step, std::vector<Outgoing>& planned) {
  switch (step) {
    case StepId::A: {
      if (phase_ != Phase::Connected) refuse(step, "a session request is already pending");
      bool baseline = cfg().scheme == SchemeKind::Baseline3gpp;
      auto payload = encode_fields({{"request_type", baseline ? "Initial" : "ExistingSessionTakeover"},
                                    {"snssai", std::to_string(cfg().placement.snssai_new)},
                                    {"pdu_session_id", "1"}});
      for (auto& o : planned) o.payload = payload;
      phase_ = Phase::RequestSent;
      break;
    }
    case StepId::D:
      if (!care_of_) refuse(step, "no new address configured");
      for (auto& o : planned) o.payload = encode_fields({{"address", wire::to_string(*care_of_)}});
      break;
    case StepId::E:
      if (phase_ != Phase::AddressConfigured || !care_of_)
        refuse(step, fmt::format("phase {} is not AddressConfigured", phase_name(phase_)));
      hoti_cookie_ = rng_();
      coti_cookie_ = rng_();
      for (auto& o : planned) {
        if (o.name == "CoTI")
          o.payload = wire::ipv6_packet(*care_of_, dn_address_, wire::kIpProtoMobility,
                                        wire::encode_mip(wire::CareOfTestInit{coti_cookie_}));
        else if (o.name == "HoTI")
          o.payload = wire::ipv6_packet(home_address_, dn_address_, wire::kIpProtoMobility,
                                        wire::encode_mip(wire::HomeTestInit{hoti_cookie_}));
      }
      phase_ = Phase::RrInProgress;
      break;
    case StepId::I: {
      if (phase_ != Phase::RrInProgress || !home_token_ || !careof_token_)
        refuse(step, "binding update before both HoT and CoT arrived");
      wire::BindingUpdate bu;
      bu.sequence = ++bu_sequence_;
      bu.flags = wire::BindingUpdate::kAck;
      bu.lifetime = 0x0010;
      bu.home_nonce_index = home_nonce_;
      bu.careof_nonce_index = careof_nonce_;
      bu.authenticator = bu_authenticator(*home_token_, *careof_token_, bu.sequence);
      pending_bu_ = bu;
      for (auto& o : planned)
        o.payload = wire::ipv6_packet(*care_of_, dn_address_, wire::kIpProtoMobility,
                                      wire::encode_mip(bu));
      phase_ = Phase::AwaitBAck;
      break;
    }
    case StepId::J:
      if (!care_of_) refuse(step, "no new address configured");
      for (auto& o : planned) o.payload = wire::data_packet(*care_of_, dn_address_, 0);
      break;
    default:
      break;
  }
}

std::string UeAgent::snapshot() const {
  return fmt::format("UE phase={} home={} care_of={} hot={} cot={} bu_seq={} ran_setup={}",
                     phase_name(phase_), wire::to_string(home_address_),
                     care_of_ ? wire::to_string(*care_of_) : "-", home_token_.has_value(),
                     careof_token_.has_value(), bu_sequence_, ran_setup_);
}

// ---- AMF / H-AMF ----

void AmfAgent::handle(const sim::Message& in, std::vector<Outgoing>&) {
  if (in.name == "PDU_Session_Establishment_Request") {
    if (takeover_requested_) unexpected(in, "duplicate session request");
    auto f = decode_fields(in.payload);
    bool baseline = cfg().scheme == SchemeKind::Baseline3gpp;
    if (f["request_type"] != (baseline ? "Initial" : "ExistingSessionTakeover"))
      unexpected(in, fmt::format("request type '{}' does not fit the scheme", f["request_type"]));
    takeover_requested_ = true;
  } else if (in.name == "Nsmf_PDUSession_BAck") {
    back_seen_ = true;
    // The hybrid scheme tears down the tunnel once the binding is acknowledged.
    if (cfg().scheme == SchemeKind::HybridMipv6Gtp && !release_sent_ && self_ == topo().amf)
      net_.start_step(StepId::Release);
  }
}

void AmfAgent::start_step(StepId step, std::vector<Outgoing>& planned) {
  if (step == StepId::Release) {
    if (!back_seen_) refuse(step, "no binding acknowledgement seen");
    release_sent_ = true;
    for (auto& o : planned) o.payload = encode_fields({{"pdu_session_id", "1"}, {"cause", "isho"}});
  }
}

std::string AmfAgent::snapshot() const {
  return fmt::format("{} takeover_requested={} back_seen={} release_sent={}",
                     topo().node(self_).name, takeover_requested_, back_seen_, release_sent_);
}

// ---- SMF ----

SmfAgent::SmfAgent(NodeId self, Network& net, const AddressPlan& ap,
                   std::optional<SmfSessionContext> existing)
    : Agent(self, net), ap_(ap), session_(std::move(existing)) {}

void SmfAgent::require_session(const std::string& what) const {
  if (!session_ || session_->released)
    throw ProtocolError(fmt::format("unexpected-message: {} has no active session for {}",
                                    topo().node(self_).name, what));
}

namespace {

void fill_smf(const Topology& topo, NodeId self, const AddressPlan& ap,
              const SmfSessionContext* s, Outgoing& o) {
  const auto& n = o.name;
  bool prev_side = self == topo.smf_prev;
  std::uint32_t local = prev_side ? ap.teid_prev : ap.teid_new;
  std::uint32_t remote = prev_side ? ap.teid_new : ap.teid_prev;
  std::string seid = std::to_string(s ? s->session_id : 0);
  if (n == "N4_Session_Establishment_Request" || n == "N4_Session_Release_Request") {
    o.payload = encode_fields({{"seid", seid}});
  } else if (n == "N4_Session_Modification_Request") {
    o.payload = encode_fields({{"seid", seid},
                               {"teid_local", std::to_string(local)},
                               {"teid_remote", std::to_string(remote)}});
  } else if ((n == "Namf_Communication_IPv6PrefixAdvertisement" || n == "Router_Advertisement") &&
             s && s->allocated_prefix) {
    o.payload = encode_fields({{"prefix", prefix_string(*s->allocated_prefix)}});
  }
}

}  // namespace

void SmfAgent::handle(const sim::Message& in, std::vector<Outgoing>& planned) {
  const auto& n = in.name;
  if (n == "Nsmf_PDUSession_CreateSMContext_Request") {
    if (session_) unexpected(in, "a session context already exists");
    SmfSessionContext s;
    auto f = decode_fields(in.payload);
    s.request_type = f["request_type"] == "ExistingSessionTakeover"
                         ? SmfSessionContext::RequestType::ExistingSessionTakeover
                         : SmfSessionContext::RequestType::Initial;
    session_ = s;
  } else if (n.rfind("Nudm_", 0) == 0) {
    require_session(n);
  } else if (n == "Npcf_SMPolicyControl_Create_Response") {
    require_session(n);
    session_->policy_assoc = true;
  } else if (n == "N4_Session_Establishment_Response") {
    require_session(n);
    session_->upf_bindings.insert(in.src);
  } else if (n == "Nsmf_PDUSession_UpdateSMContext_Request") {
    require_session(n);
  } else if (n == "Nsmf_PDUSession_ReleaseSMContext_Request") {
    require_session(n);
    session_->released = true;
  }
  for (auto& o : planned) fill_smf(topo(), self_, ap_, session_ ? &*session_ : nullptr, o);
}

void SmfAgent::start_step(StepId step, std::vector<Outgoing>& planned) {
  require_session(fmt::format("step {}", step_name(step)));
  if (step == StepId::C || step == StepId::StdIpv6Config) {
    if (!session_->policy_assoc) refuse(step, "no policy association");
    for (NodeId u : topo().upf_chain_new)
      if (!session_->upf_bindings.count(u))
        refuse(step, fmt::format("no N4 session with {}", topo().node(u).name));
    session_->allocated_prefix = ap_.prefix_new;
  }
  for (auto& o : planned) fill_smf(topo(), self_, ap_, &*session_, o);
}

std::string SmfAgent::snapshot() const {
  if (!session_) return fmt::format("{} no session", topo().node(self_).name);
  return fmt::format("{} session={} type={} policy={} n4={} prefix={} released={}",
                     topo().node(self_).name, session_->session_id,
                     session_->request_type == SmfSessionContext::RequestType::Initial
                         ? "Initial"
                         : "ExistingSessionTakeover",
                     session_->policy_assoc, session_->upf_bindings.size(),
                     session_->allocated_prefix ? prefix_string(*session_->allocated_prefix) : "-",
                     session_->released);
}

// ---- UPF ----

DivertDecision divert_downlink(const Topology& topo, NodeId at, bool session_released,
                               const std::optional<IsgwTunnel>& tunnel) {
  if (session_released) return {DivertAction::Drop, std::nullopt};
  auto pos = topo.chain_position(at);
  if (tunnel && pos && pos->first == SliceLabel::Previous && topo.isgw(SliceLabel::Previous) == at) {
    switch (tunnel->state) {
      case IsgwTunnel::State::Pending: return {DivertAction::Buffer, std::nullopt};
      case IsgwTunnel::State::Established: return {DivertAction::Encapsulate, tunnel->peer};
      case IsgwTunnel::State::Released: return {DivertAction::Drop, std::nullopt};
    }
  }
  if (!pos || pos->second == 0) return {DivertAction::Forward, topo.ue};
  return {DivertAction::Forward, topo.chain(pos->first)[static_cast<std::size_t>(pos->second - 1)]};
}

UpfAgent::UpfAgent(NodeId self, Network& net, const AddressPlan& ap, bool session_installed)
    : Agent(self, net), ap_(ap), session_installed_(session_installed) {}

wire::Bytes UpfAgent::encapsulate(const wire::Bytes& inner) const {
  return wire::encode_gtpu(tunnel_->remote_teid, inner);
}

void UpfAgent::send_down(wire::Bytes packet, std::uint32_t) {
  auto d = divert_downlink(topo(), self_, false, std::nullopt);
  net_.forward(self_, Outgoing{*d.next, "DL-Data", std::move(packet), StepId::Stream, -1});
}

void UpfAgent::downlink(const sim::Message& in) {
  if (!session_installed_ && !session_released_) unexpected(in, "downlink without an N4 session");
  auto d = divert_downlink(topo(), self_, session_released_, tunnel_);
  switch (d.action) {
    case DivertAction::Drop:
      net_.dropped(in, session_released_ ? "session released" : "tunnel released");
      break;
    case DivertAction::Buffer:
      buffer_.push_back(in.payload);
      break;
    case DivertAction::Encapsulate:
      net_.forward(self_, Outgoing{*d.next, "G-PDU", encapsulate(in.payload), StepId::Stream, -1});
      break;
    case DivertAction::Forward:
      net_.forward(self_, Outgoing{*d.next, "DL-Data", in.payload, StepId::Stream, -1});
      break;
  }
}

void UpfAgent::handle(const sim::Message& in, std::vector<Outgoing>& planned) {
  const auto& n = in.name;
  auto isgw_new = topo().isgw(SliceLabel::New);
  auto isgw_prev = topo().isgw(SliceLabel::Previous);
  if (n == "N4_Session_Establishment_Request") {
    session_installed_ = true;
    if (isgw_new == self_)
      tunnel_ = IsgwTunnel{ap_.teid_new, ap_.teid_prev, *isgw_prev, IsgwTunnel::State::Pending};
  } else if (n == "N4_Session_Modification_Request") {
    if (isgw_prev == self_ && in.src == topo().smf_prev) {
      if (tunnel_) unexpected(in, "tunnel already configured");
      auto f = decode_fields(in.payload);
      tunnel_ = IsgwTunnel{ap_.teid_prev, field_u32(f, "teid_remote"), *isgw_new,
                           IsgwTunnel::State::Pending};
    } else if (isgw_new == self_) {
      if (!tunnel_ || tunnel_->state != IsgwTunnel::State::Pending)
        unexpected(in, "no pending tunnel to establish");
      tunnel_->state = IsgwTunnel::State::Established;
    } else if (!session_installed_) {
      unexpected(in, "no N4 session to modify");
    }
  } else if (n == "N4_Session_Release_Request") {
    if (isgw_prev == self_) {
      if (!tunnel_) unexpected(in, "no tunnel to release");
      tunnel_->state = IsgwTunnel::State::Released;
      for (std::size_t i = 0; i < buffer_.size(); ++i) net_.dropped(in, "buffered at release");
      buffer_.clear();
    } else {
      session_released_ = true;
    }
  } else if (n == "G-PDU") {
    if (!tunnel_ || tunnel_->state != IsgwTunnel::State::Established)
      unexpected(in, fmt::format("G-PDU on a tunnel that is {}",
                                 tunnel_ ? tunnel_state_name(tunnel_->state) : "absent"));
    auto pkt = wire::decode_gtpu(in.payload);
    if (pkt.header.teid != tunnel_->local_teid)
      unexpected(in, fmt::format("TEID {} does not match local TEID {}", pkt.header.teid,
                                 tunnel_->local_teid));
    if (in.step == StepId::Stream) {
      send_down(std::move(pkt.inner), 0);
    } else {
      for (auto& o : planned) o.payload = pkt.inner;
    }
  } else if (n == "DL-Data") {
    if (in.step == StepId::Stream) {
      downlink(in);
    } else if (!session_installed_) {
      unexpected(in, "downlink without an N4 session");
    }
  }
}

void UpfAgent::start_step(StepId step, std::vector<Outgoing>& planned) {
  if (step == StepId::H) {
    if (!tunnel_ || tunnel_->state != IsgwTunnel::State::Pending)
      refuse(step, "no pending tunnel towards the new slice");
    tunnel_->state = IsgwTunnel::State::Established;
    auto head = wire::data_packet(ap_.dn_address, ap_.home_address, 0);
    for (auto& o : planned) o.payload = encapsulate(head);
    while (!buffer_.empty()) {
      net_.forward(self_,
                   Outgoing{tunnel_->peer, "G-PDU", encapsulate(buffer_.front()), StepId::Stream, -1});
      buffer_.pop_front();
    }
  }
}

std::string UpfAgent::snapshot() const {
  std::string t = "-";
  if (tunnel_)
    t = fmt::format("{}(local={},remote={})", tunnel_state_name(tunnel_->state),
                    tunnel_->local_teid, tunnel_->remote_teid);
  return fmt::format("{} session={} released={} tunnel={} buffered={}", topo().node(self_).name,
                     session_installed_, session_released_, t, buffer_.size());
}

// ---- DN ----

DnAgent::DnAgent(NodeId self, Network& net, const AddressPlan& ap, std::uint64_t seed)
    : Agent(self, net), ap_(ap), secret_(splitmix(seed ^ 0x646eULL)) {}

std::uint64_t DnAgent::token(std::uint64_t cookie, std::uint16_t nonce, int kind) const {
  return splitmix(secret_ ^ splitmix(cookie) ^ (static_cast<std::uint64_t>(nonce) << 1 | kind));
}

void DnAgent::handle(const sim::Message& in, std::vector<Outgoing>& planned) {
  const auto& n = in.name;
  if (n == "HoTI" || n == "CoTI") {
    auto ip = wire::parse_ipv6(in.payload);
    auto m = wire::decode_mip(ip.payload);
    wire::MipMessage reply;
    ++nonce_index_;
    if (auto* h = std::get_if<wire::HomeTestInit>(&m); h && n == "HoTI") {
      home_token_ = token(h->cookie, nonce_index_, 0);
      reply = wire::HomeTest{nonce_index_, h->cookie, *home_token_};
    } else if (auto* c = std::get_if<wire::CareOfTestInit>(&m); c && n == "CoTI") {
      careof_token_ = token(c->cookie, nonce_index_, 1);
      reply = wire::CareOfTest{nonce_index_, c->cookie, *careof_token_};
    } else {
      unexpected(in, "payload is not the matching test init");
    }
    auto bytes = wire::ipv6_packet(ap_.dn_address, ip.src, wire::kIpProtoMobility,
                                   wire::encode_mip(reply));
    for (auto& o : planned) o.payload = bytes;
  } else if (n == "BU") {
    auto ip = wire::parse_ipv6(in.payload);
    auto m = wire::decode_mip(ip.payload);
    auto* bu = std::get_if<wire::BindingUpdate>(&m);
    if (!bu) unexpected(in, "payload is not a binding update");
    if (!home_token_ || !careof_token_) unexpected(in, "binding update before return routability");
    if (bu->authenticator != bu_authenticator(*home_token_, *careof_token_, bu->sequence))
      unexpected(in, "binding update fails authorization");
    cache_[ap_.home_address] = Binding{ip.src, bu->lifetime, bu->sequence};
    wire::BindingAck ack{0, false, bu->sequence, bu->lifetime};
    auto bytes = wire::ipv6_packet(ap_.dn_address, ip.src, wire::kIpProtoMobility,
                                   wire::encode_mip(ack));
    for (auto& o : planned) o.payload = bytes;
  } else if (n == "EAP_Response") {
    for (auto& o : planned) o.payload = encode_fields({{"eap", "success"}});
  } else if (n == "UL-Data") {
    auto d = wire::parse_data_packet(in.payload);
    learned_address_ = d.src;
    for (auto& o : planned) o.payload = wire::data_packet(ap_.dn_address, d.src, 0);
  }
}

void DnAgent::start_step(StepId step, std::vector<Outgoing>& planned) {
  if (step == StepId::J) {
    auto it = cache_.find(ap_.home_address);
    if (it == cache_.end()) refuse(step, "no binding for the UE's home address");
    for (auto& o : planned)
      o.payload = wire::data_packet(ap_.dn_address, it->second.care_of_address, 0);
  }
}

std::pair<wire::Ipv6Address, NodeId> DnAgent::route() const {
  const auto& t = topo();
  if (auto it = cache_.find(ap_.home_address); it != cache_.end())
    return {it->second.care_of_address, t.upf_chain_new.back()};
  if (learned_address_) return {*learned_address_, t.upf_chain_new.back()};
  return {ap_.home_address, t.upf_chain_prev.back()};
}

std::uint32_t DnAgent::emit_stream_packet() {
  std::uint32_t seq = next_seq_++;
  auto [addr, hop] = route();
  net_.forward(self_, Outgoing{hop, "DL-Data", wire::data_packet(ap_.dn_address, addr, seq),
                               StepId::Stream, -1});
  return seq;
}

std::string DnAgent::snapshot() const {
  auto [addr, hop] = route();
  return fmt::format("DN bindings={} hot_issued={} cot_issued={} routing_to={} via {} emitted={}",
                     cache_.size(), home_token_.has_value(), careof_token_.has_value(),
                     wire::to_string(addr), topo().node(hop).name, next_seq_ - 1);
}

// ---- PCF, UDM, gNB ----

void PassiveAgent::handle(const sim::Message&, std::vector<Outgoing>&) { ++handled_; }

void PassiveAgent::start_step(StepId, std::vector<Outgoing>&) {}

std::string PassiveAgent::snapshot() const {
  return fmt::format("{} handled={}", topo().node(self_).name, handled_);
}

}  // namespace isho::proto
