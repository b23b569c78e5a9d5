#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "isho/core/config.hpp"
#include "isho/simkernel/kernel.hpp"
#include "isho/wire/ipv6.hpp"
#include "isho/wire/mip.hpp"

namespace isho::proto {

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  std::string snapshot;
};

// A message an agent is about to send. Planned sends come from the step's
// message sequence; the agent fills in the payload.
struct Outgoing {
  NodeId dst = 0;
  std::string name;
  wire::Bytes payload;
  StepId step = StepId::Stream;
  int ref = -1;
};

// What agents may ask of the run they are part of.
class Network {
 public:
  virtual ~Network() = default;
  virtual const RunConfig& config() const = 0;
  virtual Micros now() const = 0;
  // Sends outside any step plan (user-plane forwarding).
  virtual void forward(NodeId from, Outgoing out) = 0;
  virtual void start_step(StepId s) = 0;
  virtual void dropped(const sim::Message& m, const std::string& reason) = 0;
  virtual void delivered(const sim::Message& m, std::uint32_t seq) = 0;
};

// Addresses used by the run; all derived from the configuration.
struct AddressPlan {
  wire::Ipv6Prefix prefix_prev;
  wire::Ipv6Prefix prefix_new;
  wire::Ipv6Address home_address{};    // UE address in the previous slice
  wire::Ipv6Address dn_address{};
  std::uint64_t interface_id = 0;
  std::uint32_t teid_prev = 0;  // local TEID of the previous-slice ISGW-UPF
  std::uint32_t teid_new = 0;   // local TEID of the new-slice ISGW-UPF
};

AddressPlan make_address_plan(const RunConfig& c);

wire::Ipv6Address node_address(NodeId id);

class Agent {
 public:
  Agent(NodeId self, Network& net) : self_(self), net_(net) {}
  virtual ~Agent() = default;

  // `in` has finished processing here; `planned` are the sends its processing
  // triggers in the current step plan.
  virtual void handle(const sim::Message& in, std::vector<Outgoing>& planned) = 0;
  // This node sends the first messages of a step.
  virtual void start_step(StepId step, std::vector<Outgoing>& planned) = 0;
  virtual std::string snapshot() const = 0;

  NodeId id() const { return self_; }

 protected:
  [[noreturn]] void unexpected(const sim::Message& in, const std::string& why) const;
  [[noreturn]] void refuse(StepId step, const std::string& why) const;
  const RunConfig& cfg() const { return net_.config(); }
  const Topology& topo() const { return net_.config().topology; }

  NodeId self_;
  Network& net_;
};

class UeAgent : public Agent {
 public:
  enum class Phase { Connected, RequestSent, AddressConfigured, RrInProgress, AwaitBAck, Bound };

  UeAgent(NodeId self, Network& net, const AddressPlan& ap, std::uint64_t seed);
  void handle(const sim::Message& in, std::vector<Outgoing>& planned) override;
  void start_step(StepId step, std::vector<Outgoing>& planned) override;
  std::string snapshot() const override;

  Phase phase() const { return phase_; }
  const wire::Ipv6Address& home_address() const { return home_address_; }
  const std::optional<wire::Ipv6Address>& care_of_address() const { return care_of_; }
  std::uint16_t bu_sequence() const { return bu_sequence_; }

 private:
  Phase phase_ = Phase::Connected;
  wire::Ipv6Address home_address_{};
  std::optional<wire::Ipv6Address> care_of_;
  wire::Ipv6Address dn_address_{};
  std::uint64_t interface_id_ = 0;
  std::uint64_t hoti_cookie_ = 0;
  std::uint64_t coti_cookie_ = 0;
  std::optional<std::uint64_t> home_token_;
  std::optional<std::uint64_t> careof_token_;
  std::uint16_t home_nonce_ = 0;
  std::uint16_t careof_nonce_ = 0;
  std::uint16_t bu_sequence_ = 0;
  std::optional<wire::BindingUpdate> pending_bu_;
  bool ran_setup_ = false;
  std::mt19937_64 rng_;
};

class AmfAgent : public Agent {
 public:
  AmfAgent(NodeId self, Network& net) : Agent(self, net) {}
  void handle(const sim::Message& in, std::vector<Outgoing>& planned) override;
  void start_step(StepId step, std::vector<Outgoing>& planned) override;
  std::string snapshot() const override;

 private:
  bool takeover_requested_ = false;
  bool back_seen_ = false;
  bool release_sent_ = false;
};

struct SmfSessionContext {
  enum class RequestType { Initial, ExistingSessionTakeover };
  std::uint32_t session_id = 1;
  RequestType request_type = RequestType::Initial;
  std::optional<wire::Ipv6Prefix> allocated_prefix;
  std::set<NodeId> upf_bindings;
  bool policy_assoc = false;
  bool released = false;
};

class SmfAgent : public Agent {
 public:
  // `existing` is the session the UE already holds when this SMF serves the
  // previous or home slice.
  SmfAgent(NodeId self, Network& net, const AddressPlan& ap,
           std::optional<SmfSessionContext> existing);
  void handle(const sim::Message& in, std::vector<Outgoing>& planned) override;
  void start_step(StepId step, std::vector<Outgoing>& planned) override;
  std::string snapshot() const override;

  const std::optional<SmfSessionContext>& session() const { return session_; }

 private:
  void require_session(const std::string& what) const;

  AddressPlan ap_;
  std::optional<SmfSessionContext> session_;
};

struct IsgwTunnel {
  enum class State { Pending, Established, Released };
  std::uint32_t local_teid = 0;
  std::uint32_t remote_teid = 0;
  NodeId peer = 0;
  State state = State::Pending;
};

class UpfAgent : public Agent {
 public:
  UpfAgent(NodeId self, Network& net, const AddressPlan& ap, bool session_installed);
  void handle(const sim::Message& in, std::vector<Outgoing>& planned) override;
  void start_step(StepId step, std::vector<Outgoing>& planned) override;
  std::string snapshot() const override;

  // Baseline: the previous session is torn down when the new one is requested.
  void release_session() { session_released_ = true; }
  const std::optional<IsgwTunnel>& tunnel() const { return tunnel_; }
  std::size_t buffered() const { return buffer_.size(); }

 private:
  void downlink(const sim::Message& in);
  void send_down(wire::Bytes packet, std::uint32_t seq);
  wire::Bytes encapsulate(const wire::Bytes& inner) const;

  AddressPlan ap_;
  bool session_installed_ = false;
  bool session_released_ = false;
  std::optional<IsgwTunnel> tunnel_;
  std::deque<wire::Bytes> buffer_;
};

struct Binding {
  wire::Ipv6Address care_of_address{};
  std::uint16_t lifetime = 0;
  std::uint16_t sequence = 0;
};

class DnAgent : public Agent {
 public:
  DnAgent(NodeId self, Network& net, const AddressPlan& ap, std::uint64_t seed);
  void handle(const sim::Message& in, std::vector<Outgoing>& planned) override;
  void start_step(StepId step, std::vector<Outgoing>& planned) override;
  std::string snapshot() const override;

  // Emits the next downlink stream packet.
  std::uint32_t emit_stream_packet();
  std::uint32_t emitted() const { return next_seq_ - 1; }

  const std::map<wire::Ipv6Address, Binding>& binding_cache() const { return cache_; }
  // Where downlink for the UE currently goes: its address and first hop.
  std::pair<wire::Ipv6Address, NodeId> route() const;

 private:
  std::uint64_t token(std::uint64_t cookie, std::uint16_t nonce, int kind) const;

  AddressPlan ap_;
  std::uint64_t secret_ = 0;
  std::uint16_t nonce_index_ = 0;
  std::optional<std::uint64_t> home_token_;
  std::optional<std::uint64_t> careof_token_;
  std::map<wire::Ipv6Address, Binding> cache_;
  std::optional<wire::Ipv6Address> learned_address_;  // baseline: from the first uplink
  std::uint32_t next_seq_ = 1;
};

// PCF, UDM and the gNB: answer or relay whatever the plan asks of them.
class PassiveAgent : public Agent {
 public:
  using Agent::Agent;
  void handle(const sim::Message& in, std::vector<Outgoing>& planned) override;
  void start_step(StepId step, std::vector<Outgoing>& planned) override;
  std::string snapshot() const override;

 private:
  std::size_t handled_ = 0;
};

// Downlink decision for a packet at a node: where it goes next and how.
enum class DivertAction { Forward, Buffer, Encapsulate, Drop };
struct DivertDecision {
  DivertAction action = DivertAction::Forward;
  std::optional<NodeId> next;
};
DivertDecision divert_downlink(const Topology& topo, NodeId at, bool session_released,
                               const std::optional<IsgwTunnel>& tunnel);

std::string_view phase_name(UeAgent::Phase p);
std::string_view tunnel_state_name(IsgwTunnel::State s);

}  // namespace isho::proto
