#pragma once

#include <map>
#include <string>
#include <vector>

#include "isho/analytic/model.hpp"
#include "isho/protocols/agents.hpp"
#include "isho/simkernel/kernel.hpp"

namespace isho::proto {

// Downlink stream accounting. The handover window is [isho_start, isho_end].
struct StreamStats {
  std::uint32_t emitted = 0;
  std::uint32_t window_emitted = 0;
  std::uint32_t delivered = 0;         // deliveries, duplicates included
  std::uint32_t window_exactly_once = 0;
  std::uint32_t duplicates = 0;
  std::uint32_t lost = 0;              // emitted, never delivered
  std::uint32_t via_prev = 0;          // reached the UE from the previous slice's N3-UPF
  std::uint32_t via_new = 0;
  std::uint32_t tunnelled = 0;         // crossed the inter-slice tunnel
  std::uint32_t late_prev = 0;         // via the previous slice after the first new-path downlink

  bool window_lossless() const { return window_exactly_once == window_emitted; }
};

struct StepTiming {
  Micros started{0};
  Micros done{0};
};

struct RunResult {
  SchemeKind scheme = SchemeKind::Gtpv1U;
  sim::Trace trace;
  analytic::SchemeMetrics metrics;  // latency and SC measured, CR/BR from the model
  StreamStats stream;
  std::map<StepId, StepTiming> steps;
  AddressPlan addresses;
};

// Step dependencies of a scheme: each step starts once all its prerequisites
// are done. Steps with no entry start at the handover trigger; Release is
// started by the AMF.
std::map<StepId, std::vector<StepId>> step_prerequisites(SchemeKind scheme);

RunResult run_scheme(const RunConfig& c, const analytic::SequenceLibrary& lib);
RunResult run_scheme(const RunConfig& c);

// Every Send record as an IPv6 packet: user-plane packets as carried, G-PDUs
// in UDP/2152 between node addresses, other control messages in UDP.
void write_pcap(const RunResult& r, const std::string& path);

}  // namespace isho::proto
