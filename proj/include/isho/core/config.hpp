#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "isho/core/params.hpp"
#include "isho/core/topology.hpp"
#include "isho/core/types.hpp"

namespace isho {

struct RunConfig {
  SchemeKind scheme = SchemeKind::Gtpv1U;
  DelayParams delays;
  ResourceParams resources;
  SignallingParams signalling;
  TopologySpec placement;
  Topology topology;
  AnalyticOptions analytic;
  StreamParams stream;
  std::uint64_t seed = 1;
  // Optional directory overriding the built-in message sequences.
  std::string sequence_dir;
};

struct Violation {
  std::string field;
  std::string rule;
  bool operator==(const Violation&) const = default;
};

RunConfig default_config();

// Rebuilds the topology and the derived UPF counts after any edit to
// scheme, resources or placement.
void sync_derived(RunConfig& c);

std::vector<Violation> validate(const RunConfig& c);

std::string format_violations(const std::vector<Violation>& v);

}  // namespace isho
