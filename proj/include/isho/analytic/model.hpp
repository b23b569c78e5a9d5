#pragma once

#include <map>
#include <span>

#include "isho/analytic/sequence.hpp"
#include "isho/core/config.hpp"

namespace isho::analytic {

struct StepDelays {
  Micros t_a{0}, t_b{0}, t_c{0}, t_d{0}, t_e{0}, t_f{0}, t_g{0}, t_h{0}, t_i{0}, t_j{0};
  Micros t_sec_auth{0};
  Micros t_std_ipv6config{0};
  Micros t_release{0};
  Micros t_l{0};  // residual latency term of the literal MIPv6 expression

  Micros& at(StepId s);
  Micros at(StepId s) const;
  bool operator==(const StepDelays&) const = default;
};

struct SchemeMetrics {
  Micros isho_delay{0};
  Micros isho_interval{0};
  double cpu_overhead = 0.0;
  double bw_overhead = 0.0;
  double signalling_cost = 0.0;
};

struct ResourceOverhead {
  double cr = 0.0;
  double br = 0.0;
};

// Steps a scheme executes, in the order they are costed.
std::span<const StepId> scheme_steps(SchemeKind scheme);

// Longest trigger chain over the non-side messages: each message adds its
// link delay and the processing delay at its receiver.
Micros step_delay(const StepPlan& plan, const DelayParams& d, const Topology& topo);
Micros step_delay(StepId step, const DelayParams& d, const MessageSequence& seq,
                  const Topology& topo);

double step_cost(const StepPlan& plan, const SignallingParams& s, const Topology& topo);

using PlanSet = std::map<StepId, StepPlan>;

PlanSet expand_all(SchemeKind scheme, const SequenceLibrary& lib, const Topology& topo);

StepDelays step_delays(const PlanSet& plans, const DelayParams& d, const Topology& topo);

Micros isho_delay(SchemeKind scheme, const StepDelays& t, Mipv6Form form = Mipv6Form::Literal);
Micros isho_interval(SchemeKind scheme, const StepDelays& t,
                     Mipv6Form form = Mipv6Form::Literal);

// Coefficient assignment for a scheme: omega and active counts.
ResourceParams assign_coefficients(SchemeKind scheme, const ResourceParams& r);
ResourceOverhead resource_overhead(SchemeKind scheme, const ResourceParams& r,
                                   BrWeights weights = BrWeights::Cpu);

double signalling_cost(SchemeKind scheme, const SignallingParams& s, const PlanSet& plans,
                       const Topology& topo);

// Everything above for one configuration, using its scheme.
SchemeMetrics evaluate(const RunConfig& c, const SequenceLibrary& lib);
SchemeMetrics evaluate(const RunConfig& c);

}  // namespace isho::analytic
