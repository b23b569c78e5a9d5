#include "isho/analytic/model.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace isho::analytic {

Micros& StepDelays::at(StepId s) {
  switch (s) {
    case StepId::A: return t_a;
    case StepId::B: return t_b;
    case StepId::C: return t_c;
    case StepId::D: return t_d;
    case StepId::E: return t_e;
    case StepId::F: return t_f;
    case StepId::G: return t_g;
    case StepId::H: return t_h;
    case StepId::I: return t_i;
    case StepId::J: return t_j;
    case StepId::SecAuth: return t_sec_auth;
    case StepId::StdIpv6Config: return t_std_ipv6config;
    case StepId::Release: return t_release;
    case StepId::Stream: break;
  }
  throw SequenceError(fmt::format("unknown step id {}", step_name(s)));
}

Micros StepDelays::at(StepId s) const { return const_cast<StepDelays*>(this)->at(s); }

namespace {

using S = StepId;
constexpr StepId k3gpp[] = {S::A, S::B, S::SecAuth, S::F, S::G, S::StdIpv6Config, S::J};
constexpr StepId kMip[] = {S::A, S::B, S::C, S::E, S::F, S::G, S::I, S::J};
constexpr StepId kGtp[] = {S::A, S::B, S::C, S::D, S::F, S::G, S::H};
constexpr StepId kHybrid[] = {S::A, S::B, S::C, S::D, S::E, S::F, S::G,
                              S::H, S::I, S::J, S::Release};

}  // namespace

std::span<const StepId> scheme_steps(SchemeKind scheme) {
  switch (scheme) {
    case SchemeKind::Baseline3gpp: return k3gpp;
    case SchemeKind::Mipv6RrBu: return kMip;
    case SchemeKind::Gtpv1U: return kGtp;
    case SchemeKind::HybridMipv6Gtp: return kHybrid;
  }
  return {};
}

Micros step_delay(const StepPlan& plan, const DelayParams& d, const Topology& topo) {
  std::vector<Micros> done(plan.messages.size());
  Micros longest{0};
  for (std::size_t i = 0; i < plan.messages.size(); ++i) {
    const auto& m = plan.messages[i];
    Micros start = m.parent < 0 ? Micros{0} : done[static_cast<std::size_t>(m.parent)];
    done[i] = start + d.link(m.link) + d.processing(topo.node(m.dst).role);
    if (!m.side) longest = std::max(longest, done[i]);
  }
  return longest;
}

Micros step_delay(StepId step, const DelayParams& d, const MessageSequence& seq,
                  const Topology& topo) {
  if (step == StepId::Stream) throw SequenceError("unknown step id stream");
  if (seq.step != step)
    throw SequenceError(fmt::format("sequence is for step {}, not {}", step_name(seq.step),
                                    step_name(step)));
  return step_delay(expand(seq, topo), d, topo);
}

double step_cost(const StepPlan& plan, const SignallingParams& s, const Topology& topo) {
  double total = 0.0;
  for (const auto& m : plan.messages) {
    if (!is_control_link(m.link)) continue;
    total += s.transmission(m.link) + s.processing(topo.node(m.dst).role);
  }
  return total;
}

PlanSet expand_all(SchemeKind scheme, const SequenceLibrary& lib, const Topology& topo) {
  PlanSet plans;
  for (auto step : scheme_steps(scheme)) plans[step] = expand(lib.get(scheme, step), topo);
  return plans;
}

StepDelays step_delays(const PlanSet& plans, const DelayParams& d, const Topology& topo) {
  StepDelays t;
  for (const auto& [step, plan] : plans) t.at(step) = step_delay(plan, d, topo);
  t.t_l = d.residual_latency;
  return t;
}

namespace {

Micros gtp_branch(const StepDelays& t) { return std::max(t.t_d, t.t_f + t.t_g) + t.t_h; }
Micros mip_branch(const StepDelays& t) { return std::max(t.t_e, t.t_f) + t.t_i + t.t_j; }

}  // namespace

Micros isho_delay(SchemeKind scheme, const StepDelays& t, Mipv6Form form) {
  switch (scheme) {
    case SchemeKind::Baseline3gpp:
      return t.t_a + t.t_b + t.t_sec_auth + t.t_f + t.t_g + t.t_std_ipv6config + t.t_j;
    case SchemeKind::Mipv6RrBu:
      if (form == Mipv6Form::Corrected) return mip_branch(t);
      return std::max(t.t_e, t.t_d) + t.t_i + t.t_l + t.t_j;
    case SchemeKind::Gtpv1U:
      return gtp_branch(t);
    case SchemeKind::HybridMipv6Gtp:
      return std::min(gtp_branch(t), mip_branch(t));
  }
  return Micros{0};
}

Micros isho_interval(SchemeKind scheme, const StepDelays& t, Mipv6Form form) {
  Micros prep = t.t_a + t.t_b + t.t_c;
  switch (scheme) {
    case SchemeKind::Baseline3gpp:
      return isho_delay(scheme, t, form);
    case SchemeKind::Mipv6RrBu:
    case SchemeKind::Gtpv1U:
      return prep + isho_delay(scheme, t, form);
    case SchemeKind::HybridMipv6Gtp:
      return prep + std::max(gtp_branch(t), mip_branch(t));
  }
  return Micros{0};
}

ResourceParams assign_coefficients(SchemeKind scheme, const ResourceParams& r) {
  ResourceParams a = r;
  switch (scheme) {
    case SchemeKind::Baseline3gpp:
    case SchemeKind::Mipv6RrBu:
      a.omega_p = 0.0;
      a.omega_n = 1.0;
      a.n_upf_prev_active = 0;
      a.n_upf_new_fromprev = 0;
      a.n_upf_new_active = r.n_upf_new;
      break;
    case SchemeKind::Gtpv1U:
      a.omega_p = 1.0;
      a.omega_n = 1.0;
      a.n_upf_prev_active = r.n_upf_prev_between;
      a.n_upf_new_fromprev = r.n_upf_new - r.n_upf_new_between;
      a.n_upf_new_active = 0;
      break;
    case SchemeKind::HybridMipv6Gtp:
      a.omega_n = 1.0 - r.omega_p;
      a.n_upf_prev_active = r.n_upf_prev_between;
      a.n_upf_new_fromprev = r.n_upf_new - r.n_upf_new_between;
      a.n_upf_new_active = r.n_upf_new;
      break;
  }
  return a;
}

ResourceOverhead resource_overhead(SchemeKind scheme, const ResourceParams& r, BrWeights weights) {
  ResourceParams a = assign_coefficients(scheme, r);
  auto hops = [](int n) { return static_cast<double>(std::max(n - 1, 0)); };
  double wp = weights == BrWeights::Cpu ? a.c_p : a.b_p;
  double wn = weights == BrWeights::Cpu ? a.c_n : a.b_n;
  ResourceOverhead o;
  o.cr = a.omega_p * a.c_p * a.n_upf_prev_active + a.omega_p * a.c_n * a.n_upf_new_fromprev +
         a.omega_n * a.c_n * a.n_upf_new_active;
  o.br = a.omega_p * wp * hops(a.n_upf_prev_active) + a.omega_p * wn * hops(a.n_upf_new_fromprev) +
         a.omega_n * wn * hops(a.n_upf_new_active);
  return o;
}

double signalling_cost(SchemeKind scheme, const SignallingParams& s, const PlanSet& plans,
                       const Topology& topo) {
  double total = 0.0;
  for (auto step : scheme_steps(scheme)) {
    auto it = plans.find(step);
    if (it == plans.end())
      throw SequenceError(fmt::format("no plan for step {}", step_name(step)));
    total += step_cost(it->second, s, topo);
  }
  return total;
}

SchemeMetrics evaluate(const RunConfig& c, const SequenceLibrary& lib) {
  PlanSet plans = expand_all(c.scheme, lib, c.topology);
  StepDelays t = step_delays(plans, c.delays, c.topology);
  if (c.scheme == SchemeKind::Mipv6RrBu && c.analytic.mipv6_form == Mipv6Form::Literal) {
    // The literal expression references step D, which MIPv6 never runs; it is
    // timed on the same topology with the configured ISGW placement.
    Topology with_isgw = build_topology(SchemeKind::Gtpv1U, c.resources, c.placement);
    t.t_d = step_delay(expand(lib.get(c.scheme, StepId::D), with_isgw), c.delays, with_isgw);
  }
  ResourceOverhead o = resource_overhead(c.scheme, c.resources, c.analytic.br_weights);
  SchemeMetrics m;
  m.isho_delay = isho_delay(c.scheme, t, c.analytic.mipv6_form);
  m.isho_interval = isho_interval(c.scheme, t, c.analytic.mipv6_form);
  m.cpu_overhead = o.cr;
  m.bw_overhead = o.br;
  m.signalling_cost = signalling_cost(c.scheme, c.signalling, plans, c.topology);
  return m;
}

SchemeMetrics evaluate(const RunConfig& c) {
  return evaluate(c, SequenceLibrary::for_dir(c.sequence_dir));
}

}  // namespace isho::analytic
