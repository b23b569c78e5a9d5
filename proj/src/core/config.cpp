#include "isho/core/config.hpp"

#include <cmath>

#include <fmt/format.h>

namespace isho {

RunConfig default_config() {
  RunConfig c;
  sync_derived(c);
  return c;
}

void sync_derived(RunConfig& c) {
  auto& r = c.resources;
  c.topology = build_topology(c.scheme, r, c.placement);

  // N^{p'}: previous-slice UPFs the downlink crosses before reaching the ISGW.
  // N^{n'}: new-slice UPFs upstream of the ISGW, bypassed by tunnelled traffic.
  auto i = isgw_index(c.placement.isgw_prev, c.placement.isgw_prev_index, r.n_upf_prev);
  auto j = isgw_index(c.placement.isgw_new, c.placement.isgw_new_index, r.n_upf_new);
  r.n_upf_prev_between = i ? r.n_upf_prev - *i : 0;
  r.n_upf_new_between = j ? r.n_upf_new - 1 - *j : 0;

  switch (c.scheme) {
    case SchemeKind::Baseline3gpp:
    case SchemeKind::Mipv6RrBu:
      r.n_upf_prev_active = 0;
      r.n_upf_new_fromprev = 0;
      r.n_upf_new_active = r.n_upf_new;
      break;
    case SchemeKind::Gtpv1U:
      r.n_upf_prev_active = r.n_upf_prev_between;
      r.n_upf_new_fromprev = r.n_upf_new - r.n_upf_new_between;
      r.n_upf_new_active = 0;
      break;
    case SchemeKind::HybridMipv6Gtp:
      r.n_upf_prev_active = r.n_upf_prev_between;
      r.n_upf_new_fromprev = r.n_upf_new - r.n_upf_new_between;
      r.n_upf_new_active = r.n_upf_new;
      break;
  }
}

namespace {

void non_negative(std::vector<Violation>& out, const char* field, Micros v) {
  if (v.count() < 0) out.push_back({field, "delay must be >= 0"});
}

void non_negative(std::vector<Violation>& out, const char* field, double v) {
  if (!(v >= 0.0) || !std::isfinite(v)) out.push_back({field, "must be a finite value >= 0"});
}

}  // namespace

std::vector<Violation> validate(const RunConfig& c) {
  std::vector<Violation> out;
  const auto& d = c.delays;
  non_negative(out, "delays.t_nf_nf", d.t_nf_nf);
  non_negative(out, "delays.t_ue_amf", d.t_ue_amf);
  non_negative(out, "delays.t_ran_hamf", d.t_ran_hamf);
  non_negative(out, "delays.t_gw_dn", d.t_gw_dn);
  non_negative(out, "delays.t_upf_upf", d.t_upf_upf);
  non_negative(out, "delays.t_smf_upf", d.t_smf_upf);
  non_negative(out, "delays.t_ue_upf", d.t_ue_upf);
  non_negative(out, "delays.pd_nf", d.pd_nf);
  non_negative(out, "delays.pd_nonsba", d.pd_nonsba);
  non_negative(out, "delays.pd_upf", d.pd_upf);
  non_negative(out, "delays.residual_latency", d.residual_latency);

  const auto& s = c.signalling;
  non_negative(out, "signalling.tc_nf_nf", s.tc_nf_nf);
  non_negative(out, "signalling.tc_nonsba", s.tc_nonsba);
  non_negative(out, "signalling.pc_nf", s.pc_nf);
  non_negative(out, "signalling.pc_nonsba", s.pc_nonsba);

  const auto& r = c.resources;
  non_negative(out, "resources.c_p", r.c_p);
  non_negative(out, "resources.c_n", r.c_n);
  non_negative(out, "resources.b_p", r.b_p);
  non_negative(out, "resources.b_n", r.b_n);

  if (r.n_upf_prev < 1) {
    if (uses_isgw(c.scheme))
      out.push_back({"resources.n_upf_prev", "ISGW requires >= 1 previous-slice UPF"});
    else
      out.push_back({"resources.n_upf_prev", "previous slice needs >= 1 UPF"});
  }
  if (r.n_upf_new < 1) out.push_back({"resources.n_upf_new", "new slice needs >= 1 UPF"});

  auto in_unit = [](double w) { return w >= 0.0 && w <= 1.0; };
  if (!in_unit(r.omega_p)) out.push_back({"resources.omega_p", "must lie in [0, 1]"});
  if (!in_unit(r.omega_n)) out.push_back({"resources.omega_n", "must lie in [0, 1]"});
  if (std::abs(r.omega_p + r.omega_n - 1.0) > 1e-9)
    out.push_back({"resources.omega_n", "omega_p + omega_n must equal 1"});

  if (r.n_upf_prev >= 1 && r.n_upf_new >= 1) {
    if (r.n_upf_prev_between < 1 || r.n_upf_prev_between > r.n_upf_prev)
      out.push_back({"topology.isgw_prev_index", "ISGW position outside the previous chain"});
    if (r.n_upf_new_between < 0 || r.n_upf_new_between > r.n_upf_new - 1)
      out.push_back({"topology.isgw_new_index", "ISGW position outside the new chain"});
    if (r.n_upf_prev_active > r.n_upf_prev || r.n_upf_new_active > r.n_upf_new ||
        r.n_upf_new_fromprev > r.n_upf_new || r.n_upf_prev_active < 0 ||
        r.n_upf_new_active < 0 || r.n_upf_new_fromprev < 0)
      out.push_back({"resources", "active UPF counts must lie within the chain lengths"});
  }

  const auto& t = c.topology;
  if (static_cast<int>(t.upf_chain_prev.size()) != std::max(r.n_upf_prev, 0) ||
      static_cast<int>(t.upf_chain_new.size()) != std::max(r.n_upf_new, 0))
    out.push_back({"topology", "UPF chain lengths disagree with resources (call sync_derived)"});
  bool has_isgw = false;
  for (const auto& n : t.nodes) has_isgw = has_isgw || n.isgw;
  if (has_isgw != uses_isgw(c.scheme) && r.n_upf_prev >= 1 && r.n_upf_new >= 1)
    out.push_back({"topology", "ISGW-UPF present iff scheme is gtp or hybrid"});

  if (c.placement.snssai_prev == c.placement.snssai_new)
    out.push_back({"topology.snssai_new", "previous and new slice must differ"});
  if (c.placement.distinct_home && (c.placement.snssai_home == c.placement.snssai_prev ||
                                    c.placement.snssai_home == c.placement.snssai_new))
    out.push_back({"topology.snssai_home", "a distinct home slice needs its own S-NSSAI"});

  if (c.stream.period.count() <= 0) out.push_back({"stream.period_ms", "must be > 0"});
  if (c.stream.lead.count() < 0) out.push_back({"stream.lead_ms", "must be >= 0"});
  if (c.stream.tail_packets < 0) out.push_back({"stream.tail_packets", "must be >= 0"});
  return out;
}

std::string format_violations(const std::vector<Violation>& v) {
  std::string s;
  for (const auto& x : v) s += fmt::format("  {}: {}\n", x.field, x.rule);
  return s;
}

}  // namespace isho
