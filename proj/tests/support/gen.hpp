#pragma once

// Random generators shared by the property tests and the acceptance binary.

#include <random>

#include "isho/analytic/model.hpp"
#include "isho/core/config.hpp"
#include "isho/wire/mip.hpp"

namespace isho::testgen {

using Rng = std::mt19937_64;

inline int uniform(Rng& r, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(r);
}

// Microsecond-grid delay in [0, hi_ms]; exactly zero now and then.
inline Micros delay(Rng& r, int hi_ms = 10) {
  if (uniform(r, 0, 19) == 0) return Micros{0};
  return Micros{uniform(r, 1, hi_ms * 1000)};
}

inline double cost(Rng& r) { return uniform(r, 0, 100) / 10.0; }

inline RunConfig random_config(Rng& r, SchemeKind scheme) {
  RunConfig c = default_config();
  c.scheme = scheme;
  auto& d = c.delays;
  for (Micros* p : {&d.t_nf_nf, &d.t_ue_amf, &d.t_ran_hamf, &d.t_gw_dn, &d.t_upf_upf, &d.t_smf_upf,
                    &d.t_ue_upf, &d.pd_nf, &d.pd_nonsba, &d.pd_upf})
    *p = delay(r);
  d.residual_latency = Micros{0};
  auto& res = c.resources;
  res.n_upf_prev = uniform(r, 1, 5);
  res.n_upf_new = uniform(r, 1, 5);
  res.omega_p = uniform(r, 0, 10) / 10.0;
  res.omega_n = 1.0 - res.omega_p;
  res.c_p = uniform(r, 0, 200);
  res.c_n = uniform(r, 0, 200);
  res.b_p = uniform(r, 0, 200);
  res.b_n = uniform(r, 0, 200);
  auto& s = c.signalling;
  s.tc_nf_nf = cost(r);
  s.tc_nonsba = cost(r);
  s.pc_nf = cost(r);
  s.pc_nonsba = cost(r);
  auto& p = c.placement;
  auto placement = [&](int len, int& index) {
    switch (uniform(r, 0, 2)) {
      case 0: return IsgwPlacement::Gw;
      case 1: return IsgwPlacement::N3;
      default: index = uniform(r, 0, len - 1); return IsgwPlacement::Explicit;
    }
  };
  p.isgw_prev = placement(res.n_upf_prev, p.isgw_prev_index);
  p.isgw_new = placement(res.n_upf_new, p.isgw_new_index);
  p.distinct_home = uniform(r, 0, 3) == 0;
  c.stream.period = Micros{uniform(r, 1000, 20000)};
  c.stream.lead = Micros{uniform(r, 0, 30000)};
  c.seed = r();
  sync_derived(c);
  return c;
}

inline analytic::StepDelays random_step_delays(Rng& r) {
  analytic::StepDelays t;
  for (auto s : kAllSteps) t.at(s) = delay(r, 50);
  t.t_l = delay(r, 5);
  return t;
}

inline std::uint64_t u64(Rng& r) { return r(); }
inline std::uint16_t u16(Rng& r) { return static_cast<std::uint16_t>(r()); }

inline wire::MipMessage random_mip(Rng& r) {
  switch (uniform(r, 0, 5)) {
    case 0: return wire::HomeTestInit{u64(r)};
    case 1: return wire::CareOfTestInit{u64(r)};
    case 2: return wire::HomeTest{u16(r), u64(r), u64(r)};
    case 3: return wire::CareOfTest{u16(r), u64(r), u64(r)};
    case 4: {
      wire::BindingUpdate bu;
      bu.sequence = u16(r);
      bu.flags = static_cast<std::uint8_t>(r() & 0xf0);
      bu.lifetime = u16(r);
      bu.home_nonce_index = u16(r);
      bu.careof_nonce_index = u16(r);
      for (auto& b : bu.authenticator) b = static_cast<std::uint8_t>(r());
      return bu;
    }
    default: return wire::BindingAck{static_cast<std::uint8_t>(r()), (r() & 1) != 0, u16(r), u16(r)};
  }
}

inline wire::Bytes random_bytes(Rng& r, std::size_t lo, std::size_t hi) {
  wire::Bytes b(std::uniform_int_distribution<std::size_t>(lo, hi)(r));
  for (auto& x : b) x = static_cast<std::uint8_t>(r());
  return b;
}

}  // namespace isho::testgen
