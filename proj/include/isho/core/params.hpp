#pragma once

#include "isho/core/types.hpp"

namespace isho {

struct DelayParams {
  Micros t_nf_nf{1000};
  Micros t_ue_amf{5000};
  Micros t_ran_hamf{3000};
  Micros t_gw_dn{5000};
  Micros t_upf_upf{2000};
  Micros t_smf_upf{2000};
  // UE to N3-UPF, the access hop of user-plane delivery.
  Micros t_ue_upf{5000};
  Micros pd_nf{1000};
  Micros pd_nonsba{2000};  // UE, gNB, DN
  Micros pd_upf{2000};
  // Extra term in the literal MIPv6 delay expression; no protocol counterpart.
  Micros residual_latency{0};

  Micros link(LinkClass l) const;
  Micros processing(NodeRole receiver) const;

  bool operator==(const DelayParams&) const = default;
};

struct ResourceParams {
  int n_upf_prev = 3;
  int n_upf_new = 3;
  // Derived from ISGW placement and scheme; see sync_derived().
  int n_upf_prev_active = 0;   // N^{p*}
  int n_upf_new_active = 3;    // N^{n*}
  int n_upf_new_fromprev = 0;  // N^{np*}
  int n_upf_prev_between = 1;  // N^{p'}
  int n_upf_new_between = 0;   // N^{n'}
  double c_p = 100.0;
  double c_n = 100.0;
  double b_p = 100.0;
  double b_n = 100.0;
  double omega_p = 0.2;
  double omega_n = 0.8;

  bool operator==(const ResourceParams&) const = default;
};

struct SignallingParams {
  double tc_nf_nf = 1.0;
  double tc_nonsba = 2.0;
  double pc_nf = 1.0;
  double pc_nonsba = 5.0;

  double transmission(LinkClass l) const;
  double processing(NodeRole receiver) const;

  bool operator==(const SignallingParams&) const = default;
};

enum class Mipv6Form { Literal, Corrected };
enum class BrWeights { Cpu, Bandwidth };

struct AnalyticOptions {
  Mipv6Form mipv6_form = Mipv6Form::Literal;
  BrWeights br_weights = BrWeights::Cpu;
  bool operator==(const AnalyticOptions&) const = default;
};

struct StreamParams {
  Micros period{10000};
  // Downlink traffic starts this long before the handover is triggered.
  Micros lead{20000};
  // Packets emitted after the handover completes before the stream stops.
  int tail_packets = 5;
  bool operator==(const StreamParams&) const = default;
};

}  // namespace isho
