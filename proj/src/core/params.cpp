#include "isho/core/params.hpp"

namespace isho {

Micros DelayParams::link(LinkClass l) const {
  switch (l) {
    case LinkClass::SbaNfNf: return t_nf_nf;
    case LinkClass::UeAmf: return t_ue_amf;
    case LinkClass::RanHamf: return t_ran_hamf;
    case LinkClass::GwDn: return t_gw_dn;
    case LinkClass::UpfUpf: return t_upf_upf;
    case LinkClass::SmfUpf: return t_smf_upf;
    case LinkClass::UeUpf: return t_ue_upf;
  }
  return Micros{0};
}

Micros DelayParams::processing(NodeRole receiver) const {
  if (is_sba_nf(receiver)) return pd_nf;
  if (is_upf(receiver)) return pd_upf;
  return pd_nonsba;
}

double SignallingParams::transmission(LinkClass l) const {
  return l == LinkClass::SbaNfNf ? tc_nf_nf : tc_nonsba;
}

double SignallingParams::processing(NodeRole receiver) const {
  return is_sba_nf(receiver) ? pc_nf : pc_nonsba;
}

}  // namespace isho
