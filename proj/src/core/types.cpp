#include "isho/core/types.hpp"

#include <array>
#include <cmath>
#include <utility>

namespace isho {

Micros from_ms(double ms) { return Micros(std::llround(ms * 1000.0)); }

double to_ms(Micros us) { return static_cast<double>(us.count()) / 1000.0; }

namespace {

template <typename E, std::size_t N>
std::optional<E> lookup(const std::array<std::pair<E, std::string_view>, N>& table,
                        std::string_view s) {
  for (const auto& [e, name] : table)
    if (name == s) return e;
  return std::nullopt;
}

template <typename E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table, E e) {
  for (const auto& [k, name] : table)
    if (k == e) return name;
  return "?";
}

constexpr std::array<std::pair<SchemeKind, std::string_view>, 4> kSchemeNames{{
    {SchemeKind::Baseline3gpp, "3gpp"},
    {SchemeKind::Mipv6RrBu, "mipv6"},
    {SchemeKind::Gtpv1U, "gtp"},
    {SchemeKind::HybridMipv6Gtp, "hybrid"},
}};

constexpr std::array<std::pair<SchemeKind, std::string_view>, 4> kSchemeDirs{{
    {SchemeKind::Baseline3gpp, "baseline3gpp"},
    {SchemeKind::Mipv6RrBu, "mipv6"},
    {SchemeKind::Gtpv1U, "gtp"},
    {SchemeKind::HybridMipv6Gtp, "hybrid"},
}};

constexpr std::array<std::pair<StepId, std::string_view>, 14> kStepNames{{
    {StepId::A, "A"}, {StepId::B, "B"}, {StepId::C, "C"}, {StepId::D, "D"},
    {StepId::E, "E"}, {StepId::F, "F"}, {StepId::G, "G"}, {StepId::H, "H"},
    {StepId::I, "I"}, {StepId::J, "J"},
    {StepId::SecAuth, "sec_auth"},
    {StepId::StdIpv6Config, "std_ipv6_config"},
    {StepId::Release, "release"},
    {StepId::Stream, "stream"},
}};

constexpr std::array<std::pair<NodeRole, std::string_view>, 13> kRoleNames{{
    {NodeRole::UE, "UE"}, {NodeRole::GNB, "gNB"}, {NodeRole::AMF, "AMF"},
    {NodeRole::HomeAMF, "HomeAMF"}, {NodeRole::SMF, "SMF"},
    {NodeRole::HomeSMF, "HomeSMF"}, {NodeRole::PCF, "PCF"}, {NodeRole::UDM, "UDM"},
    {NodeRole::N3UPF, "N3UPF"}, {NodeRole::GwUPF, "GwUPF"},
    {NodeRole::IsgwUPF, "IsgwUPF"}, {NodeRole::GenericUPF, "GenericUPF"},
    {NodeRole::DN, "DN"},
}};

constexpr std::array<std::pair<LinkClass, std::string_view>, 7> kLinkNames{{
    {LinkClass::SbaNfNf, "sba_nf_nf"}, {LinkClass::UeAmf, "ue_amf"},
    {LinkClass::RanHamf, "ran_hamf"}, {LinkClass::GwDn, "gw_dn"},
    {LinkClass::UpfUpf, "upf_upf"}, {LinkClass::SmfUpf, "smf_upf"},
    {LinkClass::UeUpf, "ue_upf"},
}};

}  // namespace

std::string_view scheme_name(SchemeKind s) { return name_of(kSchemeNames, s); }
std::optional<SchemeKind> parse_scheme(std::string_view s) { return lookup(kSchemeNames, s); }
std::string_view scheme_dir(SchemeKind s) { return name_of(kSchemeDirs, s); }

bool uses_isgw(SchemeKind s) {
  return s == SchemeKind::Gtpv1U || s == SchemeKind::HybridMipv6Gtp;
}
bool uses_mip(SchemeKind s) {
  return s == SchemeKind::Mipv6RrBu || s == SchemeKind::HybridMipv6Gtp;
}

std::string_view step_name(StepId s) { return name_of(kStepNames, s); }
std::optional<StepId> parse_step(std::string_view s) { return lookup(kStepNames, s); }

std::string_view role_name(NodeRole r) { return name_of(kRoleNames, r); }
std::optional<NodeRole> parse_role(std::string_view s) { return lookup(kRoleNames, s); }

bool is_sba_nf(NodeRole r) {
  switch (r) {
    case NodeRole::AMF:
    case NodeRole::HomeAMF:
    case NodeRole::SMF:
    case NodeRole::HomeSMF:
    case NodeRole::PCF:
    case NodeRole::UDM:
      return true;
    default:
      return false;
  }
}

bool is_upf(NodeRole r) {
  return r == NodeRole::N3UPF || r == NodeRole::GwUPF || r == NodeRole::IsgwUPF ||
         r == NodeRole::GenericUPF;
}

std::string_view link_name(LinkClass l) { return name_of(kLinkNames, l); }
std::optional<LinkClass> parse_link(std::string_view s) { return lookup(kLinkNames, s); }

bool is_control_link(LinkClass l) {
  return l == LinkClass::SbaNfNf || l == LinkClass::UeAmf || l == LinkClass::RanHamf ||
         l == LinkClass::SmfUpf;
}

std::optional<LinkClass> link_between(NodeRole a, NodeRole b) {
  if (is_sba_nf(a) && is_sba_nf(b)) return LinkClass::SbaNfNf;
  auto pair = [&](NodeRole x, NodeRole y) {
    return (a == x && b == y) || (a == y && b == x);
  };
  if (pair(NodeRole::UE, NodeRole::AMF)) return LinkClass::UeAmf;
  if (pair(NodeRole::UE, NodeRole::HomeAMF)) return LinkClass::RanHamf;
  if (is_upf(a) && is_upf(b)) return LinkClass::UpfUpf;
  if ((is_upf(a) && b == NodeRole::DN) || (is_upf(b) && a == NodeRole::DN))
    return LinkClass::GwDn;
  if ((is_upf(a) && b == NodeRole::UE) || (is_upf(b) && a == NodeRole::UE))
    return LinkClass::UeUpf;
  bool smf_a = a == NodeRole::SMF || a == NodeRole::HomeSMF;
  bool smf_b = b == NodeRole::SMF || b == NodeRole::HomeSMF;
  if ((smf_a && is_upf(b)) || (smf_b && is_upf(a))) return LinkClass::SmfUpf;
  return std::nullopt;
}

std::string_view slice_label_name(SliceLabel l) {
  switch (l) {
    case SliceLabel::Previous: return "prev";
    case SliceLabel::New: return "new";
    case SliceLabel::Home: return "home";
  }
  return "?";
}

}  // namespace isho
