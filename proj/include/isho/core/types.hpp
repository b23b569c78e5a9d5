#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace isho {

// All simulated and analytic time is integer microseconds.
using Micros = std::chrono::microseconds;

Micros from_ms(double ms);
double to_ms(Micros us);

enum class SchemeKind { Baseline3gpp, Mipv6RrBu, Gtpv1U, HybridMipv6Gtp };

inline constexpr SchemeKind kAllSchemes[] = {
    SchemeKind::Baseline3gpp, SchemeKind::Mipv6RrBu, SchemeKind::Gtpv1U,
    SchemeKind::HybridMipv6Gtp};

// Short names used on the command line and in CSV output: 3gpp, mipv6, gtp, hybrid.
std::string_view scheme_name(SchemeKind s);
std::optional<SchemeKind> parse_scheme(std::string_view s);
// Directory name under data/sequences holding per-scheme overrides.
std::string_view scheme_dir(SchemeKind s);

bool uses_isgw(SchemeKind s);
bool uses_mip(SchemeKind s);

enum class StepId {
  A, B, C, D, E, F, G, H, I, J,
  SecAuth,
  StdIpv6Config,
  Release,
  Stream,  // periodic downlink traffic, not part of any step
};

inline constexpr StepId kAllSteps[] = {
    StepId::A, StepId::B, StepId::C, StepId::D, StepId::E,
    StepId::F, StepId::G, StepId::H, StepId::I, StepId::J,
    StepId::SecAuth, StepId::StdIpv6Config, StepId::Release};

std::string_view step_name(StepId s);
std::optional<StepId> parse_step(std::string_view s);

enum class NodeRole {
  UE, GNB, AMF, HomeAMF, SMF, HomeSMF, PCF, UDM,
  N3UPF, GwUPF, IsgwUPF, GenericUPF, DN,
};

std::string_view role_name(NodeRole r);
std::optional<NodeRole> parse_role(std::string_view s);

// Service-based control-plane function (processing delay PD_nf, cost PC_nf).
bool is_sba_nf(NodeRole r);
bool is_upf(NodeRole r);

enum class LinkClass { SbaNfNf, UeAmf, RanHamf, GwDn, UpfUpf, SmfUpf, UeUpf };

inline constexpr LinkClass kAllLinkClasses[] = {
    LinkClass::SbaNfNf, LinkClass::UeAmf, LinkClass::RanHamf, LinkClass::GwDn,
    LinkClass::UpfUpf, LinkClass::SmfUpf, LinkClass::UeUpf};

std::string_view link_name(LinkClass l);
std::optional<LinkClass> parse_link(std::string_view s);

// Links that carry signalling and therefore count towards signalling cost.
bool is_control_link(LinkClass l);

// Link class between two roles; nullopt when no such link exists.
std::optional<LinkClass> link_between(NodeRole a, NodeRole b);

enum class SliceLabel { Previous, New, Home };

std::string_view slice_label_name(SliceLabel l);

struct SliceId {
  std::uint32_t snssai = 0;
  SliceLabel label = SliceLabel::Previous;
  bool operator==(const SliceId&) const = default;
};

}  // namespace isho
