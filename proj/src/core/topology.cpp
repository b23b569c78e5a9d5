#include "isho/core/topology.hpp"

#include <fmt/format.h>

namespace isho {

std::optional<int> isgw_index(IsgwPlacement p, int explicit_index, int chain_len) {
  if (chain_len <= 0) return std::nullopt;
  switch (p) {
    case IsgwPlacement::Gw: return chain_len - 1;
    case IsgwPlacement::N3: return 0;
    case IsgwPlacement::Explicit: return explicit_index;
  }
  return std::nullopt;
}

const std::vector<NodeId>& Topology::chain(SliceLabel l) const {
  return l == SliceLabel::New ? upf_chain_new : upf_chain_prev;
}

std::optional<NodeId> Topology::isgw(SliceLabel l) const {
  const auto& pos = l == SliceLabel::New ? isgw_position_new : isgw_position_prev;
  const auto& c = chain(l);
  if (!pos || *pos < 0 || *pos >= static_cast<int>(c.size())) return std::nullopt;
  return c[static_cast<std::size_t>(*pos)];
}

std::optional<std::pair<SliceLabel, int>> Topology::chain_position(NodeId id) const {
  for (std::size_t i = 0; i < upf_chain_prev.size(); ++i)
    if (upf_chain_prev[i] == id) return std::pair{SliceLabel::Previous, static_cast<int>(i)};
  for (std::size_t i = 0; i < upf_chain_new.size(); ++i)
    if (upf_chain_new[i] == id) return std::pair{SliceLabel::New, static_cast<int>(i)};
  return std::nullopt;
}

std::optional<NodeId> Topology::find(std::string_view name) const {
  for (const auto& n : nodes)
    if (n.name == name) return n.id;
  return std::nullopt;
}

namespace {

NodeId add(Topology& t, NodeRole role, std::optional<SliceId> slice, std::string name) {
  auto id = static_cast<NodeId>(t.nodes.size());
  t.nodes.push_back(Node{id, role, slice, std::move(name), false});
  return id;
}

std::vector<NodeId> make_chain(Topology& t, int n, const SliceId& slice) {
  std::vector<NodeId> chain;
  std::string_view tag = slice_label_name(slice.label);
  for (int i = 0; i < n; ++i) {
    NodeRole role = NodeRole::GenericUPF;
    if (i == n - 1)
      role = NodeRole::GwUPF;  // a one-UPF chain is a GW-UPF that also terminates N3
    else if (i == 0)
      role = NodeRole::N3UPF;
    chain.push_back(add(t, role, slice, fmt::format("UPF{}@{}", i, tag)));
  }
  return chain;
}

}  // namespace

Topology build_topology(SchemeKind scheme, const ResourceParams& r, const TopologySpec& spec) {
  Topology t;
  t.slice_prev = SliceId{spec.snssai_prev, SliceLabel::Previous};
  t.slice_new = SliceId{spec.snssai_new, SliceLabel::New};
  t.slice_home = spec.distinct_home ? SliceId{spec.snssai_home, SliceLabel::Home}
                                    : SliceId{spec.snssai_prev, SliceLabel::Home};

  t.ue = add(t, NodeRole::UE, std::nullopt, "UE");
  t.gnb = add(t, NodeRole::GNB, std::nullopt, "gNB");
  t.amf = add(t, NodeRole::AMF, std::nullopt, "AMF");
  t.home_amf = add(t, NodeRole::HomeAMF, t.slice_home, "H-AMF");
  t.smf_prev = add(t, NodeRole::SMF, t.slice_prev, "SMF@prev");
  t.smf_new = add(t, NodeRole::SMF, t.slice_new, "SMF@new");
  t.pcf = add(t, NodeRole::PCF, t.slice_new, "PCF");
  t.udm = add(t, NodeRole::UDM, std::nullopt, "UDM");
  t.dn = add(t, NodeRole::DN, std::nullopt, "DN");

  t.upf_chain_prev = make_chain(t, std::max(r.n_upf_prev, 0), t.slice_prev);
  t.upf_chain_new = make_chain(t, std::max(r.n_upf_new, 0), t.slice_new);

  if (spec.distinct_home) {
    t.home_smf = add(t, NodeRole::HomeSMF, t.slice_home, "H-SMF");
    t.home_gw = add(t, NodeRole::GwUPF, t.slice_home, "UPF0@home");
  } else {
    t.home_smf = t.smf_prev;
    t.home_gw = t.upf_chain_prev.empty() ? t.dn : t.upf_chain_prev.back();
  }

  if (uses_isgw(scheme)) {
    t.isgw_position_prev =
        isgw_index(spec.isgw_prev, spec.isgw_prev_index, static_cast<int>(t.upf_chain_prev.size()));
    t.isgw_position_new =
        isgw_index(spec.isgw_new, spec.isgw_new_index, static_cast<int>(t.upf_chain_new.size()));
    for (auto l : {SliceLabel::Previous, SliceLabel::New})
      if (auto id = t.isgw(l)) t.nodes[*id].isgw = true;
  }
  return t;
}

}  // namespace isho
