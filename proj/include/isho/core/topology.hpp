#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "isho/core/params.hpp"
#include "isho/core/types.hpp"

namespace isho {

using NodeId = std::uint32_t;

struct Node {
  NodeId id = 0;
  NodeRole role = NodeRole::UE;
  std::optional<SliceId> slice;
  std::string name;
  bool isgw = false;  // UPF also acting as inter-slice gateway
};

// Where a slice's ISGW-UPF sits in its UPF chain.
enum class IsgwPlacement { Gw, N3, Explicit };

struct TopologySpec {
  IsgwPlacement isgw_prev = IsgwPlacement::Gw;
  IsgwPlacement isgw_new = IsgwPlacement::Gw;
  int isgw_prev_index = 0;  // used with Explicit; 0 is the N3-UPF
  int isgw_new_index = 0;
  bool distinct_home = false;
  std::uint32_t snssai_prev = 1;
  std::uint32_t snssai_new = 2;
  std::uint32_t snssai_home = 3;
  bool operator==(const TopologySpec&) const = default;
};

struct Topology {
  std::vector<Node> nodes;
  // Ordered from the N3-UPF (index 0) to the GW-UPF (back).
  std::vector<NodeId> upf_chain_prev;
  std::vector<NodeId> upf_chain_new;
  std::optional<int> isgw_position_prev;
  std::optional<int> isgw_position_new;

  SliceId slice_prev;
  SliceId slice_new;
  SliceId slice_home;

  NodeId ue = 0, gnb = 0, amf = 0, home_amf = 0;
  NodeId smf_prev = 0, smf_new = 0, home_smf = 0;
  NodeId pcf = 0, udm = 0, dn = 0;
  NodeId home_gw = 0;

  const Node& node(NodeId id) const { return nodes.at(id); }
  const std::vector<NodeId>& chain(SliceLabel l) const;
  std::optional<NodeId> isgw(SliceLabel l) const;
  // Position of a UPF in its slice's chain, if it is on one.
  std::optional<std::pair<SliceLabel, int>> chain_position(NodeId id) const;
  std::optional<NodeId> find(std::string_view name) const;
};

Topology build_topology(SchemeKind scheme, const ResourceParams& r, const TopologySpec& spec);

// Chain index of the ISGW for a placement, or nullopt if the chain is empty.
std::optional<int> isgw_index(IsgwPlacement p, int explicit_index, int chain_len);

}  // namespace isho
