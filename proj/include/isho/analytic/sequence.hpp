#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "isho/core/topology.hpp"
#include "isho/core/types.hpp"

namespace isho::analytic {

struct SequenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// "Role" or "Role@slice"; "UPF*@slice" addresses every UPF of a chain.
struct Endpoint {
  NodeRole role = NodeRole::UE;
  std::optional<SliceLabel> slice;
  bool every_upf = false;
  bool operator==(const Endpoint&) const = default;
};

struct SequenceLine {
  Endpoint src;
  Endpoint dst;
  LinkClass link = LinkClass::SbaNfNf;
  std::string name;
  int after = -1;  // 1-based trigger line; 0 is the step start; -1 the previous line
  bool side = false;
  bool parallel = false;
  int line_no = 0;  // position in the source text, for error messages
  bool operator==(const SequenceLine&) const = default;
};

struct MessageSequence {
  StepId step = StepId::A;
  std::vector<SequenceLine> lines;
  std::string origin;
  bool operator==(const MessageSequence& o) const { return step == o.step && lines == o.lines; }
};

MessageSequence parse_sequence(StepId step, std::string_view text, std::string origin);

// One concrete message after expanding roles against a topology.
struct PlannedMessage {
  NodeId src = 0;
  NodeId dst = 0;
  LinkClass link = LinkClass::SbaNfNf;
  std::string name;
  int parent = -1;  // index of the message whose processing triggers this one; -1 is the step start
  bool side = false;
  int line = 0;
};

struct StepPlan {
  StepId step = StepId::A;
  std::vector<PlannedMessage> messages;
};

StepPlan expand(const MessageSequence& seq, const Topology& topo);

class SequenceLibrary {
 public:
  // Sequences compiled into the binary from data/sequences.
  static const SequenceLibrary& builtin();
  // Reads <dir>/<scheme>/<step>.seq, then <dir>/common/<step>.seq, then the
  // built-in copy for anything missing.
  static SequenceLibrary load(const std::filesystem::path& dir);
  static SequenceLibrary for_dir(const std::string& dir);

  const MessageSequence& get(SchemeKind scheme, StepId step) const;

 private:
  std::map<std::pair<std::string, StepId>, MessageSequence> seqs_;  // key: ("common" | scheme dir, step)
};

std::string step_file_name(StepId step);

}  // namespace isho::analytic
