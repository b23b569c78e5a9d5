#include "isho/analytic/sequence.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "embedded_sequences.hpp"

namespace isho::analytic {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    auto p = s.find(sep);
    out.push_back(trim(s.substr(0, p)));
    if (p == std::string_view::npos) break;
    s.remove_prefix(p + 1);
  }
  return out;
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& what) {
  throw SequenceError(fmt::format("{}:{}: {}", origin, line, what));
}

Endpoint parse_endpoint(std::string_view s, const std::string& origin, int line) {
  Endpoint e;
  std::string_view role = s;
  if (auto at = s.find('@'); at != std::string_view::npos) {
    role = s.substr(0, at);
    auto sl = s.substr(at + 1);
    if (sl == "prev")
      e.slice = SliceLabel::Previous;
    else if (sl == "new")
      e.slice = SliceLabel::New;
    else if (sl == "home")
      e.slice = SliceLabel::Home;
    else
      fail(origin, line, fmt::format("unknown slice '{}'", sl));
  }
  if (role == "UPF*") {
    if (!e.slice) fail(origin, line, "UPF* needs a slice");
    e.every_upf = true;
    e.role = NodeRole::GenericUPF;
    return e;
  }
  auto r = parse_role(role);
  if (!r) fail(origin, line, fmt::format("unknown role '{}'", role));
  e.role = *r;
  return e;
}

}  // namespace

MessageSequence parse_sequence(StepId step, std::string_view text, std::string origin) {
  MessageSequence seq;
  seq.step = step;
  seq.origin = origin;
  int text_line = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view raw = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++text_line;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    raw = trim(raw);
    if (raw.empty()) continue;

    auto f = split(raw, ',');
    if (f.size() < 4) fail(origin, text_line, "expected 'src, dst, link-class, message-name'");
    SequenceLine l;
    l.line_no = text_line;
    l.src = parse_endpoint(f[0], origin, text_line);
    l.dst = parse_endpoint(f[1], origin, text_line);
    auto link = parse_link(f[2]);
    if (!link) fail(origin, text_line, fmt::format("unknown link class '{}'", f[2]));
    l.link = *link;
    if (f[3].empty()) fail(origin, text_line, "empty message name");
    l.name = std::string(f[3]);
    for (std::size_t i = 4; i < f.size(); ++i) {
      auto opt = f[i];
      if (opt == "side") {
        l.side = true;
      } else if (opt == "parallel") {
        l.parallel = true;
      } else if (opt.substr(0, 6) == "after=") {
        std::string num(opt.substr(6));
        char* end = nullptr;
        long v = std::strtol(num.c_str(), &end, 10);
        if (num.empty() || *end != '\0' || v < 0)
          fail(origin, text_line, fmt::format("bad trigger '{}'", opt));
        if (v > static_cast<long>(seq.lines.size()))
          fail(origin, text_line, fmt::format("trigger line {} is not an earlier line", v));
        l.after = static_cast<int>(v);
      } else {
        fail(origin, text_line, fmt::format("unknown option '{}'", opt));
      }
    }
    seq.lines.push_back(std::move(l));
  }
  return seq;
}

namespace {

constexpr int kRoot = -1;
constexpr int kGroup = -2;  // tail of a parallel fan-out; cannot trigger anything

struct Expander {
  const MessageSequence& seq;
  const Topology& topo;
  StepPlan plan;

  [[noreturn]] void fail_at(const SequenceLine& l, const std::string& what) const {
    fail(seq.origin, l.line_no, what);
  }

  NodeId resolve(const Endpoint& e, const SequenceLine& l) const {
    auto need_slice = [&]() {
      if (!e.slice) fail_at(l, fmt::format("{} needs a slice", role_name(e.role)));
      return *e.slice;
    };
    switch (e.role) {
      case NodeRole::UE: return topo.ue;
      case NodeRole::GNB: return topo.gnb;
      case NodeRole::AMF: return topo.amf;
      case NodeRole::HomeAMF: return topo.home_amf;
      case NodeRole::PCF: return topo.pcf;
      case NodeRole::UDM: return topo.udm;
      case NodeRole::DN: return topo.dn;
      case NodeRole::HomeSMF: return topo.home_smf;
      case NodeRole::SMF:
        switch (need_slice()) {
          case SliceLabel::Previous: return topo.smf_prev;
          case SliceLabel::New: return topo.smf_new;
          case SliceLabel::Home: return topo.home_smf;
        }
        break;
      case NodeRole::N3UPF:
      case NodeRole::GwUPF: {
        auto s = need_slice();
        if (s == SliceLabel::Home) return topo.home_gw;
        const auto& c = topo.chain(s);
        if (c.empty()) fail_at(l, "slice has no UPFs");
        return e.role == NodeRole::N3UPF ? c.front() : c.back();
      }
      case NodeRole::IsgwUPF: {
        auto s = need_slice();
        if (s == SliceLabel::Home) fail_at(l, "the home slice has no ISGW-UPF");
        auto id = topo.isgw(s);
        if (!id) fail_at(l, fmt::format("no ISGW-UPF in the {} slice", slice_label_name(s)));
        return *id;
      }
      case NodeRole::GenericUPF:
        fail_at(l, "GenericUPF is ambiguous; use N3UPF, GwUPF, IsgwUPF or UPF*");
    }
    fail_at(l, "unresolvable endpoint");
  }

  int emit(const SequenceLine& l, NodeId src, NodeId dst, int parent, LinkClass link) {
    if (parent >= 0 && plan.messages[static_cast<std::size_t>(parent)].dst != src)
      fail_at(l, fmt::format("{} sends without having received the triggering message",
                             topo.node(src).name));
    plan.messages.push_back(PlannedMessage{src, dst, link, l.name, parent, l.side, l.line_no});
    return static_cast<int>(plan.messages.size()) - 1;
  }

  LinkClass check_link(const SequenceLine& l, NodeId src, NodeId dst) const {
    auto inferred = link_between(topo.node(src).role, topo.node(dst).role);
    if (!inferred)
      fail_at(l, fmt::format("no link between {} and {}", topo.node(src).name, topo.node(dst).name));
    if (*inferred != l.link)
      fail_at(l, fmt::format("declared link {} but {} -> {} is {}", link_name(l.link),
                             topo.node(src).name, topo.node(dst).name, link_name(*inferred)));
    return *inferred;
  }

  StepPlan run() {
    plan.step = seq.step;
    std::vector<int> tails(seq.lines.size(), kRoot);
    for (std::size_t i = 0; i < seq.lines.size(); ++i) {
      const auto& l = seq.lines[i];
      int trigger = kRoot;
      if (l.after > 0)
        trigger = tails[static_cast<std::size_t>(l.after - 1)];
      else if (l.after < 0 && i > 0)
        trigger = tails[i - 1];
      if (trigger == kGroup) fail_at(l, "a parallel fan-out cannot trigger a message");

      if (l.src.every_upf) fail_at(l, "UPF* source without a preceding UPF* request line");
      if (l.dst.every_upf) {
        if (i + 1 >= seq.lines.size()) fail_at(l, "UPF* request line needs a response line");
        const auto& r = seq.lines[i + 1];
        if (!r.src.every_upf || r.src.slice != l.dst.slice || r.dst != l.src)
          fail_at(r, "expected the UPF* response line matching the previous request");
        if (r.after != -1) fail_at(r, "a UPF* response line cannot set a trigger");
        NodeId ctl = resolve(l.src, l);
        const auto& chain = topo.chain(*l.dst.slice);
        if (*l.dst.slice == SliceLabel::Home) fail_at(l, "UPF* is not defined for the home slice");
        int prev = trigger;
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
          int req = emit(l, ctl, *it, l.parallel ? trigger : prev, check_link(l, ctl, *it));
          prev = emit(r, *it, ctl, req, check_link(r, *it, ctl));
        }
        tails[i] = kGroup;
        tails[i + 1] = l.parallel ? kGroup : prev;
        ++i;
        continue;
      }

      NodeId src = resolve(l.src, l);
      NodeId dst = resolve(l.dst, l);
      auto ps = topo.chain_position(src);
      auto pd = topo.chain_position(dst);
      if (ps && pd && ps->first == pd->first) {
        // Hop by hop along one slice's chain; zero hops when both ends coincide.
        if (l.link != LinkClass::UpfUpf) fail_at(l, "UPF to UPF lines use upf_upf");
        const auto& chain = topo.chain(ps->first);
        int step = pd->second > ps->second ? 1 : -1;
        int prev = trigger;
        for (int k = ps->second; k != pd->second; k += step) {
          NodeId a = chain[static_cast<std::size_t>(k)];
          NodeId b = chain[static_cast<std::size_t>(k + step)];
          prev = emit(l, a, b, prev, LinkClass::UpfUpf);
        }
        if (ps->second == pd->second && trigger >= 0 &&
            plan.messages[static_cast<std::size_t>(trigger)].dst != src)
          fail_at(l, fmt::format("{} sends without having received the triggering message",
                                 topo.node(src).name));
        tails[i] = prev;
        continue;
      }
      if (src == dst) fail_at(l, "source and destination are the same node");
      tails[i] = emit(l, src, dst, trigger, check_link(l, src, dst));
    }
    return std::move(plan);
  }
};

}  // namespace

StepPlan expand(const MessageSequence& seq, const Topology& topo) {
  Expander e{seq, topo, {}};
  return e.run();
}

std::string step_file_name(StepId step) { return std::string(step_name(step)) + ".seq"; }

namespace {

std::optional<StepId> step_from_file(std::string_view file) {
  if (file.size() < 5 || file.substr(file.size() - 4) != ".seq") return std::nullopt;
  return parse_step(file.substr(0, file.size() - 4));
}

}  // namespace

const SequenceLibrary& SequenceLibrary::builtin() {
  static const SequenceLibrary lib = [] {
    SequenceLibrary l;
    for (std::size_t i = 0; i < detail::kEmbeddedSequenceCount; ++i) {
      const auto& f = detail::kEmbeddedSequences[i];
      auto slash = f.path.find('/');
      std::string dir(f.path.substr(0, slash));
      auto step = step_from_file(f.path.substr(slash + 1));
      if (!step) continue;
      l.seqs_[{dir, *step}] =
          parse_sequence(*step, f.text, fmt::format("<builtin>/{}", f.path));
    }
    return l;
  }();
  return lib;
}

SequenceLibrary SequenceLibrary::load(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir))
    throw SequenceError(fmt::format("sequence directory '{}' does not exist", dir.string()));
  SequenceLibrary l = builtin();
  std::vector<std::string> subdirs{"common"};
  for (auto s : kAllSchemes) subdirs.emplace_back(scheme_dir(s));
  for (const auto& sub : subdirs) {
    // A scheme directory present on disk replaces the built-in overrides for that scheme.
    if (sub != "common" && fs::is_directory(dir / sub)) {
      for (auto it = l.seqs_.begin(); it != l.seqs_.end();)
        it = it->first.first == sub ? l.seqs_.erase(it) : std::next(it);
    }
    for (auto step : kAllSteps) {
      fs::path p = dir / sub / step_file_name(step);
      if (!fs::exists(p)) continue;
      std::ifstream in(p);
      std::stringstream ss;
      ss << in.rdbuf();
      l.seqs_[{sub, step}] = parse_sequence(step, ss.str(), p.string());
    }
  }
  return l;
}

SequenceLibrary SequenceLibrary::for_dir(const std::string& dir) {
  return dir.empty() ? builtin() : load(dir);
}

const MessageSequence& SequenceLibrary::get(SchemeKind scheme, StepId step) const {
  auto it = seqs_.find({std::string(scheme_dir(scheme)), step});
  if (it != seqs_.end()) return it->second;
  it = seqs_.find({"common", step});
  if (it != seqs_.end()) return it->second;
  throw SequenceError(fmt::format("no message sequence for step {}", step_name(step)));
}

}  // namespace isho::analytic
