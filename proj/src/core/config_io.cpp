#include "isho/core/config_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace isho {

using nlohmann::json;

namespace {

std::string_view placement_name(IsgwPlacement p) {
  switch (p) {
    case IsgwPlacement::Gw: return "gw";
    case IsgwPlacement::N3: return "n3";
    case IsgwPlacement::Explicit: return "explicit";
  }
  return "gw";
}

IsgwPlacement parse_placement(const std::string& s, const char* field) {
  if (s == "gw") return IsgwPlacement::Gw;
  if (s == "n3") return IsgwPlacement::N3;
  if (s == "explicit") return IsgwPlacement::Explicit;
  throw ConfigError(fmt::format("{}: expected gw, n3 or explicit, got '{}'", field, s));
}

// Reads keys of one object, erroring on anything not consumed.
class Reader {
 public:
  Reader(const json& obj, std::string prefix) : obj_(obj), prefix_(std::move(prefix)) {
    if (!obj_.is_object()) throw ConfigError(fmt::format("{}: expected an object", prefix_));
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError(fmt::format("{}.{}: wrong type", prefix_, key));
    }
  }

  void ms(const char* key, Micros& out) {
    double v = to_ms(out);
    get(key, v);
    out = from_ms(v);
  }

  const json* child(const char* key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!seen_.count(it.key()))
        throw ConfigError(fmt::format("{}{}{}: unknown key", prefix_, prefix_.empty() ? "" : ".",
                                      it.key()));
  }

 private:
  const json& obj_;
  std::string prefix_;
  std::set<std::string> seen_;
};

}  // namespace

json to_json(const RunConfig& c) {
  const auto& d = c.delays;
  const auto& r = c.resources;
  const auto& s = c.signalling;
  const auto& p = c.placement;
  return json{
      {"scheme", std::string(scheme_name(c.scheme))},
      {"seed", c.seed},
      {"delays",
       {{"t_nf_nf", to_ms(d.t_nf_nf)},
        {"t_ue_amf", to_ms(d.t_ue_amf)},
        {"t_ran_hamf", to_ms(d.t_ran_hamf)},
        {"t_gw_dn", to_ms(d.t_gw_dn)},
        {"t_upf_upf", to_ms(d.t_upf_upf)},
        {"t_smf_upf", to_ms(d.t_smf_upf)},
        {"t_ue_upf", to_ms(d.t_ue_upf)},
        {"pd_nf", to_ms(d.pd_nf)},
        {"pd_nonsba", to_ms(d.pd_nonsba)},
        {"pd_upf", to_ms(d.pd_upf)},
        {"residual_latency", to_ms(d.residual_latency)}}},
      {"resources",
       {{"n_upf_prev", r.n_upf_prev},
        {"n_upf_new", r.n_upf_new},
        {"c_p", r.c_p},
        {"c_n", r.c_n},
        {"b_p", r.b_p},
        {"b_n", r.b_n},
        {"omega_p", r.omega_p},
        {"omega_n", r.omega_n}}},
      {"signalling",
       {{"tc_nf_nf", s.tc_nf_nf},
        {"tc_nonsba", s.tc_nonsba},
        {"pc_nf", s.pc_nf},
        {"pc_nonsba", s.pc_nonsba}}},
      {"topology",
       {{"isgw_prev", std::string(placement_name(p.isgw_prev))},
        {"isgw_new", std::string(placement_name(p.isgw_new))},
        {"isgw_prev_index", p.isgw_prev_index},
        {"isgw_new_index", p.isgw_new_index},
        {"distinct_home", p.distinct_home},
        {"snssai_prev", p.snssai_prev},
        {"snssai_new", p.snssai_new},
        {"snssai_home", p.snssai_home}}},
      {"analytic",
       {{"mipv6_form",
         c.analytic.mipv6_form == Mipv6Form::Literal ? "literal" : "corrected"},
        {"br_weights", c.analytic.br_weights == BrWeights::Cpu ? "cpu" : "bandwidth"}}},
      {"stream",
       {{"period_ms", to_ms(c.stream.period)},
        {"lead_ms", to_ms(c.stream.lead)},
        {"tail_packets", c.stream.tail_packets}}},
      {"sequence_dir", c.sequence_dir},
  };
}

RunConfig config_from_json(const json& j) {
  RunConfig c = default_config();
  Reader top(j, "");
  std::string scheme(scheme_name(c.scheme));
  top.get("scheme", scheme);
  auto sk = parse_scheme(scheme);
  if (!sk) throw ConfigError(fmt::format("scheme: unknown scheme '{}'", scheme));
  c.scheme = *sk;
  top.get("seed", c.seed);
  top.get("sequence_dir", c.sequence_dir);

  if (const json* d = top.child("delays")) {
    Reader r(*d, "delays");
    auto& x = c.delays;
    r.ms("t_nf_nf", x.t_nf_nf);
    r.ms("t_ue_amf", x.t_ue_amf);
    r.ms("t_ran_hamf", x.t_ran_hamf);
    r.ms("t_gw_dn", x.t_gw_dn);
    r.ms("t_upf_upf", x.t_upf_upf);
    r.ms("t_smf_upf", x.t_smf_upf);
    r.ms("t_ue_upf", x.t_ue_upf);
    r.ms("pd_nf", x.pd_nf);
    r.ms("pd_nonsba", x.pd_nonsba);
    r.ms("pd_upf", x.pd_upf);
    r.ms("residual_latency", x.residual_latency);
    r.finish();
  }
  if (const json* d = top.child("resources")) {
    Reader r(*d, "resources");
    auto& x = c.resources;
    r.get("n_upf_prev", x.n_upf_prev);
    r.get("n_upf_new", x.n_upf_new);
    r.get("c_p", x.c_p);
    r.get("c_n", x.c_n);
    r.get("b_p", x.b_p);
    r.get("b_n", x.b_n);
    bool has_omega_n = d->contains("omega_n");
    r.get("omega_p", x.omega_p);
    r.get("omega_n", x.omega_n);
    if (!has_omega_n) x.omega_n = 1.0 - x.omega_p;
    r.finish();
  }
  if (const json* d = top.child("signalling")) {
    Reader r(*d, "signalling");
    auto& x = c.signalling;
    r.get("tc_nf_nf", x.tc_nf_nf);
    r.get("tc_nonsba", x.tc_nonsba);
    r.get("pc_nf", x.pc_nf);
    r.get("pc_nonsba", x.pc_nonsba);
    r.finish();
  }
  if (const json* d = top.child("topology")) {
    Reader r(*d, "topology");
    auto& x = c.placement;
    std::string prev(placement_name(x.isgw_prev)), next(placement_name(x.isgw_new));
    r.get("isgw_prev", prev);
    r.get("isgw_new", next);
    x.isgw_prev = parse_placement(prev, "topology.isgw_prev");
    x.isgw_new = parse_placement(next, "topology.isgw_new");
    r.get("isgw_prev_index", x.isgw_prev_index);
    r.get("isgw_new_index", x.isgw_new_index);
    r.get("distinct_home", x.distinct_home);
    r.get("snssai_prev", x.snssai_prev);
    r.get("snssai_new", x.snssai_new);
    r.get("snssai_home", x.snssai_home);
    r.finish();
  }
  if (const json* d = top.child("analytic")) {
    Reader r(*d, "analytic");
    std::string form = c.analytic.mipv6_form == Mipv6Form::Literal ? "literal" : "corrected";
    std::string weights = c.analytic.br_weights == BrWeights::Cpu ? "cpu" : "bandwidth";
    r.get("mipv6_form", form);
    r.get("br_weights", weights);
    if (form == "literal")
      c.analytic.mipv6_form = Mipv6Form::Literal;
    else if (form == "corrected")
      c.analytic.mipv6_form = Mipv6Form::Corrected;
    else
      throw ConfigError("analytic.mipv6_form: expected literal or corrected");
    if (weights == "cpu")
      c.analytic.br_weights = BrWeights::Cpu;
    else if (weights == "bandwidth")
      c.analytic.br_weights = BrWeights::Bandwidth;
    else
      throw ConfigError("analytic.br_weights: expected cpu or bandwidth");
    r.finish();
  }
  if (const json* d = top.child("stream")) {
    Reader r(*d, "stream");
    r.ms("period_ms", c.stream.period);
    r.ms("lead_ms", c.stream.lead);
    r.get("tail_packets", c.stream.tail_packets);
    r.finish();
  }
  top.finish();
  sync_derived(c);
  return c;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path));
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{}: {}", path, e.what()));
  }
  return config_from_json(j);
}

void set_path(json& tree, std::string_view path, json value) {
  json* node = &tree;
  std::string_view rest = path;
  while (true) {
    auto dot = rest.find('.');
    std::string key(rest.substr(0, dot));
    if (!node->is_object() || !node->contains(key))
      throw ConfigError(fmt::format("unknown config key '{}'", path));
    node = &(*node)[key];
    if (dot == std::string_view::npos) break;
    rest = rest.substr(dot + 1);
  }
  if (node->is_object()) throw ConfigError(fmt::format("'{}' is a section, not a value", path));
  *node = std::move(value);
}

void apply_override(json& tree, std::string_view assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0)
    throw ConfigError(fmt::format("override '{}' is not of the form key=value", assignment));
  std::string_view key = assignment.substr(0, eq);
  std::string raw(assignment.substr(eq + 1));
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  set_path(tree, key, std::move(value));
  // Setting omega_p alone keeps the pair consistent.
  if (key == "resources.omega_p" && tree["resources"]["omega_p"].is_number())
    tree["resources"]["omega_n"] = 1.0 - tree["resources"]["omega_p"].get<double>();
}

}  // namespace isho
