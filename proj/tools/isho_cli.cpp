// isho: analytic model, protocol simulator and sweep harness for inter-slice
// handover schemes.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "isho/core/config_io.hpp"
#include "isho/experiments/sweep.hpp"
#include "isho/protocols/run.hpp"
#include "isho/wire/gtpu.hpp"
#include "isho/wire/mip.hpp"

using namespace isho;

namespace {

enum Exit { kOk = 0, kUsage = 1, kBadConfig = 2, kClaimFailed = 3, kSimFailed = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string config_path;
  std::vector<std::string> overrides;
};

RunConfig load(const Globals& g) {
  std::string path = g.config_path;
  if (path.empty())
    if (const char* env = std::getenv("ISHO_CONFIG")) path = env;
  RunConfig c = path.empty() ? default_config() : load_config_file(path);
  if (!g.overrides.empty()) {
    auto tree = to_json(c);
    for (const auto& o : g.overrides) apply_override(tree, o);
    c = config_from_json(tree);
  }
  auto v = validate(c);
  if (!v.empty()) throw ConfigError(format_violations(v));
  return c;
}

std::vector<SchemeKind> pick_schemes(const std::string& arg, const RunConfig& c, bool allow_all) {
  if (arg.empty()) return {c.scheme};
  if (arg == "all") {
    if (!allow_all) throw UsageError("--scheme all is not accepted here");
    return {std::begin(kAllSchemes), std::end(kAllSchemes)};
  }
  auto s = parse_scheme(arg);
  if (!s) throw UsageError(fmt::format("unknown scheme '{}' (3gpp, mipv6, gtp, hybrid)", arg));
  return {*s};
}

RunConfig with_scheme(RunConfig c, SchemeKind s) {
  c.scheme = s;
  sync_derived(c);
  auto v = validate(c);
  if (!v.empty()) throw ConfigError(format_violations(v));
  return c;
}

std::string ms(Micros us) { return fmt::format("{:.3f}", static_cast<double>(us.count()) / 1000.0); }

int cmd_analytic(const Globals& g, const std::string& scheme_arg, bool steps) {
  RunConfig base = load(g);
  auto schemes = pick_schemes(scheme_arg, base, true);
  auto lib = analytic::SequenceLibrary::for_dir(base.sequence_dir);
  fmt::print("{:<8} {:>12} {:>15} {:>8} {:>8} {:>8}\n", "scheme", "isho_delay_ms",
             "isho_interval_ms", "CR", "BR", "SC");
  std::vector<std::pair<SchemeKind, analytic::StepDelays>> detail;
  for (auto s : schemes) {
    RunConfig c = with_scheme(base, s);
    auto m = analytic::evaluate(c, lib);
    fmt::print("{:<8} {:>12} {:>15} {:>8g} {:>8g} {:>8g}\n", scheme_name(s), ms(m.isho_delay),
               ms(m.isho_interval), m.cpu_overhead, m.bw_overhead, m.signalling_cost);
    if (steps)
      detail.emplace_back(s, analytic::step_delays(analytic::expand_all(s, lib, c.topology),
                                                   c.delays, c.topology));
  }
  for (const auto& [s, t] : detail) {
    fmt::print("\nstep delays, {} (ms):\n", scheme_name(s));
    for (auto step : analytic::scheme_steps(s))
      fmt::print("  {:<16} {}\n", step_name(step), ms(t.at(step)));
  }
  return kOk;
}

int cmd_simulate(const Globals& g, const std::string& scheme_arg, const std::string& trace_path,
                 const std::string& pcap_path) {
  RunConfig c = load(g);
  auto schemes = pick_schemes(scheme_arg, c, false);
  c = with_scheme(c, schemes.front());
  proto::RunResult r;
  try {
    r = proto::run_scheme(c);
  } catch (const proto::ProtocolError& e) {
    fmt::print(stderr, "simulation failed: {}\nnode state:\n{}", e.what(), e.snapshot);
    return kSimFailed;
  } catch (const sim::SimError& e) {
    fmt::print(stderr, "simulation failed: {}\n", e.what());
    return kSimFailed;
  }
  const auto& m = r.metrics;
  fmt::print("scheme            {}\n", scheme_name(c.scheme));
  fmt::print("isho_delay_ms     {}\n", ms(m.isho_delay));
  fmt::print("isho_interval_ms  {}\n", ms(m.isho_interval));
  fmt::print("cr                {:g}\n", m.cpu_overhead);
  fmt::print("br                {:g}\n", m.bw_overhead);
  fmt::print("sc                {:g}\n", m.signalling_cost);
  for (const auto& [step, t] : r.steps)
    fmt::print("step {:<16} {:>9} .. {:>9} ms\n", step_name(step), ms(t.started), ms(t.done));
  const auto& s = r.stream;
  fmt::print("stream emitted={} window={} window_exactly_once={} delivered={} duplicates={} lost={} "
             "via_prev={} via_new={} tunnelled={} late_prev={}\n",
             s.emitted, s.window_emitted, s.window_exactly_once, s.delivered, s.duplicates, s.lost,
             s.via_prev, s.via_new, s.tunnelled, s.late_prev);
  if (!trace_path.empty()) {
    if (trace_path == "-") {
      r.trace.write_log(std::cout);
    } else {
      std::ofstream out(trace_path);
      if (!out) throw std::runtime_error("cannot write " + trace_path);
      r.trace.write_log(out);
    }
  }
  if (!pcap_path.empty()) proto::write_pcap(r, pcap_path);
  return kOk;
}

std::vector<exp::SweepSpec> sweep_specs(const std::string& target, const RunConfig& base,
                                        exp::SweepMode mode) {
  if (target.size() > 5 && target.ends_with(".json")) {
    std::ifstream in(target);
    if (!in) throw UsageError("cannot read sweep spec " + target);
    auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw UsageError(target + ": not a JSON object");
    exp::SweepSpec s;
    s.base = base;
    s.mode = mode;
    s.preset = j.value("name", "custom");
    if (!j.contains("axis") || !j.contains("values"))
      throw UsageError(target + ": needs \"axis\" and \"values\"");
    s.axis = j["axis"].get<std::string>();
    s.values = j["values"].get<std::vector<double>>();
    if (j.contains("schemes")) {
      s.schemes.clear();
      for (const auto& n : j["schemes"]) {
        auto k = parse_scheme(n.get<std::string>());
        if (!k) throw UsageError(fmt::format("{}: unknown scheme {}", target, n.dump()));
        s.schemes.push_back(*k);
      }
    }
    return {s};
  }
  try {
    return exp::presets(target, base, mode);
  } catch (const exp::SweepError& e) {
    throw UsageError(fmt::format("{}; presets: {}, all", e.what(),
                                 fmt::join(exp::preset_names(), ", ")));
  }
}

int cmd_sweep(const Globals& g, const std::string& target, const std::string& out_path, int jobs,
              const std::string& mode_arg) {
  exp::SweepMode mode;
  try {
    mode = exp::parse_mode(mode_arg);
  } catch (const exp::SweepError& e) {
    throw UsageError(e.what());
  }
  RunConfig base = load(g);
  auto specs = sweep_specs(target, base, mode);
  auto lib = analytic::SequenceLibrary::for_dir(base.sequence_dir);
  std::vector<exp::SweepRow> rows;
  try {
    for (const auto& s : specs) {
      auto r = exp::run_sweep(s, lib, jobs);
      rows.insert(rows.end(), r.begin(), r.end());
    }
  } catch (const proto::ProtocolError& e) {
    fmt::print(stderr, "simulation failed: {}\nnode state:\n{}", e.what(), e.snapshot);
    return kSimFailed;
  } catch (const exp::SweepError& e) {
    fmt::print(stderr, "sweep failed: {}\n", e.what());
    return kSimFailed;
  }
  if (out_path.empty() || out_path == "-") {
    exp::write_csv(std::cout, rows);
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    exp::write_csv(out, rows);
  }
  return kOk;
}

int cmd_check(const Globals& g, const std::vector<std::string>& csvs, const std::string& report) {
  std::vector<exp::SweepRow> rows;
  if (csvs.empty()) {
    RunConfig base = load(g);
    auto lib = analytic::SequenceLibrary::for_dir(base.sequence_dir);
    for (const auto& s : exp::presets("all", base, exp::SweepMode::Analytic)) {
      auto r = exp::run_sweep(s, lib);
      rows.insert(rows.end(), r.begin(), r.end());
    }
  } else {
    for (const auto& path : csvs) {
      std::ifstream in(path);
      if (!in) throw UsageError("cannot read " + path);
      auto r = exp::read_csv(in);
      rows.insert(rows.end(), r.begin(), r.end());
    }
  }
  auto results = exp::check_claims(rows);
  exp::write_report(std::cout, results);
  if (!report.empty()) {
    std::ofstream out(report);
    exp::write_report(out, results);
  }
  return exp::all_pass(results) ? kOk : kClaimFailed;
}

wire::Bytes from_hex(std::string_view h) {
  wire::Bytes b;
  for (std::size_t i = 0; i + 1 < h.size(); i += 2)
    b.push_back(static_cast<std::uint8_t>(std::stoi(std::string(h.substr(i, 2)), nullptr, 16)));
  return b;
}

int cmd_codec_selftest() {
  int failures = 0;
  auto report = [&](std::string_view what, bool ok) {
    fmt::print("{} {}\n", ok ? "PASS" : "FAIL", what);
    failures += !ok;
  };
  std::array<std::uint8_t, 4> zeros{};
  report("gtpu golden", wire::encode_gtpu(1, zeros) == from_hex("30ff00040000000100000000"));
  report("hoti golden", wire::encode_mip(wire::HomeTestInit{0x0101010101010101ULL}) ==
                            from_hex("3b010100000000000101010101010101"));
  wire::BindingUpdate bu;
  bu.sequence = 7;
  bu.flags = wire::BindingUpdate::kAck;
  bu.lifetime = 4;
  bu.home_nonce_index = 1;
  bu.careof_nonce_index = 2;
  bu.authenticator.fill(0xaa);
  report("bu golden", wire::encode_mip(bu) ==
                          from_hex("3b0305000000000780000004040400010002050caaaaaaaaaaaaaaaaaaaaaaaa"));
  report("back golden", wire::encode_mip(wire::BindingAck{0, false, 7, 4}) ==
                            from_hex("3b010600000000000007000401020000"));

  std::mt19937_64 rng(2024);
  bool rt = true;
  for (int i = 0; i < 1000 && rt; ++i) {
    wire::Bytes inner(1 + rng() % 200);
    for (auto& b : inner) b = static_cast<std::uint8_t>(rng());
    auto teid = static_cast<std::uint32_t>(rng());
    auto p = wire::decode_gtpu(wire::encode_gtpu(teid, inner));
    rt = p.header.teid == teid && p.inner == inner;
  }
  report("gtpu round trip x1000", rt);
  rt = true;
  for (int i = 0; i < 1000 && rt; ++i) {
    wire::HomeTest m{static_cast<std::uint16_t>(rng()), rng(), rng()};
    rt = wire::decode_mip(wire::encode_mip(m)) == wire::MipMessage{m};
  }
  report("mip round trip x1000", rt);
  return failures ? kClaimFailed : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inter-slice handover: analytic model, simulator and sweeps"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("-c,--config", g.config_path, "JSON config file (default: $ISHO_CONFIG)");
  app.add_option("--set", g.overrides, "override a config value, e.g. delays.pd_nf=5");

  std::string scheme, trace, pcap, target, out, mode = "analytic", report;
  bool steps = false;
  int jobs = 1;
  std::vector<std::string> csvs;

  auto* analytic = app.add_subcommand("analytic", "evaluate the analytic model");
  analytic->add_option("-s,--scheme", scheme, "3gpp, mipv6, gtp, hybrid or all");
  analytic->add_flag("--steps", steps, "also print per-step delays");

  auto* simulate = app.add_subcommand("simulate", "run the protocol simulation");
  simulate->add_option("-s,--scheme", scheme, "3gpp, mipv6, gtp or hybrid");
  simulate->add_option("--trace", trace, "write the event log ('-' for stdout)");
  simulate->add_option("--pcap", pcap, "write exchanged messages as a pcap file");

  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep and write CSV");
  sweep->add_option("preset", target, "preset name, 'all', or a JSON sweep spec")->required();
  sweep->add_option("-o,--output", out, "CSV output file (default stdout)");
  sweep->add_option("-j,--jobs", jobs, "worker threads")->check(CLI::Range(1, 256));
  sweep->add_option("-m,--mode", mode, "analytic, simulated or both");

  auto* check = app.add_subcommand("check", "check the reproduction claims");
  check->add_option("csv", csvs, "sweep CSVs (default: run every preset)");
  check->add_option("--report", report, "also write the claim table here");

  auto* selftest = app.add_subcommand("codec-selftest", "golden vectors and round trips");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*analytic) return cmd_analytic(g, scheme, steps);
    if (*simulate) return cmd_simulate(g, scheme, trace, pcap);
    if (*sweep) return cmd_sweep(g, target, out, jobs, mode);
    if (*check) return cmd_check(g, csvs, report);
    if (*selftest) return cmd_codec_selftest();
  } catch (const UsageError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kUsage;
  } catch (const ConfigError& e) {
    fmt::print(stderr, "invalid configuration:\n{}\n", e.what());
    return kBadConfig;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kSimFailed;
  }
  return kUsage;
}
