#pragma once

#include <iosfwd>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

#include "isho/analytic/model.hpp"
#include "isho/core/config.hpp"

namespace isho::exp {

struct SweepError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class SweepMode { Analytic, Simulated, Both };

std::string_view mode_name(SweepMode m);
SweepMode parse_mode(std::string_view s);

struct SweepSpec {
  std::string preset;
  RunConfig base;
  std::string axis;  // config path, e.g. "delays.pd_nf"
  std::vector<double> values;
  std::vector<SchemeKind> schemes{std::begin(kAllSchemes), std::end(kAllSchemes)};
  SweepMode mode = SweepMode::Analytic;
};

struct SweepRow {
  std::string preset;
  std::string axis;
  double x = 0.0;
  SchemeKind scheme = SchemeKind::Baseline3gpp;
  SweepMode mode = SweepMode::Analytic;  // Analytic or Simulated
  analytic::SchemeMetrics m;
};

const std::vector<std::string>& preset_names();
// "all" expands to every preset.
std::vector<SweepSpec> presets(const std::string& name, const RunConfig& base, SweepMode mode);

// The base config with the axis set to x and the scheme applied.
RunConfig point_config(const SweepSpec& s, double x, SchemeKind scheme);

// Rows ordered by (x, scheme, mode) whatever the job count. Mode Both
// fails if the simulation disagrees with the model.
std::vector<SweepRow> run_sweep(const SweepSpec& s, const analytic::SequenceLibrary& lib,
                                int jobs = 1);

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_csv(std::istream& in);

// ---- claim checks ----

struct ClaimResult {
  std::string id;
  std::string description;
  std::string statistic;
  double measured = 0.0;
  double target = 0.0;
  double tolerance = 0.0;  // percentage points; 0 for exact structural checks
  bool covered = true;  // false when the rows lack a preset the claim needs
  bool pass = false;
};

// Percent reduction of a metric relative to the 3gpp row at the same point.
double reduction_pct(double scheme_value, double baseline_value);
double increase_pct(double scheme_value, double baseline_value);

// Claims whose presets are absent from `rows` come back uncovered.
std::vector<ClaimResult> check_claims(const std::vector<SweepRow>& rows);

void write_report(std::ostream& out, const std::vector<ClaimResult>& results);

// True when at least one claim was evaluated and every evaluated claim holds.
bool all_pass(const std::vector<ClaimResult>& results);

}  // namespace isho::exp
