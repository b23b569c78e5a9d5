#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "isho/analytic/sequence.hpp"
#include "isho/core/config_io.hpp"
#include "isho/experiments/sweep.hpp"

using namespace isho;
using namespace isho::exp;

namespace {

const analytic::SequenceLibrary& lib() { return analytic::SequenceLibrary::builtin(); }

std::vector<SweepRow> sweep(const std::string& preset, SweepMode mode = SweepMode::Analytic,
                            int jobs = 1) {
  std::vector<SweepRow> rows;
  for (const auto& s : presets(preset, default_config(), mode)) {
    auto r = run_sweep(s, lib(), jobs);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  return rows;
}

std::string csv(const std::vector<SweepRow>& rows) {
  std::ostringstream s;
  write_csv(s, rows);
  return s.str();
}

}  // namespace

TEST(Presets, KnownNames) {
  EXPECT_EQ(preset_names().size(), 6u);
  EXPECT_EQ(presets("all", default_config(), SweepMode::Analytic).size(), 6u);
  EXPECT_THROW(presets("fig9", default_config(), SweepMode::Analytic), SweepError);
  for (const auto& n : preset_names()) {
    auto p = presets(n, default_config(), SweepMode::Analytic);
    ASSERT_EQ(p.size(), 1u);
    EXPECT_EQ(p[0].values, (std::vector<double>{1, 2, 3, 4, 5}));
  }
}

TEST(Presets, PointConfigSetsAxisAndScheme) {
  auto s = presets("fig4", default_config(), SweepMode::Analytic)[0];
  auto c = point_config(s, 3, SchemeKind::HybridMipv6Gtp);
  EXPECT_EQ(c.delays.pd_nf, Micros{3000});
  EXPECT_EQ(c.scheme, SchemeKind::HybridMipv6Gtp);
  EXPECT_TRUE(validate(c).empty());

  auto f5 = presets("fig5", default_config(), SweepMode::Analytic)[0];
  auto c5 = point_config(f5, 4, SchemeKind::Gtpv1U);
  EXPECT_EQ(c5.resources.n_upf_new, 4);
  EXPECT_DOUBLE_EQ(c5.resources.omega_p, 0.2);
  EXPECT_EQ(c5.placement.isgw_prev, IsgwPlacement::N3);
}

TEST(Sweep, Fig4Shape) {
  auto rows = sweep("fig4");
  ASSERT_EQ(rows.size(), 20u);
  std::set<std::pair<double, SchemeKind>> cells;
  for (const auto& r : rows) cells.insert({r.x, r.scheme});
  EXPECT_EQ(cells.size(), 20u);
  EXPECT_EQ(rows.front().axis, "delays.pd_nf");
}

TEST(Sweep, JobCountDoesNotChangeOutput) {
  for (auto mode : {SweepMode::Analytic, SweepMode::Both})
    EXPECT_EQ(csv(sweep("fig4", mode, 1)), csv(sweep("fig4", mode, 8)));
}

TEST(Sweep, BothModePairsRows) {
  auto rows = sweep("fig4-tnf", SweepMode::Both, 4);
  ASSERT_EQ(rows.size(), 40u);
  for (std::size_t i = 0; i < rows.size(); i += 2) {
    EXPECT_EQ(rows[i].mode, SweepMode::Analytic);
    EXPECT_EQ(rows[i + 1].mode, SweepMode::Simulated);
    EXPECT_EQ(rows[i].m.isho_delay, rows[i + 1].m.isho_delay);
    EXPECT_EQ(rows[i].m.isho_interval, rows[i + 1].m.isho_interval);
  }
}

TEST(Csv, RoundTrip) {
  auto rows = sweep("fig7");
  auto text = csv(rows);
  std::istringstream in(text);
  auto back = read_csv(in);
  ASSERT_EQ(back.size(), rows.size());
  EXPECT_EQ(csv(back), text);
  EXPECT_EQ(text.rfind("# preset: fig7", 0), 0u);
}

TEST(Csv, RejectsGarbage) {
  std::istringstream in("axis,scheme\n1,warp\n");
  EXPECT_ANY_THROW(read_csv(in));
}

TEST(Claims, PercentHelpers) {
  EXPECT_NEAR(reduction_pct(60, 100), 40, 1e-9);
  EXPECT_NEAR(increase_pct(103, 100), 3, 1e-9);
}

TEST(Claims, AllHoldOnFullSweep) {
  auto results = check_claims(sweep("all"));
  ASSERT_EQ(results.size(), 13u);
  for (const auto& r : results) {
    EXPECT_TRUE(r.covered) << r.id;
    EXPECT_TRUE(r.pass) << r.id << " measured " << r.measured;
  }
  EXPECT_TRUE(all_pass(results));
}

TEST(Claims, UncoveredWhenPresetMissing) {
  auto results = check_claims(sweep("fig4"));
  int covered = 0;
  for (const auto& r : results) covered += r.covered;
  EXPECT_EQ(covered, 4);  // the fig4 claims
  EXPECT_TRUE(all_pass(results));
  std::ostringstream out;
  write_report(out, results);
  EXPECT_NE(out.str().find("NOT COVERED"), std::string::npos);
  EXPECT_FALSE(all_pass(check_claims({})));
}

TEST(Claims, BrokenResultFails) {
  auto rows = sweep("fig7");
  for (auto& r : rows)
    if (r.scheme == SchemeKind::Gtpv1U) r.m.signalling_cost *= 2;
  auto results = check_claims(rows);
  EXPECT_FALSE(all_pass(results));
}
