#include <gtest/gtest.h>

#include <cmath>
#include <regex>

#include "acrp/bench.hpp"
#include "acrp/errors.hpp"
#include "acrp/instances.hpp"
#include "acrp/plot.hpp"

using namespace acrp;

namespace {

int count(const std::string& s, const std::string& needle) {
  int n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

BenchmarkRecord sample_record() {
  BenchmarkRecord r;
  r.id = "CP-4";
  r.n_aircraft = 4;
  r.n_c = 6;
  r.pf_pct = 0.0;
  r.pi_pct = 0.0;
  r.preprocess_s = 0.0012;
  r.disj = {"optimal", 6.2e-4, 6.25e-4, 0.8, 0.31, 0, false, true};
  r.shadow = {"timeout", 5e-4, 7e-4, 28.5, 600.0, 3, true, true};
  r.delta_ub = 7.5e-5;
  r.gain_pct = std::nan("");
  return r;
}

}  // namespace

TEST(Suites, NamedSuiteSizes) {
  EXPECT_EQ(named_suite("cp").entries.size(), 5u);
  EXPECT_EQ(named_suite("fp").entries.size(), 3u);
  EXPECT_EQ(named_suite("gp").entries.size(), 2u);
  EXPECT_EQ(named_suite("golden").entries.size(), 10u);
  EXPECT_EQ(named_suite("rcp30").entries.size(), 100u);
  EXPECT_EQ(named_suite("cp15").heading_deg, 15.0);
  EXPECT_THROW(named_suite("nope"), std::invalid_argument);
}

TEST(Csv, RoundTrip) {
  BenchmarkRecord err;
  err.id = "RCP-30-s3";
  err.error = "GenerationFailed";
  const std::vector<BenchmarkRecord> recs{sample_record(), err};
  const std::string text = to_csv(recs);
  EXPECT_EQ(text.substr(0, csv_header().size()), csv_header());
  const auto back = records_from_csv(text);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].id, "CP-4");
  EXPECT_EQ(back[0].disj.ub, 6.25e-4);
  EXPECT_TRUE(back[0].shadow.timeout);
  EXPECT_TRUE(std::isnan(back[0].gain_pct));
  EXPECT_EQ(back[1].error, "GenerationFailed");
  EXPECT_EQ(to_csv(back), text);
  EXPECT_THROW(records_from_csv("id\n1,2\n"), ParseError);
}

TEST(Bench, SmokeRecord) {
  const SuiteSpec suite = named_suite("smoke");
  SolveParams p;
  p.time_limit = 120.0;
  const BenchmarkRecord r = bench_instance(gen_cp(4), suite, p);
  EXPECT_TRUE(r.error.empty()) << r.error;
  EXPECT_EQ(r.n_c, 6);
  EXPECT_EQ(r.pf_pct, 0.0);
  EXPECT_EQ(r.pi_pct, 0.0);
  EXPECT_TRUE(r.disj.verified);
  EXPECT_TRUE(r.shadow.verified);
  EXPECT_NEAR(r.disj.ub, 6.2e-4, 0.05 * 6.2e-4);
  EXPECT_NEAR(r.delta_ub, r.shadow.ub - r.disj.ub, 1e-15);
  EXPECT_EQ(r.disj.n_i, 0);
}

TEST(Sweep, RejectsWeightsOutsideUnitInterval) {
  const Instance inst = gen_cp(4);
  EXPECT_THROW(sweep_w(inst, {0.0}, {}), std::invalid_argument);
  EXPECT_THROW(sweep_w(inst, {1.0}, {}), std::invalid_argument);
  const auto rows = sweep_w(inst, {0.3, 0.7}, {});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_GE(rows[0].sum_theta, rows[1].sum_theta - 1e-9);
  EXPECT_LE(rows[0].sum_q, rows[1].sum_q + 1e-9);
  EXPECT_EQ(count(sweep_csv(rows), "\n"), 3);
}

TEST(Plot, NominalCircleHasFourRays) {
  const std::string svg = plot_svg(gen_cp(4), {});
  EXPECT_EQ(count(svg, "stroke-dasharray=\"4 3\""), 4);
  EXPECT_EQ(svg, plot_svg(gen_cp(4), {}));
  EXPECT_NE(svg.find("<svg"), std::string::npos);
}

TEST(Plot, UnknownPairThrows) {
  PlotOptions o;
  o.mode = PlotMode::VelocityPlane;
  o.pair = {0, 7};
  EXPECT_THROW(plot_svg(gen_cp(4), {}, o), UnknownPair);
  o.pair = {2, 2};
  EXPECT_THROW(plot_svg(gen_cp(4), {}, o), UnknownPair);
}

TEST(Plot, SolutionPointLeavesTheConflictWedge) {
  const Instance inst = gen_cp(4);
  const SolveOutcome out = solve_2d(inst);
  ASSERT_TRUE(out.has_incumbent());
  PlotOptions o;
  o.mode = PlotMode::VelocityPlane;
  o.pair = {0, 2};
  const std::string svg = plot_svg(inst, out.controls, o);
  EXPECT_EQ(svg, plot_svg(inst, out.controls, o));

  std::smatch m;
  const std::regex wedge(R"re(id="conflict-wedge" points="([-0-9.]+),([-0-9.]+) ([-0-9.]+),([-0-9.]+) ([-0-9.]+),([-0-9.]+)")re");
  ASSERT_TRUE(std::regex_search(svg, m, wedge));
  double px[3], py[3];
  for (int k = 0; k < 3; ++k) {
    px[k] = std::stod(m[1 + 2 * k]);
    py[k] = std::stod(m[2 + 2 * k]);
  }
  const std::regex sol(R"re(id="solution" cx="([-0-9.]+)" cy="([-0-9.]+)")re");
  ASSERT_TRUE(std::regex_search(svg, m, sol));
  const double sx = std::stod(m[1]);
  const double sy = std::stod(m[2]);

  // Signed pixel distance to each edge; strictly inside means all on the
  // same side by more than the 0.001 px output rounding.
  double lo = 1e300;
  double hi = -1e300;
  for (int k = 0; k < 3; ++k) {
    const int j = (k + 1) % 3;
    const double ex = px[j] - px[k];
    const double ey = py[j] - py[k];
    const double cross = (ex * (sy - py[k]) - ey * (sx - px[k])) / std::hypot(ex, ey);
    lo = std::min(lo, cross);
    hi = std::max(hi, cross);
  }
  const bool inside = lo > 0.01 || hi < -0.01;
  EXPECT_FALSE(inside);
}
