// Copyright 2026 The lrperc Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lrperc/experiments.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lrperc/plot.hpp"

namespace lrperc {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("lrperc_exp_" + name);
  fs::remove_all(dir);
  return dir;
}

const SummaryRow* find_row(const EstimateReport& r, const std::string& label) {
  for (const SummaryRow& row : r.rows) {
    if (row.label == label) return &row;
  }
  return nullptr;
}

TEST(PlanEntries, ParsesCommentsAndRejectsDuplicates) {
  std::istringstream in("# comment\nkind = threshold\n\n graph=g \nk=2,3\n");
  const PlanEntries e = parse_plan_entries(in);
  EXPECT_EQ(e.at("kind"), "threshold");
  EXPECT_EQ(e.at("graph"), "g");
  EXPECT_EQ(e.at("k"), "2,3");
  std::istringstream dup("k=2\nk=3\n");
  EXPECT_THROW(parse_plan_entries(dup), std::invalid_argument);
  std::istringstream bad("no equals sign\n");
  EXPECT_THROW(parse_plan_entries(bad), std::invalid_argument);
}

TEST(MakePlan, Defaults) {
  const StudyPlan t = make_plan(StudyKind::threshold, {});
  EXPECT_EQ(t.d, 2);
  EXPECT_EQ(t.k, std::vector<int>{3});
  EXPECT_EQ(t.sizes, (std::vector<std::int64_t>{64, 128}));
  EXPECT_EQ(t.p_grid.size(), 2001u);
  EXPECT_EQ(t.runs, kDefaultRuns);
  EXPECT_EQ(t.seed, kDefaultSeed);
  EXPECT_EQ(t.event, Event::wrap);
  EXPECT_EQ(t.boundary, Boundary::periodic);

  const StudyPlan th = make_plan(StudyKind::theta, {});
  EXPECT_EQ(th.sizes, std::vector<std::int64_t>{64});
  EXPECT_EQ(th.radii, (std::vector<std::uint32_t>{8, 16}));

  const StudyPlan l = make_plan(StudyKind::limit, {});
  EXPECT_EQ(l.ladder, (std::vector<int>{2, 3, 5, 8}));

  const StudyPlan c = make_plan(StudyKind::conjecture, {{"k", "3"}});
  EXPECT_EQ(c.k_prime, std::vector<int>{4});
  EXPECT_EQ(c.p_grid.size(), 21u);

  const StudyPlan s = make_plan(StudyKind::sandwich, {});
  EXPECT_EQ(s.k, std::vector<int>{4});

  const StudyPlan f = make_plan(StudyKind::threshold, {{"event", "face-to-face"}});
  EXPECT_EQ(f.boundary, Boundary::free);
}

TEST(MakePlan, Errors) {
  const auto bad = [](StudyKind kind, PlanEntries e) {
    EXPECT_THROW(make_plan(kind, e), std::invalid_argument);
  };
  bad(StudyKind::threshold, {{"colour", "red"}});
  bad(StudyKind::threshold, {{"kind", "theta"}});
  bad(StudyKind::threshold, {{"p_grid", "0:1"}});
  bad(StudyKind::threshold, {{"p_grid", "0:2:0.1"}});
  bad(StudyKind::threshold, {{"sizes", "64"}});
  bad(StudyKind::threshold, {{"k", "1"}});
  bad(StudyKind::threshold, {{"graph", "zd"}, {"k", "3"}});
  bad(StudyKind::threshold, {{"dim", "3"}});
  bad(StudyKind::threshold, {{"runs", "0"}});
  bad(StudyKind::threshold, {{"runs", "ten"}});
  bad(StudyKind::threshold, {{"mode", "edge"}});
  bad(StudyKind::threshold, {{"event", "reach"}});
  bad(StudyKind::sandwich, {{"graph", "g"}});
  bad(StudyKind::limit, {{"k", "5,3"}});
  bad(StudyKind::theta, {{"radius", "8,4"}});
  bad(StudyKind::theta, {{"radius", "0"}});
  bad(StudyKind::conjecture, {{"k", "3"}, {"k_prime", "4,5"}});
  bad(StudyKind::theta, {{"k_prime", "4"}});
  bad(StudyKind::threshold, {{"d", "0"}});
}

TEST(MakePlan, TextRoundTrip) {
  const PlanEntries cases[] = {
      {{"graph", "zd"}, {"dim", "3"}, {"sizes", "8,16"}, {"runs", "50"}},
      {{"graph", "slab-tilde"}, {"k", "2,3"}, {"mode", "bond"}, {"svg", "x.svg"}},
  };
  for (const PlanEntries& e : cases) {
    const StudyPlan plan = make_plan(StudyKind::threshold, e);
    std::istringstream in(plan.to_text());
    const StudyPlan again = make_plan(StudyKind::threshold, parse_plan_entries(in));
    EXPECT_EQ(again.to_text(), plan.to_text());
  }
  const StudyPlan l = make_plan(StudyKind::limit, {{"k", "2,2,4"}});
  std::istringstream in(l.to_text());
  EXPECT_EQ(make_plan(StudyKind::limit, parse_plan_entries(in)).ladder,
            (std::vector<int>{2, 2, 4}));
}

TEST(AlignedSizes, RoundUpAndKeepRatio) {
  EXPECT_EQ(aligned_sizes({64, 128}, 3), (std::vector<std::int64_t>{66, 132}));
  EXPECT_EQ(aligned_sizes({64, 128}, 5), (std::vector<std::int64_t>{65, 130}));
  EXPECT_EQ(aligned_sizes({64, 128}, 8), (std::vector<std::int64_t>{64, 128}));
  EXPECT_EQ(aligned_sizes({64, 100}, 8), (std::vector<std::int64_t>{64, 128}));
  EXPECT_EQ(aligned_sizes({10}, 4), std::vector<std::int64_t>{12});
}

ThresholdEstimate est(double p, double lo, double hi) {
  ThresholdEstimate e;
  e.crossed = true;
  e.p_c = p;
  e.ci = {lo, hi};
  return e;
}

TEST(Verdicts, Thresholds) {
  EXPECT_EQ(compare_thresholds(est(0.5, 0.49, 0.51), est(0.6, 0.59, 0.61)).verdict,
            "ordered");
  EXPECT_EQ(compare_thresholds(est(0.6, 0.59, 0.61), est(0.5, 0.49, 0.51)).verdict,
            "inverted");
  const Verdict overlap =
      compare_thresholds(est(0.5, 0.45, 0.55), est(0.52, 0.5, 0.6));
  EXPECT_EQ(overlap.verdict, "indistinguishable");
  EXPECT_EQ(overlap.flags, "overlap");
  const Verdict missing = compare_thresholds(ThresholdEstimate{}, est(0.5, 0.4, 0.6));
  EXPECT_EQ(missing.verdict, "indistinguishable");
  EXPECT_EQ(missing.flags, "no-crossing");
  ThresholdEstimate no_ci = est(0.5, 0, 0);
  no_ci.ci = {};
  EXPECT_EQ(compare_thresholds(no_ci, est(0.6, 0.59, 0.61)).flags, "no-interval");
}

TEST(Verdicts, Reach) {
  EXPECT_EQ(compare_reach(1, {1, 1}, 1, {1, 1}), "tie");
  EXPECT_EQ(compare_reach(0, {0, 0}, 0, {0, 0}), "tie");
  EXPECT_EQ(compare_reach(0.6, {0.55, 0.65}, 0.4, {0.35, 0.45}), "violation");
  EXPECT_EQ(compare_reach(0.4, {0.35, 0.45}, 0.6, {0.55, 0.65}), "consistent");
  EXPECT_EQ(compare_reach(0.5, {0.4, 0.6}, 0.55, {0.45, 0.65}), "indistinguishable");
}

TEST(StudyView, SlabSizesMustAlign) {
  const LatticeSpec spec(2, {3});
  EXPECT_THROW(make_study_view(Family::slab, spec, 10, Boundary::periodic),
               std::invalid_argument);
  const GraphView s = make_study_view(Family::slab, spec, 12, Boundary::periodic);
  const GraphView g = make_study_view(Family::decorated, spec, 12, Boundary::periodic);
  EXPECT_EQ(s.volume(), g.volume());
}

StudyPlan small_plan(StudyKind kind, PlanEntries e) {
  e.emplace("runs", "300");
  e.emplace("resamples", "100");
  e.emplace("samples", "500");
  e.emplace("seed", "17");
  return make_plan(kind, e);
}

TEST(Studies, ThresholdOfSquareLattice) {
  const EstimateReport r = run_study(small_plan(
      StudyKind::threshold,
      {{"graph", "zd"}, {"sizes", "12,24"}, {"p_grid", "0:1:0.005"}}));
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(r.rows[0].quantity, "p_c");
  EXPECT_EQ(r.rows[0].verdict, "estimated");
  EXPECT_GT(r.rows[0].estimate, 0.5);
  EXPECT_LT(r.rows[0].estimate, 0.7);
  EXPECT_EQ(r.curves.size(), 2u);
  EXPECT_EQ(r.markers.size(), 1u);
}

TEST(Studies, DegenerateGridGivesNoCrossing) {
  const EstimateReport r = run_study(small_plan(
      StudyKind::threshold,
      {{"graph", "zd"}, {"sizes", "8,16"}, {"p_grid", "0.9:1:0.01"}}));
  EXPECT_EQ(r.rows[0].verdict, "no-crossing");
  EXPECT_NE(r.rows[0].flags.find("no-crossing"), std::string::npos);
}

TEST(Studies, SandwichSmall) {
  const EstimateReport r = run_study(small_plan(
      StudyKind::sandwich,
      {{"d", "1"}, {"k", "2"}, {"sizes", "16,32"}, {"hyper_sizes", "6,12"},
       {"p_grid", "0:1:0.01"}}));
  EXPECT_TRUE(r.structure.passed());
  EXPECT_EQ(r.structure.claims.size(), 10u);
  EXPECT_NE(find_row(r, "Z2 <= G(2)"), nullptr);
  EXPECT_NE(find_row(r, "G(2) <= S(2)"), nullptr);
  EXPECT_EQ(r.markers.size(), 3u);
  int theorem_rows = 0;
  for (const SummaryRow& row : r.rows) {
    if (row.basis == "theorem") {
      ++theorem_rows;
      EXPECT_EQ(row.verdict, "PASS");
    }
  }
  EXPECT_EQ(theorem_rows, 10);
}

TEST(Studies, LimitFlags) {
  const EstimateReport single = run_study(small_plan(
      StudyKind::limit,
      {{"d", "1"}, {"k", "2"}, {"sizes", "8,16"}, {"hyper_sizes", "4,8"},
       {"p_grid", "0:1:0.01"}}));
  const SummaryRow* t = find_row(single, "trend");
  ASSERT_NE(t, nullptr);
  EXPECT_NE(t->flags.find("single-entry"), std::string::npos);

  const EstimateReport repeated = run_study(small_plan(
      StudyKind::limit,
      {{"d", "1"}, {"k", "2,2"}, {"sizes", "8,16"}, {"hyper_sizes", "4,8"},
       {"p_grid", "0:1:0.01"}}));
  t = find_row(repeated, "trend");
  ASSERT_NE(t, nullptr);
  EXPECT_NE(t->flags.find("repeated-k"), std::string::npos);
  const SummaryRow* pair = find_row(repeated, "G(2) <= G(2)");
  ASSERT_NE(pair, nullptr);
  EXPECT_NE(pair->flags.find("repeated-k"), std::string::npos);
}

// Equal scale vectors are sampled with independent seeds, so interior
// points agree only within noise; the endpoints are exact ties.
TEST(Studies, ProbeWithEqualScales) {
  const EstimateReport r = run_study(make_plan(
      StudyKind::conjecture,
      {{"d", "2"}, {"k", "2"}, {"k_prime", "2"}, {"sizes", "16"}, {"radius", "4"},
       {"p_grid", "0:1:0.25"}, {"runs", "2000"}, {"resamples", "100"}}));
  ASSERT_EQ(r.points.size(), 5u);
  for (const PointRow& pt : r.points) {
    EXPECT_NEAR(pt.estimate_k, pt.estimate_k_prime, 0.05) << "p=" << pt.p;
  }
  EXPECT_EQ(r.points.front().verdict, "tie");
  EXPECT_EQ(r.points.back().verdict, "tie");
  const SummaryRow* tally = find_row(r, "tally");
  ASSERT_NE(tally, nullptr);
  EXPECT_NE(tally->flags.find("k-equals-k-prime"), std::string::npos);
  EXPECT_NE(tally->flags.find("tie=2"), std::string::npos);
}

TEST(Studies, ThetaCurvesAndBands) {
  const EstimateReport r = run_study(small_plan(
      StudyKind::theta,
      {{"graph", "f"}, {"k", "2"}, {"sizes", "16"}, {"radius", "2,4"},
       {"p_grid", "0:1:0.1"}}));
  ASSERT_EQ(r.curves.size(), 2u);
  for (const CurveRecord& c : r.curves) {
    ASSERT_EQ(c.band.lo.size(), c.curve.q.size());
    EXPECT_EQ(c.curve.q.front(), 0.0);
    EXPECT_EQ(c.curve.q.back(), 1.0);
  }
  EXPECT_EQ(r.curves[0].name, "00_f_d2_k2_L16_R2");
}

TEST(WriteReport, FilesAndDeterminism) {
  const StudyPlan plan = small_plan(
      StudyKind::conjecture,
      {{"d", "1"}, {"k", "2"}, {"sizes", "16"}, {"radius", "2"},
       {"p_grid", "0:1:0.5"}});
  const fs::path a = scratch_dir("a");
  const fs::path b = scratch_dir("b");
  write_report(run_study(plan), a);
  write_report(run_study(plan), b);
  for (const char* name : {"summary.csv", "plan.txt", "conjecture_points.csv"}) {
    ASSERT_TRUE(fs::exists(a / name)) << name;
    EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
  }
  EXPECT_FALSE(fs::exists(a / "verification.txt"));
  EXPECT_EQ(slurp(a / "summary.csv").rfind(std::string(kSummaryCsvHeader), 0), 0u);
  std::size_t curve_files = 0;
  for (const auto& entry : fs::directory_iterator(a / "curves")) {
    ++curve_files;
    EXPECT_EQ(slurp(entry.path()), slurp(b / "curves" / entry.path().filename()));
  }
  EXPECT_EQ(curve_files, 2u);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Plot, AxesOnlyWhenEmpty) {
  EstimateReport r;
  r.title = "empty";
  const std::string svg = render_svg(r);
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_EQ(svg.find("<polyline"), std::string::npos);
  EXPECT_EQ(svg.find("<polygon"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Plot, CurvesBandsAndMarkers) {
  EstimateReport r;
  r.title = "curves";
  CurveRecord c;
  c.label = "G(3)";
  c.curve.p = {0.0, 0.5, 1.0};
  c.curve.q = {0.0, 0.3, 1.0};
  c.band.lo = {0.0, 0.2, 1.0};
  c.band.hi = {0.0, 0.4, 1.0};
  r.curves.push_back(c);
  for (const char* label : {"Z4", "G(4)", "S(4)"}) {
    r.markers.push_back({label, 0.3, {0.29, 0.31}});
  }
  const std::string svg = render_svg(r);
  EXPECT_NE(svg.find("<polyline"), std::string::npos);
  EXPECT_NE(svg.find("<polygon"), std::string::npos);
  std::size_t dashed = 0;
  for (std::size_t at = svg.find("stroke-dasharray"); at != std::string::npos;
       at = svg.find("stroke-dasharray", at + 1)) {
    ++dashed;
  }
  EXPECT_EQ(dashed, 3u);
  EXPECT_EQ(svg, render_svg(r));
  const fs::path dir = scratch_dir("plot");
  emit_plot(r, dir / "p.svg");
  EXPECT_EQ(slurp(dir / "p.svg"), svg);
  fs::remove_all(dir);
}

TEST(FormatNumber, NanAndPrecision) {
  EXPECT_EQ(format_number(std::nan("")), "nan");
  EXPECT_EQ(format_number(0.5), "0.5");
  EXPECT_EQ(format_number(0.1234567890123), "0.123456789012");
}

TEST(StudyNames, RoundTrip) {
  for (const StudyKind k : {StudyKind::threshold, StudyKind::theta, StudyKind::sandwich,
                            StudyKind::limit, StudyKind::conjecture}) {
    EXPECT_EQ(parse_study(study_name(k)), k);
  }
  EXPECT_FALSE(parse_study("nope").has_value());
}

}  // namespace
}  // namespace lrperc
