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

// Study orchestration: threshold ordering across the hypercubic cover, the
// decorated lattice and the slab; the threshold trend along a ladder of
// scale factors; pointwise comparison of reach curves for k and k+1.
//
// Plans are flat `key = value` files ('#' starts a comment). Keys:
//
//   kind         threshold | theta | sandwich | limit | conjecture
//   d            base dimension
//   k            comma list of scale factors (limit: one factor per rung)
//   k_prime      comparison factors for conjecture (default k + 1 each)
//   graph        g | f | slab | slab-tilde | zd (threshold, theta)
//   dim          dimension of zd when used alone
//   sizes        comma list of linear sizes (two for thresholds)
//   hyper_sizes  linear sizes of the hypercubic cover
//   p_grid       start:stop:step
//   radius       comma list of reach radii
//   runs, seed, resamples, level, samples
//   mode         site | bond
//   event        wrap | face-to-face
//   boundary     periodic | free
//   out, svg     output directory and optional plot path

#ifndef LRPERC_EXPERIMENTS_HPP_
#define LRPERC_EXPERIMENTS_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lrperc/engine.hpp"
#include "lrperc/lattice.hpp"
#include "lrperc/maps.hpp"

namespace lrperc {

enum class StudyKind { threshold, theta, sandwich, limit, conjecture };

std::string_view study_name(StudyKind kind);
std::optional<StudyKind> parse_study(std::string_view name);

inline constexpr std::uint64_t kDefaultSeed = 20260101;
inline constexpr std::uint64_t kDefaultRuns = 10000;

using PlanEntries = std::map<std::string, std::string>;

// Parses `key = value` lines. Throws std::invalid_argument on a malformed
// line or a duplicate key, naming the line.
PlanEntries parse_plan_entries(std::istream& in);
PlanEntries read_plan_file(const std::filesystem::path& path);

struct StudyPlan {
  StudyKind kind = StudyKind::threshold;
  int d = 2;
  std::vector<int> k;                // threshold, theta, sandwich, conjecture
  std::vector<int> ladder;           // limit
  std::vector<int> k_prime;          // conjecture
  Family family = Family::decorated; // threshold, theta
  int dim = 0;                       // zd alone; 0 means d
  std::vector<std::int64_t> sizes;
  std::vector<std::int64_t> hyper_sizes;
  std::vector<double> p_grid;
  std::string p_grid_text;
  std::vector<std::uint32_t> radii;
  std::uint64_t runs = kDefaultRuns;
  std::uint64_t seed = kDefaultSeed;
  std::uint64_t resamples = kDefaultResamples;
  double level = kDefaultLevel;
  std::uint64_t samples = kDefaultQuotientSamples;
  Mode mode = Mode::site;
  Event event = Event::wrap;
  Boundary boundary = Boundary::periodic;
  std::string out = "out";
  std::string svg;

  // Canonical plan text; parsing it back yields the same plan.
  std::string to_text() const;
};

// Builds a validated plan of `kind` from entries (unknown keys and bad
// values throw std::invalid_argument naming the key). Missing keys take the
// study's defaults.
StudyPlan make_plan(StudyKind kind, const PlanEntries& entries);

struct SummaryRow {
  std::string study;
  std::string label;
  std::string family;
  int d = 0;
  std::string k;
  std::int64_t size_small = 0;
  std::int64_t size_large = 0;
  std::uint64_t runs = 0;
  std::uint64_t seed = 0;
  std::string quantity;
  double estimate = std::numeric_limits<double>::quiet_NaN();
  double ci_lo = std::numeric_limits<double>::quiet_NaN();
  double ci_hi = std::numeric_limits<double>::quiet_NaN();
  std::string verdict;
  std::string basis;  // "theorem" (exact check) or "simulation"
  std::string flags;  // ';'-separated
};

inline constexpr std::string_view kSummaryCsvHeader =
    "study,label,family,d,k,size_small,size_large,runs,seed,quantity,"
    "estimate,ci_lo,ci_hi,verdict,basis,flags";

struct CurveRecord {
  std::string name;   // file stem
  std::string label;  // legend text
  CurveMeta meta;
  CanonicalCurve curve;
  Band band;          // empty when not computed
};

struct PointRow {
  double p = 0.0;
  std::uint32_t radius = 0;
  double estimate_k = 0.0;
  Interval ci_k;
  double estimate_k_prime = 0.0;
  Interval ci_k_prime;
  std::string verdict;
};

inline constexpr std::string_view kPointsCsvHeader =
    "p,radius,theta_k,ci_lo_k,ci_hi_k,theta_k_prime,ci_lo_k_prime,ci_hi_k_prime,"
    "verdict";

struct ThresholdMarker {
  std::string label;
  double estimate = std::numeric_limits<double>::quiet_NaN();
  Interval ci;
};

struct EstimateReport {
  StudyPlan plan;
  std::string title;
  std::vector<SummaryRow> rows;
  std::vector<CurveRecord> curves;
  std::vector<PointRow> points;
  std::vector<ThresholdMarker> markers;
  VerificationReport structure;  // exact checks run alongside the study
};

// Threshold comparison of lower <= upper: "ordered" when the intervals are
// separated in that order, "inverted" when separated the other way,
// "indistinguishable" otherwise (flags name the reason).
struct Verdict {
  std::string verdict;
  std::string flags;
};
Verdict compare_thresholds(const ThresholdEstimate& lower,
                           const ThresholdEstimate& upper);

// Pointwise reach comparison of k against k': "consistent" when k is
// significantly below k', "violation" when significantly above, "tie" when
// both are exact and equal, "indistinguishable" otherwise.
std::string compare_reach(double estimate_k, Interval ci_k,
                          double estimate_k_prime, Interval ci_k_prime);

// Sizes rounded up to multiples of `period`, the larger one increased by
// `period` until it is at least `ratio` times the smaller.
std::vector<std::int64_t> aligned_sizes(std::vector<std::int64_t> sizes,
                                        std::int64_t period, double ratio = 2);

// View of `family` with linear size `size` along every Z^d axis (slab
// families: the unfolded size; it must be a multiple of L_n).
GraphView make_study_view(Family family, const LatticeSpec& spec,
                          std::int64_t size, Boundary boundary);

EstimateReport run_threshold(const StudyPlan& plan);
EstimateReport run_theta_curves(const StudyPlan& plan);
EstimateReport run_sandwich(const StudyPlan& plan);
EstimateReport run_limit_trend(const StudyPlan& plan);
EstimateReport run_conjecture_probe(const StudyPlan& plan);
EstimateReport run_study(const StudyPlan& plan);

// summary.csv, one CSV per curve under curves/, conjecture_points.csv when
// there are points, and plan.txt. Every file is written to a temporary name
// and renamed into place.
void write_report(const EstimateReport& report,
                  const std::filesystem::path& dir);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
void write_points_csv(std::ostream& out, const std::vector<PointRow>& points);

// Writes `content` to `path` via a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);

// Number formatting shared by every CSV (shortest round-trip up to 12
// significant digits; "nan" for missing values).
std::string format_number(double x);

}  // namespace lrperc

#endif  // LRPERC_EXPERIMENTS_HPP_
