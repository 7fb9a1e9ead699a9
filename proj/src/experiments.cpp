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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <fmt/format.h>

#include "lrperc/rng.hpp"

namespace lrperc {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw std::invalid_argument(
        fmt::format("{}: cannot parse '{}' as a number", key, text));
  }
  return value;
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  for (const std::string& item : split(text, ',')) {
    out.push_back(parse_number<T>(key, item));
  }
  return out;
}

template <typename T>
std::string join(const std::vector<T>& values, std::string_view sep = ",") {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += sep;
    out += fmt::format("{}", values[i]);
  }
  return out;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "kind",   "d",     "k",        "k_prime", "graph", "dim",
      "sizes",  "hyper_sizes",       "p_grid",  "radius", "runs",
      "seed",   "resamples",         "level",   "samples", "mode",
      "event",  "boundary",          "out",     "svg"};
  return keys;
}

std::string_view boundary_name(Boundary b) {
  return b == Boundary::periodic ? "periodic" : "free";
}

std::vector<double> parse_grid(const std::string& text) {
  const std::vector<std::string> parts = split(text, ':');
  if (parts.size() != 3) {
    throw std::invalid_argument(
        fmt::format("p_grid: expected start:stop:step, got '{}'", text));
  }
  try {
    return make_grid(parse_number<double>("p_grid", parts[0]),
                     parse_number<double>("p_grid", parts[1]),
                     parse_number<double>("p_grid", parts[2]));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(fmt::format("p_grid: {}", e.what()));
  }
}

std::string k_label(const std::vector<int>& k) { return join(k, ";"); }

std::string file_k(const std::vector<int>& k) {
  return k.empty() ? "none" : join(k, "-");
}

// Largest L >= 3 with L^D <= 4096.
std::int64_t default_hyper_size(int dims) {
  std::int64_t best = 3;
  for (std::int64_t L = 3;; ++L) {
    double volume = 1.0;
    for (int i = 0; i < dims; ++i) volume *= static_cast<double>(L);
    if (volume > 4096.0) break;
    best = L;
  }
  return best;
}

std::vector<std::int64_t> hyper_sizes_for(const StudyPlan& plan, int dims) {
  if (!plan.hyper_sizes.empty()) return aligned_sizes(plan.hyper_sizes, 1);
  if (dims == plan.d) return aligned_sizes(plan.sizes, 1);
  const std::int64_t small = default_hyper_size(dims);
  return {small, 2 * small};
}

// One graph of a study: its identity and the seed derived from its ordinal.
struct StudyGraph {
  std::string label;
  Family family;
  LatticeSpec spec;
  std::vector<std::int64_t> sizes;
  std::uint64_t seed;

  int meta_d() const {
    return family == Family::hypercubic ? spec.hyper_dim() : spec.base_dim();
  }
  std::string meta_k() const {
    return family == Family::hypercubic ? std::string() : k_label(spec.k());
  }
  std::string file_stem(std::size_t ordinal, std::int64_t size) const {
    return fmt::format("{:02}_{}_d{}_k{}_L{}", ordinal, family_name(family),
                       meta_d(),
                       family == Family::hypercubic ? "none" : file_k(spec.k()),
                       size);
  }
};

std::string graph_label(Family family, const LatticeSpec& spec) {
  switch (family) {
    case Family::hypercubic:
      return fmt::format("Z{}", spec.hyper_dim());
    case Family::decorated:
      return fmt::format("G({})", k_label(spec.k()));
    case Family::pruned:
      return fmt::format("F({})", k_label(spec.k()));
    case Family::slab:
      return fmt::format("S({})", k_label(spec.k()));
    case Family::decorated_slab:
      return fmt::format("S~({})", k_label(spec.k()));
  }
  return "?";
}

StudyGraph study_graph(const StudyPlan& plan, Family family, LatticeSpec spec,
                       std::vector<std::int64_t> sizes, std::size_t ordinal) {
  StudyGraph g{graph_label(family, spec), family, std::move(spec),
               std::move(sizes), derive_seed(plan.seed, ordinal)};
  return g;
}

SummaryRow base_row(const StudyPlan& plan, const StudyGraph& g) {
  SummaryRow row;
  row.study = std::string(study_name(plan.kind));
  row.label = g.label;
  row.family = std::string(family_name(g.family));
  row.d = g.meta_d();
  row.k = g.meta_k();
  row.size_small = g.sizes.front();
  row.size_large = g.sizes.back();
  row.runs = plan.runs;
  row.seed = g.seed;
  return row;
}

// Difference upper - lower bracketed by the extreme ends of the two
// intervals.
Interval difference_interval(const ThresholdEstimate& lower,
                             const ThresholdEstimate& upper) {
  return {upper.ci.lo - lower.ci.hi, upper.ci.hi - lower.ci.lo};
}

SummaryRow comparison_row(const StudyPlan& plan, std::string label,
                          const ThresholdEstimate& lower,
                          const ThresholdEstimate& upper) {
  SummaryRow row;
  row.study = std::string(study_name(plan.kind));
  row.label = std::move(label);
  row.runs = plan.runs;
  row.seed = plan.seed;
  row.quantity = "p_c difference";
  row.estimate = upper.p_c - lower.p_c;
  const Interval ci = difference_interval(lower, upper);
  row.ci_lo = ci.lo;
  row.ci_hi = ci.hi;
  const Verdict v = compare_thresholds(lower, upper);
  row.verdict = v.verdict;
  row.flags = v.flags;
  row.basis = "simulation";
  return row;
}

struct ThresholdResult {
  ThresholdEstimate estimate;
  SummaryRow row;
};

// Threshold of one graph at its two sizes; appends its curves and marker.
ThresholdResult threshold_of(const StudyPlan& plan, const StudyGraph& g,
                             std::size_t ordinal, EstimateReport& report) {
  const PercolationLattice small(
      make_study_view(g.family, g.spec, g.sizes.front(), plan.boundary));
  const PercolationLattice large(
      make_study_view(g.family, g.spec, g.sizes.back(), plan.boundary));
  PcOptions options;
  options.event = plan.event;
  options.runs = plan.runs;
  options.seed = g.seed;
  options.mode = plan.mode;
  options.p_grid = plan.p_grid;
  options.resamples = plan.resamples;
  options.level = plan.level;
  ThresholdResult out{estimate_pc(small, large, options), base_row(plan, g)};

  const ThresholdEstimate& e = out.estimate;
  out.row.quantity = "p_c";
  out.row.estimate = e.p_c;
  out.row.ci_lo = e.ci.lo;
  out.row.ci_hi = e.ci.hi;
  out.row.verdict = e.crossed ? "estimated" : "no-crossing";
  out.row.basis = "simulation";
  std::vector<std::string> flags;
  if (!e.crossed) flags.push_back("no-crossing");
  if (e.crossed && std::isnan(e.ci.lo)) flags.push_back("no-interval");
  if (e.failed_resamples > 0) {
    flags.push_back(fmt::format("failed-resamples={}", e.failed_resamples));
  }
  out.row.flags = join(flags, ";");

  const MicrocanonicalCurve* micro[] = {&e.small, &e.large};
  for (int s = 0; s < 2; ++s) {
    const std::int64_t size = s == 0 ? g.sizes.front() : g.sizes.back();
    CurveRecord rec;
    rec.name = g.file_stem(ordinal, size);
    rec.label = fmt::format("{} L={}", g.label, size);
    rec.meta = {derive_seed(g.seed, (s == 0 ? small : large).size()),
                std::string(family_name(g.family)), g.meta_d(), g.meta_k(),
                std::string(event_name(plan.event)), size};
    rec.curve = convolve(*micro[s], plan.p_grid);
    report.curves.push_back(std::move(rec));
  }
  report.markers.push_back({g.label, e.p_c, e.ci});
  report.rows.push_back(out.row);
  return out;
}

void structure_rows(const StudyPlan& plan, EstimateReport& report) {
  for (const ClaimResult& c : report.structure.claims) {
    SummaryRow row;
    row.study = std::string(study_name(plan.kind));
    row.label = c.claim;
    row.d = plan.d;
    row.k = k_label(plan.k);
    row.seed = plan.seed;
    row.quantity = "vertices checked";
    row.estimate = static_cast<double>(c.checked);
    row.verdict = c.passed ? "PASS" : "FAIL";
    row.basis = "theorem";
    report.rows.push_back(std::move(row));
  }
}

double half_crossing(const CanonicalCurve& c) {
  for (std::size_t i = 1; i < c.p.size(); ++i) {
    if (c.q[i - 1] < 0.5 && c.q[i] >= 0.5) {
      const double t = (0.5 - c.q[i - 1]) / (c.q[i] - c.q[i - 1]);
      return c.p[i - 1] + t * (c.p[i] - c.p[i - 1]);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

std::string_view study_name(StudyKind kind) {
  switch (kind) {
    case StudyKind::threshold:
      return "threshold";
    case StudyKind::theta:
      return "theta";
    case StudyKind::sandwich:
      return "sandwich";
    case StudyKind::limit:
      return "limit";
    case StudyKind::conjecture:
      return "conjecture";
  }
  return "?";
}

std::optional<StudyKind> parse_study(std::string_view name) {
  for (const StudyKind k : {StudyKind::threshold, StudyKind::theta,
                            StudyKind::sandwich, StudyKind::limit,
                            StudyKind::conjecture}) {
    if (study_name(k) == name) return k;
  }
  return std::nullopt;
}

PlanEntries parse_plan_entries(std::istream& in) {
  PlanEntries entries;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(
          fmt::format("plan line {}: expected key = value", number));
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    if (key.empty()) {
      throw std::invalid_argument(fmt::format("plan line {}: empty key", number));
    }
    if (!entries.emplace(key, trim(std::string_view(line).substr(eq + 1)))
             .second) {
      throw std::invalid_argument(
          fmt::format("plan line {}: duplicate key '{}'", number, key));
    }
  }
  return entries;
}

PlanEntries read_plan_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument(
        fmt::format("cannot open plan file '{}'", path.string()));
  }
  return parse_plan_entries(in);
}

std::string StudyPlan::to_text() const {
  std::string text;
  auto line = [&](std::string_view key, const std::string& value) {
    text += fmt::format("{} = {}\n", key, value);
  };
  line("kind", std::string(study_name(kind)));
  line("d", std::to_string(d));
  if (!(kind == StudyKind::threshold || kind == StudyKind::theta) ||
      family != Family::hypercubic) {
    line("k", join(kind == StudyKind::limit ? ladder : k));
  }
  if (kind == StudyKind::conjecture) line("k_prime", join(k_prime));
  if (kind == StudyKind::threshold || kind == StudyKind::theta) {
    line("graph", std::string(family_name(family)));
    if (family == Family::hypercubic) line("dim", std::to_string(dim));
  }
  line("sizes", join(sizes));
  if (!hyper_sizes.empty()) line("hyper_sizes", join(hyper_sizes));
  line("p_grid", p_grid_text);
  if (!radii.empty()) line("radius", join(radii));
  line("runs", std::to_string(runs));
  line("seed", std::to_string(seed));
  line("resamples", std::to_string(resamples));
  line("level", fmt::format("{}", level));
  line("samples", std::to_string(samples));
  line("mode", std::string(mode_name(mode)));
  line("event", std::string(event_name(event)));
  line("boundary", std::string(boundary_name(boundary)));
  line("out", out);
  if (!svg.empty()) line("svg", svg);
  return text;
}

StudyPlan make_plan(StudyKind kind, const PlanEntries& entries) {
  for (const auto& [key, value] : entries) {
    if (!known_keys().contains(key)) {
      throw std::invalid_argument(fmt::format("unknown plan key '{}'", key));
    }
  }
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    const auto it = entries.find(key);
    if (it == entries.end()) return std::nullopt;
    return it->second;
  };

  StudyPlan plan;
  plan.kind = kind;
  if (const auto v = get("kind")) {
    const auto parsed = parse_study(*v);
    if (!parsed) throw std::invalid_argument(fmt::format("kind: unknown '{}'", *v));
    if (*parsed != kind) {
      throw std::invalid_argument(fmt::format(
          "kind: plan is for '{}', command runs '{}'", *v, study_name(kind)));
    }
  }
  if (const auto v = get("d")) plan.d = parse_number<int>("d", *v);
  if (plan.d < 1) throw std::invalid_argument("d: must be positive");

  if (const auto v = get("graph")) {
    if (kind != StudyKind::threshold && kind != StudyKind::theta) {
      throw std::invalid_argument(fmt::format(
          "graph: not used by the {} study", study_name(kind)));
    }
    const auto f = parse_family(*v);
    if (!f) throw std::invalid_argument(fmt::format("graph: unknown '{}'", *v));
    plan.family = *f;
  }
  if (const auto v = get("dim")) {
    if (plan.family != Family::hypercubic) {
      throw std::invalid_argument("dim: only valid with graph zd");
    }
    plan.dim = parse_number<int>("dim", *v);
    if (plan.dim < 1) throw std::invalid_argument("dim: must be positive");
  }
  if (plan.family == Family::hypercubic && plan.dim == 0) plan.dim = plan.d;

  const auto k_text = get("k");
  switch (kind) {
    case StudyKind::limit:
      plan.ladder = parse_list<int>("k", k_text.value_or("2,3,5,8"));
      if (plan.ladder.empty()) throw std::invalid_argument("k: empty ladder");
      if (!std::is_sorted(plan.ladder.begin(), plan.ladder.end())) {
        throw std::invalid_argument("k: ladder must be nondecreasing");
      }
      break;
    case StudyKind::sandwich:
      plan.k = parse_list<int>("k", k_text.value_or("4"));
      if (plan.k.empty()) throw std::invalid_argument("k: sandwich needs n >= 1");
      break;
    default:
      if (plan.family == Family::hypercubic) {
        if (k_text && !split(*k_text, ',').empty()) {
          throw std::invalid_argument("k: not used with graph zd");
        }
      } else {
        plan.k = parse_list<int>("k", k_text.value_or("3"));
      }
      break;
  }
  if (const auto v = get("k_prime")) {
    if (kind != StudyKind::conjecture) {
      throw std::invalid_argument("k_prime: only used by the conjecture study");
    }
    plan.k_prime = parse_list<int>("k_prime", *v);
  } else if (kind == StudyKind::conjecture) {
    for (const int x : plan.k) plan.k_prime.push_back(x + 1);
  }
  if (kind == StudyKind::conjecture && plan.k_prime.size() != plan.k.size()) {
    throw std::invalid_argument("k_prime: must have as many entries as k");
  }
  // Validates every scale list (factors >= 2, sizes within bounds).
  for (const auto& list : {plan.k, plan.k_prime, plan.ladder}) {
    for (const int x : list) {
      if (x < 2) {
        throw std::invalid_argument(fmt::format("k: factor {} is below 2", x));
      }
    }
    (void)LatticeSpec(plan.d, list);
  }

  const bool single_size =
      kind == StudyKind::theta || kind == StudyKind::conjecture;
  plan.sizes = parse_list<std::int64_t>(
      "sizes", get("sizes").value_or(single_size ? "64" : "64,128"));
  if (plan.sizes.empty()) throw std::invalid_argument("sizes: empty");
  for (const auto s : plan.sizes) {
    if (s < 1) throw std::invalid_argument("sizes: must be positive");
  }
  if (single_size && plan.sizes.size() != 1) {
    throw std::invalid_argument("sizes: this study takes one size");
  }
  if (!single_size && plan.sizes.size() != 2) {
    throw std::invalid_argument("sizes: threshold studies take two sizes");
  }
  if (const auto v = get("hyper_sizes")) {
    if (kind != StudyKind::sandwich && kind != StudyKind::limit) {
      throw std::invalid_argument("hyper_sizes: only used by sandwich and limit");
    }
    plan.hyper_sizes = parse_list<std::int64_t>("hyper_sizes", *v);
    if (plan.hyper_sizes.size() != 2) {
      throw std::invalid_argument("hyper_sizes: expected two sizes");
    }
  }

  std::string grid_default = "0:1:0.0005";
  if (kind == StudyKind::theta) grid_default = "0:1:0.02";
  if (kind == StudyKind::conjecture) grid_default = "0:1:0.05";
  plan.p_grid_text = get("p_grid").value_or(grid_default);
  plan.p_grid = parse_grid(plan.p_grid_text);

  if (const auto v = get("radius")) {
    if (!single_size) {
      throw std::invalid_argument("radius: only used by theta and conjecture");
    }
    plan.radii = parse_list<std::uint32_t>("radius", *v);
  } else if (kind == StudyKind::theta) {
    plan.radii = {static_cast<std::uint32_t>(plan.sizes[0] / 8),
                  static_cast<std::uint32_t>(plan.sizes[0] / 4)};
  } else if (kind == StudyKind::conjecture) {
    plan.radii = {static_cast<std::uint32_t>(plan.sizes[0] / 4)};
  }
  for (std::size_t i = 0; i < plan.radii.size(); ++i) {
    if (plan.radii[i] < 1) throw std::invalid_argument("radius: must be >= 1");
    if (i > 0 && plan.radii[i] <= plan.radii[i - 1]) {
      throw std::invalid_argument("radius: must be strictly increasing");
    }
  }

  if (const auto v = get("runs")) plan.runs = parse_number<std::uint64_t>("runs", *v);
  if (plan.runs < 1) throw std::invalid_argument("runs: must be positive");
  if (const auto v = get("seed")) plan.seed = parse_number<std::uint64_t>("seed", *v);
  if (const auto v = get("resamples")) {
    plan.resamples = parse_number<std::uint64_t>("resamples", *v);
  }
  if (const auto v = get("level")) plan.level = parse_number<double>("level", *v);
  if (!(plan.level > 0.0 && plan.level < 1.0)) {
    throw std::invalid_argument("level: must lie in (0,1)");
  }
  if (const auto v = get("samples")) {
    plan.samples = parse_number<std::uint64_t>("samples", *v);
    if (plan.samples < 1) throw std::invalid_argument("samples: must be positive");
  }
  if (const auto v = get("mode")) {
    if (*v == "site") {
      plan.mode = Mode::site;
    } else if (*v == "bond") {
      plan.mode = Mode::bond;
    } else {
      throw std::invalid_argument(fmt::format("mode: unknown '{}'", *v));
    }
  }
  if (const auto v = get("event")) {
    const auto e = parse_event(*v);
    if (!e || *e == Event::reach) {
      throw std::invalid_argument(
          fmt::format("event: expected wrap or face-to-face, got '{}'", *v));
    }
    plan.event = *e;
  }
  plan.boundary = plan.event == Event::face_to_face ? Boundary::free
                                                    : Boundary::periodic;
  if (const auto v = get("boundary")) {
    if (*v == "periodic") {
      plan.boundary = Boundary::periodic;
    } else if (*v == "free") {
      plan.boundary = Boundary::free;
    } else {
      throw std::invalid_argument(fmt::format("boundary: unknown '{}'", *v));
    }
  }
  if (const auto v = get("out")) {
    if (v->empty()) throw std::invalid_argument("out: empty path");
    plan.out = *v;
  }
  if (const auto v = get("svg")) plan.svg = *v;
  return plan;
}

Verdict compare_thresholds(const ThresholdEstimate& lower,
                           const ThresholdEstimate& upper) {
  if (!lower.crossed || !upper.crossed) {
    return {"indistinguishable", "no-crossing"};
  }
  if (std::isnan(lower.ci.lo) || std::isnan(upper.ci.lo)) {
    return {"indistinguishable", "no-interval"};
  }
  if (lower.ci.hi < upper.ci.lo) return {"ordered", ""};
  if (lower.ci.lo > upper.ci.hi) return {"inverted", ""};
  return {"indistinguishable", "overlap"};
}

std::string compare_reach(double estimate_k, Interval ci_k,
                          double estimate_k_prime, Interval ci_k_prime) {
  const bool exact_k = ci_k.lo == estimate_k && ci_k.hi == estimate_k;
  const bool exact_kp =
      ci_k_prime.lo == estimate_k_prime && ci_k_prime.hi == estimate_k_prime;
  if (exact_k && exact_kp && estimate_k == estimate_k_prime) return "tie";
  if (ci_k.lo > ci_k_prime.hi) return "violation";
  if (ci_k.hi < ci_k_prime.lo) return "consistent";
  return "indistinguishable";
}

std::vector<std::int64_t> aligned_sizes(std::vector<std::int64_t> sizes,
                                        std::int64_t period, double ratio) {
  for (auto& s : sizes) s = (s + period - 1) / period * period;
  if (sizes.size() == 2) {
    while (static_cast<double>(sizes[1]) <
           ratio * static_cast<double>(sizes[0])) {
      sizes[1] += period;
    }
  }
  return sizes;
}

GraphView make_study_view(Family family, const LatticeSpec& spec,
                          std::int64_t size, Boundary boundary) {
  if (size < 1) throw std::invalid_argument("size must be positive");
  if (is_slab_family(family)) {
    if (size % spec.period() != 0) {
      throw std::invalid_argument(fmt::format(
          "slab size {} is not a multiple of {}", size, spec.period()));
    }
    const std::int64_t extent = size / spec.period();
    const std::int64_t lo = -(extent / 2);
    return GraphView(family, spec,
                     slab_window(spec, lo, lo + extent, boundary));
  }
  const std::int64_t lo = -(size / 2);
  return GraphView(family, spec,
                   Window::cube(vertex_dims(family, spec), lo, lo + size,
                                boundary));
}

EstimateReport run_threshold(const StudyPlan& plan) {
  EstimateReport report;
  report.plan = plan;
  const LatticeSpec spec = plan.family == Family::hypercubic
                               ? LatticeSpec(plan.dim, {})
                               : LatticeSpec(plan.d, plan.k);
  const StudyGraph g =
      study_graph(plan, plan.family, spec,
                  aligned_sizes(plan.sizes, spec.period()), 0);
  report.title = fmt::format("threshold of {}", g.label);
  threshold_of(plan, g, 0, report);
  return report;
}

EstimateReport run_theta_curves(const StudyPlan& plan) {
  EstimateReport report;
  report.plan = plan;
  const LatticeSpec spec = plan.family == Family::hypercubic
                               ? LatticeSpec(plan.dim, {})
                               : LatticeSpec(plan.d, plan.k);
  const StudyGraph g =
      study_graph(plan, plan.family, spec,
                  aligned_sizes(plan.sizes, spec.period()), 0);
  report.title = fmt::format("origin reach on {}", g.label);
  const PercolationLattice lattice(
      make_study_view(g.family, g.spec, g.sizes.front(), plan.boundary));
  const ThetaEstimate theta = estimate_theta(lattice, plan.p_grid, plan.radii,
                                             plan.runs, g.seed, plan.mode);
  for (std::size_t r = 0; r < plan.radii.size(); ++r) {
    CurveRecord rec;
    rec.name = fmt::format("{}_R{}", g.file_stem(0, g.sizes.front()),
                           plan.radii[r]);
    rec.label = fmt::format("{} R={}", g.label, plan.radii[r]);
    rec.meta = {g.seed, std::string(family_name(g.family)), g.meta_d(),
                g.meta_k(), "reach", g.sizes.front()};
    rec.curve = theta.curves[r];
    rec.band = bootstrap_band(theta.micro[r], plan.p_grid, plan.resamples,
                              derive_seed(g.seed, r), plan.level);

    SummaryRow row = base_row(plan, g);
    row.label = rec.label;
    row.quantity = "p at reach probability 1/2";
    row.estimate = half_crossing(rec.curve);
    row.verdict = std::isnan(row.estimate) ? "not-reached" : "estimated";
    row.basis = "simulation";
    report.rows.push_back(std::move(row));
    report.curves.push_back(std::move(rec));
  }
  return report;
}

EstimateReport run_sandwich(const StudyPlan& plan) {
  EstimateReport report;
  report.plan = plan;
  const LatticeSpec spec(plan.d, plan.k);
  const std::vector<std::int64_t> sizes =
      aligned_sizes(plan.sizes, spec.period());
  const StudyGraph graphs[] = {
      study_graph(plan, Family::hypercubic, spec,
                  hyper_sizes_for(plan, spec.hyper_dim()), 0),
      study_graph(plan, Family::decorated, spec, sizes, 1),
      study_graph(plan, Family::slab, spec, sizes, 2)};
  report.title = fmt::format("{} <= {} <= {}", graphs[0].label,
                             graphs[1].label, graphs[2].label);

  // Exact checks of the isomorphism and quotient constructions.
  const Coord period = spec.period();
  report.structure.append(check_isomorphism(
      Window::cube(plan.d, -period, 2 * period, Boundary::free), spec));
  report.structure.append(check_quotient(
      Window::cube(spec.hyper_dim(), -2, 2, Boundary::free), spec,
      plan.samples, plan.seed));
  structure_rows(plan, report);

  std::vector<ThresholdEstimate> est;
  for (std::size_t i = 0; i < 3; ++i) {
    est.push_back(threshold_of(plan, graphs[i], i, report).estimate);
  }
  report.rows.push_back(comparison_row(
      plan, fmt::format("{} <= {}", graphs[0].label, graphs[1].label), est[0],
      est[1]));
  report.rows.push_back(comparison_row(
      plan, fmt::format("{} <= {}", graphs[1].label, graphs[2].label), est[1],
      est[2]));
  return report;
}

EstimateReport run_limit_trend(const StudyPlan& plan) {
  EstimateReport report;
  report.plan = plan;
  const LatticeSpec cover(plan.d, {plan.ladder.front()});
  std::vector<StudyGraph> graphs;
  graphs.push_back(study_graph(plan, Family::hypercubic, cover,
                               hyper_sizes_for(plan, cover.hyper_dim()), 0));
  for (std::size_t i = 0; i < plan.ladder.size(); ++i) {
    const LatticeSpec spec(plan.d, {plan.ladder[i]});
    graphs.push_back(study_graph(plan, Family::decorated, spec,
                                 aligned_sizes(plan.sizes, spec.period()),
                                 i + 1));
  }
  report.title = fmt::format("decorated thresholds approaching {}",
                             graphs[0].label);

  std::vector<ThresholdEstimate> est;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    est.push_back(threshold_of(plan, graphs[i], i, report).estimate);
  }

  bool inverted = false;
  bool missing = false;
  bool repeated = false;
  for (const ThresholdEstimate& e : est) missing |= !e.crossed;
  for (std::size_t i = 1; i + 1 < graphs.size(); ++i) {
    SummaryRow row = comparison_row(
        plan, fmt::format("{} <= {}", graphs[i + 1].label, graphs[i].label),
        est[i + 1], est[i]);
    if (plan.ladder[i - 1] == plan.ladder[i]) {
      repeated = true;
      row.flags = row.flags.empty() ? "repeated-k" : row.flags + ";repeated-k";
    }
    inverted |= row.verdict == "inverted";
    report.rows.push_back(std::move(row));
  }
  for (std::size_t i = 1; i < graphs.size(); ++i) {
    SummaryRow row = base_row(plan, graphs[i]);
    row.label = fmt::format("{} - {}", graphs[i].label, graphs[0].label);
    row.quantity = "p_c gap";
    row.estimate = est[i].p_c - est[0].p_c;
    const Interval ci = difference_interval(est[0], est[i]);
    row.ci_lo = ci.lo;
    row.ci_hi = ci.hi;
    row.verdict = est[i].crossed && est[0].crossed ? "estimated" : "no-crossing";
    row.basis = "simulation";
    report.rows.push_back(std::move(row));
  }

  const double first_gap = est[1].p_c - est[0].p_c;
  const double final_gap = est.back().p_c - est[0].p_c;
  SummaryRow trend;
  trend.study = std::string(study_name(plan.kind));
  trend.label = "trend";
  trend.d = plan.d;
  trend.k = join(plan.ladder, ";");
  trend.runs = plan.runs;
  trend.seed = plan.seed;
  trend.quantity = "final gap minus first gap";
  trend.estimate = final_gap - first_gap;
  trend.basis = "simulation";
  std::vector<std::string> flags;
  if (plan.ladder.size() == 1) flags.push_back("single-entry");
  if (repeated) flags.push_back("repeated-k");
  if (missing) {
    trend.verdict = "inconclusive";
    flags.push_back("no-crossing");
  } else if (inverted) {
    trend.verdict = "inconsistent";
    flags.push_back("inverted-pair");
  } else if (plan.ladder.size() > 1 && !(final_gap < first_gap)) {
    trend.verdict = "inconsistent";
    flags.push_back("gap-not-shrinking");
  } else {
    trend.verdict = "consistent";
  }
  trend.flags = join(flags, ";");
  report.rows.push_back(std::move(trend));
  return report;
}

EstimateReport run_conjecture_probe(const StudyPlan& plan) {
  EstimateReport report;
  report.plan = plan;
  const LatticeSpec spec_k(plan.d, plan.k);
  const LatticeSpec spec_kp(plan.d, plan.k_prime);
  const StudyGraph graphs[] = {
      study_graph(plan, Family::decorated, spec_k,
                  aligned_sizes(plan.sizes, spec_k.period()), 0),
      study_graph(plan, Family::decorated, spec_kp,
                  aligned_sizes(plan.sizes, spec_kp.period()), 1)};
  report.title = fmt::format("origin reach of {} against {}", graphs[0].label,
                             graphs[1].label);

  std::vector<ThetaEstimate> theta;
  std::vector<std::vector<Band>> bands(2);
  for (std::size_t gi = 0; gi < 2; ++gi) {
    const StudyGraph& g = graphs[gi];
    const PercolationLattice lattice(
        make_study_view(g.family, g.spec, g.sizes.front(), plan.boundary));
    theta.push_back(estimate_theta(lattice, plan.p_grid, plan.radii, plan.runs,
                                   g.seed, plan.mode));
    for (std::size_t r = 0; r < plan.radii.size(); ++r) {
      bands[gi].push_back(bootstrap_band(theta[gi].micro[r], plan.p_grid,
                                         plan.resamples,
                                         derive_seed(g.seed, r), plan.level));
      CurveRecord rec;
      rec.name = fmt::format("{}_R{}", g.file_stem(gi, g.sizes.front()),
                             plan.radii[r]);
      rec.label = fmt::format("{} R={}", g.label, plan.radii[r]);
      rec.meta = {g.seed, std::string(family_name(g.family)), g.meta_d(),
                  g.meta_k(), "reach", g.sizes.front()};
      rec.curve = theta[gi].curves[r];
      rec.band = bands[gi][r];
      report.curves.push_back(std::move(rec));
    }
  }

  std::map<std::string, int> tally;
  for (std::size_t r = 0; r < plan.radii.size(); ++r) {
    for (std::size_t i = 0; i < plan.p_grid.size(); ++i) {
      PointRow pt;
      pt.p = plan.p_grid[i];
      pt.radius = plan.radii[r];
      pt.estimate_k = theta[0].curves[r].q[i];
      pt.ci_k = {bands[0][r].lo[i], bands[0][r].hi[i]};
      pt.estimate_k_prime = theta[1].curves[r].q[i];
      pt.ci_k_prime = {bands[1][r].lo[i], bands[1][r].hi[i]};
      pt.verdict =
          compare_reach(pt.estimate_k, pt.ci_k, pt.estimate_k_prime,
                        pt.ci_k_prime);
      ++tally[pt.verdict];

      SummaryRow row;
      row.study = std::string(study_name(plan.kind));
      row.label = fmt::format("p={} R={}", format_number(pt.p), pt.radius);
      row.family = std::string(family_name(Family::decorated));
      row.d = plan.d;
      row.k = fmt::format("{}|{}", k_label(plan.k), k_label(plan.k_prime));
      row.size_small = graphs[0].sizes.front();
      row.size_large = graphs[1].sizes.front();
      row.runs = plan.runs;
      row.seed = plan.seed;
      row.quantity = "reach k' minus reach k";
      row.estimate = pt.estimate_k_prime - pt.estimate_k;
      row.ci_lo = pt.ci_k_prime.lo - pt.ci_k.hi;
      row.ci_hi = pt.ci_k_prime.hi - pt.ci_k.lo;
      row.verdict = pt.verdict;
      row.basis = "simulation";
      report.rows.push_back(std::move(row));
      report.points.push_back(std::move(pt));
    }
  }
  SummaryRow total;
  total.study = std::string(study_name(plan.kind));
  total.label = "tally";
  total.d = plan.d;
  total.k = fmt::format("{}|{}", k_label(plan.k), k_label(plan.k_prime));
  total.runs = plan.runs;
  total.seed = plan.seed;
  total.quantity = "points";
  total.estimate = static_cast<double>(report.points.size());
  total.verdict = tally.contains("violation") ? "violation-seen" : "no-violation";
  total.basis = "simulation";
  std::vector<std::string> flags;
  for (const auto& [name, count] : tally) {
    flags.push_back(fmt::format("{}={}", name, count));
  }
  if (plan.k == plan.k_prime) flags.push_back("k-equals-k-prime");
  total.flags = join(flags, ";");
  report.rows.push_back(std::move(total));
  return report;
}

EstimateReport run_study(const StudyPlan& plan) {
  switch (plan.kind) {
    case StudyKind::threshold:
      return run_threshold(plan);
    case StudyKind::theta:
      return run_theta_curves(plan);
    case StudyKind::sandwich:
      return run_sandwich(plan);
    case StudyKind::limit:
      return run_limit_trend(plan);
    case StudyKind::conjecture:
      return run_conjecture_probe(plan);
  }
  throw std::invalid_argument("unknown study");
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  return fmt::format("{:.12g}", x);
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << kSummaryCsvHeader << '\n';
  for (const SummaryRow& r : rows) {
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                       r.study, r.label, r.family, r.d, r.k, r.size_small,
                       r.size_large, r.runs, r.seed, r.quantity,
                       format_number(r.estimate), format_number(r.ci_lo),
                       format_number(r.ci_hi), r.verdict, r.basis, r.flags);
  }
}

void write_points_csv(std::ostream& out, const std::vector<PointRow>& points) {
  out << kPointsCsvHeader << '\n';
  for (const PointRow& p : points) {
    out << fmt::format("{},{},{},{},{},{},{},{},{}\n", format_number(p.p),
                       p.radius, format_number(p.estimate_k),
                       format_number(p.ci_k.lo), format_number(p.ci_k.hi),
                       format_number(p.estimate_k_prime),
                       format_number(p.ci_k_prime.lo),
                       format_number(p.ci_k_prime.hi), p.verdict);
  }
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error(
          fmt::format("cannot write '{}'", tmp.string()));
    }
    out << content;
    out.flush();
    if (!out) {
      throw std::runtime_error(fmt::format("write to '{}' failed", tmp.string()));
    }
  }
  std::filesystem::rename(tmp, path);
}

void write_report(const EstimateReport& report,
                  const std::filesystem::path& dir) {
  std::ostringstream summary;
  write_summary_csv(summary, report.rows);
  write_file_atomic(dir / "summary.csv", summary.str());
  for (const CurveRecord& c : report.curves) {
    std::ostringstream curve;
    write_curve_csv(curve, c.curve, c.meta);
    write_file_atomic(dir / "curves" / (c.name + ".csv"), curve.str());
  }
  if (!report.points.empty()) {
    std::ostringstream points;
    write_points_csv(points, report.points);
    write_file_atomic(dir / "conjecture_points.csv", points.str());
  }
  if (!report.structure.claims.empty()) {
    write_file_atomic(dir / "verification.txt", report.structure.to_text());
  }
  write_file_atomic(dir / "plan.txt", report.plan.to_text());
}

}  // namespace lrperc
