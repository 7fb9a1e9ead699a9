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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Pass criterion numbers as arguments to run a subset.

#include <omp.h>

#include <chrono>
#include <cmath>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "lrperc/engine.hpp"
#include "lrperc/experiments.hpp"
#include "lrperc/lattice.hpp"
#include "lrperc/maps.hpp"
#include "lrperc/rng.hpp"

namespace {

using namespace lrperc;
namespace fs = std::filesystem;

struct Outcome {
  bool passed = false;
  std::string detail;
};

const std::vector<std::vector<int>>& scale_sets() {
  static const std::vector<std::vector<int>> sets = {
      {2}, {3}, {5}, {2, 3}, {3, 2}, {2, 2, 2}};
  return sets;
}

std::string k_text(const std::vector<int>& k) {
  return fmt::format("({})", fmt::join(k, ","));
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

// 1. Isomorphism checks on windows of three periods per axis.
Outcome isomorphism_suite() {
  const auto start = std::chrono::steady_clock::now();
  std::uint64_t claims = 0;
  for (const int d : {1, 2}) {
    for (const auto& k : scale_sets()) {
      const LatticeSpec spec(d, k);
      const Coord L = spec.period();
      for (const Boundary b : {Boundary::free, Boundary::periodic}) {
        const VerificationReport r =
            check_isomorphism(Window::cube(d, -L, 2 * L, b), spec);
        claims += r.claims.size();
        if (!r.passed()) {
          return {false, fmt::format("d={} k={}\n{}", d, k_text(k), r.to_text())};
        }
      }
    }
  }
  const double t = seconds_since(start);
  return {t < 30, fmt::format("{} claims, {:.1f}s (limit 30s)", claims, t)};
}

// 2. Quotient checks with 1e5 sampled cover vertices per parameter set.
Outcome quotient_suite() {
  const auto start = std::chrono::steady_clock::now();
  std::uint64_t sampled = 0;
  for (const int d : {1, 2}) {
    for (const auto& k : scale_sets()) {
      const LatticeSpec spec(d, k);
      const Coord W = 3 * spec.period();
      const VerificationReport r = check_quotient(
          Window::cube(spec.hyper_dim(), -W, W, Boundary::free), spec,
          kDefaultQuotientSamples, 7);
      if (!r.passed()) {
        return {false, fmt::format("d={} k={}\n{}", d, k_text(k), r.to_text())};
      }
      sampled += kDefaultQuotientSamples;
    }
  }
  const double t = seconds_since(start);
  return {t < 30, fmt::format("{} vertices sampled, {:.1f}s (limit 30s)", sampled, t)};
}

// Largest origin distance within the origin cluster; -1 if the origin is
// closed.
std::int64_t origin_reach(const SiteConfiguration& cfg, const PercolationLattice& lat,
                          UnionFind& uf) {
  if (!cfg.open[lat.origin()]) return -1;
  const std::uint32_t root = uf.find(lat.origin()).root;
  std::int64_t far = 0;
  for (std::uint32_t v = 0; v < lat.size(); ++v) {
    if (cfg.open[v] && uf.find(v).root == root) {
      far = std::max<std::int64_t>(far, lat.distance()[v]);
    }
  }
  return far;
}

// 3. Same random field on F, G and the slab: the pruned origin cluster sits
// inside the decorated one, and reach on F equals reach transported to S.
Outcome coupling_suite() {
  constexpr int kConfigs = 10000;
  std::uint64_t checked = 0;
  for (const int d : {1, 2}) {
    for (const auto& k : scale_sets()) {
      const LatticeSpec spec(d, k);
      const Coord L = spec.period();
      for (const Boundary b : {Boundary::free, Boundary::periodic}) {
        const Window base = Window::cube(d, -L, 2 * L, b);
        const Window sw = slab_window_for(base, spec);
        const PercolationLattice f(GraphView(Family::pruned, spec, base));
        const PercolationLattice g(GraphView(Family::decorated, spec, base));
        const PercolationLattice s(GraphView(Family::slab, spec, sw));
        std::vector<std::uint32_t> to_s(base.volume());
        for (std::uint64_t i = 0; i < base.volume(); ++i) {
          to_s[i] = static_cast<std::uint32_t>(
              sw.index_of(to_slab(base.vertex_at(i), spec)));
        }
        for (int t = 0; t < kConfigs / 2; ++t) {
          const double p = 0.2 + 0.1 * (t % 7);
          const std::uint64_t seed =
              derive_seed(static_cast<std::uint64_t>(t), d * 1000 + L);
          const SiteConfiguration cf = sample_configuration(f.view(), p, seed);
          SiteConfiguration cs = cf;
          for (std::uint64_t i = 0; i < base.volume(); ++i) cs.open[to_s[i]] = cf.open[i];
          UnionFind uf_f = clusters(cf, f);
          UnionFind uf_g = clusters(cf, g);
          UnionFind uf_s = clusters(cs, s);
          if (cf.open[f.origin()]) {
            const std::uint32_t rf = uf_f.find(f.origin()).root;
            for (std::uint32_t v = 0; v < f.size(); ++v) {
              if (cf.open[v] && uf_f.find(v).root == rf && !uf_g.same(v, g.origin())) {
                return {false, fmt::format("d={} k={} config {}: {} in C0(F) not C0(G)",
                                           d, k_text(k), t,
                                           format_vertex(base.vertex_at(v)))};
              }
            }
          }
          const std::int64_t reach_f = origin_reach(cf, f, uf_f);
          const std::int64_t reach_s = origin_reach(cs, s, uf_s);
          if (reach_f != reach_s) {
            return {false, fmt::format("d={} k={} config {}: reach {} on F, {} on S",
                                       d, k_text(k), t, reach_f, reach_s)};
          }
          ++checked;
        }
      }
    }
  }
  return {true, fmt::format("{} configurations (10^4 per parameter set)", checked)};
}

// 4. Union-find partitions against breadth-first components.
Outcome engine_oracle() {
  const auto start = std::chrono::steady_clock::now();
  const Family families[] = {Family::decorated, Family::pruned, Family::slab,
                             Family::decorated_slab, Family::hypercubic};
  CounterRng rng(2026, stream_id(StreamDomain::verification, 4));
  std::map<std::string, int> by_family;
  for (int instance = 0; instance < 1000; ++instance) {
    const Family fam = families[rng.below(5)];
    const int d = 1 + static_cast<int>(rng.below(2));
    const auto& k = scale_sets()[rng.below(scale_sets().size())];
    const LatticeSpec spec = fam == Family::hypercubic
                                 ? LatticeSpec(1 + static_cast<int>(rng.below(4)), {})
                                 : LatticeSpec(d, k);
    const Boundary b = rng.below(2) == 0 ? Boundary::free : Boundary::periodic;
    const Coord L = spec.period();
    std::unique_ptr<GraphView> view;
    if (is_slab_family(fam)) {
      Coord extent = 2 + static_cast<Coord>(rng.below(6));
      while (true) {
        const Window w = slab_window(spec, -extent / 2, extent - extent / 2, b);
        if (w.volume() <= 10000 || extent == 1) {
          view = std::make_unique<GraphView>(fam, spec, w);
          break;
        }
        --extent;
      }
    } else {
      const int dims = vertex_dims(fam, spec);
      Coord extent = L * (1 + static_cast<Coord>(rng.below(6)));
      if (fam == Family::hypercubic) extent = 2 + static_cast<Coord>(rng.below(30));
      while (std::pow(static_cast<double>(extent), dims) > 10000) {
        extent -= fam == Family::hypercubic ? 1 : L;
      }
      if (extent < 2) extent = fam == Family::hypercubic ? 2 : L;
      view = std::make_unique<GraphView>(
          fam, spec, Window::cube(dims, -extent / 2, extent - extent / 2, b));
    }
    const PercolationLattice lat(*view, Execution::serial);
    const double p = rng.uniform();
    const SiteConfiguration cfg = sample_configuration(*view, p, instance);
    UnionFind uf = clusters(cfg, lat);

    std::vector<int> label(lat.size(), -1);
    int next = 0;
    for (std::uint32_t s = 0; s < lat.size(); ++s) {
      if (!cfg.open[s] || label[s] >= 0) continue;
      std::deque<std::uint32_t> queue{s};
      label[s] = next;
      while (!queue.empty()) {
        const std::uint32_t u = queue.front();
        queue.pop_front();
        for (const std::uint32_t v : lat.adjacency().neighbors(u)) {
          if (cfg.open[v] && label[v] < 0) {
            label[v] = next;
            queue.push_back(v);
          }
        }
      }
      ++next;
    }
    std::map<int, std::uint32_t> label_root;
    std::map<std::uint32_t, int> root_label;
    for (std::uint32_t v = 0; v < lat.size(); ++v) {
      const std::uint32_t root = uf.find(v).root;
      if (!cfg.open[v]) {
        if (root != v) return {false, fmt::format("instance {}: closed site joined", instance)};
        continue;
      }
      const auto [a, new_label] = label_root.emplace(label[v], root);
      const auto [c, new_root] = root_label.emplace(root, label[v]);
      if (a->second != root || c->second != label[v]) {
        return {false, fmt::format("instance {} ({}): partitions differ at {}",
                                   instance, family_name(fam),
                                   format_vertex(view->window().vertex_at(v)))};
      }
    }
    ++by_family[std::string(family_name(fam))];
  }
  const double t = seconds_since(start);
  std::string mix;
  for (const auto& [name, n] : by_family) mix += fmt::format(" {}={}", name, n);
  return {t < 10, fmt::format("1000 instances,{}; {:.1f}s (limit 10s)", mix, t)};
}

// 5. Convolution of analytic microcanonical curves.
Outcome convolution_cases() {
  const std::vector<double> grid = make_grid(0, 1, 0.001);
  double worst = 0;
  auto track = [&](double got, double want) {
    worst = std::max(worst, std::abs(got - want));
  };
  for (const std::uint64_t M : {1u, 5u, 40u, 400u}) {
    std::vector<double> top(M + 1, 0.0);
    top.back() = 1.0;
    const CanonicalCurve c = convolve(MicrocanonicalCurve::from_values(top, 1), grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      track(c.q[i], std::pow(grid[i], static_cast<double>(M)));
    }
    const CanonicalCurve flat = convolve(
        MicrocanonicalCurve::from_values(std::vector<double>(M + 1, 0.25), 1), grid);
    for (const double q : flat.q) track(q, 0.25);
  }
  double worst_norm = 0;
  for (const std::uint64_t M : {1u, 10u, 1000u, 100000u, 1000000u}) {
    for (const double p : grid) {
      const BinomialWeights w = binomial_weights(M, p);
      double sum = 0;
      for (const double x : w.w) sum += x;
      worst_norm = std::max(worst_norm, std::abs(sum - 1.0));
    }
  }
  return {worst <= 1e-12 && worst_norm <= 1e-12,
          fmt::format("max curve error {:.2e}, max weight-sum error {:.2e}", worst,
                      worst_norm)};
}

// 6. Square-lattice site threshold from the wrapping crossing of 64 and 128.
Outcome square_threshold() {
  const auto start = std::chrono::steady_clock::now();
  const StudyPlan plan = make_plan(
      StudyKind::threshold,
      {{"graph", "zd"}, {"dim", "2"}, {"sizes", "64,128"}, {"runs", "20000"}});
  const EstimateReport r = run_threshold(plan);
  const SummaryRow& row = r.rows.front();
  const double t = seconds_since(start);
  const bool ok = row.verdict == "estimated" && row.estimate >= 0.585 &&
                  row.estimate <= 0.600 && t <= 300;
  return {ok, fmt::format("p_c = {:.5f} [{:.5f}, {:.5f}], {:.0f}s (target 0.585..0.600, limit 300s)",
                          row.estimate, row.ci_lo, row.ci_hi, t)};
}

std::string describe(const SummaryRow& row) {
  return fmt::format("{} {:.4f} [{:.4f}, {:.4f}] {}{}", row.label, row.estimate,
                     row.ci_lo, row.ci_hi, row.verdict,
                     row.flags.empty() ? "" : " (" + row.flags + ")");
}

// 7. Threshold ordering cover <= decorated <= slab for d=2, k=(4).
Outcome sandwich_study() {
  const auto start = std::chrono::steady_clock::now();
  const EstimateReport r =
      run_sandwich(make_plan(StudyKind::sandwich, {{"d", "2"}, {"k", "4"}}));
  const double t = seconds_since(start);
  bool ok = r.structure.passed() && t <= 600;
  std::string detail;
  int comparisons = 0;
  for (const SummaryRow& row : r.rows) {
    if (row.basis != "simulation") continue;
    detail += "\n    " + describe(row);
    if (row.quantity == "p_c") ok &= row.verdict == "estimated";
    if (row.quantity == "p_c difference") {
      ++comparisons;
      ok &= row.verdict == "ordered" || row.verdict == "indistinguishable";
      ok &= row.flags.find("no-crossing") == std::string::npos &&
            row.flags.find("no-interval") == std::string::npos;
    }
  }
  ok &= comparisons == 2;
  return {ok, fmt::format("{:.0f}s (limit 600s){}", t, detail)};
}

// 8. Decorated thresholds along k = 2,3,5,8 against the Z^4 reference.
Outcome limit_study() {
  const auto start = std::chrono::steady_clock::now();
  const EstimateReport r =
      run_limit_trend(make_plan(StudyKind::limit, {{"d", "2"}, {"k", "2,3,5,8"}}));
  const double t = seconds_since(start);
  std::string detail;
  std::string trend;
  for (const SummaryRow& row : r.rows) {
    detail += "\n    " + describe(row);
    if (row.label == "trend") trend = row.verdict;
  }
  return {trend == "consistent", fmt::format("trend {}, {:.0f}s{}", trend, t, detail)};
}

std::map<std::string, std::string> report_files(const EstimateReport& r,
                                                const fs::path& dir) {
  fs::remove_all(dir);
  write_report(r, dir);
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    files[fs::relative(e.path(), dir).string()] = s.str();
  }
  fs::remove_all(dir);
  return files;
}

// 9. Complete per-point table for k=(3) against (4), reproducible.
Outcome conjecture_study() {
  const auto start = std::chrono::steady_clock::now();
  const StudyPlan plan = make_plan(StudyKind::conjecture, {{"d", "2"}, {"k", "3"}});
  const EstimateReport r = run_conjecture_probe(plan);
  std::size_t complete = 0;
  std::set<double> ps;
  std::map<std::string, int> tally;
  for (const PointRow& pt : r.points) {
    ps.insert(pt.p);
    ++tally[pt.verdict];
    if (std::isfinite(pt.ci_k.lo) && std::isfinite(pt.ci_k.hi) &&
        std::isfinite(pt.ci_k_prime.lo) && std::isfinite(pt.ci_k_prime.hi) &&
        !pt.verdict.empty()) {
      ++complete;
    }
  }
  const fs::path tmp = fs::temp_directory_path() / "lrperc_acceptance_c9";
  const bool same = report_files(r, tmp) == report_files(run_conjecture_probe(plan), tmp);
  const double t = seconds_since(start);
  std::string counts;
  for (const auto& [v, n] : tally) counts += fmt::format(" {}={}", v, n);
  const bool ok = ps.size() >= 20 && complete == r.points.size() && same;
  return {ok, fmt::format("{} grid points, {}/{} complete rows,{}; rerun {}; {:.0f}s",
                          ps.size(), complete, r.points.size(), counts,
                          same ? "identical" : "DIFFERS", t)};
}

// 10. Every study with the same seed at 1 and 3 threads: identical files.
Outcome reproducibility() {
  const std::pair<StudyKind, PlanEntries> plans[] = {
      {StudyKind::threshold,
       {{"graph", "slab-tilde"}, {"k", "2,3"}, {"sizes", "24,48"}, {"runs", "400"}}},
      {StudyKind::theta, {{"graph", "g"}, {"k", "3"}, {"sizes", "24"}, {"runs", "400"}}},
      {StudyKind::sandwich,
       {{"d", "1"}, {"k", "3"}, {"sizes", "12,24"}, {"runs", "300"}}},
      {StudyKind::limit, {{"d", "1"}, {"k", "2,3"}, {"sizes", "12,24"}, {"runs", "300"}}},
      {StudyKind::conjecture, {{"d", "2"}, {"k", "2"}, {"sizes", "16"}, {"runs", "300"}}},
  };
  const int saved = omp_get_max_threads();
  std::string detail;
  bool ok = true;
  for (const auto& [kind, entries] : plans) {
    PlanEntries e = entries;
    e["resamples"] = "200";
    e["samples"] = "2000";
    const StudyPlan plan = make_plan(kind, e);
    const fs::path tmp = fs::temp_directory_path() / "lrperc_acceptance_c10";
    omp_set_num_threads(1);
    const auto one = report_files(run_study(plan), tmp);
    omp_set_num_threads(3);
    const auto three = report_files(run_study(plan), tmp);
    const bool same = one == three;
    ok &= same;
    detail += fmt::format(" {}:{} files {}", study_name(kind), one.size(),
                          same ? "identical" : "DIFFER");
  }
  omp_set_num_threads(saved);
  return {ok, detail.substr(1)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"isomorphism suite", isomorphism_suite},
      {"quotient suite", quotient_suite},
      {"coupling suite", coupling_suite},
      {"engine oracle", engine_oracle},
      {"convolution", convolution_cases},
      {"square-lattice threshold", square_threshold},
      {"sandwich ordering", sandwich_study},
      {"limit trend", limit_study},
      {"conjecture probe", conjecture_study},
      {"reproducibility", reproducibility},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (!only.empty() && !only.contains(number)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    failures += o.passed ? 0 : 1;
    std::cout << fmt::format("{} criterion {:2} {}: {}\n", o.passed ? "PASS" : "FAIL",
                             number, criteria[i].first, o.detail)
              << std::flush;
  }
  std::cout << (failures == 0 ? "ALL CRITERIA PASS\n"
                              : fmt::format("{} CRITERIA FAILED\n", failures));
  return failures == 0 ? 0 : 1;
}
