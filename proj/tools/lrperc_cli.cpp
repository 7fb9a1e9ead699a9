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

// lrperc: structural verification and percolation studies.
//
//   lrperc verify --d 1 --k 3 --window 27
//   lrperc pc --graph zd --dim 2 --sizes 64,128 --runs 20000 --seed 7
//   lrperc sandwich --d 2 --k 4 --out results/sandwich --svg sandwich.svg
//
// Exit status: 0 success, 1 a structural check failed, 2 usage error (no
// files are written), 3 unexpected internal error.

#include <omp.h>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "lrperc/experiments.hpp"
#include "lrperc/lattice.hpp"
#include "lrperc/maps.hpp"
#include "lrperc/plot.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerificationFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Flag name -> plan key. Only flags present on the command line are copied
// into the plan, so they override a --plan file.
const std::map<std::string, std::string>& flag_keys() {
  static const std::map<std::string, std::string> keys = {
      {"--d", "d"},           {"--k", "k"},         {"--graph", "graph"},
      {"--dim", "dim"},       {"--sizes", "sizes"}, {"--p-grid", "p_grid"},
      {"--radius", "radius"}, {"--runs", "runs"},   {"--seed", "seed"},
      {"--out", "out"},       {"--svg", "svg"},     {"--samples", "samples"}};
  return keys;
}

struct StudyFlags {
  std::map<std::string, std::string> values;
  bool bond = false;
  int threads = 0;
  std::string plan;
};

void add_study_flags(CLI::App* cmd, StudyFlags& flags) {
  for (const auto& [flag, key] : flag_keys()) {
    cmd->add_option(flag, flags.values[flag], "plan key '" + key + "'");
  }
  cmd->add_flag("--bond", flags.bond, "bond percolation instead of site");
  cmd->add_option("--threads", flags.threads, "worker threads")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--plan", flags.plan, "plan file (flags win on conflict)");
}

lrperc::StudyPlan resolve_plan(lrperc::StudyKind kind, CLI::App* cmd,
                               const StudyFlags& flags) {
  lrperc::PlanEntries entries;
  if (!flags.plan.empty()) entries = lrperc::read_plan_file(flags.plan);
  for (const auto& [flag, key] : flag_keys()) {
    if (cmd->count(flag) > 0) entries[key] = flags.values.at(flag);
  }
  if (flags.bond) entries["mode"] = "bond";
  // The graph may come from the plan file, so CLI11 cannot enforce it.
  if (kind == lrperc::StudyKind::threshold && !entries.contains("graph")) {
    throw std::invalid_argument("--graph is required");
  }
  return lrperc::make_plan(kind, entries);
}

void set_threads(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

int run_study_command(lrperc::StudyKind kind, CLI::App* cmd,
                      const StudyFlags& flags) {
  lrperc::StudyPlan plan;
  try {
    plan = resolve_plan(kind, cmd, flags);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  set_threads(flags.threads);
  lrperc::EstimateReport report;
  try {
    report = lrperc::run_study(plan);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  lrperc::write_report(report, plan.out);
  if (!plan.svg.empty()) lrperc::emit_plot(report, plan.svg);

  std::ostringstream summary;
  lrperc::write_summary_csv(summary, report.rows);
  std::cout << summary.str();
  if (!report.structure.claims.empty() && !report.structure.passed()) {
    std::cerr << report.structure.to_text();
    return kExitVerificationFailed;
  }
  return kExitOk;
}

struct VerifyFlags {
  int d = 0;
  std::string k;
  long long window = 0;
  std::uint64_t samples = lrperc::kDefaultQuotientSamples;
  std::uint64_t seed = 1;
  std::string out;
  int threads = 0;
};

int run_verify(const VerifyFlags& flags) {
  std::vector<int> k;
  std::string text = flags.k;
  for (char& c : text) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(text);
  std::string item;
  while (in >> item) {
    try {
      std::size_t used = 0;
      k.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(fmt::format("--k: cannot parse '{}'", item));
    }
  }
  if (k.empty()) throw UsageError("--k: verification needs at least one scale");

  lrperc::VerificationReport report;
  try {
    const lrperc::LatticeSpec spec(flags.d, k);
    const lrperc::Coord period = spec.period();
    const lrperc::Coord window = flags.window > 0 ? flags.window : 3 * period;
    if (window % period != 0 || window < 3 * period) {
      throw std::invalid_argument(fmt::format(
          "--window: {} must be a multiple of {} and at least {}", window,
          period, 3 * period));
    }
    const lrperc::Coord lo = -(window / period / 2) * period;
    set_threads(flags.threads);
    for (const lrperc::Boundary b :
         {lrperc::Boundary::free, lrperc::Boundary::periodic}) {
      const lrperc::Window base =
          lrperc::Window::cube(flags.d, lo, lo + window, b);
      report.append(lrperc::check_isomorphism(base, spec));
      report.append(lrperc::check_lattice_invariants(base, spec));
    }
    report.append(lrperc::check_quotient(
        lrperc::Window::cube(spec.hyper_dim(), -window, window,
                             lrperc::Boundary::free),
        spec, flags.samples, flags.seed));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const std::string text_report = report.to_text();
  if (!flags.out.empty()) {
    lrperc::write_file_atomic(std::filesystem::path(flags.out) /
                                  "verification.txt",
                              text_report);
  }
  std::cout << text_report;
  std::cout << (report.passed() ? "ALL PASS\n" : "VERIFICATION FAILED\n");
  return report.passed() ? kExitOk : kExitVerificationFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Percolation on decorated lattices: verification and studies"};
  app.require_subcommand(1);

  VerifyFlags verify_flags;
  CLI::App* verify = app.add_subcommand(
      "verify", "exhaustive isomorphism, quotient and lattice checks");
  verify->add_option("--d", verify_flags.d, "base dimension")
      ->required()
      ->check(CLI::PositiveNumber);
  verify->add_option("--k", verify_flags.k, "comma list of scale factors")
      ->required();
  verify->add_option("--window", verify_flags.window,
                     "window extent (multiple of L_n, at least 3 L_n)");
  verify->add_option("--samples", verify_flags.samples,
                     "quotient sample count");
  verify->add_option("--seed", verify_flags.seed, "quotient sampling seed");
  verify->add_option("--out", verify_flags.out, "directory for the report");
  verify->add_option("--threads", verify_flags.threads, "worker threads")
      ->check(CLI::PositiveNumber);

  struct Study {
    const char* name;
    const char* help;
    lrperc::StudyKind kind;
  };
  const Study studies[] = {
      {"theta", "origin-reach curves for a radius ladder",
       lrperc::StudyKind::theta},
      {"pc", "threshold by crossing of two sizes", lrperc::StudyKind::threshold},
      {"sandwich", "thresholds of the cover, decorated lattice and slab",
       lrperc::StudyKind::sandwich},
      {"limit", "decorated thresholds along a ladder of scale factors",
       lrperc::StudyKind::limit},
      {"conjecture", "pointwise reach comparison of k and k+1",
       lrperc::StudyKind::conjecture},
  };
  std::map<std::string, StudyFlags> study_flags;
  std::vector<std::pair<CLI::App*, lrperc::StudyKind>> commands;
  for (const Study& s : studies) {
    CLI::App* cmd = app.add_subcommand(s.name, s.help);
    add_study_flags(cmd, study_flags[s.name]);
    commands.emplace_back(cmd, s.kind);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (verify->parsed()) return run_verify(verify_flags);
    for (auto& [cmd, kind] : commands) {
      if (cmd->parsed()) {
        return run_study_command(kind, cmd, study_flags[cmd->get_name()]);
      }
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}
