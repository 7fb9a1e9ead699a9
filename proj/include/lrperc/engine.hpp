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

// Monte Carlo percolation on a GraphView: cluster labelling, Newman-Ziff
// occupation sweeps, binomial convolution to fixed-p curves, and the
// percolation-probability and threshold estimators built on them.

#ifndef LRPERC_ENGINE_HPP_
#define LRPERC_ENGINE_HPP_

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lrperc/lattice.hpp"

namespace lrperc {

enum class Event { reach, wrap, face_to_face };
enum class Mode { site, bond };

std::string_view event_name(Event event);
std::optional<Event> parse_event(std::string_view name);
std::string_view mode_name(Mode mode);

// Adjacency plus the per-vertex data every sweep needs. Distances are L-inf
// distances to the origin in Z^d (slab vertices are unfolded through the
// digit map, so a slab and its pruned preimage measure identically; Z^D uses
// its own coordinates). Periodic axes use the torus distance.
class PercolationLattice {
 public:
  explicit PercolationLattice(GraphView view,
                              Execution exec = Execution::parallel);

  const GraphView& view() const { return view_; }
  const AdjacencyTable& adjacency() const { return adjacency_; }
  std::uint32_t size() const { return adjacency_.size(); }
  std::uint32_t origin() const { return origin_; }
  std::span<const std::uint32_t> distance() const { return distance_; }
  // Face flags on coordinate 0: bit 0 low face, bit 1 high face.
  std::span<const std::uint8_t> faces() const { return faces_; }
  // Largest radius a reach event may ask for: half the smallest embedded
  // extent.
  std::uint32_t max_radius() const { return max_radius_; }
  // Extent of coordinate 0 measured in lattice units.
  std::int64_t linear_size() const { return linear_size_; }

  // Undirected bonds (u < v) with the coordinate-0 displacement u -> v.
  struct Bond {
    std::uint32_t u;
    std::uint32_t v;
    std::int32_t shift;
  };
  const std::vector<Bond>& bonds() const { return bonds_; }

  // Throws std::invalid_argument if `event` cannot be observed here: wrap
  // needs a periodic coordinate 0 longer than twice the longest bond,
  // face-to-face a free one, reach radii in [1, max_radius()].
  void check_event(Event event, std::span<const std::uint32_t> radii) const;

 private:
  GraphView view_;
  AdjacencyTable adjacency_;
  std::uint32_t origin_ = 0;
  std::vector<std::uint32_t> distance_;
  std::vector<std::uint8_t> faces_;
  std::vector<Bond> bonds_;
  std::uint32_t max_radius_ = 0;
  std::int64_t linear_size_ = 0;
  std::int32_t longest_step_ = 0;
};

struct SiteConfiguration {
  std::vector<std::uint8_t> open;  // by dense vertex index
  double p = 0.0;
  std::uint64_t seed = 0;
};

// Independent Bernoulli(p) sites; site i is open iff the stream value at
// (seed, i) is below p. Throws std::invalid_argument unless 0 <= p <= 1.
SiteConfiguration sample_configuration(const GraphView& view, double p,
                                       std::uint64_t seed);

struct BondConfiguration {
  std::vector<std::uint8_t> open;  // by PercolationLattice::bonds() index
  double p = 0.0;
  std::uint64_t seed = 0;
};

BondConfiguration sample_bond_configuration(const PercolationLattice& lattice,
                                            double p, std::uint64_t seed);

// Weighted union-find with path compression. Each node also carries its
// coordinate-0 displacement to its parent so that closing a cycle with a
// nonzero net displacement (a cluster wrapping a periodic axis) is visible.
class UnionFind {
 public:
  explicit UnionFind(std::uint32_t n = 0);

  void reset();
  std::uint32_t size() const { return static_cast<std::uint32_t>(parent_.size()); }

  struct Root {
    std::uint32_t root;
    std::int64_t offset;  // position(v) - position(root)
  };
  Root find(std::uint32_t v);

  enum class Join { merged, same, wrapped };
  // Joins the sets of a and b where position(b) - position(a) = shift.
  Join unite(std::uint32_t a, std::uint32_t b, std::int64_t shift);

  std::uint32_t set_size(std::uint32_t root) const { return size_[root]; }
  bool same(std::uint32_t a, std::uint32_t b) {
    return find(a).root == find(b).root;
  }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> size_;
  std::vector<std::int64_t> offset_;
};

// Union over open sites: two open sites share a root iff an open path joins
// them. Closed sites stay singletons.
UnionFind clusters(const SiteConfiguration& config,
                   const PercolationLattice& lattice);
UnionFind clusters(const BondConfiguration& config,
                   const PercolationLattice& lattice);

// Origin open and its cluster holds a vertex at distance >= radius. Throws
// std::invalid_argument for radius outside [1, max_radius()].
bool reach_event(const SiteConfiguration& config,
                 const PercolationLattice& lattice, std::uint32_t radius);

// Sentinel threshold for a replica in which the event never happened.
inline constexpr std::uint32_t kNever = std::numeric_limits<std::uint32_t>::max();

// Event statistic after m = 0..M occupation steps. Events here are
// increasing, so each replica is summarised by the first m at which its
// event holds; q[m] is the fraction of replicas with threshold <= m.
struct MicrocanonicalCurve {
  std::uint64_t steps = 0;  // M
  std::uint64_t runs = 0;
  std::vector<double> q;    // size M + 1
  std::vector<std::uint32_t> thresholds;  // per replica; kNever if never

  static MicrocanonicalCurve from_thresholds(std::uint64_t steps,
                                             std::vector<std::uint32_t> thresholds);
  // Curve without replica data (analytic inputs and tests).
  static MicrocanonicalCurve from_values(std::vector<double> q,
                                         std::uint64_t runs);
};

struct SweepOptions {
  Event event = Event::wrap;
  std::vector<std::uint32_t> radii;  // reach only; strictly increasing
  std::uint64_t runs = 1;
  std::uint64_t seed = 0;
  Mode mode = Mode::site;
};

// Occupation order of replica `run`: a Fisher-Yates permutation of
// [0, count) drawn from stream (seed, replica run).
std::vector<std::uint32_t> replica_order(std::uint32_t count,
                                         std::uint64_t seed,
                                         std::uint64_t run);

// One curve per channel: one per radius for reach, a single curve else.
// Replicas run in parallel; the result is identical for any thread count.
std::vector<MicrocanonicalCurve> newman_ziff(const PercolationLattice& lattice,
                                             const SweepOptions& options);
// Serial reference for the above.
std::vector<MicrocanonicalCurve> newman_ziff_serial(
    const PercolationLattice& lattice, const SweepOptions& options);

// Binomial(M, p) weights on [first, first + w.size()), built outward from
// the mode; weights below kBinomialCutoff are dropped and the rest
// renormalised. truncated_mass is 1 minus the kept mass before
// renormalisation.
inline constexpr double kBinomialCutoff = 1e-15;
struct BinomialWeights {
  std::uint64_t first = 0;
  std::vector<double> w;
  double truncated_mass = 0.0;
};
BinomialWeights binomial_weights(std::uint64_t steps, double p);

struct CanonicalCurve {
  std::vector<double> p;
  std::vector<double> q;
  std::vector<double> stderr_;  // NaN when the curve has no replica data
  std::uint64_t steps = 0;
  std::uint64_t runs = 0;
  double max_truncated_mass = 0.0;
};

// Q(p) = sum_m Binomial(M, m, p) q_m on every grid point. Throws
// std::invalid_argument for grid points outside [0, 1].
CanonicalCurve convolve(const MicrocanonicalCurve& micro,
                        std::span<const double> p_grid);

// Nondecreasing least-squares fit (pool adjacent violators).
std::vector<double> isotonic_fit(std::span<const double> y);

struct Crossing {
  bool found = false;
  double p = std::numeric_limits<double>::quiet_NaN();
};

// Zero of diff = Q_large - Q_small between its minimum and its maximum on
// the grid, after an isotonic fit of that stretch; found only if the
// minimum is negative, the maximum positive and the minimum comes first.
Crossing locate_crossing(std::span<const double> p_grid,
                         std::span<const double> diff);

struct Interval {
  double lo = std::numeric_limits<double>::quiet_NaN();
  double hi = std::numeric_limits<double>::quiet_NaN();
};

// Type-7 percentile interval of `values` at `level` (e.g. 0.95).
Interval percentile_interval(std::vector<double> values, double level);

inline constexpr std::uint64_t kDefaultResamples = 2000;
inline constexpr double kDefaultLevel = 0.95;

struct PcOptions {
  Event event = Event::wrap;
  std::uint64_t runs = 10000;
  std::uint64_t seed = 0;
  Mode mode = Mode::site;
  std::vector<double> p_grid;  // sorted, within [0, 1]
  std::uint64_t resamples = kDefaultResamples;
  double level = kDefaultLevel;
  // Bootstrap crossings are searched within this distance of the estimate.
  double bootstrap_halfwidth = 0.05;
};

struct ThresholdEstimate {
  bool crossed = false;
  double p_c = std::numeric_limits<double>::quiet_NaN();
  Interval ci;
  std::uint64_t resamples = 0;
  std::uint64_t failed_resamples = 0;
  std::string note;
  MicrocanonicalCurve small;
  MicrocanonicalCurve large;
};

// Crossing of the event curves of two sizes (the larger at least twice the
// smaller, or the same lattice, which never crosses), with a percentile
// bootstrap interval over replica resamples.
ThresholdEstimate estimate_pc(const PercolationLattice& small,
                              const PercolationLattice& large,
                              const PcOptions& options);

// Crossing of two already-swept curves.
ThresholdEstimate crossing_estimate(MicrocanonicalCurve small,
                                    MicrocanonicalCurve large,
                                    const PcOptions& options);

struct ThetaEstimate {
  std::vector<std::uint32_t> radii;
  std::vector<MicrocanonicalCurve> micro;  // one per radius
  std::vector<CanonicalCurve> curves;      // one per radius
};

// Origin-reach curves for a ladder of radii on one lattice.
ThetaEstimate estimate_theta(const PercolationLattice& lattice,
                             std::span<const double> p_grid,
                             std::vector<std::uint32_t> radii,
                             std::uint64_t runs, std::uint64_t seed,
                             Mode mode = Mode::site);

// Pointwise percentile bootstrap band of a convolved curve.
struct Band {
  std::vector<double> lo;
  std::vector<double> hi;
};
Band bootstrap_band(const MicrocanonicalCurve& micro,
                    std::span<const double> p_grid, std::uint64_t resamples,
                    std::uint64_t seed, double level = kDefaultLevel);

struct CurveMeta {
  std::uint64_t seed = 0;
  std::string family;
  int d = 0;
  std::string k;
  std::string event;
  std::int64_t size = 0;
};

// Columns p,Q,stderr,M,runs,seed,family,d,k,event,size with one header line.
void write_curve_csv(std::ostream& out, const CanonicalCurve& curve,
                     const CurveMeta& meta);
inline constexpr std::string_view kCurveCsvHeader =
    "p,Q,stderr,M,runs,seed,family,d,k,event,size";

// Evenly spaced grid start, start+step, ... up to stop (inclusive within
// half a step). Throws std::invalid_argument on an empty or out-of-range
// specification.
std::vector<double> make_grid(double start, double stop, double step);

}  // namespace lrperc

#endif  // LRPERC_ENGINE_HPP_
