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

#include "lrperc/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <utility>

#include <fmt/format.h>

#include "lrperc/maps.hpp"
#include "lrperc/rng.hpp"

namespace lrperc {
namespace {

constexpr double kDiffEpsilon = 1e-12;

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(fmt::format("probability {} outside [0,1]", p));
  }
}

void check_grid(std::span<const double> grid) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    check_probability(grid[i]);
    if (i > 0 && grid[i] < grid[i - 1]) {
      throw std::invalid_argument("p grid is not sorted");
    }
  }
}

// Embedded position of a vertex in Z^d (Z^D for the hypercubic family) and
// the period of each embedded axis (0 for free axes).
struct Embedding {
  std::vector<Coord> period;
  std::vector<Coord> extent;
};

Embedding embedding_of(const GraphView& view) {
  Embedding e;
  const Window& w = view.window();
  const LatticeSpec& spec = view.spec();
  if (is_slab_family(view.family())) {
    for (int a = 0; a < spec.base_dim(); ++a) {
      const AxisRange& r = w.axis(static_cast<std::size_t>(a * spec.block_size()));
      const Coord extent = r.extent() * spec.period();
      e.extent.push_back(extent);
      e.period.push_back(r.periodic() ? extent : 0);
    }
  } else {
    for (const AxisRange& r : w.axes()) {
      e.extent.push_back(r.extent());
      e.period.push_back(r.periodic() ? r.extent() : 0);
    }
  }
  return e;
}

Vertex embed(const GraphView& view, const Vertex& v) {
  return is_slab_family(view.family()) ? from_slab(v, view.spec()) : v;
}

// Bookkeeping shared by the site and bond sweeps of one replica.
class Sweeper {
 public:
  Sweeper(const PercolationLattice& lattice, const SweepOptions& options)
      : lattice_(lattice),
        options_(options),
        uf_(lattice.size()),
        open_(lattice.size(), 0),
        reach_(lattice.size(), 0),
        face_(lattice.size(), 0) {}

  std::size_t channels() const {
    return options_.event == Event::reach ? options_.radii.size() : 1;
  }

  void run(std::uint64_t replica, std::span<std::uint32_t> out) {
    std::fill(out.begin(), out.end(), kNever);
    uf_.reset();
    next_radius_ = 0;
    if (options_.mode == Mode::site) {
      run_site(replica, out);
    } else {
      run_bond(replica, out);
    }
  }

 private:
  void shuffle(std::uint32_t count, std::uint64_t replica) {
    order_.resize(count);
    std::iota(order_.begin(), order_.end(), 0u);
    CounterRng rng(options_.seed, stream_id(StreamDomain::replica, replica));
    for (std::uint32_t i = count; i > 1; --i) {
      const auto j = static_cast<std::uint32_t>(rng.below(i));
      std::swap(order_[i - 1], order_[j]);
    }
  }

  // Joins and merges the cluster data; returns true on a wrapping cycle.
  bool join(std::uint32_t a, std::uint32_t b, std::int64_t shift) {
    const UnionFind::Root ra = uf_.find(a);
    const UnionFind::Root rb = uf_.find(b);
    if (ra.root == rb.root) return ra.offset + shift != rb.offset;
    uf_.unite(a, b, shift);
    const std::uint32_t root = uf_.find(a).root;
    const std::uint32_t other = root == ra.root ? rb.root : ra.root;
    reach_[root] = std::max(reach_[root], reach_[other]);
    face_[root] |= face_[other];
    return false;
  }

  // Records every channel that became true at step m; true when all are.
  bool observe(std::uint32_t m, std::uint32_t touched, bool wrapped,
               std::span<std::uint32_t> out) {
    switch (options_.event) {
      case Event::reach: {
        const std::uint32_t origin = lattice_.origin();
        if (!open_[origin]) return false;
        const std::uint32_t r = reach_[uf_.find(origin).root];
        while (next_radius_ < options_.radii.size() &&
               r >= options_.radii[next_radius_]) {
          out[next_radius_++] = m;
        }
        return next_radius_ == options_.radii.size();
      }
      case Event::wrap:
        if (wrapped) out[0] = m;
        return wrapped;
      case Event::face_to_face:
        if (face_[uf_.find(touched).root] == 3) {
          out[0] = m;
          return true;
        }
        return false;
    }
    return false;
  }

  void run_site(std::uint64_t replica, std::span<std::uint32_t> out) {
    const AdjacencyTable& adj = lattice_.adjacency();
    const auto distance = lattice_.distance();
    const auto faces = lattice_.faces();
    std::fill(open_.begin(), open_.end(), 0);
    shuffle(lattice_.size(), replica);
    for (std::uint32_t m = 1; m <= lattice_.size(); ++m) {
      const std::uint32_t s = order_[m - 1];
      open_[s] = 1;
      reach_[s] = distance[s];
      face_[s] = faces[s];
      bool wrapped = false;
      const auto nb = adj.neighbors(s);
      const auto sh = adj.shifts(s);
      for (std::size_t k = 0; k < nb.size(); ++k) {
        if (open_[nb[k]]) wrapped |= join(s, nb[k], sh[k]);
      }
      if (observe(m, s, wrapped, out)) return;
    }
  }

  void run_bond(std::uint64_t replica, std::span<std::uint32_t> out) {
    const auto& bonds = lattice_.bonds();
    std::fill(open_.begin(), open_.end(), 1);
    std::copy(lattice_.distance().begin(), lattice_.distance().end(),
              reach_.begin());
    std::copy(lattice_.faces().begin(), lattice_.faces().end(), face_.begin());
    if (observe(0, lattice_.origin(), false, out)) return;
    shuffle(static_cast<std::uint32_t>(bonds.size()), replica);
    for (std::uint32_t m = 1; m <= bonds.size(); ++m) {
      const PercolationLattice::Bond& b = bonds[order_[m - 1]];
      const bool wrapped = join(b.u, b.v, b.shift);
      if (observe(m, b.u, wrapped, out)) return;
    }
  }

  const PercolationLattice& lattice_;
  const SweepOptions& options_;
  UnionFind uf_;
  std::vector<std::uint8_t> open_;
  std::vector<std::uint32_t> reach_;
  std::vector<std::uint8_t> face_;
  std::vector<std::uint32_t> order_;
  std::size_t next_radius_ = 0;
};

std::vector<MicrocanonicalCurve> collect(
    const PercolationLattice& lattice, const SweepOptions& options,
    const std::vector<std::vector<std::uint32_t>>& thresholds) {
  const std::uint64_t steps = options.mode == Mode::site
                                  ? lattice.size()
                                  : lattice.bonds().size();
  std::vector<MicrocanonicalCurve> out;
  for (const auto& channel : thresholds) {
    out.push_back(MicrocanonicalCurve::from_thresholds(steps, channel));
  }
  return out;
}

void check_sweep(const PercolationLattice& lattice,
                 const SweepOptions& options) {
  if (options.runs == 0) throw std::invalid_argument("runs must be positive");
  lattice.check_event(options.event, options.radii);
}

// Cumulative fraction of thresholds <= m for m = 0..steps, from a histogram.
void cumulate(std::span<const std::uint32_t> hist, std::uint64_t runs,
              std::vector<double>& q) {
  q.resize(hist.size());
  std::uint64_t acc = 0;
  for (std::size_t m = 0; m < hist.size(); ++m) {
    acc += hist[m];
    q[m] = static_cast<double>(acc) / static_cast<double>(runs);
  }
}

double apply_weights(const BinomialWeights& bw, std::span<const double> q) {
  double sum = 0.0;
  for (std::size_t i = 0; i < bw.w.size(); ++i) sum += bw.w[i] * q[bw.first + i];
  return std::clamp(sum, 0.0, 1.0);
}

// Replica resample: histogram of thresholds drawn with replacement.
void resample_hist(std::span<const std::uint32_t> thresholds,
                   std::uint64_t steps, CounterRng& rng,
                   std::vector<std::uint32_t>& hist) {
  hist.assign(steps + 1, 0);
  const std::uint64_t runs = thresholds.size();
  for (std::uint64_t i = 0; i < runs; ++i) {
    const std::uint32_t t = thresholds[rng.below(runs)];
    if (t <= steps) ++hist[t];
  }
}

}  // namespace

std::string_view event_name(Event event) {
  switch (event) {
    case Event::reach:
      return "reach";
    case Event::wrap:
      return "wrap";
    case Event::face_to_face:
      return "face-to-face";
  }
  return "?";
}

std::optional<Event> parse_event(std::string_view name) {
  for (const Event e : {Event::reach, Event::wrap, Event::face_to_face}) {
    if (event_name(e) == name) return e;
  }
  return std::nullopt;
}

std::string_view mode_name(Mode mode) {
  return mode == Mode::site ? "site" : "bond";
}

PercolationLattice::PercolationLattice(GraphView view, Execution exec)
    : view_(std::move(view)), adjacency_(AdjacencyTable::build(view_, exec)) {
  const Window& w = view_.window();
  origin_ = static_cast<std::uint32_t>(w.index_of(view_.origin()));
  const Embedding e = embedding_of(view_);
  const std::uint32_t n = adjacency_.size();
  distance_.resize(n);
  faces_.resize(n);
  const AxisRange& axis0 = w.axis(0);

  auto fill = [&](std::uint32_t i) {
    const Vertex v = w.vertex_at(i);
    const Vertex x = embed(view_, v);
    Coord best = 0;
    for (std::size_t a = 0; a < x.size(); ++a) {
      Coord delta = x[a];
      if (e.period[a] > 0) {
        delta = floor_mod(delta, e.period[a]);
        delta = std::min(delta, e.period[a] - delta);
      } else {
        delta = delta < 0 ? -delta : delta;
      }
      best = std::max(best, delta);
    }
    distance_[i] = static_cast<std::uint32_t>(best);
    faces_[i] = static_cast<std::uint8_t>((v[0] == axis0.lo ? 1 : 0) |
                                          (v[0] == axis0.hi - 1 ? 2 : 0));
  };
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
      fill(static_cast<std::uint32_t>(i));
    }
  } else {
    for (std::uint32_t i = 0; i < n; ++i) fill(i);
  }

  Coord smallest = e.extent.front();
  for (const Coord x : e.extent) smallest = std::min(smallest, x);
  max_radius_ = static_cast<std::uint32_t>(smallest / 2);
  linear_size_ = e.extent.front();

  for (std::uint32_t u = 0; u < n; ++u) {
    const auto nb = adjacency_.neighbors(u);
    const auto sh = adjacency_.shifts(u);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      longest_step_ = std::max(longest_step_, std::abs(sh[k]));
      if (u < nb[k]) bonds_.push_back({u, nb[k], sh[k]});
    }
  }
}

void PercolationLattice::check_event(Event event,
                                     std::span<const std::uint32_t> radii) const {
  const AxisRange& axis0 = view_.window().axis(0);
  switch (event) {
    case Event::wrap:
      if (!axis0.periodic()) {
        throw std::invalid_argument("wrap event needs a periodic axis 0");
      }
      if (axis0.extent() <= 2 * static_cast<Coord>(longest_step_)) {
        throw std::invalid_argument(fmt::format(
            "wrap event needs axis 0 longer than {} (twice the longest bond)",
            2 * longest_step_));
      }
      return;
    case Event::face_to_face:
      if (axis0.periodic()) {
        throw std::invalid_argument("face-to-face event needs a free axis 0");
      }
      return;
    case Event::reach:
      if (radii.empty()) throw std::invalid_argument("reach event needs radii");
      for (std::size_t i = 0; i < radii.size(); ++i) {
        if (radii[i] < 1 || radii[i] > max_radius_) {
          throw std::invalid_argument(fmt::format(
              "radius {} outside [1,{}]", radii[i], max_radius_));
        }
        if (i > 0 && radii[i] <= radii[i - 1]) {
          throw std::invalid_argument("radii must be strictly increasing");
        }
      }
      return;
  }
}

SiteConfiguration sample_configuration(const GraphView& view, double p,
                                       std::uint64_t seed) {
  check_probability(p);
  SiteConfiguration config{std::vector<std::uint8_t>(view.volume()), p, seed};
  const std::uint64_t stream = stream_id(StreamDomain::site_field, 0);
  for (std::uint64_t i = 0; i < view.volume(); ++i) {
    config.open[i] = uniform_at(seed, stream, i) < p ? 1 : 0;
  }
  return config;
}

BondConfiguration sample_bond_configuration(const PercolationLattice& lattice,
                                            double p, std::uint64_t seed) {
  check_probability(p);
  const std::size_t count = lattice.bonds().size();
  BondConfiguration config{std::vector<std::uint8_t>(count), p, seed};
  const std::uint64_t stream = stream_id(StreamDomain::bond_field, 0);
  for (std::size_t i = 0; i < count; ++i) {
    config.open[i] = uniform_at(seed, stream, i) < p ? 1 : 0;
  }
  return config;
}

UnionFind::UnionFind(std::uint32_t n) : parent_(n), size_(n), offset_(n) {
  reset();
}

void UnionFind::reset() {
  std::iota(parent_.begin(), parent_.end(), 0u);
  std::fill(size_.begin(), size_.end(), 1u);
  std::fill(offset_.begin(), offset_.end(), 0);
}

UnionFind::Root UnionFind::find(std::uint32_t v) {
  std::uint32_t root = v;
  std::int64_t total = 0;
  while (parent_[root] != root) {
    total += offset_[root];
    root = parent_[root];
  }
  // Point every node on the path at the root with its full offset.
  std::uint32_t x = v;
  std::int64_t remaining = total;
  while (parent_[x] != root && x != root) {
    const std::uint32_t next = parent_[x];
    const std::int64_t step = offset_[x];
    parent_[x] = root;
    offset_[x] = remaining;
    remaining -= step;
    x = next;
  }
  return {root, total};
}

UnionFind::Join UnionFind::unite(std::uint32_t a, std::uint32_t b,
                                 std::int64_t shift) {
  const Root ra = find(a);
  const Root rb = find(b);
  if (ra.root == rb.root) {
    return ra.offset + shift == rb.offset ? Join::same : Join::wrapped;
  }
  // position(rb) - position(ra) = offset_a + shift - offset_b.
  const std::int64_t rb_minus_ra = ra.offset + shift - rb.offset;
  if (size_[ra.root] < size_[rb.root]) {
    parent_[ra.root] = rb.root;
    offset_[ra.root] = -rb_minus_ra;
    size_[rb.root] += size_[ra.root];
  } else {
    parent_[rb.root] = ra.root;
    offset_[rb.root] = rb_minus_ra;
    size_[ra.root] += size_[rb.root];
  }
  return Join::merged;
}

UnionFind clusters(const SiteConfiguration& config,
                   const PercolationLattice& lattice) {
  if (config.open.size() != lattice.size()) {
    throw std::invalid_argument("configuration does not match the lattice");
  }
  UnionFind uf(lattice.size());
  const AdjacencyTable& adj = lattice.adjacency();
  for (std::uint32_t u = 0; u < lattice.size(); ++u) {
    if (!config.open[u]) continue;
    const auto nb = adj.neighbors(u);
    const auto sh = adj.shifts(u);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      if (nb[k] > u && config.open[nb[k]]) uf.unite(u, nb[k], sh[k]);
    }
  }
  return uf;
}

UnionFind clusters(const BondConfiguration& config,
                   const PercolationLattice& lattice) {
  const auto& bonds = lattice.bonds();
  if (config.open.size() != bonds.size()) {
    throw std::invalid_argument("configuration does not match the lattice");
  }
  UnionFind uf(lattice.size());
  for (std::size_t i = 0; i < bonds.size(); ++i) {
    if (config.open[i]) uf.unite(bonds[i].u, bonds[i].v, bonds[i].shift);
  }
  return uf;
}

bool reach_event(const SiteConfiguration& config,
                 const PercolationLattice& lattice, std::uint32_t radius) {
  const std::uint32_t radii[] = {radius};
  lattice.check_event(Event::reach, radii);
  if (config.open.size() != lattice.size()) {
    throw std::invalid_argument("configuration does not match the lattice");
  }
  if (!config.open[lattice.origin()]) return false;
  UnionFind uf = clusters(config, lattice);
  const std::uint32_t root = uf.find(lattice.origin()).root;
  const auto distance = lattice.distance();
  for (std::uint32_t v = 0; v < lattice.size(); ++v) {
    if (config.open[v] && distance[v] >= radius && uf.find(v).root == root) {
      return true;
    }
  }
  return false;
}

MicrocanonicalCurve MicrocanonicalCurve::from_thresholds(
    std::uint64_t steps, std::vector<std::uint32_t> thresholds) {
  MicrocanonicalCurve c;
  c.steps = steps;
  c.runs = thresholds.size();
  if (c.runs == 0) throw std::invalid_argument("no replicas");
  std::vector<std::uint32_t> hist(steps + 1, 0);
  for (const std::uint32_t t : thresholds) {
    if (t != kNever && t > steps) {
      throw std::invalid_argument("threshold beyond the last step");
    }
    if (t <= steps) ++hist[t];
  }
  cumulate(hist, c.runs, c.q);
  c.thresholds = std::move(thresholds);
  return c;
}

MicrocanonicalCurve MicrocanonicalCurve::from_values(std::vector<double> q,
                                                     std::uint64_t runs) {
  if (q.empty()) throw std::invalid_argument("empty curve");
  MicrocanonicalCurve c;
  c.steps = q.size() - 1;
  c.runs = runs;
  c.q = std::move(q);
  return c;
}

std::vector<std::uint32_t> replica_order(std::uint32_t count,
                                         std::uint64_t seed,
                                         std::uint64_t run) {
  std::vector<std::uint32_t> order(count);
  std::iota(order.begin(), order.end(), 0u);
  CounterRng rng(seed, stream_id(StreamDomain::replica, run));
  for (std::uint32_t i = count; i > 1; --i) {
    const auto j = static_cast<std::uint32_t>(rng.below(i));
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

std::vector<MicrocanonicalCurve> newman_ziff(const PercolationLattice& lattice,
                                             const SweepOptions& options) {
  check_sweep(lattice, options);
  const std::size_t channels =
      options.event == Event::reach ? options.radii.size() : 1;
  std::vector<std::vector<std::uint32_t>> thresholds(
      channels, std::vector<std::uint32_t>(options.runs));
  const auto runs = static_cast<std::int64_t>(options.runs);
#pragma omp parallel
  {
    Sweeper sweeper(lattice, options);
    std::vector<std::uint32_t> out(channels);
#pragma omp for schedule(dynamic, 8)
    for (std::int64_t r = 0; r < runs; ++r) {
      sweeper.run(static_cast<std::uint64_t>(r), out);
      for (std::size_t c = 0; c < channels; ++c) thresholds[c][r] = out[c];
    }
  }
  return collect(lattice, options, thresholds);
}

std::vector<MicrocanonicalCurve> newman_ziff_serial(
    const PercolationLattice& lattice, const SweepOptions& options) {
  check_sweep(lattice, options);
  Sweeper sweeper(lattice, options);
  const std::size_t channels = sweeper.channels();
  std::vector<std::vector<std::uint32_t>> thresholds(
      channels, std::vector<std::uint32_t>(options.runs));
  std::vector<std::uint32_t> out(channels);
  for (std::uint64_t r = 0; r < options.runs; ++r) {
    sweeper.run(r, out);
    for (std::size_t c = 0; c < channels; ++c) thresholds[c][r] = out[c];
  }
  return collect(lattice, options, thresholds);
}

BinomialWeights binomial_weights(std::uint64_t steps, double p) {
  check_probability(p);
  if (p == 0.0) return {0, {1.0}, 0.0};
  if (p == 1.0) return {steps, {1.0}, 0.0};
  const auto M = static_cast<double>(steps);
  auto mode = static_cast<std::uint64_t>(std::floor((M + 1.0) * p));
  mode = std::min(mode, steps);
  const auto k = static_cast<double>(mode);
  const double log_mode = std::lgamma(M + 1.0) - std::lgamma(k + 1.0) -
                          std::lgamma(M - k + 1.0) + k * std::log(p) +
                          (M - k) * std::log1p(-p);
  const double odds = p / (1.0 - p);

  std::vector<double> below;  // mode-1, mode-2, ...
  double w = std::exp(log_mode);
  for (std::uint64_t m = mode; m > 0; --m) {
    w *= static_cast<double>(m) / (static_cast<double>(steps - m) + 1.0) / odds;
    if (w < kBinomialCutoff) break;
    below.push_back(w);
  }
  BinomialWeights out;
  out.first = mode - below.size();
  out.w.assign(below.rbegin(), below.rend());
  w = std::exp(log_mode);
  out.w.push_back(w);
  for (std::uint64_t m = mode; m < steps; ++m) {
    w *= (static_cast<double>(steps - m)) / (static_cast<double>(m) + 1.0) *
         odds;
    if (w < kBinomialCutoff) break;
    out.w.push_back(w);
  }
  double kept = 0.0;
  for (const double x : out.w) kept += x;
  out.truncated_mass = std::max(0.0, 1.0 - kept);
  for (double& x : out.w) x /= kept;
  return out;
}

CanonicalCurve convolve(const MicrocanonicalCurve& micro,
                        std::span<const double> p_grid) {
  check_grid(p_grid);
  if (micro.q.size() != micro.steps + 1) {
    throw std::invalid_argument("microcanonical curve has the wrong length");
  }
  CanonicalCurve out;
  out.steps = micro.steps;
  out.runs = micro.runs;
  const bool replicas = !micro.thresholds.empty() && micro.runs >= 2;

  // count[t] = replicas with threshold t; at_most[t] = replicas with <= t.
  std::vector<std::uint64_t> count;
  std::vector<std::uint64_t> at_most;
  if (replicas) {
    count.assign(micro.steps + 1, 0);
    for (const std::uint32_t t : micro.thresholds) {
      if (t <= micro.steps) ++count[t];
    }
    at_most.resize(count.size());
    std::partial_sum(count.begin(), count.end(), at_most.begin());
  }

  for (const double p : p_grid) {
    const BinomialWeights bw = binomial_weights(micro.steps, p);
    const double q = apply_weights(bw, micro.q);
    double se = std::numeric_limits<double>::quiet_NaN();
    if (replicas) {
      // Replica r contributes P(Binomial(M, p) >= t_r); below the weight
      // window that probability is 1, above it 0.
      const auto R = static_cast<double>(micro.runs);
      const std::uint64_t last = bw.first + bw.w.size() - 1;
      double mean = static_cast<double>(at_most[bw.first]);
      double second = mean;
      double tail = 0.0;
      for (std::uint64_t t = last; t > bw.first; --t) {
        tail += bw.w[t - bw.first];
        const auto c = static_cast<double>(count[t]);
        mean += c * tail;
        second += c * tail * tail;
      }
      mean /= R;
      second /= R;
      se = std::sqrt(std::max(0.0, second - mean * mean) / (R - 1.0));
    }
    out.p.push_back(p);
    out.q.push_back(q);
    out.stderr_.push_back(se);
    out.max_truncated_mass = std::max(out.max_truncated_mass, bw.truncated_mass);
  }
  return out;
}

std::vector<double> isotonic_fit(std::span<const double> y) {
  // Blocks of pooled values: (sum, count).
  std::vector<double> sum;
  std::vector<std::size_t> count;
  for (const double v : y) {
    sum.push_back(v);
    count.push_back(1);
    while (sum.size() > 1) {
      const std::size_t b = sum.size() - 1;
      if (sum[b - 1] / static_cast<double>(count[b - 1]) <=
          sum[b] / static_cast<double>(count[b])) {
        break;
      }
      sum[b - 1] += sum[b];
      count[b - 1] += count[b];
      sum.pop_back();
      count.pop_back();
    }
  }
  std::vector<double> out;
  out.reserve(y.size());
  for (std::size_t b = 0; b < sum.size(); ++b) {
    out.insert(out.end(), count[b], sum[b] / static_cast<double>(count[b]));
  }
  return out;
}

Crossing locate_crossing(std::span<const double> p_grid,
                         std::span<const double> diff) {
  if (p_grid.size() != diff.size()) {
    throw std::invalid_argument("grid and values differ in length");
  }
  if (p_grid.size() < 2) return {};
  const auto lo_it = std::min_element(diff.begin(), diff.end());
  const auto hi_it = std::max_element(diff.begin(), diff.end());
  const auto lo = static_cast<std::size_t>(lo_it - diff.begin());
  const auto hi = static_cast<std::size_t>(hi_it - diff.begin());
  if (!(*lo_it < -kDiffEpsilon && *hi_it > kDiffEpsilon && lo < hi)) return {};

  const std::vector<double> fit = isotonic_fit(diff.subspan(lo, hi - lo + 1));
  const std::span<const double> px = p_grid.subspan(lo, hi - lo + 1);
  auto value = [&](double x) {
    const auto it = std::upper_bound(px.begin(), px.end(), x);
    if (it == px.begin()) return fit.front();
    if (it == px.end()) return fit.back();
    const auto j = static_cast<std::size_t>(it - px.begin());
    const double t = (x - px[j - 1]) / (px[j] - px[j - 1]);
    return fit[j - 1] + t * (fit[j] - fit[j - 1]);
  };
  double a = px.front();
  double b = px.back();
  for (int iter = 0; iter < 200 && b - a > 1e-13; ++iter) {
    const double mid = 0.5 * (a + b);
    if (value(mid) < 0.0) {
      a = mid;
    } else {
      b = mid;
    }
  }
  return {true, 0.5 * (a + b)};
}

Interval percentile_interval(std::vector<double> values, double level) {
  if (values.empty()) return {};
  std::sort(values.begin(), values.end());
  auto quantile = [&](double prob) {
    const double h = (static_cast<double>(values.size()) - 1.0) * prob;
    const auto i = static_cast<std::size_t>(std::floor(h));
    if (i + 1 >= values.size()) return values.back();
    return values[i] + (h - static_cast<double>(i)) * (values[i + 1] - values[i]);
  };
  const double alpha = (1.0 - level) / 2.0;
  return {quantile(alpha), quantile(1.0 - alpha)};
}

ThresholdEstimate estimate_pc(const PercolationLattice& small,
                              const PercolationLattice& large,
                              const PcOptions& options) {
  if (options.event == Event::reach) {
    throw std::invalid_argument("threshold crossing needs a wrap or "
                                "face-to-face event");
  }
  const bool identical = small.view().family() == large.view().family() &&
                         small.view().spec() == large.view().spec() &&
                         small.view().window() == large.view().window();
  if (!identical && large.linear_size() < 2 * small.linear_size()) {
    throw std::invalid_argument(fmt::format(
        "sizes {} and {} are less than a factor 2 apart", small.linear_size(),
        large.linear_size()));
  }
  check_grid(options.p_grid);
  auto sweep = [&](const PercolationLattice& lattice) {
    SweepOptions sweep_options;
    sweep_options.event = options.event;
    sweep_options.runs = options.runs;
    sweep_options.mode = options.mode;
    sweep_options.seed = derive_seed(options.seed, lattice.size());
    return std::move(newman_ziff(lattice, sweep_options).front());
  };
  MicrocanonicalCurve small_curve = sweep(small);
  MicrocanonicalCurve large_curve = sweep(large);
  ThresholdEstimate out = crossing_estimate(std::move(small_curve),
                                            std::move(large_curve), options);
  if (identical && !out.crossed) out.note = "no-crossing: identical lattices";
  return out;
}

ThresholdEstimate crossing_estimate(MicrocanonicalCurve small,
                                    MicrocanonicalCurve large,
                                    const PcOptions& options) {
  check_grid(options.p_grid);
  ThresholdEstimate out;
  const std::span<const double> grid = options.p_grid;
  {
    const CanonicalCurve qs = convolve(small, grid);
    const CanonicalCurve ql = convolve(large, grid);
    std::vector<double> diff(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) diff[g] = ql.q[g] - qs.q[g];
    const Crossing c = locate_crossing(grid, diff);
    out.crossed = c.found;
    out.p_c = c.p;
  }
  out.small = std::move(small);
  out.large = std::move(large);
  if (!out.crossed) {
    out.note = "no-crossing";
    return out;
  }
  if (out.small.thresholds.empty() || out.large.thresholds.empty() ||
      options.resamples == 0) {
    out.note = "no replica data for an interval";
    return out;
  }

  std::vector<double> sub;
  for (const double p : grid) {
    if (std::abs(p - out.p_c) <= options.bootstrap_halfwidth) sub.push_back(p);
  }
  std::vector<BinomialWeights> ws;
  std::vector<BinomialWeights> wl;
  for (const double p : sub) {
    ws.push_back(binomial_weights(out.small.steps, p));
    wl.push_back(binomial_weights(out.large.steps, p));
  }

  const std::uint64_t boot_seed = derive_seed(options.seed, 0xB0075712A9ULL);
  std::vector<double> samples(options.resamples);
  const auto count = static_cast<std::int64_t>(options.resamples);
#pragma omp parallel
  {
    std::vector<std::uint32_t> hist;
    std::vector<double> qs;
    std::vector<double> ql;
    std::vector<double> diff(sub.size());
#pragma omp for schedule(static)
    for (std::int64_t b = 0; b < count; ++b) {
      const auto idx = static_cast<std::uint64_t>(b);
      CounterRng rs(boot_seed, stream_id(StreamDomain::bootstrap, 2 * idx));
      CounterRng rl(boot_seed, stream_id(StreamDomain::bootstrap, 2 * idx + 1));
      resample_hist(out.small.thresholds, out.small.steps, rs, hist);
      cumulate(hist, out.small.runs, qs);
      resample_hist(out.large.thresholds, out.large.steps, rl, hist);
      cumulate(hist, out.large.runs, ql);
      for (std::size_t g = 0; g < sub.size(); ++g) {
        diff[g] = apply_weights(wl[g], ql) - apply_weights(ws[g], qs);
      }
      samples[idx] = locate_crossing(sub, diff).p;
    }
  }
  std::vector<double> found;
  for (const double s : samples) {
    if (!std::isnan(s)) found.push_back(s);
  }
  out.resamples = options.resamples;
  out.failed_resamples = options.resamples - found.size();
  out.ci = percentile_interval(std::move(found), options.level);
  return out;
}

ThetaEstimate estimate_theta(const PercolationLattice& lattice,
                             std::span<const double> p_grid,
                             std::vector<std::uint32_t> radii,
                             std::uint64_t runs, std::uint64_t seed,
                             Mode mode) {
  check_grid(p_grid);
  SweepOptions options;
  options.event = Event::reach;
  options.radii = radii;
  options.runs = runs;
  options.seed = seed;
  options.mode = mode;
  ThetaEstimate out;
  out.radii = std::move(radii);
  out.micro = newman_ziff(lattice, options);
  for (const MicrocanonicalCurve& m : out.micro) {
    out.curves.push_back(convolve(m, p_grid));
  }
  return out;
}

Band bootstrap_band(const MicrocanonicalCurve& micro,
                    std::span<const double> p_grid, std::uint64_t resamples,
                    std::uint64_t seed, double level) {
  check_grid(p_grid);
  const std::size_t G = p_grid.size();
  Band band;
  band.lo.assign(G, std::numeric_limits<double>::quiet_NaN());
  band.hi.assign(G, std::numeric_limits<double>::quiet_NaN());
  if (micro.thresholds.empty() || resamples == 0) return band;
  std::vector<BinomialWeights> weights;
  for (const double p : p_grid) weights.push_back(binomial_weights(micro.steps, p));

  const std::uint64_t boot_seed = derive_seed(seed, 0xBA7D5EEDULL);
  std::vector<double> table(resamples * G);
  const auto count = static_cast<std::int64_t>(resamples);
#pragma omp parallel
  {
    std::vector<std::uint32_t> hist;
    std::vector<double> q;
#pragma omp for schedule(static)
    for (std::int64_t b = 0; b < count; ++b) {
      const auto idx = static_cast<std::uint64_t>(b);
      CounterRng rng(boot_seed, stream_id(StreamDomain::bootstrap, idx));
      resample_hist(micro.thresholds, micro.steps, rng, hist);
      cumulate(hist, micro.runs, q);
      for (std::size_t g = 0; g < G; ++g) {
        table[idx * G + g] = apply_weights(weights[g], q);
      }
    }
  }
  std::vector<double> column(resamples);
  for (std::size_t g = 0; g < G; ++g) {
    for (std::uint64_t b = 0; b < resamples; ++b) column[b] = table[b * G + g];
    const Interval iv = percentile_interval(column, level);
    band.lo[g] = iv.lo;
    band.hi[g] = iv.hi;
  }
  return band;
}

void write_curve_csv(std::ostream& out, const CanonicalCurve& curve,
                     const CurveMeta& meta) {
  out << kCurveCsvHeader << '\n';
  for (std::size_t i = 0; i < curve.p.size(); ++i) {
    out << fmt::format("{:.12g},{:.12g},{:.12g},{},{},{},{},{},{},{},{}\n",
                       curve.p[i], curve.q[i], curve.stderr_[i], curve.steps,
                       curve.runs, meta.seed, meta.family, meta.d, meta.k,
                       meta.event, meta.size);
  }
}

std::vector<double> make_grid(double start, double stop, double step) {
  if (!(step > 0.0) || !(start >= 0.0) || !(stop <= 1.0) || stop < start) {
    throw std::invalid_argument(fmt::format(
        "invalid p grid {}:{}:{} (need 0 <= start <= stop <= 1, step > 0)",
        start, stop, step));
  }
  const auto count =
      static_cast<std::size_t>(std::floor((stop - start) / step + 0.5)) + 1;
  std::vector<double> grid;
  grid.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    double p = start + static_cast<double>(i) * step;
    if (std::abs(p - stop) < 1e-9 * std::max(1.0, step)) p = stop;
    grid.push_back(std::clamp(p, 0.0, 1.0));
  }
  return grid;
}

}  // namespace lrperc
