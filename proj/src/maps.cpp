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

#include "lrperc/maps.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>

#include <fmt/format.h>

#include "lrperc/rng.hpp"

namespace lrperc {
namespace {

constexpr std::uint64_t kNoFailure = std::numeric_limits<std::uint64_t>::max();

// Smallest i in [0, count) with check(i) == false. Deterministic for any
// thread count.
std::uint64_t first_failure(std::uint64_t count,
                            const std::function<bool(std::uint64_t)>& check) {
  std::uint64_t first = kNoFailure;
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(static) reduction(min : first)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::uint64_t>(i);
    if (idx < first && !check(idx)) first = idx;
  }
  return first;
}

std::span<const Coord> block_of(const Vertex& v, int axis, int block) {
  return {v.data() + static_cast<std::ptrdiff_t>(axis) * block,
          static_cast<std::size_t>(block)};
}

// Point i of a region: the i-th vertex when the region is enumerated, a
// stateless uniform draw otherwise.
struct RegionSampler {
  const Window& window;
  std::uint64_t count;
  bool exhaustive;
  std::uint64_t seed;
  std::uint64_t stream;

  RegionSampler(const Window& w, std::uint64_t samples, std::uint64_t s,
                std::uint64_t tag)
      : window(w),
        count(std::min<std::uint64_t>(w.volume(), samples)),
        exhaustive(w.volume() <= samples),
        seed(s),
        stream(stream_id(StreamDomain::verification, tag)) {}

  Vertex operator()(std::uint64_t i) const {
    if (exhaustive) return window.vertex_at(i);
    const std::uint64_t bits = philox_word(seed, stream, i);
    const auto pick = static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(bits) * window.volume()) >> 64);
    return window.vertex_at(pick);
  }
};

}  // namespace

Digits to_slab_digits(Coord v, const LatticeSpec& spec) {
  const int n = spec.scales();
  Digits z(static_cast<std::size_t>(n + 1));
  z[0] = floor_div(v, spec.period());
  for (int m = 1; m <= n; ++m) {
    z[m] = floor_mod(v, spec.length(n + 1 - m)) / spec.length(n - m);
  }
  return z;
}

Coord from_slab_digits(std::span<const Coord> z, const LatticeSpec& spec) {
  const int n = spec.scales();
  if (z.size() != static_cast<std::size_t>(n + 1)) {
    throw std::invalid_argument(
        fmt::format("digit sequence has {} entries, expected {}", z.size(),
                    n + 1));
  }
  Coord v = z[0] * spec.period();
  for (int m = 1; m <= n; ++m) {
    if (z[m] < 0 || z[m] >= spec.radix(m)) {
      throw std::invalid_argument(fmt::format(
          "digit {} = {} outside [0,{})", m, z[m], spec.radix(m)));
    }
    v += z[m] * spec.weight(m);
  }
  return v;
}

Vertex to_slab(const Vertex& v, const LatticeSpec& spec) {
  if (v.size() != static_cast<std::size_t>(spec.base_dim())) {
    throw std::invalid_argument(
        fmt::format("vertex {} is not in Z^{}", format_vertex(v),
                    spec.base_dim()));
  }
  Vertex z;
  z.reserve(static_cast<std::size_t>(spec.hyper_dim()));
  for (const Coord x : v) {
    const Digits digits = to_slab_digits(x, spec);
    z.insert(z.end(), digits.begin(), digits.end());
  }
  return z;
}

Vertex from_slab(const Vertex& z, const LatticeSpec& spec) {
  if (z.size() != static_cast<std::size_t>(spec.hyper_dim())) {
    throw std::invalid_argument(
        fmt::format("vertex {} is not a slab vertex", format_vertex(z)));
  }
  Vertex v(static_cast<std::size_t>(spec.base_dim()));
  for (int a = 0; a < spec.base_dim(); ++a) {
    v[a] = from_slab_digits(block_of(z, a, spec.block_size()), spec);
  }
  return v;
}

Digits normalize_digits(std::span<const Coord> y, const LatticeSpec& spec) {
  const int n = spec.scales();
  if (y.size() != static_cast<std::size_t>(n + 1)) {
    throw std::invalid_argument(
        fmt::format("sequence has {} entries, expected {}", y.size(), n + 1));
  }
  Digits z(y.begin(), y.end());
  Coord carry = 0;
  for (int m = n; m >= 1; --m) {
    const Coord sum = y[m] + carry;
    z[m] = floor_mod(sum, spec.radix(m));
    carry = floor_div(sum, spec.radix(m));
  }
  z[0] = y[0] + carry;
  return z;
}

Vertex quotient_map(const Vertex& y, const LatticeSpec& spec) {
  if (y.size() != static_cast<std::size_t>(spec.hyper_dim())) {
    throw std::invalid_argument(fmt::format(
        "vertex {} is not in Z^{}", format_vertex(y), spec.hyper_dim()));
  }
  Vertex z;
  z.reserve(y.size());
  for (int a = 0; a < spec.base_dim(); ++a) {
    const Digits digits =
        normalize_digits(block_of(y, a, spec.block_size()), spec);
    z.insert(z.end(), digits.begin(), digits.end());
  }
  return z;
}

Digits shift_digits(int scale, std::span<const Coord> z,
                    const LatticeSpec& spec, int power) {
  const int n = spec.scales();
  if (scale < 1 || scale > n) {
    throw std::invalid_argument(
        fmt::format("scale {} outside [1,{}]", scale, n));
  }
  if (z.size() != static_cast<std::size_t>(n + 1)) {
    throw std::invalid_argument(
        fmt::format("sequence has {} entries, expected {}", z.size(), n + 1));
  }
  Digits out(z.begin(), z.end());
  out[n - scale] -= power;
  out[n + 1 - scale] += Coord{power} * spec.k()[scale - 1];
  return out;
}

std::vector<GeneratorId> generators(const LatticeSpec& spec) {
  std::vector<GeneratorId> out;
  for (int axis = 1; axis <= spec.base_dim(); ++axis) {
    for (int scale = 1; scale <= spec.scales(); ++scale) {
      out.push_back({axis, scale});
    }
  }
  return out;
}

Vertex apply_generator(GeneratorId id, const Vertex& v,
                       const LatticeSpec& spec, int power) {
  if (id.axis < 1 || id.axis > spec.base_dim()) {
    throw std::invalid_argument(
        fmt::format("axis {} outside [1,{}]", id.axis, spec.base_dim()));
  }
  if (v.size() != static_cast<std::size_t>(spec.hyper_dim())) {
    throw std::invalid_argument(fmt::format(
        "vertex {} is not in Z^{}", format_vertex(v), spec.hyper_dim()));
  }
  const int block = spec.block_size();
  const Digits shifted =
      shift_digits(id.scale, block_of(v, id.axis - 1, block), spec, power);
  Vertex out = v;
  std::copy(shifted.begin(), shifted.end(),
            out.begin() + static_cast<std::ptrdiff_t>(id.axis - 1) * block);
  return out;
}

Window slab_window_for(const Window& base, const LatticeSpec& spec) {
  if (base.dims() != static_cast<std::size_t>(spec.base_dim())) {
    throw std::invalid_argument("window arity does not match the lattice");
  }
  const Coord period = spec.period();
  std::vector<AxisRange> axes;
  for (const AxisRange& r : base.axes()) {
    if (floor_mod(r.lo, period) != 0 || floor_mod(r.hi, period) != 0) {
      throw std::invalid_argument(fmt::format(
          "window range [{},{}) is not aligned to {}", r.lo, r.hi, period));
    }
    axes.push_back({r.lo / period, r.hi / period, r.boundary});
    for (int m = 1; m < spec.block_size(); ++m) {
      axes.push_back({0, spec.radix(m), Boundary::free});
    }
  }
  return Window(std::move(axes));
}

bool VerificationReport::passed() const {
  return std::all_of(claims.begin(), claims.end(),
                     [](const ClaimResult& c) { return c.passed; });
}

void VerificationReport::append(const VerificationReport& other) {
  claims.insert(claims.end(), other.claims.begin(), other.claims.end());
}

std::string VerificationReport::to_text() const {
  std::string out;
  for (const ClaimResult& c : claims) {
    out += fmt::format("{} {} checked={}", c.passed ? "PASS" : "FAIL",
                       c.claim, c.checked);
    if (!c.passed) out += " witness: " + c.witness;
    out += '\n';
  }
  return out;
}

VerificationReport check_edge_transport(
    const std::string& name, const AdjacencyTable& from,
    const Window& from_window, const AdjacencyTable& to,
    const Window& to_window, std::span<const std::uint64_t> vertex_map) {
  VerificationReport report;
  const std::uint64_t count = from.size();

  // Bijectivity: sizes agree, every image is in range and hit exactly once.
  {
    ClaimResult claim{name + " bijective", true, count, {}};
    std::vector<std::uint32_t> hits(to.size(), 0);
    std::uint64_t bad = kNoFailure;
    if (vertex_map.size() != count) {
      claim.passed = false;
      claim.witness = fmt::format("map has {} entries for {} vertices",
                                  vertex_map.size(), count);
    } else {
      for (std::uint64_t i = 0; i < count; ++i) {
        const std::uint64_t image = vertex_map[i];
        if (image >= to.size() || ++hits[image] > 1) {
          bad = i;
          break;
        }
      }
      if (bad != kNoFailure) {
        claim.passed = false;
        claim.witness = fmt::format(
            "{} has an image outside the target or shared with another vertex",
            format_vertex(from_window.vertex_at(bad)));
      } else if (from.size() != to.size()) {
        claim.passed = false;
        claim.witness = fmt::format("{} source vertices, {} target vertices",
                                    from.size(), to.size());
      }
    }
    report.claims.push_back(std::move(claim));
    if (!report.claims.back().passed) {
      report.claims.push_back({name + " edges forward", false, 0,
                               "skipped: vertex map is not a bijection"});
      report.claims.push_back({name + " edges backward", false, 0,
                               "skipped: vertex map is not a bijection"});
      return report;
    }
  }

  auto adjacent = [&](std::uint64_t a, std::uint64_t b) {
    const auto nb = to.neighbors(static_cast<std::uint32_t>(a));
    return std::find(nb.begin(), nb.end(), b) != nb.end();
  };

  {
    const std::uint64_t first = first_failure(count, [&](std::uint64_t u) {
      for (const std::uint32_t t : from.neighbors(static_cast<std::uint32_t>(u))) {
        if (!adjacent(vertex_map[u], vertex_map[t])) return false;
      }
      return true;
    });
    ClaimResult claim{name + " edges forward", first == kNoFailure,
                      from.arc_count(), {}};
    if (!claim.passed) {
      for (const std::uint32_t t :
           from.neighbors(static_cast<std::uint32_t>(first))) {
        if (adjacent(vertex_map[first], vertex_map[t])) continue;
        claim.witness = fmt::format(
            "{} ~ {} but images {} and {} are not adjacent",
            format_vertex(from_window.vertex_at(first)),
            format_vertex(from_window.vertex_at(t)),
            format_vertex(to_window.vertex_at(vertex_map[first])),
            format_vertex(to_window.vertex_at(vertex_map[t])));
        break;
      }
    }
    report.claims.push_back(std::move(claim));
  }

  {
    auto missing_preimage = [&](std::uint64_t u) -> std::optional<std::uint32_t> {
      const auto source = from.neighbors(static_cast<std::uint32_t>(u));
      for (const std::uint32_t w :
           to.neighbors(static_cast<std::uint32_t>(vertex_map[u]))) {
        const bool covered =
            std::any_of(source.begin(), source.end(),
                        [&](std::uint32_t t) { return vertex_map[t] == w; });
        if (!covered) return w;
      }
      return std::nullopt;
    };
    const std::uint64_t first = first_failure(
        count, [&](std::uint64_t u) { return !missing_preimage(u); });
    ClaimResult claim{name + " edges backward", first == kNoFailure,
                      to.arc_count(), {}};
    if (!claim.passed) {
      const std::uint32_t w = *missing_preimage(first);
      claim.witness = fmt::format(
          "{} ~ {} has no preimage edge at {}",
          format_vertex(to_window.vertex_at(vertex_map[first])),
          format_vertex(to_window.vertex_at(w)),
          format_vertex(from_window.vertex_at(first)));
    }
    report.claims.push_back(std::move(claim));
  }
  return report;
}

VerificationReport check_isomorphism(const Window& base,
                                     const LatticeSpec& spec) {
  if (base.dims() != static_cast<std::size_t>(spec.base_dim())) {
    throw std::invalid_argument("window arity does not match the lattice");
  }
  for (const AxisRange& r : base.axes()) {
    if (r.extent() < 3 * spec.period()) {
      throw std::invalid_argument(fmt::format(
          "window extent {} spans fewer than three periods of {}", r.extent(),
          spec.period()));
    }
  }
  const Window slab = slab_window_for(base, spec);

  std::vector<std::uint64_t> vertex_map(base.volume());
  for (std::uint64_t i = 0; i < base.volume(); ++i) {
    const Vertex image = to_slab(base.vertex_at(i), spec);
    vertex_map[i] = slab.contains(image) ? slab.index_of(image) : kNoFailure;
  }

  VerificationReport report;
  const std::pair<Family, Family> pairs[] = {
      {Family::pruned, Family::slab},
      {Family::decorated, Family::decorated_slab}};
  for (const auto& [source, target] : pairs) {
    const AdjacencyTable from =
        AdjacencyTable::build(GraphView(source, spec, base));
    const AdjacencyTable to =
        AdjacencyTable::build(GraphView(target, spec, slab));
    report.append(check_edge_transport(
        fmt::format("digit map {} -> {}", family_name(source),
                    family_name(target)),
        from, base, to, slab, vertex_map));
  }
  return report;
}

VerificationReport check_quotient(const Window& hyper, const LatticeSpec& spec,
                                  std::uint64_t samples, std::uint64_t seed) {
  if (hyper.dims() != static_cast<std::size_t>(spec.hyper_dim())) {
    throw std::invalid_argument(fmt::format(
        "sampling window has {} axes, expected {}", hyper.dims(),
        spec.hyper_dim()));
  }
  if (samples == 0) throw std::invalid_argument("sample count is zero");
  VerificationReport report;
  const int block = spec.block_size();
  const std::vector<GeneratorId> gens = generators(spec);

  const RegionSampler cover(hyper, samples, seed, 0);

  // (a) The quotient map is constant on orbits of every generator.
  {
    auto invariant = [&](std::uint64_t i, std::string* witness) {
      const Vertex y = cover(i);
      const Vertex image = quotient_map(y, spec);
      for (const GeneratorId g : gens) {
        for (const int power : {+1, -1}) {
          const Vertex moved = apply_generator(g, y, spec, power);
          const Vertex moved_image = quotient_map(moved, spec);
          if (moved_image == image) continue;
          if (witness != nullptr) {
            *witness = fmt::format(
                "generator ({},{})^{} moves {} to {}; images {} vs {}", g.axis,
                g.scale, power, format_vertex(y), format_vertex(moved),
                format_vertex(image), format_vertex(moved_image));
          }
          return false;
        }
      }
      return true;
    };
    const std::uint64_t first = first_failure(
        cover.count, [&](std::uint64_t i) { return invariant(i, nullptr); });
    ClaimResult claim{"quotient map invariant under generators",
                      first == kNoFailure, cover.count * gens.size() * 2, {}};
    if (!claim.passed) invariant(first, &claim.witness);
    report.claims.push_back(std::move(claim));
  }

  // (b) Hypercubic edges map onto decorated-slab edges, never onto a point.
  {
    auto edge_images = [&](std::uint64_t i, std::string* witness) {
      const Vertex y = cover(i);
      const Vertex image = quotient_map(y, spec);
      std::vector<Vertex> slab_nb;
      infinite_neighbors(Family::decorated_slab, spec, image, slab_nb);
      std::vector<Vertex> cube_nb;
      infinite_neighbors(Family::hypercubic, spec, y, cube_nb);
      for (const Vertex& u : cube_nb) {
        const Vertex u_image = quotient_map(u, spec);
        const bool ok = u_image != image &&
                        std::find(slab_nb.begin(), slab_nb.end(), u_image) !=
                            slab_nb.end();
        if (ok) continue;
        if (witness != nullptr) {
          *witness = fmt::format(
              "hypercubic edge {} ~ {} maps to {} and {}, not a "
              "decorated-slab edge",
              format_vertex(y), format_vertex(u), format_vertex(image),
              format_vertex(u_image));
        }
        return false;
      }
      return true;
    };
    const std::uint64_t first = first_failure(
        cover.count, [&](std::uint64_t i) { return edge_images(i, nullptr); });
    ClaimResult claim{"hypercubic edges map to decorated-slab edges",
                      first == kNoFailure,
                      cover.count * 2 * static_cast<std::uint64_t>(
                                            spec.hyper_dim()),
                      {}};
    if (!claim.passed) edge_images(first, &claim.witness);
    report.claims.push_back(std::move(claim));
  }

  // Decorated-slab window whose unbounded ranges follow the sampling region.
  std::vector<AxisRange> slab_axes;
  for (int a = 0; a < spec.base_dim(); ++a) {
    const AxisRange& r = hyper.axis(static_cast<std::size_t>(a * block));
    slab_axes.push_back({r.lo, r.hi, Boundary::free});
    for (int m = 1; m < block; ++m) {
      slab_axes.push_back({0, spec.radix(m), Boundary::free});
    }
  }
  const Window slab(std::move(slab_axes));
  const GraphView slab_view(Family::decorated_slab, spec, slab);
  const RegionSampler fundamental(slab, samples, seed, 1);

  // (c) Every decorated-slab window edge lifts to a hypercubic edge at the
  // range-valid representative.
  {
    auto lifts = [&](std::uint64_t i, std::string* witness) {
      const Vertex a = fundamental(i);
      std::vector<Vertex> cube_nb;
      infinite_neighbors(Family::hypercubic, spec, a, cube_nb);
      std::vector<Vertex> images;
      for (const Vertex& u : cube_nb) images.push_back(quotient_map(u, spec));
      for (const Vertex& b : slab_view.neighbors(a)) {
        if (std::find(images.begin(), images.end(), b) != images.end()) {
          continue;
        }
        if (witness != nullptr) {
          *witness = fmt::format(
              "decorated-slab edge {} ~ {} has no hypercubic preimage at {}",
              format_vertex(a), format_vertex(b), format_vertex(a));
        }
        return false;
      }
      return true;
    };
    const std::uint64_t first = first_failure(
        fundamental.count, [&](std::uint64_t i) { return lifts(i, nullptr); });
    ClaimResult claim{"decorated-slab edges have hypercubic preimages",
                      first == kNoFailure, fundamental.count, {}};
    if (!claim.passed) lifts(first, &claim.witness);
    report.claims.push_back(std::move(claim));
  }

  // (d) On the fundamental box the quotient map is the identity, hence a
  // bijection onto the slab window.
  {
    const std::uint64_t first =
        first_failure(fundamental.count, [&](std::uint64_t i) {
          const Vertex a = fundamental(i);
          return quotient_map(a, spec) == a;
        });
    ClaimResult claim{"quotient map is the identity on the fundamental box",
                      first == kNoFailure, fundamental.count, {}};
    if (!claim.passed) {
      const Vertex a = fundamental(first);
      claim.witness = fmt::format("{} maps to {}", format_vertex(a),
                                  format_vertex(quotient_map(a, spec)));
    }
    report.claims.push_back(std::move(claim));
  }
  return report;
}

VerificationReport check_lattice_invariants(const Window& base,
                                            const LatticeSpec& spec) {
  if (base.dims() != static_cast<std::size_t>(spec.base_dim())) {
    throw std::invalid_argument("window arity does not match the lattice");
  }
  for (const AxisRange& r : base.axes()) {
    if (r.extent() < 3 * spec.period()) {
      throw std::invalid_argument(fmt::format(
          "window extent {} spans fewer than three periods of {}", r.extent(),
          spec.period()));
    }
  }
  VerificationReport report;
  const Window slab = slab_window_for(base, spec);

  std::vector<AdjacencyTable> tables;
  for (const Family family : {Family::decorated, Family::pruned, Family::slab,
                              Family::decorated_slab}) {
    const Window& w = is_slab_family(family) ? slab : base;
    const GraphView view(family, spec, w);
    AdjacencyTable adj = AdjacencyTable::build(view);
    auto symmetric = [&](std::uint64_t u) {
      for (const std::uint32_t v : adj.neighbors(static_cast<std::uint32_t>(u))) {
        const auto back = adj.neighbors(v);
        if (std::find(back.begin(), back.end(), u) == back.end()) return false;
      }
      return true;
    };
    const std::uint64_t first = first_failure(adj.size(), symmetric);
    ClaimResult claim{fmt::format("{} adjacency symmetric", family_name(family)),
                      first == kNoFailure, adj.size(), {}};
    if (!claim.passed) {
      const auto u = static_cast<std::uint32_t>(first);
      for (const std::uint32_t v : adj.neighbors(u)) {
        const auto back = adj.neighbors(v);
        if (std::find(back.begin(), back.end(), u) != back.end()) continue;
        claim.witness = fmt::format("{} -> {} has no reverse arc",
                                    format_vertex(w.vertex_at(u)),
                                    format_vertex(w.vertex_at(v)));
        break;
      }
    }
    report.claims.push_back(std::move(claim));
    tables.push_back(std::move(adj));
  }

  const AdjacencyTable& g = tables[0];
  const AdjacencyTable& f = tables[1];
  {
    auto contained = [&](std::uint64_t u) {
      const auto gn = g.neighbors(static_cast<std::uint32_t>(u));
      for (const std::uint32_t v : f.neighbors(static_cast<std::uint32_t>(u))) {
        if (std::find(gn.begin(), gn.end(), v) == gn.end()) return false;
      }
      return true;
    };
    const std::uint64_t first = first_failure(f.size(), contained);
    ClaimResult claim{"pruned edges are decorated edges", first == kNoFailure,
                      f.size(), {}};
    if (!claim.passed) {
      claim.witness = fmt::format("pruned neighbourhood of {} leaves the "
                                  "decorated lattice",
                                  format_vertex(base.vertex_at(first)));
    }
    report.claims.push_back(std::move(claim));
  }

  bool periodic = true;
  for (const AxisRange& r : base.axes()) periodic &= r.periodic();
  if (!periodic) return report;

  {
    const std::size_t expected =
        2 * static_cast<std::size_t>(spec.base_dim() * (spec.scales() + 1));
    const std::uint64_t first = first_failure(g.size(), [&](std::uint64_t u) {
      return g.neighbors(static_cast<std::uint32_t>(u)).size() == expected;
    });
    ClaimResult claim{fmt::format("decorated degree is {}", expected),
                      first == kNoFailure, g.size(), {}};
    if (!claim.passed) {
      claim.witness = fmt::format(
          "{} has degree {}", format_vertex(base.vertex_at(first)),
          g.neighbors(static_cast<std::uint32_t>(first)).size());
    }
    report.claims.push_back(std::move(claim));
  }

  // Bonds {v, v + L_{i-1} e_a} for every window vertex v; each is counted
  // once because the window is a full period of the torus.
  for (int a = 0; a < spec.base_dim(); ++a) {
    for (int i = 1; i <= spec.scales(); ++i) {
      std::uint64_t deleted = 0;
      for (std::uint64_t idx = 0; idx < base.volume(); ++idx) {
        const Vertex v = base.vertex_at(idx);
        Vertex u = v;
        u[static_cast<std::size_t>(a)] += spec.length(i - 1);
        const auto scale = deleted_bond_scale(v, u, spec);
        if (scale && *scale == i) ++deleted;
      }
      const std::uint64_t expected = base.volume() /
                                     static_cast<std::uint64_t>(spec.length(i)) *
                                     static_cast<std::uint64_t>(spec.length(i - 1));
      ClaimResult claim{
          fmt::format("axis {} scale {} deletes {} of every {} bonds", a + 1, i,
                      spec.length(i - 1), spec.length(i)),
          deleted == expected, base.volume(), {}};
      if (!claim.passed) {
        claim.witness = fmt::format("{} deleted, expected {}", deleted, expected);
      }
      report.claims.push_back(std::move(claim));
    }
  }
  return report;
}

}  // namespace lrperc
