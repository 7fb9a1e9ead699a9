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

// Geometry of the long-range lattice family and neighbour enumeration over
// finite windows of the infinite graphs.
//
// Five families share one LatticeSpec (base dimension d, scale factors
// k_1..k_n, jump lengths L_i = k_1 * ... * k_i):
//
//   decorated       Z^d with axis bonds of length 1, L_1, ..., L_n.
//   pruned          decorated minus the "carry" bonds (see
//                   deleted_bond_scale); isomorphic to the slab.
//   slab            nearest-neighbour graph on (Z x {0..k_n-1} x ... x
//                   {0..k_1-1})^d.
//   decorated_slab  slab plus the images of the deleted bonds; isomorphic to
//                   the decorated lattice.
//   hypercubic      nearest-neighbour Z^{d(n+1)}.
//
// Slab and hypercubic vertices are stored as d consecutive blocks of n+1
// coordinates. Inside a slab block, position 0 is unbounded and position m
// (1 <= m <= n) ranges over {0, ..., k_{n+1-m} - 1}, so the last position is
// the finest digit.

#ifndef LRPERC_LATTICE_HPP_
#define LRPERC_LATTICE_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/container/small_vector.hpp>

namespace lrperc {

using Coord = std::int64_t;
using Vertex = boost::container::small_vector<Coord, 8>;

// Floored quotient and Euclidean remainder; `b` must be positive.
constexpr Coord floor_div(Coord a, Coord b) {
  const Coord q = a / b;
  return (a % b != 0 && a < 0) ? q - 1 : q;
}
constexpr Coord floor_mod(Coord a, Coord b) {
  const Coord r = a % b;
  return r < 0 ? r + b : r;
}

// "(x,y,...)" rendering used in messages and witnesses.
std::string format_vertex(const Vertex& v);

// (L_1, ..., L_n) with L_i = k_1 * ... * k_i. Throws std::invalid_argument if
// any factor is below 2 or the product overflows the supported range.
std::vector<Coord> jump_lengths(std::span<const int> k);

class LatticeSpec {
 public:
  LatticeSpec(int d, std::vector<int> k);

  int base_dim() const { return d_; }
  int scales() const { return static_cast<int>(k_.size()); }
  int block_size() const { return scales() + 1; }
  int hyper_dim() const { return d_ * block_size(); }
  const std::vector<int>& k() const { return k_; }

  // L_i for 0 <= i <= n, with L_0 = 1.
  Coord length(int i) const { return lengths_.at(static_cast<std::size_t>(i)); }
  Coord period() const { return lengths_.back(); }
  // Bond lengths of the decorated lattice: 1, L_1, ..., L_n.
  std::span<const Coord> bond_lengths() const { return lengths_; }

  // Range of slab block position m in [1, n]: {0, ..., radix(m) - 1}.
  int radix(int position) const {
    return k_.at(static_cast<std::size_t>(scales() - position));
  }
  // Weight of slab block position m in the mixed-radix value: L_{n-m}.
  Coord weight(int position) const { return length(scales() - position); }

  // "2;3" style rendering; empty when n = 0.
  std::string k_string(char sep = ';') const;

  friend bool operator==(const LatticeSpec&, const LatticeSpec&) = default;

 private:
  int d_;
  std::vector<int> k_;
  std::vector<Coord> lengths_;
};

enum class Boundary { free, periodic };

struct AxisRange {
  Coord lo = 0;
  Coord hi = 1;
  Boundary boundary = Boundary::free;

  Coord extent() const { return hi - lo; }
  bool periodic() const { return boundary == Boundary::periodic; }
};

// Half-open lexicographic box. The first coordinate is the most significant
// one in the dense index.
class Window {
 public:
  explicit Window(std::vector<AxisRange> axes);

  static Window cube(int dims, Coord lo, Coord hi, Boundary boundary);

  std::size_t dims() const { return axes_.size(); }
  const AxisRange& axis(std::size_t i) const { return axes_[i]; }
  std::span<const AxisRange> axes() const { return axes_; }
  std::uint64_t volume() const { return volume_; }

  bool contains(const Vertex& v) const;

  // Brings an unwrapped vertex into the window. Periodic axes wrap; returns
  // false if a free axis is left.
  bool wrap(Vertex& v) const;

  // Dense lexicographic index. Throws std::out_of_range outside the window.
  std::uint64_t index_of(const Vertex& v) const;
  Vertex vertex_at(std::uint64_t index) const;

  friend bool operator==(const Window& a, const Window& b) {
    return a.volume_ == b.volume_ && a.axes_.size() == b.axes_.size() &&
           std::equal(a.axes_.begin(), a.axes_.end(), b.axes_.begin(),
                      [](const AxisRange& x, const AxisRange& y) {
                        return x.lo == y.lo && x.hi == y.hi &&
                               x.boundary == y.boundary;
                      });
  }

 private:
  std::vector<AxisRange> axes_;
  std::vector<std::uint64_t> strides_;
  std::uint64_t volume_ = 1;
};

// Slab window whose unbounded coordinates span [lo, hi) on every base axis;
// bounded coordinates cover their full range with free boundary.
Window slab_window(const LatticeSpec& spec, Coord lo, Coord hi,
                   Boundary boundary);

enum class Family { decorated, pruned, slab, decorated_slab, hypercubic };

// Command-line names: g, f, slab, slab-tilde, zd.
std::string_view family_name(Family family);
std::optional<Family> parse_family(std::string_view name);

bool is_slab_family(Family family);
// Number of coordinates of a vertex: d for the Z^d families, d(n+1) else.
int vertex_dims(Family family, const LatticeSpec& spec);

// Scale i in [1, n] if the axis bond {u, v} of the decorated lattice lies in
// the deleted set R_i, std::nullopt otherwise. Bonds of length L_n are never
// deleted. Throws std::invalid_argument if {u, v} is not a decorated-lattice
// bond (not axis-aligned, or a length outside {1, L_1, ..., L_n}).
std::optional<int> deleted_bond_scale(const Vertex& u, const Vertex& v,
                                      const LatticeSpec& spec);

// Neighbours of `v` in the infinite graph, unwrapped. Entries are distinct
// and never equal to `v`. Throws std::invalid_argument if `v` has the wrong
// arity or, for slab families, a bounded coordinate out of range.
void infinite_neighbors(Family family, const LatticeSpec& spec,
                        const Vertex& v, std::vector<Vertex>& out);

// Immutable view of one family over a finite window.
class GraphView {
 public:
  // Throws std::invalid_argument if the window does not fit the family:
  // wrong arity, origin outside, periodic decorated/pruned extent not a
  // multiple of L_n, or slab bounded coordinates not spanning [0, radix)
  // with free boundary.
  GraphView(Family family, LatticeSpec spec, Window window);

  Family family() const { return family_; }
  const LatticeSpec& spec() const { return spec_; }
  const Window& window() const { return window_; }
  std::uint64_t volume() const { return window_.volume(); }
  Vertex origin() const { return Vertex(window_.dims(), 0); }

  // Windowed neighbours: wrapped on periodic axes, dropped across free
  // boundaries, self-loops removed, coincident images deduplicated.
  // Throws std::out_of_range if `v` is outside the window.
  void neighbors(const Vertex& v, std::vector<Vertex>& out) const;
  std::vector<Vertex> neighbors(const Vertex& v) const;

  struct Step {
    Vertex to;
    // Displacement of coordinate 0 before wrapping.
    Coord shift;
  };
  void steps(const Vertex& v, std::vector<Step>& out,
             std::vector<Vertex>& scratch) const;

 private:
  Family family_;
  LatticeSpec spec_;
  Window window_;
};

enum class Execution { serial, parallel };

// Compressed adjacency of a GraphView over dense vertex indices.
class AdjacencyTable {
 public:
  AdjacencyTable() = default;
  AdjacencyTable(std::vector<std::uint32_t> offsets,
                 std::vector<std::uint32_t> targets,
                 std::vector<std::int32_t> shifts);

  static AdjacencyTable build(const GraphView& view,
                              Execution exec = Execution::parallel);

  std::uint32_t size() const {
    return offsets_.empty() ? 0
                            : static_cast<std::uint32_t>(offsets_.size() - 1);
  }
  std::span<const std::uint32_t> neighbors(std::uint32_t v) const {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }
  std::span<const std::int32_t> shifts(std::uint32_t v) const {
    return {shifts_.data() + offsets_[v], shifts_.data() + offsets_[v + 1]};
  }
  std::size_t arc_count() const { return targets_.size(); }
  std::uint32_t max_degree() const;

  const std::vector<std::uint32_t>& offsets() const { return offsets_; }
  const std::vector<std::uint32_t>& targets() const { return targets_; }
  const std::vector<std::int32_t>& raw_shifts() const { return shifts_; }

  friend bool operator==(const AdjacencyTable&,
                         const AdjacencyTable&) = default;

 private:
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> targets_;
  std::vector<std::int32_t> shifts_;
};

}  // namespace lrperc

#endif  // LRPERC_LATTICE_HPP_
