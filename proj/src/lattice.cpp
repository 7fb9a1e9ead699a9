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

#include "lrperc/lattice.hpp"

#include <limits>
#include <stdexcept>
#include <utility>

#include <fmt/format.h>

namespace lrperc {
namespace {

// Keeps every bond length and shift representable as int32.
constexpr Coord kMaxPeriod = Coord{1} << 30;

// Membership of the bond {upper - L_{scale-1}, upper} in R_scale, evaluated
// through the block decomposition upper = l * L_scale + j.
bool in_deleted_set(Coord upper, Coord lower, int scale,
                    const LatticeSpec& spec) {
  const Coord block = spec.length(scale);
  const Coord inner = spec.length(scale - 1);
  const Coord l = floor_div(upper, block);
  const Coord j = upper - l * block;
  if (j >= inner) return false;
  return lower == inner * (l * spec.k()[scale - 1] - 1) + j;
}

void check_arity(const Vertex& v, int dims) {
  if (v.size() != static_cast<std::size_t>(dims)) {
    throw std::invalid_argument(fmt::format(
        "vertex {} has {} coordinates, expected {}", format_vertex(v),
        v.size(), dims));
  }
}

void check_slab_digits(const Vertex& v, const LatticeSpec& spec) {
  const int block = spec.block_size();
  for (int a = 0; a < spec.base_dim(); ++a) {
    for (int m = 1; m < block; ++m) {
      const Coord z = v[a * block + m];
      if (z < 0 || z >= spec.radix(m)) {
        throw std::invalid_argument(
            fmt::format("slab vertex {} has coordinate {} outside [0,{})",
                        format_vertex(v), a * block + m, spec.radix(m)));
      }
    }
  }
}

// Carry (dir = +1) or borrow (dir = -1) partner of a slab vertex at block
// position `m`, or false if the digit is not at the matching end of its range.
bool carry_partner(const Vertex& v, const LatticeSpec& spec, int axis, int m,
                   int dir, Vertex& out) {
  const int block = spec.block_size();
  const int base = axis * block;
  const Coord top = spec.radix(m) - 1;
  if (v[base + m] != (dir > 0 ? top : 0)) return false;
  out = v;
  out[base + m] = dir > 0 ? 0 : top;
  for (int q = m - 1; q >= 1; --q) {
    const Coord qtop = spec.radix(q) - 1;
    Coord& z = out[base + q];
    if (dir > 0 && z == qtop) {
      z = 0;
    } else if (dir < 0 && z == 0) {
      z = qtop;
    } else {
      z += dir;
      return true;
    }
  }
  out[base] += dir;
  return true;
}

}  // namespace

std::string format_vertex(const Vertex& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(v[i]);
  }
  return out + ")";
}

std::vector<Coord> jump_lengths(std::span<const int> k) {
  std::vector<Coord> out;
  out.reserve(k.size());
  Coord product = 1;
  for (const int factor : k) {
    if (factor < 2) {
      throw std::invalid_argument(
          fmt::format("scale factor {} is below 2", factor));
    }
    if (product > kMaxPeriod / factor) {
      throw std::invalid_argument("jump length exceeds 2^30");
    }
    product *= factor;
    out.push_back(product);
  }
  return out;
}

LatticeSpec::LatticeSpec(int d, std::vector<int> k) : d_(d), k_(std::move(k)) {
  if (d_ < 1) {
    throw std::invalid_argument(fmt::format("dimension {} is not positive", d));
  }
  lengths_.push_back(1);
  for (const Coord l : jump_lengths(k_)) lengths_.push_back(l);
  if (static_cast<long long>(hyper_dim()) > 64) {
    throw std::invalid_argument("d(n+1) exceeds 64 coordinates");
  }
}

std::string LatticeSpec::k_string(char sep) const {
  std::string out;
  for (std::size_t i = 0; i < k_.size(); ++i) {
    if (i > 0) out += sep;
    out += std::to_string(k_[i]);
  }
  return out;
}

Window::Window(std::vector<AxisRange> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw std::invalid_argument("window has no axes");
  strides_.assign(axes_.size(), 1);
  for (std::size_t i = axes_.size(); i-- > 0;) {
    const AxisRange& r = axes_[i];
    if (r.hi <= r.lo) {
      throw std::invalid_argument(
          fmt::format("empty window range [{},{}) on axis {}", r.lo, r.hi, i));
    }
    strides_[i] = volume_;
    const auto extent = static_cast<std::uint64_t>(r.extent());
    if (volume_ > std::numeric_limits<std::uint64_t>::max() / extent) {
      throw std::invalid_argument("window volume overflows");
    }
    volume_ *= extent;
  }
}

Window Window::cube(int dims, Coord lo, Coord hi, Boundary boundary) {
  return Window(std::vector<AxisRange>(static_cast<std::size_t>(dims),
                                       AxisRange{lo, hi, boundary}));
}

bool Window::contains(const Vertex& v) const {
  if (v.size() != axes_.size()) return false;
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    if (v[i] < axes_[i].lo || v[i] >= axes_[i].hi) return false;
  }
  return true;
}

bool Window::wrap(Vertex& v) const {
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    const AxisRange& r = axes_[i];
    if (v[i] >= r.lo && v[i] < r.hi) continue;
    if (!r.periodic()) return false;
    v[i] = r.lo + floor_mod(v[i] - r.lo, r.extent());
  }
  return true;
}

std::uint64_t Window::index_of(const Vertex& v) const {
  if (!contains(v)) {
    throw std::out_of_range(
        fmt::format("vertex {} is outside the window", format_vertex(v)));
  }
  std::uint64_t index = 0;
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    index += static_cast<std::uint64_t>(v[i] - axes_[i].lo) * strides_[i];
  }
  return index;
}

Vertex Window::vertex_at(std::uint64_t index) const {
  if (index >= volume_) {
    throw std::out_of_range(
        fmt::format("index {} is outside a window of volume {}", index,
                    volume_));
  }
  Vertex v(axes_.size());
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    v[i] = axes_[i].lo + static_cast<Coord>(index / strides_[i]);
    index %= strides_[i];
  }
  return v;
}

Window slab_window(const LatticeSpec& spec, Coord lo, Coord hi,
                   Boundary boundary) {
  std::vector<AxisRange> axes;
  for (int a = 0; a < spec.base_dim(); ++a) {
    axes.push_back({lo, hi, boundary});
    for (int m = 1; m < spec.block_size(); ++m) {
      axes.push_back({0, spec.radix(m), Boundary::free});
    }
  }
  return Window(std::move(axes));
}

std::string_view family_name(Family family) {
  switch (family) {
    case Family::decorated:
      return "g";
    case Family::pruned:
      return "f";
    case Family::slab:
      return "slab";
    case Family::decorated_slab:
      return "slab-tilde";
    case Family::hypercubic:
      return "zd";
  }
  return "?";
}

std::optional<Family> parse_family(std::string_view name) {
  for (const Family f : {Family::decorated, Family::pruned, Family::slab,
                         Family::decorated_slab, Family::hypercubic}) {
    if (family_name(f) == name) return f;
  }
  return std::nullopt;
}

bool is_slab_family(Family family) {
  return family == Family::slab || family == Family::decorated_slab;
}

int vertex_dims(Family family, const LatticeSpec& spec) {
  return (family == Family::decorated || family == Family::pruned)
             ? spec.base_dim()
             : spec.hyper_dim();
}

std::optional<int> deleted_bond_scale(const Vertex& u, const Vertex& v,
                                      const LatticeSpec& spec) {
  check_arity(u, spec.base_dim());
  check_arity(v, spec.base_dim());
  int axis = -1;
  for (int i = 0; i < spec.base_dim(); ++i) {
    if (u[i] == v[i]) continue;
    if (axis >= 0) {
      throw std::invalid_argument(
          fmt::format("{} and {} are not axis-aligned", format_vertex(u),
                      format_vertex(v)));
    }
    axis = i;
  }
  if (axis < 0) {
    throw std::invalid_argument(
        fmt::format("{} is a self-pair", format_vertex(u)));
  }
  const Coord upper = std::max(u[axis], v[axis]);
  const Coord lower = std::min(u[axis], v[axis]);
  const Coord length = upper - lower;
  for (int i = 0; i <= spec.scales(); ++i) {
    if (spec.length(i) != length) continue;
    if (i == spec.scales()) return std::nullopt;
    const int scale = i + 1;
    if (in_deleted_set(upper, lower, scale, spec)) return scale;
    return std::nullopt;
  }
  throw std::invalid_argument(
      fmt::format("length {} is not a bond length of the lattice", length));
}

void infinite_neighbors(Family family, const LatticeSpec& spec,
                        const Vertex& v, std::vector<Vertex>& out) {
  out.clear();
  check_arity(v, vertex_dims(family, spec));
  const int n = spec.scales();
  switch (family) {
    case Family::decorated:
    case Family::pruned: {
      for (int a = 0; a < spec.base_dim(); ++a) {
        for (int i = 0; i <= n; ++i) {
          const Coord len = spec.length(i);
          for (const int dir : {+1, -1}) {
            const Coord partner = v[a] + dir * len;
            if (family == Family::pruned && i < n) {
              const Coord upper = std::max(v[a], partner);
              const Coord lower = std::min(v[a], partner);
              if (in_deleted_set(upper, lower, i + 1, spec)) continue;
            }
            Vertex u = v;
            u[a] = partner;
            out.push_back(std::move(u));
          }
        }
      }
      return;
    }
    case Family::slab:
    case Family::decorated_slab: {
      check_slab_digits(v, spec);
      const int block = spec.block_size();
      for (int a = 0; a < spec.base_dim(); ++a) {
        for (int m = 0; m < block; ++m) {
          const int c = a * block + m;
          for (const int dir : {+1, -1}) {
            const Coord z = v[c] + dir;
            if (m > 0 && (z < 0 || z >= spec.radix(m))) continue;
            Vertex u = v;
            u[c] = z;
            out.push_back(std::move(u));
          }
        }
        if (family == Family::decorated_slab) {
          Vertex u;
          for (int m = n; m >= 1; --m) {
            for (const int dir : {+1, -1}) {
              if (carry_partner(v, spec, a, m, dir, u)) out.push_back(u);
            }
          }
        }
      }
      return;
    }
    case Family::hypercubic: {
      for (std::size_t c = 0; c < v.size(); ++c) {
        for (const int dir : {+1, -1}) {
          Vertex u = v;
          u[c] += dir;
          out.push_back(std::move(u));
        }
      }
      return;
    }
  }
}

GraphView::GraphView(Family family, LatticeSpec spec, Window window)
    : family_(family), spec_(std::move(spec)), window_(std::move(window)) {
  const int dims = vertex_dims(family_, spec_);
  if (window_.dims() != static_cast<std::size_t>(dims)) {
    throw std::invalid_argument(
        fmt::format("{} window has {} axes, expected {}", family_name(family_),
                    window_.dims(), dims));
  }
  for (std::size_t i = 0; i < window_.dims(); ++i) {
    const AxisRange& r = window_.axis(i);
    if (r.lo > 0 || r.hi <= 0) {
      throw std::invalid_argument(
          fmt::format("window axis {} range [{},{}) excludes the origin", i,
                      r.lo, r.hi));
    }
    if ((family_ == Family::decorated || family_ == Family::pruned) &&
        r.periodic() && r.extent() % spec_.period() != 0) {
      throw std::invalid_argument(fmt::format(
          "periodic extent {} on axis {} is not a multiple of {}", r.extent(),
          i, spec_.period()));
    }
    if (is_slab_family(family_)) {
      const int m = static_cast<int>(i) % spec_.block_size();
      if (m > 0 && (r.lo != 0 || r.hi != spec_.radix(m) || r.periodic())) {
        throw std::invalid_argument(fmt::format(
            "slab axis {} must span [0,{}) with free boundary", i,
            spec_.radix(m)));
      }
    }
  }
}

void GraphView::neighbors(const Vertex& v, std::vector<Vertex>& out) const {
  if (!window_.contains(v)) {
    throw std::out_of_range(
        fmt::format("vertex {} is outside the window", format_vertex(v)));
  }
  std::vector<Vertex> raw;
  infinite_neighbors(family_, spec_, v, raw);
  out.clear();
  for (Vertex& u : raw) {
    if (!window_.wrap(u) || u == v) continue;
    if (std::find(out.begin(), out.end(), u) != out.end()) continue;
    out.push_back(std::move(u));
  }
}

std::vector<Vertex> GraphView::neighbors(const Vertex& v) const {
  std::vector<Vertex> out;
  neighbors(v, out);
  return out;
}

void GraphView::steps(const Vertex& v, std::vector<Step>& out,
                      std::vector<Vertex>& scratch) const {
  if (!window_.contains(v)) {
    throw std::out_of_range(
        fmt::format("vertex {} is outside the window", format_vertex(v)));
  }
  infinite_neighbors(family_, spec_, v, scratch);
  out.clear();
  for (Vertex& u : scratch) {
    const Coord shift = u[0] - v[0];
    if (!window_.wrap(u) || u == v) continue;
    const bool seen = std::any_of(out.begin(), out.end(),
                                  [&](const Step& s) { return s.to == u; });
    if (seen) continue;
    out.push_back({std::move(u), shift});
  }
}

AdjacencyTable::AdjacencyTable(std::vector<std::uint32_t> offsets,
                               std::vector<std::uint32_t> targets,
                               std::vector<std::int32_t> shifts)
    : offsets_(std::move(offsets)),
      targets_(std::move(targets)),
      shifts_(std::move(shifts)) {
  if (offsets_.empty() || offsets_.back() != targets_.size() ||
      shifts_.size() != targets_.size()) {
    throw std::invalid_argument("inconsistent adjacency arrays");
  }
}

AdjacencyTable AdjacencyTable::build(const GraphView& view, Execution exec) {
  const std::uint64_t volume = view.volume();
  if (volume >= std::numeric_limits<std::uint32_t>::max()) {
    throw std::invalid_argument("window too large for 32-bit vertex indices");
  }
  const auto n = static_cast<std::int64_t>(volume);
  const LatticeSpec& spec = view.spec();
  // Generous per-vertex bound: unit steps on every coordinate plus two carry
  // partners per scale per axis (or two per bond length for Z^d families).
  const std::size_t stride =
      2 * static_cast<std::size_t>(spec.hyper_dim() + spec.base_dim() *
                                                          spec.scales());
  std::vector<std::uint32_t> degree(volume, 0);
  std::vector<std::uint32_t> slot_target(volume * stride);
  std::vector<std::int32_t> slot_shift(volume * stride);
  const Window& window = view.window();

  auto fill_one = [&](std::uint64_t idx, std::vector<GraphView::Step>& steps,
                      std::vector<Vertex>& scratch) {
    view.steps(window.vertex_at(idx), steps, scratch);
    std::size_t slot = idx * stride;
    for (const GraphView::Step& s : steps) {
      slot_target[slot] = static_cast<std::uint32_t>(window.index_of(s.to));
      slot_shift[slot] = static_cast<std::int32_t>(s.shift);
      ++slot;
    }
    degree[idx] = static_cast<std::uint32_t>(steps.size());
  };

  if (exec == Execution::parallel) {
#pragma omp parallel
    {
      std::vector<GraphView::Step> steps;
      std::vector<Vertex> scratch;
#pragma omp for schedule(static)
      for (std::int64_t i = 0; i < n; ++i) {
        fill_one(static_cast<std::uint64_t>(i), steps, scratch);
      }
    }
  } else {
    std::vector<GraphView::Step> steps;
    std::vector<Vertex> scratch;
    for (std::int64_t i = 0; i < n; ++i) {
      fill_one(static_cast<std::uint64_t>(i), steps, scratch);
    }
  }

  std::vector<std::uint32_t> offsets(volume + 1, 0);
  for (std::uint64_t i = 0; i < volume; ++i) {
    offsets[i + 1] = offsets[i] + degree[i];
  }
  std::vector<std::uint32_t> targets(offsets.back());
  std::vector<std::int32_t> shifts(offsets.back());
  for (std::uint64_t i = 0; i < volume; ++i) {
    std::copy_n(slot_target.begin() + static_cast<std::ptrdiff_t>(i * stride),
                degree[i], targets.begin() + offsets[i]);
    std::copy_n(slot_shift.begin() + static_cast<std::ptrdiff_t>(i * stride),
                degree[i], shifts.begin() + offsets[i]);
  }
  return AdjacencyTable(std::move(offsets), std::move(targets),
                        std::move(shifts));
}

std::uint32_t AdjacencyTable::max_degree() const {
  std::uint32_t best = 0;
  for (std::uint32_t v = 0; v < size(); ++v) {
    best = std::max(best, offsets_[v + 1] - offsets_[v]);
  }
  return best;
}

}  // namespace lrperc
