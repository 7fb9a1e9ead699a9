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

// Maps between the lattice families and exhaustive checks of the structural
// claims built on them:
//
//   to_slab / from_slab        digit decomposition Z^d -> slab, a graph
//                              isomorphism pruned -> slab and
//                              decorated -> decorated_slab.
//   quotient_map               Z^{d(n+1)} -> decorated_slab, invariant under
//                              the block shifts generated by shift_digits.
//
// Digit sequences have n+1 entries: entry 0 is unbounded, entry m in [1, n]
// lies in {0, ..., k_{n+1-m} - 1} (see LatticeSpec::radix).

#ifndef LRPERC_MAPS_HPP_
#define LRPERC_MAPS_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lrperc/lattice.hpp"

namespace lrperc {

using Digits = Vertex;

// Mixed-radix digits of an integer, floored for negatives: entry 0 is
// floor(v / L_n), entry m is floor((v mod L_{n+1-m}) / L_{n-m}).
Digits to_slab_digits(Coord v, const LatticeSpec& spec);

// Inverse of to_slab_digits. Throws std::invalid_argument on a bounded entry
// outside its range or a length other than n+1.
Coord from_slab_digits(std::span<const Coord> z, const LatticeSpec& spec);

// Componentwise digit map Z^d -> slab and its inverse.
Vertex to_slab(const Vertex& v, const LatticeSpec& spec);
Vertex from_slab(const Vertex& z, const LatticeSpec& spec);

// Carry normalisation of an arbitrary (n+1)-sequence, finest entry first:
// each entry is reduced modulo its radix and the floored quotient is carried
// into the next coarser entry; entry 0 absorbs the final carry.
Digits normalize_digits(std::span<const Coord> y, const LatticeSpec& spec);

// Blockwise normalize_digits on a Z^{d(n+1)} vertex.
Vertex quotient_map(const Vertex& y, const LatticeSpec& spec);

// Block shift for scale j in [1, n]: entry n-j decreases by `power`, entry
// n+1-j increases by power * k_j. power = -1 is the inverse.
Digits shift_digits(int scale, std::span<const Coord> z,
                    const LatticeSpec& spec, int power = 1);

// Generator of the shift group acting on one block. Both indices are
// one-based: axis in [1, d], scale in [1, n].
struct GeneratorId {
  int axis = 1;
  int scale = 1;
};

std::vector<GeneratorId> generators(const LatticeSpec& spec);

Vertex apply_generator(GeneratorId id, const Vertex& v,
                       const LatticeSpec& spec, int power = 1);

// Slab window that is the digit-map image of a Z^d window whose ranges are
// aligned to L_n. Throws std::invalid_argument otherwise.
Window slab_window_for(const Window& base, const LatticeSpec& spec);

struct ClaimResult {
  std::string claim;
  bool passed = true;
  std::uint64_t checked = 0;
  std::string witness;
};

struct VerificationReport {
  std::vector<ClaimResult> claims;

  bool passed() const;
  void append(const VerificationReport& other);
  // One claim per line: "PASS <claim> checked=<n>" or
  // "FAIL <claim> checked=<n> witness: <text>".
  std::string to_text() const;
};

// Checks that `vertex_map` (dense index in `from` -> dense index in `to`) is
// a bijection and carries the edge set of `from` exactly onto that of `to`.
// Produces claims "<name> bijective", "<name> edges forward" and
// "<name> edges backward"; failures carry the smallest witness.
VerificationReport check_edge_transport(const std::string& name,
                                        const AdjacencyTable& from,
                                        const Window& from_window,
                                        const AdjacencyTable& to,
                                        const Window& to_window,
                                        std::span<const std::uint64_t> vertex_map);

// Exhaustive digit-map checks on a Z^d window: pruned -> slab and
// decorated -> decorated_slab. Every axis must be aligned to L_n and span at
// least three periods (std::invalid_argument otherwise).
VerificationReport check_isomorphism(const Window& base,
                                     const LatticeSpec& spec);

// Structural invariants on a Z^d window aligned to L_n with at least three
// periods per axis: symmetric adjacency for the decorated, pruned, slab and
// decorated-slab views; pruned edges are decorated edges; with a periodic
// window every decorated vertex has degree 2d(n+1) and, for each axis and
// scale i, exactly L_{i-1} of every L_i bonds of length L_{i-1} are deleted.
VerificationReport check_lattice_invariants(const Window& base,
                                            const LatticeSpec& spec);

inline constexpr std::uint64_t kDefaultQuotientSamples = 100'000;

// Quotient checks for the hypercubic cover. `hyper` is the sampling region
// in Z^{d(n+1)}; its block-leading ranges also define the decorated-slab
// window used for the preimage claim. Regions with at most `samples`
// vertices are enumerated, larger ones are sampled uniformly from `seed`.
VerificationReport check_quotient(const Window& hyper,
                                  const LatticeSpec& spec,
                                  std::uint64_t samples =
                                      kDefaultQuotientSamples,
                                  std::uint64_t seed = 1);

}  // namespace lrperc

#endif  // LRPERC_MAPS_HPP_
