#pragma once
// Topological types of integrally weighted multi-curves: the dual graph of the
// curve system, with complementary pieces as vertices and curves as weighted
// edges. Pieces carry genus, boundary count, and the orders of the marked
// singularities they contain.

#include <string>
#include <vector>

#include "sqtile/cylinder.hpp"
#include "sqtile/surface.hpp"

namespace sqt {

struct InvalidMultiCurve : Error {
  using Error::Error;
};

struct Piece {
  int genus = 0;
  int boundaries = 0;  // equals the vertex degree in the dual graph
  // (order, label); label is -1 unless singularities are labeled
  std::vector<std::pair<int, int>> punctures;
  bool operator==(const Piece&) const = default;
};

struct MultiCurveType {
  struct Edge {
    int a = 0, b = 0;  // piece indices, a <= b after canonicalization
    long long w = 1;   // weight (cylinder height)
    bool operator==(const Edge&) const = default;
  };
  std::vector<Piece> pieces;
  std::vector<Edge> edges;
  bool operator==(const MultiCurveType&) const = default;

  // Canonical single-token text form, e.g. "g0.b2.s[-1,-1,-1,-1]/e(0,0,w=1)".
  std::string key() const;
  static MultiCurveType parse(const std::string& text);
};

// Brings pieces and edges into the canonical order; key() of equal types match
// iff the weighted graphs are isomorphic respecting piece data.
MultiCurveType canonicalize(MultiCurveType t);

// The horizontal (resp. vertical) core multi-curve of the surface: one curve
// per cylinder, weighted by its height. Marked regular points are invisible.
MultiCurveType horizontal_core(const SquareTiledSurface& q, bool labeled = false);
MultiCurveType vertical_core(const SquareTiledSurface& q, bool labeled = false);

// Type of the core of an already computed decomposition.
MultiCurveType core_type(const SquareTiledSurface& q, const Decomposition& dec,
                         bool labeled = false);

}  // namespace sqt
