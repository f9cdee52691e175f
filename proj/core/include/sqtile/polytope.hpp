#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <utility>
#include <vector>

#include "sqtile/surface.hpp"

namespace sqt {

using Rat = boost::multiprecision::cpp_rational;
using RatVec = std::vector<Rat>;

struct EmptyPolytope : Error {
  using Error::Error;
};

Rat dot(const RatVec& a, const RatVec& x);

// a·x <= c (closed) / a·x == c
struct LinIneq {
  RatVec a;
  Rat c;
};
struct LinEq {
  RatVec a;
  Rat c;
};

struct Polytope {
  int dim = 0;
  std::vector<LinEq> eqs;
  std::vector<LinIneq> ineqs;
};

bool contains(const Polytope& p, const RatVec& x);

// Exact vertex list of the (bounded) polytope, deduplicated, lex-sorted.
std::vector<RatVec> vertices(const Polytope& p);

// min/max of a·x + c over the polytope; throws EmptyPolytope.
std::pair<Rat, Rat> extrema(const Polytope& p, const RatVec& a, const Rat& c);

// Result of eliminating the equality system: x_full = B·y + t with the free
// coordinates y a subset of the original variables (non-pivot, in lex pivot
// order). Measures and integrals below are Lebesgue in the y coordinates.
struct Reduction {
  Polytope reduced;            // inequalities only, in y
  std::vector<int> free_vars;  // original indices of y
  std::vector<RatVec> basis;   // B, one row per original variable
  RatVec shift;                // t
  RatVec lift(const RatVec& y) const;
  std::pair<RatVec, Rat> push(const RatVec& a, const Rat& c) const;
};
Reduction reduce(const Polytope& p);

int rank_of(std::vector<RatVec> rows);

// ∫ over p of Π_t (forms[t].a · x + forms[t].c), via simplicial decomposition;
// p must have no equalities (use reduce first). Empty product = volume.
Rat integrate_product(const Polytope& p, const std::vector<LinIneq>& forms);
Rat volume(const Polytope& p);

}  // namespace sqt
