#pragma once
// Connected components of strata: hyperelliptic loci and spin parity for the
// eps=1 (global abelian square) case, plus the component tables.

#include <string>
#include <vector>

#include "sqtile/surface.hpp"

namespace sqt {

// Raised when the component classification of a stratum is not available
// (eps=0 with genus >= 2).
struct UnclassifiedStratum : Error {
  using Error::Error;
};

// Component names for a stratum: {"c"} when connected, otherwise a subset of
// {"hyp", "even", "odd", "nonhyp"}.
std::vector<std::string> stratum_components(const Stratum& s);
bool stratum_classified(const Stratum& s);

// Whether the surface admits the 180-degree involution with 2g+2 fixed
// points. Requires eps=1.
bool is_hyperelliptic(const SquareTiledSurface& q);

// Arf invariant of the quadratic form induced by the abelian square root;
// 0 = even, 1 = odd. Requires eps=1 and all orders divisible by 4.
int spin_parity(const SquareTiledSurface& q);

// Component of the surface within its stratum, named as above.
std::string component_of(const SquareTiledSurface& q);

}  // namespace sqt
