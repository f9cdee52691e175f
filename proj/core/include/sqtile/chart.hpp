#pragma once
// Train-track weight charts attached to cylinder diagrams: width variables per
// edge, one transverse variable per cylinder, switch equalities, the
// characteristic cone, and the linear area functional.

#include <string>
#include <vector>

#include "sqtile/cylinder.hpp"
#include "sqtile/polytope.hpp"

namespace sqt {

struct TrainTrackChart {
  CylinderDiagram dia;
  int n_edges = 0;
  int k = 0;                       // cylinders
  int n_vars = 0;                  // widths then transverse vars u_i
  std::vector<LinEq> switch_eqs;   // per-cylinder top total = bottom total
  std::vector<LinIneq> cone;       // closure: w >= 0, 0 <= u_i <= b_i
  RatVec area;                     // Σ a_i b_i as a linear form
  RatVec norm;                     // L1 norm form (all ones)
  int eq_rank = 0;
  int h() const { return n_vars - eq_rank; }
};

TrainTrackChart build_chart(const CylinderDiagram& d);

// b_i as a linear form over the chart variables.
RatVec base_row(const TrainTrackChart& c, int cyl);

// LP-style dump: variables, equalities, inequalities, objective row.
std::string chart_text(const TrainTrackChart& c);

// v(γ,τ): Lebesgue measure (free coordinates, lex elimination) of
// {λ in cone : Area(λ) <= 1}.
Rat chart_volume(const TrainTrackChart& c);
// Same value computed as ∫ Π b_i over the width polytope (cross-check path).
Rat chart_volume_by_integration(const TrainTrackChart& c);

}  // namespace sqt
