#pragma once
// The three counting engines (census, direct filtering, diagram lattice
// counting), exact leading-constant volumes, partition cells with sandwich and
// Riemann-sum machinery, and power-law fitting.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sqtile/chart.hpp"
#include "sqtile/component.hpp"
#include "sqtile/multicurve.hpp"
#include "sqtile/polytope.hpp"

namespace sqt {

struct InsufficientData : Error {
  using Error::Error;
};

struct CensusFilter {
  std::optional<Stratum> stratum;  // matches genus, eps, nonzero orders
  std::string component;           // "" = any
};

// One representative per cut-and-paste class with at most max_squares squares.
// ordered=true buffers and emits by (area, canonical code) from a single
// thread; ordered=false streams in an unspecified order and may invoke emit
// concurrently. Identical class set for any jobs count.
void census(int max_squares, const CensusFilter& f, int jobs, bool ordered,
            const std::function<void(const SquareTiledSurface&)>& emit);

// Classes with exactly n squares, n = 1..max_squares.
std::vector<long long> census_counts(int max_squares, const CensusFilter& f, int jobs);

struct CountSeries {
  std::string engine, gamma1, gamma2, stratum, component;
  std::vector<long long> count;  // count[i] = value at L = i+1, cumulative
  std::string csv() const;       // L,count,engine,gamma1,gamma2,stratum,component
};

// Surfaces with vertical type gamma1, horizontal type gamma2, area <= L.
CountSeries sq_direct(const Stratum& st, const std::string& comp,
                      const MultiCurveType& gamma1, const MultiCurveType& gamma2,
                      int Lmax, int jobs, bool labeled = false);
// Vertical type gamma1 only (sq(gamma1,*,Q,L)), by census filtering.
CountSeries sq_star_census(const Stratum& st, const std::string& comp,
                           const MultiCurveType& gamma1, int Lmax, int jobs,
                           bool labeled = false);
// Same count via cylinder diagrams of gamma1 and lattice points of their
// charts, with exact symmetry-orbit counting. Equals sq_star_census.
CountSeries sq_lattice(const Stratum& st, const std::string& comp,
                       const MultiCurveType& gamma1, int Lmax, int jobs);

// All cylinder diagrams whose horizontal type is gamma, canonical, sorted.
std::vector<CylinderDiagram> enumerate_diagrams(const Stratum& st, const std::string& comp,
                                                const MultiCurveType& gamma, int jobs);

// v(gamma,Q) = Σ over diagrams of chart_volume scaled by the fraction of the
// diagram symmetry group acting trivially on parameters.
Rat volume_constant(const Stratum& st, const std::string& comp,
                    const MultiCurveType& gamma, int jobs);
Rat diagram_symmetry_factor(const CylinderDiagram& d);  // |G_triv| / |G|

// A half-open grid cell of the slice {‖λ‖_1 = 1} of a chart's cone, recorded
// by bounds on the free slice coordinates (a subset of chart variables).
struct Cell {
  std::vector<int> vars;
  std::vector<Rat> lo, hi;  // lo < var/‖λ‖ <= hi
};

// Disjoint cells covering the slice, each of L1-diameter <= delta; the cell
// count is at most ceil(C/delta)^(h-1) with C the recorded Lipschitz bound.
struct Partition {
  std::vector<Cell> cells;
  Rat lipschitz;     // full-variable L1 diameter per unit grid step
  long long grid_m;  // subdivisions per coordinate
};
Partition partition_chart(const TrainTrackChart& c, const Rat& delta);

Polytope cell_slice(const TrainTrackChart& c, const Cell& u);      // closed
Polytope cell_cone_unit(const TrainTrackChart& c, const Cell& u);  // (0,1]·U
Rat cell_measure(const TrainTrackChart& c, const Cell& u);         // μ((0,1]·U)
// (m, M) of the area functional over the closed cell; throws EmptyPolytope.
std::pair<Rat, Rat> cell_area_extrema(const TrainTrackChart& c, const Cell& u);
bool cell_contains(const TrainTrackChart& c, const Cell& u,
                   const std::vector<long long>& lambda);

// Integer points of the chart cone (widths >= 1, switch equalities,
// 1 <= u_i <= b_i) with ‖λ‖_1 <= max_norm1, with their vertical core type.
struct ChartPoint {
  std::vector<long long> lambda;
  long long norm1 = 0, area = 0;
  std::string vkey;
};
std::vector<ChartPoint> chart_integer_points(const TrainTrackChart& c, long long max_norm1);

// s(γ1,U,L): points of vertical type gamma1 in the cone over the cell with
// ‖λ‖ <= L; cell == nullptr means the whole cone.
long long s_count(const TrainTrackChart& c, const std::vector<ChartPoint>& pts,
                  const Cell* u, const std::string& gamma1_key, long long L);
// sq(γ1,γ2,U,L): same with Area <= L.
long long sq_tt_count(const TrainTrackChart& c, const std::vector<ChartPoint>& pts,
                      const Cell* u, const std::string& gamma1_key, long long L);

struct FitResult {
  double v_hat = 0;       // leading coefficient of v·L^h on the last decade
  int h = 0;              // fixed exponent
  double slope = 0;       // free log-log slope over the same window
  double kappa_hat = 0;   // empirical error exponent of |count - v·L^h|
  double resid_rms = 0;   // relative residual over the window
  std::string json() const;
};
FitResult fit_power_law(const CountSeries& s, int h);

}  // namespace sqt
