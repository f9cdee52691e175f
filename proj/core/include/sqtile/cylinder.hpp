#pragma once
// Cylinder decompositions of square-tiled surfaces: separatrix diagrams with
// integer widths, heights, and moderately slanted twists (0 < s_i <= b_i).

#include <string>
#include <vector>

#include "sqtile/surface.hpp"

namespace sqt {

struct InvalidDiagram : Error {
  using Error::Error;
};

// One appearance of an edge in a base word; rev marks traversal against the
// edge's intrinsic direction.
struct Occ {
  int edge = 0;
  bool rev = false;
  bool operator==(const Occ&) const = default;
};

struct DiagramCylinder {
  std::vector<Occ> bottom, top;
  long long height = 1;
  bool operator==(const DiagramCylinder&) const = default;
};

// The combinatorial part of a cylinder decomposition. Every edge id in
// [0, n_edges) occurs exactly twice across all base words. Heights are part of
// the diagram (they are the weights of the core multi-curve); widths and
// twists are parameters.
struct CylinderDiagram {
  std::vector<DiagramCylinder> cyls;
  int n_edges = 0;
  bool operator==(const CylinderDiagram&) const = default;
};

struct CylinderParams {
  std::vector<long long> width;  // per edge, >= 1
  std::vector<long long> twist;  // per cylinder; moderately slanted: (0, b_i]
  bool operator==(const CylinderParams&) const = default;
};

long long base_width(const CylinderDiagram& d, const CylinderParams& p, int cyl, bool top);
long long area(const CylinderDiagram& d, const CylinderParams& p);

// Full decomposition along the horizontal core multi-curve, including the
// spine (singular level) structure used for multi-curve typing.
struct Decomposition {
  CylinderDiagram dia;
  CylinderParams par;
  int n_comps = 0;                     // spine components
  std::vector<int> edge_comp;          // edge -> component
  std::vector<int> bottom_comp, top_comp;  // cylinder -> component of that side
  std::vector<std::vector<int>> comp_orders;  // per component, sorted singular orders
  std::vector<std::vector<int>> comp_vertices;  // per component, corner-cycle ids
};

Decomposition decompose(const SquareTiledSurface& q);

// Reduce twists mod b_i into (0, b_i]; idempotent. Widths are checked.
CylinderParams normalize_twists(const CylinderDiagram& d, CylinderParams p);

SquareTiledSurface reconstruct(const CylinderDiagram& d, const CylinderParams& p);

// Text form, one cylinder per line: "top: e3 e1' e2 | bottom: e2 e3' e1 ; a=2"
std::string diagram_text(const CylinderDiagram& d);
CylinderDiagram parse_diagram(const std::string& text);

// A combinatorial self-map: rotate chosen cylinders by 180 degrees, permute
// cylinders, rotate base words by whole edges, then relabel edges by first
// appearance. Composing these with their action on (width, twist) parameters
// realizes every cut-and-paste symmetry of the decorated diagram.
struct DiagramMap {
  std::vector<uint8_t> flip;    // per old cylinder index
  std::vector<int> perm;        // new position i <- old cylinder perm[i]
  std::vector<int> rot_bottom;  // token rotations per new position
  std::vector<int> rot_top;
  std::vector<int> edge_map;    // old edge -> new edge (filled by transform)
};

// Applies the map; if params are given, transforms them alongside.
CylinderDiagram transform_diagram(const CylinderDiagram& d, DiagramMap& g,
                                  const CylinderParams* p_in, CylinderParams* p_out);

std::string diagram_serial(const CylinderDiagram& d);  // presentation serial
std::string diagram_canonical_code(const CylinderDiagram& d);
CylinderDiagram canonicalize_diagram(const CylinderDiagram& d);
// Self-maps of a (canonically presented) diagram.
std::vector<DiagramMap> diagram_automorphisms(const CylinderDiagram& d);
CylinderParams apply_map_params(const CylinderDiagram& d, const DiagramMap& g,
                                const CylinderParams& p);

}  // namespace sqt
