#pragma once
// Square-tiled surfaces of quadratic differentials: unit squares glued along
// axis-parallel sides by translations and 180-degree rotations.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sqt {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};
struct InvalidSurface : Error {
  using Error::Error;
};
struct InvalidStratum : Error {
  using Error::Error;
};

// Sides of a unit square.
enum Side : int { R = 0, L = 1, T = 2, B = 3 };

inline bool is_vertical(Side s) { return s == R || s == L; }
inline Side opposite(Side s) {
  switch (s) {
    case R: return L;
    case L: return R;
    case T: return B;
    default: return T;
  }
}
inline const char* side_name(Side s) {
  static const char* names[4] = {"R", "L", "T", "B"};
  return names[s];
}

// A stratum Q(sigma, eps) of quadratic differentials. Orders sigma_i >= -1,
// sum sigma_i = 4g - 4; eps = 1 marks the component that is a global square of
// an abelian differential.
struct Stratum {
  std::vector<int> sigma;
  int eps = 1;

  Stratum() = default;
  Stratum(std::vector<int> sigma_, int eps_);

  int genus() const;                       // from sum sigma = 4g-4
  int punctures() const { return (int)sigma.size(); }
  int dim() const;                         // h = 2g - 2 + n + eps
  // Multiset of nonzero orders; zero entries are marked regular points and do
  // not constrain census membership.
  std::vector<int> nonzero_orders() const;

  bool operator==(const Stratum& o) const { return sigma == o.sigma && eps == o.eps; }
  std::string str() const;
  static Stratum parse(const std::string& text);  // "sigma=[4,0,-1];eps=0"
};

// A square-tiled surface: n unit squares, a fixed-point-free involution on the
// 4n side slots, and a translation/rotation flag per glued pair.
struct SquareTiledSurface {
  int n = 0;
  std::vector<int> partner;     // slot -> slot, size 4n
  std::vector<uint8_t> rot;     // slot -> 1 iff the gluing is a 180-rotation

  static int slot(int square, Side s) { return 4 * square + (int)s; }
  static int square_of(int slot) { return slot / 4; }
  static Side side_of(int slot) { return (Side)(slot % 4); }

  int slots() const { return 4 * n; }
  void glue(int square_a, Side sa, int square_b, Side sb, bool rotation);
};

struct ValidationReport {
  bool ok = true;
  // In-model orientability: every gluing is translation-opposite or
  // rotation-same-side. Surfaces failing this are formally valid per the
  // structural invariants but carry no quadratic differential.
  bool orientable = true;
  std::vector<std::string> problems;
};

// Corner-cycle data. Cone angle at a vertex of cycle length c is c*pi/2 and
// its order is c/2 - 2.
struct SingularityProfile {
  std::vector<std::vector<int>> cycles;  // corner ids, 4*square + corner
  std::vector<int> orders;               // per cycle, >= -1
  int genus = 0;
  std::vector<int> nonzero_orders() const;
};

// Corner encoding used by the walk: 0=BL, 1=BR, 2=TR, 3=TL.
enum Corner : int { BL = 0, BR = 1, TR = 2, TL = 3 };
// One counterclockwise step of the corner walk around a vertex.
int corner_step(const SquareTiledSurface& q, int corner_id);

SquareTiledSurface build_from_permutations(const std::vector<int>& h,
                                           const std::vector<int>& v);

ValidationReport validate(const SquareTiledSurface& q);
void require_valid(const SquareTiledSurface& q);

SingularityProfile singularity_profile(const SquareTiledSurface& q);

// 1 iff the sign-constraint graph (translation => equal, rotation => opposite)
// is 2-colorable. When it is, translation_normal_form yields an equivalent
// presentation with translation gluings only.
int epsilon(const SquareTiledSurface& q);
std::optional<SquareTiledSurface> translation_normal_form(const SquareTiledSurface& q);

// Relabeling/flip-invariant canonical byte string; equality of codes is
// cut-and-paste equivalence.
std::string canonical_form(const SquareTiledSurface& q);

// Deterministic labels per corner cycle, from the winning canonical-form
// traversal; invariant under relabeling and re-marking up to automorphism.
std::vector<int> canonical_vertex_labels(const SquareTiledSurface& q);

// Rotate the whole surface by +90 degrees (R->T->L->B->R).
SquareTiledSurface rotate90(const SquareTiledSurface& q);

// Flip (rotate by 180) a chosen subset of squares; pure re-marking.
SquareTiledSurface flip_squares(const SquareTiledSurface& q, const std::vector<uint8_t>& flip);

// Text encoding:
//   n=<int>
//   <sq>:<R|L|T|B> <sq>:<R|L|T|B> <t|r>     (one line per glued pair)
// or the permutation shorthand  h=<cycles> v=<cycles>  e.g. h=(1 2)(3) v=(1 3)
std::string encode(const SquareTiledSurface& q);
SquareTiledSurface decode(const std::string& text);

std::string hex_code(const std::string& bytes);

}  // namespace sqt
