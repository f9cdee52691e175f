#include "sqtile/cylinder.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <numeric>
#include <regex>
#include <set>
#include <sstream>

namespace sqt {

namespace {

long long floor_mod(long long a, long long m) {
  long long r = a % m;
  return r < 0 ? r + m : r;
}

}  // namespace

long long base_width(const CylinderDiagram& d, const CylinderParams& p, int cyl, bool top) {
  const auto& word = top ? d.cyls[cyl].top : d.cyls[cyl].bottom;
  long long b = 0;
  for (const auto& o : word) b += p.width.at(o.edge);
  return b;
}

long long area(const CylinderDiagram& d, const CylinderParams& p) {
  long long a = 0;
  for (int i = 0; i < (int)d.cyls.size(); ++i)
    a += d.cyls[i].height * base_width(d, p, i, false);
  return a;
}

CylinderParams normalize_twists(const CylinderDiagram& d, CylinderParams p) {
  if ((int)p.width.size() != d.n_edges)
    throw InvalidDiagram("width vector size mismatch");
  for (long long w : p.width)
    if (w < 1) throw InvalidDiagram("widths must be >= 1");
  if (p.twist.size() != d.cyls.size())
    throw InvalidDiagram("twist vector size mismatch");
  for (int i = 0; i < (int)d.cyls.size(); ++i) {
    long long b = base_width(d, p, i, false);
    p.twist[i] = floor_mod(p.twist[i] - 1, b) + 1;
  }
  return p;
}

// ---------------------------------------------------------------------------
// decompose

namespace {

// A horizontal band: the squares crossed by one core circle, in traversal
// order, with dir=1 where the circle runs against the square's marking.
struct Band {
  std::vector<int> sq;
  std::vector<int> dir;
  bool top_merged = false, bottom_merged = false;
  int width() const { return (int)sq.size(); }
};

struct UnionFind {
  std::vector<int> p;
  explicit UnionFind(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
  void unite(int a, int b) { p[find(a)] = find(b); }
};

struct Placement {
  int band = 0;
  int o = 1;         // +1: columns follow band order; -1: reversed
  long long shift = 0;  // column c -> band position (shift + o*c) mod w
};

struct Assembler {
  const SquareTiledSurface& q;
  std::vector<Band> bands;
  std::vector<int> band_of, pos_of, dir_of;
  std::vector<int> corner_cycle;  // corner id -> cycle index
  std::vector<int> cycle_order;

  explicit Assembler(const SquareTiledSurface& qq) : q(qq) {}

  int band_pos(const Placement& pl, long long c) const {
    const Band& bd = bands[pl.band];
    return (int)floor_mod(pl.shift + pl.o * c, bd.width());
  }
  // 1 iff the square at column c sits upside down in the cylinder frame.
  int col_flip(const Placement& pl, long long c) const {
    return bands[pl.band].dir[band_pos(pl, c)] ^ (pl.o < 0 ? 1 : 0);
  }
  int col_square(const Placement& pl, long long c) const {
    return bands[pl.band].sq[band_pos(pl, c)];
  }
  int top_slot(const Placement& pl, long long c) const {
    return SquareTiledSurface::slot(col_square(pl, c), col_flip(pl, c) ? B : T);
  }
  int bottom_slot(const Placement& pl, long long c) const {
    return SquareTiledSurface::slot(col_square(pl, c), col_flip(pl, c) ? T : B);
  }
  // Vertex (corner cycle) at the left end of the unit below/above column c.
  int bottom_vertex(const Placement& pl, long long c) const {
    int sq = col_square(pl, c);
    return corner_cycle[4 * sq + (col_flip(pl, c) ? TR : BL)];
  }
  int top_vertex(const Placement& pl, long long c) const {
    int sq = col_square(pl, c);
    return corner_cycle[4 * sq + (col_flip(pl, c) ? BR : TL)];
  }

  void extract_bands() {
    band_of.assign(q.n, -1);
    pos_of.assign(q.n, -1);
    dir_of.assign(q.n, -1);
    std::vector<int> state_band(2 * q.n, -1);
    for (int st0 = 0; st0 < 2 * q.n; ++st0) {
      if (state_band[st0] >= 0) continue;
      // trace the cycle of st0 before deciding between it and its mirror
      std::vector<int> cyc;
      int st = st0;
      do {
        cyc.push_back(st);
        int sq = st / 2, d = st % 2;
        int out = SquareTiledSurface::slot(sq, d == 0 ? R : L);
        int pr = q.partner[out];
        Side side2 = SquareTiledSurface::side_of(pr);
        if (!is_vertical(side2)) throw InvalidSurface("horizontal slot glued to vertical");
        st = 2 * SquareTiledSurface::square_of(pr) + (side2 == R ? 1 : 0);
      } while (st != st0);
      bool keep = true;
      for (int s : cyc)
        if ((s ^ 1) < st0 || state_band[s ^ 1] >= 0) { keep = false; break; }
      for (int s : cyc) {
        if (state_band[s] >= 0 && keep) throw InvalidSurface("band self-overlap");
        state_band[s] = keep ? (int)bands.size() : -2;
      }
      if (!keep) continue;
      Band bd;
      for (int i = 0; i < (int)cyc.size(); ++i) {
        int sq = cyc[i] / 2, d = cyc[i] % 2;
        if (band_of[sq] >= 0) throw InvalidSurface("square crossed twice by one circle");
        band_of[sq] = (int)bands.size();
        pos_of[sq] = i;
        dir_of[sq] = d;
        bd.sq.push_back(sq);
        bd.dir.push_back(d);
      }
      bands.push_back(std::move(bd));
    }
  }

  void mark_merges(UnionFind& uf) {
    for (int r = 0; r < (int)bands.size(); ++r) {
      Placement pl{r, 1, 0};
      int w = bands[r].width();
      bool top_ok = true, bot_ok = true;
      for (int c = 0; c < w; ++c) {
        if (cycle_order[top_vertex(pl, c)] != 0) top_ok = false;
        if (cycle_order[bottom_vertex(pl, c)] != 0) bot_ok = false;
      }
      bands[r].top_merged = top_ok;
      bands[r].bottom_merged = bot_ok;
      if (top_ok) {
        int pr = q.partner[top_slot(pl, 0)];
        uf.unite(r, band_of[SquareTiledSurface::square_of(pr)]);
      }
      if (bot_ok) {
        int pr = q.partner[bottom_slot(pl, 0)];
        uf.unite(r, band_of[SquareTiledSurface::square_of(pr)]);
      }
    }
  }

  // Whether the circle bounding this row above/below (in the cylinder frame)
  // is regular; flipped rows see the band's own sides exchanged.
  bool merged_above(const Placement& pl) const {
    return pl.o > 0 ? bands[pl.band].top_merged : bands[pl.band].bottom_merged;
  }
  bool merged_below(const Placement& pl) const {
    return pl.o > 0 ? bands[pl.band].bottom_merged : bands[pl.band].top_merged;
  }

  Placement row_above(const Placement& pl) const {
    int pr = q.partner[top_slot(pl, 0)];
    int sq2 = SquareTiledSurface::square_of(pr);
    int f2 = SquareTiledSurface::side_of(pr) == T ? 1 : 0;
    Placement up{band_of[sq2], (f2 != dir_of[sq2]) ? -1 : 1, pos_of[sq2]};
    for (long long c = 0; c < bands[pl.band].width(); ++c)
      if (q.partner[top_slot(pl, c)] != bottom_slot(up, c))
        throw InvalidSurface("sheared stack over a regular circle");
    return up;
  }

  Placement row_below(const Placement& pl) const {
    int pr = q.partner[bottom_slot(pl, 0)];
    int sq2 = SquareTiledSurface::square_of(pr);
    int f2 = SquareTiledSurface::side_of(pr) == B ? 1 : 0;
    Placement dn{band_of[sq2], (f2 != dir_of[sq2]) ? -1 : 1, pos_of[sq2]};
    for (long long c = 0; c < bands[pl.band].width(); ++c)
      if (q.partner[bottom_slot(pl, c)] != top_slot(dn, c))
        throw InvalidSurface("sheared stack over a regular circle");
    return dn;
  }
};

struct WordRef {
  int cyl = -1;
  bool top = false;
  long long pos = -1;  // word position
  int flip = 0;        // square flip at that unit, cylinder frame
};

}  // namespace

Decomposition decompose(const SquareTiledSurface& q) {
  ValidationReport rep = validate(q);
  if (!rep.ok) throw InvalidSurface("decompose: invalid surface");
  if (!rep.orientable) throw InvalidSurface("decompose: non-orientable gluing pattern");

  Assembler as(q);
  SingularityProfile prof = singularity_profile(q);
  as.corner_cycle.assign(4 * q.n, -1);
  for (int i = 0; i < (int)prof.cycles.size(); ++i)
    for (int cn : prof.cycles[i]) as.corner_cycle[cn] = i;
  as.cycle_order = prof.orders;
  as.extract_bands();
  UnionFind uf((int)as.bands.size());
  as.mark_merges(uf);

  // assemble one stack of rows per union-find class
  std::map<int, int> class_min;  // uf class -> smallest band id
  for (int r = 0; r < (int)as.bands.size(); ++r) {
    int c = uf.find(r);
    if (!class_min.count(c) || r < class_min[c]) class_min[c] = r;
  }
  struct Stack {
    std::vector<Placement> rows;
    bool closed = false;
    long long closure_col = 0;  // bottom column glued above top column 0
  };
  std::vector<Stack> stacks;
  for (auto& [cls, b0] : class_min) {
    (void)cls;
    Stack st;
    st.rows.push_back(Placement{b0, 1, 0});
    while (as.merged_above(st.rows.back())) {
      Placement up = as.row_above(st.rows.back());
      if (up.band == b0) {
        if (up.o != 1) throw InvalidSurface("orientation-reversing vertical monodromy");
        st.closed = true;
        break;
      }
      st.rows.push_back(up);
    }
    if (!st.closed) {
      while (as.merged_below(st.rows.front()))
        st.rows.insert(st.rows.begin(), as.row_below(st.rows.front()));
    }
    stacks.push_back(std::move(st));
  }
  std::sort(stacks.begin(), stacks.end(),
            [](const Stack& a, const Stack& b) { return a.rows[0].band < b.rows[0].band; });

  // pick the bottom-word origin at a singular vertex and read both circles
  int k = (int)stacks.size();
  Decomposition dec;
  dec.dia.cyls.resize(k);
  dec.par.twist.resize(k);
  dec.bottom_comp.assign(k, -1);
  dec.top_comp.assign(k, -1);

  std::vector<long long> widths(k);
  std::vector<std::vector<long long>> bot_cuts(k), top_cuts(k);  // word positions
  std::map<int, WordRef> slot_ref;
  std::vector<std::vector<int>> bot_vert(k), top_vert(k);  // cycle id at each cut

  for (int i = 0; i < k; ++i) {
    Stack& st = stacks[i];
    long long b = as.bands[st.rows[0].band].width();
    for (auto& pl : st.rows)
      if (as.bands[pl.band].width() != b) throw InvalidSurface("ragged cylinder");
    widths[i] = b;
    dec.dia.cyls[i].height = (long long)st.rows.size();

    std::vector<long long> sing;
    for (long long c = 0; c < b; ++c)
      if (as.cycle_order[as.bottom_vertex(st.rows[0], c)] != 0) sing.push_back(c);
    if (!sing.empty() && sing[0] != 0) {
      long long delta = sing[0];
      for (auto& pl : st.rows) pl.shift = floor_mod(pl.shift + pl.o * delta, b);
      sing.clear();
      for (long long c = 0; c < b; ++c)
        if (as.cycle_order[as.bottom_vertex(st.rows[0], c)] != 0) sing.push_back(c);
    }
    if (st.closed && !sing.empty())
      throw InvalidSurface("closed stack with singular seam");

    const Placement& bot = st.rows[0];
    const Placement& top = st.rows.back();
    for (long long c = 0; c < b; ++c)
      slot_ref[as.bottom_slot(bot, c)] = WordRef{i, false, c, as.col_flip(bot, c)};
    bot_cuts[i] = sing;
    for (long long c : sing) bot_vert[i].push_back(as.bottom_vertex(bot, c));

    long long q0 = 0;
    std::vector<long long> tsing;
    if (st.closed) {
      // the seam circle: the top word is read so that word position j lies
      // over bottom column j; the twist is where bottom column 0 reattaches
      int pr = q.partner[as.top_slot(top, 0)];
      WordRef r0 = slot_ref.at(pr);
      dec.par.twist[i] = r0.pos == 0 ? b : r0.pos;
      q0 = 0;
    } else {
      for (long long c = 0; c < b; ++c)
        if (as.cycle_order[as.top_vertex(top, c)] != 0) tsing.push_back(c);
      if (tsing.empty()) throw InvalidSurface("open stack with regular top");
      q0 = tsing[0];
      dec.par.twist[i] = floor_mod(-q0 - 1, b) + 1;
    }
    for (long long j = 0; j < b; ++j) {
      long long c = floor_mod(q0 + j, b);
      slot_ref[as.top_slot(top, c)] = WordRef{i, true, j, as.col_flip(top, c)};
    }
    for (long long c : tsing) {
      top_cuts[i].push_back(floor_mod(c - q0, b));
      top_vert[i].push_back(as.top_vertex(top, c));
    }
    std::sort(top_cuts[i].begin(), top_cuts[i].end());
    // re-read vertices in sorted word order
    top_vert[i].clear();
    for (long long j : top_cuts[i])
      top_vert[i].push_back(as.top_vertex(top, floor_mod(q0 + j, b)));
  }

  // cut words into runs and pair runs into edges
  struct RunId {
    int cyl;
    bool top;
    int idx;
    auto operator<=>(const RunId&) const = default;
  };
  auto run_count = [&](int i, bool top) {
    const auto& cuts = top ? top_cuts[i] : bot_cuts[i];
    return cuts.empty() ? 1 : (long long)cuts.size();
  };
  auto run_span = [&](int i, bool top, int idx) -> std::pair<long long, long long> {
    const auto& cuts = top ? top_cuts[i] : bot_cuts[i];
    long long b = widths[i];
    if (cuts.empty()) return {0, b};
    long long s = cuts[idx];
    long long e = idx + 1 < (int)cuts.size() ? cuts[idx + 1] : cuts[0] + b;
    return {s, e - s};
  };
  // direct tables word position -> slot, built once
  std::vector<std::vector<int>> bot_slots(k), top_slots(k);
  for (auto& [sl, rf] : slot_ref) {
    auto& tab = rf.top ? top_slots[rf.cyl] : bot_slots[rf.cyl];
    if ((long long)tab.size() < widths[rf.cyl]) tab.resize(widths[rf.cyl], -1);
    tab[rf.pos] = sl;
  }

  auto run_of_pos = [&](int i, bool top, long long pos) -> int {
    const auto& cuts = top ? top_cuts[i] : bot_cuts[i];
    if (cuts.empty()) return 0;
    auto it = std::upper_bound(cuts.begin(), cuts.end(), pos);
    return (int)((it - cuts.begin()) + cuts.size() - 1) % (int)cuts.size();
  };

  std::map<RunId, Occ> run_token;
  int next_edge = 0;
  dec.par.width.clear();
  std::vector<std::pair<RunId, RunId>> edge_occ;  // first, second occurrence
  for (int i = 0; i < k; ++i) {
    for (int side = 0; side < 2; ++side) {
      bool top = side == 1;
      for (int idx = 0; idx < run_count(i, top); ++idx) {
        RunId rid{i, top, idx};
        if (run_token.count(rid)) continue;
        auto [start, len] = run_span(i, top, idx);
        int eid = next_edge++;
        dec.par.width.push_back(len);
        run_token[rid] = Occ{eid, false};
        // locate the partner run via unit 0
        const auto& tab = top ? top_slots[i] : bot_slots[i];
        int sl0 = tab[floor_mod(start, widths[i])];
        int pr0 = q.partner[sl0];
        WordRef rf = slot_ref.at(pr0);
        RunId pid{rf.cyl, rf.top, run_of_pos(rf.cyl, rf.top, rf.pos)};
        if (pid == rid) throw InvalidSurface("self-paired run");
        if (run_token.count(pid)) throw InvalidSurface("run paired twice");
        auto [pstart, plen] = run_span(rf.cyl, rf.top, pid.idx);
        if (plen != len) throw InvalidSurface("paired runs of unequal width");
        // relative direction of the two word traversals across unit 0
        int f1 = slot_ref.at(sl0).flip, f2 = rf.flip;
        int dir_rel = (f1 ? -1 : 1) * (f2 ? -1 : 1) * (q.rot[sl0] ? -1 : 1);
        bool rev2 = dir_rel < 0;
        if (rev2 != (top == rf.top))
          throw InvalidSurface("orientation-incoherent run pairing");
        run_token[pid] = Occ{eid, rev2};
        // full verification of the pairing; a seam of a closed stack pairs two
        // cut-free circles with an offset, recorded separately as the twist
        long long bp = widths[rf.cyl];
        bool cut_free = (top ? top_cuts[i] : bot_cuts[i]).empty() &&
                        (rf.top ? top_cuts[rf.cyl] : bot_cuts[rf.cyl]).empty();
        long long offset = 0;
        for (long long u = 0; u < len; ++u) {
          int slu = tab[floor_mod(start + u, widths[i])];
          long long expect = rev2 ? pstart + (len - 1 - u) : pstart + u;
          long long have = slot_ref.at(q.partner[slu]).pos;
          long long diff = floor_mod(have - expect, bp);
          if (u == 0 && cut_free) offset = diff;
          if (diff != offset) throw InvalidSurface("non-affine run pairing");
        }
        edge_occ.push_back({rid, pid});
      }
    }
  }
  dec.dia.n_edges = next_edge;
  for (int i = 0; i < k; ++i) {
    for (int idx = 0; idx < run_count(i, false); ++idx)
      dec.dia.cyls[i].bottom.push_back(run_token.at(RunId{i, false, idx}));
    for (int idx = 0; idx < run_count(i, true); ++idx)
      dec.dia.cyls[i].top.push_back(run_token.at(RunId{i, true, idx}));
  }

  // spine components: edges joined along singular vertices
  UnionFind euf(next_edge);
  std::map<int, int> vert_edge;  // cycle id -> an incident edge
  for (int i = 0; i < k; ++i) {
    for (int side = 0; side < 2; ++side) {
      bool top = side == 1;
      const auto& verts = top ? top_vert[i] : bot_vert[i];
      const auto& word = top ? dec.dia.cyls[i].top : dec.dia.cyls[i].bottom;
      for (int idx = 0; idx < (int)verts.size(); ++idx) {
        int e_here = word[idx].edge;
        int e_prev = word[(idx + verts.size() - 1) % verts.size()].edge;
        euf.unite(e_here, e_prev);
        auto it = vert_edge.find(verts[idx]);
        if (it == vert_edge.end())
          vert_edge[verts[idx]] = e_here;
        else
          euf.unite(e_here, it->second);
      }
    }
  }
  std::map<int, int> comp_id;
  dec.edge_comp.resize(next_edge);
  for (int e = 0; e < next_edge; ++e) {
    int c = euf.find(e);
    if (!comp_id.count(c)) comp_id[c] = dec.n_comps++;
    dec.edge_comp[e] = comp_id[c];
  }
  dec.comp_orders.resize(dec.n_comps);
  dec.comp_vertices.resize(dec.n_comps);
  for (auto& [cyc, e] : vert_edge) {
    int c = dec.edge_comp[e];
    dec.comp_vertices[c].push_back(cyc);
    dec.comp_orders[c].push_back(as.cycle_order[cyc]);
  }
  for (auto& v : dec.comp_orders) std::sort(v.begin(), v.end());
  for (int i = 0; i < k; ++i) {
    dec.bottom_comp[i] = dec.edge_comp[dec.dia.cyls[i].bottom[0].edge];
    dec.top_comp[i] = dec.edge_comp[dec.dia.cyls[i].top[0].edge];
  }
  dec.par = normalize_twists(dec.dia, std::move(dec.par));
  return dec;
}

// ---------------------------------------------------------------------------
// reconstruct

SquareTiledSurface reconstruct(const CylinderDiagram& d, const CylinderParams& p) {
  int k = (int)d.cyls.size();
  if (k == 0) throw InvalidDiagram("empty diagram");
  CylinderParams pp = normalize_twists(d, p);
  std::vector<long long> b(k), off(k + 1, 0);
  for (int i = 0; i < k; ++i) {
    b[i] = base_width(d, pp, i, false);
    if (b[i] != base_width(d, pp, i, true))
      throw InvalidDiagram("top/bottom widths disagree");
    if (d.cyls[i].height < 1) throw InvalidDiagram("heights must be >= 1");
    off[i + 1] = off[i] + d.cyls[i].height * b[i];
  }
  long long n = off[k];
  if (n > (1 << 24)) throw InvalidDiagram("surface too large");
  SquareTiledSurface q;
  q.n = (int)n;
  q.partner.assign(4 * n, -1);
  q.rot.assign(4 * n, 0);
  auto sq_at = [&](int i, long long r, long long c) {
    return (int)(off[i] + r * b[i] + c);
  };
  for (int i = 0; i < k; ++i) {
    for (long long r = 0; r < d.cyls[i].height; ++r)
      for (long long c = 0; c < b[i]; ++c) {
        q.glue(sq_at(i, r, c), R, sq_at(i, r, (c + 1) % b[i]), L, false);
        if (r + 1 < d.cyls[i].height)
          q.glue(sq_at(i, r, c), T, sq_at(i, r + 1, c), B, false);
      }
  }
  struct OccAt {
    int cyl;
    bool top;
    long long start;
    bool rev;
  };
  std::vector<std::vector<OccAt>> occs(d.n_edges);
  for (int i = 0; i < k; ++i) {
    long long pos = 0;
    for (const auto& o : d.cyls[i].bottom) {
      occs.at(o.edge).push_back(OccAt{i, false, pos, o.rev});
      pos += pp.width[o.edge];
    }
    if (pos != b[i]) throw InvalidDiagram("width bookkeeping error");
    pos = 0;
    for (const auto& o : d.cyls[i].top) {
      occs.at(o.edge).push_back(OccAt{i, true, pos, o.rev});
      pos += pp.width[o.edge];
    }
  }
  auto slot_at = [&](const OccAt& oc, long long wordpos) {
    if (!oc.top)
      return SquareTiledSurface::slot(sq_at(oc.cyl, 0, wordpos), B);
    long long c = floor_mod(wordpos - pp.twist[oc.cyl], b[oc.cyl]);
    return SquareTiledSurface::slot(sq_at(oc.cyl, d.cyls[oc.cyl].height - 1, c), T);
  };
  for (int e = 0; e < d.n_edges; ++e) {
    if (occs[e].size() != 2) throw InvalidDiagram("edge must occur exactly twice");
    const OccAt &o1 = occs[e][0], &o2 = occs[e][1];
    bool same_kind = o1.top == o2.top;
    if (same_kind != (o1.rev != o2.rev))
      throw InvalidDiagram("orientation-incoherent edge occurrence pair");
    long long w = pp.width[e];
    for (long long u = 0; u < w; ++u) {
      long long p1 = o1.start + (o1.rev ? w - 1 - u : u);
      long long p2 = o2.start + (o2.rev ? w - 1 - u : u);
      int s1 = slot_at(o1, p1), s2 = slot_at(o2, p2);
      if (s1 == s2) throw InvalidDiagram("unit glued to itself");
      q.glue(SquareTiledSurface::square_of(s1), SquareTiledSurface::side_of(s1),
             SquareTiledSurface::square_of(s2), SquareTiledSurface::side_of(s2),
             same_kind);
    }
  }
  ValidationReport rep = validate(q);
  if (!rep.ok || !rep.orientable)
    throw InvalidDiagram("diagram does not assemble into a valid surface");
  return q;
}

// ---------------------------------------------------------------------------
// text form

std::string diagram_text(const CylinderDiagram& d) {
  std::ostringstream out;
  auto word = [&](const std::vector<Occ>& w) {
    for (int i = 0; i < (int)w.size(); ++i) {
      if (i) out << ' ';
      out << 'e' << (w[i].edge + 1);
      if (w[i].rev) out << '\'';
    }
  };
  for (int i = 0; i < (int)d.cyls.size(); ++i) {
    if (i) out << '\n';
    out << "top: ";
    word(d.cyls[i].top);
    out << " | bottom: ";
    word(d.cyls[i].bottom);
    out << " ; a=" << d.cyls[i].height;
  }
  return out.str();
}

CylinderDiagram parse_diagram(const std::string& text) {
  CylinderDiagram d;
  std::istringstream in(text);
  std::string line;
  static const std::regex line_re(
      R"(\s*top:\s*([^|]*)\|\s*bottom:\s*([^;]*);\s*a\s*=\s*(\d+)\s*)");
  static const std::regex tok_re(R"(e(\d+)('?))");
  int max_edge = -1;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::smatch m;
    if (!std::regex_match(line, m, line_re))
      throw InvalidDiagram("bad diagram line: " + line);
    DiagramCylinder cyl;
    cyl.height = std::stoll(m[3]);
    for (int part = 1; part <= 2; ++part) {
      std::string w = m[part];
      auto beg = std::sregex_iterator(w.begin(), w.end(), tok_re);
      for (auto it = beg; it != std::sregex_iterator(); ++it) {
        int e = std::stoi((*it)[1]) - 1;
        if (e < 0) throw InvalidDiagram("edge ids are 1-based");
        max_edge = std::max(max_edge, e);
        (part == 1 ? cyl.top : cyl.bottom).push_back(Occ{e, (*it)[2].length() > 0});
      }
      std::string leftover = std::regex_replace(w, tok_re, "");
      if (leftover.find_first_not_of(" \t") != std::string::npos)
        throw InvalidDiagram("unparsed tokens in: " + w);
    }
    if (cyl.top.empty() || cyl.bottom.empty())
      throw InvalidDiagram("empty base word");
    d.cyls.push_back(std::move(cyl));
  }
  if (d.cyls.empty()) throw InvalidDiagram("empty diagram text");
  d.n_edges = max_edge + 1;
  std::vector<int> seen(d.n_edges, 0);
  for (const auto& c : d.cyls) {
    for (const auto& o : c.bottom) ++seen[o.edge];
    for (const auto& o : c.top) ++seen[o.edge];
  }
  for (int e = 0; e < d.n_edges; ++e)
    if (seen[e] != 2) throw InvalidDiagram("each edge must occur exactly twice");
  return d;
}

// ---------------------------------------------------------------------------
// canonical code and self-maps

CylinderDiagram transform_diagram(const CylinderDiagram& d, DiagramMap& g,
                                  const CylinderParams* p_in, CylinderParams* p_out) {
  int k = (int)d.cyls.size();
  std::vector<DiagramCylinder> work = d.cyls;
  std::vector<long long> twist;
  if (p_in) twist = p_in->twist;
  for (int j = 0; j < k; ++j) {
    if (!g.flip[j]) continue;
    auto& c = work[j];
    std::swap(c.bottom, c.top);
    // the flipped words read the old circles right to left
    std::reverse(c.bottom.begin(), c.bottom.end());
    std::reverse(c.top.begin(), c.top.end());
    for (auto& o : c.bottom) o.rev = !o.rev;
    for (auto& o : c.top) o.rev = !o.rev;
    // with this token convention the twist carries over unchanged
  }
  std::vector<DiagramCylinder> perm_work(k);
  std::vector<long long> perm_twist(k);
  for (int i = 0; i < k; ++i) {
    perm_work[i] = work[g.perm[i]];
    if (p_in) perm_twist[i] = twist[g.perm[i]];
  }
  for (int i = 0; i < k; ++i) {
    auto rot = [&](std::vector<Occ>& w, int r, int sign) {
      r = (int)floor_mod(r, (long long)w.size());
      if (p_in)
        for (int j = 0; j < r; ++j) perm_twist[i] += sign * p_in->width[w[j].edge];
      std::rotate(w.begin(), w.begin() + r, w.end());
    };
    rot(perm_work[i].bottom, g.rot_bottom[i], +1);
    rot(perm_work[i].top, g.rot_top[i], -1);
  }
  // relabel edges by first appearance; first appearances read forward
  CylinderDiagram out;
  out.cyls = std::move(perm_work);
  g.edge_map.assign(d.n_edges, -1);
  std::vector<uint8_t> dirflip(d.n_edges, 0);
  int next = 0;
  for (auto& c : out.cyls)
    for (auto* w : {&c.bottom, &c.top})
      for (auto& o : *w) {
        if (g.edge_map[o.edge] < 0) {
          g.edge_map[o.edge] = next++;
          dirflip[o.edge] = o.rev;
        }
        o.rev = o.rev ^ dirflip[o.edge];
      }
  for (auto& c : out.cyls)
    for (auto* w : {&c.bottom, &c.top})
      for (auto& o : *w) o.edge = g.edge_map[o.edge];
  out.n_edges = d.n_edges;
  if (p_in && p_out) {
    p_out->width.assign(d.n_edges, 0);
    for (int e = 0; e < d.n_edges; ++e) p_out->width[g.edge_map[e]] = p_in->width[e];
    p_out->twist = std::move(perm_twist);
    *p_out = normalize_twists(out, std::move(*p_out));
  }
  return out;
}

std::string diagram_serial(const CylinderDiagram& d) {
  std::ostringstream out;
  for (const auto& c : d.cyls) {
    out << 'c' << c.height << ':';
    for (const auto& o : c.bottom) out << o.edge << (o.rev ? "'" : "") << ',';
    out << '/';
    for (const auto& o : c.top) out << o.edge << (o.rev ? "'" : "") << ',';
    out << ';';
  }
  return out.str();
}

namespace {

template <class Fn>
void for_each_map(const CylinderDiagram& d, Fn&& fn) {
  int k = (int)d.cyls.size();
  std::vector<int> perm(k);
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    std::vector<uint8_t> flip(k);
    for (int j = 0; j < k; ++j) flip[j] = (mask >> j) & 1;
    std::iota(perm.begin(), perm.end(), 0);
    do {
      // word lengths after flip+permute
      std::vector<int> nb(k), nt(k);
      for (int i = 0; i < k; ++i) {
        const auto& c = d.cyls[perm[i]];
        nb[i] = (int)(flip[perm[i]] ? c.top : c.bottom).size();
        nt[i] = (int)(flip[perm[i]] ? c.bottom : c.top).size();
      }
      std::vector<int> rb(k, 0), rt(k, 0);
      while (true) {
        DiagramMap g;
        g.flip = flip;
        g.perm = perm;
        g.rot_bottom = rb;
        g.rot_top = rt;
        fn(g);
        int i = 0;
        for (; i < 2 * k; ++i) {
          auto& v = i < k ? rb : rt;
          auto& lim = i < k ? nb : nt;
          int j = i % k;
          if (++v[j] < lim[j]) break;
          v[j] = 0;
        }
        if (i == 2 * k) break;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
}

}  // namespace

std::string diagram_canonical_code(const CylinderDiagram& d) {
  std::string best;
  for_each_map(d, [&](DiagramMap g) {
    std::string s = diagram_serial(transform_diagram(d, g, nullptr, nullptr));
    if (best.empty() || s < best) best = std::move(s);
  });
  return best;
}

CylinderDiagram canonicalize_diagram(const CylinderDiagram& d) {
  std::string best;
  CylinderDiagram bestd;
  for_each_map(d, [&](DiagramMap g) {
    CylinderDiagram t = transform_diagram(d, g, nullptr, nullptr);
    std::string s = diagram_serial(t);
    if (best.empty() || s < best) {
      best = std::move(s);
      bestd = std::move(t);
    }
  });
  return bestd;
}

std::vector<DiagramMap> diagram_automorphisms(const CylinderDiagram& d) {
  std::string self = diagram_serial(d);
  std::vector<DiagramMap> auts;
  for_each_map(d, [&](DiagramMap g) {
    DiagramMap gg = g;
    if (diagram_serial(transform_diagram(d, gg, nullptr, nullptr)) == self)
      auts.push_back(std::move(gg));
  });
  return auts;
}

CylinderParams apply_map_params(const CylinderDiagram& d, const DiagramMap& g,
                                const CylinderParams& p) {
  DiagramMap gg = g;
  CylinderParams out;
  transform_diagram(d, gg, &p, &out);
  return out;
}

}  // namespace sqt
