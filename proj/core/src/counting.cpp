#include "sqtile/counting.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace sqt {

namespace {

// ---------------------------------------------------------------------------
// Census: depth-first generation of breadth-first-labeled gluings. Squares are
// discovered in BFS order through straight (translation) gluings, so every
// class is produced once per (seed, flip) choice and kept iff the as-built
// labeling realizes the canonical code.

struct CExit {
  Side side;
  int pos;
};
constexpr CExit kExit[4] = {{L, 0}, {B, 1}, {R, 1}, {T, 0}};  // BL BR TR TL
constexpr CExit kArr[4] = {{B, 0}, {R, 0}, {T, 1}, {L, 1}};
constexpr int kExitCornerOfSide[4] = {TR, BL, TL, BR};  // R L T B

int arrive_corner(Side s, int pos) {
  switch (s) {
    case R: return pos ? TR : BR;
    case L: return pos ? TL : BL;
    case T: return pos ? TR : TL;
    default: return pos ? BR : BL;
  }
}

struct GenState {
  std::vector<int> partner;
  std::vector<uint8_t> rot;
  int t = 1;
  std::vector<int> closed_nonreg;
  // alternate (start, flip) seeds not yet proven to give a larger code than
  // the identity seed; seeds proven larger are dropped for the whole subtree
  std::vector<std::pair<int, int>> alive{{0, 1}};
  // union-find with parity over squares for the sign-constraint graph
  // (translation = equal, rotation = opposite), used when eps must be 1
  std::vector<int> dsu_parent{0};
  std::vector<uint8_t> dsu_parity{0};

  std::pair<int, int> dsu_find(int x) const {
    int par = 0;
    while (dsu_parent[x] != x) {
      par ^= dsu_parity[x];
      x = dsu_parent[x];
    }
    return {x, par};
  }
};

struct GenConfig {
  int cap = 1;
  bool restrict_len = false;
  bool need_eps1 = false;  // prune gluings that force eps = 0
  std::vector<int> allow;  // sorted multiset of allowed non-regular lengths
  int max_len = 1 << 28;
  // upper bound on regular (length-4) corner cycles: a stratum surface with n
  // squares has n + 2 - 2g - s vertices of which s are singular
  int max_regular = 1 << 28;
};

int fstep(const GenState& g, int c) {
  CExit e = kExit[c % 4];
  int s = 4 * (c / 4) + (int)e.side;
  int p = g.partner[s];
  if (p < 0) return -1;
  int pos = g.rot[s] ? 1 - e.pos : e.pos;
  return 4 * (p / 4) + arrive_corner((Side)(p % 4), pos);
}

int bstep(const GenState& g, int c) {
  CExit a = kArr[c % 4];
  int s = 4 * (c / 4) + (int)a.side;
  int p = g.partner[s];
  if (p < 0) return -1;
  return 4 * (p / 4) + kExitCornerOfSide[p % 4];
}

struct Trace {
  bool closed = false;
  int len = 0;
  int min_corner = 0;
};

Trace trace_path(const GenState& g, int c0, int cap_steps) {
  Trace tr;
  tr.min_corner = c0;
  int c = c0, steps = 0;
  while (steps <= cap_steps) {
    int p = bstep(g, c);
    if (p < 0) break;
    c = p;
    ++steps;
    if (c == c0) {
      tr.closed = true;
      tr.len = steps;
      int mc = c0, x = c0;
      for (int i = 0; i < steps; ++i) {
        x = bstep(g, x);
        mc = std::min(mc, x);
      }
      tr.min_corner = mc;
      return tr;
    }
  }
  if (steps > cap_steps) {
    tr.len = steps;  // over cap; caller prunes
    return tr;
  }
  int start = c;
  tr.len = 1;
  c = start;
  while (tr.len <= cap_steps + 1) {
    int nx = fstep(g, c);
    if (nx < 0) break;
    c = nx;
    ++tr.len;
  }
  return tr;
}

class Census {
 public:
  GenConfig cfg;
  const CensusFilter* filter = nullptr;
  // leaf: trimmed surface + its canonical code bytes
  std::function<void(const SquareTiledSurface&, const std::string&)> leaf;

  void run_from(GenState& st) { dfs(st, 0); }

  // Expands the decision tree to a fixed depth; completed surfaces inside the
  // expansion are handed to `leaf` directly.
  void expand(GenState& st, int depth, int target, std::vector<GenState>& out) {
    int cursor = advance(st, 0);
    if (cursor < 0) {
      finish(st);
      return;
    }
    if (depth == target) {
      out.push_back(st);
      return;
    }
    for_each_choice(st, cursor, [&](GenState& next) { expand(next, depth + 1, target, out); });
  }

 private:
  int advance(const GenState& st, int cursor) const {
    int end = 4 * st.t;
    while (cursor < end && st.partner[cursor] >= 0) ++cursor;
    return cursor == end ? -1 : cursor;
  }

  // Applies one gluing choice in place, runs f, and restores the state.
  template <class F>
  void for_each_choice(GenState& st, int cursor, F&& f) {
    Side sd = (Side)(cursor % 4);
    auto attempt = [&](int cand, int kind, bool new_square) {
      int old_t = st.t;
      size_t nr = st.closed_nonreg.size();
      auto alive_snapshot = st.alive;
      auto dsu_parent_snapshot = st.dsu_parent;
      auto dsu_parity_snapshot = st.dsu_parity;
      if (new_square) {
        ++st.t;
        st.partner.resize(4 * st.t, -1);
        st.rot.resize(4 * st.t, 0);
        st.alive.emplace_back(st.t - 1, 0);
        st.alive.emplace_back(st.t - 1, 1);
        st.dsu_parent.push_back(st.t - 1);
        st.dsu_parity.push_back(0);
      }
      if (glue_checked(st, cursor, cand, kind)) f(st);
      st.partner[cursor] = -1;
      st.partner[cand] = -1;
      st.closed_nonreg.resize(nr);
      st.alive = std::move(alive_snapshot);
      st.dsu_parent = std::move(dsu_parent_snapshot);
      st.dsu_parity = std::move(dsu_parity_snapshot);
      if (new_square) {
        st.t = old_t;
        st.partner.resize(4 * old_t);
        st.rot.resize(4 * old_t);
      }
    };
    if (st.t < cfg.cap) attempt(4 * st.t + (int)opposite(sd), 0, true);
    for (int j = 0; j < st.t; ++j) {
      for (int kind = 0; kind < 2; ++kind) {
        Side s2 = kind == 0 ? opposite(sd) : sd;
        int cand = 4 * j + (int)s2;
        if (cand == cursor || st.partner[cand] >= 0) continue;
        attempt(cand, kind, false);
      }
    }
  }

  void dfs(GenState& st, int cursor) {
    cursor = advance(st, cursor);
    if (cursor < 0) {
      finish(st);
      return;
    }
    for_each_choice(st, cursor, [&](GenState& next) { dfs(next, cursor); });
  }

  bool glue_checked(GenState& st, int s1, int s2, int rot) {
    st.partner[s1] = s2;
    st.partner[s2] = s1;
    st.rot[s1] = st.rot[s2] = (uint8_t)rot;
    if (cfg.need_eps1) {
      auto [ra, pa] = st.dsu_find(s1 / 4);
      auto [rb, pb] = st.dsu_find(s2 / 4);
      if (ra == rb) {
        if ((pa ^ pb) != rot) return false;
      } else {
        st.dsu_parent[ra] = rb;
        st.dsu_parity[ra] = (uint8_t)(pa ^ pb ^ rot);
      }
    }
    if (cfg.restrict_len) {
      if (!stratum_scan_ok(st)) return false;
    } else {
      int cap_steps = 4 * cfg.cap + 1;
      int crossings[2] = {4 * (s1 / 4) + kExitCornerOfSide[s1 % 4],
                          4 * (s2 / 4) + kExitCornerOfSide[s2 % 4]};
      int seen_cycle = -1;
      for (int c : crossings) {
        Trace tr = trace_path(st, c, cap_steps);
        if (tr.closed) {
          if (tr.len % 2) return false;
          if (tr.min_corner == seen_cycle) continue;
          seen_cycle = tr.min_corner;
        }
      }
    }
    return !partial_reject(st);
  }

  // Full corner-path scan for stratum-filtered runs. Closed cycles must be a
  // sub-multiset of {4, 4, ...} + allowed singular lengths; every open path
  // ends up inside exactly one final cycle, so the open paths must pack into
  // one bin per unused singular length (capacity = that length) plus
  // unlimited bins of capacity 4.
  bool stratum_scan_ok(const GenState& st) const {
    int total = 4 * st.t;
    static thread_local std::vector<uint8_t> seen;
    static thread_local std::vector<int> closed_nonreg, open_long, bins;
    seen.assign(total, 0);
    closed_nonreg.clear();
    open_long.clear();
    int regular = 0;
    for (int c0 = 0; c0 < total; ++c0) {
      if (seen[c0]) continue;
      int c = c0;
      bool cyc = false;
      while (true) {
        int p = bstep(st, c);
        if (p < 0) break;
        c = p;
        if (c == c0) {
          cyc = true;
          break;
        }
      }
      int len = 0, x = c;  // c = path start, or c0 for a cycle
      while (!seen[x]) {
        seen[x] = 1;
        ++len;
        int nx = fstep(st, x);
        if (nx < 0) break;
        x = nx;
      }
      if (cyc) {
        if (len % 2) return false;
        if (len != 4) closed_nonreg.push_back(len);
        else if (++regular > cfg.max_regular) return false;
      } else if (len > 4) {
        open_long.push_back(len);
      }
    }
    // closed non-regular cycles must fit the allowed multiset exactly
    bins.assign(cfg.allow.begin(), cfg.allow.end());
    for (int len : closed_nonreg) {
      auto it = std::find(bins.begin(), bins.end(), len);
      if (it == bins.end()) return false;
      *it = 0;  // slot consumed
    }
    bins.erase(std::remove(bins.begin(), bins.end(), 0), bins.end());
    std::sort(open_long.begin(), open_long.end(), std::greater<int>());
    return pack(0, open_long, bins);
  }

  // Can the open path lengths (sorted descending) be packed into the bins?
  static bool pack(size_t i, const std::vector<int>& items, std::vector<int>& bins) {
    if (i == items.size()) return true;
    for (auto& b : bins) {
      if (b < items[i]) continue;
      b -= items[i];
      if (pack(i + 1, items, bins)) {
        b += items[i];
        return true;
      }
      b += items[i];
    }
    return false;
  }

  // Compares the code of seed (start, f) against the identity seed's code on
  // the glued part of the surface. Entries of a seed's code are final up to
  // its first unglued slot, so a strict difference there survives any
  // completion: -1 = seed is smaller (branch cannot be canonical), +1 = seed
  // is larger (seed is dead for the whole subtree), 0 = undecided.
  int seed_compare(const GenState& st, int start, int f) const {
    static thread_local std::vector<int> label, order;
    static thread_local std::vector<uint8_t> flip;
    label.assign(st.t, -1);
    flip.assign(st.t, 0);
    order.clear();
    label[start] = 0;
    flip[start] = (uint8_t)f;
    order.push_back(start);
    int p = 0;
    for (size_t qi = 0; qi < order.size(); ++qi) {
      int i = order[qi];
      for (int sv = 0; sv < 4; ++sv, ++p) {
        int idp = st.partner[p];  // identity entry at position p is slot p
        Side actual = flip[i] ? opposite((Side)sv) : (Side)sv;
        int slot = 4 * i + (int)actual;
        int ap = st.partner[slot];
        if (ap < 0 || idp < 0) return 0;
        int j = ap / 4;
        Side pside = (Side)(ap % 4);
        if (label[j] == -1) {
          flip[j] = (uint8_t)(st.rot[slot] ^ flip[i]);
          label[j] = (int)order.size();
          order.push_back(j);
        }
        int a0 = label[j];
        int a1 = (int)(flip[j] ? opposite(pside) : pside);
        int a2 = st.rot[slot] ^ flip[i] ^ flip[j];
        int b0 = idp / 4, b1 = idp % 4, b2 = st.rot[p];
        if (a0 != b0 || a1 != b1 || a2 != b2)
          return std::tie(a0, a1, a2) < std::tie(b0, b1, b2) ? -1 : 1;
      }
    }
    return 0;  // full prefix agreed; completions may still differ
  }

  // Rechecks the still-alive alternate seeds, dropping the ones now proven
  // larger; true when some seed is proven smaller.
  bool partial_reject(GenState& st) const {
    size_t keep = 0;
    bool reject = false;
    for (size_t i = 0; i < st.alive.size(); ++i) {
      int c = reject ? 1 : seed_compare(st, st.alive[i].first, st.alive[i].second);
      if (c < 0) reject = true;
      if (c == 0) st.alive[keep++] = st.alive[i];
    }
    st.alive.resize(keep);
    return reject;
  }

  void finish(GenState& st) {
    SquareTiledSurface q;
    q.n = st.t;
    q.partner.assign(st.partner.begin(), st.partner.begin() + 4 * st.t);
    q.rot.assign(st.rot.begin(), st.rot.begin() + 4 * st.t);
    if (filter && filter->stratum) {
      const Stratum& s = *filter->stratum;
      auto prof = singularity_profile(q);
      auto nz = prof.nonzero_orders();
      auto want = s.nonzero_orders();
      std::sort(nz.begin(), nz.end());
      std::sort(want.begin(), want.end());
      if (nz != want || prof.genus != s.genus() || epsilon(q) != s.eps) return;
    }
    // the alive-seed bookkeeping already rejected any branch whose identity
    // code is beaten by another seed, so every surviving leaf is canonical
    std::vector<int16_t> id;
    seed_code(q, 0, 0, id);
    std::string code;
    for (int16_t v : id) {
      code.push_back((char)(v & 0xff));
      code.push_back((char)((v >> 8) & 0xff));
    }
    if (filter && !filter->component.empty() && component_of(q) != filter->component)
      return;
    leaf(q, code);
  }

  // bfs_code of the identity seed, with early-exit comparison against every
  // other seed; mirrors the canonical_form traversal.
  static void seed_code(const SquareTiledSurface& q, int start, int flip0,
                        std::vector<int16_t>& code) {
    static thread_local std::vector<int> label;
    static thread_local std::vector<uint8_t> flip;
    static thread_local std::vector<int> order;
    label.assign(q.n, -1);
    flip.assign(q.n, 0);
    order.clear();
    label[start] = 0;
    flip[start] = (uint8_t)flip0;
    order.push_back(start);
    code.clear();
    code.push_back((int16_t)q.n);
    for (size_t qi = 0; qi < order.size(); ++qi) {
      int i = order[qi];
      for (int sv = 0; sv < 4; ++sv) {
        Side actual = flip[i] ? opposite((Side)sv) : (Side)sv;
        int slot = SquareTiledSurface::slot(i, actual);
        int p = q.partner[slot];
        int j = SquareTiledSurface::square_of(p);
        Side pside = SquareTiledSurface::side_of(p);
        if (label[j] == -1) {
          flip[j] = (uint8_t)(q.rot[slot] ^ flip[i]);
          label[j] = (int)order.size();
          order.push_back(j);
        }
        code.push_back((int16_t)label[j]);
        code.push_back((int16_t)(flip[j] ? opposite(pside) : pside));
        code.push_back((int16_t)(q.rot[slot] ^ flip[i] ^ flip[j]));
      }
    }
  }

};

struct CensusItem {
  int area;
  std::string code;
  SquareTiledSurface q;
};

void run_census(int Lmax, const CensusFilter& f, int jobs, bool ordered,
                const std::function<void(const SquareTiledSurface&)>& emit) {
  if (Lmax < 1) return;
  Census gen;
  gen.cfg.cap = Lmax;
  gen.filter = &f;
  if (f.stratum) {
    gen.cfg.restrict_len = true;
    gen.cfg.need_eps1 = f.stratum->eps == 1;
    gen.cfg.allow.clear();
    for (int s : f.stratum->nonzero_orders()) gen.cfg.allow.push_back(2 * s + 4);
    std::sort(gen.cfg.allow.begin(), gen.cfg.allow.end());
    gen.cfg.max_len = 4;
    for (int l : gen.cfg.allow) gen.cfg.max_len = std::max(gen.cfg.max_len, l);
    gen.cfg.max_regular =
        Lmax + 2 - 2 * f.stratum->genus() - (int)gen.cfg.allow.size();
  }

  GenState root;
  root.partner.assign(4, -1);
  root.rot.assign(4, 0);

  std::vector<CensusItem> pre;
  auto direct = [&](const SquareTiledSurface& q, const std::string& code) {
    if (ordered) {
      pre.push_back({q.n, code, q});
    } else {
      emit(q);
    }
  };

  std::vector<GenState> frontier;
  gen.leaf = direct;
  gen.expand(root, 0, 6, frontier);

  std::vector<std::vector<CensusItem>> shard(frontier.size());
  std::atomic<size_t> next{0};
  int nw = std::max(1, jobs);
  auto work = [&]() {
    Census w;
    w.cfg = gen.cfg;
    w.filter = &f;
    std::vector<CensusItem>* sink = nullptr;
    w.leaf = [&](const SquareTiledSurface& q, const std::string& code) {
      if (ordered) {
        sink->push_back({q.n, code, q});
      } else {
        emit(q);
      }
    };
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= frontier.size()) break;
      sink = &shard[i];
      GenState st = frontier[i];
      w.run_from(st);
    }
  };
  if (nw == 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    for (int i = 0; i < nw; ++i) threads.emplace_back(work);
    for (auto& th : threads) th.join();
  }

  if (ordered) {
    std::vector<CensusItem> all = std::move(pre);
    for (auto& s : shard)
      for (auto& it : s) all.push_back(std::move(it));
    std::sort(all.begin(), all.end(), [](const CensusItem& a, const CensusItem& b) {
      return std::tie(a.area, a.code) < std::tie(b.area, b.code);
    });
    for (const auto& it : all) emit(it.q);
  }
}

std::string type_key(const MultiCurveType& t) { return canonicalize(t).key(); }

}  // namespace

void census(int max_squares, const CensusFilter& f, int jobs, bool ordered,
            const std::function<void(const SquareTiledSurface&)>& emit) {
  run_census(max_squares, f, jobs, ordered, emit);
}

std::vector<long long> census_counts(int max_squares, const CensusFilter& f, int jobs) {
  std::vector<long long> counts(max_squares, 0);
  std::mutex mu;
  run_census(max_squares, f, jobs, false, [&](const SquareTiledSurface& q) {
    std::lock_guard<std::mutex> lk(mu);
    ++counts[q.n - 1];
  });
  return counts;
}

// ---------------------------------------------------------------------------
// Count series

namespace {
std::string csv_field(const std::string& s) {
  if (s.find(',') == std::string::npos && s.find('"') == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}
}  // namespace

std::string CountSeries::csv() const {
  std::ostringstream os;
  os << "L,count,engine,gamma1,gamma2,stratum,component\n";
  for (size_t i = 0; i < count.size(); ++i)
    os << (i + 1) << "," << count[i] << "," << csv_field(engine) << ","
       << csv_field(gamma1) << "," << csv_field(gamma2) << "," << csv_field(stratum)
       << "," << csv_field(component) << "\n";
  return os.str();
}

CountSeries sq_direct(const Stratum& st, const std::string& comp,
                      const MultiCurveType& gamma1, const MultiCurveType& gamma2,
                      int Lmax, int jobs, bool labeled) {
  std::string k1 = type_key(gamma1), k2 = type_key(gamma2);
  std::vector<long long> per(Lmax, 0);
  std::mutex mu;
  CensusFilter f{st, comp};
  run_census(Lmax, f, jobs, false, [&](const SquareTiledSurface& q) {
    if (type_key(vertical_core(q, labeled)) != k1) return;
    if (type_key(horizontal_core(q, labeled)) != k2) return;
    std::lock_guard<std::mutex> lk(mu);
    ++per[q.n - 1];
  });
  CountSeries s{"direct", k1, k2, st.str(), comp.empty() ? "*" : comp, {}};
  s.count.assign(Lmax, 0);
  long long acc = 0;
  for (int i = 0; i < Lmax; ++i) s.count[i] = (acc += per[i]);
  return s;
}

CountSeries sq_star_census(const Stratum& st, const std::string& comp,
                           const MultiCurveType& gamma1, int Lmax, int jobs,
                           bool labeled) {
  std::string k1 = type_key(gamma1);
  std::vector<long long> per(Lmax, 0);
  std::mutex mu;
  CensusFilter f{st, comp};
  run_census(Lmax, f, jobs, false, [&](const SquareTiledSurface& q) {
    if (type_key(vertical_core(q, labeled)) != k1) return;
    std::lock_guard<std::mutex> lk(mu);
    ++per[q.n - 1];
  });
  CountSeries s{"census", k1, "*", st.str(), comp.empty() ? "*" : comp, {}};
  s.count.assign(Lmax, 0);
  long long acc = 0;
  for (int i = 0; i < Lmax; ++i) s.count[i] = (acc += per[i]);
  return s;
}

// ---------------------------------------------------------------------------
// Diagram enumeration and lattice counting

std::vector<CylinderDiagram> enumerate_diagrams(const Stratum& st, const std::string& comp,
                                                const MultiCurveType& gamma, int jobs) {
  std::string gkey = type_key(gamma);
  long long weight_sum = 0;
  for (const auto& e : gamma.edges) weight_sum += e.w;
  int v = std::max<int>(1, (int)st.nonzero_orders().size());
  int edges = 2 * st.genus() - 2 + v;
  long long A0 = weight_sum * 2 * edges;
  std::map<std::string, CylinderDiagram> found;
  std::mutex mu;
  CensusFilter f{st, comp};
  run_census((int)A0, f, jobs, false, [&](const SquareTiledSurface& q) {
    Decomposition dec = decompose(q);
    if (type_key(core_type(q, dec)) != gkey) return;
    CylinderDiagram canon = canonicalize_diagram(dec.dia);
    std::string code = diagram_canonical_code(canon);
    std::lock_guard<std::mutex> lk(mu);
    found.emplace(std::move(code), std::move(canon));
  });
  std::vector<CylinderDiagram> out;
  for (auto& [code, d] : found) out.push_back(std::move(d));
  return out;
}

namespace {

std::vector<long long> base_widths(const CylinderDiagram& d,
                                   const std::vector<long long>& w) {
  std::vector<long long> b(d.cyls.size(), 0);
  for (size_t i = 0; i < d.cyls.size(); ++i)
    for (const auto& o : d.cyls[i].top) b[i] += w[o.edge];
  return b;
}

long long diagram_area(const CylinderDiagram& d, const std::vector<long long>& w) {
  auto b = base_widths(d, w);
  long long a = 0;
  for (size_t i = 0; i < d.cyls.size(); ++i) a += d.cyls[i].height * b[i];
  return a;
}

bool switch_ok(const CylinderDiagram& d, const std::vector<long long>& w) {
  for (const auto& c : d.cyls) {
    long long top = 0, bot = 0;
    for (const auto& o : c.top) top += w[o.edge];
    for (const auto& o : c.bottom) bot += w[o.edge];
    if (top != bot) return false;
  }
  return true;
}

template <class F>
void each_width_vector(const CylinderDiagram& d, long long Lmax, F&& f) {
  int E = d.n_edges;
  std::vector<long long> w(E, 0);
  std::function<void(int, long long)> rec = [&](int e, long long used) {
    if (used + (E - e) > Lmax) return;  // Σ w_e <= Σ a_i b_i = area
    if (e == E) {
      if (switch_ok(d, w) && diagram_area(d, w) <= Lmax) f(w);
      return;
    }
    for (long long x = 1; used + x + (E - e - 1) <= Lmax; ++x) {
      w[e] = x;
      rec(e + 1, used + x);
    }
  };
  rec(0, 0);
}

long long floor_mod(long long a, long long m) { return ((a % m) + m) % m; }

// Number of Π-cycle-decoupled twist tuples fixed by g at fixed widths w.
long long fixed_twists(const CylinderDiagram& d, const DiagramMap& g,
                       const std::vector<long long>& w) {
  int k = (int)d.cyls.size();
  auto b = base_widths(d, w);
  CylinderParams base{w, b};  // twists b_i represent 0 in (0, b]
  CylinderParams out_base = apply_map_params(d, g, base);
  std::vector<int> pos_of_old(k);
  for (int i = 0; i < k; ++i) pos_of_old[g.perm[i]] = i;
  std::vector<long long> delta(k), sign(k, 1);
  for (int j = 0; j < k; ++j) {
    int i = pos_of_old[j];
    delta[j] = out_base.twist[i] % b[i];  // b -> 0
    if (b[j] >= 3) {
      CylinderParams probe = base;
      probe.twist[j] = 1;
      long long o = floor_mod(apply_map_params(d, g, probe).twist[i] - out_base.twist[i],
                              b[i]);
      sign[j] = (o == 1) ? 1 : -1;
    }
  }
  long long fix = 1;
  std::vector<char> done(k, 0);
  for (int i0 = 0; i0 < k; ++i0) {
    if (done[i0]) continue;
    long long A = 1, B = 0;
    int cur = i0;
    do {
      int j = g.perm[cur];
      B += A * delta[j];
      A *= sign[j];
      done[cur] = 1;
      cur = j;
    } while (cur != i0);
    long long bb = b[i0];
    long long cnt;
    if (A == 1) {
      cnt = floor_mod(B, bb) == 0 ? bb : 0;
    } else {
      long long g2 = bb % 2 == 0 ? 2 : 1;
      cnt = floor_mod(B, g2) == 0 ? g2 : 0;
    }
    if (cnt == 0) return 0;
    fix *= cnt;
  }
  return fix;
}

bool fixes_widths(const DiagramMap& g, const std::vector<long long>& w) {
  for (size_t e = 0; e < w.size(); ++e)
    if (w[g.edge_map[e]] != w[e]) return false;
  return true;
}

// Counts orbits of parameter tuples whose width vector lies in the G-orbit of
// w; returns 0 unless w is the lex-min representative of that orbit, so that
// summing over all width vectors counts every orbit exactly once.
long long orbit_count(const CylinderDiagram& d, const std::vector<DiagramMap>& G,
                      const std::vector<long long>& w) {
  std::vector<long long> img(w.size());
  for (const auto& g : G) {
    for (size_t e = 0; e < w.size(); ++e) img[g.edge_map[e]] = w[e];
    if (img < w) return 0;
  }
  long long total = 0, stab = 0;
  for (const auto& g : G) {
    if (!fixes_widths(g, w)) continue;
    ++stab;
    total += fixed_twists(d, g, w);
  }
  if (total % stab != 0) throw Error("orbit count is not integral");
  return total / stab;
}

}  // namespace

CountSeries sq_lattice(const Stratum& st, const std::string& comp,
                       const MultiCurveType& gamma1, int Lmax, int jobs) {
  auto diagrams = enumerate_diagrams(st, comp, gamma1, jobs);
  std::vector<long long> per(Lmax + 1, 0);
  std::mutex mu;
  std::atomic<size_t> next{0};
  auto work = [&]() {
    std::vector<long long> local(Lmax + 1, 0);
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= diagrams.size()) break;
      const auto& d = diagrams[i];
      auto G = diagram_automorphisms(d);
      each_width_vector(d, Lmax, [&](const std::vector<long long>& w) {
        local[diagram_area(d, w)] += orbit_count(d, G, w);
      });
    }
    std::lock_guard<std::mutex> lk(mu);
    for (int l = 0; l <= Lmax; ++l) per[l] += local[l];
  };
  int nw = std::max(1, jobs);
  if (nw == 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    for (int i = 0; i < nw; ++i) threads.emplace_back(work);
    for (auto& th : threads) th.join();
  }
  CountSeries s{"lattice", type_key(gamma1), "*", st.str(), comp.empty() ? "*" : comp, {}};
  s.count.assign(Lmax, 0);
  long long acc = 0;
  for (int l = 1; l <= Lmax; ++l) s.count[l - 1] = (acc += per[l]);
  return s;
}

// ---------------------------------------------------------------------------
// Volume engine

Rat diagram_symmetry_factor(const CylinderDiagram& d) {
  auto G = diagram_automorphisms(d);
  int E = d.n_edges, k = (int)d.cyls.size();
  // switch solution space, for the symbolic width-fixing test
  Polytope sys;
  sys.dim = E;
  for (const auto& c : d.cyls) {
    RatVec a(E, 0);
    for (const auto& o : c.top) a[o.edge] += 1;
    for (const auto& o : c.bottom) a[o.edge] -= 1;
    sys.eqs.push_back({std::move(a), 0});
  }
  Reduction red = reduce(sys);

  // generic integer probe widths in the cone
  std::vector<std::vector<long long>> probes;
  std::vector<std::vector<long long>> sols;
  for (long long bound = 2 * E; sols.size() < 2 && bound <= 16LL * E; bound *= 2) {
    sols.clear();
    each_width_vector(d, bound, [&](const std::vector<long long>& w) {
      if (sols.size() < 8) sols.push_back(w);
    });
  }
  if (sols.empty()) throw Error("diagram admits no integer widths");
  {
    std::vector<long long> p1 = sols[0], p2 = sols[0];
    for (auto& x : p1) x *= 3;
    const auto& other = sols.size() > 1 ? sols[1] : sols[0];
    for (size_t e = 0; e < p2.size(); ++e) p2[e] = 3 * p2[e] + 4 * other[e];
    probes.push_back(std::move(p1));
    probes.push_back(std::move(p2));
  }

  long long triv = 0;
  for (const auto& g : G) {
    bool ok = true;
    for (int i = 0; i < k && ok; ++i)
      if (g.perm[i] != i) ok = false;
    for (int e = 0; e < E && ok; ++e) {
      RatVec a(E, 0);
      a[g.edge_map[e]] += 1;
      a[e] -= 1;
      auto [ay, cy] = red.push(a, 0);
      for (const auto& x : ay)
        if (x != 0) ok = false;
      if (cy != 0) ok = false;
    }
    for (const auto& w : probes) {
      if (!ok) break;
      auto b = base_widths(d, w);
      for (int probe_kind = 0; probe_kind < 3 && ok; ++probe_kind) {
        CylinderParams p{w, b};
        if (probe_kind == 1)
          for (auto& s : p.twist) s = 1;
        if (probe_kind == 2)
          for (size_t i = 0; i < p.twist.size(); ++i) p.twist[i] = std::min<long long>(2, b[i]);
        if (!(apply_map_params(d, g, p) == p)) ok = false;
      }
    }
    if (ok) ++triv;
  }
  return Rat(triv, (long long)G.size());
}

Rat volume_constant(const Stratum& st, const std::string& comp,
                    const MultiCurveType& gamma, int jobs) {
  Rat v = 0;
  for (const auto& d : enumerate_diagrams(st, comp, gamma, jobs))
    v += diagram_symmetry_factor(d) * chart_volume(build_chart(d));
  return v;
}

// ---------------------------------------------------------------------------
// Cells

namespace {
Polytope slice_system(const TrainTrackChart& c) {
  Polytope p;
  p.dim = c.n_vars;
  p.eqs = c.switch_eqs;
  p.eqs.push_back({c.norm, 1});
  return p;
}
}  // namespace

Partition partition_chart(const TrainTrackChart& c, const Rat& delta) {
  if (delta <= 0 || delta > 1) throw Error("delta must be in (0,1]");
  Reduction r = reduce(slice_system(c));
  int nf = (int)r.free_vars.size();
  Partition out;
  out.lipschitz = 0;
  for (int j = 0; j < nf; ++j)
    for (int v = 0; v < c.n_vars; ++v)
      out.lipschitz += abs(r.basis[v][j]);
  Rat ratio = out.lipschitz / delta;
  long long m = (long long)numerator(ratio) / (long long)denominator(ratio);
  if (Rat(m) < ratio) ++m;
  m = std::max<long long>(1, m);
  out.grid_m = m;
  std::vector<long long> idx(nf, 0);
  while (true) {
    Cell u;
    for (int j = 0; j < nf; ++j) {
      u.vars.push_back(r.free_vars[j]);
      u.lo.push_back(Rat(idx[j], m));
      u.hi.push_back(Rat(idx[j] + 1, m));
    }
    if (!vertices(cell_slice(c, u)).empty()) out.cells.push_back(std::move(u));
    int j = 0;
    while (j < nf && idx[j] == m - 1) idx[j++] = 0;
    if (j == nf) break;
    ++idx[j];
  }
  return out;
}

Polytope cell_slice(const TrainTrackChart& c, const Cell& u) {
  Polytope p = slice_system(c);
  p.ineqs = c.cone;
  for (size_t j = 0; j < u.vars.size(); ++j) {
    RatVec lo(c.n_vars, 0), hi(c.n_vars, 0);
    lo[u.vars[j]] = -1;
    hi[u.vars[j]] = 1;
    p.ineqs.push_back({std::move(lo), -u.lo[j]});
    p.ineqs.push_back({std::move(hi), u.hi[j]});
  }
  return p;
}

Polytope cell_cone_unit(const TrainTrackChart& c, const Cell& u) {
  Polytope p;
  p.dim = c.n_vars;
  p.eqs = c.switch_eqs;
  p.ineqs = c.cone;
  for (size_t j = 0; j < u.vars.size(); ++j) {
    RatVec lo = c.norm, hi = c.norm;
    for (auto& x : lo) x *= u.lo[j];
    lo[u.vars[j]] -= 1;
    for (auto& x : hi) x *= -u.hi[j];
    hi[u.vars[j]] += 1;
    p.ineqs.push_back({std::move(lo), 0});
    p.ineqs.push_back({std::move(hi), 0});
  }
  p.ineqs.push_back({c.norm, 1});
  return p;
}

Rat cell_measure(const TrainTrackChart& c, const Cell& u) {
  Reduction r = reduce(cell_cone_unit(c, u));
  return volume(r.reduced);
}

std::pair<Rat, Rat> cell_area_extrema(const TrainTrackChart& c, const Cell& u) {
  return extrema(cell_slice(c, u), c.area, 0);
}

bool cell_contains(const TrainTrackChart& c, const Cell& u,
                   const std::vector<long long>& lambda) {
  long long N = 0;
  for (long long x : lambda) N += x;
  for (size_t j = 0; j < u.vars.size(); ++j) {
    Rat x(lambda[u.vars[j]]);
    if (!(u.lo[j] * N < x && x <= u.hi[j] * N)) return false;
  }
  return true;
}

std::vector<ChartPoint> chart_integer_points(const TrainTrackChart& c, long long max_norm1) {
  std::vector<ChartPoint> pts;
  int k = c.k;
  each_width_vector(c.dia, max_norm1, [&](const std::vector<long long>& w) {
    auto b = base_widths(c.dia, w);
    long long wsum = 0;
    for (long long x : w) wsum += x;
    long long area = 0;
    for (int i = 0; i < k; ++i) area += c.dia.cyls[i].height * b[i];
    std::vector<long long> u(k, 1);
    while (true) {
      long long norm = wsum;
      for (long long x : u) norm += x;
      if (norm <= max_norm1) {
        ChartPoint pt;
        pt.lambda = w;
        pt.lambda.insert(pt.lambda.end(), u.begin(), u.end());
        pt.norm1 = norm;
        pt.area = area;
        CylinderParams par{w, u};
        pt.vkey = type_key(vertical_core(reconstruct(c.dia, par)));
        pts.push_back(std::move(pt));
      }
      int i = 0;
      while (i < k && u[i] == b[i]) u[i++] = 1;
      if (i == k) break;
      ++u[i];
    }
  });
  return pts;
}

long long s_count(const TrainTrackChart& c, const std::vector<ChartPoint>& pts,
                  const Cell* u, const std::string& gamma1_key, long long L) {
  long long n = 0;
  for (const auto& p : pts)
    if (p.norm1 <= L && p.vkey == gamma1_key && (!u || cell_contains(c, *u, p.lambda)))
      ++n;
  return n;
}

long long sq_tt_count(const TrainTrackChart& c, const std::vector<ChartPoint>& pts,
                      const Cell* u, const std::string& gamma1_key, long long L) {
  long long n = 0;
  for (const auto& p : pts)
    if (p.area <= L && p.vkey == gamma1_key && (!u || cell_contains(c, *u, p.lambda)))
      ++n;
  return n;
}

// ---------------------------------------------------------------------------
// Fitting

FitResult fit_power_law(const CountSeries& s, int h) {
  int Lmax = (int)s.count.size();
  if (Lmax < 5) throw InsufficientData("need at least 5 points");
  int lo = Lmax / 10 + 1;  // largest decade (Lmax/10, Lmax]
  FitResult r;
  r.h = h;
  double num = 0, den = 0;
  for (int L = lo; L <= Lmax; ++L) {
    double Lh = std::pow((double)L, h);
    num += (double)s.count[L - 1] * Lh;
    den += Lh * Lh;
  }
  if (den == 0) throw InsufficientData("empty window");
  r.v_hat = num / den;
  // free log-log slope, over the last octave (Lmax/2, Lmax] where the
  // subleading term contaminates the least
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int np = 0;
  for (int L = Lmax / 2 + 1; L <= Lmax; ++L) {
    if (s.count[L - 1] <= 0) continue;
    double x = std::log((double)L), y = std::log((double)s.count[L - 1]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++np;
  }
  if (np >= 2) r.slope = (np * sxy - sx * sy) / (np * sxx - sx * sx);
  double rss = 0;
  int nw = 0;
  for (int L = lo; L <= Lmax; ++L) {
    double fitv = r.v_hat * std::pow((double)L, h);
    double res = (double)s.count[L - 1] - fitv;
    if (fitv > 0) {
      rss += (res / fitv) * (res / fitv);
      ++nw;
    }
  }
  if (nw > 0) r.resid_rms = std::sqrt(rss / nw);
  // empirical error exponent via dyadic differences: for count = v L^h + c
  // L^kappa the combination count(2L) - 2^h count(L) kills the leading term
  // and scales as L^kappa.
  sx = sy = sxx = sxy = 0;
  np = 0;
  for (int L = Lmax / 4 + 1; 2 * L <= Lmax; ++L) {
    double d = (double)s.count[2 * L - 1] - std::pow(2.0, h) * (double)s.count[L - 1];
    if (std::abs(d) < 1e-9) continue;
    double x = std::log((double)L), y = std::log(std::abs(d));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++np;
  }
  if (np >= 2) r.kappa_hat = (np * sxy - sx * sy) / (np * sxx - sx * sx);
  return r;
}

std::string FitResult::json() const {
  std::ostringstream os;
  os.precision(12);
  os << "{\"v_hat\":" << v_hat << ",\"h\":" << h << ",\"slope\":" << slope
     << ",\"kappa_hat\":" << kappa_hat << ",\"resid_rms\":" << resid_rms << "}";
  return os.str();
}

}  // namespace sqt
