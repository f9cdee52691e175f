#include "sqtile/component.hpp"

#include <algorithm>
#include <map>
#include <random>

namespace sqt {

namespace {

struct Perms {
  std::vector<int> h, hi, v, vi;  // right/left/up/down neighbors
};

Perms translation_perms(const SquareTiledSurface& q) {
  auto t = translation_normal_form(q);
  if (!t) throw Error("operation requires eps=1");
  Perms p;
  p.h.resize(t->n);
  p.hi.resize(t->n);
  p.v.resize(t->n);
  p.vi.resize(t->n);
  for (int s = 0; s < t->n; ++s) {
    p.h[s] = SquareTiledSurface::square_of(t->partner[SquareTiledSurface::slot(s, R)]);
    p.v[s] = SquareTiledSurface::square_of(t->partner[SquareTiledSurface::slot(s, T)]);
  }
  for (int s = 0; s < t->n; ++s) {
    p.hi[p.h[s]] = s;
    p.vi[p.v[s]] = s;
  }
  return p;
}

int surface_genus(const SquareTiledSurface& q) { return singularity_profile(q).genus; }

}  // namespace

bool is_hyperelliptic(const SquareTiledSurface& q) {
  Perms p = translation_perms(q);
  int n = (int)p.h.size();
  int g = surface_genus(q);
  // corner cycles of a translation presentation for the vertex action
  auto t = translation_normal_form(q);
  SingularityProfile prof = singularity_profile(*t);
  std::vector<int> cyc_of(4 * n, -1);
  for (int c = 0; c < (int)prof.cycles.size(); ++c)
    for (int corner : prof.cycles[c]) cyc_of[corner] = c;

  for (int j = 0; j < n; ++j) {
    std::vector<int> sig(n, -1);
    sig[0] = j;
    std::vector<int> stack{0};
    bool ok = true;
    while (ok && !stack.empty()) {
      int i = stack.back();
      stack.pop_back();
      int pairs[2][2] = {{p.h[i], p.hi[sig[i]]}, {p.v[i], p.vi[sig[i]]}};
      for (auto& pr : pairs) {
        if (sig[pr[0]] == -1) {
          sig[pr[0]] = pr[1];
          stack.push_back(pr[0]);
        } else if (sig[pr[0]] != pr[1]) {
          ok = false;
          break;
        }
      }
    }
    if (!ok) continue;
    for (int i = 0; i < n && ok; ++i) ok = sig[i] >= 0 && sig[sig[i]] == i;
    if (!ok) continue;
    // fixed points of the 180-degree involution: square centers, edge
    // midpoints, and vertices; hyperelliptic iff exactly 2g+2 of them
    int fixed = 0;
    for (int i = 0; i < n; ++i) {
      if (sig[i] == i) ++fixed;
      if (sig[i] == p.h[i]) ++fixed;
      if (sig[i] == p.v[i]) ++fixed;
    }
    for (int c = 0; c < (int)prof.cycles.size(); ++c) {
      int corner = prof.cycles[c][0];
      int image = 4 * sig[corner / 4] + (corner % 4 + 2) % 4;
      if (cyc_of[image] == c) ++fixed;
    }
    if (fixed == 2 * g + 2) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// spin parity via the Arf invariant

namespace {

// A closed walk through square centers using only right/up steps; such walks
// have turning number zero, so their quadratic form value is 1 plus the
// number of self-crossings.
struct Walk {
  std::vector<std::pair<int, int>> steps;  // (square, dir): 0 = right, 1 = up
};

struct ArfMachine {
  const Perms& p;
  int n;
  std::vector<Walk> walks;
  // strand ranks per directed edge key (the slot the step exits through)
  std::map<int, int> edge_count;
  struct Pass {
    int curve;
    double a, b;  // boundary parameters of the chord endpoints
  };
  std::vector<std::vector<Pass>> passes;  // per square

  explicit ArfMachine(const Perms& pp, int nn) : p(pp), n(nn), passes(nn) {}

  static double param(Side s, double t) {
    switch (s) {
      case B: return t;
      case R: return 1 + t;
      case T: return 3 - t;
      default: return 4 - t;  // L
    }
  }

  void add(const Walk& w) {
    int id = (int)walks.size();
    walks.push_back(w);
    int m = (int)w.steps.size();
    // rank every edge crossing of this walk; ranks are shared between the two
    // sides of an edge, so positions are globally consistent
    std::vector<double> tpos(m);
    for (int k = 0; k < m; ++k) {
      auto [s, d] = w.steps[k];
      int key = SquareTiledSurface::slot(s, d == 0 ? R : T);
      int r = edge_count[key]++;
      tpos[k] = 1.0 - 1.0 / (r + 2.0);  // strictly increasing in r, in (0,1)
    }
    for (int k = 0; k < m; ++k) {
      auto [s, d] = w.steps[k];
      auto [sp, dp] = w.steps[(k + m - 1) % m];
      (void)sp;
      // chord inside square s: entry from the previous step, exit by step k
      Side in = dp == 0 ? L : B;
      Side out = d == 0 ? R : T;
      passes[s].push_back(Pass{id, param(in, tpos[(k + m - 1) % m]), param(out, tpos[k])});
    }
  }

  // crossing parity of all chord pairs of curves i and j (i may equal j)
  int crossings(int i, int j) const {
    int total = 0;
    for (int s = 0; s < n; ++s) {
      const auto& ps = passes[s];
      for (size_t x = 0; x < ps.size(); ++x)
        for (size_t y = i == j ? x + 1 : 0; y < ps.size(); ++y) {
          if (ps[x].curve != i || ps[y].curve != j) continue;
          if (i == j && x == y) continue;
          double lo = std::min(ps[x].a, ps[x].b), hi = std::max(ps[x].a, ps[x].b);
          bool in1 = lo < ps[y].a && ps[y].a < hi;
          bool in2 = lo < ps[y].b && ps[y].b < hi;
          total += in1 != in2;
        }
    }
    return total & 1;
  }
};

int try_arf(const ArfMachine& mach, int* pairs_found) {
  int m = (int)mach.walks.size();
  std::vector<std::vector<uint8_t>> G(m, std::vector<uint8_t>(m, 0));
  std::vector<uint8_t> qv(m);
  for (int i = 0; i < m; ++i) {
    qv[i] = (uint8_t)((1 + mach.crossings(i, i)) & 1);
    for (int j = i + 1; j < m; ++j) G[i][j] = G[j][i] = (uint8_t)mach.crossings(i, j);
  }
  std::vector<int> active(m);
  for (int i = 0; i < m; ++i) active[i] = i;
  int arf = 0, pairs = 0;
  while (true) {
    int x = -1, y = -1;
    for (size_t a = 0; a < active.size() && x < 0; ++a)
      for (size_t b = a + 1; b < active.size(); ++b)
        if (G[active[a]][active[b]]) {
          x = active[a];
          y = active[b];
          break;
        }
    if (x < 0) break;
    arf ^= qv[x] & qv[y];
    ++pairs;
    active.erase(std::remove(active.begin(), active.end(), x), active.end());
    active.erase(std::remove(active.begin(), active.end(), y), active.end());
    // make the rest orthogonal to the split-off pair
    std::vector<uint8_t> ax(active.size()), bx(active.size());
    for (size_t i = 0; i < active.size(); ++i) {
      ax[i] = G[active[i]][y];  // coefficient of x added to active[i]
      bx[i] = G[active[i]][x];  // coefficient of y
    }
    auto snapshot = G;
    for (size_t i = 0; i < active.size(); ++i) {
      int z = active[i];
      qv[z] = (uint8_t)((qv[z] ^ (ax[i] & qv[x]) ^ (bx[i] & qv[y]) ^ (ax[i] & bx[i])) & 1);
      for (size_t j = i + 1; j < active.size(); ++j) {
        int w = active[j];
        uint8_t val = snapshot[z][w];
        val ^= ax[i] & snapshot[x][w];
        val ^= bx[i] & snapshot[y][w];
        val ^= ax[j] & snapshot[z][x];
        val ^= bx[j] & snapshot[z][y];
        val ^= ax[i] & bx[j] & snapshot[x][y];
        val ^= bx[i] & ax[j] & snapshot[y][x];
        G[z][w] = G[w][z] = (uint8_t)(val & 1);
      }
    }
  }
  *pairs_found = pairs;
  return arf;
}

}  // namespace

int spin_parity(const SquareTiledSurface& q) {
  SingularityProfile prof = singularity_profile(q);
  for (int o : prof.orders)
    if (o != 0 && o % 4 != 0) throw Error("spin parity needs orders divisible by 4");
  Perms p = translation_perms(q);
  int n = (int)p.h.size();
  int g = prof.genus;
  if (g == 0) throw Error("spin parity needs genus >= 1");

  ArfMachine mach(p, n);
  auto add_cycles = [&](const std::vector<int>& f, int dir) {
    std::vector<char> seen(n, 0);
    for (int s0 = 0; s0 < n; ++s0) {
      if (seen[s0]) continue;
      Walk w;
      int s = s0;
      do {
        seen[s] = 1;
        w.steps.push_back({s, dir});
        s = f[s];
      } while (s != s0);
      mach.add(w);
    }
  };
  add_cycles(p.h, 0);
  add_cycles(p.v, 1);
  int pairs = 0;
  int arf = try_arf(mach, &pairs);
  std::mt19937 rng(0x5eed);
  for (int attempt = 0; pairs < g && attempt < 4000; ++attempt) {
    int s0 = (int)(rng() % n);
    Walk w;
    int s = s0;
    for (int len = 0; len < 16 * n + 8; ++len) {
      int d = (int)(rng() & 1);
      w.steps.push_back({s, d});
      s = d == 0 ? p.h[s] : p.v[s];
      if (s == s0) break;
    }
    if (s != s0) continue;
    mach.add(w);
    arf = try_arf(mach, &pairs);
  }
  if (pairs != g) throw Error("spin parity: curve search failed to span homology");
  return arf;
}

// ---------------------------------------------------------------------------
// component tables

std::vector<std::string> stratum_components(const Stratum& s) {
  std::vector<int> orders = s.nonzero_orders();
  std::sort(orders.begin(), orders.end());
  int g = s.genus();
  if (s.eps == 0) {
    if (g <= 1) return {"c"};
    throw UnclassifiedStratum("no component table for eps=0, genus " +
                              std::to_string(g));
  }
  for (int o : orders)
    if (o % 2 != 0) throw InvalidStratum("eps=1 orders must be even");
  if (g <= 2) return {"c"};
  bool single = orders == std::vector<int>{4 * g - 4};
  bool pair = orders == std::vector<int>{2 * g - 2, 2 * g - 2};
  if (g == 3) {
    if (single || pair) return {"hyp", "odd"};
    return {"c"};
  }
  bool all_even = std::all_of(orders.begin(), orders.end(),
                              [](int o) { return o % 4 == 0; });
  if (all_even) {
    if (single || pair) return {"hyp", "even", "odd"};
    return {"even", "odd"};
  }
  if (single || pair) return {"hyp", "nonhyp"};
  return {"c"};
}

bool stratum_classified(const Stratum& s) {
  try {
    stratum_components(s);
    return true;
  } catch (const UnclassifiedStratum&) {
    return false;
  }
}

std::string component_of(const SquareTiledSurface& q) {
  SingularityProfile prof = singularity_profile(q);
  std::vector<int> sigma = prof.nonzero_orders();
  if (sigma.empty()) sigma = {0};
  Stratum st(sigma, epsilon(q));
  auto comps = stratum_components(st);
  if (comps == std::vector<std::string>{"c"}) return "c";
  if (is_hyperelliptic(q)) return "hyp";
  bool all_even = std::all_of(sigma.begin(), sigma.end(),
                              [](int o) { return o % 4 == 0; });
  if (all_even) return spin_parity(q) ? "odd" : "even";
  return "nonhyp";
}

}  // namespace sqt
