#include "sqtile/counting.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "sqtile/cache.hpp"

#include "doctest.h"

using namespace sqt;

namespace {

SquareTiledSurface torus1() {
  SquareTiledSurface q;
  q.n = 1;
  q.partner.assign(4, -1);
  q.rot.assign(4, 0);
  q.glue(0, R, 0, L, false);
  q.glue(0, T, 0, B, false);
  return q;
}

// Three-square surface with one order-4 singularity (h = 3-cycle, v = 2-cycle).
SquareTiledSurface h2_origami() {
  return build_from_permutations({1, 2, 0}, {1, 0, 2});
}

SquareTiledSurface pillowcase4() {
  SquareTiledSurface q;
  q.n = 4;
  q.partner.assign(16, -1);
  q.rot.assign(16, 0);
  for (int i = 0; i < 4; ++i) q.glue(i, R, (i + 1) % 4, L, false);
  q.glue(0, B, 3, B, true);
  q.glue(1, B, 2, B, true);
  q.glue(0, T, 1, T, true);
  q.glue(2, T, 3, T, true);
  return q;
}

Stratum torus_stratum() { return Stratum({0}, 1); }

// Independent oracle for small n: every perfect matching of the 4n side slots
// with translation (opposite sides) or rotation (same side) gluings, deduped
// by canonical form.
long long brute_force_classes(int n) {
  std::set<std::string> classes;
  SquareTiledSurface q;
  q.n = n;
  q.partner.assign(4 * n, -1);
  q.rot.assign(4 * n, 0);
  std::function<void()> rec = [&]() {
    int s1 = 0;
    while (s1 < 4 * n && q.partner[s1] >= 0) ++s1;
    if (s1 == 4 * n) {
      auto rep = validate(q);
      if (rep.ok && rep.orientable) classes.insert(canonical_form(q));
      return;
    }
    for (int s2 = s1 + 1; s2 < 4 * n; ++s2) {
      if (q.partner[s2] >= 0) continue;
      Side a = SquareTiledSurface::side_of(s1), b = SquareTiledSurface::side_of(s2);
      int rot;
      if (b == opposite(a))
        rot = 0;
      else if (b == a)
        rot = 1;
      else
        continue;
      q.partner[s1] = s2;
      q.partner[s2] = s1;
      q.rot[s1] = q.rot[s2] = (uint8_t)rot;
      rec();
      q.partner[s1] = q.partner[s2] = -1;
      q.rot[s1] = q.rot[s2] = 0;
    }
  };
  rec();
  return (long long)classes.size();
}

}  // namespace

TEST_CASE("unrestricted census matches brute-force matching enumeration") {
  auto counts = census_counts(3, CensusFilter{}, 1);
  for (int n = 1; n <= 3; ++n) CHECK(counts[n - 1] == brute_force_classes(n));
}

TEST_CASE("genus-1 census counts are divisor sums") {
  CensusFilter f{torus_stratum(), ""};
  auto counts = census_counts(8, f, 1);
  std::vector<long long> oracle;
  for (int n = 1; n <= 8; ++n) {
    long long s = 0;
    for (int d = 1; d <= n; ++d)
      if (n % d == 0) s += d;
    oracle.push_back(s);
  }
  CHECK(counts == oracle);
  CHECK(oracle == std::vector<long long>{1, 3, 4, 7, 6, 12, 8, 15});
}

TEST_CASE("census stream is deterministic across job counts") {
  CensusFilter f{torus_stratum(), ""};
  auto collect = [&](int jobs) {
    std::vector<std::string> v;
    census(6, f, jobs, true, [&](const SquareTiledSurface& q) { v.push_back(encode(q)); });
    return v;
  };
  auto one = collect(1);
  CHECK(one.size() == 1 + 3 + 4 + 7 + 6 + 12);
  CHECK(collect(4) == one);
  // every emitted surface is canonical-unique
  std::set<std::string> codes;
  for (const auto& e : one) codes.insert(canonical_form(decode(e)));
  CHECK(codes.size() == one.size());
}

TEST_CASE("torus chart: volume, symmetry, exact constant") {
  auto gamma = horizontal_core(torus1());
  auto diagrams = enumerate_diagrams(torus_stratum(), "", gamma, 1);
  REQUIRE(diagrams.size() == 1);
  TrainTrackChart c = build_chart(diagrams[0]);
  CHECK(c.n_vars == 2);
  CHECK(c.h() == 2);
  CHECK(chart_volume(c) == Rat(1, 2));
  CHECK(chart_volume_by_integration(c) == Rat(1, 2));
  CHECK(diagram_symmetry_factor(diagrams[0]) == Rat(1));
  CHECK(volume_constant(torus_stratum(), "", gamma, 1) == Rat(1, 2));
}

TEST_CASE("torus lattice counts: closed form and engine equality") {
  auto gamma = horizontal_core(torus1());
  int L = 10;
  auto lat = sq_lattice(torus_stratum(), "", gamma, L, 1);
  for (int l = 1; l <= L; ++l) CHECK(lat.count[l - 1] == (long long)l * (l + 1) / 2);
  auto cen = sq_star_census(torus_stratum(), "", gamma, L, 1);
  CHECK(cen.count == lat.count);
}

TEST_CASE("engine equality in H(2) and Q(-1^4)") {
  {
    auto q = h2_origami();
    auto prof = singularity_profile(q);
    REQUIRE(prof.nonzero_orders() == std::vector<int>{4});
    auto gamma = horizontal_core(q);
    Stratum st({4}, 1);
    auto a = sq_star_census(st, "", gamma, 6, 2);
    auto b = sq_lattice(st, "", gamma, 6, 2);
    CHECK(a.count == b.count);
    CHECK(a.count.back() > 0);
  }
  {
    auto q = pillowcase4();
    auto gamma = horizontal_core(q);
    Stratum st({-1, -1, -1, -1}, 0);
    auto a = sq_star_census(st, "", gamma, 8, 2);
    auto b = sq_lattice(st, "", gamma, 8, 2);
    CHECK(a.count == b.count);
    CHECK(a.count.back() > 0);
  }
}

TEST_CASE("chart dimension identity for enumerated diagrams") {
  auto check_stratum = [&](const SquareTiledSurface& q, const Stratum& st) {
    auto gamma = horizontal_core(q);
    auto diagrams = enumerate_diagrams(st, "", gamma, 1);
    REQUIRE(!diagrams.empty());
    for (const auto& d : diagrams) {
      TrainTrackChart c = build_chart(d);
      // realize the diagram to read off genus, vertex count, and epsilon
      std::vector<long long> w;
      // smallest widths: all ones if admissible, otherwise search
      bool got = false;
      std::vector<ChartPoint> pts = chart_integer_points(c, 4 * c.n_vars);
      REQUIRE(!pts.empty());
      w.assign(pts[0].lambda.begin(), pts[0].lambda.begin() + d.n_edges);
      got = true;
      CHECK(got);
      std::vector<long long> tw(d.cyls.size(), 1);
      auto s = reconstruct(d, CylinderParams{w, tw});
      auto prof = singularity_profile(s);
      int vertices = (int)prof.cycles.size();
      CHECK(c.h() == 2 * prof.genus - 2 + vertices + epsilon(s));
    }
  };
  check_stratum(torus1(), torus_stratum());
  check_stratum(h2_origami(), Stratum({4}, 1));
  check_stratum(pillowcase4(), Stratum({-1, -1, -1, -1}, 0));
}

TEST_CASE("partition of the torus chart slice") {
  auto gamma = horizontal_core(torus1());
  auto diagrams = enumerate_diagrams(torus_stratum(), "", gamma, 1);
  TrainTrackChart c = build_chart(diagrams[0]);
  Partition p = partition_chart(c, Rat(1, 2));
  CHECK(p.lipschitz == Rat(2));
  CHECK(p.grid_m == 4);
  CHECK(p.cells.size() == 3);  // u/N in (0,1/4], (1/4,1/2], and the point 1/2

  // cell measures sum to the measure of {cone, |lambda|_1 <= 1}
  Rat total = 0;
  for (const auto& u : p.cells) total += cell_measure(c, u);
  CHECK(total == Rat(1, 4));

  // half-open cells partition the integer points of the cone
  auto pts = chart_integer_points(c, 40);
  CHECK(!pts.empty());
  for (const auto& pt : pts) {
    int hits = 0;
    for (const auto& u : p.cells)
      if (cell_contains(c, u, pt.lambda)) ++hits;
    CHECK(hits == 1);
  }
}

TEST_CASE("Riemann sums bracket the exact volume and shrink") {
  auto gamma = horizontal_core(torus1());
  auto diagrams = enumerate_diagrams(torus_stratum(), "", gamma, 1);
  TrainTrackChart c = build_chart(diagrams[0]);
  Rat v = chart_volume(c);
  int h = c.h();
  Rat prev_gap = -1;
  for (Rat delta : {Rat(1, 2), Rat(1, 4), Rat(1, 8)}) {
    Partition p = partition_chart(c, delta);
    Rat lower = 0, upper = 0;
    for (const auto& u : p.cells) {
      Rat mu = cell_measure(c, u);
      auto [mn, mx] = cell_area_extrema(c, u);
      REQUIRE(mn > 0);
      Rat mxp = mx, mnp = mn;
      Rat lo_term = mu, hi_term = mu;
      for (int i = 0; i < h; ++i) {
        lo_term /= mxp;
        hi_term /= mnp;
      }
      lower += lo_term;
      upper += hi_term;
    }
    CHECK(lower <= v);
    CHECK(v <= upper);
    Rat gap = upper - lower;
    if (prev_gap >= 0) CHECK(gap < prev_gap);
    prev_gap = gap;
  }
}

TEST_CASE("sandwich bounds on a cell") {
  auto gamma = horizontal_core(torus1());
  std::string gkey = canonicalize(gamma).key();
  auto diagrams = enumerate_diagrams(torus_stratum(), "", gamma, 1);
  TrainTrackChart c = build_chart(diagrams[0]);
  Partition p = partition_chart(c, Rat(1, 4));
  long long L = 24;
  auto pts = chart_integer_points(c, 2 * L);
  for (const auto& u : p.cells) {
    auto [mn, mx] = cell_area_extrema(c, u);
    REQUIRE(mn > 0);
    // floor(L / mx), floor(L / mn) as rationals
    auto rat_floor = [](const Rat& x) {
      return (long long)(numerator(x) / denominator(x));
    };
    long long lo = rat_floor(Rat(L) / mx), hi = rat_floor(Rat(L) / mn);
    long long mid = sq_tt_count(c, pts, &u, gkey, L);
    CHECK(s_count(c, pts, &u, gkey, lo) <= mid);
    CHECK(mid <= s_count(c, pts, &u, gkey, hi));
  }
}

TEST_CASE("power-law fit on synthetic data") {
  CountSeries s{"synthetic", "*", "*", "*", "*", {}};
  for (int L = 1; L <= 100; ++L) s.count.push_back(3LL * L * L * L * L);
  FitResult r = fit_power_law(s, 4);
  CHECK(r.v_hat == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(r.slope == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(r.resid_rms == doctest::Approx(0.0).epsilon(1e-12));

  CountSeries t = s;
  for (int L = 1; L <= 100; ++L) t.count[L - 1] += (long long)L * L;
  FitResult r2 = fit_power_law(t, 4);
  CHECK(r2.v_hat == doctest::Approx(3.0).epsilon(1e-3));
  CHECK(r2.kappa_hat == doctest::Approx(2.0).epsilon(0.15));

  CountSeries tiny{"synthetic", "*", "*", "*", "*", {1, 2, 3}};
  CHECK_THROWS_AS(fit_power_law(tiny, 2), InsufficientData);
}

TEST_CASE("census cache round-trips and validates") {
  CensusFilter f{torus_stratum(), ""};
  CensusCache c = build_cache(5, f, false, 1);
  CHECK(c.records.size() == 1 + 3 + 4 + 7 + 6);
  for (const auto& r : c.records) {
    CHECK(r.genus == 1);
    CHECK(r.eps == 1);
    CHECK(r.orders.empty());
    CHECK(r.code_hex == hex_code(canonical_form(r.q)));
  }

  std::ostringstream os;
  write_cache(os, c);
  std::istringstream is(os.str());
  CensusCache back = read_cache(is);
  REQUIRE(back.records.size() == c.records.size());
  for (size_t i = 0; i < c.records.size(); ++i) {
    CHECK(back.records[i].code_hex == c.records[i].code_hex);
    CHECK(back.records[i].htype == c.records[i].htype);
    CHECK(back.records[i].vtype == c.records[i].vtype);
    CHECK(canonical_form(back.records[i].q) == canonical_form(c.records[i].q));
  }

  CHECK(cache_compatible(back.header, 5, f, false));
  CHECK(cache_compatible(back.header, 3, f, false));
  CHECK(!cache_compatible(back.header, 6, f, false));
  CHECK(!cache_compatible(back.header, 5, f, true));
  CHECK(!cache_compatible(back.header, 5, CensusFilter{Stratum({4}, 1), ""}, false));

  std::istringstream bad("not a cache\n");
  CHECK_THROWS_AS(read_cache(bad), CacheError);
  std::string trunc = os.str();
  trunc.resize(trunc.size() / 2);
  std::istringstream tr(trunc);
  CHECK_THROWS_AS(read_cache(tr), CacheError);
}

TEST_CASE("csv output quotes fields with commas") {
  CountSeries s{"direct", "g1.b1.s[]/e(0,0,w=1)", "*", "sigma=[4,0];eps=1", "c", {5, 9}};
  auto text = s.csv();
  CHECK(text.find("L,count,engine,gamma1,gamma2,stratum,component\n") == 0);
  CHECK(text.find("\"sigma=[4,0];eps=1\"") != std::string::npos);
  CHECK(text.find("1,5,direct") != std::string::npos);
  CHECK(text.find("2,9,direct") != std::string::npos);
}
