#include <doctest.h>

#include <random>

#include "sqtile/polytope.hpp"

using namespace sqt;

namespace {

Polytope box(int d) {
  Polytope p;
  p.dim = d;
  for (int i = 0; i < d; ++i) {
    RatVec lo(d, 0), hi(d, 0);
    lo[i] = -1;
    hi[i] = 1;
    p.ineqs.push_back({lo, 0});
    p.ineqs.push_back({hi, 1});
  }
  return p;
}

Polytope simplex(int d) {
  Polytope p;
  p.dim = d;
  for (int i = 0; i < d; ++i) {
    RatVec lo(d, 0);
    lo[i] = -1;
    p.ineqs.push_back({lo, 0});
  }
  p.ineqs.push_back({RatVec(d, 1), 1});
  return p;
}

}  // namespace

TEST_CASE("vertices of cube and simplex") {
  auto vs = vertices(box(3));
  CHECK(vs.size() == 8);
  vs = vertices(simplex(4));
  CHECK(vs.size() == 5);
  CHECK(contains(simplex(2), {Rat(1, 3), Rat(1, 3)}));
  CHECK_FALSE(contains(simplex(2), {Rat(2, 3), Rat(2, 3)}));
}

TEST_CASE("volumes") {
  CHECK(volume(box(1)) == 1);
  CHECK(volume(box(4)) == 1);
  CHECK(volume(simplex(2)) == Rat(1, 2));
  CHECK(volume(simplex(3)) == Rat(1, 6));
  CHECK(volume(simplex(5)) == Rat(1, 120));
  // cross-polytope |x|+|y| <= 1
  Polytope p;
  p.dim = 2;
  for (int sx : {-1, 1})
    for (int sy : {-1, 1}) p.ineqs.push_back({{Rat(sx), Rat(sy)}, 1});
  CHECK(volume(p) == 2);
}

TEST_CASE("monomial integrals over the standard simplex") {
  // ∫ x^a y^b over Δ_2 = a! b! / (2+a+b)!
  auto mono = [](int d, std::vector<int> degs) {
    std::vector<LinIneq> forms;
    for (size_t i = 0; i < degs.size(); ++i)
      for (int r = 0; r < degs[i]; ++r) {
        RatVec a(d, 0);
        a[i] = 1;
        forms.push_back({a, 0});
      }
    return integrate_product(simplex(d), forms);
  };
  CHECK(mono(2, {1, 0}) == Rat(1, 6));
  CHECK(mono(2, {1, 1}) == Rat(1, 24));
  CHECK(mono(2, {2, 1}) == Rat(2, 120));
  CHECK(mono(3, {1, 1, 1}) == Rat(1, 720));
  // ∫ (x+y) over unit square = 1
  std::vector<LinIneq> f{{{Rat(1), Rat(1)}, 0}};
  Polytope sq;
  sq.dim = 2;
  sq.ineqs.push_back({{Rat(-1), Rat(0)}, 0});
  sq.ineqs.push_back({{Rat(0), Rat(-1)}, 0});
  sq.ineqs.push_back({{Rat(1), Rat(0)}, 1});
  sq.ineqs.push_back({{Rat(0), Rat(1)}, 1});
  CHECK(integrate_product(sq, f) == 1);
}

TEST_CASE("extrema") {
  auto [m, M] = extrema(simplex(2), {Rat(1), Rat(2)}, 0);
  CHECK(m == 0);
  CHECK(M == 2);
  // segment x+y=1, x,y >= 0
  Polytope seg;
  seg.dim = 2;
  seg.eqs.push_back({{Rat(1), Rat(1)}, 1});
  seg.ineqs.push_back({{Rat(-1), Rat(0)}, 0});
  seg.ineqs.push_back({{Rat(0), Rat(-1)}, 0});
  auto [m2, M2] = extrema(seg, {Rat(1), Rat(2)}, 0);
  CHECK(m2 == 1);
  CHECK(M2 == 2);
  // single point
  Polytope pt;
  pt.dim = 1;
  pt.eqs.push_back({{Rat(1)}, Rat(1, 3)});
  auto [m3, M3] = extrema(pt, {Rat(3)}, 1);
  CHECK(m3 == 2);
  CHECK(M3 == 2);
  Polytope empty = simplex(2);
  empty.ineqs.push_back({{Rat(-1), Rat(-1)}, -2});
  CHECK_THROWS_AS(extrema(empty, {Rat(1), Rat(0)}, 0), EmptyPolytope);
}

TEST_CASE("reduction eliminates equalities deterministically") {
  // x0 + x1 + x2 = 1, x0 - x2 = 0 → pivots x0, x1; free x2
  Polytope p;
  p.dim = 3;
  p.eqs.push_back({{Rat(1), Rat(1), Rat(1)}, 1});
  p.eqs.push_back({{Rat(1), Rat(0), Rat(-1)}, 0});
  for (int i = 0; i < 3; ++i) {
    RatVec a(3, 0);
    a[i] = -1;
    p.ineqs.push_back({a, 0});
  }
  auto r = reduce(p);
  CHECK(r.free_vars == std::vector<int>{2});
  auto x = r.lift({Rat(1, 4)});
  CHECK(x == RatVec{Rat(1, 4), Rat(1, 2), Rat(1, 4)});
  CHECK(contains(p, x));
  // inconsistent system
  Polytope bad;
  bad.dim = 2;
  bad.eqs.push_back({{Rat(1), Rat(1)}, 1});
  bad.eqs.push_back({{Rat(2), Rat(2)}, 3});
  CHECK_THROWS_AS(reduce(bad), EmptyPolytope);
}

TEST_CASE("random polytope volume agrees with Monte Carlo") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> coef(-3, 3);
  for (int trial = 0; trial < 5; ++trial) {
    Polytope p = box(3);
    for (int extra = 0; extra < 3; ++extra) {
      RatVec a(3);
      for (auto& x : a) x = coef(rng);
      p.ineqs.push_back({a, 1});
    }
    Rat v = volume(p);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int hits = 0, tries = 200000;
    for (int i = 0; i < tries; ++i) {
      RatVec x{Rat(0), Rat(0), Rat(0)};
      double xd[3];
      for (int j = 0; j < 3; ++j) xd[j] = u(rng);
      bool in = true;
      for (const auto& h : p.ineqs) {
        double lhs = 0;
        for (int j = 0; j < 3; ++j) lhs += (double)h.a[j] * xd[j];
        if (lhs > (double)h.c + 1e-12) in = false;
      }
      hits += in;
    }
    double mc = (double)hits / tries;
    CHECK((double)v == doctest::Approx(mc).epsilon(0.05));
  }
}
