#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "sqtile/component.hpp"

using namespace sqt;

namespace {

SquareTiledSurface torus1() { return build_from_permutations({0}, {0}); }
SquareTiledSurface l_origami() { return build_from_permutations({1, 0, 2}, {2, 1, 0}); }

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

std::vector<SquareTiledSurface> origamis_with_orders(int n, std::vector<int> want,
                                                     int count, uint32_t seed) {
  std::sort(want.begin(), want.end());
  std::mt19937 rng(seed);
  std::vector<SquareTiledSurface> out;
  std::vector<int> h(n), v(n);
  while ((int)out.size() < count) {
    std::iota(h.begin(), h.end(), 0);
    std::iota(v.begin(), v.end(), 0);
    std::shuffle(h.begin(), h.end(), rng);
    std::shuffle(v.begin(), v.end(), rng);
    SquareTiledSurface q;
    try {
      q = build_from_permutations(h, v);
    } catch (const Error&) {
      continue;
    }
    if (!validate(q).ok) continue;
    auto orders = singularity_profile(q).nonzero_orders();
    std::sort(orders.begin(), orders.end());
    if (orders == want) out.push_back(q);
  }
  return out;
}

}  // namespace

TEST_CASE("component tables") {
  auto comps = [](const char* s) { return stratum_components(Stratum::parse(s)); };
  using V = std::vector<std::string>;
  CHECK(comps("sigma=[0];eps=1") == V{"c"});
  CHECK(comps("sigma=[4];eps=1") == V{"c"});
  CHECK(comps("sigma=[2,2];eps=1") == V{"c"});
  CHECK(comps("sigma=[8];eps=1") == V{"hyp", "odd"});
  CHECK(comps("sigma=[4,4];eps=1") == V{"hyp", "odd"});
  CHECK(comps("sigma=[4,2,2];eps=1") == V{"c"});
  CHECK(comps("sigma=[12];eps=1") == V{"hyp", "even", "odd"});
  CHECK(comps("sigma=[6,6];eps=1") == V{"hyp", "nonhyp"});
  CHECK(comps("sigma=[8,4];eps=1") == V{"even", "odd"});
  CHECK(comps("sigma=[-1,-1,-1,-1];eps=0") == V{"c"});
  CHECK(comps("sigma=[4,0];eps=1") == V{"c"});  // marked points change nothing
  CHECK(stratum_classified(Stratum::parse("sigma=[0];eps=0")));
  CHECK_FALSE(stratum_classified(Stratum::parse("sigma=[4];eps=0")));
  CHECK_THROWS_AS(stratum_components(Stratum::parse("sigma=[4];eps=0")),
                  UnclassifiedStratum);
  CHECK_THROWS_AS(stratum_components(Stratum::parse("sigma=[3,1];eps=1")),
                  InvalidStratum);
}

TEST_CASE("torus is hyperelliptic (four fixed points)") {
  CHECK(is_hyperelliptic(torus1()));
  CHECK(is_hyperelliptic(build_from_permutations({1, 0}, {0, 1})));
  CHECK(component_of(torus1()) == "c");
}

TEST_CASE("every genus-2 origami is hyperelliptic") {
  CHECK(is_hyperelliptic(l_origami()));
  for (auto& q : origamis_with_orders(4, {4}, 4, 101)) CHECK(is_hyperelliptic(q));
  for (auto& q : origamis_with_orders(4, {2, 2}, 4, 202)) CHECK(is_hyperelliptic(q));
  for (auto& q : origamis_with_orders(5, {4}, 3, 303)) CHECK(is_hyperelliptic(q));
}

TEST_CASE("spin parity in genus 2 is odd") {
  CHECK(spin_parity(l_origami()) == 1);
  for (auto& q : origamis_with_orders(4, {4}, 4, 404)) CHECK(spin_parity(q) == 1);
  for (auto& q : origamis_with_orders(5, {4}, 3, 505)) CHECK(spin_parity(q) == 1);
  // spin needs orders divisible by four
  auto h11 = origamis_with_orders(4, {2, 2}, 1, 606)[0];
  CHECK_THROWS_AS(spin_parity(h11), Error);
}

TEST_CASE("genus-3 single-zero stratum: hyperelliptic iff even parity") {
  auto samples = origamis_with_orders(5, {8}, 6, 707);
  auto more = origamis_with_orders(6, {8}, 4, 808);
  samples.insert(samples.end(), more.begin(), more.end());
  bool saw_hyp = false, saw_odd = false;
  for (auto& q : samples) {
    bool hyp = is_hyperelliptic(q);
    int parity = spin_parity(q);
    CHECK(hyp == (parity == 0));
    auto c = component_of(q);
    CHECK(c == (hyp ? "hyp" : "odd"));
    (hyp ? saw_hyp : saw_odd) = true;
  }
  CHECK(saw_hyp);
  CHECK(saw_odd);
}

TEST_CASE("classification is presentation-invariant") {
  std::mt19937 rng(3);
  for (auto& q : origamis_with_orders(5, {8}, 3, 909)) {
    auto c = component_of(q);
    CHECK(component_of(rotate90(q)) == c);
    std::vector<uint8_t> f(5);
    for (auto& x : f) x = rng() & 1;
    CHECK(component_of(flip_squares(q, f)) == c);
  }
}

TEST_CASE("component of eps=0 surfaces") {
  CHECK(component_of(pillowcase4()) == "c");
}
