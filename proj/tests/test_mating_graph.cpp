#include <gtest/gtest.h>

#include <algorithm>
#include <cstdint>
#include <deque>
#include <numeric>
#include <set>
#include <vector>

#include "generators.hpp"
#include "mating/mating_graph.hpp"
#include "oracles.hpp"

using mating::Angle;
using mating::ClassShape;
using mating::ScanReport;

namespace {

struct OracleClass {
  std::set<std::uint64_t> edges;
  bool cyclic = false;
};

// Ray classes of the angles m/den from numerically traced landing points:
// edge m joins white landing point of m/den to black landing point of -m/den.
std::vector<OracleClass> oracle_ray_classes(std::complex<double> cw, std::complex<double> cb, std::uint64_t den) {
  const auto white = oracle::landing_partition(cw, den);
  const auto black = oracle::landing_partition(cb, den);
  std::vector<std::size_t> wl(den), bl(den);
  for (std::size_t c = 0; c < white.size(); ++c) {
    for (auto m : white[c]) wl[m] = c;
  }
  for (std::size_t c = 0; c < black.size(); ++c) {
    for (auto m : black[c]) bl[m] = c;
  }
  std::vector<bool> seen(den, false);
  std::vector<OracleClass> out;
  for (std::uint64_t s = 0; s < den; ++s) {
    if (seen[s]) continue;
    OracleClass oc;
    std::set<std::size_t> wv, bv;
    std::deque<std::uint64_t> q{s};
    seen[s] = true;
    while (!q.empty()) {
      const auto m = q.front();
      q.pop_front();
      oc.edges.insert(m);
      wv.insert(wl[m]);
      bv.insert(bl[(den - m) % den]);
      for (auto x : white[wl[m]]) {
        if (!seen[x]) seen[x] = true, q.push_back(x);
      }
      for (auto y : black[bl[(den - m) % den]]) {
        const auto x = (den - y) % den;
        if (!seen[x]) seen[x] = true, q.push_back(x);
      }
    }
    oc.cyclic = oc.edges.size() + 1 > wv.size() + bv.size();
    out.push_back(oc);
  }
  return out;
}

std::set<Angle> edge_set(const mating::RayClassGraph& g) { return {g.edges.begin(), g.edges.end()}; }

}  // namespace

TEST(RayClass, BasilicaBasilicaIsCyclic) {
  const auto g = mating::ray_class(Angle(1, 3), Angle(1, 3), Angle(1, 3), 100);
  EXPECT_EQ(g.edges, (std::vector<Angle>{Angle(1, 3), Angle(2, 3)}));
  ASSERT_EQ(g.white.size(), 1u);
  ASSERT_EQ(g.black.size(), 1u);
  EXPECT_EQ(g.white[0].angles, (std::vector<Angle>{Angle(1, 3), Angle(2, 3)}));
  EXPECT_EQ(g.black[0].angles, (std::vector<Angle>{Angle(1, 3), Angle(2, 3)}));
  EXPECT_EQ(mating::classify_class(g).kind, ClassShape::Kind::Cyclic);
}

TEST(RayClass, SquareSquareIsAnEdge) {
  const auto g = mating::ray_class(Angle(1, 5), Angle(0, 1), Angle(0, 1), 100);
  EXPECT_EQ(g.edges, (std::vector<Angle>{Angle(1, 5)}));
  EXPECT_EQ(g.vertex_count(), 2u);
  EXPECT_EQ(mating::classify_class(g), (ClassShape{ClassShape::Kind::Tree, 1}));
}

TEST(RayClass, RabbitCorabbitIsCyclic) {
  const auto g = mating::ray_class(Angle(1, 7), Angle(1, 7), Angle(6, 7), 100);
  const auto e = edge_set(g);
  for (const Angle& a : {Angle(1, 7), Angle(2, 7), Angle(4, 7)}) EXPECT_TRUE(e.contains(a));
  EXPECT_EQ(mating::classify_class(g).kind, ClassShape::Kind::Cyclic);
}

// 1/3 and 2/3 co-land for the basilica but land apart for the rabbit, so the
// class is the path b(2/3) - w{1/3, 2/3} - b(1/3).
TEST(RayClass, BasilicaRabbitPath) {
  const auto g = mating::ray_class(Angle(1, 3), Angle(1, 3), Angle(1, 7), 10000);
  const auto shape = mating::classify_class(g);
  EXPECT_EQ(shape.kind, ClassShape::Kind::Tree);
  EXPECT_EQ(shape.diameter, 2u);
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_EQ(g.vertex_count(), 3u);
}

TEST(RayClass, TruncationAndBudget) {
  const auto g = mating::ray_class(Angle(1, 7), Angle(1, 7), Angle(6, 7), 1);
  EXPECT_TRUE(g.truncated);
  EXPECT_EQ(mating::classify_class(g).kind, ClassShape::Kind::TruncatedUnknown);
  EXPECT_THROW(mating::ray_class(Angle(1, 7), Angle(1, 7), Angle(6, 7), 0), mating::InvalidArgument);
}

TEST(RayClass, GraphInvariants) {
  const mating::MatingModel model(Angle(1, 3), Angle(3, 7));
  auto r = gen::rng(51);
  for (int i = 0; i < 60; ++i) {
    const Angle start = gen::angle(r);
    if (start.denominator() > 2048) continue;
    const auto g = mating::ray_class(start, model, 10000);
    ASSERT_FALSE(g.truncated);
    std::set<Angle> from_white, from_black;
    for (const auto& w : g.white) from_white.insert(w.angles.begin(), w.angles.end());
    for (const auto& b : g.black) {
      for (const auto& a : b.angles) from_black.insert(conjugate(a));
    }
    EXPECT_EQ(from_white, edge_set(g));
    EXPECT_EQ(from_black, edge_set(g));
    EXPECT_GE(g.edge_count() + 1, g.vertex_count());
    // Connected: BFS from vertex 0 reaches everything.
    const auto adj = mating::adjacency(g);
    std::vector<bool> seen(adj.size(), false);
    std::deque<std::size_t> q{0};
    seen[0] = true;
    while (!q.empty()) {
      auto v = q.front();
      q.pop_front();
      for (auto u : adj[v]) {
        if (!seen[u]) seen[u] = true, q.push_back(u);
      }
    }
    EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) << start;
  }
}

struct PairCase {
  Angle tw, tb;
  std::complex<double> cw, cb;
  std::vector<std::uint64_t> dens;
};

class RayClassOracle : public ::testing::TestWithParam<int> {};

TEST_P(RayClassOracle, MatchesLandingPointBfs) {
  const std::vector<PairCase> cases{
      {Angle(1, 3), Angle(1, 7), -1.0, oracle::rabbit(), {3, 7, 15, 6, 14}},
      {Angle(1, 7), Angle(6, 7), oracle::rabbit(), oracle::corabbit(), {7, 14, 15}},
      {Angle(1, 3), Angle(1, 3), -1.0, -1.0, {3, 6, 15, 7}},
      {Angle(3, 7), Angle(1, 3), oracle::airplane(), -1.0, {7, 15, 6, 14}},
      {Angle(1, 7), Angle(1, 7), oracle::rabbit(), oracle::rabbit(), {7, 14, 15}},
  };
  const auto& pc = cases.at(static_cast<std::size_t>(GetParam()));
  const mating::MatingModel model(pc.tw, pc.tb);
  for (auto den : pc.dens) {
    for (const auto& oc : oracle_ray_classes(pc.cw, pc.cb, den)) {
      const Angle start(static_cast<long long>(*oc.edges.begin()), static_cast<long long>(den));
      const auto g = mating::ray_class(start, model, 10000);
      std::set<std::uint64_t> got;
      for (const auto& a : g.edges) {
        const mating::BigInt k = a.numerator() * den / a.denominator();
        got.insert(k.convert_to<std::uint64_t>());
      }
      EXPECT_EQ(got, oc.edges) << pc.tw << " x " << pc.tb << " start " << start;
      EXPECT_EQ(mating::classify_class(g).kind == ClassShape::Kind::Cyclic, oc.cyclic) << start;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Pairs, RayClassOracle, ::testing::Range(0, 5));

TEST(RayClassProperty, ColorSwapSymmetry) {
  auto r = gen::rng(52);
  const std::vector<std::pair<Angle, Angle>> pairs{{Angle(1, 3), Angle(1, 7)}, {Angle(3, 7), Angle(1, 15)},
                                                   {Angle(1, 7), Angle(6, 7)}};
  for (const auto& [tw, tb] : pairs) {
    const mating::MatingModel fwd(tw, tb), rev(tb, tw);
    for (int i = 0; i < 25; ++i) {
      const Angle s = gen::angle(r);
      if (s.denominator() > 1024) continue;
      const auto g = mating::ray_class(s, fwd, 10000);
      const auto h = mating::ray_class(conjugate(s), rev, 10000);
      std::set<Angle> conj_edges;
      for (const auto& a : g.edges) conj_edges.insert(conjugate(a));
      EXPECT_EQ(conj_edges, edge_set(h));
      EXPECT_EQ(g.white.size(), h.black.size());
      EXPECT_EQ(g.black.size(), h.white.size());
      EXPECT_EQ(mating::classify_class(g), mating::classify_class(h));
    }
  }
}

TEST(RayClassProperty, DoublingMapsClassIntoClass) {
  auto r = gen::rng(53);
  const mating::MatingModel model(Angle(1, 3), Angle(1, 7));
  for (int i = 0; i < 40; ++i) {
    const Angle s = gen::angle(r);
    if (s.denominator() > 1024) continue;
    const auto g = mating::ray_class(s, model, 10000);
    const auto image = edge_set(mating::ray_class(times_d(s, 2), model, 10000));
    for (const auto& a : g.edges) EXPECT_TRUE(image.contains(times_d(a, 2))) << s;
  }
}

TEST(Limbs, RotationCyclesMatchBruteForce) {
  for (std::size_t q = 2; q <= 9; ++q) {
    for (std::size_t p = 1; p < q; ++p) {
      if (std::gcd(p, q) != 1) continue;
      const auto brute = oracle::rotation_cycles(p, q);
      ASSERT_EQ(brute.size(), 1u) << p << "/" << q;
      EXPECT_EQ(mating::rotation_cycle(p, q), brute[0]) << p << "/" << q;
    }
  }
  EXPECT_THROW(mating::rotation_cycle(2, 4), mating::InvalidArgument);
  EXPECT_THROW(mating::rotation_cycle(0, 3), mating::InvalidArgument);
}

TEST(Limbs, Examples) {
  EXPECT_EQ(mating::limb_of_angle(Angle(1, 3)).rotation, Angle(1, 2));
  EXPECT_EQ(mating::limb_of_angle(Angle(1, 7)).rotation, Angle(1, 3));
  EXPECT_EQ(mating::limb_of_angle(Angle(6, 7)).rotation, Angle(2, 3));
  EXPECT_EQ(mating::limb_of_angle(Angle(3, 7)).rotation, Angle(1, 2));
  EXPECT_EQ(mating::limb_of_angle(Angle(1, 15)).rotation, Angle(1, 4));
  EXPECT_EQ(mating::limb_of_angle(Angle(2, 5)).rotation, Angle(1, 2));  // 2/5 has period 4
  const auto l = mating::limb_of_angle(Angle(1, 7));
  EXPECT_EQ(l.lower, Angle(1, 7));
  EXPECT_EQ(l.upper, Angle(2, 7));
  EXPECT_THROW(mating::limb_of_angle(Angle(0, 1)), mating::MainCardioid);
  EXPECT_TRUE(mating::conjugate_limbs(Angle(1, 7), Angle(6, 7)));
  EXPECT_TRUE(mating::conjugate_limbs(Angle(1, 3), Angle(3, 7)));
  EXPECT_FALSE(mating::conjugate_limbs(Angle(1, 3), Angle(1, 7)));
  EXPECT_FALSE(mating::conjugate_limbs(Angle(0, 1), Angle(1, 3)));
}

TEST(Limbs, PeriodicAnglesInsideLimbArcs) {
  // Every periodic angle strictly between the arc ends of the p/q limb has
  // that rotation number, and the companion angle lies in the same arc.
  for (std::size_t per = 2; per <= 8; ++per) {
    const std::uint64_t den = (std::uint64_t{1} << per) - 1;
    for (std::uint64_t m = 1; m < den; ++m) {
      const Angle a(static_cast<long long>(m), static_cast<long long>(den));
      if (mating::orbit_type(a).period != per) continue;
      const auto l = mating::limb_of_angle(a);
      EXPECT_TRUE(mating::in_closed_arc(mating::companion_angle(a), l.lower, l.upper)) << a;
    }
  }
}

TEST(Scan, Examples) {
  auto r = mating::scan_verdict(Angle(1, 3), Angle(1, 3), 3, 10000);
  EXPECT_EQ(r.verdict, ScanReport::Verdict::MooreObstructed);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_EQ(r.witness->edges, (std::vector<Angle>{Angle(1, 3), Angle(2, 3)}));

  r = mating::scan_verdict(Angle(1, 3), Angle(1, 7), 6, 10000);
  EXPECT_EQ(r.verdict, ScanReport::Verdict::NoObstructionFound);
  EXPECT_TRUE(r.audit.all_finite && r.audit.non_separating && r.audit.nontrivial);

  r = mating::scan_verdict(Angle(0, 1), Angle(0, 1), 4, 10000);
  EXPECT_EQ(r.verdict, ScanReport::Verdict::NoObstructionFound);
  EXPECT_EQ(r.max_diameter, 1u);
  EXPECT_EQ(r.growth.size(), 4u);
}

TEST(Scan, InconclusiveWhenBudgetIsTiny) {
  const auto r = mating::scan_verdict(Angle(1, 3), Angle(1, 7), 3, 1);
  EXPECT_EQ(r.verdict, ScanReport::Verdict::Inconclusive);
  EXPECT_FALSE(r.truncated_starts.empty());
  EXPECT_FALSE(r.audit.all_finite);
}

TEST(Scan, FullScanCollectsEveryCycle) {
  mating::ScanOptions opts;
  opts.stop_at_first_cycle = false;
  const auto r = mating::scan_verdict(Angle(1, 7), Angle(6, 7), 4, 10000, opts);
  EXPECT_EQ(r.verdict, ScanReport::Verdict::MooreObstructed);
  EXPECT_EQ(r.growth.size(), 4u);
}
