#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "generators.hpp"
#include "mating/thurston.hpp"

using namespace mating::thurston;

namespace {

Portrait make(std::vector<std::string> names, std::vector<std::size_t> next, std::vector<std::uint64_t> deg) {
  Portrait p;
  p.names = std::move(names);
  p.next = std::move(next);
  p.local_degree = std::move(deg);
  return p;
}

// 0 -> i -> i - 1 -> -i -> i - 1 and the fixed critical point at infinity.
Portrait misiurewicz_i() { return make({"0", "i", "i-1", "-i", "inf"}, {1, 2, 3, 2, 4}, {2, 1, 1, 1, 2}); }

// Leibniz determinant of lambda I - A in doubles.
double char_poly_at(const std::vector<double>& a, std::size_t n, double lambda) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double total = 0;
  do {
    double term = 1;
    int inversions = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) inversions += perm[i] > perm[j];
      term *= (i == perm[i] ? lambda : 0.0) - a[i * n + perm[i]];
    }
    total += (inversions % 2 ? -1 : 1) * term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

ThurstonMatrix random_matrix(gen::Rng& r, std::size_t n) {
  std::vector<std::vector<Rational>> rows(n, std::vector<Rational>(n));
  for (auto& row : rows) {
    for (auto& v : row) v = gen::uniform(r, 0, 2) == 0 ? Rational(0) : Rational(1, gen::uniform(r, 1, 4));
  }
  return ThurstonMatrix::from_rows(rows);
}

}  // namespace

TEST(Portrait, Validation) {
  EXPECT_THROW(orbifold_data(make({"a"}, {1}, {1})), mating::ValidationError);
  EXPECT_THROW(orbifold_data(make({"a", "b", "c"}, {0, 1, 2}, {2, 2, 2})), mating::ValidationError);
  EXPECT_THROW(orbifold_data(make({"a"}, {0}, {3})), mating::ValidationError);
  EXPECT_NO_THROW(orbifold_data(Portrait::quadratic(1, 2)));
}

TEST(Orbifold, SquareMap) {
  const auto d = orbifold_data(Portrait::quadratic(0, 1));
  ASSERT_EQ(d.weights.size(), 2u);
  EXPECT_TRUE(d.weights[0].infinite);
  EXPECT_TRUE(d.weights[1].infinite);
  EXPECT_EQ(d.chi, 0);
  EXPECT_TRUE(d.warnings.empty());
}

// A critical point on a periodic cycle has preimages under F^n of unbounded
// local degree along the cycle, so every point of the cycle has weight
// infinity.
TEST(Orbifold, PeriodicCriticalCyclesHaveInfiniteWeight) {
  const auto basilica = orbifold_data(Portrait::quadratic(0, 2));
  for (const auto& w : basilica.weights) EXPECT_TRUE(w.infinite);
  EXPECT_EQ(basilica.chi, -1);
  EXPECT_EQ(basilica.warnings.size(), 1u);

  const auto rabbit = orbifold_data(Portrait::quadratic(0, 3));
  for (const auto& w : rabbit.weights) EXPECT_TRUE(w.infinite);
  EXPECT_EQ(rabbit.chi, -2);
  EXPECT_TRUE(rabbit.warnings.empty());
}

TEST(Orbifold, MisiurewiczParameter) {
  const auto d = orbifold_data(misiurewicz_i());
  EXPECT_FALSE(d.postcritical[0]);
  EXPECT_EQ(d.weights[0], (Weight{1, false}));
  EXPECT_EQ(d.weights[1], (Weight{2, false}));
  EXPECT_EQ(d.weights[2], (Weight{2, false}));
  EXPECT_EQ(d.weights[3], (Weight{2, false}));
  EXPECT_TRUE(d.weights[4].infinite);
  EXPECT_EQ(d.chi, Rational(-1, 2));
  EXPECT_EQ(to_string(d.weights[4]), "inf");
}

TEST(Orbifold, QuadraticPreperiodicPortraits) {
  // z^2 - 2: 0 -> -2 -> 2 -> 2, weights (2, 2) on {-2, 2}, chi = 0.
  const auto d = orbifold_data(Portrait::quadratic(2, 1));
  EXPECT_EQ(d.weights[1], (Weight{2, false}));
  EXPECT_EQ(d.weights[2], (Weight{2, false}));
  EXPECT_EQ(d.chi, 0);
}

TEST(OrbifoldProperty, WeightsSatisfyDivisibilityAndAreMinimal) {
  const std::vector<Portrait> catalog{Portrait::quadratic(0, 1), Portrait::quadratic(0, 2), Portrait::quadratic(1, 2),
                                      Portrait::quadratic(2, 1), Portrait::quadratic(2, 3), misiurewicz_i()};
  for (const auto& p : catalog) {
    const auto d = orbifold_data(p);
    auto ok = [&](const std::vector<Weight>& w) {
      for (std::size_t y = 0; y < p.size(); ++y) {
        const auto& a = w[y];
        const auto& b = w[p.next[y]];
        if (b.infinite) continue;
        if (a.infinite || b.value % (p.local_degree[y] * a.value) != 0) return false;
      }
      return true;
    };
    EXPECT_TRUE(ok(d.weights));
    for (std::size_t x = 0; x < p.size(); ++x) {
      if (d.weights[x].infinite) continue;
      for (std::uint64_t smaller = 1; smaller < d.weights[x].value; ++smaller) {
        auto w = d.weights;
        w[x].value = smaller;
        EXPECT_FALSE(ok(w)) << "weight of " << p.names[x] << " can drop to " << smaller;
      }
    }
  }
}

TEST(ThurstonMatrixTest, Examples) {
  auto a = thurston_matrix({{{0, 2}}});
  EXPECT_EQ(a.at(0, 0), Rational(1, 2));
  a = thurston_matrix({{{0, 1}}});
  EXPECT_EQ(a.at(0, 0), 1);
  // Curve 0 pulls back to curve 1 with degree 1, curve 1 to curve 0 with degree 2.
  a = thurston_matrix({{{1, 1}}, {{0, 2}}});
  EXPECT_EQ(a.at(0, 0), 0);
  EXPECT_EQ(a.at(0, 1), Rational(1, 2));
  EXPECT_EQ(a.at(1, 0), 1);
  EXPECT_EQ(a.at(1, 1), 0);
  // Peripheral components drop out; parallel components add up.
  a = thurston_matrix({{{0, 2}, {std::nullopt, 1}, {0, 2}}});
  EXPECT_EQ(a.at(0, 0), 1);
}

TEST(ThurstonMatrixTest, Validation) {
  EXPECT_THROW(thurston_matrix({{{3, 1}}}), mating::ValidationError);
  EXPECT_THROW(thurston_matrix({{{0, 0}}}), mating::ValidationError);
  EXPECT_THROW(ThurstonMatrix::from_rows({{Rational(-1)}}), mating::ValidationError);
  EXPECT_THROW(ThurstonMatrix::from_rows({{Rational(1), Rational(0)}}), mating::ValidationError);
}

TEST(Eigenvalue, Examples) {
  auto e = leading_eigenvalue(ThurstonMatrix::from_rows({{Rational(1)}}));
  EXPECT_DOUBLE_EQ(e.value, 1.0);
  EXPECT_TRUE(e.obstructed);
  e = leading_eigenvalue(ThurstonMatrix::from_rows({{Rational(1, 2)}}));
  EXPECT_DOUBLE_EQ(e.value, 0.5);
  EXPECT_FALSE(e.obstructed);
  e = leading_eigenvalue(ThurstonMatrix::from_rows({{0, Rational(1, 2)}, {1, 0}}));
  EXPECT_NEAR(e.value, 1 / std::sqrt(2.0), 1e-12);
  EXPECT_FALSE(e.obstructed);
  EXPECT_LE(e.lower, e.value + 1e-12);
  EXPECT_GE(e.upper, e.value - 1e-12);
}

TEST(Eigenvalue, ExactThresholdCases) {
  EXPECT_TRUE(leading_eigenvalue(ThurstonMatrix::from_rows({{0, 1}, {1, 0}})).obstructed);
  const Rational h(1, 2);
  EXPECT_TRUE(leading_eigenvalue(ThurstonMatrix::from_rows({{h, h}, {h, h}})).obstructed);
  const Rational tiny(1, 1000000000);
  EXPECT_FALSE(leading_eigenvalue(ThurstonMatrix::from_rows({{h, h}, {h, h - tiny}})).obstructed);
  EXPECT_TRUE(leading_eigenvalue(ThurstonMatrix::from_rows({{h, h}, {h, h + tiny}})).obstructed);
  EXPECT_FALSE(leading_eigenvalue(ThurstonMatrix::from_rows({{0, 0}, {0, 0}})).obstructed);
}

TEST(EigenvalueOracle, TwoByTwoClosedForm) {
  auto r = gen::rng(61);
  for (int i = 0; i < 300; ++i) {
    const auto a = random_matrix(r, 2);
    const double p = a.at(0, 0).convert_to<double>(), q = a.at(0, 1).convert_to<double>();
    const double s = a.at(1, 0).convert_to<double>(), t = a.at(1, 1).convert_to<double>();
    const double rho = 0.5 * (p + t + std::sqrt((p - t) * (p - t) + 4 * q * s));
    const auto e = leading_eigenvalue(a);
    EXPECT_NEAR(e.value, rho, 1e-12);
    if (std::abs(rho - 1) > 1e-9) EXPECT_EQ(e.obstructed, rho > 1);
  }
}

TEST(EigenvalueOracle, RootOfCharacteristicPolynomial) {
  auto r = gen::rng(62);
  for (std::size_t n = 3; n <= 6; ++n) {
    for (int i = 0; i < 60; ++i) {
      const auto a = random_matrix(r, n);
      std::vector<double> m(n * n);
      for (std::size_t k = 0; k < n * n; ++k) m[k] = a.entries[k].convert_to<double>();
      const auto e = leading_eigenvalue(a);
      // det(rho I - A) vanishes and no larger real root exists (sign check above rho).
      const double scale = std::pow(1 + e.value, static_cast<double>(n));
      EXPECT_NEAR(char_poly_at(m, n, e.value) / scale, 0.0, 1e-9) << "n=" << n;
      EXPECT_GT(char_poly_at(m, n, e.value + 1e-3 + 1e-3 * e.value), 0.0);
      if (std::abs(e.value - 1) > 1e-9) EXPECT_EQ(e.obstructed, e.value > 1);
      EXPECT_LE(e.lower, e.value + 1e-9);
      EXPECT_GE(e.upper, e.value - 1e-9);
    }
  }
}

TEST(EigenvalueProperty, PermutationInvariance) {
  auto r = gen::rng(63);
  for (std::size_t n = 2; n <= 6; ++n) {
    for (int i = 0; i < 30; ++i) {
      const auto a = random_matrix(r, n);
      std::vector<std::size_t> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), r);
      ThurstonMatrix b = a;
      for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) b.at(perm[x], perm[y]) = a.at(x, y);
      }
      const auto ea = leading_eigenvalue(a), eb = leading_eigenvalue(b);
      EXPECT_NEAR(ea.value, eb.value, 1e-9 * (1 + ea.value));
      EXPECT_EQ(ea.obstructed, eb.obstructed);
    }
  }
}

TEST(EigenvalueProperty, DegreeScaling) {
  auto r = gen::rng(64);
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = gen::uniform(r, 1, 5);
    Pullback pb(n);
    for (auto& comps : pb) {
      const auto k = gen::uniform(r, 0, 3);
      for (std::uint64_t c = 0; c < k; ++c) comps.push_back({gen::uniform(r, 0, n - 1), gen::uniform(r, 1, 3)});
    }
    const std::uint64_t m = gen::uniform(r, 2, 4);
    Pullback scaled = pb;
    for (auto& comps : scaled) {
      for (auto& c : comps) c.degree *= m;
    }
    const auto a = thurston_matrix(pb), b = thurston_matrix(scaled);
    for (std::size_t k = 0; k < a.entries.size(); ++k) EXPECT_EQ(b.entries[k] * m, a.entries[k]);
    EXPECT_NEAR(leading_eigenvalue(b).value * static_cast<double>(m), leading_eigenvalue(a).value, 1e-9);
  }
}
