#pragma once

// Finite branched-covering combinatorics: portraits on marked points,
// orbifold weights, Thurston matrices of multicurves and their spectral
// radius.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mating/errors.hpp"

namespace mating::thurston {

using Rational = boost::multiprecision::cpp_rational;

struct Portrait {
  std::vector<std::string> names;
  std::vector<std::size_t> next;
  std::vector<std::uint64_t> local_degree;
  std::uint64_t degree = 2;

  std::size_t size() const { return names.size(); }

  void validate() const {
    if (degree < 2) throw ValidationError("portrait degree must be at least 2");
    if (next.size() != names.size() || local_degree.size() != names.size()) {
      throw ValidationError("portrait needs a successor and a local degree for every point");
    }
    std::uint64_t branching = 0;
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (next[i] >= names.size()) {
        throw ValidationError("portrait is not post-critically closed: successor of " + names[i] + " is unmarked");
      }
      if (local_degree[i] < 1 || local_degree[i] > degree) {
        throw ValidationError("local degree of " + names[i] + " must lie in [1, degree]");
      }
      branching += local_degree[i] - 1;
    }
    if (branching > 2 * degree - 2) throw ValidationError("local degrees exceed the Riemann-Hurwitz bound 2d - 2");
  }

  // z^2 + c with critical orbit 0 = z_0 -> z_1 = c -> ... where z_{k+p} = z_k,
  // together with the fixed critical point at infinity.
  static Portrait quadratic(std::size_t preperiod, std::size_t period) {
    if (period < 1) throw ValidationError("period must be at least 1");
    Portrait p;
    const std::size_t n = preperiod + period;
    for (std::size_t i = 0; i < n; ++i) {
      p.names.push_back("z" + std::to_string(i));
      p.next.push_back(i + 1 < n ? i + 1 : preperiod);
      p.local_degree.push_back(i == 0 ? 2 : 1);
    }
    p.names.push_back("inf");
    p.next.push_back(n);
    p.local_degree.push_back(2);
    return p;
  }
};

struct Weight {
  std::uint64_t value = 1;
  bool infinite = false;

  friend bool operator==(const Weight&, const Weight&) = default;
};

inline std::string to_string(const Weight& w) { return w.infinite ? "inf" : std::to_string(w.value); }

struct OrbifoldData {
  std::vector<Weight> weights;
  std::vector<bool> postcritical;
  Rational chi;
  std::vector<std::string> warnings;
};

// nu(x) is the least common multiple of the local degrees of F^n at all
// iterated preimages of x: infinite on periodic cycles through a critical
// point, and otherwise the minimal solution of nu(F(y)) divisible by
// deg_y(F) nu(y).
inline OrbifoldData orbifold_data(const Portrait& p) {
  p.validate();
  const std::size_t n = p.size();
  OrbifoldData out;
  out.weights.assign(n, Weight{});
  out.postcritical.assign(n, false);
  for (std::size_t x = 0; x < n; ++x) {
    if (p.local_degree[x] < 2) continue;
    std::size_t y = p.next[x];
    while (!out.postcritical[y]) {
      out.postcritical[y] = true;
      y = p.next[y];
    }
  }
  // Periodic points: those returning to themselves within n steps.
  for (std::size_t x = 0; x < n; ++x) {
    std::size_t y = p.next[x];
    bool critical_cycle = p.local_degree[x] > 1;
    std::size_t steps = 1;
    while (y != x && steps <= n) {
      critical_cycle = critical_cycle || p.local_degree[y] > 1;
      y = p.next[y];
      ++steps;
    }
    if (y == x && critical_cycle) out.weights[x].infinite = true;
  }
  bool changed = true;
  std::size_t rounds = 0;
  while (changed) {
    changed = false;
    if (++rounds > 4 * n + 8) throw NumericError("orbifold weight propagation did not stabilise");
    for (std::size_t y = 0; y < n; ++y) {
      const std::size_t x = p.next[y];
      if (out.weights[x].infinite) continue;
      if (out.weights[y].infinite) {
        out.weights[x].infinite = true;
        changed = true;
        continue;
      }
      const std::uint64_t contribution = p.local_degree[y] * out.weights[y].value;
      const std::uint64_t merged = std::lcm(out.weights[x].value, contribution);
      if (merged != out.weights[x].value) {
        out.weights[x].value = merged;
        changed = true;
      }
    }
  }
  out.chi = 2;
  std::size_t post_count = 0;
  for (std::size_t x = 0; x < n; ++x) {
    if (!out.postcritical[x]) continue;
    ++post_count;
    const Weight& w = out.weights[x];
    out.chi -= w.infinite ? Rational(1) : Rational(1) - Rational(1, w.value);
  }
  if (post_count <= 3 && out.chi < 0) {
    out.warnings.push_back("negative orbifold Euler characteristic with at most three postcritical points");
  }
  return out;
}

// --- Thurston matrices ---------------------------------------------------------

// One component of the preimage of a curve. A missing target marks a
// peripheral or inessential component, which does not contribute.
struct PreimageComponent {
  std::optional<std::size_t> target;
  std::uint64_t degree = 1;
};

// pullback[j] lists the components of the preimage of curve j.
using Pullback = std::vector<std::vector<PreimageComponent>>;

struct ThurstonMatrix {
  std::size_t n = 0;
  std::vector<Rational> entries;  // row-major, A(i, j)

  const Rational& at(std::size_t i, std::size_t j) const { return entries.at(i * n + j); }
  Rational& at(std::size_t i, std::size_t j) { return entries.at(i * n + j); }

  static ThurstonMatrix from_rows(const std::vector<std::vector<Rational>>& rows) {
    ThurstonMatrix a;
    a.n = rows.size();
    for (const auto& r : rows) {
      if (r.size() != a.n) throw ValidationError("matrix must be square");
      for (const auto& v : r) {
        if (v < 0) throw ValidationError("matrix entries must be nonnegative");
        a.entries.push_back(v);
      }
    }
    return a;
  }
};

// A(i, j) = sum over components of the preimage of curve j homotopic to curve
// i of 1 / degree.
inline ThurstonMatrix thurston_matrix(const Pullback& pullback) {
  ThurstonMatrix a;
  a.n = pullback.size();
  a.entries.assign(a.n * a.n, Rational(0));
  for (std::size_t j = 0; j < a.n; ++j) {
    for (const auto& comp : pullback[j]) {
      if (comp.degree < 1) throw ValidationError("mapping degree must be at least 1");
      if (!comp.target) continue;
      if (*comp.target >= a.n) {
        throw ValidationError("component of curve " + std::to_string(j) + " targets unknown curve " +
                              std::to_string(*comp.target));
      }
      a.at(*comp.target, j) += Rational(1, comp.degree);
    }
  }
  return a;
}

// Whether I - A is a nonsingular M-matrix, i.e. whether the spectral radius of
// the nonnegative matrix A is strictly below 1. Decided exactly from the signs
// of the leading principal minors, read off as Gaussian elimination pivots.
inline bool spectral_radius_below_one(const ThurstonMatrix& a) {
  const std::size_t n = a.n;
  std::vector<Rational> m(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m[i * n + j] = (i == j ? Rational(1) : Rational(0)) - a.at(i, j);
  }
  for (std::size_t k = 0; k < n; ++k) {
    const Rational pivot = m[k * n + k];
    if (pivot <= 0) return false;
    for (std::size_t i = k + 1; i < n; ++i) {
      const Rational f = m[i * n + k] / pivot;
      if (f == 0) continue;
      for (std::size_t j = k; j < n; ++j) m[i * n + j] -= f * m[k * n + j];
    }
  }
  return true;
}

namespace detail {

using Poly = std::vector<Rational>;  // coefficients, lowest degree first

inline void trim(Poly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

inline Poly poly_mod(Poly a, const Poly& b) {
  trim(a);
  while (a.size() >= b.size() && !a.empty()) {
    const Rational f = a.back() / b.back();
    const std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= f * b[i];
    trim(a);
  }
  return a;
}

inline Poly poly_div(Poly a, const Poly& b) {
  trim(a);
  if (a.size() < b.size()) return {};
  Poly q(a.size() - b.size() + 1);
  while (a.size() >= b.size() && !a.empty()) {
    const Rational f = a.back() / b.back();
    const std::size_t shift = a.size() - b.size();
    q[shift] = f;
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= f * b[i];
    trim(a);
  }
  return q;
}

inline Poly derivative(const Poly& p) {
  Poly d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * static_cast<long long>(i));
  trim(d);
  return d;
}

inline Poly poly_gcd(Poly a, Poly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = poly_mod(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

inline Rational eval(const Poly& p, const Rational& x) {
  Rational acc = 0;
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
  return acc;
}

inline int sign(const Rational& v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

// Characteristic polynomial det(x I - A) by the Faddeev-LeVerrier recursion.
inline Poly characteristic_polynomial(const ThurstonMatrix& a) {
  const std::size_t n = a.n;
  Poly c(n + 1);
  c[n] = 1;
  std::vector<Rational> m(n * n, Rational(0));
  std::vector<Rational> am(n * n);
  for (std::size_t k = 1; k <= n; ++k) {
    // M_k = A M_{k-1} + c_{n-k+1} I
    std::vector<Rational> next(n * n, Rational(0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        Rational s = 0;
        for (std::size_t l = 0; l < n; ++l) s += a.at(i, l) * m[l * n + j];
        next[i * n + j] = s + (i == j ? c[n - k + 1] : Rational(0));
      }
    }
    m = std::move(next);
    Rational trace = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t l = 0; l < n; ++l) trace += a.at(i, l) * m[l * n + i];
    }
    c[n - k] = -trace / static_cast<long long>(k);
  }
  return c;
}

// Number of distinct real roots of p in (x, infinity), from a Sturm sequence.
inline int roots_above(const std::vector<Poly>& sturm, const Rational& x) {
  int changes_x = 0, changes_inf = 0, last_x = 0, last_inf = 0;
  for (const auto& s : sturm) {
    int sx = sign(eval(s, x));
    int si = sign(s.back());
    if (sx != 0) {
      if (last_x != 0 && sx != last_x) ++changes_x;
      last_x = sx;
    }
    if (si != 0) {
      if (last_inf != 0 && si != last_inf) ++changes_inf;
      last_inf = si;
    }
  }
  return changes_x - changes_inf;
}

// Largest real root of the characteristic polynomial, which for a
// nonnegative matrix is its spectral radius.
inline double largest_real_root(const ThurstonMatrix& a) {
  Poly p = characteristic_polynomial(a);
  Poly g = poly_gcd(p, derivative(p));
  Poly sq = g.size() > 1 ? poly_div(p, g) : p;
  std::vector<Poly> sturm{sq, derivative(sq)};
  while (sturm.back().size() > 1) {
    Poly r = poly_mod(sturm[sturm.size() - 2], sturm.back());
    if (r.empty()) break;
    for (auto& v : r) v = -v;
    sturm.push_back(std::move(r));
  }
  Rational bound = 0;
  for (std::size_t i = 0; i < a.n; ++i) {
    Rational row = 0;
    for (std::size_t j = 0; j < a.n; ++j) row += a.at(i, j);
    bound = std::max(bound, row);
  }
  Rational lo = -1, hi = bound + 1;
  for (int it = 0; it < 80; ++it) {
    Rational mid = (lo + hi) / 2;
    if (roots_above(sturm, mid) >= 1) lo = mid;
    else hi = mid;
  }
  return static_cast<double>(((lo + hi) / 2).convert_to<long double>());
}

}  // namespace detail

struct EigenResult {
  double value = 0;        // spectral radius
  bool obstructed = false; // spectral radius >= 1, decided exactly
  double lower = 0;        // Collatz-Wielandt bracket from power iteration
  double upper = 0;
  std::string method;
};

namespace detail {

// Strongly connected components of the support graph i -> j (a_ij > 0).
inline std::vector<std::vector<std::size_t>> strong_components(const ThurstonMatrix& a) {
  const std::size_t n = a.n;
  std::vector<char> reach(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    reach[i * n + i] = 1;
    for (std::size_t j = 0; j < n; ++j) {
      if (a.at(i, j) > 0) reach[i * n + j] = 1;
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!reach[i * n + k]) continue;
      for (std::size_t j = 0; j < n; ++j) reach[i * n + j] |= reach[k * n + j];
    }
  }
  std::vector<std::vector<std::size_t>> out;
  std::vector<char> done(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (done[i]) continue;
    std::vector<std::size_t> comp;
    for (std::size_t j = i; j < n; ++j) {
      if (reach[i * n + j] && reach[j * n + i]) {
        comp.push_back(j);
        done[j] = 1;
      }
    }
    out.push_back(std::move(comp));
  }
  return out;
}

// Collatz-Wielandt bracket of the spectral radius of an irreducible block, by
// power iteration on B + I (primitive, so the bracket closes).
inline std::pair<double, double> block_bracket(const ThurstonMatrix& a, const std::vector<std::size_t>& idx) {
  const std::size_t k = idx.size();
  std::vector<double> m(k * k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) m[i * k + j] = a.at(idx[i], idx[j]).convert_to<double>() + (i == j ? 1.0 : 0.0);
  }
  std::vector<double> x(k, 1.0), y(k);
  double lo = 0, hi = 0;
  for (int it = 0; it < 100000; ++it) {
    lo = INFINITY;
    hi = 0;
    double norm = 0;
    for (std::size_t i = 0; i < k; ++i) {
      double s = 0;
      for (std::size_t j = 0; j < k; ++j) s += m[i * k + j] * x[j];
      y[i] = s;
      lo = std::min(lo, s / x[i]);
      hi = std::max(hi, s / x[i]);
      norm = std::max(norm, s);
    }
    for (std::size_t i = 0; i < k; ++i) x[i] = y[i] / norm;
    if (hi - lo <= 1e-15 * hi) break;
  }
  return {lo - 1, hi - 1};
}

}  // namespace detail

inline EigenResult leading_eigenvalue(const ThurstonMatrix& a) {
  EigenResult out;
  out.obstructed = !spectral_radius_below_one(a);
  if (a.n == 0) {
    out.method = "empty";
    return out;
  }
  // The spectral radius is the largest over the irreducible diagonal blocks.
  for (const auto& comp : detail::strong_components(a)) {
    auto [lo, hi] = detail::block_bracket(a, comp);
    out.lower = std::max(out.lower, lo);
    out.upper = std::max(out.upper, hi);
  }
  if (a.n <= 4) {
    out.value = detail::largest_real_root(a);
    out.method = "characteristic-polynomial";
  } else {
    out.value = 0.5 * (out.lower + out.upper);
    out.method = "power-iteration";
  }
  return out;
}

}  // namespace mating::thurston
